//! Order of `τ₁·τ₂` with provenance.
//!
//! Stages run in a fixed order: trivial cases, exact certificates, the
//! symbolic power scan, and orbit tracing. Heuristic infinite verdicts are
//! kept apart from certified ones, and `Inconclusive` is a normal outcome.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::certificates::{
    classify_pair, common_vertex_order, equal_modulus_allowed_set, equal_residue_infinite,
    horizontal_order_set, CertificateSource, CertificateVerdict, OrderCertificate, OrderValue,
};
use crate::error::{Error, Result};
use crate::rcwa::{OrderScanResult, RcwaMap};
use crate::residue::ClassTransposition;
use crate::Int;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub power_n_max: u64,
    pub power_mod_max: Int,
    pub orbit_step_max: u64,
    pub orbit_value_bound: Int,
    pub window_bound: Int,
    /// Also run the power scan on pairs already certified infinite, so the
    /// certificate is cross-checked.
    pub scan_certified: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            power_n_max: 512,
            power_mod_max: 1_000_000,
            orbit_step_max: 10_000,
            orbit_value_bound: 1_000_000_000,
            window_bound: 1_000,
            scan_certified: false,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.power_n_max == 0
            || self.power_mod_max < 1
            || self.orbit_step_max == 0
            || self.orbit_value_bound < 1
            || self.window_bound < 1
        {
            return Err(Error::precondition("oracle limits must all be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Equality,
    DisjointSupports,
    CommonVertex,
    EqualResidueRatio,
    PowerScan,
    OrbitTrace,
    HorizontalSet,
    EqualModulusSet,
    PowerVerification,
}

impl Stage {
    pub fn tag(self) -> &'static str {
        match self {
            Stage::Equality => "equality",
            Stage::DisjointSupports => "disjoint-supports",
            Stage::CommonVertex => "common-vertex",
            Stage::EqualResidueRatio => "equal-residue-ratio",
            Stage::PowerScan => "power-scan",
            Stage::OrbitTrace => "orbit-trace",
            Stage::HorizontalSet => "horizontal-set",
            Stage::EqualModulusSet => "equal-modulus-set",
            Stage::PowerVerification => "power-verification",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blowup {
    pub step: u64,
    pub modulus: Int,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Escape {
    pub start: Int,
    pub step: u64,
    pub value: Int,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicEvidence {
    pub blowup: Option<Blowup>,
    pub escape: Option<Escape>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    FiniteOrder(u64),
    InfiniteCertified(CertificateSource),
    InfiniteHeuristic(HeuristicEvidence),
    Inconclusive,
}

impl Outcome {
    pub fn order_value(&self) -> Option<OrderValue> {
        match self {
            Outcome::FiniteOrder(n) => Some(OrderValue::Finite(*n)),
            Outcome::InfiniteCertified(_) | Outcome::InfiniteHeuristic(_) => Some(OrderValue::Infinite),
            Outcome::Inconclusive => None,
        }
    }

    /// Whether the outcome is an exact claim.
    pub fn is_certified(&self) -> bool {
        matches!(self, Outcome::FiniteOrder(_) | Outcome::InfiniteCertified(_))
    }

    /// Same kind and order, ignoring heuristic evidence details.
    pub fn same_order_class(&self, other: &Outcome) -> bool {
        match (self, other) {
            (Outcome::InfiniteHeuristic(_), Outcome::InfiniteHeuristic(_)) => true,
            _ => self == other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub outcome: Outcome,
    /// The stage whose result fixed the outcome.
    pub decided_by: Stage,
    pub method: Vec<Stage>,
    /// False when a certificate and the scan disagree, or when the outcome
    /// falls outside an allowed-set certificate.
    pub consistent: bool,
}

/// Order as written in reports: a number, `"inf"`, or `"unknown"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportedOrder {
    Finite(u64),
    Text(String),
}

impl fmt::Display for ReportedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportedOrder::Finite(n) => write!(f, "{n}"),
            ReportedOrder::Text(s) => f.write_str(s),
        }
    }
}

/// Serialized verdict `{order, certified, method}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub order: ReportedOrder,
    pub certified: bool,
    pub method: Vec<String>,
}

impl OrderVerdict {
    pub fn report(&self) -> VerdictReport {
        let order = match self.outcome.order_value() {
            Some(OrderValue::Finite(n)) => ReportedOrder::Finite(n),
            Some(OrderValue::Infinite) => ReportedOrder::Text("inf".into()),
            None => ReportedOrder::Text("unknown".into()),
        };
        VerdictReport {
            order,
            certified: self.outcome.is_certified(),
            method: self.method.iter().map(|s| s.tag().to_string()).collect(),
        }
    }
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.outcome {
            Outcome::FiniteOrder(n) => write!(f, "order: {n} (certified: {})", self.decided_by.tag()),
            Outcome::InfiniteCertified(src) => write!(f, "order: inf (certified: {src})"),
            Outcome::InfiniteHeuristic(ev) => {
                write!(f, "order: inf (heuristic:")?;
                if let Some(b) = ev.blowup {
                    write!(f, " modulus {} at power {}", b.modulus, b.step)?;
                }
                if let Some(e) = ev.escape {
                    write!(f, " orbit of {} reaches {} after {} steps", e.start, e.value, e.step)?;
                }
                write!(f, ")")
            }
            Outcome::Inconclusive => write!(f, "order: unknown (inconclusive)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitResult {
    Cycle(u64),
    Escaped { step: u64, value: Int },
    StepBudgetExhausted,
}

/// Follows the orbit of `x0` until it returns, leaves `±orbit_value_bound`,
/// or runs out of steps.
pub fn orbit_trace(sigma: &RcwaMap, x0: Int, cfg: &OracleConfig) -> Result<OrbitResult> {
    let mut x = x0;
    for step in 1..=cfg.orbit_step_max {
        x = sigma.evaluate(x)?;
        if x == x0 {
            return Ok(OrbitResult::Cycle(step));
        }
        if x.abs() > cfg.orbit_value_bound {
            return Ok(OrbitResult::Escaped { step, value: x });
        }
    }
    Ok(OrbitResult::StepBudgetExhausted)
}

const ORBIT_WINDOW_FACTOR: Int = 8;

/// lcm of the cycle lengths through every integer in
/// `[-8·M, 8·M)` (`M` the modulus), or `None` if one of those orbits does
/// not close.
pub fn finite_order_via_orbits(sigma: &RcwaMap, cfg: &OracleConfig) -> Result<Option<u64>> {
    let reach = sigma.modulus() * ORBIT_WINDOW_FACTOR;
    let mut order: u64 = 1;
    for x in -reach..reach {
        match orbit_trace(sigma, x, cfg)? {
            OrbitResult::Cycle(len) => {
                let g = arith::gcd(order as Int, len as Int) as u64;
                order = order
                    .checked_mul(len / g)
                    .ok_or(Error::Overflow("orbit order lcm"))?;
            }
            _ => return Ok(None),
        }
    }
    Ok(Some(order))
}

/// First escaping orbit among starts `0, 1, …, M-1` and their negatives.
fn find_escape(sigma: &RcwaMap, cfg: &OracleConfig) -> Result<Option<Escape>> {
    let m = sigma.modulus().min(4096);
    for x in (0..m).flat_map(|x| [x, -x - 1]) {
        if let OrbitResult::Escaped { step, value } = orbit_trace(sigma, x, cfg)? {
            return Ok(Some(Escape { start: x, step, value }));
        }
    }
    Ok(None)
}

/// Checks `sigma^n = 1` and `sigma^(n/p) ≠ 1` for each prime `p | n`.
pub fn verify_order(sigma: &RcwaMap, n: u64) -> Result<bool> {
    if n == 0 || !sigma.pow(n)?.is_identity() {
        return Ok(false);
    }
    let mut rest = n;
    let mut p = 2;
    while rest > 1 {
        if p * p > rest {
            p = rest;
        }
        if rest.is_multiple_of(p) {
            if sigma.pow(n / p)?.is_identity() {
                return Ok(false);
            }
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        p += 1;
    }
    Ok(true)
}

struct Pipeline<'a> {
    cfg: &'a OracleConfig,
    method: Vec<Stage>,
    consistent: bool,
}

impl Pipeline<'_> {
    fn scan(&mut self, sigma: &RcwaMap) -> Result<OrderScanResult> {
        self.method.push(Stage::PowerScan);
        sigma.power_order_scan(self.cfg.power_n_max, self.cfg.power_mod_max.max(sigma.modulus()))
    }

    /// Runs the scan as an independent check of an exact certificate.
    fn cross_check(&mut self, sigma: &RcwaMap, cert: &OrderCertificate) -> Result<()> {
        let agrees = match (self.scan(sigma)?, &cert.verdict) {
            (OrderScanResult::Finite(n), CertificateVerdict::Finite(m)) => n == *m,
            (OrderScanResult::Finite(_), CertificateVerdict::Infinite) => false,
            (_, CertificateVerdict::Infinite) => true,
            _ => false,
        };
        self.consistent &= agrees;
        Ok(())
    }
}

/// Order of the product `t1·t2` (`t1` applied first).
///
/// The pair is put in a fixed order first: `t1·t2` and `t2·t1` are
/// conjugate, so this changes nothing about the order and makes the verdict
/// independent of argument order.
pub fn order_of_product(
    t1: &ClassTransposition,
    t2: &ClassTransposition,
    cfg: &OracleConfig,
) -> Result<OrderVerdict> {
    cfg.validate()?;
    let (t1, t2) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let mut p = Pipeline { cfg, method: Vec::new(), consistent: true };
    let class = classify_pair(t1, t2);
    let sigma = RcwaMap::product(t1, t2)?;

    let mut decided_by = Stage::Equality;
    let outcome = 'decide: {
        p.method.push(Stage::Equality);
        if t1 == t2 {
            break 'decide Outcome::FiniteOrder(1);
        }
        p.method.push(Stage::DisjointSupports);
        decided_by = Stage::DisjointSupports;
        if t1.support_disjoint(t2) {
            break 'decide Outcome::FiniteOrder(2);
        }
        if class.common_vertex {
            p.method.push(Stage::CommonVertex);
            decided_by = Stage::CommonVertex;
            let cert = common_vertex_order(t1, t2)?;
            match cert.verdict {
                CertificateVerdict::Finite(n) => {
                    p.cross_check(&sigma, &cert)?;
                    break 'decide Outcome::FiniteOrder(n);
                }
                CertificateVerdict::Infinite => {
                    if cfg.scan_certified {
                        p.cross_check(&sigma, &cert)?;
                    }
                    break 'decide Outcome::InfiniteCertified(cert.source);
                }
                CertificateVerdict::AllowedSet(_) => unreachable!("common-vertex certificates are exact"),
            }
        }
        if class.equal_residue {
            p.method.push(Stage::EqualResidueRatio);
            if let Some(cert) = equal_residue_infinite(t1, t2)? {
                decided_by = Stage::EqualResidueRatio;
                if cfg.scan_certified {
                    p.cross_check(&sigma, &cert)?;
                }
                break 'decide Outcome::InfiniteCertified(cert.source);
            }
        }
        decided_by = Stage::PowerScan;
        let scan = p.scan(&sigma)?;
        let blowup = match scan {
            OrderScanResult::Finite(n) => break 'decide Outcome::FiniteOrder(n),
            OrderScanResult::ModulusBlowup { step, modulus_reached } => {
                Some(Blowup { step, modulus: modulus_reached })
            }
            OrderScanResult::Inconclusive { .. } => None,
        };
        p.method.push(Stage::OrbitTrace);
        let escape = find_escape(&sigma, cfg)?;
        if blowup.is_none() && escape.is_some() {
            decided_by = Stage::OrbitTrace;
        }
        if blowup.is_some() || escape.is_some() {
            Outcome::InfiniteHeuristic(HeuristicEvidence { blowup, escape })
        } else {
            Outcome::Inconclusive
        }
    };

    let observed = outcome.order_value();
    if class.horizontal {
        p.method.push(Stage::HorizontalSet);
        let cert = horizontal_order_set(t1, t2)?;
        if let Some(v) = observed {
            p.consistent &= cert.admits(v);
        }
    }
    if class.equal_modulus {
        if let Some(cert) = equal_modulus_allowed_set(t1, t2)? {
            p.method.push(Stage::EqualModulusSet);
            if let Some(v) = observed {
                p.consistent &= cert.admits(v);
            }
        }
    }
    if let Outcome::FiniteOrder(n) = outcome {
        p.method.push(Stage::PowerVerification);
        if !verify_order(&sigma, n)? {
            return Err(Error::Invariant(format!("order {n} of {t1}·{t2} failed power verification")));
        }
    }
    Ok(OrderVerdict { outcome, decided_by, method: p.method, consistent: p.consistent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ct(s: &str) -> ClassTransposition {
        s.parse().unwrap()
    }

    fn order(a: &str, b: &str) -> OrderVerdict {
        order_of_product(&ct(a), &ct(b), &OracleConfig::default()).unwrap()
    }

    #[test]
    fn pipeline_examples() {
        let v = order("[0(2),1(4)]", "[0(2),3(4)]");
        assert_eq!(v.outcome, Outcome::FiniteOrder(3));
        assert!(v.method.contains(&Stage::CommonVertex));
        assert!(v.consistent);
        assert_eq!(v.to_string(), "order: 3 (certified: common-vertex)");

        let v = order("[0(2),1(2)]", "[0(2),3(4)]");
        assert_eq!(v.outcome, Outcome::InfiniteCertified(CertificateSource::CommonVertex));

        let v = order("[0(4),1(4)]", "[2(4),3(4)]");
        assert_eq!(v.outcome, Outcome::FiniteOrder(2));
        assert!(v.method.contains(&Stage::HorizontalSet));
        assert!(v.consistent);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = order("[1(4),2(6)]", "[0(3),2(6)]");
        let b = order("[0(3),2(6)]", "[1(4),2(6)]");
        assert_eq!(a, b);
    }

    #[test]
    fn heuristic_path_for_uncertified_wild_pair() {
        // equal moduli, no shared class, hypothesis satisfied: order is infinite
        let v = order("[0(2),1(4)]", "[1(2),2(4)]");
        assert!(matches!(v.outcome, Outcome::InfiniteHeuristic(_)), "{v:?}");
        assert!(v.method.contains(&Stage::EqualModulusSet));
        assert!(v.consistent);
        assert!(!v.report().certified);
    }

    #[test]
    fn scan_certified_cross_checks() {
        let cfg = OracleConfig { scan_certified: true, ..OracleConfig::default() };
        let v = order_of_product(&ct("[0(2),1(2)]"), &ct("[0(2),3(4)]"), &cfg).unwrap();
        assert!(v.method.contains(&Stage::PowerScan));
        assert!(v.consistent);
    }

    #[test]
    fn orbit_traces() {
        let cfg = OracleConfig::default();
        let wild = RcwaMap::product(&ct("[0(2),1(2)]"), &ct("[0(2),3(4)]")).unwrap();
        assert!(matches!(orbit_trace(&wild, 3, &cfg).unwrap(), OrbitResult::Escaped { .. }));
        let three = RcwaMap::product(&ct("[0(2),1(4)]"), &ct("[0(2),3(4)]")).unwrap();
        assert_eq!(orbit_trace(&three, 0, &cfg).unwrap(), OrbitResult::Cycle(3));
        assert_eq!(orbit_trace(&RcwaMap::identity(), 5, &cfg).unwrap(), OrbitResult::Cycle(1));
    }

    #[test]
    fn orbit_orders() {
        let cfg = OracleConfig::default();
        let three = RcwaMap::product(&ct("[0(2),1(4)]"), &ct("[0(2),3(4)]")).unwrap();
        assert_eq!(finite_order_via_orbits(&three, &cfg).unwrap(), Some(3));
        let inv = RcwaMap::from_class_transposition(&ct("[1(3),5(6)]"));
        assert_eq!(finite_order_via_orbits(&inv, &cfg).unwrap(), Some(2));
        let wild = RcwaMap::product(&ct("[0(2),1(2)]"), &ct("[0(2),3(4)]")).unwrap();
        assert_eq!(finite_order_via_orbits(&wild, &cfg).unwrap(), None);
    }

    #[test]
    fn order_verification() {
        let three = RcwaMap::product(&ct("[0(2),1(4)]"), &ct("[0(2),3(4)]")).unwrap();
        assert!(verify_order(&three, 3).unwrap());
        assert!(!verify_order(&three, 6).unwrap());
        assert!(!verify_order(&three, 2).unwrap());
        assert!(verify_order(&RcwaMap::identity(), 1).unwrap());
    }

    #[test]
    fn report_shape() {
        let r = order("[0(2),1(2)]", "[0(2),3(4)]").report();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"order\":\"inf\""), "{json}");
        let back: VerdictReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let r = order("[0(2),1(4)]", "[0(2),3(4)]").report();
        assert_eq!(r.order, ReportedOrder::Finite(3));
        assert!(r.certified);
    }

    #[test]
    fn config_validation() {
        let cfg = OracleConfig { power_n_max: 0, ..OracleConfig::default() };
        assert!(order_of_product(&ct("[0(2),1(2)]"), &ct("[0(2),1(2)]"), &cfg).is_err());
    }
}
