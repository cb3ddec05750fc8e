//! Exhaustive surveys over all pairs of class transpositions with bounded
//! moduli.
//!
//! Pairs are unordered (the two products are conjugate) and include each
//! transposition paired with itself. Per-pair work runs on a rayon pool;
//! records come back in enumeration order, so the aggregate does not depend
//! on the worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{
    classify_pair, common_vertex_order, disjoint_support_order, equal_modulus_allowed_set,
    equal_residue_infinite, horizontal_order_set, CertificateVerdict, OrderCertificate, OrderValue,
    PairClass,
};
use crate::error::{Error, Result};
use crate::oracle::{order_of_product, OracleConfig, OrderVerdict, Outcome};
use crate::rcwa::{OrderScanResult, RcwaMap};
use crate::residue::{ClassTransposition, ResidueClass};
use crate::Int;

/// Orders observed by computer search for products of two class
/// transpositions; each divides 840.
pub const KOHL_ORDERS: [u64; 19] =
    [1, 2, 3, 4, 6, 8, 10, 12, 15, 20, 24, 30, 40, 42, 60, 84, 120, 168, 420];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub mod_max: Int,
    pub oracle: OracleConfig,
    pub pair_filter: Option<PairClass>,
    /// Worker count; 0 lets rayon decide.
    pub parallelism: usize,
}

impl SurveyConfig {
    pub fn new(mod_max: Int) -> Self {
        Self { mod_max, oracle: OracleConfig::default(), pair_filter: None, parallelism: 0 }
    }

    pub fn with_filter(mut self, mask: PairClass) -> Self {
        self.pair_filter = Some(mask);
        self
    }
}

/// All canonical class transpositions with moduli in `2..=mod_max`, sorted.
pub fn enumerate_class_transpositions(mod_max: Int) -> Result<Vec<ClassTransposition>> {
    if mod_max < 2 {
        return Err(Error::precondition(format!("mod_max must be at least 2, got {mod_max}")));
    }
    let mut out = Vec::new();
    for m1 in 2..=mod_max {
        for m2 in m1..=mod_max {
            for r1 in 0..m1 {
                for r2 in 0..m2 {
                    if (m1, r1) >= (m2, r2) {
                        continue;
                    }
                    let c1 = ResidueClass::new(r1, m1)?;
                    let c2 = ResidueClass::new(r2, m2)?;
                    if c1.is_disjoint(&c2) {
                        out.push(ClassTransposition::new(c1, c2)?);
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Unordered pairs `(i <= j)` of the enumeration passing `filter`.
pub fn enumerate_pairs(
    mod_max: Int,
    filter: Option<&PairClass>,
) -> Result<Vec<(ClassTransposition, ClassTransposition)>> {
    let cts = enumerate_class_transpositions(mod_max)?;
    let mut pairs = Vec::new();
    for (i, a) in cts.iter().enumerate() {
        for b in &cts[i..] {
            if filter.is_none_or(|mask| classify_pair(a, b).matches(mask)) {
                pairs.push((*a, *b));
            }
        }
    }
    Ok(pairs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub first: ClassTransposition,
    pub second: ClassTransposition,
    pub class: PairClass,
    pub verdict: std::result::Result<OrderVerdict, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderHistogram {
    pub finite_counts: BTreeMap<u64, u64>,
    pub infinite_certified: u64,
    pub infinite_heuristic: u64,
    pub inconclusive: u64,
    pub errors: u64,
    /// First pair (in enumeration order) realizing each finite order.
    pub realizations: BTreeMap<u64, (ClassTransposition, ClassTransposition)>,
    pub inconclusive_pairs: Vec<(ClassTransposition, ClassTransposition)>,
    pub error_pairs: Vec<(ClassTransposition, ClassTransposition, String)>,
    /// Pairs whose verdict failed a certificate cross-check.
    pub inconsistent_pairs: Vec<(ClassTransposition, ClassTransposition)>,
}

impl OrderHistogram {
    pub fn total(&self) -> u64 {
        self.finite_counts.values().sum::<u64>()
            + self.infinite_certified
            + self.infinite_heuristic
            + self.inconclusive
            + self.errors
    }

    pub fn record(&mut self, rec: &PairRecord) {
        let pair = (rec.first, rec.second);
        match &rec.verdict {
            Err(msg) => {
                self.errors += 1;
                self.error_pairs.push((rec.first, rec.second, msg.clone()));
            }
            Ok(v) => {
                if !v.consistent {
                    self.inconsistent_pairs.push(pair);
                }
                match v.outcome {
                    Outcome::FiniteOrder(n) => {
                        *self.finite_counts.entry(n).or_default() += 1;
                        self.realizations.entry(n).or_insert(pair);
                    }
                    Outcome::InfiniteCertified(_) => self.infinite_certified += 1,
                    Outcome::InfiniteHeuristic(_) => self.infinite_heuristic += 1,
                    Outcome::Inconclusive => {
                        self.inconclusive += 1;
                        self.inconclusive_pairs.push(pair);
                    }
                }
            }
        }
    }

    /// Merges `other`, which must cover pairs later in enumeration order.
    pub fn merge(mut self, other: OrderHistogram) -> OrderHistogram {
        for (k, v) in other.finite_counts {
            *self.finite_counts.entry(k).or_default() += v;
        }
        for (k, v) in other.realizations {
            self.realizations.entry(k).or_insert(v);
        }
        self.infinite_certified += other.infinite_certified;
        self.infinite_heuristic += other.infinite_heuristic;
        self.inconclusive += other.inconclusive;
        self.errors += other.errors;
        self.inconclusive_pairs.extend(other.inconclusive_pairs);
        self.error_pairs.extend(other.error_pairs);
        self.inconsistent_pairs.extend(other.inconsistent_pairs);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRun {
    pub config: SurveyConfig,
    pub records: Vec<PairRecord>,
    pub histogram: OrderHistogram,
    pub runtime_seconds: f64,
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Invariant(format!("cannot start worker pool: {e}")))
}

/// Runs the oracle over every pair and keeps the per-pair records.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyRun> {
    cfg.oracle.validate()?;
    let start = Instant::now();
    let pairs = enumerate_pairs(cfg.mod_max, cfg.pair_filter.as_ref())?;
    let records: Vec<PairRecord> = pool(cfg.parallelism)?.install(|| {
        pairs
            .par_iter()
            .map(|(a, b)| PairRecord {
                first: *a,
                second: *b,
                class: classify_pair(a, b),
                verdict: order_of_product(a, b, &cfg.oracle).map_err(|e| e.to_string()),
            })
            .collect()
    });
    let mut histogram = OrderHistogram::default();
    for rec in &records {
        histogram.record(rec);
    }
    Ok(SurveyRun {
        config: cfg.clone(),
        records,
        histogram,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn survey_orders(cfg: &SurveyConfig) -> Result<OrderHistogram> {
    Ok(run_survey(cfg)?.histogram)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KohlCheckReport {
    pub all_in_kohl_set: bool,
    pub all_divide_840: bool,
    pub violations: Vec<(ClassTransposition, ClassTransposition, u64)>,
}

pub fn check_kohl_set(h: &OrderHistogram) -> KohlCheckReport {
    let mut report = KohlCheckReport { all_in_kohl_set: true, all_divide_840: true, violations: Vec::new() };
    for &n in h.finite_counts.keys() {
        let in_set = KOHL_ORDERS.contains(&n);
        let divides = 840 % n == 0;
        report.all_in_kohl_set &= in_set;
        report.all_divide_840 &= divides;
        if !in_set || !divides {
            if let Some(&(a, b)) = h.realizations.get(&n) {
                report.violations.push((a, b, n));
            }
        }
    }
    report
}

/// A pair where a certificate and the independent power scan disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub first: ClassTransposition,
    pub second: ClassTransposition,
    pub certificate: OrderCertificate,
    pub scan: OrderScanResult,
}

/// Every certificate that applies to the pair.
pub fn all_certificates(t1: &ClassTransposition, t2: &ClassTransposition) -> Vec<OrderCertificate> {
    let class = classify_pair(t1, t2);
    let mut out = Vec::new();
    out.extend(disjoint_support_order(t1, t2));
    if class.common_vertex {
        out.extend(common_vertex_order(t1, t2).ok());
    }
    if class.equal_residue {
        out.extend(equal_residue_infinite(t1, t2).ok().flatten());
    }
    if class.equal_modulus {
        out.extend(equal_modulus_allowed_set(t1, t2).ok().flatten());
    }
    if class.horizontal {
        out.extend(horizontal_order_set(t1, t2).ok());
    }
    out
}

/// Cross-validates every applicable certificate against the power scan,
/// which does not consult any certificate.
pub fn theorem_consistency_sweep(cfg: &SurveyConfig) -> Result<Vec<Discrepancy>> {
    theorem_consistency_sweep_with(cfg, all_certificates)
}

/// As [`theorem_consistency_sweep`] with a caller-supplied certifier.
pub fn theorem_consistency_sweep_with<F>(cfg: &SurveyConfig, certify: F) -> Result<Vec<Discrepancy>>
where
    F: Fn(&ClassTransposition, &ClassTransposition) -> Vec<OrderCertificate> + Sync,
{
    cfg.oracle.validate()?;
    let pairs = enumerate_pairs(cfg.mod_max, cfg.pair_filter.as_ref())?;
    let found: Vec<Result<Vec<Discrepancy>>> = pool(cfg.parallelism)?.install(|| {
        pairs
            .par_iter()
            .map(|(a, b)| {
                let certs = certify(a, b);
                if certs.is_empty() {
                    return Ok(Vec::new());
                }
                let sigma = RcwaMap::product(a, b)?;
                let scan = sigma.power_order_scan(
                    cfg.oracle.power_n_max,
                    cfg.oracle.power_mod_max.max(sigma.modulus()),
                )?;
                Ok(certs
                    .into_iter()
                    .filter(|c| !scan_compatible(c, &scan))
                    .map(|certificate| Discrepancy { first: *a, second: *b, certificate, scan })
                    .collect())
            })
            .collect()
    });
    let mut out = Vec::new();
    for f in found {
        out.extend(f?);
    }
    Ok(out)
}

fn scan_compatible(cert: &OrderCertificate, scan: &OrderScanResult) -> bool {
    match (scan, &cert.verdict) {
        (OrderScanResult::Finite(n), _) => cert.admits(OrderValue::Finite(*n)),
        // the scan cannot refute an infinite claim
        (_, CertificateVerdict::Infinite) => true,
        (_, CertificateVerdict::Finite(_)) => false,
        (_, CertificateVerdict::AllowedSet(set)) => set.contains(&OrderValue::Infinite),
    }
}

/// One CSV row per surveyed pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub m1: Int,
    pub r1: Int,
    pub m2: Int,
    pub r2: Int,
    pub m3: Int,
    pub r3: Int,
    pub m4: Int,
    pub r4: Int,
    pub horizontal: bool,
    pub common_vertex: bool,
    pub equal_residue: bool,
    pub equal_modulus: bool,
    pub order: String,
    pub certified: bool,
    pub method: String,
}

impl From<&PairRecord> for CsvRow {
    fn from(rec: &PairRecord) -> Self {
        let [c1, c2] = rec.first.classes();
        let [c3, c4] = rec.second.classes();
        let (order, certified, method) = match &rec.verdict {
            Ok(v) => {
                let r = v.report();
                (r.order.to_string(), r.certified, r.method.join(";"))
            }
            Err(e) => ("error".to_string(), false, e.clone()),
        };
        CsvRow {
            m1: c1.modulus(),
            r1: c1.residue(),
            m2: c2.modulus(),
            r2: c2.residue(),
            m3: c3.modulus(),
            r3: c3.residue(),
            m4: c4.modulus(),
            r4: c4.residue(),
            horizontal: rec.class.horizontal,
            common_vertex: rec.class.common_vertex,
            equal_residue: rec.class.equal_residue,
            equal_modulus: rec.class.equal_modulus,
            order,
            certified,
            method,
        }
    }
}

pub fn write_csv<W: Write>(records: &[PairRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in records {
        w.serialize(CsvRow::from(rec))
            .map_err(|e| Error::Invariant(format!("csv write failed: {e}")))?;
    }
    w.flush().map_err(|e| Error::Invariant(format!("csv write failed: {e}")))?;
    Ok(())
}

/// JSON summary `{config, histogram, kohl_check, discrepancies, runtime_seconds}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub config: SurveyConfig,
    pub histogram: OrderHistogram,
    pub kohl_check: KohlCheckReport,
    pub discrepancies: Vec<Discrepancy>,
    pub runtime_seconds: f64,
}

impl SurveySummary {
    pub fn new(run: &SurveyRun, discrepancies: Vec<Discrepancy>) -> Self {
        Self {
            config: run.config.clone(),
            histogram: run.histogram.clone(),
            kohl_check: check_kohl_set(&run.histogram),
            discrepancies,
            runtime_seconds: run.runtime_seconds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ct(s: &str) -> ClassTransposition {
        s.parse().unwrap()
    }

    /// Independent enumerator: brute-force disjointness over one period.
    fn brute_force_enumeration(mod_max: Int) -> Vec<(Int, Int, Int, Int)> {
        let mut out = Vec::new();
        for m1 in 2..=mod_max {
            for r1 in 0..m1 {
                for m2 in 2..=mod_max {
                    for r2 in 0..m2 {
                        let period = m1 * m2;
                        let meet = (0..period).any(|x| x % m1 == r1 && x % m2 == r2);
                        if !meet && (m1, r1) < (m2, r2) {
                            out.push((m1, r1, m2, r2));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(enumerate_class_transpositions(2).unwrap(), vec![ct("[0(2),1(2)]")]);
        let three = enumerate_class_transpositions(3).unwrap();
        for s in ["[0(3),1(3)]", "[0(3),2(3)]", "[1(3),2(3)]", "[0(2),1(2)]"] {
            assert!(three.contains(&ct(s)));
        }
        assert!(three.iter().all(|t| !(t.first().modulus() == 2 && t.second().modulus() == 3)));
        assert_eq!(three.len(), 4);
        assert!(enumerate_class_transpositions(1).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for mod_max in 2..=5 {
            let ours: Vec<(Int, Int, Int, Int)> = enumerate_class_transpositions(mod_max)
                .unwrap()
                .iter()
                .map(|t| (t.first().modulus(), t.first().residue(), t.second().modulus(), t.second().residue()))
                .collect();
            assert_eq!(ours, brute_force_enumeration(mod_max), "mod_max={mod_max}");
        }
        assert_eq!(brute_force_enumeration(4).len(), 14);
    }

    #[test]
    fn smallest_survey() {
        let h = survey_orders(&SurveyConfig::new(2)).unwrap();
        assert_eq!(h.finite_counts, BTreeMap::from([(1, 1)]));
        assert_eq!(h.total(), 1);
    }

    #[test]
    fn common_vertex_survey_orders() {
        let mask = PairClass { common_vertex: true, ..PairClass::default() };
        let h = survey_orders(&SurveyConfig::new(4).with_filter(mask)).unwrap();
        assert!(h.finite_counts.keys().all(|n| *n == 1 || *n == 3), "{:?}", h.finite_counts);
        assert_eq!(h.inconclusive, 0);
    }

    #[test]
    fn horizontal_survey_orders() {
        let mask = PairClass { horizontal: true, ..PairClass::default() };
        let h = survey_orders(&SurveyConfig::new(6).with_filter(mask)).unwrap();
        assert!(h.finite_counts.keys().all(|n| [1, 2, 3, 4, 6, 12].contains(n)), "{:?}", h.finite_counts);
        assert!(h.inconsistent_pairs.is_empty());
    }

    #[test]
    fn kohl_check_flags() {
        let empty = check_kohl_set(&OrderHistogram::default());
        assert!(empty.all_in_kohl_set && empty.all_divide_840 && empty.violations.is_empty());
        let mut h = OrderHistogram::default();
        h.finite_counts.insert(5, 1);
        h.realizations.insert(5, (ct("[0(2),1(2)]"), ct("[0(3),1(3)]")));
        let r = check_kohl_set(&h);
        assert!(!r.all_in_kohl_set && r.all_divide_840);
        assert_eq!(r.violations.len(), 1);
        h.finite_counts.insert(16, 1);
        h.realizations.insert(16, (ct("[0(2),1(2)]"), ct("[0(4),1(4)]")));
        let r = check_kohl_set(&h);
        assert!(!r.all_divide_840);
        assert_eq!(r.violations.len(), 2);
        assert!(KOHL_ORDERS.iter().all(|n| 840 % n == 0));
    }

    #[test]
    fn histogram_conservation_and_worker_independence() {
        let one = run_survey(&SurveyConfig { parallelism: 1, ..SurveyConfig::new(4) }).unwrap();
        let two = run_survey(&SurveyConfig { parallelism: 2, ..SurveyConfig::new(4) }).unwrap();
        assert_eq!(one.histogram.total(), one.records.len() as u64);
        assert_eq!(one.records.len(), 105);
        assert_eq!(one.histogram, two.histogram);
        assert_eq!(one.records, two.records);
    }

    #[test]
    fn merge_is_consistent_with_sequential_recording() {
        let run = run_survey(&SurveyConfig::new(4)).unwrap();
        let (left, right) = run.records.split_at(40);
        let mut a = OrderHistogram::default();
        left.iter().for_each(|r| a.record(r));
        let mut b = OrderHistogram::default();
        right.iter().for_each(|r| b.record(r));
        assert_eq!(a.merge(b), run.histogram);
    }

    #[test]
    fn sweep_small_is_clean() {
        assert!(theorem_consistency_sweep(&SurveyConfig::new(6)).unwrap().is_empty());
    }

    #[test]
    fn sweep_catches_corrupted_certificate() {
        let lying = |a: &ClassTransposition, b: &ClassTransposition| {
            all_certificates(a, b)
                .into_iter()
                .map(|mut c| {
                    if c.verdict == CertificateVerdict::Finite(3) {
                        c.verdict = CertificateVerdict::Finite(5);
                    }
                    c
                })
                .collect()
        };
        let found = theorem_consistency_sweep_with(&SurveyConfig::new(4), lying).unwrap();
        assert!(!found.is_empty());
    }

    #[test]
    fn csv_columns() {
        let run = run_survey(&SurveyConfig::new(2)).unwrap();
        let mut buf = Vec::new();
        write_csv(&run.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "m1,r1,m2,r2,m3,r3,m4,r4,horizontal,common_vertex,equal_residue,equal_modulus,order,certified,method"
        );
        assert_eq!(lines.next().unwrap(), "2,0,2,1,2,0,2,1,true,true,true,true,1,true,equality;horizontal-set;equal-modulus-set;power-verification");
    }
}
