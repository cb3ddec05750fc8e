//! Exact order determinations for structured pairs of class transpositions,
//! together with the constructive Diophantine witnesses behind the infinite
//! cases.
//!
//! Pairs are described by four independent predicates (see [`PairClass`]).
//! Certificates come in two strengths: exact (`Finite(n)`, `Infinite`) and
//! constraining (`AllowedSet`), the latter only restricting what the order
//! can be.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::rcwa::RcwaMap;
use crate::residue::{ClassTransposition, ResidueClass};
use crate::Int;

/// Which structural predicates hold for a pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairClass {
    /// Both transpositions are horizontal.
    pub horizontal: bool,
    /// They share a class.
    pub common_vertex: bool,
    /// Residue multisets agree.
    pub equal_residue: bool,
    /// Modulus multisets agree.
    pub equal_modulus: bool,
}

impl PairClass {
    /// True when every flag set in `mask` is also set in `self`.
    pub fn matches(&self, mask: &PairClass) -> bool {
        (!mask.horizontal || self.horizontal)
            && (!mask.common_vertex || self.common_vertex)
            && (!mask.equal_residue || self.equal_residue)
            && (!mask.equal_modulus || self.equal_modulus)
    }

    /// Parses a comma-separated flag list such as `horizontal,common_vertex`.
    /// Short forms `g`, `v`, `r`, `m` are accepted too.
    pub fn parse_mask(s: &str) -> Result<Self> {
        let mut mask = PairClass::default();
        for flag in s.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match flag {
                "horizontal" | "g" => mask.horizontal = true,
                "common_vertex" | "common-vertex" | "v" => mask.common_vertex = true,
                "equal_residue" | "equal-residue" | "r" => mask.equal_residue = true,
                "equal_modulus" | "equal-modulus" | "m" => mask.equal_modulus = true,
                _ => return Err(Error::Parse { what: "pair filter", input: s.to_string() }),
            }
        }
        Ok(mask)
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [
            (self.horizontal, "horizontal"),
            (self.common_vertex, "common_vertex"),
            (self.equal_residue, "equal_residue"),
            (self.equal_modulus, "equal_modulus"),
        ];
        let set: Vec<&str> = names.iter().filter(|(on, _)| *on).map(|(_, n)| *n).collect();
        if set.is_empty() {
            write!(f, "none")
        } else {
            write!(f, "{}", set.join(","))
        }
    }
}

pub fn classify_pair(t1: &ClassTransposition, t2: &ClassTransposition) -> PairClass {
    let sorted = |a: Int, b: Int| if a <= b { (a, b) } else { (b, a) };
    let [p, q] = t1.classes();
    let [u, v] = t2.classes();
    PairClass {
        horizontal: t1.is_horizontal() && t2.is_horizontal(),
        common_vertex: [p, q].iter().any(|c| *c == u || *c == v),
        equal_residue: sorted(p.residue(), q.residue()) == sorted(u.residue(), v.residue()),
        equal_modulus: sorted(p.modulus(), q.modulus()) == sorted(u.modulus(), v.modulus()),
    }
}

/// The rule a certificate rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateSource {
    /// `τ·τ = 1`.
    Equality,
    /// Commuting involutions with disjoint supports.
    DisjointSupports,
    /// Shared class: order 1, 3 or ∞ decided by the other two classes.
    CommonVertex,
    /// Equal residues with unequal modulus ratios: infinite order.
    EqualResidueRatio,
    /// Equal moduli with ordered residues: order in {1,2,3,6,∞}.
    EqualModulus,
    /// Both horizontal: order in {1,2,3,4,6,12}.
    Horizontal,
}

impl CertificateSource {
    pub fn tag(self) -> &'static str {
        match self {
            CertificateSource::Equality => "equality",
            CertificateSource::DisjointSupports => "disjoint-supports",
            CertificateSource::CommonVertex => "common-vertex",
            CertificateSource::EqualResidueRatio => "equal-residue-ratio",
            CertificateSource::EqualModulus => "equal-modulus",
            CertificateSource::Horizontal => "horizontal",
        }
    }
}

impl fmt::Display for CertificateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A possible order: a positive integer or ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrderValue {
    Finite(u64),
    Infinite,
}

impl fmt::Display for OrderValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderValue::Finite(n) => write!(f, "{n}"),
            OrderValue::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateVerdict {
    Finite(u64),
    Infinite,
    AllowedSet(BTreeSet<OrderValue>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCertificate {
    pub verdict: CertificateVerdict,
    pub source: CertificateSource,
}

impl OrderCertificate {
    fn finite(n: u64, source: CertificateSource) -> Self {
        Self { verdict: CertificateVerdict::Finite(n), source }
    }

    fn infinite(source: CertificateSource) -> Self {
        Self { verdict: CertificateVerdict::Infinite, source }
    }

    fn allowed(values: &[OrderValue], source: CertificateSource) -> Self {
        Self { verdict: CertificateVerdict::AllowedSet(values.iter().copied().collect()), source }
    }

    /// Whether an observed order is compatible with this certificate.
    pub fn admits(&self, order: OrderValue) -> bool {
        match &self.verdict {
            CertificateVerdict::Finite(n) => order == OrderValue::Finite(*n),
            CertificateVerdict::Infinite => order == OrderValue::Infinite,
            CertificateVerdict::AllowedSet(set) => set.contains(&order),
        }
    }

    /// Serialized form `{verdict, source_theorem, witness_available}`.
    pub fn report(&self) -> CertificateReport {
        let verdict = match &self.verdict {
            CertificateVerdict::Finite(n) => n.to_string(),
            CertificateVerdict::Infinite => "inf".to_string(),
            CertificateVerdict::AllowedSet(set) => {
                let items: Vec<String> = set.iter().map(ToString::to_string).collect();
                format!("{{{}}}", items.join(","))
            }
        };
        CertificateReport {
            verdict,
            source_theorem: self.source.tag().to_string(),
            witness_available: matches!(
                self.source,
                CertificateSource::CommonVertex | CertificateSource::EqualResidueRatio
            ) && self.verdict == CertificateVerdict::Infinite,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub verdict: String,
    pub source_theorem: String,
    pub witness_available: bool,
}

const HORIZONTAL_ORDERS: [OrderValue; 6] = [
    OrderValue::Finite(1),
    OrderValue::Finite(2),
    OrderValue::Finite(3),
    OrderValue::Finite(4),
    OrderValue::Finite(6),
    OrderValue::Finite(12),
];

const EQUAL_MODULUS_ORDERS: [OrderValue; 5] = [
    OrderValue::Finite(1),
    OrderValue::Finite(2),
    OrderValue::Finite(3),
    OrderValue::Finite(6),
    OrderValue::Infinite,
];

/// For a pair sharing a class, returns `(shared, other1, other2)` where
/// `other1` is the remaining class of `t1` and `other2` that of `t2`.
pub fn shared_vertex(
    t1: &ClassTransposition,
    t2: &ClassTransposition,
) -> Option<(ResidueClass, ResidueClass, ResidueClass)> {
    for c in t1.classes() {
        if let Some(other2) = t2.partner_of(&c) {
            let other1 = t1.partner_of(&c).expect("c is a class of t1");
            return Some((c, other1, other2));
        }
    }
    None
}

/// Order of a product of two transpositions sharing a class: 1 when the other
/// classes coincide, 3 when they are disjoint, ∞ when they meet but differ.
pub fn common_vertex_order(t1: &ClassTransposition, t2: &ClassTransposition) -> Result<OrderCertificate> {
    let (_, p, q) = shared_vertex(t1, t2)
        .ok_or_else(|| Error::precondition(format!("{t1} and {t2} have no common vertex")))?;
    let source = CertificateSource::CommonVertex;
    Ok(if p == q {
        OrderCertificate::finite(1, source)
    } else if p.is_disjoint(&q) {
        OrderCertificate::finite(3, source)
    } else {
        OrderCertificate::infinite(source)
    })
}

/// Which family of Diophantine chains a witness solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSystem {
    /// `m2·x_i − m4·x_{i+1} = rhs` for `i = 1..=n`; all entries distinct.
    CommonVertex { m2: Int, m4: Int, rhs: Int },
    /// `m1·x_{2i−1} = m3·x_{2i}` and `m4·x_{2i} = m2·x_{2i+1}` for
    /// `i = 1..=n`; entries of equal parity distinct.
    EqualResidue { m1: Int, m2: Int, m3: Int, m4: Int },
}

/// A solution of one of the chain systems. Such a solution exhibits a
/// component of Γ longer than the chain, for every chain length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteWitness {
    pub system: WitnessSystem,
    pub n: usize,
    pub chain: Vec<Int>,
}

impl InfiniteWitness {
    /// Re-substitutes the chain into its system and checks distinctness.
    pub fn verify(&self) -> Result<()> {
        let x = &self.chain;
        let fail = |what: String| Err(Error::Invariant(format!("witness check failed: {what}")));
        match self.system {
            WitnessSystem::CommonVertex { m2, m4, rhs } => {
                if x.len() != self.n + 1 {
                    return fail(format!("expected {} entries, got {}", self.n + 1, x.len()));
                }
                for i in 0..self.n {
                    let lhs = arith::sub(
                        arith::mul(m2, x[i], "witness")?,
                        arith::mul(m4, x[i + 1], "witness")?,
                        "witness",
                    )?;
                    if lhs != rhs {
                        return fail(format!("equation {} gives {lhs} instead of {rhs}", i + 1));
                    }
                }
                if !all_distinct(x.iter()) {
                    return fail("entries are not pairwise distinct".into());
                }
            }
            WitnessSystem::EqualResidue { m1, m2, m3, m4 } => {
                if x.len() != 2 * self.n + 1 {
                    return fail(format!("expected {} entries, got {}", 2 * self.n + 1, x.len()));
                }
                for i in 0..2 * self.n {
                    let (l, r) = if i % 2 == 0 {
                        (arith::mul(m1, x[i], "witness")?, arith::mul(m3, x[i + 1], "witness")?)
                    } else {
                        (arith::mul(m4, x[i], "witness")?, arith::mul(m2, x[i + 1], "witness")?)
                    };
                    if l != r {
                        return fail(format!("equation {} is unbalanced: {l} vs {r}", i + 1));
                    }
                }
                if !all_distinct(x.iter().step_by(2)) || !all_distinct(x.iter().skip(1).step_by(2)) {
                    return fail("entries of equal parity repeat".into());
                }
            }
        }
        Ok(())
    }
}

fn all_distinct<'a>(xs: impl Iterator<Item = &'a Int>) -> bool {
    let mut seen = BTreeSet::new();
    xs.into_iter().all(|x| seen.insert(*x))
}

/// Solves `m2·x_i − m4·x_{i+1} = r4 − r2` for `i = 1..=n` with pairwise
/// distinct entries, where `r2(m2)` and `r4(m4)` are the unshared classes.
///
/// The chain is grown one unknown at a time. After `j` steps every entry is
/// `α_i + β_i·t` in a free parameter `t`; substituting the last entry into the
/// next equation keeps the system solvable because `gcd(m2^j, m4) = 1`.
/// Finally a `t` is chosen at which all entries differ.
pub fn common_vertex_chain_witness(
    t1: &ClassTransposition,
    t2: &ClassTransposition,
    n: usize,
) -> Result<InfiniteWitness> {
    if n < 1 {
        return Err(Error::precondition("chain length must be at least 1"));
    }
    let (_, p, q) = shared_vertex(t1, t2)
        .ok_or_else(|| Error::precondition(format!("{t1} and {t2} have no common vertex")))?;
    if p == q {
        return Err(Error::precondition("the unshared classes coincide"));
    }
    if p.is_disjoint(&q) {
        return Err(Error::precondition(format!("the unshared classes {p} and {q} do not intersect")));
    }
    let (m2, m4) = (p.modulus(), q.modulus());
    if arith::gcd(m2, m4) != 1 {
        return Err(Error::precondition(format!(
            "chain witnesses need coprime moduli, got gcd({m2}, {m4}) > 1"
        )));
    }
    let rhs = q.residue() - p.residue();

    let (x1, x2) = arith::solve_linear(m2, m4, rhs)?
        .ok_or_else(|| Error::Invariant("first chain equation unsolvable".into()))?;
    let mut alpha = vec![x1, x2];
    let mut beta = vec![m4, m2];
    for _ in 1..n {
        let last = alpha.len() - 1;
        // m2*(α + β t) − m4*x = rhs  ⇔  (m2 β) t − m4 x = rhs − m2 α
        let coeff = arith::mul(m2, beta[last], "chain witness")?;
        let target = arith::sub(rhs, arith::mul(m2, alpha[last], "chain witness")?, "chain witness")?;
        let (t0, x_new) = arith::solve_linear(coeff, m4, target)?
            .ok_or_else(|| Error::Invariant("chain step unsolvable despite coprime moduli".into()))?;
        // t = t0 + m4 s
        for i in 0..alpha.len() {
            alpha[i] = arith::add(alpha[i], arith::mul(beta[i], t0, "chain witness")?, "chain witness")?;
            beta[i] = arith::mul(beta[i], m4, "chain witness")?;
        }
        alpha.push(x_new);
        beta.push(coeff);
    }
    // Each coincidence x_i = x_j happens for at most one parameter value.
    let pairs = alpha.len() * (alpha.len() - 1) / 2;
    for step in 0..=(2 * pairs as Int + 1) {
        let s = if step % 2 == 0 { step / 2 } else { -(step / 2) - 1 };
        let chain = alpha
            .iter()
            .zip(&beta)
            .map(|(&a, &b)| arith::add(a, arith::mul(b, s, "chain witness")?, "chain witness"))
            .collect::<Result<Vec<_>>>()?;
        if all_distinct(chain.iter()) {
            let witness = InfiniteWitness { system: WitnessSystem::CommonVertex { m2, m4, rhs }, n, chain };
            witness.verify()?;
            return Ok(witness);
        }
    }
    Err(Error::Invariant("no distinct chain found within the parameter search".into()))
}

/// Orients an equal-residue pair as `(l(m1), r(m2))`, `(l(m3), r(m4))`.
fn equal_residue_alignment(
    t1: &ClassTransposition,
    t2: &ClassTransposition,
) -> Result<(Int, Int, Int, Int)> {
    if !classify_pair(t1, t2).equal_residue {
        return Err(Error::precondition(format!("{t1} and {t2} are not equal-residue")));
    }
    let [p, q] = t1.classes();
    let [u, v] = t2.classes();
    let (u, v) = if u.residue() == p.residue() { (u, v) } else { (v, u) };
    debug_assert_eq!(v.residue(), q.residue());
    Ok((p.modulus(), q.modulus(), u.modulus(), v.modulus()))
}

/// Infinite order for equal-residue pairs whose modulus ratios differ,
/// `m1·m4 ≠ m2·m3`; `None` when the ratios agree (that case is open).
pub fn equal_residue_infinite(
    t1: &ClassTransposition,
    t2: &ClassTransposition,
) -> Result<Option<OrderCertificate>> {
    let (m1, m2, m3, m4) = equal_residue_alignment(t1, t2)?;
    Ok((m1 * m4 != m2 * m3).then(|| OrderCertificate::infinite(CertificateSource::EqualResidueRatio)))
}

/// The geometric solution of the alternating system: `x_1 = (m2·m3)^n·h`,
/// each later entry the previous one scaled by `m1/m3` or `m4/m2`.
pub fn equal_residue_chain_witness(
    t1: &ClassTransposition,
    t2: &ClassTransposition,
    n: usize,
    h: Int,
) -> Result<InfiniteWitness> {
    let (m1, m2, m3, m4) = equal_residue_alignment(t1, t2)?;
    if m1 * m4 == m2 * m3 {
        return Err(Error::precondition("modulus ratios agree, no chain witness exists"));
    }
    if n < 1 {
        return Err(Error::precondition("chain length must be at least 1"));
    }
    if h == 0 {
        return Err(Error::precondition("h = 0 gives the degenerate all-zero chain"));
    }
    let exp = u32::try_from(n).map_err(|_| Error::Overflow("chain witness"))?;
    let mut x = arith::mul(arith::pow(arith::mul(m2, m3, "chain witness")?, exp, "chain witness")?, h, "chain witness")?;
    let mut chain = vec![x];
    for i in 0..2 * n {
        let (num, den) = if i % 2 == 0 { (m1, m3) } else { (m4, m2) };
        let scaled = arith::mul(x, num, "chain witness")?;
        if scaled % den != 0 {
            return Err(Error::Invariant("geometric chain left the integers".into()));
        }
        x = scaled / den;
        chain.push(x);
    }
    let witness = InfiniteWitness { system: WitnessSystem::EqualResidue { m1, m2, m3, m4 }, n, chain };
    witness.verify()?;
    Ok(witness)
}

/// `{1,2,3,6,∞}` for equal-modulus pairs that can be oriented as
/// `(r1(m), r2(n))`, `(r3(m), r4(n))` with `r1 ≤ r4` and `r3 ≤ r2`.
pub fn equal_modulus_allowed_set(
    t1: &ClassTransposition,
    t2: &ClassTransposition,
) -> Result<Option<OrderCertificate>> {
    if !classify_pair(t1, t2).equal_modulus {
        return Err(Error::precondition(format!("{t1} and {t2} are not equal-modulus")));
    }
    let orient = |t: &ClassTransposition| {
        let [a, b] = t.classes();
        [(a, b), (b, a)]
    };
    let fires = orient(t1).iter().any(|&(c1, c2)| {
        orient(t2).iter().any(|&(c3, c4)| {
            c1.modulus() == c3.modulus()
                && c2.modulus() == c4.modulus()
                && c1.residue() <= c4.residue()
                && c3.residue() <= c2.residue()
        })
    });
    Ok(fires.then(|| OrderCertificate::allowed(&EQUAL_MODULUS_ORDERS, CertificateSource::EqualModulus)))
}

pub fn horizontal_order_set(t1: &ClassTransposition, t2: &ClassTransposition) -> Result<OrderCertificate> {
    if !(t1.is_horizontal() && t2.is_horizontal()) {
        return Err(Error::precondition(format!("{t1} and {t2} are not both horizontal")));
    }
    Ok(OrderCertificate::allowed(&HORIZONTAL_ORDERS, CertificateSource::Horizontal))
}

/// Order 1 for equal transpositions, 2 for distinct ones with disjoint
/// supports.
pub fn disjoint_support_order(t1: &ClassTransposition, t2: &ClassTransposition) -> Option<OrderCertificate> {
    if t1 == t2 {
        Some(OrderCertificate::finite(1, CertificateSource::Equality))
    } else if t1.support_disjoint(t2) {
        Some(OrderCertificate::finite(2, CertificateSource::DisjointSupports))
    } else {
        None
    }
}

/// Forward ray of the unbounded cycle of `[0(2),1(2)]·[0(2),k(m)]` through 2,
/// from the closed form with `h = m/2`:
///
/// * `k = 3`: `2, 0, 1`, then `3 + 2h·(h^{t−1} − 1)/(h − 1)`;
/// * otherwise: `2, 3`, then `k + (k − 1)·h·(h^{t−1} − 1)/(h − 1) + 2h^t`;
///
/// for `t = 1..=t_max`.
pub fn unbounded_cycle_prefix(k: Int, m: Int, t_max: u32) -> Result<Vec<Int>> {
    if k < 1 || k % 2 == 0 {
        return Err(Error::precondition(format!("k must be a positive odd integer, got {k}")));
    }
    if m < 4 || m % 2 != 0 {
        return Err(Error::precondition(format!("m must be even and at least 4, got {m}")));
    }
    if k >= m {
        return Err(Error::precondition(format!("k = {k} must be below m = {m}")));
    }
    let h = m / 2;
    let geometric = |t: u32| -> Result<Int> {
        // (h^{t-1} - 1)/(h - 1) = 1 + h + … + h^{t-2}
        Ok((arith::pow(h, t - 1, "cycle prefix")? - 1) / (h - 1))
    };
    let mut out = if k == 3 { vec![2, 0, 1] } else { vec![2, 3] };
    for t in 1..=t_max {
        let g = arith::mul(geometric(t)?, h, "cycle prefix")?;
        let term = if k == 3 {
            arith::add(3, arith::mul(2, g, "cycle prefix")?, "cycle prefix")?
        } else {
            let middle = arith::mul(k - 1, g, "cycle prefix")?;
            let tail = arith::mul(2, arith::pow(h, t, "cycle prefix")?, "cycle prefix")?;
            arith::add(arith::add(k, middle, "cycle prefix")?, tail, "cycle prefix")?
        };
        out.push(term);
    }
    Ok(out)
}

/// The same ray obtained by iterating the product from 2.
pub fn iterated_cycle_prefix(k: Int, m: Int, len: usize) -> Result<Vec<Int>> {
    let first = ClassTransposition::from_parts(0, 2, 1, 2)?;
    let second = ClassTransposition::from_parts(0, 2, k, m)?;
    let sigma = RcwaMap::product(&first, &second)?;
    let mut out = vec![2];
    while out.len() < len {
        out.push(sigma.evaluate(*out.last().unwrap())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ct(s: &str) -> ClassTransposition {
        s.parse().unwrap()
    }

    #[test]
    fn pair_classification_examples() {
        let c = classify_pair(&ct("[0(2),1(2)]"), &ct("[0(2),1(4)]"));
        assert!(c.common_vertex && c.equal_residue && !c.horizontal && !c.equal_modulus);
        let c = classify_pair(&ct("[0(2),1(2)]"), &ct("[0(3),1(3)]"));
        assert!(c.horizontal && c.equal_residue && !c.common_vertex && !c.equal_modulus);
        let c = classify_pair(&ct("[1(4),2(6)]"), &ct("[1(6),2(4)]"));
        assert!(c.equal_residue && c.equal_modulus && !c.common_vertex && !c.horizontal);
    }

    #[test]
    fn mask_parsing() {
        let m = PairClass::parse_mask("horizontal, v").unwrap();
        assert!(m.horizontal && m.common_vertex && !m.equal_residue);
        assert!(PairClass::parse_mask("bogus").is_err());
        assert_eq!(PairClass::parse_mask("").unwrap(), PairClass::default());
    }

    #[test]
    fn common_vertex_branches() {
        let cert = common_vertex_order(&ct("[0(2),1(4)]"), &ct("[0(2),3(4)]")).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::Finite(3));
        let cert = common_vertex_order(&ct("[0(2),1(4)]"), &ct("[0(2),1(8)]")).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::Infinite);
        let cert = common_vertex_order(&ct("[0(2),1(4)]"), &ct("[0(2),1(4)]")).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::Finite(1));
        assert!(common_vertex_order(&ct("[0(4),1(4)]"), &ct("[2(4),3(4)]")).is_err());
    }

    #[test]
    fn common_vertex_matches_any_position() {
        // shared class sits first in one and second in the other
        let cert = common_vertex_order(&ct("[1(2),2(4)]"), &ct("[0(4),1(2)]")).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::Finite(3));
    }

    #[test]
    fn common_vertex_chain() {
        let t1 = ct("[0(6),1(2)]");
        let t2 = ct("[0(6),1(3)]");
        let w = common_vertex_chain_witness(&t1, &t2, 3).unwrap();
        assert_eq!(w.chain.len(), 4);
        w.verify().unwrap();
        // substitution by hand: 2·x_i − 3·x_{i+1} = 0
        for pair in w.chain.windows(2) {
            assert_eq!(2 * pair[0] - 3 * pair[1], 0);
        }
        let w1 = common_vertex_chain_witness(&t1, &t2, 1).unwrap();
        assert_eq!(w1.chain.len(), 2);
        for n in 1..=8 {
            common_vertex_chain_witness(&t1, &t2, n).unwrap().verify().unwrap();
        }
    }

    #[test]
    fn common_vertex_chain_preconditions() {
        // gcd(4, 8) > 1
        assert!(common_vertex_chain_witness(&ct("[0(2),1(4)]"), &ct("[0(2),1(8)]"), 2).is_err());
        // disjoint unshared classes
        assert!(common_vertex_chain_witness(&ct("[0(2),1(4)]"), &ct("[0(2),3(4)]"), 2).is_err());
        // no common vertex
        assert!(common_vertex_chain_witness(&ct("[0(4),1(4)]"), &ct("[2(4),3(4)]"), 2).is_err());
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let mut w = common_vertex_chain_witness(&ct("[0(6),1(2)]"), &ct("[0(6),1(3)]"), 3).unwrap();
        w.chain[2] += 1;
        assert!(w.verify().is_err());
    }

    #[test]
    fn equal_residue_certificate() {
        let cert = equal_residue_infinite(&ct("[0(2),1(2)]"), &ct("[0(4),1(2)]")).unwrap();
        assert_eq!(cert.unwrap().verdict, CertificateVerdict::Infinite);
        assert!(equal_residue_infinite(&ct("[0(2),1(2)]"), &ct("[0(2),1(2)]")).unwrap().is_none());
        let cert = equal_residue_infinite(&ct("[1(4),2(6)]"), &ct("[1(6),2(4)]")).unwrap();
        assert!(cert.is_some());
        assert!(equal_residue_infinite(&ct("[0(2),1(2)]"), &ct("[0(3),2(3)]")).is_err());
    }

    #[test]
    fn equal_residue_chain() {
        let t1 = ct("[0(2),1(2)]");
        let t2 = ct("[0(4),1(2)]");
        let w = equal_residue_chain_witness(&t1, &t2, 2, 1).unwrap();
        // l = 0: m1 = 2, m2 = 2, m3 = 4, m4 = 2; x1 = (2·4)^2 = 64
        assert_eq!(w.chain, vec![64, 32, 32, 16, 16]);
        for i in 0..4 {
            let (l, r) = if i % 2 == 0 { (2, 4) } else { (2, 2) };
            assert_eq!(l * w.chain[i], r * w.chain[i + 1]);
        }
        for n in 1..=5 {
            equal_residue_chain_witness(&t1, &t2, n, 3).unwrap().verify().unwrap();
        }
        assert!(equal_residue_chain_witness(&t1, &t2, 2, 0).is_err());
        assert!(equal_residue_chain_witness(&t1, &t1, 2, 1).is_err());
    }

    #[test]
    fn equal_modulus_hypothesis() {
        let cert = equal_modulus_allowed_set(&ct("[0(2),1(4)]"), &ct("[1(2),2(4)]")).unwrap().unwrap();
        assert!(cert.admits(OrderValue::Infinite));
        assert!(cert.admits(OrderValue::Finite(6)));
        assert!(!cert.admits(OrderValue::Finite(4)));
        // (2,0) against (1,3): 1 > 0 in one alignment, 3 > 2 in the other
        assert!(equal_modulus_allowed_set(&ct("[2(3),0(6)]"), &ct("[1(3),3(6)]")).unwrap().is_none());
        assert!(equal_modulus_allowed_set(&ct("[0(2),1(4)]"), &ct("[0(3),1(3)]")).is_err());
    }

    #[test]
    fn horizontal_and_disjoint() {
        let cert = horizontal_order_set(&ct("[0(2),1(2)]"), &ct("[0(3),1(3)]")).unwrap();
        assert!(cert.admits(OrderValue::Finite(12)));
        assert!(!cert.admits(OrderValue::Infinite));
        assert!(horizontal_order_set(&ct("[0(2),1(4)]"), &ct("[0(3),1(3)]")).is_err());
        let d = disjoint_support_order(&ct("[0(4),1(4)]"), &ct("[2(4),3(4)]")).unwrap();
        assert_eq!(d.verdict, CertificateVerdict::Finite(2));
        let t = ct("[0(4),1(4)]");
        assert_eq!(disjoint_support_order(&t, &t).unwrap().verdict, CertificateVerdict::Finite(1));
        assert!(disjoint_support_order(&ct("[0(2),1(2)]"), &ct("[0(4),1(4)]")).is_none());
    }

    #[test]
    fn cycle_prefix_closed_forms() {
        assert_eq!(unbounded_cycle_prefix(3, 4, 4).unwrap(), vec![2, 0, 1, 3, 7, 15, 31]);
        assert_eq!(unbounded_cycle_prefix(1, 4, 3).unwrap(), vec![2, 3, 5, 9, 17]);
        assert!(unbounded_cycle_prefix(2, 4, 3).is_err());
        assert!(unbounded_cycle_prefix(1, 5, 3).is_err());
        assert!(unbounded_cycle_prefix(5, 4, 3).is_err());
    }

    #[test]
    fn cycle_prefix_matches_iteration() {
        for k in [1, 3, 5, 7, 9] {
            for m in [4, 6, 8, 10, 12] {
                if k >= m {
                    continue;
                }
                let closed = unbounded_cycle_prefix(k, m, 12).unwrap();
                let iterated = iterated_cycle_prefix(k, m, closed.len()).unwrap();
                assert_eq!(closed, iterated, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn certificate_report_shape() {
        let cert = common_vertex_order(&ct("[0(2),1(2)]"), &ct("[0(2),3(4)]")).unwrap();
        let r = cert.report();
        assert_eq!(r.verdict, "inf");
        assert_eq!(r.source_theorem, "common-vertex");
        assert!(r.witness_available);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("verdict").is_some() && json.get("witness_available").is_some());
    }
}
