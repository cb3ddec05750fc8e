//! Residue classes `r(m)` and class transpositions `[r1(m1),r2(m2)]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::Int;

/// The residue class `r + mℤ`, always stored with `0 <= r < m`.
///
/// Field order gives the derived ordering `(m, r)`, which is the canonical
/// order used inside [`ClassTransposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueClass {
    modulus: Int,
    residue: Int,
}

impl ResidueClass {
    pub fn new(residue: Int, modulus: Int) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::NonPositiveModulus(modulus));
        }
        Ok(Self { modulus, residue: residue.rem_euclid(modulus) })
    }

    /// The whole of ℤ, `0(1)`.
    pub fn integers() -> Self {
        Self { modulus: 1, residue: 0 }
    }

    #[inline]
    pub fn residue(&self) -> Int {
        self.residue
    }

    #[inline]
    pub fn modulus(&self) -> Int {
        self.modulus
    }

    #[inline]
    pub fn contains(&self, x: Int) -> bool {
        x.rem_euclid(self.modulus) == self.residue
    }

    /// The `k`-th element `r + k*m`.
    pub fn element(&self, k: Int) -> Result<Int> {
        arith::add(self.residue, arith::mul(k, self.modulus, "class element")?, "class element")
    }

    /// The index `k` with `x = r + k*m`, if `x` lies in the class.
    pub fn index_of(&self, x: Int) -> Option<Int> {
        if self.contains(x) {
            Some((x - self.residue) / self.modulus)
        } else {
            None
        }
    }

    pub fn is_disjoint(&self, other: &ResidueClass) -> bool {
        let g = arith::gcd(self.modulus, other.modulus);
        (self.residue - other.residue).abs() % g != 0
    }

    /// Intersection by the Chinese remainder theorem, as a class modulo
    /// `lcm(m1, m2)`.
    pub fn intersection(&self, other: &ResidueClass) -> Option<ResidueClass> {
        if self.is_disjoint(other) {
            return None;
        }
        // r1 + m1*s ≡ r2 (mod m2)
        let (s, _) = arith::solve_linear(self.modulus, other.modulus, other.residue - self.residue)
            .ok()
            .flatten()?;
        let lcm = arith::lcm(self.modulus, other.modulus).ok()?;
        let x = self.residue.checked_add(self.modulus.checked_mul(s)?)?;
        ResidueClass::new(x, lcm).ok()
    }

    /// True when `self` is a subset of `other`.
    pub fn is_subset_of(&self, other: &ResidueClass) -> bool {
        self.modulus % other.modulus == 0 && other.contains(self.residue)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.residue, self.modulus)
    }
}

impl FromStr for ResidueClass {
    type Err = Error;

    /// Parses `r(m)`, ignoring whitespace. The residue is reduced modulo `m`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse { what: "residue class", input: s.to_string() };
        let body = compact.strip_suffix(')').ok_or_else(err)?;
        let (r, m) = body.split_once('(').ok_or_else(err)?;
        let r: Int = r.parse().map_err(|_| err())?;
        let m: Int = m.parse().map_err(|_| err())?;
        ResidueClass::new(r, m)
    }
}

/// The involution of ℤ swapping `r1 + k*m1` with `r2 + k*m2` for every `k`.
///
/// The two classes are stored sorted by `(modulus, residue)`, so the
/// transposition of `c1, c2` and of `c2, c1` compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassTransposition {
    first: ResidueClass,
    second: ResidueClass,
}

impl ClassTransposition {
    pub fn new(c1: ResidueClass, c2: ResidueClass) -> Result<Self> {
        if !c1.is_disjoint(&c2) {
            return Err(Error::ClassesIntersect(c1, c2));
        }
        let (first, second) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        Ok(Self { first, second })
    }

    /// Shorthand for `[r1(m1),r2(m2)]`.
    pub fn from_parts(r1: Int, m1: Int, r2: Int, m2: Int) -> Result<Self> {
        Self::new(ResidueClass::new(r1, m1)?, ResidueClass::new(r2, m2)?)
    }

    #[inline]
    pub fn first(&self) -> ResidueClass {
        self.first
    }

    #[inline]
    pub fn second(&self) -> ResidueClass {
        self.second
    }

    pub fn classes(&self) -> [ResidueClass; 2] {
        [self.first, self.second]
    }

    /// The class paired with `c`, when `c` is one of the two classes.
    pub fn partner_of(&self, c: &ResidueClass) -> Option<ResidueClass> {
        if *c == self.first {
            Some(self.second)
        } else if *c == self.second {
            Some(self.first)
        } else {
            None
        }
    }

    pub fn apply(&self, x: Int) -> Result<Int> {
        if let Some(k) = self.first.index_of(x) {
            self.second.element(k)
        } else if let Some(k) = self.second.index_of(x) {
            self.first.element(k)
        } else {
            Ok(x)
        }
    }

    pub fn support_contains(&self, x: Int) -> bool {
        self.first.contains(x) || self.second.contains(x)
    }

    pub fn is_horizontal(&self) -> bool {
        self.first.modulus == self.second.modulus
    }

    pub fn lcm_modulus(&self) -> Int {
        arith::lcm(self.first.modulus, self.second.modulus).expect("moduli are small")
    }

    pub fn max_modulus(&self) -> Int {
        self.second.modulus.max(self.first.modulus)
    }

    /// True when the supports of `self` and `other` share no integer.
    pub fn support_disjoint(&self, other: &ClassTransposition) -> bool {
        self.classes()
            .iter()
            .all(|a| other.classes().iter().all(|b| a.is_disjoint(b)))
    }
}

impl fmt::Display for ClassTransposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.first, self.second)
    }
}

impl FromStr for ClassTransposition {
    type Err = Error;

    /// Parses `[r1(m1),r2(m2)]` with optional whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse { what: "class transposition", input: s.to_string() };
        let body = compact
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(err)?;
        let (a, b) = body.split_once("),").ok_or_else(err)?;
        let c1: ResidueClass = format!("{a})").parse().map_err(|_| err())?;
        let c2: ResidueClass = b.parse().map_err(|_| err())?;
        ClassTransposition::new(c1, c2)
    }
}
