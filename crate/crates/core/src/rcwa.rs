//! Residue-class-wise affine permutations of ℤ.
//!
//! An [`RcwaMap`] stores one affine piece `x ↦ (a·x + b)/c` per residue class
//! modulo its modulus. Products of class transpositions are exactly of this
//! form, which makes powers of a product exactly computable.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::residue::{ClassTransposition, ResidueClass};
use crate::Int;

/// `x ↦ (a·x + b)/c`, normalized so that `c > 0` and `gcd(a, b, c) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub a: Int,
    pub b: Int,
    pub c: Int,
}

impl Affine {
    pub const IDENTITY: Affine = Affine { a: 1, b: 0, c: 1 };

    pub fn new(a: Int, b: Int, c: Int) -> Result<Self> {
        if c == 0 {
            return Err(Error::Invariant("affine piece with zero divisor".into()));
        }
        let g = arith::gcd(arith::gcd(a, c), b);
        let (a, b, c) = if g == 1 { (a, b, c) } else { (arith::quot(a, g), arith::quot(b, g), arith::quot(c, g)) };
        Ok(if c < 0 { Affine { a: -a, b: -b, c: -c } } else { Affine { a, b, c } })
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn eval(&self, x: Int) -> Result<Int> {
        let num = arith::add(arith::mul(self.a, x, "evaluate")?, self.b, "evaluate")?;
        if self.c == 1 {
            return Ok(num);
        }
        if arith::rem(num, self.c) != 0 {
            return Err(Error::Invariant(format!(
                "({}*{x}+{})/{} is not an integer",
                self.a, self.b, self.c
            )));
        }
        Ok(arith::quot(num, self.c))
    }

    /// `outer ∘ self`, i.e. `x ↦ outer(self(x))`.
    fn then(&self, outer: &Affine) -> Result<Affine> {
        let a = arith::mul(outer.a, self.a, "compose")?;
        let b = arith::add(
            arith::mul(outer.a, self.b, "compose")?,
            arith::mul(outer.b, self.c, "compose")?,
            "compose",
        )?;
        let c = arith::mul(outer.c, self.c, "compose")?;
        Affine::new(a, b, c)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}*x{:+})/{}", self.a, self.b, self.c)
    }
}

/// One row of a map's piece table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub class: ResidueClass,
    pub affine: Affine,
}

/// A piecewise-affine map of ℤ with one piece per residue class modulo
/// `modulus`.
///
/// Constructors return canonical maps: the modulus is the smallest one on
/// which the function is affine per class, so structural equality coincides
/// with equality of functions.
///
/// Powers of a product have huge moduli but only a handful of distinct
/// pieces, so the table stores indices into `palette`. The palette holds each
/// piece once, in order of first appearance in the table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RcwaMap {
    modulus: Int,
    palette: Vec<Affine>,
    table: Vec<u32>,
}

/// Outcome of scanning successive powers for the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderScanResult {
    Finite(u64),
    ModulusBlowup { step: u64, modulus_reached: Int },
    Inconclusive { steps_done: u64 },
}

/// Assigns palette indices to pieces, each distinct piece once.
#[derive(Default)]
struct Interner {
    palette: Vec<Affine>,
    index: HashMap<Affine, u32>,
}

impl Interner {
    fn intern(&mut self, p: Affine) -> u32 {
        *self.index.entry(p).or_insert_with(|| {
            self.palette.push(p);
            (self.palette.len() - 1) as u32
        })
    }
}

impl RcwaMap {
    pub fn identity() -> Self {
        RcwaMap { modulus: 1, palette: vec![Affine::IDENTITY], table: vec![0] }
    }

    /// Builds a map from a piece table indexed by residue. The table is
    /// validated (every piece must send its class into ℤ) and canonicalized.
    pub fn from_table(modulus: Int, table: Vec<Affine>) -> Result<Self> {
        if modulus < 1 || table.len() as Int != modulus {
            return Err(Error::precondition(format!(
                "piece table of length {} does not match modulus {modulus}",
                table.len()
            )));
        }
        for (r, piece) in table.iter().enumerate() {
            check_integral(piece, r as Int, modulus)?;
        }
        Ok(Self::from_pieces(modulus, table))
    }

    fn from_pieces(modulus: Int, pieces: Vec<Affine>) -> Self {
        let mut interner = Interner::default();
        let table = pieces.into_iter().map(|p| interner.intern(p)).collect();
        RcwaMap { modulus, palette: interner.palette, table }.canonicalize()
    }

    pub fn from_class_transposition(t: &ClassTransposition) -> Self {
        let modulus = t.lcm_modulus();
        let [c1, c2] = t.classes();
        let swap = |from: ResidueClass, to: ResidueClass| {
            // from.r + k*from.m ↦ to.r + k*to.m
            Affine::new(
                to.modulus(),
                to.residue() * from.modulus() - from.residue() * to.modulus(),
                from.modulus(),
            )
            .expect("nonzero modulus")
        };
        let there = swap(c1, c2);
        let back = swap(c2, c1);
        let table = (0..modulus)
            .map(|r| {
                if c1.contains(r) {
                    there
                } else if c2.contains(r) {
                    back
                } else {
                    Affine::IDENTITY
                }
            })
            .collect();
        Self::from_pieces(modulus, table)
    }

    /// The product of two class transpositions, applying `first` then `second`.
    pub fn product(first: &ClassTransposition, second: &ClassTransposition) -> Result<Self> {
        Self::from_class_transposition(first).compose(&Self::from_class_transposition(second))
    }

    #[inline]
    pub fn modulus(&self) -> Int {
        self.modulus
    }

    pub fn piece(&self, residue: Int) -> Affine {
        self.palette[self.table[arith::modulo(residue, self.modulus) as usize] as usize]
    }

    pub fn pieces(&self) -> impl Iterator<Item = AffinePiece> + '_ {
        let m = self.modulus;
        self.table.iter().enumerate().map(move |(r, &i)| AffinePiece {
            class: ResidueClass::new(r as Int, m).expect("positive modulus"),
            affine: self.palette[i as usize],
        })
    }

    /// The distinct pieces, in order of first appearance.
    pub fn distinct_pieces(&self) -> &[Affine] {
        &self.palette
    }

    pub fn evaluate(&self, x: Int) -> Result<Int> {
        self.piece(x).eval(x)
    }

    pub fn is_identity(&self) -> bool {
        self.palette.iter().all(Affine::is_identity)
    }

    /// Largest `|a|` or `c` over all pieces.
    pub fn max_coefficient(&self) -> Int {
        self.palette.iter().map(|p| p.a.abs().max(p.c)).max().unwrap_or(1)
    }

    /// The map `x ↦ other(self(x))`: `self` is applied first.
    pub fn compose(&self, other: &RcwaMap) -> Result<RcwaMap> {
        self.compose_limited(other, Int::MAX)
    }

    /// Like [`compose`](Self::compose) but refuses with
    /// [`Error::ModulusLimit`] when the refined modulus would exceed `limit`,
    /// before any table is allocated.
    pub fn compose_limited(&self, other: &RcwaMap, limit: Int) -> Result<RcwaMap> {
        let m = self.modulus;
        let n = other.modulus;
        // Class r(m) is sent onto an arithmetic progression of step a*m/c.
        // It has to be split until each part lands in one class mod n.
        // The part count depends only on the piece and divides n, so the
        // refined modulus is m times the lcm over the palette.
        let mut parts = Vec::with_capacity(self.palette.len());
        let mut parts_lcm: Int = 1;
        for p in &self.palette {
            let step = slope_step(p, m)?;
            let k = arith::quot(n, arith::gcd(step, n));
            parts.push(k);
            parts_lcm = arith::lcm(parts_lcm, k)?;
        }
        let refined = arith::mul(m, parts_lcm, "compose modulus")?;
        if refined > limit {
            return Err(Error::ModulusLimit { reached: refined, limit });
        }
        let len = usize::try_from(refined).map_err(|_| Error::Overflow("compose modulus"))?;

        // A composite piece depends only on the pair of pieces involved.
        let width = other.palette.len();
        let mut memo: Vec<u32> = vec![u32::MAX; self.palette.len() * width];
        let mut interner = Interner::default();
        let mut table = vec![0u32; len];
        // The composite on ρ(refined) depends only on ρ mod (m * parts).
        for (r, &pi) in self.table.iter().enumerate() {
            let p = &self.palette[pi as usize];
            let k = parts[pi as usize];
            let block = (m * k) as usize;
            for j in 0..k {
                let rho = r as Int + j * m;
                let image = p.eval(rho)?;
                let qi = other.table[arith::modulo(image, n) as usize];
                let slot = &mut memo[pi as usize * width + qi as usize];
                if *slot == u32::MAX {
                    *slot = interner.intern(p.then(&other.palette[qi as usize])?);
                }
                let ci = *slot;
                for cell in table[rho as usize..].iter_mut().step_by(block) {
                    *cell = ci;
                }
            }
        }
        Ok(RcwaMap { modulus: refined, palette: interner.palette, table }.canonicalize())
    }

    /// Reduces to the smallest modulus representing the same function and
    /// renumbers the palette by first appearance.
    ///
    /// Normalized affine forms are unique per function, so the canonical
    /// modulus is the least period of the piece table.
    pub fn canonicalize(self) -> RcwaMap {
        let RcwaMap { modulus, palette, mut table } = self;
        let mut modulus = modulus;
        for d in arith::divisors(modulus) {
            if d == modulus {
                break;
            }
            let du = d as usize;
            if table[du..].iter().enumerate().all(|(i, &p)| p == table[i % du]) {
                table.truncate(du);
                modulus = d;
                break;
            }
        }
        let mut renumber = vec![u32::MAX; palette.len()];
        let mut used = Vec::new();
        for cell in &mut table {
            let slot = &mut renumber[*cell as usize];
            if *slot == u32::MAX {
                *slot = used.len() as u32;
                used.push(palette[*cell as usize]);
            }
            *cell = *slot;
        }
        RcwaMap { modulus, palette: used, table }
    }

    /// `self^exp` by repeated squaring.
    pub fn pow(&self, exp: u64) -> Result<RcwaMap> {
        let mut result = RcwaMap::identity();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(result)
    }

    /// Computes `f, f², f³, …` and stops at the first identity, when the
    /// modulus of a power would exceed `mod_max`, or after `n_max` powers.
    pub fn power_order_scan(&self, n_max: u64, mod_max: Int) -> Result<OrderScanResult> {
        if n_max < 1 {
            return Err(Error::precondition("n_max must be at least 1"));
        }
        if mod_max < self.modulus {
            return Err(Error::precondition(format!(
                "mod_max {mod_max} is below the map's modulus {}",
                self.modulus
            )));
        }
        let mut power = self.clone();
        for step in 1..=n_max {
            if step > 1 {
                power = match power.compose_limited(self, mod_max) {
                    Ok(p) => p,
                    Err(Error::ModulusLimit { reached, .. }) => {
                        return Ok(OrderScanResult::ModulusBlowup { step, modulus_reached: reached })
                    }
                    Err(e) => return Err(e),
                };
            }
            if power.is_identity() {
                return Ok(OrderScanResult::Finite(step));
            }
        }
        Ok(OrderScanResult::Inconclusive { steps_done: n_max })
    }

    /// Checks that no two integers of `[start, start + len)` share an image.
    pub fn is_injective_on(&self, start: Int, len: Int) -> Result<bool> {
        let mut images = Vec::with_capacity(len.max(0) as usize);
        for x in start..start + len {
            images.push(self.evaluate(x)?);
        }
        images.sort_unstable();
        Ok(images.windows(2).all(|w| w[0] != w[1]))
    }

    /// Window length used by the bijectivity surrogate check.
    pub fn injectivity_window(&self) -> Int {
        3 * self.modulus * self.max_coefficient()
    }
}

/// `a*m/c`, the step of the image progression of class `r(m)`.
fn slope_step(p: &Affine, m: Int) -> Result<Int> {
    let am = arith::mul(p.a, m, "compose slope")?;
    if arith::rem(am, p.c) != 0 {
        return Err(Error::Invariant(format!(
            "piece {p} modulo {m} does not map its class onto a progression"
        )));
    }
    let step = arith::quot(am, p.c);
    if step == 0 {
        return Err(Error::Invariant(format!("piece {p} modulo {m} is constant")));
    }
    Ok(step)
}

fn check_integral(p: &Affine, r: Int, m: Int) -> Result<()> {
    slope_step(p, m)?;
    p.eval(r).map(|_| ())
}

impl fmt::Display for RcwaMap {
    /// One line per piece: `class: (a*x+b)/c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for piece in self.pieces() {
            writeln!(f, "{}: {}", piece.class, piece.affine)?;
        }
        Ok(())
    }
}
