//! Checked integer helpers.
//!
//! All arithmetic on orbit values and map coefficients goes through these so
//! that overflow surfaces as [`Error::Overflow`] instead of wrapping. The
//! usable width can be narrowed at runtime (see [`set_int_bits`]) to exercise
//! the overflow paths without astronomically large inputs.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::error::{Error, Result};
use crate::Int;

static INT_BITS: AtomicU32 = AtomicU32::new(128);

/// Caps the signed width used for every checked operation. Values are clamped
/// to `8..=128`.
pub fn set_int_bits(bits: u32) {
    INT_BITS.store(bits.clamp(8, 128), Ordering::Relaxed);
}

pub fn int_bits() -> u32 {
    INT_BITS.load(Ordering::Relaxed)
}

#[inline]
fn fits(v: Int) -> bool {
    let bits = INT_BITS.load(Ordering::Relaxed);
    if bits >= 128 {
        return true;
    }
    let bound = 1i128 << (bits - 1);
    v >= -bound && v < bound
}

#[inline]
fn guard(v: Option<Int>, ctx: &'static str) -> Result<Int> {
    match v {
        Some(v) if fits(v) => Ok(v),
        _ => Err(Error::Overflow(ctx)),
    }
}

#[inline]
pub fn add(a: Int, b: Int, ctx: &'static str) -> Result<Int> {
    guard(a.checked_add(b), ctx)
}

#[inline]
pub fn sub(a: Int, b: Int, ctx: &'static str) -> Result<Int> {
    guard(a.checked_sub(b), ctx)
}

#[inline]
pub fn mul(a: Int, b: Int, ctx: &'static str) -> Result<Int> {
    guard(a.checked_mul(b), ctx)
}

pub fn pow(base: Int, exp: u32, ctx: &'static str) -> Result<Int> {
    let mut acc: Int = 1;
    for _ in 0..exp {
        acc = mul(acc, base, ctx)?;
    }
    Ok(acc)
}

#[inline]
fn small(a: Int, b: Int) -> bool {
    // i64 division is far cheaper than i128; MIN / -1 is the only overflow.
    a as i64 as Int == a && b as i64 as Int == b && !(a == i64::MIN as Int && b == -1)
}

/// Truncating quotient, `a / b`. Panics on `b == 0` like the operator.
#[inline]
pub fn quot(a: Int, b: Int) -> Int {
    if small(a, b) {
        (a as i64 / b as i64) as Int
    } else {
        a / b
    }
}

/// Truncating remainder, `a % b`.
#[inline]
pub fn rem(a: Int, b: Int) -> Int {
    if small(a, b) {
        (a as i64 % b as i64) as Int
    } else {
        a % b
    }
}

/// Least non-negative residue of `a` modulo `b > 0`.
#[inline]
pub fn modulo(a: Int, b: Int) -> Int {
    if small(a, b) {
        (a as i64).rem_euclid(b as i64) as Int
    } else {
        a.rem_euclid(b)
    }
}

/// Non-negative gcd; `gcd(0, 0) == 0`.
pub fn gcd(a: Int, b: Int) -> Int {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    if a == 0 {
        return b as Int;
    }
    if b == 0 {
        return a as Int;
    }
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd_u64(a as u64, b as u64) as Int;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return (a << shift) as Int;
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

pub fn lcm(a: Int, b: Int) -> Result<Int> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    let g = gcd(a, b);
    mul((a / g).abs(), b.abs(), "lcm")
}

/// Extended Euclid: returns `(g, u, v)` with `u*a + v*b == g == gcd(a, b) >= 0`.
pub fn ext_gcd(a: Int, b: Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1, 0);
    let (mut old_t, mut t) = (0, 1);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Solves `a*x - b*y == c`. Returns one particular solution `(x, y)` with `x`
/// reduced modulo `b / gcd(a, b)`, or `None` when `gcd(a, b)` does not divide `c`.
pub fn solve_linear(a: Int, b: Int, c: Int) -> Result<Option<(Int, Int)>> {
    let (g, u, _) = ext_gcd(a, b);
    if g == 0 {
        return Ok(if c == 0 { Some((0, 0)) } else { None });
    }
    if c % g != 0 {
        return Ok(None);
    }
    let step = (b / g).abs();
    // a*u ≡ g (mod b)  =>  x ≡ u*(c/g) (mod b/g)
    let x = if step == 0 {
        mul(u, c / g, "linear solve")?
    } else {
        let uc = mul(u.rem_euclid(step), (c / g).rem_euclid(step), "linear solve")?;
        uc.rem_euclid(step)
    };
    let ax = mul(a, x, "linear solve")?;
    let num = sub(ax, c, "linear solve")?;
    if b == 0 {
        return Ok(if num == 0 { Some((x, 0)) } else { None });
    }
    if num % b != 0 {
        return Err(Error::Invariant(format!(
            "linear solve produced a non-solution for {a}*x - {b}*y = {c}"
        )));
    }
    Ok(Some((x, num / b)))
}

pub fn divisors(n: Int) -> Vec<Int> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d: Int = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}
