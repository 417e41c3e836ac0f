//! Exact arithmetic: rationals, integer matrices, Gram forms, Hermite normal
//! forms and exact logarithms of rationals.
//!
//! Nothing in here touches floating point except the explicit rendering in
//! [`float`].

pub mod float;
pub mod hnf;
pub mod logvalue;
pub mod matrix;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use hnf::{complete_basis, hermite_normal_form, hnf_saturate, integer_kernel};
pub use logvalue::LogValue;
pub use matrix::{IntMatrix, SymmetricForm};

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rational = BigRational;

/// Builds `p/q` from machine integers.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"0.75"` / `"1e6"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(format!("invalid rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(p) = s.parse::<BigInt>() {
        return Ok(Rational::from_integer(p));
    }
    // decimal with optional exponent, parsed exactly
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: BigInt = format!("{whole}{frac}0").parse().map_err(|_| err())?;
    let digits = digits / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Formats as `"p/q"` or `"p"` when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `floor(sqrt(n))` for `n >= 0`.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

/// Largest integer `k` with `k <= c + sqrt(t)`, for `t >= 0`.
pub(crate) fn floor_center_plus_root(c: &Rational, t: &Rational) -> BigInt {
    let fits = |k: &BigInt| {
        let d = Rational::from_integer(k.clone()) - c;
        !d.is_positive() || &(&d * &d) <= t
    };
    let mut k = guess_center_root(c, t, 1.0);
    while !fits(&k) {
        k -= 1;
    }
    loop {
        let next = &k + 1;
        if fits(&next) {
            k = next;
        } else {
            return k;
        }
    }
}

/// Smallest integer `k` with `k >= c - sqrt(t)`, for `t >= 0`.
pub(crate) fn ceil_center_minus_root(c: &Rational, t: &Rational) -> BigInt {
    -floor_center_plus_root(&-c, t)
}

fn guess_center_root(c: &Rational, t: &Rational, sign: f64) -> BigInt {
    let cf = rational_to_f64(c);
    let tf = rational_to_f64(t).max(0.0);
    let g = (cf + sign * tf.sqrt()).floor();
    if g.is_finite() && g.abs() < 9.0e15 {
        BigInt::from(g as i64)
    } else {
        c.floor().to_integer()
    }
}

/// Nearest-ish `f64` of a rational; exact enough for search heuristics.
pub fn rational_to_f64(r: &Rational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    if nb < 1000 && db < 1000 {
        if let (Some(nf), Some(df)) = (num_traits::ToPrimitive::to_f64(n), num_traits::ToPrimitive::to_f64(d)) {
            if nf.is_finite() && df.is_finite() && df != 0.0 {
                return nf / df;
            }
        }
    }
    // shift both into range
    let shift = (nb - 60).max(0);
    let dshift = (db - 60).max(0);
    let nf = num_traits::ToPrimitive::to_f64(&(n >> shift as usize)).unwrap_or(0.0);
    let df = num_traits::ToPrimitive::to_f64(&(d >> dshift as usize)).unwrap_or(1.0);
    nf / df * 2f64.powi((shift - dshift) as i32)
}

/// Exact `r^e` for an integer exponent of either sign (`r != 0` when `e < 0`).
pub fn rational_pow(r: &Rational, e: &BigInt) -> Rational {
    if e.is_zero() {
        return Rational::one();
    }
    let mag: usize = num_traits::ToPrimitive::to_usize(&e.abs()).expect("exponent too large");
    let n = num_traits::pow(r.numer().clone(), mag);
    let d = num_traits::pow(r.denom().clone(), mag);
    if e.is_positive() {
        Rational::new_raw(n, d)
    } else if n.is_negative() {
        Rational::new_raw(-d, -n)
    } else {
        Rational::new_raw(d, n)
    }
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}
