//! Arbitrary-precision rendering of `c * ln(q)` for rational `c`, `q`.
//!
//! Fixed-point evaluation of `atanh` series with enough guard bits that the
//! final rounding to `p` bits is within `2^(1-p)` relative error.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

const GUARD_BITS: u64 = 64;

/// A binary float `mantissa * 2^exponent` with `|mantissa| < 2^precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedFloat {
    pub mantissa: BigInt,
    pub exponent: i64,
    pub precision: u32,
}

impl RoundedFloat {
    pub fn zero(precision: u32) -> Self {
        Self { mantissa: BigInt::zero(), exponent: 0, precision }
    }

    /// Rounds to `f64`; exact when `precision <= 53`.
    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let (m, e) = if bits > 53 {
            let shift = (bits - 53) as usize;
            (round_shift(&self.mantissa, shift), self.exponent + shift as i64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        ldexp(m.to_f64().unwrap(), e)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.mantissa.is_zero() {
            return "0".to_string();
        }
        // value = m * 2^e; scale to an integer with `digits` significant decimals
        let neg = self.mantissa.is_negative();
        let m = self.mantissa.abs();
        let est = (m.bits() as f64 + self.exponent as f64) * std::f64::consts::LOG10_2;
        let dec_exp = est.floor() as i64 - digits as i64 + 1;
        // q = m * 2^e / 10^dec_exp, rounded
        let mut num = m;
        let mut den = BigInt::one();
        if self.exponent >= 0 {
            num <<= self.exponent as usize;
        } else {
            den <<= (-self.exponent) as usize;
        }
        let ten = BigInt::from(10);
        if dec_exp >= 0 {
            den *= num_traits::pow(ten, dec_exp as usize);
        } else {
            num *= num_traits::pow(ten, (-dec_exp) as usize);
        }
        let q: BigInt = (&num * 2 + &den) / (&den * 2);
        let mut s = q.to_string();
        let mut point = s.len() as i64 + dec_exp;
        if s.len() > digits {
            // rounding carried into an extra digit
            s.truncate(digits);
            point = point.max(1);
        }
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), s)
        } else if point as usize >= s.len() {
            format!("{}{}", s, "0".repeat(point as usize - s.len()))
        } else {
            format!("{}.{}", &s[..point as usize], &s[point as usize..])
        };
        let body = if body.contains('.') { body.trim_end_matches('0').trim_end_matches('.').to_string() } else { body };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

fn round_shift(x: &BigInt, shift: usize) -> BigInt {
    if shift == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (shift - 1);
    if x.is_negative() {
        -((-x + half) >> shift)
    } else {
        (x + half) >> shift
    }
}

/// `2 * atanh(z) * 2^w` for rational `0 <= z < 1`, truncated; absolute error
/// below `(terms + 2)` units.
fn atanh2_fixed(num: &BigInt, den: &BigInt, w: u64) -> BigInt {
    if num.is_zero() {
        return BigInt::zero();
    }
    let z = (num << w as usize) / den;
    let z2 = (&z * &z) >> w as usize;
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !power.is_zero() {
        sum += &power / k;
        power = (&power * &z2) >> w as usize;
        k += 2;
        if k > 4 * w + 8 {
            break;
        }
    }
    sum << 1
}

/// `ln(q) * 2^w` for rational `q >= 1`, truncated to an integer, with a small
/// absolute error (a few units).
fn ln_fixed(q: &Rational, w: u64) -> BigInt {
    let (n, d) = (q.numer(), q.denom());
    if n == d {
        return BigInt::zero();
    }
    if q <= &Rational::from_integer(BigInt::from(2)) {
        return atanh2_fixed(&(n - d), &(n + d), w);
    }
    // q = 2^k * m with 1 <= m < 2
    let mut k = n.bits() as i64 - d.bits() as i64;
    let two_k = |k: i64| if k >= 0 { Rational::from_integer(BigInt::one() << k as usize) } else { Rational::new(BigInt::one(), BigInt::one() << (-k) as usize) };
    while &two_k(k) > q {
        k -= 1;
    }
    while &two_k(k + 1) <= q {
        k += 1;
    }
    let m = q / two_k(k);
    let ln2 = atanh2_fixed(&BigInt::one(), &BigInt::from(3), w);
    ln2 * k + atanh2_fixed(&(m.numer() - m.denom()), &(m.numer() + m.denom()), w)
}

/// Rounded `c * ln(q)` for rational `c` and `q > 0`.
pub fn scaled_ln(coeff: &Rational, base: &Rational, precision: u32) -> RoundedFloat {
    assert!(precision >= 2);
    if coeff.is_zero() || base.is_one() {
        return RoundedFloat::zero(precision);
    }
    let (c, q) = if base < &Rational::one() { (-coeff, base.recip()) } else { (coeff.clone(), base.clone()) };
    // working precision: enough that the result keeps `precision + GUARD` bits
    // even when ln(q) is tiny (q close to 1) or c is tiny.
    let near_one = if q <= Rational::from_integer(BigInt::from(2)) {
        let gap = q.numer() - q.denom();
        (q.numer() + q.denom()).bits().saturating_sub(gap.bits())
    } else {
        0
    };
    let c_small = c.denom().bits().saturating_sub(c.numer().bits());
    let w = precision as u64 + GUARD_BITS + near_one + c_small + 8;
    let l = ln_fixed(&q, w);
    // value * 2^w = c * l
    let v = (c.numer() * l).div_floor(c.denom());
    if v.is_zero() {
        return RoundedFloat::zero(precision);
    }
    let bits = v.bits();
    let shift = bits.saturating_sub(precision as u64);
    let mut mantissa = round_shift(&v, shift as usize);
    let mut exponent = shift as i64 - w as i64;
    if mantissa.bits() > precision as u64 {
        mantissa = round_shift(&mantissa, 1);
        exponent += 1;
    }
    RoundedFloat { mantissa, exponent, precision }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn ln2_to_double() {
        let f = scaled_ln(&int(1), &int(2), 53);
        assert_eq!(f.to_f64(), std::f64::consts::LN_2);
    }

    #[test]
    fn three_ln_three() {
        let f = scaled_ln(&int(3), &int(3), 53);
        assert!((f.to_f64() - 3.295_836_866_004_329).abs() < 1e-15);
    }

    #[test]
    fn near_one_keeps_relative_accuracy() {
        // ln(1 + 1e-30) ~ 1e-30
        let q = Rational::new(BigInt::from(10).pow(30) + 1, BigInt::from(10).pow(30));
        let f = scaled_ln(&int(1), &q, 53).to_f64();
        assert!((f / 1e-30 - 1.0).abs() < 1e-14, "{f}");
    }

    #[test]
    fn high_precision_digits_of_ln2() {
        let f = scaled_ln(&int(1), &int(2), 200);
        assert_eq!(&f.to_decimal(40)[..40], "0.69314718055994530941723212145817656807");
    }

    #[test]
    fn negative_and_reciprocal() {
        let a = scaled_ln(&rat(-1, 2), &int(4), 53).to_f64();
        let b = scaled_ln(&int(1), &rat(1, 2), 53).to_f64();
        assert_eq!(a, b);
        assert_eq!(a, -std::f64::consts::LN_2);
    }
}
