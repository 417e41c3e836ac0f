//! Exact real numbers of the form `c * ln(q)` with rational `c` and `q > 0`.
//!
//! Degrees, slopes and heights all live here. Comparison reduces to comparing
//! integer powers of rationals, so orderings are decided exactly.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use super::float::{scaled_ln, RoundedFloat};
use super::{format_rational, rational_pow, Rational};
use crate::error::{Error, Result};

/// Default cap on the bit size of the base produced when two log values with
/// different coefficients are merged into one.
pub const DEFAULT_BASE_CAP_BITS: u64 = 1 << 20;

/// The real number `coefficient * ln(base)`.
///
/// Canonical form: `base > 1`, or `base == 1` with a zero coefficient.
#[derive(Clone)]
pub struct LogValue {
    coeff: Rational,
    base: Rational,
}

impl LogValue {
    pub fn zero() -> Self {
        Self { coeff: Rational::zero(), base: Rational::one() }
    }

    /// `coeff * ln(base)`; panics if `base <= 0`.
    pub fn new(coeff: Rational, base: Rational) -> Self {
        assert!(base.is_positive(), "log of a non-positive number");
        if coeff.is_zero() || base.is_one() {
            return Self::zero();
        }
        if base < Rational::one() {
            Self { coeff: -coeff, base: base.recip() }
        } else {
            Self { coeff, base }
        }
    }

    pub fn ln(q: Rational) -> Self {
        Self::new(Rational::one(), q)
    }

    pub fn ln_int(n: i64) -> Self {
        Self::ln(Rational::from_integer(BigInt::from(n)))
    }

    pub fn coefficient(&self) -> &Rational {
        &self.coeff
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.coeff.is_negative()
    }

    pub fn signum(&self) -> i32 {
        if self.coeff.is_positive() {
            1
        } else if self.coeff.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn scale(&self, t: &Rational) -> Self {
        Self::new(&self.coeff * t, self.base.clone())
    }

    pub fn div_int(&self, k: i64) -> Self {
        self.scale(&Rational::new(BigInt::one(), BigInt::from(k)))
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(k)))
    }

    /// Exact sum, failing when the merged base would exceed `cap_bits`.
    pub fn checked_add_capped(&self, other: &Self, cap_bits: u64) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.base == other.base {
            return Ok(Self::new(&self.coeff + &other.coeff, self.base.clone()));
        }
        if self.coeff == other.coeff {
            return Ok(Self::new(self.coeff.clone(), &self.base * &other.base));
        }
        if self.coeff == -&other.coeff {
            return Ok(Self::new(self.coeff.clone(), &self.base / &other.base));
        }
        // (n1/d1) ln q1 + (n2/d2) ln q2 = (g/L) ln(q1^(e1/g) q2^(e2/g))
        let (n1, d1) = (self.coeff.numer(), self.coeff.denom());
        let (n2, d2) = (other.coeff.numer(), other.coeff.denom());
        let l = d1.lcm(d2);
        let e1 = n1 * (&l / d1);
        let e2 = n2 * (&l / d2);
        let g = e1.gcd(&e2);
        let (e1, e2) = (e1 / &g, e2 / &g);
        let size = |q: &Rational, e: &BigInt| {
            let bits = q.numer().bits() + q.denom().bits();
            e.abs().to_u64().map_or(u64::MAX, |e| e.saturating_mul(bits))
        };
        if size(&self.base, &e1).saturating_add(size(&other.base, &e2)) > cap_bits {
            return Err(Error::ExponentCap { cap_bits });
        }
        let base = rational_pow(&self.base, &e1) * rational_pow(&other.base, &e2);
        Ok(Self::new(Rational::new(g, l), base))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.checked_add_capped(other, DEFAULT_BASE_CAP_BITS)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    /// Rounded value with `precision_bits` significant bits.
    pub fn to_float(&self, precision_bits: u32) -> RoundedFloat {
        scaled_ln(&self.coeff, &self.base, precision_bits)
    }

    /// Correctly rounded (to within one ulp) `f64` rendering.
    pub fn to_f64(&self) -> f64 {
        self.to_float(53).to_f64()
    }

    /// Plain `f64` evaluation `c * ln q`, for histograms and means where a
    /// few ulps do not matter.
    pub fn approx(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let c = self.coeff.numer().to_f64().unwrap_or(f64::NAN) / self.coeff.denom().to_f64().unwrap_or(f64::NAN);
        c * (ln_big(self.base.numer()) - ln_big(self.base.denom()))
    }

    /// `{coefficient: "p/r", base: "a/b", value: <f64>}`
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "coefficient": format_rational(&self.coeff),
            "base": format_rational(&self.base),
            "value": self.to_f64(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let get = |k: &str| {
            v.get(k)
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Parse(format!("log value missing {k:?}")))
                .and_then(super::parse_rational)
        };
        let base = get("base")?;
        if !base.is_positive() {
            return Err(Error::Parse("log value base must be positive".into()));
        }
        Ok(Self::new(get("coefficient")?, base))
    }

    /// Exact comparison of `|self|` against `|other|`, both nonzero.
    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        if self.base == other.base {
            return self.coeff.abs().cmp(&other.coeff.abs());
        }
        let (a, b) = (self.coeff.abs(), other.coeff.abs());
        if a == b {
            return self.base.cmp(&other.base);
        }
        // a ln q1 vs b ln q2  <=>  q1^(na*db) vs q2^(nb*da)
        let e1 = a.numer() * b.denom();
        let e2 = b.numer() * a.denom();
        let g = e1.gcd(&e2);
        let (e1, e2) = (e1 / &g, e2 / &g);
        if let Some(ord) = bit_length_bracket(&self.base, &e1, &other.base, &e2) {
            return ord;
        }
        let lhs = rational_pow(&self.base, &e1);
        let rhs = rational_pow(&other.base, &e2);
        lhs.cmp(&rhs)
    }
}

/// Decides `q1^e1` vs `q2^e2` (both bases > 1, exponents > 0) from bit
/// lengths alone when the brackets on `log2` do not overlap.
fn bit_length_bracket(q1: &Rational, e1: &BigInt, q2: &Rational, e2: &BigInt) -> Option<Ordering> {
    // 2^(bn-1) <= n < 2^bn, so bn-1-bd < log2(n/d) < bn-bd+1
    let bracket = |q: &Rational| {
        let bn = q.numer().bits() as i64;
        let bd = q.denom().bits() as i64;
        (bn - 1 - bd, bn - bd + 1)
    };
    let (lo1, hi1) = bracket(q1);
    let (lo2, hi2) = bracket(q2);
    let lo1 = BigInt::from(lo1.max(0)) * e1;
    let hi1 = BigInt::from(hi1) * e1;
    let lo2 = BigInt::from(lo2.max(0)) * e2;
    let hi2 = BigInt::from(hi2) * e2;
    if hi1 <= lo2 {
        Some(Ordering::Less)
    } else if hi2 <= lo1 {
        Some(Ordering::Greater)
    } else {
        None
    }
}

fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact ordering of two log values.
pub fn logvalue_compare(a: &LogValue, b: &LogValue) -> Ordering {
    a.cmp(b)
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        match sa {
            0 => Ordering::Equal,
            1 => self.cmp_magnitude(other),
            _ => other.cmp_magnitude(self),
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for LogValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LogValue {}

impl std::ops::Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue { coeff: -self.coeff, base: self.base }
    }
}

impl std::ops::Neg for &LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue { coeff: -&self.coeff, base: self.base.clone() }
    }
}

// Operator sums panic past the base size cap; use `checked_add` to handle it.
impl std::ops::Add for &LogValue {
    type Output = LogValue;
    fn add(self, rhs: &LogValue) -> LogValue {
        self.checked_add(rhs).expect("log value size cap exceeded")
    }
}

impl std::ops::Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        &self + &rhs
    }
}

impl std::ops::Sub for &LogValue {
    type Output = LogValue;
    fn sub(self, rhs: &LogValue) -> LogValue {
        self + &-rhs
    }
}

impl std::ops::Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        &self - &rhs
    }
}

impl std::iter::Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        iter.fold(LogValue::zero(), |a, b| a + b)
    }
}

/// `(r, k)` with `q = r^k` and `k` as large as possible.
fn perfect_power(q: &Rational) -> (Rational, u32) {
    let bits = q.numer().bits().max(q.denom().bits()) as u32;
    for k in (2..=bits.max(2)).rev() {
        let (n, d) = (q.numer().nth_root(k), q.denom().nth_root(k));
        if num_traits::pow(n.clone(), k as usize) == *q.numer() && num_traits::pow(d.clone(), k as usize) == *q.denom() {
            return (Rational::new(n, d), k);
        }
    }
    (q.clone(), 1)
}

/// Shown with the base reduced to a non-power: `(1/2) ln 4` prints as `ln(2)`.
impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (root, k) = perfect_power(&self.base);
        let c = &(&self.coeff * Rational::from_integer(BigInt::from(k)));
        let b = format_rational(&root);
        if c.is_one() {
            write!(f, "ln({b})")
        } else if *c == -Rational::one() {
            write!(f, "-ln({b})")
        } else {
            write!(f, "{}*ln({b})", format_rational(c))
        }
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogValue({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_reduces_powers() {
        let show = |c: (i64, i64), b: (i64, i64)| LogValue::new(Rational::new(c.0.into(), c.1.into()), Rational::new(b.0.into(), b.1.into())).to_string();
        assert_eq!(show((1, 2), (4, 1)), "ln(2)");
        assert_eq!(show((-1, 2), (4, 1)), "-ln(2)");
        assert_eq!(show((3, 2), (9, 1)), "3*ln(3)");
        assert_eq!(show((1, 1), (18, 1)), "ln(18)");
        assert_eq!(show((1, 1), (9, 4)), "2*ln(3/2)");
        assert_eq!(show((1, 3), (1 << 30, 1)), "10*ln(2)");
    }
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn lv(c: Rational, q: Rational) -> LogValue {
        LogValue::new(c, q)
    }

    #[test]
    fn approx_tracks_exact_value() {
        let big = LogValue::new(rat(3, 7), Rational::new(num_traits::pow(BigInt::from(10), 400) + 1, BigInt::from(3)));
        assert!((big.approx() - big.to_f64()).abs() <= 1e-12 * big.to_f64().abs());
        assert_eq!(LogValue::zero().approx(), 0.0);
        for (c, q) in [(int(1), int(10)), (rat(-5, 2), rat(7, 9)), (rat(3, 2), int(86))] {
            let v = lv(c, q);
            assert!((v.approx() - v.to_f64()).abs() <= 1e-14 * v.to_f64().abs().max(1.0));
        }
    }

    #[test]
    fn ln2_equals_half_ln4() {
        assert_eq!(lv(int(1), int(2)).cmp(&lv(rat(1, 2), int(4))), Ordering::Equal);
    }

    #[test]
    fn ln3_exceeds_three_halves_ln2() {
        assert_eq!(lv(int(1), int(3)).cmp(&lv(rat(3, 2), int(2))), Ordering::Greater);
    }

    #[test]
    fn zeros_compare_equal() {
        assert_eq!(lv(int(0), int(1)), lv(int(1), int(1)));
        assert!(lv(int(5), int(1)).is_zero());
    }

    #[test]
    fn canonical_base_is_above_one() {
        let v = lv(int(2), rat(1, 3));
        assert_eq!(v.base(), &int(3));
        assert_eq!(v.coefficient(), &int(-2));
    }

    #[test]
    fn equal_coefficient_sum_multiplies_bases() {
        let s = lv(rat(1, 2), int(3)) + lv(rat(1, 2), int(5));
        assert_eq!(s.coefficient(), &rat(1, 2));
        assert_eq!(s.base(), &int(15));
    }

    #[test]
    fn mixed_sum_is_exact() {
        // (1/2) ln 2 + (1/3) ln 3 = (1/6) ln(8 * 9)
        let s = lv(rat(1, 2), int(2)) + lv(rat(1, 3), int(3));
        assert_eq!(s, lv(rat(1, 6), int(72)));
        assert!((s.to_f64() - (0.5 * 2f64.ln() + 3f64.ln() / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let a = lv(rat(1, 1_000_003), int(7));
        let b = lv(rat(1, 999_983), int(11));
        assert!(matches!(a.checked_add_capped(&b, 1000), Err(Error::ExponentCap { .. })));
    }

    #[test]
    fn renders_known_constants() {
        assert_eq!(lv(int(1), int(2)).to_f64(), std::f64::consts::LN_2);
        assert!((lv(int(3), int(3)).to_f64() - 3.295_836_866_004_329).abs() < 1e-15);
        assert_eq!(LogValue::zero().to_f64(), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let v = lv(rat(-3, 2), rat(7, 5));
        let back = LogValue::from_json(&v.to_json()).unwrap();
        assert_eq!(back.coefficient(), v.coefficient());
        assert_eq!(back.base(), v.base());
    }

    fn small_logvalue() -> impl Strategy<Value = LogValue> {
        (-20i64..=20, 1i64..=6, 1i64..=40, 1i64..=40).prop_map(|(p, r, a, b)| lv(rat(p, r), rat(a, b)))
    }

    proptest! {
        #[test]
        fn compare_agrees_with_floats_when_gap_is_clear(a in small_logvalue(), b in small_logvalue()) {
            let (fa, fb) = (a.to_f64(), b.to_f64());
            if (fa - fb).abs() > 1e-9 {
                prop_assert_eq!(a.cmp(&b), fa.partial_cmp(&fb).unwrap());
            }
        }

        #[test]
        fn addition_is_exact_and_commutative(a in small_logvalue(), b in small_logvalue(), c in small_logvalue()) {
            let ab = &a + &b;
            prop_assert_eq!(&ab, &(&b + &a));
            prop_assert_eq!(&(&ab + &c), &(&a + &(&b + &c)));
            prop_assert_eq!(&(&ab - &b), &a);
            prop_assert!((ab.to_f64() - (a.to_f64() + b.to_f64())).abs() < 1e-9);
        }

        #[test]
        fn ordering_is_total_and_antisymmetric(a in small_logvalue(), b in small_logvalue()) {
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        }
    }
}
