//! The threshold family `ε(t) = min(1/2, max(1, ln ln t)^{-α})`, constant
//! `1/2` on `(1, e]`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{format_rational, rational_to_f64, LogValue, Rational};

/// Denominator bits of the rationalized threshold. Exact comparisons raise
/// point norms to powers of the denominator, so it stays small.
pub const THRESHOLD_DENOM_BITS: u32 = 16;

/// Direction in which `ε(B)` is rounded to a rational before comparing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsRounding {
    /// Toward zero: borderline points are counted as free.
    In,
    /// Away from zero.
    Out,
}

impl EpsRounding {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "in" => Ok(Self::In),
            "out" => Ok(Self::Out),
            _ => Err(Error::Parse(format!("eps rounding must be 'in' or 'out', got {s:?}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::In => "in",
            Self::Out => "out",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonFunction {
    alpha: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassCheck {
    pub nonincreasing: bool,
    pub in_range: bool,
    /// `(α', ln(t)^α' ε(t) nondecreasing on the grid)`.
    pub weighted: Vec<(f64, bool)>,
    pub sqrt_log_weighted: bool,
}

impl ClassCheck {
    pub fn passed(&self) -> bool {
        self.nonincreasing && self.in_range && self.sqrt_log_weighted && self.weighted.iter().all(|w| w.1)
    }
}

impl EpsilonFunction {
    pub fn new(alpha: Rational) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::Domain("alpha must be positive".into()));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    /// `ε(t)` for `t > 1`, from `ln t`.
    fn eval_ln(&self, ln_t: f64) -> f64 {
        if ln_t <= 1.0 {
            return 0.5;
        }
        let ll = ln_t.ln().max(1.0);
        ll.powf(-rational_to_f64(&self.alpha)).min(0.5)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 1.0) {
            return Err(Error::Domain(format!("epsilon needs t > 1, got {t}")));
        }
        Ok(self.eval_ln(t.ln()))
    }

    /// `ε(B)` for a rational bound, evaluated through `ln B` so huge bounds
    /// do not overflow.
    pub fn eval_at(&self, b: &Rational) -> Result<f64> {
        if b <= &Rational::from_integer(1.into()) {
            return Err(Error::Domain(format!("epsilon needs t > 1, got {}", format_rational(b))));
        }
        Ok(self.eval_ln(LogValue::ln(b.clone()).to_f64()))
    }

    /// `ε(B)` rounded to a multiple of `2^-16` in the given direction.
    pub fn threshold(&self, b: &Rational, rounding: EpsRounding) -> Result<Rational> {
        Ok(rationalize(self.eval_at(b)?, rounding))
    }

    /// Checks the class conditions on a sample grid: `ε` nonincreasing with
    /// values in `(0, 1/2]`, `ln(t)^α' ε(t)` nondecreasing for each sampled
    /// `α'`, and `ln(t)^{1/2} ε(t)` nondecreasing.
    ///
    /// The second condition is only asymptotic for the family: beyond the
    /// clamp `ln(t)^α' ε(t)` increases once `ln ln t > α/α'`, so a grid
    /// reaching past `exp(exp(2^{1/α}))` can fail it for small `α'`.
    pub fn class_check(&self, grid: &[f64], alphas: &[f64]) -> Result<ClassCheck> {
        let mut g: Vec<f64> = grid.to_vec();
        g.sort_by(f64::total_cmp);
        let vals = g.iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        // relative slack for libm rounding on the clamp plateau
        let tol = 1e-12;
        let nondecr = |w: &[f64]| w.windows(2).all(|p| p[1] >= p[0] * (1.0 - tol));
        let weighted_by = |a: f64| -> Vec<f64> { g.iter().zip(&vals).map(|(t, e)| t.ln().powf(a) * e).collect() };
        Ok(ClassCheck {
            nonincreasing: vals.windows(2).all(|p| p[1] <= p[0]),
            in_range: vals.iter().all(|&e| e > 0.0 && e <= 0.5),
            weighted: alphas.iter().map(|&a| (a, a > 0.0 && a <= 1.0 && nondecr(&weighted_by(a)))).collect(),
            sqrt_log_weighted: nondecr(&weighted_by(0.5)),
        })
    }

    /// `ε(B) <= ε(P) <= 2 ε(B)` for `P = B^s`, each sampled `s ∈ [1/2, 1]`.
    pub fn square_root_window_check(&self, bounds: &[f64], exponents: &[f64]) -> Result<bool> {
        for &b in bounds {
            let eb = self.eval(b)?;
            for &s in exponents {
                if !(0.5..=1.0).contains(&s) {
                    return Err(Error::Domain("window exponent must lie in [1/2, 1]".into()));
                }
                let ep = self.eval_ln(s * b.ln());
                if ep < eb || ep > 2.0 * eb {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"alpha": format_rational(&self.alpha)})
    }
}

/// Directed rounding of a float in `(0, 1]` to `k / 2^16`.
pub fn rationalize(v: f64, rounding: EpsRounding) -> Rational {
    let den = 1u64 << THRESHOLD_DENOM_BITS;
    let scaled = v * den as f64;
    let k = match rounding {
        EpsRounding::In => scaled.floor(),
        EpsRounding::Out => scaled.ceil(),
    };
    Rational::new(BigInt::from(k.to_i64().unwrap_or(0)), BigInt::from(den))
}
