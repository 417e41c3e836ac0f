//! Counting on `P^1 × P^1` by pairs of norms.
//!
//! A point `(x, y)` has `H = S(x) S(y)` and freedom
//! `2 ln min(S) / ln(S(x) S(y))`, so everything depends on the norm pair
//! `(k_1, k_2)`. The number of canonical points of `P^1` with `S = k` is
//! `r(k) = 2 · 2^{ω_odd(k)}` when `4 ∤ k` and no prime `≡ 3 (mod 4)`
//! divides `k`, else `0` (and `r(1) = 2`).

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{bin_of, is_free, reduce, Rows, Tally, NPARTS};
use crate::error::{Error, Result};
use crate::exact::{LogValue, Rational};
use crate::projective::FreedomValue;

/// Largest `B` accepted; the sieve holds one `u16` per norm.
const MAX_NORM: u64 = 1 << 28;

/// `r(k)` for `k <= m`; index 0 unused.
fn representation_counts(m: usize) -> Vec<u16> {
    let mut r = vec![2u16; m + 1];
    r[0] = 0;
    let mut composite = vec![false; m + 1];
    for p in 2..=m {
        if composite[p] {
            continue;
        }
        for q in (p * p..=m).step_by(p) {
            composite[q] = true;
        }
        match p % 4 {
            2 => {
                for q in (4..=m).step_by(4) {
                    r[q] = 0;
                }
            }
            3 => {
                for q in (p..=m).step_by(p) {
                    r[q] = 0;
                }
            }
            _ => {
                for q in (p..=m).step_by(p) {
                    r[q] = r[q].saturating_mul(2);
                }
            }
        }
    }
    r
}

fn ln_norm(k: u64) -> LogValue {
    LogValue::ln(Rational::from_integer(BigInt::from(k)))
}

pub(super) fn p1_squared(rows: &Rows) -> Result<Vec<Tally>> {
    // k1 k2 <= B iff (k1 k2)^2 <= floor(B^2)
    let kmax: Vec<u64> = rows
        .caps
        .iter()
        .map(|c| c.sqrt().to_u64().filter(|&k| k <= MAX_NORM).ok_or_else(|| Error::Domain(format!("grouped count supports B <= {MAX_NORM}"))))
        .collect::<Result<_>>()?;
    let top = *kmax.last().expect("nonempty grid");
    let r = representation_counts(top as usize);
    let parts: Vec<Vec<Tally>> = (0..NPARTS)
        .into_par_iter()
        .map(|part| {
            let mut acc = vec![Tally::new(); rows.len()];
            for k1 in (1..=top).skip(part).step_by(NPARTS) {
                let r1 = r[k1 as usize] as u64;
                if r1 == 0 {
                    continue;
                }
                for k2 in 1..=top / k1 {
                    let r2 = r[k2 as usize] as u64;
                    if r2 == 0 {
                        continue;
                    }
                    let k = k1 * k2;
                    let first = kmax.iter().position(|&m| k <= m).expect("k <= top");
                    let lo = k1.min(k2);
                    let exact = || FreedomValue::from_slope(2, &ln_norm(lo), ln_norm(k));
                    let approx = if lo == 1 { 0.0 } else { (2.0 * (lo as f64).ln() / (k as f64).ln()).min(1.0) };
                    let ge = |t: &Rational| exact().ge(t);
                    let bin = bin_of(approx, ge);
                    for j in first..rows.len() {
                        let free = is_free(approx, &rows.thresholds[j], rows.thresholds_f[j], ge);
                        acc[j].add(r1 * r2, free, approx, bin);
                    }
                }
            }
            acc
        })
        .collect();
    Ok(reduce(parts, rows.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_two_squares_counts() {
        let r = representation_counts(2000);
        for (k, &rk) in r.iter().enumerate().skip(1) {
            // brute force over canonical (a, b): a > 0, or a = 0 and b = 1
            let mut c = 0u16;
            let m = (k as f64).sqrt() as i64 + 1;
            for a in 0..=m {
                for b in -m..=m {
                    if a * a + b * b == k as i64 && num_integer::gcd(a, b) == 1 && (a > 0 || b == 1) {
                        c += 1;
                    }
                }
            }
            assert_eq!(rk, c, "k = {k}");
        }
    }
}
