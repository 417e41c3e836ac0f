//! Least-squares fits of `N(B) ≈ C B^a (ln B)^{b-1}` on logarithms.

use serde_json::json;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub c: f64,
    pub a: f64,
    /// `1` for the plain power law.
    pub b: f64,
    /// `ln N - model` at each grid point.
    pub residuals: Vec<f64>,
    pub residual_norm: f64,
}

impl Fit {
    pub fn to_json(&self) -> serde_json::Value {
        json!({"C": self.c, "a": self.a, "b": self.b, "residuals": self.residuals, "residual_norm": self.residual_norm})
    }
}

/// Least squares on `ln N = ln C + a ln B + (b - 1) ln ln B`. Needs at
/// least four points with `B > e` and `N > 0`.
pub fn fit_asymptotic(points: &[(f64, f64)]) -> Result<Fit> {
    let rows = log_rows(points, 4)?;
    if rows.iter().any(|r| r.0 <= 1.0) {
        return Err(Error::DegenerateGrid("the ln ln B column needs B > e".into()));
    }
    let design: Vec<Vec<f64>> = rows.iter().map(|r| vec![1.0, r.0, r.0.ln()]).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let beta = least_squares(&design, &y)?;
    Ok(finish(&design, &y, beta[0], beta[1], beta[2] + 1.0, &beta))
}

/// Least squares on `ln N = ln C + a ln B` (so `b = 1`). Needs at least two
/// distinct bounds.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<Fit> {
    let rows = log_rows(points, 2)?;
    let design: Vec<Vec<f64>> = rows.iter().map(|r| vec![1.0, r.0]).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let beta = least_squares(&design, &y)?;
    Ok(finish(&design, &y, beta[0], beta[1], 1.0, &beta))
}

/// `(ln B, ln N)` rows after validation.
fn log_rows(points: &[(f64, f64)], min: usize) -> Result<Vec<(f64, f64)>> {
    if points.len() < min {
        return Err(Error::DegenerateGrid(format!("need at least {min} grid points, got {}", points.len())));
    }
    points
        .iter()
        .map(|&(b, n)| {
            if !(b > 1.0) || !(n > 0.0) || !b.is_finite() || !n.is_finite() {
                Err(Error::DegenerateGrid(format!("grid point (B = {b}, N = {n}) needs B > 1 and N > 0")))
            } else {
                Ok((b.ln(), n.ln()))
            }
        })
        .collect()
}

fn finish(design: &[Vec<f64>], y: &[f64], ln_c: f64, a: f64, b: f64, beta: &[f64]) -> Fit {
    let residuals: Vec<f64> = design.iter().zip(y).map(|(row, yi)| yi - row.iter().zip(beta).map(|(x, c)| x * c).sum::<f64>()).collect();
    let residual_norm = residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
    Fit { c: ln_c.exp(), a, b, residuals, residual_norm }
}

/// Householder QR least squares; rank deficiency is an error.
fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let m = design.len();
    let k = design[0].len();
    let mut a: Vec<Vec<f64>> = design.to_vec();
    let mut rhs = y.to_vec();
    let scale: Vec<f64> = (0..k).map(|j| (0..m).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt()).collect();
    for j in 0..k {
        let norm = (j..m).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt();
        if norm <= 1e-10 * scale[j].max(1.0) {
            return Err(Error::DegenerateGrid("design matrix is rank deficient".into()));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..m).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        for c in j..k {
            let d: f64 = (j..m).map(|i| v[i - j] * a[i][c]).sum::<f64>() * 2.0 / vv;
            for i in j..m {
                a[i][c] -= d * v[i - j];
            }
        }
        let d: f64 = (j..m).map(|i| v[i - j] * rhs[i]).sum::<f64>() * 2.0 / vv;
        for i in j..m {
            rhs[i] -= d * v[i - j];
        }
    }
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let s: f64 = (j + 1..k).map(|c| a[j][c] * beta[c]).sum();
        beta[j] = (rhs[j] - s) / a[j][j];
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_seven_one_three() {
        let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5, 1e6, 1e7].iter().map(|&b: &f64| (b, 7.0 * b * b.ln().powi(2))).collect();
        let f = fit_asymptotic(&pts).unwrap();
        assert!((f.c / 7.0 - 1.0).abs() < 1e-6, "{f:?}");
        assert!((f.a - 1.0).abs() < 1e-6);
        assert!((f.b / 3.0 - 1.0).abs() < 1e-6);
        assert!(f.residual_norm < 1e-9);
    }

    #[test]
    fn degenerate_grids() {
        let three: Vec<(f64, f64)> = [1e3, 1e4, 1e5].iter().map(|&b| (b, b)).collect();
        assert!(matches!(fit_asymptotic(&three), Err(Error::DegenerateGrid(_))));
        let repeated = vec![(1e4, 5.0), (1e4, 6.0), (1e4, 7.0), (1e4, 8.0)];
        assert!(matches!(fit_asymptotic(&repeated), Err(Error::DegenerateGrid(_))));
        let zero = vec![(1e3, 0.0), (1e4, 6.0), (1e5, 7.0), (1e6, 8.0)];
        assert!(matches!(fit_asymptotic(&zero), Err(Error::DegenerateGrid(_))));
        assert!(matches!(fit_power_law(&[(10.0, 3.0)]), Err(Error::DegenerateGrid(_))));
    }

    #[test]
    fn power_law() {
        let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5, 1e6].iter().map(|&b: &f64| (b, 2.5 * b.powf(2.0 / 3.0))).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.a - 2.0 / 3.0).abs() < 1e-12 && (f.c - 2.5).abs() < 1e-9 && f.b == 1.0);
    }

    proptest! {
        #[test]
        fn exact_models_are_recovered(c in 0.1f64..50.0, a in 0.3f64..2.0, b in 0.0f64..4.0) {
            let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5, 1e6, 1e7].iter().map(|&x: &f64| (x, c * x.powf(a) * x.ln().powf(b - 1.0))).collect();
            let f = fit_asymptotic(&pts).unwrap();
            prop_assert!((f.a - a).abs() < 1e-6 && (f.b - b).abs() < 1e-5 && (f.c / c - 1.0).abs() < 1e-5);
        }
    }
}
