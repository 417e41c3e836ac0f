//! Point enumeration on products and in fibers, and the fiber decay report.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde_json::json;

use super::epsilon::{EpsRounding, EpsilonFunction};
use super::{product_freedom, product_height, variety_freedom, VarietyDescriptor, VarietyPoint};
use crate::error::{Error, Result};
use crate::exact::{format_rational, rational_to_f64, LogValue, Rational};
use crate::lattice::NewtonOptions;
use crate::projective::{self, fmt_f64, points_up_to_norm, FreedomValue, ProjectivePoint};

/// Largest `S` with `S^e <= budget`.
fn max_norm_for_budget(e: usize, budget: &BigInt) -> u64 {
    if budget < &BigInt::one() {
        return 0;
    }
    let mut s = budget.nth_root(e as u32);
    while num_traits::pow(s.clone(), e) > *budget {
        s -= 1;
    }
    while num_traits::pow(&s + 1u32, e) <= *budget {
        s += 1;
    }
    s.to_u64().unwrap_or(u64::MAX)
}

/// `S^e P den^2 <= num^2` iff `S^e <= floor(num^2 / (P den^2))`.
fn budget(b: &Rational, used: &BigInt) -> BigInt {
    (b.numer() * b.numer()) / (used * b.denom() * b.denom())
}

fn norm_list(n: usize, smax: u64) -> Result<Vec<(u64, Vec<i64>)>> {
    let mut s = points_up_to_norm(n, smax, 0, 1)?;
    Ok(std::iter::from_fn(|| s.next_raw()).collect())
}

/// All points of `P^{n_1} × ... × P^{n_k}` with `Π H(x_k) <= B`, sorted by
/// `(Π S_k^{n_k+1}, coords)`.
pub fn product_points(dims: &[usize], b: &Rational) -> Result<Vec<VarietyPoint>> {
    let exps: Vec<usize> = dims.iter().map(|n| n + 1).collect();
    weighted_points(dims, &exps, b)
}

/// All points with `Π S_k^{e_k} <= B^2`, sorted by `(Π S_k^{e_k}, coords)`.
pub fn weighted_points(dims: &[usize], exps: &[usize], b: &Rational) -> Result<Vec<VarietyPoint>> {
    if b < &Rational::one() {
        return Err(Error::Domain("height bound must be at least 1".into()));
    }
    if exps.len() != dims.len() || exps.contains(&0) {
        return Err(Error::Domain("every factor needs a positive height weight".into()));
    }
    let lists = dims
        .iter()
        .zip(exps)
        .map(|(&n, &e)| norm_list(n, max_norm_for_budget(e, &budget(b, &BigInt::one()))))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<(BigInt, Vec<Vec<i64>>)> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(k: usize, exps: &[usize], lists: &[Vec<(u64, Vec<i64>)>], b: &Rational, used: BigInt, cur: &mut Vec<Vec<i64>>, out: &mut Vec<(BigInt, Vec<Vec<i64>>)>) {
        if k == exps.len() {
            out.push((used, cur.clone()));
            return;
        }
        let smax = max_norm_for_budget(exps[k], &budget(b, &used));
        for (s, x) in lists[k].iter().take_while(|(s, _)| *s <= smax) {
            cur.push(x.clone());
            rec(k + 1, exps, lists, b, &used * num_traits::pow(BigInt::from(*s), exps[k]), cur, out);
            cur.pop();
        }
    }
    rec(0, exps, &lists, b, BigInt::one(), &mut Vec::new(), &mut out);
    out.sort();
    Ok(out.into_iter().map(|(_, xs)| VarietyPoint::new(xs.iter().map(|x| ProjectivePoint::from_canonical_i64(x)).collect())).collect())
}

/// Canonical primitive `x` with `S(x) <= smax` on the cubic surface
/// `Σ y_i x_i^3 = 0`, sorted by `(S, coords)`. Needs `y_3 != 0`.
pub fn bt_fiber_points(y: &[i64; 4], smax: u64) -> Vec<Vec<i64>> {
    let r = smax.sqrt() as i64;
    let y3 = y[3] as i128;
    let mut pts: Vec<(u64, Vec<i64>)> = (-r..=r)
        .into_par_iter()
        .flat_map_iter(|x0| {
            let mut local = Vec::new();
            let s0 = (x0 * x0) as u64;
            let r1 = (smax - s0).sqrt() as i64;
            for x1 in -r1..=r1 {
                let s1 = s0 + (x1 * x1) as u64;
                let r2 = (smax - s1).sqrt() as i64;
                for x2 in -r2..=r2 {
                    let s2 = s1 + (x2 * x2) as u64;
                    let part = y[0] as i128 * (x0 as i128).pow(3) + y[1] as i128 * (x1 as i128).pow(3) + y[2] as i128 * (x2 as i128).pow(3);
                    if part % y3 != 0 {
                        continue;
                    }
                    let t = -part / y3;
                    let c = t.cbrt();
                    if c * c * c != t {
                        continue;
                    }
                    let x3 = c as i64;
                    let s = s2 + (x3 * x3) as u64;
                    if s > smax || s == 0 {
                        continue;
                    }
                    let x = vec![x0, x1, x2, x3];
                    let first = x.iter().copied().find(|&v| v != 0).unwrap();
                    if first < 0 || x.iter().fold(0i64, |g, v| g.gcd(v)) != 1 {
                        continue;
                    }
                    local.push((s, x));
                }
            }
            local
        })
        .collect();
    pts.sort_unstable();
    pts.into_iter().map(|(_, x)| x).collect()
}

/// A fibration with its base point fixed by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fibration {
    /// `P^a × P^b -> P^b`.
    SecondProjection { fiber_dim: usize, base_dim: usize },
    /// The cubic bundle `Σ y_i x_i^3 = 0` over `P^3_y`.
    CubicBundle,
}

impl Fibration {
    pub fn for_variety(v: &VarietyDescriptor) -> Result<Self> {
        match v {
            VarietyDescriptor::Product { dims } if dims.len() == 2 => Ok(Self::SecondProjection { fiber_dim: dims[0], base_dim: dims[1] }),
            _ if *v == VarietyDescriptor::batyrev_tschinkel() => Ok(Self::CubicBundle),
            _ => Err(Error::Domain(format!("no fibration implemented for {}", v.name()))),
        }
    }

    pub fn variety(&self) -> VarietyDescriptor {
        match self {
            Self::SecondProjection { fiber_dim, base_dim } => VarietyDescriptor::Product { dims: vec![*fiber_dim, *base_dim] },
            Self::CubicBundle => VarietyDescriptor::batyrev_tschinkel(),
        }
    }

    /// `(dim X, dim Y)`.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Self::SecondProjection { fiber_dim, base_dim } => (fiber_dim + base_dim, *base_dim),
            Self::CubicBundle => (5, 3),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FiberPoint {
    pub point: VarietyPoint,
    /// Height of the point on the total space.
    pub height: LogValue,
    /// `h(x)` of the fiber coordinate in its own projective space.
    pub fiber_height: LogValue,
    pub freedom: FreedomValue,
    pub free: bool,
}

#[derive(Debug, Clone)]
pub struct FiberReport {
    pub fibration: Fibration,
    pub base: ProjectivePoint,
    pub bound: Rational,
    pub epsilon: EpsilonFunction,
    pub eps_value: f64,
    pub threshold: Rational,
    pub rounding: EpsRounding,
    /// Sorted by `(fiber_height, coords)`.
    pub points: Vec<FiberPoint>,
    /// `m / (n ε)` with the rationalized `ε`.
    pub exponent: Rational,
    /// `h(y)` of the base point in its projective space.
    pub base_height: LogValue,
    /// Largest `h(x, y) - exponent · h(y)` over free points.
    pub fitted_log_c: Option<f64>,
    /// `(T, max{l(x) : h(x) >= T})` at each distinct enumerated `T`.
    pub envelope: Vec<(f64, f64)>,
    /// Largest freedom per height decile (by count); empty deciles skipped.
    pub decile_max: Vec<f64>,
}

impl FiberReport {
    pub fn free_count(&self) -> usize {
        self.points.iter().filter(|p| p.free).count()
    }

    pub fn max_free_height(&self) -> Option<&LogValue> {
        self.points.iter().filter(|p| p.free).map(|p| &p.height).max()
    }

    pub fn envelope_nonincreasing(&self) -> bool {
        self.envelope.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    /// Decile maxima nonincreasing from the second decile on.
    pub fn deciles_nonincreasing(&self) -> bool {
        self.decile_max.iter().skip(1).collect::<Vec<_>>().windows(2).all(|w| w[1] <= w[0])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (m, n) = self.fibration.dims();
        json!({
            "variety": self.fibration.variety().to_json(),
            "base_point": self.base.to_string(),
            "bound": format_rational(&self.bound),
            "epsilon": {
                "alpha": format_rational(self.epsilon.alpha()),
                "value": self.eps_value,
                "threshold": format_rational(&self.threshold),
                "rounding": self.rounding.as_str(),
            },
            "dim_total": m,
            "dim_base": n,
            "exponent": format_rational(&self.exponent),
            "base_height": self.base_height.to_json(),
            "point_count": self.points.len(),
            "free_count": self.free_count(),
            "max_free_height": self.max_free_height().map(LogValue::to_json),
            "fitted_log_c": self.fitted_log_c,
            "envelope_nonincreasing": self.envelope_nonincreasing(),
            "deciles_nonincreasing": self.deciles_nonincreasing(),
            "decile_max": self.decile_max,
            "envelope": self.envelope.iter().map(|(t, l)| json!([t, l])).collect::<Vec<_>>(),
        })
    }

    pub const CSV_HEADER: &'static str = "point,h,fiber_h,freedom_float,free";

    pub fn csv_rows(&self) -> Vec<String> {
        self.points
            .iter()
            .map(|p| format!("{},{},{},{},{}", p.point, fmt_f64(p.height.to_f64()), fmt_f64(p.fiber_height.to_f64()), fmt_f64(p.freedom.to_f64()), u8::from(p.free)))
            .collect()
    }
}

/// Fiber points over `base` with height at most `B`, their freedoms and the
/// decay diagnostics.
pub fn fiber_decay_report(
    fibration: &Fibration,
    base: &ProjectivePoint,
    b: &Rational,
    eps: &EpsilonFunction,
    rounding: EpsRounding,
    opts: &NewtonOptions,
) -> Result<FiberReport> {
    let variety = fibration.variety();
    let (m, n) = fibration.dims();
    if base.dim() != n {
        return Err(Error::InvalidPoint(format!("base point must lie in P^{n}")));
    }
    let eps_value = eps.eval_at(b)?;
    let threshold = super::rationalize(eps_value, rounding);
    let base_height = projective::height(base);
    let fibers: Vec<VarietyPoint> = match fibration {
        Fibration::SecondProjection { fiber_dim, base_dim } => {
            let used = num_traits::pow(base.norm_sq(), base_dim + 1);
            let smax = max_norm_for_budget(fiber_dim + 1, &budget(b, &used));
            norm_list(*fiber_dim, smax)?
                .into_iter()
                .map(|(_, x)| VarietyPoint::new(vec![ProjectivePoint::from_canonical_i64(&x), base.clone()]))
                .collect()
        }
        Fibration::CubicBundle => {
            let y: [i64; 4] = base.coords_i64().and_then(|c| c.try_into().ok()).ok_or_else(|| Error::InvalidPoint("base coordinates too large".into()))?;
            if y.contains(&0) {
                return Err(Error::CriticalPoint);
            }
            // S_x^2 S_y^6 <= B
            let sy6 = num_traits::pow(base.norm_sq(), 6);
            let cap = b.numer() / (b.denom() * sy6);
            let smax = if cap < BigInt::one() { 0 } else { cap.sqrt().to_u64().ok_or_else(|| Error::Domain("bound too large".into()))? };
            bt_fiber_points(&y, smax).into_iter().map(|x| VarietyPoint::new(vec![ProjectivePoint::from_canonical_i64(&x), base.clone()])).collect()
        }
    };
    let points = fibers
        .into_par_iter()
        .map(|p| -> Result<FiberPoint> {
            let freedom = match fibration {
                Fibration::SecondProjection { .. } => product_freedom(&p, opts)?,
                Fibration::CubicBundle => variety_freedom(&variety, &p, opts)?.freedom,
            };
            let free = freedom.ge(&threshold);
            Ok(FiberPoint { height: product_height(&variety, &p), fiber_height: projective::height(&p.factors[0]), point: p, freedom, free })
        })
        .collect::<Result<Vec<_>>>()?;
    let exponent = Rational::from_integer(BigInt::from(m)) / (Rational::from_integer(BigInt::from(n)) * &threshold);
    let exp_f = rational_to_f64(&exponent);
    let fitted_log_c = points.iter().filter(|p| p.free).map(|p| p.height.to_f64() - exp_f * base_height.to_f64()).reduce(f64::max);
    // suffix maxima of freedom over distinct fiber heights
    let mut envelope: Vec<(f64, f64)> = Vec::new();
    let mut best = 0f64;
    let mut i = points.len();
    while i > 0 {
        let h = &points[i - 1].fiber_height;
        let mut j = i;
        while j > 0 && &points[j - 1].fiber_height == h {
            best = best.max(points[j - 1].freedom.to_f64());
            j -= 1;
        }
        envelope.push((h.to_f64(), best));
        i = j;
    }
    envelope.reverse();
    let total = points.len();
    let decile_max: Vec<f64> = (0..10)
        .filter_map(|k| {
            let (lo, hi) = (k * total / 10, (k + 1) * total / 10);
            points[lo..hi].iter().map(|p| p.freedom.to_f64()).reduce(f64::max)
        })
        .collect();
    Ok(FiberReport {
        fibration: fibration.clone(),
        base: base.clone(),
        bound: b.clone(),
        epsilon: eps.clone(),
        eps_value,
        threshold,
        rounding,
        points,
        exponent,
        base_height,
        fitted_log_c,
        envelope,
        decile_max,
    })
}
