//! Products of projective spaces and hypersurfaces in them: heights,
//! tangent lattices and freedom.
//!
//! The tangent lattice of a product point is the direct sum of the factor
//! tangent lattices. On a hypersurface `F = 0` it is the saturated kernel of
//! `dF` inside that direct sum, with the restricted metric.

mod descriptor;
mod epsilon;
mod fiber;

pub use descriptor::{Monomial, Polynomial, VarietyDescriptor, VarietyPoint};
pub use epsilon::{rationalize, ClassCheck, EpsRounding, EpsilonFunction, THRESHOLD_DENOM_BITS};
pub use fiber::{bt_fiber_points, fiber_decay_report, product_points, weighted_points, FiberPoint, FiberReport, Fibration};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{integer_kernel, IntMatrix, LogValue, Rational};
use crate::lattice::{newton_polygon_with, EuclideanLattice, NewtonOptions};
use crate::projective::{self, tangent_slopes, unscaled_quotient, FreedomValue, ProjectivePoint};

fn half_ln(s: BigInt) -> LogValue {
    LogValue::new(Rational::new(BigInt::one(), BigInt::from(2)), Rational::from_integer(s))
}

/// Anticanonical weights `n_k + 1 - d_k` of the factors (`d_k = 0` off
/// hypersurfaces).
pub fn anticanonical_weights(v: &VarietyDescriptor) -> Vec<i64> {
    let dims = v.factor_dims();
    let degs: Vec<u32> = match v {
        VarietyDescriptor::Hypersurface { multidegree, .. } => multidegree.clone(),
        _ => vec![0; dims.len()],
    };
    dims.iter().zip(degs).map(|(&n, d)| n as i64 + 1 - d as i64).collect()
}

/// Height used for bounds and reports.
///
/// Projective spaces and products: `Σ h(x_k)`, the degree of the direct-sum
/// tangent lattice. Hypersurfaces: `Σ w_k ln H_{n_k}(x_k)` with
/// `H_n = S^{(n+1)/2}` and the anticanonical weights `w_k`; on the cubic
/// bundle `Σ y_i x_i^3 = 0` this is `ln(H_3(x) H_3(y)^3)`.
pub fn product_height(v: &VarietyDescriptor, p: &VarietyPoint) -> LogValue {
    match v {
        VarietyDescriptor::Hypersurface { .. } => {
            let w = anticanonical_weights(v);
            p.factors.iter().zip(w).map(|(x, wk)| projective::height(x).mul_int(wk)).sum()
        }
        _ => p.factors.iter().map(projective::height).sum(),
    }
}

/// `Σ w_k (1/2) ln S_k`: the anticanonical height with the standard metrics.
/// Equals [`product_height`] on products.
pub fn anticanonical_height(v: &VarietyDescriptor, p: &VarietyPoint) -> LogValue {
    p.factors.iter().zip(anticanonical_weights(v)).map(|(x, w)| half_ln(x.norm_sq()).mul_int(w)).sum()
}

pub fn product_tangent_lattice(p: &VarietyPoint) -> EuclideanLattice {
    let mut it = p.factors.iter().map(projective::tangent_lattice);
    let first = it.next().expect("at least one factor");
    it.fold(first, |acc, t| acc.direct_sum(&t))
}

/// `N min_k μ_min(T_k) / Σ h_k`, zero if some `h_k <= 0`.
pub fn product_freedom(p: &VarietyPoint, opts: &NewtonOptions) -> Result<FreedomValue> {
    let hs: Vec<LogValue> = p.factors.iter().map(projective::height).collect();
    let total: LogValue = hs.iter().cloned().sum();
    if hs.iter().any(|h| !h.is_positive()) {
        return Ok(FreedomValue::zero(total));
    }
    let mut mu: Option<LogValue> = None;
    for x in &p.factors {
        let m = tangent_slopes(x, opts)?.mu_min;
        if mu.as_ref().map_or(true, |cur| &m < cur) {
            mu = Some(m);
        }
    }
    let n: usize = p.factors.iter().map(ProjectivePoint::dim).sum();
    Ok(FreedomValue::from_slope(n, &mu.expect("nonempty"), total))
}

/// Freedom read off the Newton polygon of the direct sum itself.
pub fn product_freedom_direct(p: &VarietyPoint, opts: &NewtonOptions) -> Result<FreedomValue> {
    let t = product_tangent_lattice(p);
    let total: LogValue = p.factors.iter().map(projective::height).sum();
    if p.factors.iter().any(|x| !projective::height(x).is_positive()) {
        return Ok(FreedomValue::zero(total));
    }
    let poly = newton_polygon_with(&t, opts)?;
    Ok(FreedomValue::from_slope(t.rank(), &poly.mu_min(), total))
}

/// Tangent lattice of a smooth point of a hypersurface, with the basis of
/// the kernel inside the ambient tangent lattice.
pub fn hypersurface_tangent_lattice_with_basis(v: &VarietyDescriptor, p: &VarietyPoint) -> Result<(EuclideanLattice, IntMatrix)> {
    let VarietyDescriptor::Hypersurface { equation, .. } = v else {
        return Err(Error::Domain("not a hypersurface".into()));
    };
    p.validate(v)?;
    let grad = equation.gradient(&p.factors);
    if grad.iter().flatten().all(Zero::is_zero) {
        return Err(Error::CriticalPoint);
    }
    let mut ambient: Option<EuclideanLattice> = None;
    let mut row: Vec<BigInt> = Vec::new();
    for (x, g) in p.factors.iter().zip(&grad) {
        let (q, lifts) = unscaled_quotient(x);
        let t = q.scale(&Rational::new(BigInt::one(), x.norm_sq()))?;
        for j in 0..lifts.nrows() {
            row.push(lifts.row(j).iter().zip(g).map(|(a, b)| a * b).sum());
        }
        ambient = Some(match ambient {
            None => t,
            Some(a) => a.direct_sum(&t),
        });
    }
    let ambient = ambient.expect("at least one factor");
    // Euler: x·∇_k F = d_k F(x) = 0, so dF factors through the tangent space
    if row.iter().all(Zero::is_zero) {
        return Err(Error::CriticalPoint);
    }
    let mut m = IntMatrix::empty(row.len());
    m.push_row(&row);
    let kernel = integer_kernel(&m);
    let lattice = ambient.sublattice(&kernel, false)?;
    Ok((lattice, kernel))
}

pub fn hypersurface_tangent_lattice(v: &VarietyDescriptor, p: &VarietyPoint) -> Result<EuclideanLattice> {
    Ok(hypersurface_tangent_lattice_with_basis(v, p)?.0)
}

/// `deg T_V - anticanonical_height`.
pub fn height_defect(v: &VarietyDescriptor, p: &VarietyPoint) -> Result<LogValue> {
    let t = hypersurface_tangent_lattice(v, p)?;
    Ok(t.degree().checked_sub(&anticanonical_height(v, p))?)
}

/// Freedom with its ingredients.
#[derive(Debug, Clone)]
pub struct VarietyFreedom {
    /// [`product_height`] of the point.
    pub height: LogValue,
    /// Degree of the tangent lattice; the freedom denominator.
    pub tangent_degree: LogValue,
    pub mu_min: LogValue,
    pub mu_max: LogValue,
    pub freedom: FreedomValue,
    /// Basis (rows, tangent-lattice coordinates) of the destabilizing
    /// sublattice at the last hull vertex before the final slope; empty when
    /// the lattice is semistable.
    pub witness: IntMatrix,
}

impl VarietyFreedom {
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = (0..self.witness.nrows()).map(|r| self.witness.row(r).iter().map(ToString::to_string).collect()).collect();
        json!({
            "h": self.height.to_json(),
            "tangent_degree": self.tangent_degree.to_json(),
            "mu_min": self.mu_min.to_json(),
            "mu_max": self.mu_max.to_json(),
            "freedom": self.freedom.to_json(),
            "witness": rows,
        })
    }
}

/// Freedom of a point on any supported variety. Hypersurface freedom uses
/// the intrinsic height `deg T_V`.
pub fn variety_freedom(v: &VarietyDescriptor, p: &VarietyPoint, opts: &NewtonOptions) -> Result<VarietyFreedom> {
    p.validate(v)?;
    let lattice = match v {
        VarietyDescriptor::Projective { .. } => projective::tangent_lattice(&p.factors[0]),
        VarietyDescriptor::Product { .. } => product_tangent_lattice(p),
        VarietyDescriptor::Hypersurface { .. } => hypersurface_tangent_lattice(v, p)?,
    };
    let poly = newton_polygon_with(&lattice, opts)?;
    let tangent_degree = poly.degree();
    let freedom = match v {
        VarietyDescriptor::Product { .. } => product_freedom(p, opts)?,
        _ => FreedomValue::from_slope(lattice.rank(), &poly.mu_min(), tangent_degree.clone()),
    };
    let n = lattice.rank();
    let last = poly.vertices.iter().copied().filter(|&i| i < n).max().unwrap_or(0);
    let witness = if last == 0 { IntMatrix::empty(n) } else { poly.witnesses[last].clone() };
    Ok(VarietyFreedom { height: product_height(v, p), tangent_degree, mu_min: poly.mu_min(), mu_max: poly.mu_max(), freedom, witness })
}
