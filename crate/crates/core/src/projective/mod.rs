//! Rational points of `P^n`: canonical coordinates, the anticanonical height
//! `H(x) = (Σ x_i^2)^{(n+1)/2}`, tangent lattices and freedom.

mod enumerate;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{complete_basis, hnf_saturate, IntMatrix, LogValue, Rational, SymmetricForm};
use crate::lattice::{newton_polygon_with, EuclideanLattice, NewtonOptions};

pub use enumerate::{enumerate_points, enumerate_points_partition, max_norm_sq, points_up_to_norm, PointStream};

/// A point of `P^n(Q)` with primitive integer coordinates, first nonzero
/// coordinate positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    coords: Vec<BigInt>,
}

impl ProjectivePoint {
    /// Normalizes any nonzero integer vector of length `n + 1 >= 2`.
    pub fn new(mut coords: Vec<BigInt>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidPoint("need at least two coordinates".into()));
        }
        let g = coords.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(Error::InvalidPoint("all coordinates are zero".into()));
        }
        let neg = coords.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        for x in coords.iter_mut() {
            *x = &*x / &g;
            if neg {
                *x = -std::mem::take(x);
            }
        }
        Ok(Self { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Caller guarantees canonical form.
    pub(crate) fn from_canonical_i64(coords: &[i64]) -> Self {
        Self { coords: coords.iter().map(|&x| BigInt::from(x)).collect() }
    }

    /// Parses `"x0:x1:...:xn"`; whitespace around entries is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(':')
            .map(|t| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coordinate {:?} in point {s:?}", t.trim()))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn coords_i64(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(|x| x.to_i64()).collect()
    }

    /// `S = Σ x_i^2`.
    pub fn norm_sq(&self) -> BigInt {
        self.coords.iter().map(|x| x * x).sum()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(":"))
    }
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// `h(x) = ((n+1)/2) ln S`.
pub fn height(x: &ProjectivePoint) -> LogValue {
    LogValue::new(Rational::new(BigInt::from(x.dim() as i64 + 1), BigInt::from(2)), Rational::from_integer(x.norm_sq()))
}

/// `Z^{n+1} / Z x` with the orthogonal-projection metric, together with the
/// lifts of its basis. Not yet twisted by `1/S`.
pub(crate) fn unscaled_quotient(x: &ProjectivePoint) -> (EuclideanLattice, IntMatrix) {
    let n = x.dim() + 1;
    let mut row = IntMatrix::empty(n);
    row.push_row(&x.coords);
    let lifts = complete_basis(&row).expect("primitive vector has a completion");
    let s = x.norm_sq();
    let dots: Vec<BigInt> = (0..n - 1).map(|i| lifts.row(i).iter().zip(&x.coords).map(|(a, b)| a * b).sum()).collect();
    let m = n - 1;
    let mut entries = vec![Rational::zero(); m * m];
    for i in 0..m {
        for j in i..m {
            let cc: BigInt = lifts.row(i).iter().zip(lifts.row(j)).map(|(a, b)| a * b).sum();
            let v = Rational::new(&s * cc - &dots[i] * &dots[j], s.clone());
            entries[j * m + i] = v.clone();
            entries[i * m + j] = v;
        }
    }
    let gram = SymmetricForm::new(m, entries).expect("symmetric by construction");
    (EuclideanLattice::new(gram).expect("quotient metric is definite"), lifts)
}

/// Tangent lattice `T_x P^n = D^∨ ⊗ (Z^{n+1} / D)`: the quotient metric scaled
/// by `1/S`. Its degree equals `h(x)`.
pub fn tangent_lattice(x: &ProjectivePoint) -> EuclideanLattice {
    let (q, _) = unscaled_quotient(x);
    q.scale(&Rational::new(BigInt::one(), x.norm_sq())).expect("S > 0")
}

/// `l(x) = numerator / denominator` with `numerator = n μ_min` (or zero) and
/// `denominator = h(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreedomValue {
    numerator: LogValue,
    denominator: LogValue,
}

impl FreedomValue {
    pub fn zero(denominator: LogValue) -> Self {
        Self { numerator: LogValue::zero(), denominator }
    }

    /// `n μ_min / h`, with the convention `l = 0` when `μ_min <= 0` or `h <= 0`.
    pub fn from_slope(n: usize, mu_min: &LogValue, h: LogValue) -> Self {
        if !mu_min.is_positive() || !h.is_positive() {
            return Self::zero(h);
        }
        Self { numerator: mu_min.mul_int(n as i64), denominator: h }
    }

    pub(crate) fn from_parts(numerator: LogValue, denominator: LogValue) -> Self {
        if !numerator.is_positive() || !denominator.is_positive() {
            return Self::zero(denominator);
        }
        Self { numerator, denominator }
    }

    pub fn numerator(&self) -> &LogValue {
        &self.numerator
    }

    pub fn denominator(&self) -> &LogValue {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (self.numerator.to_f64() / self.denominator.to_f64()).clamp(0.0, 1.0)
    }

    /// [`to_f64`](Self::to_f64) through plain `f64` logarithms.
    pub fn approx(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (self.numerator.approx() / self.denominator.approx()).clamp(0.0, 1.0)
    }

    /// Exact `l >= t`.
    pub fn ge(&self, t: &Rational) -> bool {
        if !t.is_positive() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        self.numerator >= self.denominator.scale(t)
    }

    /// Exact `l < t`.
    pub fn lt(&self, t: &Rational) -> bool {
        !self.ge(t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "numerator": self.numerator.to_json(),
            "denominator": self.denominator.to_json(),
            "value": self.to_f64(),
        })
    }
}

impl fmt::Display for FreedomValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

/// Slopes of the tangent lattice needed for reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSlopes {
    pub mu_min: LogValue,
    pub mu_max: LogValue,
}

pub fn tangent_slopes(x: &ProjectivePoint, opts: &NewtonOptions) -> Result<PointSlopes> {
    if let Some(s) = fast_slopes(x) {
        return Ok(s);
    }
    let p = newton_polygon_with(&tangent_lattice(x), opts)?;
    Ok(PointSlopes { mu_min: p.mu_min(), mu_max: p.mu_max() })
}

/// Closed forms for `n <= 2`. On `P^1` the tangent lattice has rank one. On
/// `P^2`, `m(1)` of the unscaled quotient is `-ln λ_1` and the vectors
/// `v × x` run over `x^⊥ ∩ Z^3`, so `λ_1^2 = |a|^2 / S` for a shortest
/// `a ⊥ x`; after the twist, `μ_min = min(ln(|a|^2 S)/2, (3/4) ln S)`.
fn fast_slopes(x: &ProjectivePoint) -> Option<PointSlopes> {
    match x.dim() {
        1 => {
            let h = height(x);
            Some(PointSlopes { mu_min: h.clone(), mu_max: h })
        }
        2 => {
            let c = x.coords_i64()?;
            if c.iter().any(|v| v.unsigned_abs() > 1 << 20) {
                return None;
            }
            let s = c.iter().map(|v| v * v).sum::<i64>();
            let a2 = shortest_orthogonal_norm(&c);
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            let h = height(x);
            // compare |a|^4 S^2 with S^3
            let (mu_min, mu_max) = if (a2 as i128) * (a2 as i128) < s as i128 {
                let m = LogValue::new(half, Rational::from_integer(BigInt::from(a2) * BigInt::from(s)));
                let rest = h.checked_sub(&m).ok()?;
                (m, rest)
            } else {
                let m = h.div_int(2);
                (m.clone(), m)
            };
            Some(PointSlopes { mu_min, mu_max })
        }
        _ => None,
    }
}

/// `min |a|^2` over nonzero integer `a` orthogonal to a primitive `x ∈ Z^3`.
pub(crate) fn shortest_orthogonal_norm(x: &[i64]) -> i64 {
    let (x0, x1, x2) = (x[0] as i128, x[1] as i128, x[2] as i128);
    let (mut u, mut v): ([i128; 3], [i128; 3]) = if x0 == 0 && x1 == 0 {
        ([1, 0, 0], [0, 1, 0])
    } else {
        let e = x0.extended_gcd(&x1);
        let g = e.gcd;
        // det check: (x1/g, -x0/g, 0) × (p x2, q x2, -g) = x
        ([x1 / g, -x0 / g, 0], [e.x * x2, e.y * x2, -g])
    };
    let dot = |a: &[i128; 3], b: &[i128; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    // Lagrange–Gauss reduction
    loop {
        if dot(&u, &u) > dot(&v, &v) {
            std::mem::swap(&mut u, &mut v);
        }
        let uu = dot(&u, &u);
        let uv = dot(&u, &v);
        let q = Integer::div_floor(&(2 * uv + uu), &(2 * uu));
        if q == 0 {
            break;
        }
        for k in 0..3 {
            v[k] -= q * u[k];
        }
        if dot(&v, &v) >= uu {
            break;
        }
    }
    dot(&u, &u).min(dot(&v, &v)) as i64
}

/// Freedom `l(x) = n μ_min(T_x) / h(x)`.
pub fn freedom(x: &ProjectivePoint) -> FreedomValue {
    freedom_with(x, &NewtonOptions::default()).expect("default rank cap covers P^n for n <= 6")
}

pub fn freedom_with(x: &ProjectivePoint, opts: &NewtonOptions) -> Result<FreedomValue> {
    let h = height(x);
    if h.is_zero() {
        return Ok(FreedomValue::zero(h));
    }
    let s = tangent_slopes(x, opts)?;
    Ok(FreedomValue::from_slope(x.dim(), &s.mu_min, h))
}

/// Freedom read off the full Newton polygon of the tangent lattice, with no
/// closed-form shortcuts.
pub fn freedom_via_polygon(x: &ProjectivePoint, opts: &NewtonOptions) -> Result<FreedomValue> {
    let h = height(x);
    if h.is_zero() {
        return Ok(FreedomValue::zero(h));
    }
    let p = newton_polygon_with(&tangent_lattice(x), opts)?;
    Ok(FreedomValue::from_slope(x.dim(), &p.mu_min(), h))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaResult {
    pub value: FreedomValue,
    /// Basis (rows in `Z^{n+1}`, HNF) of the minimizing subspace `F ⊇ D`.
    pub witness: IntMatrix,
    pub codim: usize,
}

/// `l(x) = n/(n+1) + min_F (-n deg F / (codim F · h(x)))` over proper
/// saturated `F` containing the line of `x`.
///
/// Subspaces `F ⊇ D` correspond to saturated sublattices of `E/D`, and
/// `deg F = deg D + deg(F/D)` with `deg D = -(1/2) ln S`, so the best `F` of
/// each dimension comes from the raw maxima of the quotient's polygon.
pub fn freedom_formula(x: &ProjectivePoint) -> Result<FormulaResult> {
    freedom_formula_with(x, &NewtonOptions::default())
}

pub fn freedom_formula_with(x: &ProjectivePoint, opts: &NewtonOptions) -> Result<FormulaResult> {
    let n = x.dim();
    let h = height(x);
    if h.is_zero() {
        return Err(Error::FreedomUndefined);
    }
    let s = Rational::from_integer(x.norm_sq());
    let half_ln_s = LogValue::new(Rational::new(BigInt::one(), BigInt::from(2)), s.clone());
    let (q, lifts) = unscaled_quotient(x);
    let poly = newton_polygon_with(&q, opts)?;
    let mut best: Option<(LogValue, usize)> = None;
    for c in 1..=n {
        // -deg F / c for the best F of codimension c
        let term = half_ln_s.checked_sub(&poly.maxima[n - c])?.div_int(c as i64);
        if best.as_ref().map_or(true, |(b, _)| &term < b) {
            best = Some((term, c));
        }
    }
    let (term, codim) = best.expect("n >= 1");
    let numerator = LogValue::new(Rational::new(BigInt::from(n as i64), BigInt::from(2)), s).checked_add(&term.mul_int(n as i64))?;
    let w = &poly.witnesses[n - codim];
    let mut gens = IntMatrix::empty(n + 1);
    gens.push_row(x.coords());
    for r in 0..w.nrows() {
        let mut v = vec![BigInt::zero(); n + 1];
        for (j, y) in w.row(r).iter().enumerate() {
            for (vi, lj) in v.iter_mut().zip(lifts.row(j)) {
                *vi += y * lj;
            }
        }
        gens.push_row(&v);
    }
    let witness = hnf_saturate(&gens)?;
    Ok(FormulaResult { value: FreedomValue::from_parts(numerator, h), witness, codim })
}

/// One CSV row: coordinates, `H`, `h`, `μ_min`, `μ_max`, freedom.
#[derive(Debug, Clone)]
pub struct PointRecord {
    pub point: ProjectivePoint,
    pub height: LogValue,
    pub slopes: PointSlopes,
    pub freedom: FreedomValue,
}

impl PointRecord {
    pub fn compute(x: &ProjectivePoint, opts: &NewtonOptions) -> Result<Self> {
        let h = height(x);
        let slopes = tangent_slopes(x, opts)?;
        let freedom = FreedomValue::from_slope(x.dim(), &slopes.mu_min, h.clone());
        Ok(Self { point: x.clone(), height: h, slopes, freedom })
    }

    pub const CSV_HEADER: &'static str = "coords,H,h,mu_min,mu_max,freedom_float";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.point,
            fmt_f64(self.height.to_f64().exp()),
            fmt_f64(self.height.to_f64()),
            fmt_f64(self.slopes.mu_min.to_f64()),
            fmt_f64(self.slopes.mu_max.to_f64()),
            fmt_f64(self.freedom.to_f64()),
        )
    }
}

/// Shortest round-trip decimal rendering.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn pt(c: &[i64]) -> ProjectivePoint {
        ProjectivePoint::from_i64(c).unwrap()
    }

    #[test]
    fn canonical_parse_and_print() {
        let p = ProjectivePoint::parse(" -2 : -4 : 6 ").unwrap();
        assert_eq!(p.to_string(), "1:2:-3");
        assert_eq!(ProjectivePoint::parse("0:-3").unwrap().to_string(), "0:1");
        assert!(ProjectivePoint::parse("0:0").is_err());
        assert!(ProjectivePoint::parse("1").is_err());
        assert!(matches!(ProjectivePoint::parse("1:x"), Err(Error::Parse(_))));
    }

    #[test]
    fn height_examples() {
        assert!(height(&pt(&[1, 0, 0, 0])).is_zero());
        assert_eq!(height(&pt(&[1, 2])), LogValue::ln_int(5));
        assert_eq!(height(&pt(&[1, 2, 2])), LogValue::new(int(3), int(3)));
    }

    #[test]
    fn tangent_lattice_examples() {
        assert_eq!(tangent_lattice(&pt(&[1, 0])).gram().entries(), &[int(1)]);
        let t = tangent_lattice(&pt(&[1, 2]));
        assert_eq!(t.gram().entries(), &[rat(1, 25)]);
        assert_eq!(t.degree(), LogValue::ln_int(5));
        let t = tangent_lattice(&pt(&[1, 2, 2]));
        assert_eq!(t.gram().entries(), &[rat(5, 81), rat(-4, 81), rat(-4, 81), rat(5, 81)]);
        assert_eq!(t.degree(), LogValue::new(int(3), int(3)));
    }

    #[test]
    fn tangent_degree_is_height() {
        for c in [[3i64, -5, 7, 0], [2, 3, 5, 7], [0, 0, 4, 9], [6, 10, 15, 1]] {
            let x = pt(&c);
            assert_eq!(tangent_lattice(&x).degree(), height(&x), "{x}");
        }
        let x = pt(&[2, 3]);
        assert_eq!(tangent_lattice(&x).degree(), height(&x));
    }

    #[test]
    fn freedom_examples() {
        assert_eq!(freedom(&pt(&[1, 2])).to_f64(), 1.0);
        assert!(freedom(&pt(&[1, 2])).ge(&int(1)));
        assert!(freedom(&pt(&[1, 0, 0])).is_zero());
        let f = freedom(&pt(&[1, 2, 2]));
        let expect = (2.0 * 3f64.ln() + 2f64.ln()) / (3.0 * 3f64.ln());
        assert!((f.to_f64() - expect).abs() < 1e-15);
        assert!((f.to_f64() - 0.8770).abs() < 5e-5);
        assert_eq!(f.numerator(), &(LogValue::new(int(2), int(3)) + LogValue::ln_int(2)));
    }

    #[test]
    fn formula_examples() {
        let r = freedom_formula(&pt(&[1, 2])).unwrap();
        assert_eq!(r.value, freedom(&pt(&[1, 2])));
        assert_eq!(r.witness, IntMatrix::from_i64(&[&[1, 2]]));
        let r = freedom_formula(&pt(&[1, 2, 2])).unwrap();
        assert_eq!(r.codim, 1);
        assert_eq!(r.witness, hnf_saturate(&IntMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 1]])).unwrap());
        assert_eq!(r.value, freedom(&pt(&[1, 2, 2])));
        assert_eq!(freedom_formula(&pt(&[0, 1, 0])), Err(Error::FreedomUndefined));
    }

    #[test]
    fn fast_path_matches_polygon() {
        let opts = NewtonOptions::default();
        for c in [[1i64, 2, 2], [0, 3, 4], [1, 1, 1], [2, 3, 6], [5, 0, 0], [7, 11, 13], [0, 0, 1], [9, -4, 1]] {
            let x = pt(&c);
            assert_eq!(freedom(&x), freedom_via_polygon(&x, &opts).unwrap(), "{x}");
        }
    }

    #[test]
    fn orthogonal_shortest_vector_by_scan() {
        for c in [[1i64, 2, 2], [3, 5, 7], [0, 2, 3], [0, 0, 1], [12, -5, 7], [1, 100, 1000]] {
            let mut best = i64::MAX;
            for a in -40i64..=40 {
                for b in -40i64..=40 {
                    // solve for the third coordinate when possible
                    for d in -40i64..=40 {
                        if (a, b, d) != (0, 0, 0) && a * c[0] + b * c[1] + d * c[2] == 0 {
                            best = best.min(a * a + b * b + d * d);
                        }
                    }
                }
            }
            assert_eq!(shortest_orthogonal_norm(&c), best, "{c:?}");
        }
    }

    #[test]
    fn threshold_comparisons_are_exact() {
        let f = freedom(&pt(&[1, 2, 2]));
        assert!(f.ge(&rat(8769, 10000)));
        assert!(f.lt(&rat(8770, 10000)));
        assert!(f.ge(&rat(2, 3)));
        assert!(FreedomValue::zero(LogValue::zero()).lt(&rat(1, 100)));
        assert!(FreedomValue::zero(LogValue::zero()).ge(&int(0)));
    }

    #[test]
    fn generic_line_tends_to_two_thirds() {
        // on x0 + x1 + x2 = 0 the shortest orthogonal vector is (1,1,1), so
        // l = (2/3)(1 + ln 3 / ln S): above 2/3 and decreasing in S
        let mut last = f64::INFINITY;
        for k in 2i64..200 {
            let c = [1, k, -1 - k];
            assert_eq!(shortest_orthogonal_norm(&c), 3);
            let s = (1 + k * k + (1 + k) * (1 + k)) as f64;
            let gap = freedom(&pt(&c)).to_f64() - 2.0 / 3.0;
            assert!((gap - 2.0 / 3.0 * 3f64.ln() / s.ln()).abs() < 1e-12, "k = {k}");
            assert!(gap > 0.0 && gap < last);
            last = gap;
        }
    }

    #[test]
    fn record_row() {
        let r = PointRecord::compute(&pt(&[1, 2]), &NewtonOptions::default()).unwrap();
        assert_eq!(r.csv_row(), format!("1:2,{:?},{:?},{:?},{:?},1.0", 5f64.ln().exp(), 5f64.ln(), 5f64.ln(), 5f64.ln()));
    }
}
