//! Newton polygon (Harder–Narasimhan roof) of a Euclidean lattice.
//!
//! `M(i)` is the largest degree of a saturated rank-`i` sublattice, found
//! by exact enumeration of decomposable vectors in the exterior power
//! `Λ^i L`. Ranks above `n/2` are handled on the dual via
//! `M_L(i) = deg L + M_{L^∨}(n - i)`, which keeps exterior powers small.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::json;

use super::enumerate::{lll_reduce, short_vectors};
use super::EuclideanLattice;
use crate::error::{Error, Result};
use crate::exact::{format_rational, hermite_normal_form, hnf_saturate, integer_kernel, IntMatrix, LogValue, Rational, SymmetricForm};

pub const DEFAULT_RANK_CAP: usize = 6;

#[derive(Debug, Clone)]
pub struct NewtonOptions {
    pub rank_cap: usize,
    /// Multiplier applied to every certified search bound; values above 1
    /// only widen the search.
    pub bound_scale: Rational,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { rank_cap: DEFAULT_RANK_CAP, bound_scale: Rational::one() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub rank: usize,
    /// Raw maxima `M(i)` over saturated rank-`i` sublattices, `i = 0..=n`.
    pub maxima: Vec<LogValue>,
    /// Upper concave hull of `(i, M(i))` evaluated at `i = 0..=n`.
    pub roof: Vec<LogValue>,
    /// `μ_i = roof(i) - roof(i-1)`, nonincreasing.
    pub slopes: Vec<LogValue>,
    /// HNF basis of a sublattice realizing `M(i)`; lexicographically least on ties.
    pub witnesses: Vec<IntMatrix>,
    /// Final certified squared-norm bound of each search, `None` where no
    /// search was needed (`i = 0`, `i = n`). Ranks above `n/2` record the
    /// bound used on the dual.
    pub search_bounds: Vec<Option<Rational>>,
    /// Hull vertices (abscissae).
    pub vertices: Vec<usize>,
}

impl NewtonPolygon {
    pub fn mu_max(&self) -> LogValue {
        self.slopes.first().cloned().unwrap_or_else(LogValue::zero)
    }

    pub fn mu_min(&self) -> LogValue {
        self.slopes.last().cloned().unwrap_or_else(LogValue::zero)
    }

    pub fn degree(&self) -> LogValue {
        self.roof.last().cloned().unwrap_or_else(LogValue::zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rank": self.rank,
            "roof": self.roof.iter().map(LogValue::to_json).collect::<Vec<_>>(),
            "slopes": self.slopes.iter().map(LogValue::to_json).collect::<Vec<_>>(),
            "maxima": self.maxima.iter().map(LogValue::to_json).collect::<Vec<_>>(),
            "vertices": self.vertices,
            "witnesses": self.witnesses.iter().map(|w| w.row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "search_bounds": self.search_bounds.iter().map(|b| b.as_ref().map(format_rational)).collect::<Vec<_>>(),
        })
    }
}

pub fn newton_polygon(l: &EuclideanLattice) -> Result<NewtonPolygon> {
    newton_polygon_with(l, &NewtonOptions::default())
}

pub fn newton_polygon_with(l: &EuclideanLattice, opts: &NewtonOptions) -> Result<NewtonPolygon> {
    let n = l.rank();
    if n > opts.rank_cap {
        return Err(Error::RankCapExceeded { rank: n, cap: opts.rank_cap });
    }
    let mut maxima = Vec::with_capacity(n + 1);
    let mut witnesses = Vec::with_capacity(n + 1);
    let mut search_bounds = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (m, w, b) = max_degree(l, i, &opts.bound_scale)?;
        maxima.push(m);
        witnesses.push(w);
        search_bounds.push(b);
    }
    let vertices = upper_hull(&maxima)?;
    let roof = interpolate(&maxima, &vertices)?;
    let slopes = (1..=n).map(|i| roof[i].checked_sub(&roof[i - 1])).collect::<Result<Vec<_>>>()?;
    Ok(NewtonPolygon { rank: n, maxima, roof, slopes, witnesses, search_bounds, vertices })
}

/// `(μ_max, μ_min, μ_mean)`.
pub fn slopes_summary(l: &EuclideanLattice) -> Result<(LogValue, LogValue, LogValue)> {
    if l.rank() == 0 {
        return Err(Error::Domain("slopes of a rank-zero lattice".into()));
    }
    let p = newton_polygon(l)?;
    Ok((p.mu_max(), p.mu_min(), l.slope()))
}

fn det_to_degree(det: &Rational) -> LogValue {
    LogValue::new(Rational::new(BigInt::from(-1), BigInt::from(2)), det.clone())
}

fn max_degree(l: &EuclideanLattice, i: usize, scale: &Rational) -> Result<(LogValue, IntMatrix, Option<Rational>)> {
    let n = l.rank();
    if i == 0 {
        return Ok((LogValue::zero(), IntMatrix::empty(n), None));
    }
    if i == n {
        return Ok((l.degree(), IntMatrix::identity(n), None));
    }
    if i <= n - i {
        let s = search(l, i, scale)?;
        let w = s.witnesses.into_iter().next().expect("search yields a witness");
        return Ok((det_to_degree(&s.det), w, Some(s.bound)));
    }
    let dual = l.dual();
    let s = search(&dual, n - i, scale)?;
    let m = l.degree().checked_add(&det_to_degree(&s.det))?;
    let w = s.witnesses.iter().map(integer_kernel).min().expect("search yields a witness");
    Ok((m, w, Some(s.bound)))
}

struct Search {
    det: Rational,
    witnesses: BTreeSet<IntMatrix>,
    bound: Rational,
}

/// Minimal covolume² over saturated rank-`i` sublattices, all witnesses.
///
/// A rank-`i` sublattice `F` with basis `v_1..v_i` gives the decomposable
/// vector `w = v_1 ∧ ... ∧ v_i` of `Λ^i Z^n`, and `covol(F)^2 = |w|^2` for
/// the compound Gram matrix; primitive decomposable `w` are exactly the
/// saturated `F`. The search enumerates `Λ^i` up to the smallest covolume²
/// among `i`-subsets of an LLL basis. The minima of `Λ^i L` are products of
/// minima of `L` up to constants, so the enumeration stays small however
/// skewed `L` is.
fn search(l: &EuclideanLattice, i: usize, scale: &Rational) -> Result<Search> {
    let n = l.rank();
    let (u, reduced) = lll_reduce(l);
    let subsets = combinations(n, i);
    let m = subsets.len();
    let mut entries = vec![Rational::zero(); m * m];
    for a in 0..m {
        for b in a..m {
            let v = minor_det(&reduced, n, &subsets[a], &subsets[b]);
            entries[b * m + a] = v.clone();
            entries[a * m + b] = v;
        }
    }
    let seed = (0..m).map(|a| entries[a * m + a].clone()).min().expect("nonempty");
    let bound = seed * scale;
    let compound = EuclideanLattice::new(SymmetricForm::new(m, entries)?)?;
    let mut best: Option<Rational> = None;
    let mut witnesses = BTreeSet::new();
    for (w, q) in short_vectors(&compound, &bound) {
        if best.as_ref().is_some_and(|b| &q > b) {
            break;
        }
        if let Some(span) = decomposable_span(&w, &subsets, n, i) {
            let f = hnf_saturate(&hermite_normal_form(&span.mul(&u)))?;
            best = Some(q);
            witnesses.insert(f);
        }
    }
    let det = best.expect("the seed subset is decomposable and within the bound");
    Ok(Search { det, witnesses, bound })
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for t in start..n {
            cur.push(t);
            rec(t + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `det G[rows, cols]` for a dense row-major `n x n` matrix.
fn minor_det(g: &[Rational], n: usize, rows: &[usize], cols: &[usize]) -> Rational {
    let k = rows.len();
    let mut a: Vec<Vec<Rational>> = rows.iter().map(|&r| cols.iter().map(|&c| g[r * n + c].clone()).collect()).collect();
    let mut det = Rational::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..k {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for t in c..k {
                let v = &f * &a[c][t];
                a[r][t] -= v;
            }
        }
    }
    det
}

/// Span of the contractions `ι_J w` over `(i-1)`-subsets `J`, when it has
/// rank `i` (exactly when `w` is decomposable).
fn decomposable_span(w: &[BigInt], subsets: &[Vec<usize>], n: usize, i: usize) -> Option<IntMatrix> {
    let index: std::collections::HashMap<&[usize], usize> = subsets.iter().enumerate().map(|(t, s)| (s.as_slice(), t)).collect();
    let mut rows = IntMatrix::empty(n);
    for j in combinations(n, i - 1) {
        let mut c = vec![BigInt::zero(); n];
        let mut nonzero = false;
        for (k, ck) in c.iter_mut().enumerate() {
            if j.contains(&k) {
                continue;
            }
            let mut set = j.clone();
            let pos = set.partition_point(|&v| v < k);
            set.insert(pos, k);
            let coeff = &w[index[set.as_slice()]];
            if coeff.is_zero() {
                continue;
            }
            // moving e_k from the end to its sorted slot
            *ck = if (j.len() - pos) % 2 == 0 { coeff.clone() } else { -coeff };
            nonzero = true;
        }
        if nonzero {
            rows.push_row(&c);
        }
    }
    (rows.rank() == i).then_some(rows)
}

/// Upper concave hull of `(i, m[i])`; returns vertex abscissae.
fn upper_hull(m: &[LogValue]) -> Result<Vec<usize>> {
    let mut hull: Vec<usize> = Vec::with_capacity(m.len());
    for k in 0..m.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when slope(a,b) <= slope(b,k)
            let left = m[b].checked_sub(&m[a])?.mul_int((k - b) as i64);
            let right = m[k].checked_sub(&m[b])?.mul_int((b - a) as i64);
            if left <= right {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    Ok(hull)
}

fn interpolate(m: &[LogValue], vertices: &[usize]) -> Result<Vec<LogValue>> {
    let mut roof = vec![LogValue::zero(); m.len()];
    if let Some(&v) = vertices.first() {
        roof[v] = m[v].clone();
    }
    for w in vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let rise = m[b].checked_sub(&m[a])?;
        for k in a + 1..=b {
            let frac = Rational::new(BigInt::from((k - a) as i64), BigInt::from((b - a) as i64));
            roof[k] = if k == b { m[b].clone() } else { m[a].checked_add(&rise.scale(&frac))? };
        }
    }
    Ok(roof)
}
