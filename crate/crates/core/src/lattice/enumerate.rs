//! Exact short-vector enumeration.
//!
//! LLL is used only to pick a good basis for the search; the enumeration
//! itself is an exact Fincke–Pohst tree walk whose integer ranges are derived
//! with rational arithmetic, so the result set is complete.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{canonical_sign, EuclideanLattice};
use crate::exact::{ceil_center_minus_root, floor_center_plus_root, IntMatrix, LogValue, Rational};

/// Dense row-major rational Gram copy, mutated by LLL.
#[derive(Clone)]
struct Gram {
    n: usize,
    a: Vec<Rational>,
}

impl Gram {
    fn get(&self, i: usize, j: usize) -> &Rational {
        &self.a[i * self.n + j]
    }

    /// `b_k -= q * b_j`
    fn reduce(&mut self, k: usize, j: usize, q: &BigInt) {
        let n = self.n;
        let qr = Rational::from_integer(q.clone());
        for t in 0..n {
            let v = &qr * &self.a[j * n + t];
            self.a[k * n + t] -= v;
        }
        for t in 0..n {
            let v = &qr * &self.a[t * n + j];
            self.a[t * n + k] -= v;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        let n = self.n;
        for t in 0..n {
            self.a.swap(i * n + t, j * n + t);
        }
        for t in 0..n {
            self.a.swap(t * n + i, t * n + j);
        }
    }
}

/// Gram–Schmidt data: squared lengths `b[i]` and coefficients `mu[k][j]`
/// (`j < k`).
struct Gso {
    b: Vec<Rational>,
    mu: Vec<Vec<Rational>>,
}

fn gso(g: &Gram) -> Gso {
    let n = g.n;
    let mut b: Vec<Rational> = Vec::with_capacity(n);
    let mut mu = vec![vec![Rational::zero(); n]; n];
    for k in 0..n {
        for j in 0..k {
            let mut s = g.get(k, j).clone();
            for l in 0..j {
                s -= &mu[j][l] * &mu[k][l] * &b[l];
            }
            mu[k][j] = s / &b[j];
        }
        let mut s = g.get(k, k).clone();
        for l in 0..k {
            s -= &mu[k][l] * &mu[k][l] * &b[l];
        }
        b.push(s);
    }
    Gso { b, mu }
}

fn round_half_up(r: &Rational) -> BigInt {
    (r + Rational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

/// Exact LLL with `delta = 3/4` on the Gram form. Returns `(U, G')` where
/// the rows of `U` are the reduced basis in original coordinates and
/// `G' = U G U^T`.
pub fn lll_reduce(l: &EuclideanLattice) -> (IntMatrix, Vec<Rational>) {
    let n = l.rank();
    let mut g = Gram { n, a: l.gram().entries().to_vec() };
    let mut u = IntMatrix::identity(n);
    if n <= 1 {
        return (u, g.a);
    }
    let delta = Rational::new(BigInt::from(3), BigInt::from(4));
    let mut k = 1;
    let mut d = gso(&g);
    while k < n {
        for j in (0..k).rev() {
            let q = round_half_up(&d.mu[k][j]);
            if q.is_zero() {
                continue;
            }
            g.reduce(k, j, &q);
            u.add_row_multiple(k, j, &-q.clone());
            // b_k -= q b_j leaves the GSO lengths alone
            let qr = Rational::from_integer(q);
            for t in 0..j {
                let v = &qr * &d.mu[j][t];
                d.mu[k][t] -= v;
            }
            d.mu[k][j] -= &qr;
        }
        let lhs = &d.b[k];
        let rhs = (&delta - &d.mu[k][k - 1] * &d.mu[k][k - 1]) * &d.b[k - 1];
        if lhs >= &rhs {
            k += 1;
        } else {
            g.swap(k, k - 1);
            u.swap_rows(k, k - 1);
            d = gso(&g);
            k = (k - 1).max(1);
        }
    }
    (u, g.a)
}

/// Nonzero vectors of squared norm `<= bound`, one per `±` pair, with the
/// first nonzero coordinate positive, sorted by `(norm, coordinates)`.
pub fn short_vectors(l: &EuclideanLattice, bound: &Rational) -> Vec<(Vec<BigInt>, Rational)> {
    let n = l.rank();
    if n == 0 || !bound.is_positive() {
        return Vec::new();
    }
    let (u, reduced) = lll_reduce(l);
    let d = gso(&Gram { n, a: reduced });
    let mut out = Vec::new();
    let mut y = vec![BigInt::zero(); n];
    walk(&d, bound, n - 1, &Rational::zero(), true, &mut y, &mut |y, norm| {
        let mut x = vec![BigInt::zero(); n];
        for (k, yk) in y.iter().enumerate() {
            if yk.is_zero() {
                continue;
            }
            for (xi, uk) in x.iter_mut().zip(u.row(k)) {
                *xi += yk * uk;
            }
        }
        canonical_sign(&mut x);
        out.push((x, norm.clone()));
    });
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Depth-first walk over levels `n-1 .. 0`; sign symmetry is broken by
/// requiring the last nonzero coordinate to be positive.
fn walk(d: &Gso, bound: &Rational, level: usize, partial: &Rational, zero_above: bool, y: &mut Vec<BigInt>, visit: &mut dyn FnMut(&[BigInt], &Rational)) {
    let n = y.len();
    let mut c = Rational::zero();
    for k in level + 1..n {
        if !y[k].is_zero() {
            c -= &d.mu[k][level] * Rational::from_integer(y[k].clone());
        }
    }
    let t = (bound - partial) / &d.b[level];
    let mut lo = ceil_center_minus_root(&c, &t);
    let hi = floor_center_plus_root(&c, &t);
    if zero_above && lo.is_negative() {
        lo = BigInt::zero();
    }
    let mut v = lo;
    while v <= hi {
        let diff = Rational::from_integer(v.clone()) - &c;
        let np = partial + &diff * &diff * &d.b[level];
        let zero_here = zero_above && v.is_zero();
        y[level] = v.clone();
        if level == 0 {
            if !zero_here {
                visit(y, &np);
            }
        } else {
            walk(d, bound, level - 1, &np, zero_here, y, visit);
        }
        v += 1;
    }
    y[level] = BigInt::zero();
}

/// Successive minima with realizing vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimaVector {
    /// `λ_i^2`, nondecreasing.
    pub norms_sq: Vec<Rational>,
    pub vectors: Vec<Vec<BigInt>>,
}

impl MinimaVector {
    /// `ln λ_i = (1/2) ln λ_i^2`.
    pub fn log_minima(&self) -> Vec<LogValue> {
        self.norms_sq.iter().map(|q| LogValue::new(Rational::new(BigInt::one(), BigInt::from(2)), q.clone())).collect()
    }
}

/// Incremental linear-independence test over Q.
struct Independence {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Independence {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[BigInt]) -> Vec<Rational> {
        let mut r: Vec<Rational> = v.iter().map(|x| Rational::from_integer(x.clone())).collect();
        for (p, row) in &self.rows {
            if r[*p].is_zero() {
                continue;
            }
            let f = &r[*p] / &row[*p];
            for (a, b) in r.iter_mut().zip(row) {
                *a -= &f * b;
            }
        }
        r
    }

    /// Adds `v` if independent; returns whether it was added.
    fn push(&mut self, v: &[BigInt]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }
}

pub fn successive_minima(l: &EuclideanLattice) -> MinimaVector {
    let n = l.rank();
    let mut norms_sq = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    if n == 0 {
        return MinimaVector { norms_sq, vectors };
    }
    // the reduced basis is independent, so its longest vector bounds λ_n
    let (_, reduced) = lll_reduce(l);
    let bound = (0..n).map(|i| reduced[i * n + i].clone()).max().expect("rank >= 1");
    let mut ind = Independence::new();
    for (v, q) in short_vectors(l, &bound) {
        if ind.push(&v) {
            norms_sq.push(q);
            vectors.push(v);
            if ind.len() == n {
                break;
            }
        }
    }
    debug_assert_eq!(vectors.len(), n);
    MinimaVector { norms_sq, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, SymmetricForm};
    use proptest::prelude::*;

    fn vecs(l: &EuclideanLattice, b: Rational) -> Vec<Vec<i64>> {
        short_vectors(l, &b).into_iter().map(|(v, _)| v.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
    }

    /// Box-scan oracle: every canonical vector in `[-r, r]^n` with norm <= bound.
    fn box_scan(l: &EuclideanLattice, bound: &Rational, r: i64) -> Vec<Vec<i64>> {
        let n = l.rank();
        let mut out = Vec::new();
        let mut x = vec![-r; n];
        loop {
            let bx: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            let first = x.iter().find(|&&v| v != 0);
            if matches!(first, Some(&f) if f > 0) && &l.norm_sq(&bx) <= bound {
                out.push((l.norm_sq(&bx), x.clone()));
            }
            let mut i = 0;
            loop {
                if i == n {
                    out.sort();
                    return out.into_iter().map(|(_, v)| v).collect();
                }
                x[i] += 1;
                if x[i] <= r {
                    break;
                }
                x[i] = -r;
                i += 1;
            }
        }
    }

    #[test]
    fn identity_rank_two() {
        let z2 = EuclideanLattice::standard(2);
        assert_eq!(vecs(&z2, int(1)), vec![vec![0, 1], vec![1, 0]]);
        let got = vecs(&z2, int(5));
        assert_eq!(got.len(), 10);
        assert_eq!(got, box_scan(&z2, &int(5), 3));
        for v in [[1, 0], [0, 1], [1, 1], [1, -1], [2, 0], [0, 2], [1, 2], [2, 1], [1, -2], [2, -1]] {
            assert!(got.contains(&v.to_vec()));
        }
    }

    #[test]
    fn tangent_gram_example() {
        let l = EuclideanLattice::new(SymmetricForm::new(2, vec![rat(5, 9), rat(-4, 9), rat(-4, 9), rat(5, 9)]).unwrap()).unwrap();
        assert_eq!(vecs(&l, rat(2, 9)), vec![vec![1, 1]]);
        assert_eq!(vecs(&l, rat(2, 9)), box_scan(&l, &rat(2, 9), 4));
        let m = successive_minima(&l);
        assert_eq!(m.norms_sq, vec![rat(2, 9), rat(5, 9)]);
        assert_eq!(m.vectors[0], vec![BigInt::from(1), BigInt::from(1)]);
        assert_eq!(l.norm_sq(&m.vectors[1]), rat(5, 9));
    }

    #[test]
    fn minima_examples() {
        let m = successive_minima(&EuclideanLattice::standard(4));
        assert!(m.log_minima().iter().all(LogValue::is_zero));
        let m = successive_minima(&EuclideanLattice::diagonal(vec![int(1), int(4)]).unwrap());
        assert_eq!(m.norms_sq, vec![int(1), int(4)]);
        assert_eq!(m.log_minima()[1], LogValue::ln_int(2));
    }

    #[test]
    fn lll_preserves_lattice() {
        let l = EuclideanLattice::from_entries(3, vec![int(1), int(0), int(0), int(0), int(1), int(0), int(0), int(0), int(1)]).unwrap();
        let skew = IntMatrix::from_i64(&[&[1, 7, 3], &[0, 1, 5], &[0, 0, 1]]);
        let skewed = EuclideanLattice::new(l.gram().congruence(&skew)).unwrap();
        let (u, g) = lll_reduce(&skewed);
        assert_eq!(crate::exact::matrix::int_det(&u).abs(), BigInt::one());
        assert_eq!(skewed.gram().congruence(&u).entries(), &g[..]);
        // reduced basis of a rotated Z^3 is orthonormal
        for i in 0..3 {
            assert_eq!(g[i * 3 + i], int(1));
        }
    }

    fn small_lattice() -> impl Strategy<Value = EuclideanLattice> {
        (1usize..=3).prop_flat_map(|n| {
            (proptest::collection::vec(-3i64..=3, n * n), 1i64..=4).prop_filter_map("singular", move |(a, den)| {
                let rows: Vec<Vec<BigInt>> = a.chunks(n).map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
                let m = IntMatrix::from_rows(rows, n).unwrap();
                if m.rank() < n {
                    return None;
                }
                let g = SymmetricForm::identity(n).congruence(&m.transpose()).scaled(&rat(1, den));
                EuclideanLattice::new(g).ok()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn matches_box_scan(l in small_lattice(), b in 1i64..=6) {
            // every vector of norm <= b lies in a box of radius sqrt(b / min eigenvalue);
            // coordinates here are bounded via the dual diagonal
            let bound = int(b);
            let dual = l.dual();
            let r = (0..l.rank()).map(|i| {
                let bnd = &bound * dual.gram().get(i, i);
                crate::exact::isqrt(&bnd.ceil().to_integer()).try_into().unwrap_or(100i64) + 1
            }).max().unwrap();
            prop_assume!(r <= 12);
            prop_assert_eq!(vecs(&l, bound.clone()), box_scan(&l, &bound, r));
        }

        #[test]
        fn minima_are_nondecreasing_and_independent(l in small_lattice()) {
            let m = successive_minima(&l);
            prop_assert_eq!(m.vectors.len(), l.rank());
            prop_assert!(m.norms_sq.windows(2).all(|w| w[0] <= w[1]));
            let rows = IntMatrix::from_rows(m.vectors.clone(), l.rank()).unwrap();
            prop_assert_eq!(rows.rank(), l.rank());
            for (v, q) in m.vectors.iter().zip(&m.norms_sq) {
                prop_assert_eq!(&l.norm_sq(v), q);
            }
        }
    }
}
