//! Integer row echelon forms: Hermite normal form, integer kernels,
//! saturation of sublattices and basis completion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{int_det, IntMatrix};
use crate::error::{Error, Result};

/// Unimodular row transform `W` accumulated during elimination, with its
/// inverse `V` (so that `V * W = I` at all times).
struct Transform {
    w: IntMatrix,
    v: IntMatrix,
}

impl Transform {
    fn new(n: usize) -> Self {
        Self { w: IntMatrix::identity(n), v: IntMatrix::identity(n) }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.w.swap_rows(a, b);
        // columns of V
        for i in 0..self.v.nrows() {
            let tmp = self.v[(i, a)].clone();
            self.v[(i, a)] = self.v[(i, b)].clone();
            self.v[(i, b)] = tmp;
        }
    }

    /// row[dst] += f * row[src] on W, the matching inverse column operation on V.
    fn add(&mut self, dst: usize, src: usize, f: &BigInt) {
        self.w.add_row_multiple(dst, src, f);
        for i in 0..self.v.nrows() {
            let x = &self.v[(i, dst)] * f;
            self.v[(i, src)] -= x;
        }
    }

    fn negate(&mut self, a: usize) {
        self.w.negate_row(a);
        for i in 0..self.v.nrows() {
            let x = -std::mem::take(&mut self.v[(i, a)]);
            self.v[(i, a)] = x;
        }
    }
}

/// In-place row echelon form with positive pivots. Returns pivot columns.
fn echelon(t: &mut IntMatrix, mut tr: Option<&mut Transform>) -> Vec<usize> {
    let (nr, nc) = (t.nrows(), t.ncols());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nc {
        if row == nr {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below `row`
            let best = (row..nr)
                .filter(|&r| !t[(r, col)].is_zero())
                .min_by(|&a, &b| t[(a, col)].abs().cmp(&t[(b, col)].abs()));
            let Some(best) = best else { break };
            if best != row {
                t.swap_rows(best, row);
                if let Some(tr) = tr.as_deref_mut() {
                    tr.swap(best, row);
                }
            }
            let mut done = true;
            for r in row + 1..nr {
                if t[(r, col)].is_zero() {
                    continue;
                }
                let q = &t[(r, col)] / &t[(row, col)];
                let f = -q;
                t.add_row_multiple(r, row, &f);
                if let Some(tr) = tr.as_deref_mut() {
                    tr.add(r, row, &f);
                }
                if !t[(r, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if t[(row, col)].is_zero() {
            continue;
        }
        if t[(row, col)].is_negative() {
            t.negate_row(row);
            if let Some(tr) = tr.as_deref_mut() {
                tr.negate(row);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Row-style Hermite normal form of the row lattice of `m`, zero rows dropped:
/// upper echelon, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let mut t = m.clone();
    let pivots = echelon(&mut t, None);
    for (r, &c) in pivots.iter().enumerate() {
        for above in 0..r {
            let q = t[(above, c)].div_floor(&t[(r, c)]);
            if !q.is_zero() {
                t.add_row_multiple(above, r, &-q);
            }
        }
    }
    let mut out = IntMatrix::empty(m.ncols());
    for r in 0..pivots.len() {
        out.push_row(t.row(r));
    }
    out
}

/// Basis (in Hermite normal form) of `{v in Z^n : A v = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let n = a.ncols();
    let mut t = a.transpose();
    let mut tr = Transform::new(n);
    let rank = echelon(&mut t, Some(&mut tr)).len();
    let mut k = IntMatrix::empty(n);
    for r in rank..n {
        k.push_row(tr.w.row(r));
    }
    hermite_normal_form(&k)
}

/// Basis in Hermite normal form of the saturation
/// `{v in Z^n : m v in rowspan_Z(M) for some m >= 1}` of a full-row-rank matrix.
pub fn hnf_saturate(m: &IntMatrix) -> Result<IntMatrix> {
    if m.rank() < m.nrows() {
        return Err(Error::DegenerateGenerators);
    }
    if m.nrows() == 0 {
        return Ok(IntMatrix::empty(m.ncols()));
    }
    let kernel = integer_kernel(m);
    if kernel.nrows() == 0 {
        return Ok(IntMatrix::identity(m.ncols()));
    }
    Ok(integer_kernel(&kernel))
}

/// Index `[saturation : rowspan]` of a full-row-rank integer matrix.
pub fn saturation_index(m: &IntMatrix, saturated: &IntMatrix) -> BigInt {
    // express m's rows in the saturated basis: both have the same row space,
    // so the index is |det(m G)| / |det(s G)| for any nondegenerate pairing;
    // use the Gram determinants with the standard form.
    let gm = m.mul(&m.transpose());
    let gs = saturated.mul(&saturated.transpose());
    let q = int_det(&gm) / int_det(&gs);
    q.sqrt()
}

/// Rows completing a saturated basis `s` (k x n) to a basis of Z^n.
///
/// When every Hermite pivot of `s` equals one, the completion is the unit
/// vectors of the non-pivot columns; otherwise it comes from a unimodular
/// transform.
pub fn complete_basis(s: &IntMatrix) -> Result<IntMatrix> {
    let n = s.ncols();
    let k = s.nrows();
    let h = hermite_normal_form(s);
    if h.nrows() != k {
        return Err(Error::DegenerateGenerators);
    }
    let pivots: Vec<usize> = (0..k).map(|r| (0..n).find(|&c| !h[(r, c)].is_zero()).unwrap()).collect();
    if pivots.iter().enumerate().all(|(r, &c)| h[(r, c)].is_one()) {
        let mut out = IntMatrix::empty(n);
        for c in (0..n).filter(|c| !pivots.contains(c)) {
            let mut e = vec![BigInt::zero(); n];
            e[c] = BigInt::one();
            out.push_row(&e);
        }
        return Ok(out);
    }
    let mut t = s.transpose();
    let mut tr = Transform::new(n);
    echelon(&mut t, Some(&mut tr));
    // s^T = V [R; 0]; saturation forces |det R| = 1
    let mut r = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            r[(i, j)] = t[(i, j)].clone();
        }
    }
    if !int_det(&r).abs().is_one() {
        return Err(Error::QuotientTorsion);
    }
    let mut out = IntMatrix::empty(n);
    for c in k..n {
        let col: Vec<BigInt> = (0..n).map(|i| tr.v[(i, c)].clone()).collect();
        out.push_row(&col);
    }
    Ok(out)
}

/// Whether the row lattice of `s` is saturated in Z^n.
pub fn is_saturated(s: &IntMatrix) -> Result<bool> {
    let sat = hnf_saturate(s)?;
    Ok(hermite_normal_form(s) == sat)
}
