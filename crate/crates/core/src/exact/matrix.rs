use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Matrix with no rows and `cols` columns.
    pub fn empty(cols: usize) -> Self {
        Self::zeros(0, cols)
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r);
        }
        Ok(Self { rows: nrows, cols, data })
    }

    /// Convenience constructor from machine integers; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(rows, cols).expect("ragged matrix")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[BigInt]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[dst] += factor * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * factor;
            self.data[dst * self.cols + j] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * &other[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        rational_rank(rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_vecs().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())).finish()
    }
}

/// Rank of a list of rational rows (consumed).
pub(crate) fn rational_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] / &pivot;
            for j in col..ncols {
                let v = &f * &rows[rank][j];
                rows[r][j] -= v;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Symmetric rational matrix, used as a Gram form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymmetricForm {
    dim: usize,
    entries: Vec<Rational>,
}

impl SymmetricForm {
    /// Builds from row-major entries, checking symmetry.
    pub fn new(dim: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        for i in 0..dim {
            for j in 0..i {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(vec![Rational::one(); dim])
    }

    pub fn diagonal(diag: Vec<Rational>) -> Self {
        let dim = diag.len();
        let mut entries = vec![Rational::zero(); dim * dim];
        for (i, d) in diag.into_iter().enumerate() {
            entries[i * dim + i] = d;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.dim + j]
    }

    /// `u^T G v` for integer vectors.
    pub fn bilinear(&self, u: &[BigInt], v: &[BigInt]) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.dim {
            if u[i].is_zero() {
                continue;
            }
            let mut row = Rational::zero();
            for j in 0..self.dim {
                if !v[j].is_zero() {
                    row += self.get(i, j) * Rational::from_integer(v[j].clone());
                }
            }
            acc += row * Rational::from_integer(u[i].clone());
        }
        acc
    }

    pub fn norm_sq(&self, v: &[BigInt]) -> Rational {
        self.bilinear(v, v)
    }

    /// `B G B^T` where the rows of `B` are vectors in this form's space.
    pub fn congruence(&self, basis: &IntMatrix) -> SymmetricForm {
        assert_eq!(basis.ncols(), self.dim);
        let k = basis.nrows();
        // G B^T, column by column
        let gb: Vec<Vec<Rational>> = (0..k)
            .map(|r| {
                let v = basis.row(r);
                (0..self.dim)
                    .map(|i| {
                        let mut s = Rational::zero();
                        for j in 0..self.dim {
                            if !v[j].is_zero() {
                                s += self.get(i, j) * Rational::from_integer(v[j].clone());
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let mut entries = vec![Rational::zero(); k * k];
        for a in 0..k {
            for b in a..k {
                let u = basis.row(a);
                let mut s = Rational::zero();
                for i in 0..self.dim {
                    if !u[i].is_zero() {
                        s += &gb[b][i] * Rational::from_integer(u[i].clone());
                    }
                }
                entries[b * k + a] = s.clone();
                entries[a * k + b] = s;
            }
        }
        SymmetricForm { dim: k, entries }
    }

    pub fn scaled(&self, t: &Rational) -> SymmetricForm {
        SymmetricForm { dim: self.dim, entries: self.entries.iter().map(|e| e * t).collect() }
    }

    pub fn block_diagonal(&self, other: &SymmetricForm) -> SymmetricForm {
        let n = self.dim + other.dim;
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries[i * n + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                entries[(self.dim + i) * n + self.dim + j] = other.get(i, j).clone();
            }
        }
        SymmetricForm { dim: n, entries }
    }

    /// Pivots of symmetric Gaussian elimination without pivoting, i.e. the
    /// ratios of consecutive leading principal minors. `None` as soon as a
    /// pivot is zero.
    pub fn ldl_pivots(&self) -> Option<Vec<Rational>> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            let p = a[k * n + k].clone();
            if p.is_zero() {
                return None;
            }
            for i in k + 1..n {
                if a[i * n + k].is_zero() {
                    continue;
                }
                let f = &a[i * n + k] / &p;
                for j in k + 1..n {
                    let v = &f * &a[k * n + j];
                    a[i * n + j] -= v;
                }
            }
            pivots.push(p);
        }
        Some(pivots)
    }

    /// All leading principal minors positive.
    pub fn is_positive_definite(&self) -> bool {
        match self.ldl_pivots() {
            Some(p) => p.iter().all(|x| x.is_positive()),
            None => false,
        }
    }

    pub fn determinant(&self) -> Rational {
        rational_det(self.entries.clone(), self.dim)
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Option<SymmetricForm> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = SymmetricForm::identity(n).entries;
        for col in 0..n {
            let p = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                    inv.swap(p * n + j, col * n + j);
                }
            }
            let pivot = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] /= &pivot;
                inv[col * n + j] /= &pivot;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for j in 0..n {
                    let v = &f * &a[col * n + j];
                    a[r * n + j] -= v;
                    let w = &f * &inv[col * n + j];
                    inv[r * n + j] -= w;
                }
            }
        }
        Some(SymmetricForm { dim: n, entries: inv })
    }
}

impl fmt::Debug for SymmetricForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| super::format_rational(self.get(i, j))).collect())
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Determinant of a square rational matrix given row-major (consumed).
pub(crate) fn rational_det(mut a: Vec<Rational>, n: usize) -> Rational {
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r * n + col].is_zero()) else { return Rational::zero() };
        if p != col {
            for j in 0..n {
                a.swap(p * n + j, col * n + j);
            }
            det = -det;
        }
        let pivot = a[col * n + col].clone();
        for r in col + 1..n {
            if a[r * n + col].is_zero() {
                continue;
            }
            let f = &a[r * n + col] / &pivot;
            for j in col..n {
                let v = &f * &a[col * n + j];
                a[r * n + j] -= v;
            }
        }
        det *= pivot;
    }
    det
}

/// Determinant of an integer matrix (Bareiss, fraction free).
pub fn int_det(m: &IntMatrix) -> BigInt {
    assert_eq!(m.nrows(), m.ncols());
    let n = m.nrows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<BigInt> = (0..n).flat_map(|i| m.row(i).to_vec()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else { return BigInt::zero() };
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[n * n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn positive_definite_by_leading_minors() {
        let g = SymmetricForm::new(2, vec![int(2), int(1), int(1), int(2)]).unwrap();
        assert!(g.is_positive_definite());
        let h = SymmetricForm::new(2, vec![int(1), int(2), int(2), int(1)]).unwrap();
        assert!(!h.is_positive_definite());
        let z = SymmetricForm::new(2, vec![int(0), int(0), int(0), int(1)]).unwrap();
        assert!(!z.is_positive_definite());
        assert_eq!(SymmetricForm::new(2, vec![int(1), int(2), int(3), int(1)]), Err(Error::NotSymmetric));
    }

    #[test]
    fn inverse_and_determinant() {
        let g = SymmetricForm::new(2, vec![rat(5, 9), rat(-4, 9), rat(-4, 9), rat(5, 9)]).unwrap();
        assert_eq!(g.determinant(), rat(1, 9));
        let inv = g.inverse().unwrap();
        assert_eq!(inv.entries(), &[int(5), int(4), int(4), int(5)]);
    }

    #[test]
    fn bareiss_matches_rational_det() {
        let m = IntMatrix::from_i64(&[&[2, -1, 3], &[0, 4, 1], &[5, 2, -2]]);
        let r: Vec<Rational> = m.row_vecs().concat().into_iter().map(Rational::from_integer).collect();
        assert_eq!(Rational::from_integer(int_det(&m)), rational_det(r, 3));
        assert_eq!(int_det(&IntMatrix::from_i64(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
    }

    #[test]
    fn congruence_restricts_form() {
        let g = SymmetricForm::identity(3);
        let b = IntMatrix::from_i64(&[&[1, 2, 2], &[0, 1, 0]]);
        let r = g.congruence(&b);
        assert_eq!(r.entries(), &[int(9), int(2), int(2), int(1)]);
    }
}
