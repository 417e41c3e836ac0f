//! Euclidean lattices: `Z^n` with a positive-definite rational Gram form.
//!
//! Over Q every projective module is free, so a lattice is fully described by
//! its Gram matrix in some basis. Sublattices, quotients, duals and direct
//! sums are all expressed in that language.

pub mod enumerate;
pub mod newton;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{complete_basis, format_rational, hermite_normal_form, hnf_saturate, parse_rational, IntMatrix, LogValue, Rational, SymmetricForm};

pub use enumerate::{lll_reduce, short_vectors, successive_minima, MinimaVector};
pub use newton::{newton_polygon, newton_polygon_with, slopes_summary, NewtonOptions, NewtonPolygon};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EuclideanLattice {
    gram: SymmetricForm,
}

impl EuclideanLattice {
    /// Validates positive-definiteness eagerly.
    pub fn new(gram: SymmetricForm) -> Result<Self> {
        if !gram.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { gram })
    }

    /// `Z^n` with the standard inner product.
    pub fn standard(n: usize) -> Self {
        Self { gram: SymmetricForm::identity(n) }
    }

    pub fn diagonal(diag: Vec<Rational>) -> Result<Self> {
        Self::new(SymmetricForm::diagonal(diag))
    }

    /// Row-major rational entries.
    pub fn from_entries(n: usize, entries: Vec<Rational>) -> Result<Self> {
        Self::new(SymmetricForm::new(n, entries)?)
    }

    pub fn rank(&self) -> usize {
        self.gram.dim()
    }

    pub fn gram(&self) -> &SymmetricForm {
        &self.gram
    }

    pub fn covolume_sq(&self) -> Rational {
        self.gram.determinant()
    }

    /// `-(1/2) ln det(gram)`; zero for the rank-zero lattice.
    pub fn degree(&self) -> LogValue {
        if self.rank() == 0 {
            return LogValue::zero();
        }
        LogValue::new(Rational::new(BigInt::from(-1), BigInt::from(2)), self.covolume_sq())
    }

    /// Mean slope `degree / rank`.
    pub fn slope(&self) -> LogValue {
        self.degree().div_int(self.rank() as i64)
    }

    /// The dual lattice, with the inverse Gram form.
    pub fn dual(&self) -> Self {
        Self { gram: self.gram.inverse().expect("positive definite form is invertible") }
    }

    /// Restriction of the form to the sub-Z-module spanned by `generators`
    /// (rows), optionally saturated first, expressed in its HNF basis.
    pub fn sublattice(&self, generators: &IntMatrix, saturate: bool) -> Result<Self> {
        Ok(self.sublattice_with_basis(generators, saturate)?.0)
    }

    /// Like [`sublattice`](Self::sublattice), also returning the basis used.
    pub fn sublattice_with_basis(&self, generators: &IntMatrix, saturate: bool) -> Result<(Self, IntMatrix)> {
        self.check_cols(generators)?;
        if generators.rank() < generators.nrows() {
            return Err(Error::DegenerateGenerators);
        }
        let basis = if saturate { hnf_saturate(generators)? } else { hermite_normal_form(generators) };
        Ok((Self { gram: self.gram.congruence(&basis) }, basis))
    }

    /// Quotient by a saturated sublattice with the orthogonal-projection
    /// metric.
    pub fn quotient(&self, sub: &IntMatrix) -> Result<Self> {
        Ok(self.quotient_with_basis(sub)?.0)
    }

    /// Quotient plus the lifts (rows in `Z^n`) of its basis vectors.
    pub fn quotient_with_basis(&self, sub: &IntMatrix) -> Result<(Self, IntMatrix)> {
        self.check_cols(sub)?;
        let n = self.rank();
        if sub.rank() < sub.nrows() {
            return Err(Error::DegenerateGenerators);
        }
        if sub.nrows() == 0 {
            return Ok((self.clone(), IntMatrix::identity(n)));
        }
        let s = hermite_normal_form(sub);
        if hnf_saturate(&s)? != s {
            return Err(Error::QuotientTorsion);
        }
        let lifts = complete_basis(&s)?;
        let gram = projected_gram(&self.gram, &s, &lifts);
        Ok((Self { gram }, lifts))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self { gram: self.gram.block_diagonal(&other.gram) }
    }

    /// Tensor with the rank-one lattice of squared norm `t`: every slope
    /// shifts by `-(1/2) ln t`.
    pub fn scale(&self, t: &Rational) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        Ok(Self { gram: self.gram.scaled(t) })
    }

    pub fn norm_sq(&self, v: &[BigInt]) -> Rational {
        self.gram.norm_sq(v)
    }

    /// `{rank, gram: ["p/q", ...]}` row-major.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rank": self.rank(),
            "gram": self.gram.entries().iter().map(format_rational).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rank = v
            .get("rank")
            .and_then(|r| r.as_u64())
            .ok_or_else(|| Error::Parse("lattice needs an integer \"rank\"".into()))? as usize;
        let gram = v.get("gram").and_then(|g| g.as_array()).ok_or_else(|| Error::Parse("lattice needs a \"gram\" array".into()))?;
        // accept a flat row-major array or an array of rows
        let flat: Vec<&serde_json::Value> = if gram.iter().all(|x| x.is_array()) {
            gram.iter().flat_map(|r| r.as_array().unwrap().iter()).collect()
        } else {
            gram.iter().collect()
        };
        let entries = flat
            .into_iter()
            .map(|x| match x {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                _ => Err(Error::Parse("gram entries must be \"p/q\" strings or numbers".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.len() != rank * rank {
            return Err(Error::DimensionMismatch { expected: rank * rank, found: entries.len() });
        }
        Self::from_entries(rank, entries)
    }

    fn check_cols(&self, m: &IntMatrix) -> Result<()> {
        if m.ncols() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: m.ncols() });
        }
        Ok(())
    }
}

impl std::fmt::Debug for EuclideanLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EuclideanLattice({:?})", self.gram)
    }
}

/// Gram matrix of the projections of `lifts` onto the orthogonal complement
/// of the span of `sub`.
fn projected_gram(gram: &SymmetricForm, sub: &IntMatrix, lifts: &IntMatrix) -> SymmetricForm {
    let k = sub.nrows();
    let m = lifts.nrows();
    let a = gram.congruence(sub);
    let a_inv = a.inverse().expect("restriction of a definite form is definite");
    // x[i][r] = <lift_i, sub_r>
    let x: Vec<Vec<Rational>> = (0..m).map(|i| (0..k).map(|r| gram.bilinear(lifts.row(i), sub.row(r))).collect()).collect();
    let y: Vec<Vec<Rational>> = x
        .iter()
        .map(|xi| (0..k).map(|r| (0..k).fold(Rational::zero(), |s, c| s + a_inv.get(r, c) * &xi[c])).collect())
        .collect();
    let mut entries = vec![Rational::zero(); m * m];
    for i in 0..m {
        for j in i..m {
            let corr = (0..k).fold(Rational::zero(), |s, r| s + &x[i][r] * &y[j][r]);
            let v = gram.bilinear(lifts.row(i), lifts.row(j)) - corr;
            entries[j * m + i] = v.clone();
            entries[i * m + j] = v;
        }
    }
    SymmetricForm::new(m, entries).expect("projected gram is symmetric")
}

/// Sign normalization: first nonzero coordinate positive.
pub fn canonical_sign(v: &mut [BigInt]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn lat(n: usize, e: &[Rational]) -> EuclideanLattice {
        EuclideanLattice::from_entries(n, e.to_vec()).unwrap()
    }

    #[test]
    fn degree_examples() {
        assert!(EuclideanLattice::standard(4).degree().is_zero());
        let l = EuclideanLattice::diagonal(vec![int(1), int(4)]).unwrap();
        assert_eq!(l.degree(), -LogValue::ln_int(2));
        // scaling by t shifts the degree by -(n/2) ln t
        let t = rat(9, 5);
        let scaled = l.scale(&t).unwrap();
        assert_eq!(scaled.degree(), l.degree() - LogValue::new(int(1), t.clone()));
        assert!(EuclideanLattice::standard(0).degree().is_zero());
    }

    #[test]
    fn dual_inverts_gram() {
        let l = EuclideanLattice::diagonal(vec![int(1), int(4)]).unwrap();
        assert_eq!(l.dual(), EuclideanLattice::diagonal(vec![int(1), rat(1, 4)]).unwrap());
        assert_eq!(EuclideanLattice::standard(3).dual(), EuclideanLattice::standard(3));
        let g = lat(2, &[rat(5, 9), rat(-4, 9), rat(-4, 9), rat(5, 9)]);
        assert_eq!(g.dual().dual(), g);
    }

    #[test]
    fn sublattice_examples() {
        let z2 = EuclideanLattice::standard(2);
        let s = z2.sublattice(&IntMatrix::from_i64(&[&[1, 1]]), true).unwrap();
        assert_eq!(s.gram().entries(), &[int(2)]);
        let z3 = EuclideanLattice::standard(3);
        let (s, basis) = z3.sublattice_with_basis(&IntMatrix::from_i64(&[&[2, 4, 4]]), true).unwrap();
        assert_eq!(s.gram().entries(), &[int(9)]);
        assert_eq!(basis, IntMatrix::from_i64(&[&[1, 2, 2]]));
        let full = z3.sublattice(&IntMatrix::identity(3), true).unwrap();
        assert_eq!(full, z3);
        assert_eq!(z3.sublattice(&IntMatrix::from_i64(&[&[1, 0, 0], &[2, 0, 0]]), true), Err(Error::DegenerateGenerators));
    }

    #[test]
    fn quotient_examples() {
        let z2 = EuclideanLattice::standard(2);
        let q = z2.quotient(&IntMatrix::from_i64(&[&[1, 0]])).unwrap();
        assert_eq!(q.gram().entries(), &[int(1)]);

        let z3 = EuclideanLattice::standard(3);
        let s = IntMatrix::from_i64(&[&[1, 2, 2]]);
        let (q, lifts) = z3.quotient_with_basis(&s).unwrap();
        assert_eq!(lifts, IntMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(q.gram().entries(), &[rat(5, 9), rat(-4, 9), rat(-4, 9), rat(5, 9)]);
        assert_eq!(q.covolume_sq(), rat(1, 9));
        let sub = z3.sublattice(&s, true).unwrap();
        assert_eq!(sub.degree(), -LogValue::ln_int(3));
        assert_eq!(q.degree(), LogValue::ln_int(3));
        assert!((sub.degree() + q.degree()).is_zero());

        let q0 = z3.quotient(&IntMatrix::identity(3)).unwrap();
        assert_eq!(q0.rank(), 0);
        assert!(q0.degree().is_zero());
        assert_eq!(z3.quotient(&IntMatrix::from_i64(&[&[2, 0, 0]])), Err(Error::QuotientTorsion));
    }

    #[test]
    fn direct_sum_and_scale() {
        let a = EuclideanLattice::diagonal(vec![int(1), int(4)]).unwrap();
        let b = EuclideanLattice::diagonal(vec![int(9)]).unwrap();
        let s = a.direct_sum(&b);
        assert_eq!(s, EuclideanLattice::diagonal(vec![int(1), int(4), int(9)]).unwrap());
        assert_eq!(s.degree(), a.degree() + b.degree());
        assert_eq!(EuclideanLattice::standard(2).direct_sum(&EuclideanLattice::standard(1)), EuclideanLattice::standard(3));
        assert_eq!(a.scale(&int(1)).unwrap(), a);
        assert_eq!(a.scale(&rat(1, 9)).unwrap(), EuclideanLattice::diagonal(vec![rat(1, 9), rat(4, 9)]).unwrap());
        assert!(a.scale(&int(0)).is_err());
    }

    #[test]
    fn rejects_indefinite_forms() {
        let r = EuclideanLattice::from_entries(2, vec![int(1), int(2), int(2), int(1)]);
        assert_eq!(r, Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn json_round_trip() {
        let l = lat(2, &[rat(5, 81), rat(-4, 81), rat(-4, 81), rat(5, 81)]);
        let j = l.to_json();
        assert_eq!(j["gram"][0], "5/81");
        assert_eq!(EuclideanLattice::from_json(&j).unwrap(), l);
        let nested = serde_json::json!({"rank": 2, "gram": [["1", "0"], ["0", 4]]});
        assert_eq!(EuclideanLattice::from_json(&nested).unwrap(), EuclideanLattice::diagonal(vec![int(1), int(4)]).unwrap());
    }
}
