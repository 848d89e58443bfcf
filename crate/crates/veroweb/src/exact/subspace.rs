//! Subspaces of K^n kept in reduced row-echelon form.

use super::matrix::{DimError, Matrix};
use super::scalar::{Field, Q};

/// Canonical representative: the RREF basis rows. Equal subspaces are
/// equal as values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace<F: Field = Q> {
    ambient: usize,
    basis: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient: n, basis: vec![], pivots: vec![] }
    }

    pub fn full(n: usize) -> Self {
        Self::span(n, (0..n).map(|i| super::matrix::unit(n, i)))
    }

    /// Span of arbitrary vectors of length `n`.
    pub fn span<I: IntoIterator<Item = Vec<F>>>(n: usize, vecs: I) -> Self {
        let rows: Vec<Vec<F>> = vecs.into_iter().collect();
        assert!(rows.iter().all(|v| v.len() == n), "vector length");
        if rows.is_empty() {
            return Self::zero(n);
        }
        let (r, pivots) = Matrix::from_rows(rows).rref();
        Subspace { ambient: n, basis: (0..pivots.len()).map(|i| r.row(i)).collect(), pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn contains(&self, v: &[F]) -> bool {
        // reduce against the echelon rows
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let c = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                *x = x.clone() - &(c.clone() * y);
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn contains_space(&self, o: &Self) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    fn check(&self, o: &Self) -> Result<(), DimError> {
        if self.ambient != o.ambient {
            return Err(DimError::Mismatch(self.ambient, o.ambient));
        }
        Ok(())
    }

    pub fn sum(&self, o: &Self) -> Result<Self, DimError> {
        self.check(o)?;
        Ok(Self::span(self.ambient, self.basis.iter().chain(&o.basis).cloned()))
    }

    /// The annihilator in the dual space, expressed in the dual basis.
    pub fn annihilator(&self) -> Self {
        if self.basis.is_empty() {
            return Self::full(self.ambient);
        }
        let m = Matrix::from_rows(self.basis.clone());
        Self::span(self.ambient, m.kernel_vectors())
    }

    pub fn intersect(&self, o: &Self) -> Result<Self, DimError> {
        self.check(o)?;
        Ok(self.annihilator().sum(&o.annihilator())?.annihilator())
    }

    /// Image L(S) of the subspace under a linear map.
    pub fn image_under(&self, l: &Matrix<F>) -> Self {
        assert_eq!(l.cols(), self.ambient);
        Self::span(l.rows(), self.basis.iter().map(|v| l.apply(v)))
    }

    /// Preimage L⁻¹(S).
    pub fn preimage_under(&self, l: &Matrix<F>) -> Self {
        assert_eq!(l.rows(), self.ambient);
        // v ∈ L⁻¹(S) iff every annihilating covector kills Lv
        let ann = self.annihilator();
        if ann.dim() == 0 {
            return Self::full(l.cols());
        }
        let cond = Matrix::from_rows(ann.basis.clone()).mul(l);
        Self::span(l.cols(), cond.kernel_vectors())
    }

    /// Coordinate complement spanned by the unit vectors at non-pivot positions.
    pub fn complement(&self) -> Self {
        Self::span(
            self.ambient,
            (0..self.ambient).filter(|i| !self.pivots.contains(i)).map(|i| super::matrix::unit(self.ambient, i)),
        )
    }

    /// Non-pivot coordinates of v: canonical coordinates on K^n / S.
    pub fn quotient_coords(&self, v: &[F]) -> Vec<F> {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let c = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                *x = x.clone() - &(c.clone() * y);
            }
        }
        (0..self.ambient).filter(|i| !self.pivots.contains(i)).map(|i| w[i].clone()).collect()
    }

    /// Coordinates of v (which must lie in S) in the echelon basis.
    pub fn coords(&self, v: &[F]) -> Option<Vec<F>> {
        let c: Vec<F> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut w = v.to_vec();
        for (row, x) in self.basis.iter().zip(&c) {
            for (a, b) in w.iter_mut().zip(row) {
                *a = a.clone() - &(x.clone() * b);
            }
        }
        w.iter().all(|x| x.is_zero()).then_some(c)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> Subspace<G> {
        Subspace::span(self.ambient, self.basis.iter().map(|v| v.iter().map(f).collect()))
    }
}

/// Kernel of a linear map as a subspace of its domain.
pub fn kernel<F: Field>(l: &Matrix<F>) -> Subspace<F> {
    Subspace::span(l.cols(), l.kernel_vectors())
}

/// Image (column space) of a linear map.
pub fn image<F: Field>(l: &Matrix<F>) -> Subspace<F> {
    Subspace::span(l.rows(), (0..l.cols()).map(|j| l.col(j)))
}
