//! Exterior algebra Λᵏ(Kⁿ) (and, read in the dual basis, Λᵏ(Kⁿ)*).
//!
//! Basis k-vectors are stored as bitmasks of their (0-based) index sets.

use std::collections::BTreeMap;

use crate::exact::matrix::{DimError, Matrix};
use crate::exact::poly::UniPoly;
use crate::exact::scalar::{Field, Q};
use crate::exact::subspace::Subspace;

pub const MAX_DIM: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExteriorError {
    #[error("degenerate input: the form is zero")]
    ZeroForm,
    #[error(transparent)]
    Dim(#[from] DimError),
}

/// Indices of the set bits, ascending.
pub fn mask_indices(m: u32) -> Vec<usize> {
    (0..32).filter(|i| m & (1 << i) != 0).collect()
}

pub fn indices_mask(ix: &[usize]) -> u32 {
    ix.iter().fold(0, |m, &i| m | (1 << i))
}

/// All k-subsets of {0..n} as masks, in lexicographic order of index tuples.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    fn rec(n: usize, k: usize, start: usize, cur: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            rec(n, k - 1, i + 1, cur | (1 << i), out);
        }
    }
    rec(n, k, 0, 0, &mut out);
    out
}

/// Sign of e_A ∧ e_B (zero handled by the caller): parity of pairs a∈A, b∈B, b<a.
fn wedge_sign(a: u32, b: u32) -> bool {
    let mut inv = 0;
    for i in mask_indices(a) {
        inv += (b & ((1u32 << i) - 1)).count_ones();
    }
    inv % 2 == 1
}

fn lex_key(m: u32) -> Vec<usize> {
    mask_indices(m)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiVector<F: Field = Q> {
    n: usize,
    grade: usize,
    terms: BTreeMap<u32, F>,
}

impl<F: Field> MultiVector<F> {
    pub fn zero(n: usize, grade: usize) -> Self {
        assert!(n <= MAX_DIM, "ambient dimension above {MAX_DIM}");
        MultiVector { n, grade, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: F) -> Self {
        let mut m = Self::zero(n, 0);
        m.add_term(0, c);
        m
    }

    /// e_{i1} ∧ … ∧ e_{ik} for 0-based, not necessarily sorted indices.
    pub fn basis(n: usize, ix: &[usize]) -> Self {
        let mut m = Self::scalar(n, F::one());
        for &i in ix {
            m = m.wedge(&Self::basis_vector(n, i));
        }
        m
    }

    pub fn basis_vector(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n, 1);
        m.add_term(1 << i, F::one());
        m
    }

    pub fn from_vector(v: &[F]) -> Self {
        let mut m = Self::zero(v.len(), 1);
        for (i, x) in v.iter().enumerate() {
            m.add_term(1 << i, x.clone());
        }
        m
    }

    /// From (0-based index tuple, coefficient) pairs; tuples need not be sorted.
    pub fn from_terms(n: usize, grade: usize, terms: &[(Vec<usize>, F)]) -> Self {
        let mut m = Self::zero(n, grade);
        for (ix, c) in terms {
            assert_eq!(ix.len(), grade);
            m = m.add(&Self::basis(n, ix).scale(c));
        }
        m
    }

    pub fn add_term(&mut self, mask: u32, c: F) {
        debug_assert_eq!(mask.count_ones() as usize, self.grade);
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&mask) {
            Some(x) => x + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(mask, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn terms(&self) -> &BTreeMap<u32, F> {
        &self.terms
    }

    /// Terms as (ascending 0-based index tuple, coefficient), lexicographic.
    pub fn sorted_terms(&self) -> Vec<(Vec<usize>, F)> {
        let mut v: Vec<(Vec<usize>, F)> = self.terms.iter().map(|(&m, c)| (lex_key(m), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn coeff(&self, ix: &[usize]) -> F {
        let b = Self::basis(self.n, ix);
        match b.terms.iter().next() {
            None => F::zero(),
            Some((&m, s)) => self.terms.get(&m).cloned().unwrap_or_else(F::zero) * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.n, self.grade), (o.n, o.grade), "multivector shapes");
        let mut r = self.clone();
        for (&m, c) in &o.terms {
            r.add_term(m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-F::one())
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut r = Self::zero(self.n, self.grade);
        for (&m, c) in &self.terms {
            r.add_term(m, c.clone() * s);
        }
        r
    }

    /// Exterior product; grades beyond n give the zero multivector.
    pub fn wedge(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "ambient mismatch");
        let mut r = Self::zero(self.n, self.grade + o.grade);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &o.terms {
                if a & b != 0 {
                    continue;
                }
                let c = ca.clone() * cb;
                r.add_term(a | b, if wedge_sign(a, b) { -c } else { c });
            }
        }
        r
    }

    /// Interior product i_v of a vector into the first slot of a form.
    pub fn interior(&self, v: &[F]) -> Self {
        assert_eq!(v.len(), self.n);
        assert!(self.grade >= 1);
        let mut r = Self::zero(self.n, self.grade - 1);
        for (&m, c) in &self.terms {
            for (s, i) in mask_indices(m).into_iter().enumerate() {
                if v[i].is_zero() {
                    continue;
                }
                let t = c.clone() * &v[i];
                r.add_term(m & !(1 << i), if s % 2 == 1 { -t } else { t });
            }
        }
        r
    }

    /// Evaluate a k-form on k vectors: Σ_I β_I det(V[I, :]).
    pub fn eval(&self, vs: &[Vec<F>]) -> F {
        assert_eq!(vs.len(), self.grade);
        if self.grade == 0 {
            return self.terms.get(&0).cloned().unwrap_or_else(F::zero);
        }
        let mut acc = F::zero();
        for (&m, c) in &self.terms {
            let ix = mask_indices(m);
            let minor = Matrix::from_rows(ix.iter().map(|&i| vs.iter().map(|v| v[i].clone()).collect()).collect());
            acc = acc + &(c.clone() * &minor.det());
        }
        acc
    }

    /// Coordinates in the lexicographic basis of Λᵏ.
    pub fn to_coords(&self) -> Vec<F> {
        subsets(self.n, self.grade).into_iter().map(|m| self.terms.get(&m).cloned().unwrap_or_else(F::zero)).collect()
    }

    /// Λᵏ of a linear map applied to a k-vector: (Lv₁)∧…∧(Lv_k).
    pub fn push(&self, l: &Matrix<F>) -> Result<Self, DimError> {
        if l.cols() != self.n {
            return Err(DimError::Mismatch(l.cols(), self.n));
        }
        let mut r = Self::zero(l.rows(), self.grade);
        for (&m, c) in &self.terms {
            let mut t = Self::scalar(l.rows(), c.clone());
            for i in mask_indices(m) {
                t = t.wedge(&Self::from_vector(&l.col(i)));
            }
            r = r.add(&t);
        }
        Ok(r)
    }

    /// Grade-2 element as the skew matrix M[i][j] = coefficient of e_i∧e_j.
    pub fn to_skew(&self) -> Matrix<F> {
        assert_eq!(self.grade, 2);
        let mut m = Matrix::zeros(self.n, self.n);
        for (&k, c) in &self.terms {
            let ix = mask_indices(k);
            m.set(ix[0], ix[1], c.clone());
            m.set(ix[1], ix[0], -c.clone());
        }
        m
    }

    pub fn from_skew(m: &Matrix<F>) -> Self {
        let n = m.rows();
        let mut r = Self::zero(n, 2);
        for i in 0..n {
            for j in i + 1..n {
                r.add_term((1 << i) | (1 << j), m.get(i, j).clone());
            }
        }
        r
    }

    /// Plücker diagnostic: (i_α v) ∧ v = 0 for every basis (k−1)-covector α.
    pub fn is_decomposable(&self) -> bool {
        if self.grade <= 1 || self.grade + 1 >= self.n || self.is_zero() {
            return true;
        }
        subsets(self.n, self.grade - 1).into_iter().all(|a| {
            let mut c = Self::zero(self.n, 1);
            for (&m, x) in &self.terms {
                if m & a != a {
                    continue;
                }
                let rest = m & !a;
                // e_m = ± e_a ∧ e_rest
                let s = wedge_sign(a, rest);
                c.add_term(rest, if s { -x.clone() } else { x.clone() });
            }
            c.wedge(self).is_zero()
        })
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> MultiVector<G> {
        let mut r = MultiVector::zero(self.n, self.grade);
        for (&m, c) in &self.terms {
            r.add_term(m, f(c));
        }
        r
    }
}

/// {v : i_v β = 0}, the kernel of a form.
pub fn kernel_of_form<F: Field>(beta: &MultiVector<F>) -> Result<Subspace<F>, ExteriorError> {
    if beta.is_zero() {
        return Err(ExteriorError::ZeroForm);
    }
    let n = beta.dim();
    let cols: Vec<Vec<F>> = (0..n).map(|j| beta.interior(&crate::exact::matrix::unit(n, j)).to_coords()).collect();
    let rows = cols[0].len();
    let m = Matrix::from_cols(rows, &cols);
    Ok(crate::exact::subspace::kernel(&m))
}

/// L*β: (L*β)(v₁,…,v_r) = β(Lv₁,…,Lv_r). L maps Kᵐ → Kⁿ, β is a form on Kⁿ.
pub fn pullback<F: Field>(l: &Matrix<F>, beta: &MultiVector<F>) -> Result<MultiVector<F>, DimError> {
    if l.rows() != beta.dim() {
        return Err(DimError::Mismatch(l.rows(), beta.dim()));
    }
    // the pullback of e*_i is row i of L
    beta.push(&l.transpose())
}

/// Polynomial family Σ tⁱ γ_i of k-vectors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyMultiVector<F: Field = Q> {
    n: usize,
    grade: usize,
    coeffs: Vec<MultiVector<F>>,
}

impl<F: Field> PolyMultiVector<F> {
    pub fn new(n: usize, grade: usize, mut coeffs: Vec<MultiVector<F>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        assert!(coeffs.iter().all(|c| c.dim() == n && c.grade() == grade));
        PolyMultiVector { n, grade, coeffs }
    }

    /// Σ_I p_I(t) e_I from polynomial coefficients keyed by index masks.
    pub fn from_poly_terms(n: usize, grade: usize, terms: &BTreeMap<u32, UniPoly<F>>) -> Self {
        let deg = terms.values().filter_map(|p| p.degree()).max().map_or(0, |d| d + 1);
        let mut coeffs = vec![MultiVector::zero(n, grade); deg];
        for (&m, p) in terms {
            for (k, c) in p.coeffs().iter().enumerate() {
                coeffs[k].add_term(m, c.clone());
            }
        }
        Self::new(n, grade, coeffs)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn coeffs(&self) -> &[MultiVector<F>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> MultiVector<F> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| MultiVector::zero(self.n, self.grade))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient, the value at t = ∞ of the projective curve.
    pub fn leading(&self) -> MultiVector<F> {
        self.coeffs.last().cloned().unwrap_or_else(|| MultiVector::zero(self.n, self.grade))
    }

    pub fn eval(&self, t: &F) -> MultiVector<F> {
        let mut acc = MultiVector::zero(self.n, self.grade);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(t).add(c);
        }
        acc
    }

    /// k-th derivative at t = 0 (k!·γ_k).
    pub fn derivative_at_zero(&self, k: usize) -> MultiVector<F> {
        let fact = (1..=k).fold(F::one(), |a, i| a * &F::from_i64(i as i64));
        self.coeff(k).scale(&fact)
    }

    /// Coefficientwise polynomials keyed by mask.
    pub fn poly_terms(&self) -> BTreeMap<u32, UniPoly<F>> {
        let mut keys: Vec<u32> = self.coeffs.iter().flat_map(|c| c.terms().keys().copied()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|m| {
                let p = UniPoly::new(
                    self.coeffs.iter().map(|c| c.terms().get(&m).cloned().unwrap_or_else(F::zero)).collect(),
                );
                (m, p)
            })
            .collect()
    }
}
