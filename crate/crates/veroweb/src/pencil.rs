//! Pairs of bivectors: rank, the core subspace L₀, the symplectic factor,
//! characteristic numbers of the induced web and Kronecker elementary pairs.
//!
//! A bivector Λ on K^m is stored as a grade-2 [`MultiVector`]; its skew
//! matrix B satisfies Λ(ξ, η) = ξᵀ B η. A 2-form σ uses the same storage
//! with σ(u, v) = uᵀ S v.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::factor::{factor, rational_roots};
use crate::exact::matrix::{dot, unit, Matrix};
use crate::exact::poly::UniPoly;
use crate::exact::scalar::{q, Q};
use crate::exact::subspace::{image, kernel, Subspace};
use crate::exterior::{mask_indices, subsets, MultiVector};
use crate::veronese::char_numbers_from_chain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PencilError {
    #[error("dimension error: {0}")]
    Dim(String),
    #[error("degenerate pencil: both bivectors vanish")]
    Degenerate,
    #[error("pair is not maximal: rank {rank}, ranks of members {r0} and {r1}")]
    NotMaximal { rank: usize, r0: usize, r1: usize },
    #[error("subspace is not isotropic for the form")]
    NotIsotropic,
    #[error("subspaces are not complementary")]
    NotComplement,
    #[error("form is degenerate where it must be symplectic")]
    NotSymplectic,
    #[error("core subspace did not stabilise after {0} samples")]
    Unstable(usize),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("scalars must be distinct and nonzero")]
    BadScalars,
    #[error("dimension {0} is even")]
    EvenDim(usize),
}

/// A pair of bivectors on the same space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivectorPair {
    lambda: MultiVector,
    lambda1: MultiVector,
}

impl BivectorPair {
    pub fn new(lambda: MultiVector, lambda1: MultiVector) -> Result<Self, PencilError> {
        if lambda.grade() != 2 || lambda1.grade() != 2 {
            return Err(PencilError::Dim("bivectors must have grade 2".into()));
        }
        if lambda.dim() != lambda1.dim() {
            return Err(PencilError::Dim(format!("dimensions {} and {}", lambda.dim(), lambda1.dim())));
        }
        Ok(BivectorPair { lambda, lambda1 })
    }

    pub fn from_skew(b: &Matrix, b1: &Matrix) -> Result<Self, PencilError> {
        for m in [b, b1] {
            if !m.is_square() || !m.add(&m.transpose()).is_zero() {
                return Err(PencilError::Dim("matrix is not skew-symmetric".into()));
            }
        }
        Self::new(MultiVector::from_skew(b), MultiVector::from_skew(b1))
    }

    pub fn dim(&self) -> usize {
        self.lambda.dim()
    }

    pub fn lambda(&self) -> &MultiVector {
        &self.lambda
    }

    pub fn lambda1(&self) -> &MultiVector {
        &self.lambda1
    }

    /// Skew matrix of Λ + tΛ₁.
    pub fn member(&self, t: &Q) -> Matrix {
        self.lambda.to_skew().add(&self.lambda1.to_skew().scale(t))
    }

    /// (1 − a)Λ + aΛ₁.
    pub fn combination(&self, a: &Q) -> MultiVector {
        self.lambda.scale(&(Q::one() - a)).add(&self.lambda1.scale(a))
    }

    /// Block sum on K^m ⊕ K^m'.
    pub fn direct_sum(&self, o: &Self) -> Self {
        let (m, k) = (self.dim(), o.dim());
        let block = |a: &Matrix, b: &Matrix| {
            let mut z: Matrix = Matrix::zeros(m + k, m + k);
            for i in 0..m {
                for j in 0..m {
                    z.set(i, j, a.get(i, j).clone());
                }
            }
            for i in 0..k {
                for j in 0..k {
                    z.set(m + i, m + j, b.get(i, j).clone());
                }
            }
            z
        };
        let b = block(&self.lambda.to_skew(), &o.lambda.to_skew());
        let b1 = block(&self.lambda1.to_skew(), &o.lambda1.to_skew());
        Self::from_skew(&b, &b1).expect("block sum of skew matrices")
    }

    /// Image under a linear isomorphism P of the underlying space.
    pub fn transform(&self, p: &Matrix) -> Self {
        let f = |b: &Matrix| p.mul(b).mul(&p.transpose());
        Self::from_skew(&f(&self.lambda.to_skew()), &f(&self.lambda1.to_skew()))
            .expect("congruence keeps skew symmetry")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilRank {
    pub rank: usize,
    pub corank: usize,
    pub is_maximal: bool,
}

/// Generic rank of the pencil from m + 1 samples of (1 − t)Λ + tΛ₁.
pub fn pencil_rank(p: &BivectorPair) -> PencilRank {
    let m = p.dim();
    let rank = (0..=m as i64).map(|t| p.combination(&q(t)).to_skew().rank()).max().unwrap_or(0);
    let r0 = p.lambda.to_skew().rank();
    let r1 = p.lambda1.to_skew().rank();
    PencilRank { rank, corank: m - rank, is_maximal: r0 == rank && r1 == rank }
}

/// A maximal pair spanning the same pencil, with the coefficients (a, a₁)
/// of the new members (1 − a)Λ + aΛ₁ and (1 − a₁)Λ + a₁Λ₁.
pub fn maximalize(p: &BivectorPair) -> Result<(BivectorPair, (Q, Q)), PencilError> {
    if p.lambda.is_zero() && p.lambda1.is_zero() {
        return Err(PencilError::Degenerate);
    }
    let pr = pencil_rank(p);
    if pr.is_maximal {
        return Ok((p.clone(), (q(0), q(1))));
    }
    let mut good = Vec::new();
    let mut k = 0i64;
    while good.len() < 2 {
        // 0, 1, -1, 2, -2, ...
        let a = q(if k % 2 == 1 { k / 2 + 1 } else { -(k / 2) });
        if p.combination(&a).to_skew().rank() == pr.rank {
            good.push(a);
        }
        k += 1;
    }
    let (a, a1) = (good[0].clone(), good[1].clone());
    let out = BivectorPair::new(p.combination(&a), p.combination(&a1))?;
    Ok((out, (a, a1)))
}

/// A bivector on V₁ presented on a quotient: covectors whose
/// common kernel is its image, and a 2-form whose restriction there is
/// dual to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivectorDescription {
    pub dim: usize,
    pub covectors: Vec<Vec<Q>>,
    pub form: MultiVector,
}

impl BivectorDescription {
    pub fn to_bivector(&self) -> Result<MultiVector, PencilError> {
        description_to_bivector(self.dim, &self.covectors, &self.form)
    }
}

/// The bivector whose image is ∩ ker αᵢ and which is dual there to σ.
pub fn description_to_bivector(
    dim: usize,
    covectors: &[Vec<Q>],
    form: &MultiVector,
) -> Result<MultiVector, PencilError> {
    let im = if covectors.is_empty() { Subspace::full(dim) } else { kernel(&Matrix::from_rows(covectors.to_vec())) };
    if im.dim() == 0 {
        return Ok(MultiVector::zero(dim, 2));
    }
    let p = Matrix::from_cols(dim, im.basis());
    let s = p.transpose().mul(&form.to_skew()).mul(&p);
    let inv = s.inverse().ok_or(PencilError::NotSymplectic)?;
    let b = p.mul(&inv.transpose()).mul(&p.transpose());
    Ok(MultiVector::from_skew(&b))
}

/// Dual bivector of a symplectic form: B = (S⁻¹)ᵀ.
pub fn dual_bivector(omega: &MultiVector) -> Result<MultiVector, PencilError> {
    let s = omega.to_skew();
    let inv = s.inverse().ok_or(PencilError::NotSymplectic)?;
    Ok(MultiVector::from_skew(&inv.transpose()))
}

/// Dual pair of two symplectic forms.
pub fn dual_pair(omega: &MultiVector, omega1: &MultiVector) -> Result<BivectorPair, PencilError> {
    BivectorPair::new(dual_bivector(omega)?, dual_bivector(omega1)?)
}

fn is_isotropic(s: &Matrix, v: &Subspace) -> bool {
    v.basis().iter().all(|a| v.basis().iter().all(|b| dot(a, &s.apply(b)).is_zero()))
}

/// Description on V₁ (in its echelon basis) of the projection of Λ_ω along
/// the isotropic subspace V₀.
pub fn quotient_bivector(
    omega: &MultiVector,
    v0: &Subspace,
    v1: &Subspace,
) -> Result<BivectorDescription, PencilError> {
    let n = omega.dim();
    if omega.grade() != 2 || v0.ambient() != n || v1.ambient() != n {
        return Err(PencilError::Dim("form and subspaces must live on one space".into()));
    }
    let s = omega.to_skew();
    if s.det().is_zero() {
        return Err(PencilError::NotSymplectic);
    }
    if v0.dim() + v1.dim() != n || !v0.sum(v1).expect("same ambient").is_full() {
        return Err(PencilError::NotComplement);
    }
    if !is_isotropic(&s, v0) {
        return Err(PencilError::NotIsotropic);
    }
    let b1 = v1.basis();
    let covectors = v0.basis().iter().map(|e| b1.iter().map(|u| dot(e, &s.apply(u))).collect()).collect();
    let d = b1.len();
    let mut form = MultiVector::zero(d, 2);
    for i in 0..d {
        for j in i + 1..d {
            let c = dot(&b1[i], &s.apply(&b1[j]));
            if !c.is_zero() {
                form.add_term((1 << i) | (1 << j), c);
            }
        }
    }
    Ok(BivectorDescription { dim: d, covectors, form })
}

/// The Kronecker elementary pair on K^{2n−1} built from n distinct
/// nonzero scalars.
pub fn elementary_pair(b: &[Q]) -> Result<BivectorPair, PencilError> {
    let n = b.len();
    if n == 0 {
        return Err(PencilError::Dim("need at least one scalar".into()));
    }
    for (i, x) in b.iter().enumerate() {
        if x.is_zero() || b[..i].contains(x) {
            return Err(PencilError::BadScalars);
        }
    }
    let big = 2 * n;
    let mut om = MultiVector::zero(big, 2);
    let mut om1 = MultiVector::zero(big, 2);
    for (j, bj) in b.iter().enumerate() {
        let mask = (1 << (2 * j)) | (1 << (2 * j + 1));
        om.add_term(mask, q(1));
        om1.add_term(mask, bj.clone());
    }
    let e: Vec<Q> = (0..big).map(|i| if i % 2 == 1 { q(-1) } else { q(0) }).collect();
    let e0 = Subspace::span(big, [e]);
    let e1 = Subspace::span(big, (0..big - 1).map(|i| unit(big, i)));
    let l = quotient_bivector(&om, &e0, &e1)?.to_bivector()?;
    let l1 = quotient_bivector(&om1, &e0, &e1)?.to_bivector()?;
    BivectorPair::new(l, l1)
}

/// Pair of symplectic forms on K^{2k} = L ⊕ L* with ω₁ = ω(K·,·),
/// K = A ⊕ Aᵀ. The elementary divisors of the pair are those of A, twice.
pub fn symplectic_pair_from(a: &Matrix) -> Result<(MultiVector, MultiVector), PencilError> {
    if !a.is_square() {
        return Err(PencilError::Dim("A must be square".into()));
    }
    if a.det().is_zero() {
        return Err(PencilError::NotSymplectic);
    }
    let k = a.rows();
    let mut s: Matrix = Matrix::zeros(2 * k, 2 * k);
    let mut kk: Matrix = Matrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        s.set(i, k + i, q(-1));
        s.set(k + i, i, q(1));
        for j in 0..k {
            kk.set(i, j, a.get(i, j).clone());
            kk.set(k + i, k + j, a.get(j, i).clone());
        }
    }
    let s1 = kk.transpose().mul(&s);
    Ok((MultiVector::from_skew(&s), MultiVector::from_skew(&s1)))
}

/// One inspected sample of the core-subspace search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRecord {
    pub t: Q,
    pub corank: usize,
    pub admissible: bool,
    pub core_dim: usize,
}

/// Elementary divisor base^exponent occurring `count` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryDivisor {
    pub base: UniPoly,
    pub exponent: usize,
    pub count: usize,
}

/// Parameters a with corank(Λ + aΛ₁) > r: the rational ones explicitly,
/// the rest as the irreducible factors whose roots are −a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalValues {
    pub rational: Vec<Q>,
    pub irrational_factors: Vec<UniPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilInvariants {
    pub dim: usize,
    pub rank: usize,
    pub corank: usize,
    pub is_maximal: bool,
    pub l0: Subspace,
    pub l1: Subspace,
    pub k_bar: Matrix,
    pub symplectic_charpoly: UniPoly,
    pub invariant_factors: Vec<UniPoly>,
    pub elementary_divisors: Vec<ElementaryDivisor>,
    pub factorization_complete: bool,
    pub web_char_numbers: Vec<usize>,
    pub exceptional_values: ExceptionalValues,
    pub trace: Vec<SampleRecord>,
}

impl PencilInvariants {
    pub fn symplectic_dim(&self) -> usize {
        self.symplectic_charpoly.degree().unwrap_or(0)
    }

    /// Invariants that decide isomorphism of maximal pairs.
    pub fn same_type(&self, o: &Self) -> bool {
        self.dim == o.dim
            && self.corank == o.corank
            && self.elementary_divisors == o.elementary_divisors
            && self.web_char_numbers == o.web_char_numbers
    }
}

fn sample_param(i: usize) -> Q {
    q(i as i64)
}

/// Sample budget before the core subspace is declared unstable.
fn sample_cap(m: usize) -> usize {
    4 * m + 16
}

/// Fraction-free determinant of a polynomial matrix.
fn poly_det(mut a: Vec<Vec<UniPoly>>) -> UniPoly {
    let n = a.len();
    if n == 0 {
        return UniPoly::one();
    }
    let mut sign = false;
    let mut prev = UniPoly::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return UniPoly::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = v.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        d.neg()
    } else {
        d
    }
}

/// Invariant factors of tI − K as quotients of successive gcds of minors.
pub fn invariant_factors(k: &Matrix) -> Vec<UniPoly> {
    let s = k.rows();
    let m: Vec<Vec<UniPoly>> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| {
                    let c = -k.get(i, j).clone();
                    if i == j {
                        UniPoly::new(vec![c, q(1)])
                    } else {
                        UniPoly::constant(c)
                    }
                })
                .collect()
        })
        .collect();
    let mut d = vec![UniPoly::one()];
    for size in 1..=s {
        let masks = subsets(s, size);
        let mut g = UniPoly::zero();
        'outer: for &rm in &masks {
            let rows = mask_indices(rm);
            for &cm in &masks {
                let cols = mask_indices(cm);
                let minor = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect();
                g = g.gcd(&poly_det(minor));
                if g.degree() == Some(0) {
                    break 'outer;
                }
            }
        }
        d.push(g.monic());
    }
    (1..=s).map(|i| d[i].div_exact(&d[i - 1]).expect("gcd chain divides")).collect()
}

/// Elementary divisors from invariant factors, with the completeness flag
/// of the underlying factorisation.
pub fn elementary_divisors(factors: &[UniPoly]) -> (Vec<ElementaryDivisor>, bool) {
    let mut complete = true;
    let mut out: Vec<ElementaryDivisor> = Vec::new();
    for f in factors {
        let fac = factor(f);
        complete &= fac.complete;
        for (base, exponent) in fac.factors {
            match out.iter_mut().find(|e| e.base == base && e.exponent == exponent) {
                Some(e) => e.count += 1,
                None => out.push(ElementaryDivisor { base, exponent, count: 1 }),
            }
        }
    }
    out.sort_by(|a, b| {
        a.base
            .degree()
            .cmp(&b.base.degree())
            .then_with(|| a.base.coeffs().iter().rev().cmp(b.base.coeffs().iter().rev()))
            .then(a.exponent.cmp(&b.exponent))
    });
    (out, complete)
}

/// Gram matrix on the basis of `l` of the 2-form attached to a bivector
/// whose image contains `l`.
fn restricted_form(b: &Matrix, l: &Subspace) -> Result<Matrix, PencilError> {
    let basis = l.basis();
    let xi: Vec<Vec<Q>> = basis
        .iter()
        .map(|u| b.solve(u).ok_or_else(|| PencilError::Inconsistent("core subspace leaves the image".into())))
        .collect::<Result<_, _>>()?;
    let d = basis.len();
    let mut s: Matrix = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            s.set(i, j, dot(&xi[i], &basis[j]));
        }
    }
    Ok(s)
}

/// Full set of invariants of a maximal pair.
pub fn classify(p: &BivectorPair) -> Result<PencilInvariants, PencilError> {
    let m = p.dim();
    let pr = pencil_rank(p);
    if !pr.is_maximal {
        return Err(PencilError::NotMaximal {
            rank: pr.rank,
            r0: p.lambda.to_skew().rank(),
            r1: p.lambda1.to_skew().rank(),
        });
    }
    let r = pr.corank;
    let b = p.lambda.to_skew();
    let b1 = p.lambda1.to_skew();

    // core subspace L₀
    let mut trace = Vec::new();
    let mut kernels: Vec<Subspace> = Vec::new();
    let mut l0: Option<Subspace> = None;
    let mut stable = 0;
    let mut i = 0;
    while stable < 2 || i < m + 1 {
        if i >= sample_cap(m) {
            return Err(PencilError::Unstable(i));
        }
        let t = sample_param(i);
        let mt = p.member(&t);
        let corank = m - mt.rank();
        let admissible = corank == r;
        if admissible {
            let im = image(&mt);
            let next = match &l0 {
                None => im,
                Some(cur) => cur.intersect(&im).expect("same ambient"),
            };
            if l0.as_ref() == Some(&next) {
                stable += 1;
            } else {
                stable = 0;
            }
            l0 = Some(next);
            kernels.push(kernel(&mt));
        }
        trace.push(SampleRecord { t, corank, admissible, core_dim: l0.as_ref().map_or(m, |s| s.dim()) });
        i += 1;
    }
    let l0 = l0.expect("admissible samples exist");
    let l0_ann = l0.annihilator();

    // L₁ = Λ(L₀′, ·) = Λ₁(L₀′, ·)
    let l1 = Subspace::span(m, l0_ann.basis().iter().map(|xi| b.apply(xi)));
    let l1b = Subspace::span(m, l0_ann.basis().iter().map(|xi| b1.apply(xi)));
    if l1 != l1b {
        return Err(PencilError::Inconsistent("Λ(L₀′) ≠ Λ₁(L₀′)".into()));
    }
    if !l0.contains_space(&l1) {
        return Err(PencilError::Inconsistent("L₁ ⊄ L₀".into()));
    }

    // symplectic factor on L₀/L₁
    let s = restricted_form(&b, &l0)?;
    let s1 = restricted_form(&b1, &l0)?;
    let l1_coords = Subspace::span(l0.dim(), l1.basis().iter().map(|v| l0.coords(v).expect("L₁ ⊂ L₀")));
    if kernel(&s) != l1_coords || kernel(&s1) != l1_coords {
        return Err(PencilError::Inconsistent("restricted forms have kernel ≠ L₁".into()));
    }
    let comp = l1_coords.complement();
    let c = Matrix::from_cols(l0.dim(), comp.basis());
    let wb = c.transpose().mul(&s).mul(&c);
    let wb1 = c.transpose().mul(&s1).mul(&c);
    let k_bar = match wb.inverse() {
        Some(inv) => inv.mul(&wb1),
        None => return Err(PencilError::Inconsistent("ω̄ is degenerate".into())),
    };
    let (charpoly, inv_factors) = if k_bar.rows() == 0 {
        (UniPoly::one(), Vec::new())
    } else {
        let cp = k_bar.scale(&q(-1)).char_poly().expect("square");
        (cp, invariant_factors(&k_bar))
    };
    let (divisors, complete) = elementary_divisors(&inv_factors);

    // characteristic numbers of the web on W/L₀ from sums of annihilators
    let qdim = m - l0.dim();
    let web_char_numbers = if r == 0 {
        Vec::new()
    } else {
        let mut chain = Vec::new();
        let mut acc = Subspace::zero(m);
        let mut ks = kernels.into_iter();
        let mut next_t = i;
        while acc.dim() < qdim {
            let kt = match ks.next() {
                Some(k) => k,
                None => {
                    // more admissible samples than the core search needed
                    if next_t >= sample_cap(m) + qdim {
                        return Err(PencilError::Unstable(next_t));
                    }
                    let mt = p.member(&sample_param(next_t));
                    next_t += 1;
                    if m - mt.rank() != r {
                        continue;
                    }
                    kernel(&mt)
                }
            };
            let grown = acc.sum(&kt).expect("same ambient");
            if grown.dim() == acc.dim() {
                return Err(PencilError::Inconsistent("annihilator chain stalled".into()));
            }
            acc = grown;
            chain.push(acc.dim());
        }
        if !l0_ann.contains_space(&acc) || chain[0] != r {
            return Err(PencilError::Inconsistent("annihilators leave L₀′".into()));
        }
        char_numbers_from_chain(&chain)
    };

    let mut exceptional = ExceptionalValues {
        rational: rational_roots(&charpoly).into_iter().map(|x| -x).collect(),
        irrational_factors: divisors.iter().filter(|d| d.base.degree() > Some(1)).map(|d| d.base.clone()).collect(),
    };
    exceptional.rational.sort();
    exceptional.irrational_factors.dedup();

    let inv = PencilInvariants {
        dim: m,
        rank: pr.rank,
        corank: r,
        is_maximal: true,
        l0,
        l1,
        k_bar,
        symplectic_charpoly: charpoly,
        invariant_factors: inv_factors,
        elementary_divisors: divisors,
        factorization_complete: complete,
        web_char_numbers,
        exceptional_values: exceptional,
        trace,
    };
    check_bookkeeping(&inv)?;
    Ok(inv)
}

/// Dimension bookkeeping every classification must satisfy.
pub fn check_bookkeeping(inv: &PencilInvariants) -> Result<(), PencilError> {
    let deg = inv.symplectic_dim();
    if inv.l0.dim() - inv.l1.dim() != deg {
        return Err(PencilError::Inconsistent("dim L₀ − dim L₁ ≠ deg".into()));
    }
    let kron: usize = inv.web_char_numbers.iter().map(|n| 2 * n - 1).sum();
    if inv.dim != deg + kron {
        return Err(PencilError::Inconsistent("dimension count".into()));
    }
    if inv.web_char_numbers.len() != inv.corank {
        return Err(PencilError::Inconsistent("number of Kronecker blocks".into()));
    }
    if inv.elementary_divisors.iter().any(|d| d.count % 2 != 0) {
        return Err(PencilError::Inconsistent("odd elementary divisor count".into()));
    }
    Ok(())
}

/// Corank 1 with trivial symplectic factor.
pub fn is_generic(p: &BivectorPair) -> Result<bool, PencilError> {
    let m = p.dim();
    if m.is_multiple_of(2) {
        return Err(PencilError::EvenDim(m));
    }
    let pair = if pencil_rank(p).is_maximal { p.clone() } else { maximalize(p)?.0 };
    let inv = classify(&pair)?;
    Ok(inv.corank == 1 && inv.symplectic_dim() == 0)
}

/// J with ω₁ = ω(J·,·).
pub fn recursion_operator(omega: &MultiVector, omega1: &MultiVector) -> Result<Matrix, PencilError> {
    let s = omega.to_skew();
    let inv = s.inverse().ok_or(PencilError::NotSymplectic)?;
    Ok(inv.mul(&omega1.to_skew()))
}

/// span(e, Je, J²e, …).
pub fn krylov_span(j: &Matrix, e: &[Q]) -> Subspace {
    let n = e.len();
    let mut s = Subspace::span(n, [e.to_vec()]);
    let mut v = e.to_vec();
    loop {
        v = j.apply(&v);
        let next = s.sum(&Subspace::span(n, [v.clone()])).expect("same ambient");
        if next.dim() == s.dim() {
            return s;
        }
        s = next;
    }
}

fn check_symplectic_pair(omega: &MultiVector, omega1: &MultiVector) -> Result<(), PencilError> {
    if omega.grade() != 2 || omega1.grade() != 2 || omega.dim() != omega1.dim() {
        return Err(PencilError::Dim("need two 2-forms on one space".into()));
    }
    if omega.to_skew().det().is_zero() || omega1.to_skew().det().is_zero() {
        return Err(PencilError::NotSymplectic);
    }
    Ok(())
}

/// Pair induced on V/V₀ by the dual pair of (ω, ω₁), in coordinates of the
/// coordinate complement of the line.
pub fn line_quotient_pair(omega: &MultiVector, omega1: &MultiVector, e: &[Q]) -> Result<BivectorPair, PencilError> {
    check_symplectic_pair(omega, omega1)?;
    let n = omega.dim();
    if e.len() != n || e.iter().all(|x| x.is_zero()) {
        return Err(PencilError::Dim("V₀ must be a line".into()));
    }
    let v0 = Subspace::span(n, [e.to_vec()]);
    let v1 = v0.complement();
    BivectorPair::new(
        quotient_bivector(omega, &v0, &v1)?.to_bivector()?,
        quotient_bivector(omega1, &v0, &v1)?.to_bivector()?,
    )
}

/// Dimension of the symplectic factor of the quotient by a line, read off
/// from the classification of the quotient pair.
pub fn line_quotient_symplectic_dim(omega: &MultiVector, omega1: &MultiVector, e: &[Q]) -> Result<usize, PencilError> {
    let pair = line_quotient_pair(omega, omega1, e)?;
    Ok(classify(&pair)?.symplectic_dim())
}

/// The same dimension from 2(n − dim span(e, J)).
pub fn line_quotient_formula(omega: &MultiVector, omega1: &MultiVector, e: &[Q]) -> Result<usize, PencilError> {
    check_symplectic_pair(omega, omega1)?;
    let j = recursion_operator(omega, omega1)?;
    Ok(omega.dim() - 2 * krylov_span(&j, e).dim())
}

/// Whether span(e, J) is isotropic for both forms.
pub fn krylov_isotropic(omega: &MultiVector, omega1: &MultiVector, e: &[Q]) -> Result<bool, PencilError> {
    let j = recursion_operator(omega, omega1)?;
    let v = krylov_span(&j, e);
    Ok(is_isotropic(&omega.to_skew(), &v) && is_isotropic(&omega1.to_skew(), &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::qf;

    fn bv(n: usize, terms: &[(usize, usize, i64)]) -> MultiVector {
        let t: Vec<(Vec<usize>, Q)> = terms.iter().map(|&(i, j, c)| (vec![i, j], q(c))).collect();
        MultiVector::from_terms(n, 2, &t)
    }

    fn standard_form(n: usize) -> MultiVector {
        bv(2 * n, &(0..n).map(|j| (2 * j, 2 * j + 1, 1)).collect::<Vec<_>>())
    }

    /// Projection V → V₁ along V₀ in the echelon basis of V₁, computed by
    /// solving for coordinates in the joint basis.
    fn projection(v0: &Subspace, v1: &Subspace) -> Matrix {
        let n = v0.ambient();
        let joint: Vec<Vec<Q>> = v0.basis().iter().chain(v1.basis()).cloned().collect();
        let a = Matrix::from_cols(n, &joint);
        let d0 = v0.dim();
        let cols: Vec<Vec<Q>> = (0..n).map(|i| a.solve(&unit(n, i)).unwrap()[d0..].to_vec()).collect();
        Matrix::from_cols(v1.dim(), &cols)
    }

    fn pushforward(omega: &MultiVector, v0: &Subspace, v1: &Subspace) -> Matrix {
        let b = dual_bivector(omega).unwrap().to_skew();
        let p = projection(v0, v1);
        p.mul(&b).mul(&p.transpose())
    }

    #[test]
    fn rank_examples() {
        let p = BivectorPair::new(bv(3, &[(0, 1, 1)]), bv(3, &[(0, 1, 1)])).unwrap();
        assert_eq!(pencil_rank(&p), PencilRank { rank: 2, corank: 1, is_maximal: true });
        let p = BivectorPair::new(bv(5, &[(0, 1, 1)]), bv(5, &[(2, 3, 1)])).unwrap();
        let pr = pencil_rank(&p);
        assert_eq!((pr.rank, pr.is_maximal), (4, false));
        // rank at t = 1/2 is the generic one
        assert_eq!(p.combination(&qf(1, 2)).to_skew().rank(), 4);
        let e = elementary_pair(&[q(1), q(2)]).unwrap();
        assert_eq!(pencil_rank(&e).rank, 2);
        assert!(pencil_rank(&e).is_maximal);
    }

    #[test]
    fn maximalize_examples() {
        let p = elementary_pair(&[q(1), q(2)]).unwrap();
        assert_eq!(maximalize(&p).unwrap().1, (q(0), q(1)));
        let z = BivectorPair::new(MultiVector::zero(3, 2), MultiVector::zero(3, 2)).unwrap();
        assert_eq!(maximalize(&z).unwrap_err(), PencilError::Degenerate);

        let p = BivectorPair::new(bv(5, &[(0, 1, 1)]), bv(5, &[(2, 3, 1)])).unwrap();
        let (mp, (a, a1)) = maximalize(&p).unwrap();
        assert!(pencil_rank(&mp).is_maximal);
        assert_ne!(a, a1);
        // same pencil type before and after a second recombination
        let again = BivectorPair::new(mp.lambda1().clone(), mp.lambda().clone()).unwrap();
        assert!(classify(&mp).unwrap().same_type(&classify(&again).unwrap()));
    }

    #[test]
    fn quotient_matches_pushforward() {
        let om = standard_form(2);
        let v0 = Subspace::span(4, [unit(4, 2)]);
        let v1 = Subspace::span(4, [unit(4, 0), unit(4, 1), unit(4, 3)]);
        let desc = quotient_bivector(&om, &v0, &v1).unwrap();
        assert_eq!(desc.to_bivector().unwrap().to_skew(), pushforward(&om, &v0, &v1));

        // a skewed complement and a second form
        let om2 = bv(4, &[(0, 1, 2), (0, 3, 1), (2, 3, -1), (1, 2, 1)]);
        let v0 = Subspace::span(4, [vec![q(1), q(0), q(1), q(1)]]);
        let v1 = Subspace::span(4, [vec![q(1), q(1), q(0), q(0)], unit(4, 1), unit(4, 2)]);
        let desc = quotient_bivector(&om2, &v0, &v1).unwrap();
        assert_eq!(desc.to_bivector().unwrap().to_skew(), pushforward(&om2, &v0, &v1));
    }

    #[test]
    fn quotient_rejects_non_isotropic() {
        let om = standard_form(2);
        let v0 = Subspace::span(4, [unit(4, 2), unit(4, 3)]);
        let v1 = Subspace::span(4, [vec![q(1), q(0), q(1), q(0)], vec![q(0), q(1), q(0), q(1)]]);
        assert_eq!(quotient_bivector(&om, &v0, &v1).unwrap_err(), PencilError::NotIsotropic);
    }

    #[test]
    fn quotient_by_zero_is_dual() {
        let om = standard_form(2);
        let d = quotient_bivector(&om, &Subspace::zero(4), &Subspace::full(4)).unwrap();
        assert_eq!(d.to_bivector().unwrap(), dual_bivector(&om).unwrap());
        assert_eq!(dual_bivector(&om).unwrap(), bv(4, &[(0, 1, 1), (2, 3, 1)]));
    }

    #[test]
    fn elementary_kernel_formula() {
        let b = [q(1), q(2)];
        let p = elementary_pair(&b).unwrap();
        assert_eq!(p.dim(), 3);
        for t in [0, 1, 5] {
            let t = q(t);
            let ker = kernel(&p.member(&t));
            // α_t = Σ b_j ∏_{i≠j}(t + b_i) e*_{2j−1}, restricted to e₁, e₂, e₃
            let mut alpha = vec![q(0); 4];
            for j in 0..2 {
                let mut c = b[j].clone();
                for i in 0..2 {
                    if i != j {
                        c *= &t + &b[i];
                    }
                }
                alpha[2 * j] = c;
            }
            assert_eq!(ker, Subspace::span(3, [alpha[..3].to_vec()]));
        }
    }

    #[test]
    fn elementary_classification() {
        let inv = classify(&elementary_pair(&[q(1), q(2)]).unwrap()).unwrap();
        assert_eq!(inv.symplectic_charpoly, UniPoly::one());
        assert_eq!(inv.web_char_numbers, vec![2]);
        assert_eq!(inv.corank, 1);
        let other = classify(&elementary_pair(&[q(-3), qf(1, 2)]).unwrap()).unwrap();
        assert!(inv.same_type(&other));
        let bigger = classify(&elementary_pair(&[q(1), q(2), q(4)]).unwrap()).unwrap();
        assert_eq!(bigger.web_char_numbers, vec![3]);
        assert_eq!(bigger.l0.dim(), 2);

        let one = elementary_pair(&[q(7)]).unwrap();
        assert_eq!(one.dim(), 1);
        assert!(one.lambda().is_zero() && one.lambda1().is_zero());
        assert_eq!(classify(&one).unwrap().web_char_numbers, vec![1]);
        assert!(elementary_pair(&[q(1), q(1)]).is_err());
        assert!(elementary_pair(&[q(0), q(1)]).is_err());
    }

    #[test]
    fn pure_symplectic_pair() {
        let a = Matrix::diag(&[q(2), q(3)]);
        let (om, om1) = symplectic_pair_from(&a).unwrap();
        let inv = classify(&dual_pair(&om, &om1).unwrap()).unwrap();
        assert_eq!(inv.corank, 0);
        assert!(inv.web_char_numbers.is_empty());
        // (t − 2)²(t − 3)²
        let expect = UniPoly::linear(q(-2)).pow(2).mul(&UniPoly::linear(q(-3)).pow(2));
        assert_eq!(inv.symplectic_charpoly, expect);
        assert_eq!(inv.exceptional_values.rational, vec![q(-3), q(-2)]);
    }

    #[test]
    fn product_recovers_factors() {
        // Jordan block of size 2 at eigenvalue 1 in A
        let a = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(0), q(1)]]);
        let (om, om1) = symplectic_pair_from(&a).unwrap();
        let sym = dual_pair(&om, &om1).unwrap();
        let prod = elementary_pair(&[q(2), q(5)]).unwrap().direct_sum(&sym);
        let p = Matrix::from_rows(vec![
            vec![q(1), q(1), q(0), q(0), q(0), q(0), q(0)],
            vec![q(0), q(1), q(0), q(2), q(0), q(0), q(0)],
            vec![q(0), q(0), q(1), q(0), q(0), q(-1), q(0)],
            vec![q(0), q(0), q(0), q(1), q(0), q(0), q(0)],
            vec![q(1), q(0), q(0), q(0), q(1), q(0), q(0)],
            vec![q(0), q(0), q(0), q(0), q(0), q(1), q(1)],
            vec![q(0), q(0), q(0), q(0), q(0), q(0), q(1)],
        ]);
        let inv = classify(&prod.transform(&p)).unwrap();
        assert_eq!(inv.web_char_numbers, vec![2]);
        assert_eq!(inv.symplectic_dim(), 4);
        assert_eq!(
            inv.elementary_divisors,
            vec![ElementaryDivisor { base: UniPoly::linear(q(-1)), exponent: 2, count: 2 }]
        );
        assert_eq!(inv.exceptional_values.rational, vec![q(-1)]);
        assert!(!is_generic(&prod).unwrap());
    }

    #[test]
    fn corank_jumps_at_roots() {
        let a = Matrix::from_rows(vec![vec![q(2), q(0)], vec![q(0), q(-1)]]);
        let (om, om1) = symplectic_pair_from(&a).unwrap();
        let prod = elementary_pair(&[q(1), q(3)]).unwrap().direct_sum(&dual_pair(&om, &om1).unwrap());
        let inv = classify(&prod).unwrap();
        for a in &inv.exceptional_values.rational {
            assert!(prod.dim() - prod.member(a).rank() > inv.corank);
        }
        for a in [0, 3, 4, 7, -5] {
            assert_eq!(prod.dim() - prod.member(&q(a)).rank(), inv.corank);
        }
    }

    #[test]
    fn irreducible_symplectic_divisor() {
        // eigenvalues ±i: t² + 1 stays irreducible over Q
        let a = Matrix::from_rows(vec![vec![q(0), q(-1)], vec![q(1), q(0)]]);
        let (om, om1) = symplectic_pair_from(&a).unwrap();
        let inv = classify(&dual_pair(&om, &om1).unwrap()).unwrap();
        assert!(inv.exceptional_values.rational.is_empty());
        assert_eq!(inv.exceptional_values.irrational_factors, vec![UniPoly::new(vec![q(1), q(0), q(1)])]);
    }

    #[test]
    fn generic_checks() {
        assert!(is_generic(&elementary_pair(&[q(1), q(2), q(3)]).unwrap()).unwrap());
        let even = BivectorPair::new(standard_form(1), standard_form(1)).unwrap();
        assert_eq!(is_generic(&even).unwrap_err(), PencilError::EvenDim(2));
    }

    #[test]
    fn line_quotients() {
        // J = diag(1,1,2,2,3,3) on K⁶ in Darboux pairs
        let a = Matrix::diag(&[q(1), q(2), q(3)]);
        let (om, om1) = symplectic_pair_from(&a).unwrap();
        let generic = vec![q(1), q(1), q(1), q(0), q(0), q(0)];
        assert_eq!(line_quotient_symplectic_dim(&om, &om1, &generic).unwrap(), 0);
        assert_eq!(line_quotient_formula(&om, &om1, &generic).unwrap(), 0);
        let eigen = unit(6, 0);
        assert_eq!(line_quotient_symplectic_dim(&om, &om1, &eigen).unwrap(), 4);
        assert_eq!(line_quotient_formula(&om, &om1, &eigen).unwrap(), 4);
        for e in [generic, eigen] {
            assert!(krylov_isotropic(&om, &om1, &e).unwrap());
        }
    }

    #[test]
    fn invariant_factor_oracle() {
        // diag(2,2,3): invariant factors 1, t−2, (t−2)(t−3)
        let k = Matrix::diag(&[q(2), q(2), q(3)]);
        let f = invariant_factors(&k);
        assert_eq!(
            f,
            vec![UniPoly::one(), UniPoly::linear(q(-2)), UniPoly::linear(q(-2)).mul(&UniPoly::linear(q(-3)))]
        );
    }
}
