//! Algebraic Veronese webs: admissible couples, their normal form,
//! Veronese curves, characteristic numbers and adapted bases.

use std::collections::BTreeMap;

use crate::exact::matrix::{shifted_adjugate, unit, DimError, Matrix};
use crate::exact::poly::UniPoly;
use crate::exact::scalar::{Field, Q};
use crate::exact::subspace::Subspace;
use crate::exterior::{MultiVector, PolyMultiVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VeroneseError {
    #[error("couple is not admissible: dimension chain {chain:?} stalls below {n}")]
    NotAdmissible { chain: Vec<usize>, n: usize },
    #[error("top wedge does not span W")]
    BadTopWedge,
    #[error("scalars must be pairwise distinct")]
    RepeatedScalars,
    #[error("wrong number of scalars: expected {expected}, got {got}")]
    ScalarCount { expected: String, got: usize },
    #[error("web has a nonzero invariant subspace inside w(inf)")]
    InvariantSubspace,
    #[error("curves live in different spaces: (n, r) = {0:?} vs {1:?}")]
    Mismatch((usize, usize), (usize, usize)),
    #[error(transparent)]
    Dim(#[from] DimError),
}

/// A subspace W and an endomorphism J of Kⁿ.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdmissibleCouple<F: Field = Q> {
    pub j: Matrix<F>,
    pub w: Subspace<F>,
}

/// Output of [`normalize_couple`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoupleNormalForm<F: Field = Q> {
    pub h: Matrix<F>,
    /// Basis e₁..e_r of W generating the blocks.
    pub e: Vec<Vec<F>>,
    /// Block dimensions n₁ ≥ … ≥ n_r.
    pub dims: Vec<usize>,
    pub blocks: Vec<Subspace<F>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VeroneseCurve<F: Field = Q> {
    pub curve: PolyMultiVector<F>,
    /// Characteristic numbers, nonincreasing.
    pub char_numbers: Vec<usize>,
}

/// A web given by ℓ: W_inf → V. `ell` is n×d and acts on coordinates in
/// the echelon basis of `w_inf`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgWeb<F: Field = Q> {
    pub w_inf: Subspace<F>,
    pub ell: Matrix<F>,
}

/// Scalar ∞ or a finite parameter value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Param<F: Field = Q> {
    Finite(F),
    Infinity,
}

/// Ways of choosing a covector basis adapted to the web.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AdaptedMode<F: Field = Q> {
    /// b₁..b_{n−k} and b.
    Split { bs: Vec<F>, b: F },
    /// c₁..c_{n₁}.
    Layered { cs: Vec<F> },
}

/// Dimension chain dim W, dim(W+JW), … up to stabilisation, and whether
/// it reaches the ambient dimension.
pub fn is_admissible<F: Field>(w: &Subspace<F>, j: &Matrix<F>) -> (bool, Vec<usize>) {
    let n = w.ambient();
    let mut chain = vec![w.dim()];
    let mut s = w.clone();
    let mut top = w.clone();
    loop {
        top = top.image_under(j);
        let next = s.sum(&top).expect("same ambient");
        if next.dim() == s.dim() {
            break;
        }
        chain.push(next.dim());
        s = next;
    }
    (s.dim() == n, chain)
}

fn chain_spaces<F: Field>(w: &Subspace<F>, j: &Matrix<F>, upto: usize) -> Vec<Subspace<F>> {
    // spaces[k] = W + JW + … + J^{k−1}W, spaces[0] = 0
    let mut out = vec![Subspace::zero(w.ambient())];
    let mut s = Subspace::zero(w.ambient());
    let mut top = w.clone();
    for _ in 0..upto {
        s = s.sum(&top).expect("same ambient");
        out.push(s.clone());
        top = top.image_under(j);
    }
    out
}

/// Characteristic numbers from a dimension chain (nonincreasing).
pub fn char_numbers_from_chain(chain: &[usize]) -> Vec<usize> {
    let r = chain[0];
    // k[ℓ−1] = number of blocks of dimension ≥ ℓ
    let mut k = vec![r];
    for win in chain.windows(2) {
        k.push(win[1] - win[0]);
    }
    let mut out = Vec::new();
    for l in 0..k.len() {
        let next = k.get(l + 1).copied().unwrap_or(0);
        for _ in 0..k[l] - next {
            out.push(l + 1);
        }
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

impl<F: Field> AdmissibleCouple<F> {
    pub fn new(j: Matrix<F>, w: Subspace<F>) -> Result<Self, VeroneseError> {
        if !j.is_square() {
            return Err(DimError::NotSquare(j.rows(), j.cols()).into());
        }
        if j.rows() != w.ambient() {
            return Err(DimError::Mismatch(j.rows(), w.ambient()).into());
        }
        let (ok, chain) = is_admissible(&w, &j);
        if !ok {
            return Err(VeroneseError::NotAdmissible { chain, n: w.ambient() });
        }
        Ok(AdmissibleCouple { j, w })
    }

    pub fn n(&self) -> usize {
        self.j.rows()
    }

    pub fn r(&self) -> usize {
        self.w.dim()
    }

    pub fn chain(&self) -> Vec<usize> {
        is_admissible(&self.w, &self.j).1
    }
}

/// Characteristic numbers straight from the dimension chain.
pub fn characteristic_numbers<F: Field>(c: &AdmissibleCouple<F>) -> Result<Vec<usize>, VeroneseError> {
    let (ok, chain) = is_admissible(&c.w, &c.j);
    if !ok {
        return Err(VeroneseError::NotAdmissible { chain, n: c.n() });
    }
    Ok(char_numbers_from_chain(&chain))
}

/// Covector α with α(S) = 0 and α(x) = 1 (x ∉ S), least-index solution.
fn separating_covector<F: Field>(s: &Subspace<F>, x: &[F]) -> Vec<F> {
    let n = x.len();
    let mut rows: Vec<Vec<F>> = s.basis().to_vec();
    rows.push(x.to_vec());
    let mut rhs = vec![F::zero(); s.dim()];
    rhs.push(F::one());
    Matrix::from_rows(rows).solve(&rhs).unwrap_or_else(|| vec![F::zero(); n])
}

fn rank_one<F: Field>(v: &[F], alpha: &[F]) -> Matrix<F> {
    let n = v.len();
    let mut m = Matrix::zeros(n, alpha.len());
    for i in 0..n {
        for k in 0..alpha.len() {
            if !v[i].is_zero() && !alpha[k].is_zero() {
                m.set(i, k, v[i].clone() * &alpha[k]);
            }
        }
    }
    m
}

fn combine<F: Field>(basis: &[Vec<F>], c: &[F]) -> Vec<F> {
    let n = basis.first().map_or(0, |b| b.len());
    let mut v = vec![F::zero(); n];
    for (b, x) in basis.iter().zip(c) {
        if x.is_zero() {
            continue;
        }
        for (a, y) in v.iter_mut().zip(b) {
            *a = a.clone() + &(x.clone() * y);
        }
    }
    v
}

/// Normal form H, e_j, n_j (constructive induction on dim W).
pub fn normalize_couple<F: Field>(c: &AdmissibleCouple<F>) -> Result<CoupleNormalForm<F>, VeroneseError> {
    let (ok, chain) = is_admissible(&c.w, &c.j);
    if !ok {
        return Err(VeroneseError::NotAdmissible { chain, n: c.n() });
    }
    let (h, e, dims) = normalize_rec(&c.w, &c.j);
    // present blocks with nonincreasing dimension (stable)
    let mut order: Vec<usize> = (0..dims.len()).collect();
    order.sort_by(|&a, &b| dims[b].cmp(&dims[a]));
    let e: Vec<Vec<F>> = order.iter().map(|&k| e[k].clone()).collect();
    let dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let blocks = e.iter().zip(&dims).map(|(v, &d)| krylov_space(&h, v, d)).collect();
    Ok(CoupleNormalForm { h, e, dims, blocks })
}

fn krylov_vectors<F: Field>(h: &Matrix<F>, v: &[F], d: usize) -> Vec<Vec<F>> {
    let mut out = vec![v.to_vec()];
    for _ in 1..d {
        let next = h.apply(out.last().unwrap());
        out.push(next);
    }
    out
}

fn krylov_space<F: Field>(h: &Matrix<F>, v: &[F], d: usize) -> Subspace<F> {
    Subspace::span(v.len(), krylov_vectors(h, v, d))
}

fn normalize_rec<F: Field>(w: &Subspace<F>, j0: &Matrix<F>) -> (Matrix<F>, Vec<Vec<F>>, Vec<usize>) {
    let n = w.ambient();
    let r = w.dim();
    if n == 0 || r == 0 {
        return (Matrix::zeros(n, n), vec![], vec![]);
    }
    let mut j = j0.clone();
    let spaces = chain_spaces(w, &j, n + 1);
    // first ℓ with dim(S_{ℓ+1}) − dim(S_ℓ) < r
    let ell =
        (1..=n).find(|&l| spaces[l + 1].dim() - spaces[l].dim() < r).expect("the chain stabilises within n steps");
    // e ∈ W − {0} with J^ℓ e ∈ S_ℓ: first echelon kernel vector
    let d = w.basis().to_vec();
    let ann = spaces[ell].annihilator();
    let jl = j.pow(ell);
    let cond_cols: Vec<Vec<F>> = d
        .iter()
        .map(|b| {
            let x = jl.apply(b);
            ann.basis().iter().map(|a| crate::exact::matrix::dot(a, &x)).collect()
        })
        .collect();
    let coeffs = if ann.dim() == 0 {
        unit(r, 0)
    } else {
        Matrix::from_cols(ann.dim(), &cond_cols)
            .kernel_vectors()
            .into_iter()
            .next()
            .expect("a dimension drop gives a kernel vector")
    };
    let e = combine(&d, &coeffs);

    // peel J^ℓ e down through S_{ℓ−1}, …, S_0 with feedback terms into W
    for m in 1..=ell {
        let x = j.pow(ell).apply(&e);
        let low = &spaces[ell - m];
        // w_top ∈ W with J^{ℓ−m} w_top ≡ x mod S_{ℓ−m}
        let jp = j.pow(ell - m);
        let low_ann = low.annihilator();
        let w_top = if low_ann.dim() == 0 {
            vec![F::zero(); n]
        } else {
            let cols: Vec<Vec<F>> = d
                .iter()
                .map(|b| {
                    let y = jp.apply(b);
                    low_ann.basis().iter().map(|a| crate::exact::matrix::dot(a, &y)).collect()
                })
                .collect();
            let rhs: Vec<F> = low_ann.basis().iter().map(|a| crate::exact::matrix::dot(a, &x)).collect();
            let c = Matrix::from_cols(low_ann.dim(), &cols).solve(&rhs).expect("J^ℓ e lies in the next chain space");
            combine(&d, &c)
        };
        if w_top.iter().all(|z| z.is_zero()) {
            continue;
        }
        let pos = j.pow(m - 1).apply(&e);
        let alpha = separating_covector(&spaces[m - 1], &pos);
        let neg: Vec<F> = w_top.iter().map(|z| -z.clone()).collect();
        j = j.add(&rank_one(&neg, &alpha));
    }
    debug_assert!(j.pow(ell).apply(&e).iter().all(|z| z.is_zero()));

    let u_vecs = krylov_vectors(&j, &e, ell);
    let u = Subspace::span(n, u_vecs.clone());
    let comp: Vec<usize> = (0..n).filter(|i| !u.pivots().contains(i)).collect();
    let nq = comp.len();
    if nq == 0 {
        return (j, vec![e], vec![ell]);
    }
    // induced couple on V/U in non-pivot coordinates
    let mut jbar = Matrix::zeros(nq, nq);
    for (col, &ci) in comp.iter().enumerate() {
        let img = u.quotient_coords(&j.apply(&unit(n, ci)));
        for (row, x) in img.into_iter().enumerate() {
            jbar.set(row, col, x);
        }
    }
    let wbar = Subspace::span(nq, d.iter().map(|b| u.quotient_coords(b)));
    let (hbar, ebar, dbar) = normalize_rec(&wbar, &jbar);

    // lift of W/U ≅ W̄ back into W
    let pd: Vec<Vec<F>> = d.iter().map(|b| u.quotient_coords(b)).collect();
    let lift_mat = Matrix::from_cols(nq, &pd);
    let lift = |v: &[F]| -> Vec<F> {
        let c = lift_mat.solve(v).expect("vector lies in the image of W");
        combine(&d, &c)
    };
    // G̃ = lift ∘ (H̄ − J̄) ∘ π, vanishing on U
    let gbar = hbar.sub(&jbar);
    let mut gt = Matrix::zeros(n, n);
    for col in 0..n {
        let px = u.quotient_coords(&unit(n, col));
        let y = gbar.apply(&px);
        if y.iter().all(|z| z.is_zero()) {
            continue;
        }
        let l = lift(&y);
        for (row, z) in l.into_iter().enumerate() {
            gt.set(row, col, z);
        }
    }
    j = j.add(&gt);

    let es: Vec<Vec<F>> = ebar.iter().map(|v| lift(v)).collect();
    // J^{ℓ_j} e_j ∈ U: fix with G = e ⊗ α, α(U) = 0
    let mut known_rows: Vec<Vec<F>> = u_vecs.clone();
    let mut rhs: Vec<F> = vec![F::zero(); ell];
    let ubasis = Matrix::from_cols(n, &u_vecs);
    for (ej, &lj) in es.iter().zip(&dbar) {
        let chainj = krylov_vectors(&j, ej, lj + 1);
        let a = ubasis.solve(&chainj[lj]).expect("top of the lifted chain lies in U");
        for i in 0..lj {
            known_rows.push(chainj[i].clone());
            // α(J^i e_j) = −a_k with k = ℓ_j − 1 − i, zero when k ≥ ℓ
            let k = lj - 1 - i;
            rhs.push(if k < ell { -a[k].clone() } else { F::zero() });
        }
    }
    let alpha = Matrix::from_rows(known_rows).solve(&rhs).expect("blocks form a basis");
    j = j.add(&rank_one(&e, &alpha));

    let mut e_all = es;
    e_all.push(e);
    let mut dims = dbar;
    dims.push(ell);
    (j, e_all, dims)
}

/// Checks every normal-form invariant; returns a description of the first failure.
pub fn check_normal_form<F: Field>(c: &AdmissibleCouple<F>, nf: &CoupleNormalForm<F>) -> Result<(), String> {
    let n = c.n();
    if !nf.h.pow(n).is_zero() {
        return Err("H is not nilpotent".into());
    }
    let diff = nf.h.sub(&c.j);
    let im = crate::exact::subspace::image(&diff);
    if !c.w.contains_space(&im) {
        return Err("Im(H - J) is not inside W".into());
    }
    if Subspace::span(n, nf.e.clone()) != c.w || nf.e.len() != c.r() {
        return Err("e_j do not form a basis of W".into());
    }
    let mut total = Subspace::zero(n);
    for ((ej, &d), blk) in nf.e.iter().zip(&nf.dims).zip(&nf.blocks) {
        if blk.dim() != d || *blk != krylov_space(&nf.h, ej, d) {
            return Err("block is not the H-orbit of its generator".into());
        }
        if !nf.h.pow(d).apply(ej).iter().all(|z| z.is_zero()) {
            return Err("block is not H-invariant".into());
        }
        total = total.sum(blk).unwrap();
    }
    if nf.dims.iter().sum::<usize>() != n || !total.is_full() {
        return Err("blocks do not give a direct sum decomposition".into());
    }
    Ok(())
}

type PolyVec<F> = BTreeMap<u32, UniPoly<F>>;

fn poly_vector<F: Field>(v: &[UniPoly<F>]) -> PolyVec<F> {
    v.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(i, p)| (1u32 << i, p.clone())).collect()
}

fn poly_wedge<F: Field>(a: &PolyVec<F>, b: &PolyVec<F>) -> PolyVec<F> {
    let mut out: PolyVec<F> = BTreeMap::new();
    for (&ma, pa) in a {
        for (&mb, pb) in b {
            if ma & mb != 0 {
                continue;
            }
            let sign =
                crate::exterior::mask_indices(ma).iter().map(|&i| (mb & ((1u32 << i) - 1)).count_ones()).sum::<u32>()
                    % 2
                    == 1;
            let p = pa.mul(pb);
            let p = if sign { p.neg() } else { p };
            let e = out.entry(ma | mb).or_insert_with(UniPoly::zero);
            *e = e.add(&p);
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// Scale the echelon basis of W so its wedge equals `w_top`.
fn basis_matching_top<F: Field>(w: &Subspace<F>, w_top: &MultiVector<F>) -> Result<Vec<Vec<F>>, VeroneseError> {
    let n = w.ambient();
    if w_top.grade() != w.dim() || w_top.dim() != n || w_top.is_zero() {
        return Err(VeroneseError::BadTopWedge);
    }
    let mut basis = w.basis().to_vec();
    let mut wedge = MultiVector::scalar(n, F::one());
    for b in &basis {
        wedge = wedge.wedge(&MultiVector::from_vector(b));
    }
    // w_top must be a multiple of the basis wedge
    let (&m, c) = wedge.terms().iter().next().ok_or(VeroneseError::BadTopWedge)?;
    let ratio = w_top.terms().get(&m).cloned().unwrap_or_else(F::zero) / c.clone();
    if ratio.is_zero() || wedge.scale(&ratio) != *w_top {
        return Err(VeroneseError::BadTopWedge);
    }
    if let Some(b0) = basis.first_mut() {
        for x in b0.iter_mut() {
            *x = x.clone() * &ratio;
        }
    }
    Ok(basis)
}

/// γ(t) = φ(t)·∧_k (J+tI)⁻¹w_k, assembled from adjugate columns and divided
/// by φ^{r−1} exactly.
pub fn build_curve<F: Field>(
    c: &AdmissibleCouple<F>,
    w_top: &MultiVector<F>,
) -> Result<VeroneseCurve<F>, VeroneseError> {
    let n = c.n();
    let r = c.r();
    let basis = basis_matching_top(&c.w, w_top)?;
    let (adj, det) = shifted_adjugate(&c.j);
    let mut acc: PolyVec<F> = BTreeMap::from([(0u32, UniPoly::one())]);
    for b in &basis {
        let col: Vec<UniPoly<F>> =
            adj.iter().map(|row| row.iter().zip(b).fold(UniPoly::zero(), |s, (p, x)| s.add(&p.scale(x)))).collect();
        acc = poly_wedge(&acc, &poly_vector(&col));
    }
    let denom = det.pow(r.saturating_sub(1));
    let terms: PolyVec<F> = acc
        .into_iter()
        .map(|(m, p)| (m, p.div_exact(&denom).expect("adjugate wedge divisible by det^(r-1)")))
        .collect();
    let curve = PolyMultiVector::from_poly_terms(n, r, &terms);
    Ok(VeroneseCurve { curve, char_numbers: characteristic_numbers(c)? })
}

/// Veronese curve of the web (curve on the dual couple (Jᵀ, ann W_inf)).
pub fn web_curve<F: Field>(web: &AlgWeb<F>, beta: &MultiVector<F>) -> Result<VeroneseCurve<F>, VeroneseError> {
    let dual = AdmissibleCouple::new(web.extension().transpose(), web.w_inf.annihilator())
        .map_err(|_| VeroneseError::InvariantSubspace)?;
    build_curve(&dual, beta)
}

/// Derivative vectors γ(0), γ'(0), …, γ^{(n−r)}(0) are linearly independent.
pub fn derivatives_independent<F: Field>(curve: &PolyMultiVector<F>, n: usize, r: usize) -> bool {
    let rows: Vec<Vec<F>> = (0..=n - r).map(|k| curve.derivative_at_zero(k).to_coords()).collect();
    Matrix::from_rows(rows).rank() == n - r + 1
}

impl<F: Field> AlgWeb<F> {
    pub fn new(w_inf: Subspace<F>, ell: Matrix<F>) -> Result<Self, VeroneseError> {
        if ell.cols() != w_inf.dim() || ell.rows() != w_inf.ambient() {
            return Err(DimError::Mismatch(ell.cols(), w_inf.dim()).into());
        }
        let web = AlgWeb { w_inf, ell };
        let (ok, _) = is_admissible(&web.w_inf.annihilator(), &web.extension().transpose());
        if !ok {
            return Err(VeroneseError::InvariantSubspace);
        }
        Ok(web)
    }

    /// The web induced by an endomorphism J on W_inf (ℓ = J restricted).
    pub fn from_endomorphism(j: &Matrix<F>, w_inf: Subspace<F>) -> Result<Self, VeroneseError> {
        let cols: Vec<Vec<F>> = w_inf.basis().iter().map(|b| j.apply(b)).collect();
        Self::new(w_inf.clone(), Matrix::from_cols(w_inf.ambient(), &cols))
    }

    pub fn n(&self) -> usize {
        self.w_inf.ambient()
    }

    /// Codimension r of the planes.
    pub fn codim(&self) -> usize {
        self.n() - self.w_inf.dim()
    }

    /// Extension J of ℓ: agrees with ℓ on W_inf and vanishes on the
    /// coordinate complement.
    pub fn extension(&self) -> Matrix<F> {
        let n = self.n();
        let mut basis = self.w_inf.basis().to_vec();
        let comp = self.w_inf.complement();
        basis.extend(comp.basis().iter().cloned());
        let p = Matrix::from_cols(n, &basis);
        let mut img: Vec<Vec<F>> = (0..self.ell.cols()).map(|k| self.ell.col(k)).collect();
        img.extend((0..comp.dim()).map(|_| vec![F::zero(); n]));
        let m = Matrix::from_cols(n, &img);
        m.mul(&p.inverse().expect("basis and complement span"))
    }
}

/// w(t) = (ℓ + tI) W_inf, and W_inf at ∞.
pub fn web_plane<F: Field>(web: &AlgWeb<F>, t: &Param<F>) -> Subspace<F> {
    match t {
        Param::Infinity => web.w_inf.clone(),
        Param::Finite(t) => Subspace::span(
            web.n(),
            web.w_inf
                .basis()
                .iter()
                .enumerate()
                .map(|(k, b)| web.ell.col(k).into_iter().zip(b).map(|(x, y)| x + &(t.clone() * y)).collect()),
        ),
    }
}

pub fn curves_isomorphic<F: Field>(c1: &VeroneseCurve<F>, c2: &VeroneseCurve<F>) -> Result<bool, VeroneseError> {
    let s1 = (c1.curve.dim(), c1.curve.grade());
    let s2 = (c2.curve.dim(), c2.curve.grade());
    if s1 != s2 {
        return Err(VeroneseError::Mismatch(s1, s2));
    }
    let mut a = c1.char_numbers.clone();
    let mut b = c2.char_numbers.clone();
    a.sort_unstable();
    b.sort_unstable();
    Ok(a == b)
}

fn distinct<F: Field>(xs: &[&F]) -> bool {
    xs.iter().enumerate().all(|(i, a)| xs[i + 1..].iter().all(|b| a != b))
}

/// Factor curves γ_j(t) = Σ t^{i−1} e*_{ij} of the web's representative,
/// from the normal form of the dual couple; nonincreasing block sizes.
pub fn factor_curves<F: Field>(web: &AlgWeb<F>) -> Result<Vec<Vec<Vec<F>>>, VeroneseError> {
    let dual = AdmissibleCouple::new(web.extension().transpose(), web.w_inf.annihilator())
        .map_err(|_| VeroneseError::InvariantSubspace)?;
    let nf = normalize_couple(&dual)?;
    Ok(nf
        .e
        .iter()
        .zip(&nf.dims)
        .map(|(ej, &d)| {
            // coefficient of t^{i−1} is e_ij = (−1)^{d−i} H^{d−i} e_j
            (1..=d)
                .map(|i| {
                    let v = nf.h.pow(d - i).apply(ej);
                    if (d - i) % 2 == 1 {
                        v.into_iter().map(|x| -x).collect()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect())
}

fn eval_factor<F: Field>(coeffs: &[Vec<F>], t: &F) -> Vec<F> {
    let n = coeffs[0].len();
    let mut acc = vec![F::zero(); n];
    for c in coeffs.iter().rev() {
        acc = acc.into_iter().zip(c).map(|(a, x)| a * t + x).collect();
    }
    acc
}

/// Covector bases adapted to the web.
pub fn adapted_basis<F: Field>(web: &AlgWeb<F>, mode: &AdaptedMode<F>) -> Result<Vec<Vec<F>>, VeroneseError> {
    let n = web.n();
    let r = web.codim();
    let factors = factor_curves(web)?;
    let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let out: Vec<Vec<F>> = match mode {
        AdaptedMode::Split { bs, b } => {
            let mut all: Vec<&F> = bs.iter().collect();
            all.push(b);
            if !distinct(&all) {
                return Err(VeroneseError::RepeatedScalars);
            }
            let k = n
                .checked_sub(bs.len())
                .filter(|k| (1..=r).contains(k))
                .ok_or(VeroneseError::ScalarCount { expected: format!("n - k with 1 <= k <= {r}"), got: bs.len() })?;
            // φ: first n_ℓ − 1 slots to factor ℓ ≤ k, then n_ℓ slots
            let mut owner = Vec::new();
            for (l, &d) in dims.iter().enumerate() {
                let cnt = if l < k { d - 1 } else { d };
                owner.extend(std::iter::repeat_n(l, cnt));
            }
            let mut v: Vec<Vec<F>> = owner.iter().zip(bs).map(|(&l, bj)| eval_factor(&factors[l], bj)).collect();
            v.extend((0..k).map(|l| eval_factor(&factors[l], b)));
            v
        }
        AdaptedMode::Layered { cs } => {
            if cs.len() != dims[0] {
                return Err(VeroneseError::ScalarCount { expected: format!("n1 = {}", dims[0]), got: cs.len() });
            }
            if !distinct(&cs.iter().collect::<Vec<_>>()) {
                return Err(VeroneseError::RepeatedScalars);
            }
            let mut v = Vec::new();
            for (jj, c) in cs.iter().enumerate() {
                let kj = dims.iter().filter(|&&d| d > jj).count();
                for f in factors.iter().take(kj) {
                    v.push(eval_factor(f, c));
                }
            }
            v
        }
    };
    debug_assert_eq!(Matrix::from_rows(out.clone()).rank(), n);
    Ok(out)
}
