//! Seeded random instances shared by the CLI, the tests and the acceptance suite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact::matrix::{unit, Matrix};
use crate::exact::scalar::{q, qf, Q};
use crate::exact::subspace::Subspace;
use crate::veronese::AdmissibleCouple;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small integer in [-k, k].
pub fn small_int(rng: &mut Rng8, k: i64) -> Q {
    q(rng.gen_range(-k..=k))
}

/// Small rational with denominator 1..=3.
pub fn small_rational(rng: &mut Rng8, k: i64) -> Q {
    qf(rng.gen_range(-k..=k), rng.gen_range(1..=3))
}

pub fn random_matrix(rng: &mut Rng8, rows: usize, cols: usize, k: i64) -> Matrix {
    Matrix::from_rows((0..rows).map(|_| (0..cols).map(|_| small_int(rng, k)).collect()).collect())
}

pub fn random_invertible(rng: &mut Rng8, n: usize) -> Matrix {
    loop {
        let p = random_matrix(rng, n, n, 2);
        if !p.det().eq(&q(0)) {
            return p;
        }
    }
}

/// Random partition of n into exactly r positive parts.
pub fn random_partition(rng: &mut Rng8, n: usize, r: usize) -> Vec<usize> {
    let mut parts = vec![1; r];
    for _ in 0..n - r {
        let k = rng.gen_range(0..r);
        parts[k] += 1;
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

/// Random admissible couple with prescribed block sizes: a nilpotent
/// normal form perturbed by feedback into W, then conjugated.
pub fn admissible_with_dims(rng: &mut Rng8, dims: &[usize]) -> AdmissibleCouple {
    let n: usize = dims.iter().sum();
    let mut h: Matrix = Matrix::zeros(n, n);
    let mut gens: Vec<Vec<Q>> = Vec::new();
    let mut off = 0;
    for &d in dims {
        // generator at the top of the block, H lowers the index
        for i in 0..d - 1 {
            h.set(off + i, off + i + 1, q(1));
        }
        gens.push(unit(n, off + d - 1));
        off += d;
    }
    let w0 = Subspace::span(n, gens.clone());
    // feedback G = Σ g_k ⊗ α_k with g_k ∈ W
    let mut g: Matrix = Matrix::zeros(n, n);
    for gk in &gens {
        let alpha: Vec<Q> = (0..n).map(|_| small_int(rng, 2)).collect();
        for i in 0..n {
            for j in 0..n {
                if !gk[i].eq(&q(0)) {
                    let v = g.get(i, j).clone() + &gk[i] * &alpha[j];
                    g.set(i, j, v);
                }
            }
        }
    }
    let j0 = h.add(&g);
    let p = random_invertible(rng, n);
    let pinv = p.inverse().unwrap();
    let j = p.mul(&j0).mul(&pinv);
    let w = w0.image_under(&p);
    AdmissibleCouple::new(j, w).expect("constructed couple is admissible")
}

/// Random admissible couple with n ≤ nmax, r ≤ rmax (r ≤ n).
pub fn random_couple(rng: &mut Rng8, nmax: usize, rmax: usize) -> AdmissibleCouple {
    let n = rng.gen_range(1..=nmax);
    let r = rng.gen_range(1..=rmax.min(n));
    if rng.gen_bool(0.5) {
        let dims = random_partition(rng, n, r);
        return admissible_with_dims(rng, &dims);
    }
    loop {
        let j = random_matrix(rng, n, n, 3);
        let wv: Vec<Vec<Q>> = (0..r).map(|_| (0..n).map(|_| small_int(rng, 2)).collect()).collect();
        let w = Subspace::span(n, wv);
        if w.dim() != r {
            continue;
        }
        if let Ok(c) = AdmissibleCouple::new(j, w) {
            return c;
        }
    }
}

/// Random G with Im G ⊆ W.
pub fn feedback_into(rng: &mut Rng8, w: &Subspace) -> Matrix {
    let n = w.ambient();
    let mut g: Matrix = Matrix::zeros(n, n);
    for b in w.basis() {
        let alpha: Vec<Q> = (0..n).map(|_| small_int(rng, 3)).collect();
        for i in 0..n {
            for j in 0..n {
                let v = g.get(i, j).clone() + &b[i] * &alpha[j];
                g.set(i, j, v);
            }
        }
    }
    g
}

/// Random skew matrix with entries in [-k, k].
pub fn random_skew(rng: &mut Rng8, n: usize, k: i64) -> Matrix {
    let mut m: Matrix = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let c = small_int(rng, k);
            m.set(j, i, -c.clone());
            m.set(i, j, c);
        }
    }
    m
}

/// Random pair of bivectors on K^n.
pub fn random_pair(rng: &mut Rng8, n: usize) -> crate::pencil::BivectorPair {
    let b = random_skew(rng, n, 3);
    let b1 = random_skew(rng, n, 3);
    crate::pencil::BivectorPair::from_skew(&b, &b1).expect("skew by construction")
}

/// Random product of Kronecker elementary pairs of the given sizes and a
/// symplectic factor K = A ⊕ Aᵀ, hidden by a random change of basis.
pub fn random_product(rng: &mut Rng8, kron: &[usize], a: Option<&Matrix>) -> crate::pencil::BivectorPair {
    use crate::pencil::{dual_pair, elementary_pair, symplectic_pair_from};
    let mut parts = Vec::new();
    for &n in kron {
        let mut b: Vec<Q> = Vec::new();
        while b.len() < n {
            let x = small_int(rng, 9);
            if !x.eq(&q(0)) && !b.contains(&x) {
                b.push(x);
            }
        }
        parts.push(elementary_pair(&b).expect("distinct nonzero"));
    }
    if let Some(a) = a {
        let (om, om1) = symplectic_pair_from(a).expect("invertible A");
        parts.push(dual_pair(&om, &om1).expect("symplectic"));
    }
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one factor");
    let prod = it.fold(first, |acc, p| acc.direct_sum(&p));
    let p = random_invertible(rng, prod.dim());
    prod.transform(&p)
}

/// Data of a bihamiltonian model with an extra closed 2-form: a flat
/// diagonalisable J on (x, y), closed αs with Jw(∞) = w(0), and ω.
#[derive(Clone, Debug)]
pub struct CompatInstance {
    pub ax: Vec<Q>,
    pub a: Q,
    pub j: crate::tensor::JetTensor11,
    pub alphas: crate::tensor::FoliationSpec,
    pub omega: crate::tensor::JetForm,
}

fn random_poly_in(
    rng: &mut Rng8,
    vars: &std::sync::Arc<Vec<String>>,
    order: i32,
    only: Option<usize>,
    deg: i32,
) -> crate::exact::jet::JetSeries {
    use crate::exact::jet::{monomials, JetSeries};
    let mut s = JetSeries::zero(vars, order);
    for m in monomials(vars.len(), deg) {
        let d: u32 = m.0.iter().map(|&e| e as u32).sum();
        if d == 0 {
            continue;
        }
        if let Some(i) = only {
            if m.0.iter().enumerate().any(|(k, &e)| k != i && e > 0) {
                continue;
            }
        }
        if rng.gen_bool(0.6) {
            s.add_term(m, small_int(rng, 2));
        }
    }
    s
}

/// J with dx_j∘J = a_j dx_j and dy_k∘J = a dy_k + Σ_j g′_kj(x_j) dx_j,
/// α_k = dy_k∘J. ω = d(dh∘J) when `planted` (always compatible), else a
/// random exact form.
pub fn random_compat_instance(rng: &mut Rng8, m: usize, r: usize, order: i32, planted: bool) -> CompatInstance {
    use crate::exact::jet::{var_names, JetSeries};
    use crate::tensor::{tau_circ, FoliationSpec, JetForm, JetTensor11};
    let mut names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    names.extend((1..=r).map(|k| format!("y{k}")));
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let vars = var_names(&refs);
    let n = m + r;
    let mut scal: Vec<Q> = Vec::new();
    while scal.len() < m + 1 {
        let x = small_int(rng, 5);
        if !x.eq(&q(0)) && !scal.contains(&x) {
            scal.push(x);
        }
    }
    let a = scal.pop().unwrap();
    let mut rows = vec![vec![JetSeries::zero(&vars, order); n]; n];
    for j in 0..m {
        rows[j][j] = JetSeries::constant(&vars, order, scal[j].clone());
    }
    for k in 0..r {
        for j in 0..m {
            rows[m + k][j] = random_poly_in(rng, &vars, order, Some(j), 3).deriv(j);
        }
        rows[m + k][m + k] = JetSeries::constant(&vars, order, a.clone());
    }
    let j = JetTensor11::from_rows(&vars, order, rows).expect("square");
    let covs: Vec<Vec<Q>> =
        (0..r).map(|k| j.row_form(m + k).one_form_coeffs().iter().map(|c| c.constant_term()).collect()).collect();
    if !crate::tensor::krylov_full(&j.at_base(), &covs) {
        return random_compat_instance(rng, m, r, order, planted);
    }
    let alphas =
        FoliationSpec::new("alpha", (0..r).map(|k| j.row_form(m + k)).collect()).expect("closed and independent");
    let omega = if planted {
        let h = random_poly_in(rng, &vars, order + 2, None, 3);
        let jh = JetTensor11::from_rows(&vars, order + 2, j.rows().to_vec()).expect("square");
        tau_circ(&JetForm::function(&h).d().unwrap(), &jh).unwrap().d().unwrap().truncate(order)
    } else {
        let coeffs: Vec<JetSeries> = (0..n).map(|_| random_poly_in(rng, &vars, order + 1, None, 2)).collect();
        JetForm::one_form(&vars, order + 1, &coeffs).d().unwrap()
    };
    CompatInstance { ax: scal, a, j, alphas, omega }
}

/// Random polynomial jet of degree ≤ deg with no constant term forced.
pub fn random_series(
    rng: &mut Rng8,
    vars: &std::sync::Arc<Vec<String>>,
    order: i32,
    deg: i32,
) -> crate::exact::jet::JetSeries {
    use crate::exact::jet::{monomials, JetSeries};
    let mut s = JetSeries::zero(vars, order);
    for m in monomials(vars.len(), deg) {
        if rng.gen_bool(0.5) {
            s.add_term(m, small_int(rng, 3));
        }
    }
    s
}

pub fn random_form(
    rng: &mut Rng8,
    vars: &std::sync::Arc<Vec<String>>,
    order: i32,
    grade: usize,
    deg: i32,
) -> crate::tensor::JetForm {
    let mut f = crate::tensor::JetForm::zero(vars, order, grade);
    for m in crate::exterior::subsets(vars.len(), grade) {
        f.add_term(m, random_series(rng, vars, order, deg));
    }
    f
}

pub fn random_tensor(
    rng: &mut Rng8,
    vars: &std::sync::Arc<Vec<String>>,
    order: i32,
    deg: i32,
) -> crate::tensor::JetTensor11 {
    let n = vars.len();
    let rows = (0..n).map(|_| (0..n).map(|_| random_series(rng, vars, order, deg)).collect()).collect();
    crate::tensor::JetTensor11::from_rows(vars, order, rows).expect("square")
}

/// Admissible germ on (s, y): φ₁ = 1 + s·y·p₁, φ_j = 1 + y·p_j, with random
/// polynomials p of degree ≤ deg − 2.
pub fn random_admissible_germ(rng: &mut Rng8, m: usize, order: i32, deg: i32) -> Vec<crate::exact::jet::JetSeries> {
    use crate::exact::jet::{monomials, var_names, JetSeries};
    let sv = var_names(&["s", "y"]);
    (0..m)
        .map(|jx| {
            let mut g = JetSeries::one(&sv, order);
            for mo in monomials(2, deg) {
                let (a, b) = (mo.0[0], mo.0[1]);
                let allowed = b >= 1 && (jx > 0 || a >= 1);
                if allowed && rng.gen_bool(0.4) {
                    g.add_term(mo, small_int(rng, 2));
                }
            }
            g
        })
        .collect()
}

/// Distinct small integers.
pub fn distinct_scalars(rng: &mut Rng8, count: usize) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    while out.len() < count {
        let x = small_int(rng, 4);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}
