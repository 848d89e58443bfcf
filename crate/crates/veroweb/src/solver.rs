//! Formal power-series solutions of the Cauchy problems attached to
//! codimension-r webs in adapted coordinates (x₁…x_m, y₁…y_r), with
//! dx_j∘J = a_j dx_j and dy_k∘J = a dy_k + Σ_j f_kj dx_j.
//!
//! Every problem is solved one homogeneous degree at a time: the degree-k
//! Taylor coefficients of the unknowns enter the degree k−s part of the
//! residual (s the differential order) and the degree k−t part of the data
//! on S = {x₁ = … = x_m} linearly, with coefficients taken at the base
//! point. Each degree is an exact linear solve whose rank is recorded.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::jet::{monomials, var_names, JetSeries, Mono};
use crate::exact::matrix::Matrix;
use crate::exact::poly::UniPoly;
use crate::exact::scalar::{q, Q};
use crate::exterior::subsets;
use crate::tensor::{
    frame_tensor, frame_torsion_condition, nijenhuis, representative, tau_circ, tau_sub, FoliationSpec, FormPoly,
    JetForm, JetTensor11, TensorError,
};

type Vars = Arc<Vec<String>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("frame: {0}")]
    Frame(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("hypothesis residual nonzero at order {order}: {what}")]
    Residual { what: String, order: i32 },
    #[error("degree {degree}: rank {rank} below {unknowns} unknowns")]
    Certificate { degree: usize, rank: usize, unknowns: usize },
    #[error("degree {degree}: the linear system has no solution")]
    Inconsistent { degree: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Rank record of one degree of a solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCert {
    pub degree: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
}

/// Adapted coordinates and eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFrame {
    pub ax: Vec<Q>,
    pub a: Q,
    pub r: usize,
    pub order: i32,
    vars: Vars,
    s_vars: Vars,
}

impl ProblemFrame {
    pub fn new(ax: &[Q], a: &Q, r: usize, order: i32) -> Result<Self, SolveError> {
        let m = ax.len();
        if m == 0 || r == 0 {
            return Err(SolveError::Frame("need at least one x and one y coordinate".into()));
        }
        if order < 2 {
            return Err(SolveError::Frame(format!("order {order} below 2")));
        }
        let mut all = ax.to_vec();
        all.push(a.clone());
        for (i, x) in all.iter().enumerate() {
            if all[..i].contains(x) {
                return Err(SolveError::Frame("scalars must be pairwise distinct".into()));
            }
        }
        let mut names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        let mut s_names = vec!["s".to_string()];
        for k in 1..=r {
            let y = if r == 1 { "y".to_string() } else { format!("y{k}") };
            names.push(y.clone());
            s_names.push(y);
        }
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let srefs: Vec<&str> = s_names.iter().map(|s| s.as_str()).collect();
        Ok(ProblemFrame { ax: ax.to_vec(), a: a.clone(), r, order, vars: var_names(&refs), s_vars: var_names(&srefs) })
    }

    pub fn m(&self) -> usize {
        self.ax.len()
    }

    pub fn n(&self) -> usize {
        self.ax.len() + self.r
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Coordinates (s, y) on S = {x₁ = … = x_m}.
    pub fn s_vars(&self) -> &Vars {
        &self.s_vars
    }

    /// Restriction of a function to S.
    pub fn restrict(&self, f: &JetSeries) -> JetSeries {
        let ord = f.order();
        let subs: Vec<JetSeries> = (0..self.n())
            .map(|i| JetSeries::var(&self.s_vars, ord, if i < self.m() { 0 } else { i - self.m() + 1 }))
            .collect();
        f.compose(&subs)
    }

    /// Constant diagonal tensor J₀.
    pub fn j0(&self, order: i32) -> JetTensor11 {
        let mut d = self.ax.clone();
        d.extend(std::iter::repeat_n(self.a.clone(), self.r));
        JetTensor11::constant(&self.vars, order, &Matrix::diag(&d))
    }

    pub fn dy_top(&self, order: i32) -> JetForm {
        let mut w = JetForm::function(&JetSeries::one(&self.vars, order));
        for k in 0..self.r {
            w = w.wedge(&JetForm::dx(&self.vars, order, self.m() + k));
        }
        w
    }

    /// J with dy_k∘J = a dy_k + Σ_j f[k][j] dx_j.
    pub fn tensor(&self, f: &[Vec<JetSeries>]) -> Result<JetTensor11, SolveError> {
        if f.len() != self.r || f.iter().any(|row| row.len() != self.m()) {
            return Err(SolveError::Frame("need an r × m array of coefficients".into()));
        }
        let betas: Vec<JetForm> = f
            .iter()
            .map(|row| {
                let mut c = row.clone();
                c.extend((0..self.r).map(|_| JetSeries::zero(&self.vars, row[0].order())));
                JetForm::one_form(&self.vars, row[0].order(), &c)
            })
            .collect();
        Ok(frame_tensor(&self.ax, &self.a, &betas)?)
    }

    /// The coefficients f_kj of a tensor in frame form, after checking the
    /// shape, N_J ≡ 0, dy∧dα̃_k ≡ 0 and f_1j(0) > 0.
    pub fn coefficients(&self, j: &JetTensor11) -> Result<Vec<Vec<JetSeries>>, SolveError> {
        let (m, n) = (self.m(), self.n());
        if j.vars() != &self.vars {
            return Err(SolveError::Frame("tensor is not on the frame coordinates".into()));
        }
        for row in 0..n {
            for col in 0..n {
                let g = j.get(row, col);
                let expected = if row == col {
                    Some(if row < m { self.ax[row].clone() } else { self.a.clone() })
                } else if row < m || col >= m {
                    Some(Q::zero())
                } else {
                    None
                };
                if let Some(c) = expected {
                    if *g != JetSeries::constant(&self.vars, g.order(), c) {
                        return Err(SolveError::Frame(format!("entry ({row},{col}) is not in frame form")));
                    }
                }
            }
        }
        let f: Vec<Vec<JetSeries>> = (0..self.r).map(|k| (0..m).map(|c| j.get(m + k, c).clone()).collect()).collect();
        if f[0].iter().any(|x| !x.constant_term().is_positive()) {
            return Err(SolveError::Precondition("f_1j must be positive at the base point".into()));
        }
        let tn = nijenhuis(j)?;
        if !tn.is_zero() {
            return Err(SolveError::Residual { what: "Nijenhuis torsion".into(), order: tn.order() });
        }
        let top = self.dy_top(j.order());
        for k in 0..self.r {
            let w = top.wedge(&j.row_form(m + k).d()?);
            if !w.is_zero() {
                return Err(SolveError::Residual { what: format!("dy∧d(dy_{}∘J)", k + 1), order: w.order() });
            }
        }
        Ok(f)
    }
}

fn form_coeffs(f: &JetForm) -> Vec<JetSeries> {
    subsets(f.nvars(), f.grade())
        .into_iter()
        .map(|m| f.terms().get(&m).cloned().unwrap_or_else(|| JetSeries::zero(f.vars(), f.order())))
        .collect()
}

/// Homogeneous monomials of one degree, cached per (nvars, degree).
struct MonoCache(HashMap<(usize, usize), Vec<Mono>>);

impl MonoCache {
    fn get(&mut self, nvars: usize, d: i64) -> &[Mono] {
        if d < 0 {
            return &[];
        }
        let d = d as usize;
        self.0
            .entry((nvars, d))
            .or_insert_with(|| monomials(nvars, d as i32).into_iter().filter(|m| m.degree() as usize == d).collect())
    }

    fn extract(&mut self, s: &[JetSeries], d: i64, out: &mut Vec<Q>) {
        for x in s {
            for m in self.get(x.nvars(), d).to_vec() {
                out.push(x.coeff(&m.0));
            }
        }
    }
}

type Residual<'a> = Box<dyn Fn(&[JetSeries]) -> Result<Vec<JetSeries>, SolveError> + 'a>;
type Data<'a> = Box<dyn Fn(&[JetSeries]) -> Vec<JetSeries> + 'a>;

/// One Cauchy problem for `unknowns` functions on the frame coordinates.
struct CauchyProblem<'a> {
    vars: Vars,
    unknowns: usize,
    first: usize,
    last: usize,
    eq_shift: i64,
    residual: Residual<'a>,
    data_shift: i64,
    data: Data<'a>,
    targets: Vec<JetSeries>,
    /// only record ranks; do not require a solution
    rank_only: bool,
}

fn zeros(vars: &Vars, order: i32, k: usize) -> Vec<JetSeries> {
    vec![JetSeries::zero(vars, order); k]
}

impl CauchyProblem<'_> {
    fn run(&self) -> Result<(Vec<JetSeries>, Vec<DegreeCert>), SolveError> {
        let top = self.last as i32;
        let mut u = zeros(&self.vars, top, self.unknowns);
        let mut cache = MonoCache(HashMap::new());
        let mut certs = Vec::new();
        let nv = self.vars.len();
        for k in self.first..=self.last {
            let ki = k as i64;
            let ord = k as i32;
            let cur: Vec<JetSeries> = u.iter().map(|x| x.truncate(ord)).collect();
            // below the differential order the equations have no terms yet
            let with_eq = ki >= self.eq_shift;
            let mut rhs = Vec::new();
            if with_eq {
                cache.extract(&(self.residual)(&cur)?, ki - self.eq_shift, &mut rhs);
            }
            let d0 = (self.data)(&cur);
            let diff: Vec<JetSeries> =
                d0.iter().zip(&self.targets).map(|(x, t)| x.sub(&t.truncate(x.order()))).collect();
            cache.extract(&diff, ki - self.data_shift, &mut rhs);

            // linearise around the part of u that can meet a degree-k term
            let low: Vec<JetSeries> =
                u.iter().map(|x| x.truncate((self.eq_shift - 1).max(0) as i32).with_order(ord)).collect();
            let r_low = if with_eq { (self.residual)(&low)? } else { Vec::new() };
            let d_low = (self.data)(&low);
            let monos = cache.get(nv, ki).to_vec();
            let mut cols: Vec<Vec<Q>> = Vec::new();
            for i in 0..self.unknowns {
                for mo in &monos {
                    let mut probe = low.clone();
                    probe[i].add_term(mo.clone(), Q::one());
                    let dr: Vec<JetSeries> = if with_eq {
                        (self.residual)(&probe)?.iter().zip(&r_low).map(|(a, b)| a.sub(b)).collect()
                    } else {
                        Vec::new()
                    };
                    let dd: Vec<JetSeries> = (self.data)(&probe).iter().zip(&d_low).map(|(a, b)| a.sub(b)).collect();
                    let mut col = Vec::new();
                    cache.extract(&dr, ki - self.eq_shift, &mut col);
                    cache.extract(&dd, ki - self.data_shift, &mut col);
                    cols.push(col);
                }
            }
            let a = Matrix::from_cols(rhs.len(), &cols);
            let rank = a.rank();
            certs.push(DegreeCert { degree: k, unknowns: cols.len(), equations: rhs.len(), rank });
            if self.rank_only {
                continue;
            }
            if rank < cols.len() {
                return Err(SolveError::Certificate { degree: k, rank, unknowns: cols.len() });
            }
            let b: Vec<Q> = rhs.iter().map(|x| -x.clone()).collect();
            let x = a.solve(&b).ok_or(SolveError::Inconsistent { degree: k })?;
            let mut it = x.into_iter();
            for ui in u.iter_mut() {
                for mo in &monos {
                    ui.add_term(mo.clone(), it.next().unwrap());
                }
            }
        }
        Ok((u, certs))
    }
}

/// A closed 1-form β = dg with its potential and certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormSolution {
    pub potential: JetSeries,
    pub beta: JetForm,
    pub residual_order: i32,
    pub certificates: Vec<DegreeCert>,
}

fn restrict_form_closed(frame: &ProblemFrame, datum: &[JetSeries]) -> Result<(), SolveError> {
    let sv = frame.s_vars();
    let ord = datum.iter().map(|d| d.order()).min().unwrap_or(frame.order);
    let mut c = vec![datum[..frame.m()].iter().fold(JetSeries::zero(sv, ord), |acc, x| acc.add(x))];
    c.extend(datum[frame.m()..].iter().cloned());
    let w = JetForm::one_form(sv, ord, &c);
    let dw = w.d()?;
    if !dw.is_zero() {
        return Err(SolveError::Residual { what: "datum restricted to S is not closed".into(), order: dw.order() });
    }
    Ok(())
}

fn check_datum(frame: &ProblemFrame, datum: &[JetSeries], len: usize) -> Result<(), SolveError> {
    if datum.len() != len {
        return Err(SolveError::Frame(format!("datum needs {len} functions")));
    }
    if datum.iter().any(|d| d.vars() != frame.s_vars()) {
        return Err(SolveError::Frame("datum must be on the S coordinates".into()));
    }
    Ok(())
}

/// Closed potential-type problem: find g with
/// (d(dg∘J) + dg∧α₀ − σ)∧dy ≡ 0 and dg|_S = datum.
fn potential_problem(
    frame: &ProblemFrame,
    j: &JetTensor11,
    lower: Option<&JetForm>,
    source: Option<&JetForm>,
    datum: &[JetSeries],
) -> Result<ClosedFormSolution, SolveError> {
    let n = frame.n();
    let last = frame.order as usize + 1;
    let top = frame.dy_top(frame.order);
    let residual = |u: &[JetSeries]| -> Result<Vec<JetSeries>, SolveError> {
        let beta = JetForm::function(&u[0]).d()?;
        let mut w = tau_circ(&beta, j)?.d()?;
        if let Some(a0) = lower {
            w = w.add(&beta.wedge(a0));
        }
        if let Some(s) = source {
            w = w.sub(s);
        }
        Ok(form_coeffs(&w.wedge(&top)))
    };
    let data = |u: &[JetSeries]| -> Vec<JetSeries> { (0..n).map(|i| frame.restrict(&u[0].deriv(i))).collect() };
    let prob = CauchyProblem {
        vars: frame.vars().clone(),
        unknowns: 1,
        first: 1,
        last,
        eq_shift: 2,
        residual: Box::new(residual),
        data_shift: 1,
        data: Box::new(data),
        targets: datum.to_vec(),
        rank_only: false,
    };
    let (u, certificates) = prob.run()?;
    let g = u.into_iter().next().unwrap();
    let beta = JetForm::function(&g).d()?;
    Ok(ClosedFormSolution { potential: g, beta, residual_order: frame.order - 1, certificates })
}

/// Closed β with (d(β∘J) + β∧α₀)∧dy ≡ 0 and β restricted to S (as a
/// section of the cotangent bundle) equal to `datum` (n functions of (s, y)).
pub fn solve_closed_form(
    frame: &ProblemFrame,
    j: &JetTensor11,
    alpha0: Option<&JetForm>,
    datum: &[JetSeries],
) -> Result<ClosedFormSolution, SolveError> {
    frame.coefficients(j)?;
    check_datum(frame, datum, frame.n())?;
    restrict_form_closed(frame, datum)?;
    let sol = potential_problem(frame, j, alpha0, None, datum)?;
    let top = frame.dy_top(frame.order);
    let mut w = tau_circ(&sol.beta, j)?.d()?;
    if let Some(a0) = alpha0 {
        w = w.add(&sol.beta.wedge(a0));
    }
    debug_assert!(w.wedge(&top).is_zero());
    Ok(sol)
}

/// Closed β with d(β∘J)∧dy ≡ dx₁∧γ∧dy, for closed γ with
/// d(γ∘J)∧dx₁∧dy ≡ 0; normalised by β|_S = 0.
pub fn solve_rhs_form(
    frame: &ProblemFrame,
    j: &JetTensor11,
    gamma: &JetForm,
) -> Result<ClosedFormSolution, SolveError> {
    frame.coefficients(j)?;
    if gamma.grade() != 1 || gamma.vars() != frame.vars() {
        return Err(SolveError::Frame("γ must be a 1-form on the frame".into()));
    }
    let dg = gamma.d()?;
    if !dg.is_zero() {
        return Err(SolveError::Residual { what: "dγ".into(), order: dg.order() });
    }
    let dx1 = JetForm::dx(frame.vars(), frame.order, 0);
    let top = frame.dy_top(frame.order);
    let hyp = tau_circ(gamma, j)?.d()?.wedge(&dx1).wedge(&top);
    if !hyp.is_zero() {
        return Err(SolveError::Residual { what: "d(γ∘J)∧dx₁∧dy".into(), order: hyp.order() });
    }
    let source = dx1.wedge(gamma);
    let datum = zeros(frame.s_vars(), frame.order, frame.n());
    potential_problem(frame, j, None, Some(&source), &datum)
}

/// φ with α₁∧…∧α_r∧(d(dφ∘J) − ω) ≡ 0, φ(0) = 0, dφ|_S = 0.
pub fn solve_potential(
    frame: &ProblemFrame,
    j: &JetTensor11,
    e: &FoliationSpec,
    omega: &JetForm,
) -> Result<ClosedFormSolution, SolveError> {
    frame.coefficients(j)?;
    if omega.grade() != 2 || omega.vars() != frame.vars() {
        return Err(SolveError::Frame("ω must be a 2-form on the frame".into()));
    }
    if e.codim() != frame.r || e.covectors[0].vars() != frame.vars() {
        return Err(SolveError::Frame("foliation does not match the frame".into()));
    }
    let top = frame.dy_top(frame.order);
    for (k, al) in e.covectors.iter().enumerate() {
        if !al.wedge(&top).is_zero() {
            return Err(SolveError::Frame(format!("covector {} is not a combination of dy", k + 1)));
        }
    }
    let dw = omega.d()?;
    if !dw.is_zero() {
        return Err(SolveError::Residual { what: "dω".into(), order: dw.order() });
    }
    let atop = e.top_form();
    let hyp = tau_sub(omega, j)?.d()?.wedge(&atop);
    if !hyp.is_zero() {
        return Err(SolveError::Residual { what: "dω_J∧α₁∧…∧α_r".into(), order: hyp.order() });
    }
    let datum = zeros(frame.s_vars(), frame.order, frame.n());
    potential_problem(frame, j, None, Some(omega), &datum)
}

/// Families β_q = dg_q with (d(β_q∘J) + Σ_ℓ β_ℓ∧ρ_ℓq)∧dy ≡ 0.
fn coupled_problem<'a>(
    frame: &'a ProblemFrame,
    j: &'a JetTensor11,
    rho: &'a [Vec<JetForm>],
    data: &[Vec<JetSeries>],
    rank_only: bool,
) -> CauchyProblem<'a> {
    let s = rho.len();
    let n = frame.n();
    let top = frame.dy_top(frame.order);
    let residual = move |u: &[JetSeries]| -> Result<Vec<JetSeries>, SolveError> {
        let betas: Vec<JetForm> = u.iter().map(|g| JetForm::function(g).d()).collect::<Result<_, _>>()?;
        let mut out = Vec::new();
        for qi in 0..s {
            let mut w = tau_circ(&betas[qi], j)?.d()?;
            for (l, bl) in betas.iter().enumerate() {
                w = w.add(&bl.wedge(&rho[l][qi]));
            }
            out.extend(form_coeffs(&w.wedge(&top)));
        }
        Ok(out)
    };
    let datafn = move |u: &[JetSeries]| -> Vec<JetSeries> {
        u.iter().flat_map(|g| (0..n).map(|i| frame.restrict(&g.deriv(i))).collect::<Vec<_>>()).collect()
    };
    CauchyProblem {
        vars: frame.vars().clone(),
        unknowns: s,
        first: 1,
        last: frame.order as usize + 1,
        eq_shift: 2,
        residual: Box::new(residual),
        data_shift: 1,
        data: Box::new(datafn),
        targets: data.iter().flatten().cloned().collect(),
        rank_only,
    }
}

/// Coupled system: solutions are unique given their restrictions to S;
/// existence is not guaranteed and is reported as `Inconsistent`.
pub fn solve_coupled(
    frame: &ProblemFrame,
    j: &JetTensor11,
    rho: &[Vec<JetForm>],
    data: &[Vec<JetSeries>],
) -> Result<Vec<ClosedFormSolution>, SolveError> {
    frame.coefficients(j)?;
    if rho.iter().any(|r| r.len() != rho.len()) || data.len() != rho.len() {
        return Err(SolveError::Frame("ρ must be square and match the data".into()));
    }
    for d in data {
        check_datum(frame, d, frame.n())?;
        restrict_form_closed(frame, d)?;
    }
    let (u, certs) = coupled_problem(frame, j, rho, data, false).run()?;
    u.into_iter()
        .map(|g| {
            Ok(ClosedFormSolution {
                beta: JetForm::function(&g).d()?,
                potential: g,
                residual_order: frame.order - 1,
                certificates: certs.clone(),
            })
        })
        .collect()
}

/// Per-degree ranks of the homogeneous coupled system with data on S: full
/// column rank at every degree is formal uniqueness.
pub fn coupled_uniqueness(
    frame: &ProblemFrame,
    j: &JetTensor11,
    rho: &[Vec<JetForm>],
) -> Result<Vec<DegreeCert>, SolveError> {
    frame.coefficients(j)?;
    let data = vec![zeros(frame.s_vars(), frame.order, frame.n()); rho.len()];
    let (_, certs) = coupled_problem(frame, j, rho, &data, true).run()?;
    Ok(certs)
}

/// Solution of the codimension-one versal system with its boundary germ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VersalSolution {
    pub f: Vec<JetSeries>,
    pub residual_order: i32,
    pub certificates: Vec<DegreeCert>,
}

fn tilde_alpha(frame: &ProblemFrame, f: &[JetSeries]) -> JetForm {
    let ord = f.iter().map(|x| x.order()).min().unwrap();
    let mut c = f.to_vec();
    c.push(JetSeries::zero(frame.vars(), ord));
    JetForm::one_form(frame.vars(), ord, &c)
}

/// Residual forms of the versal system: dα̃∧dy and
/// (d(α̃∘J₀) − α̃∧∂α̃/∂y)∧dy.
pub fn versal_residual(frame: &ProblemFrame, f: &[JetSeries]) -> Result<Vec<JetForm>, SolveError> {
    let ord = f.iter().map(|x| x.order()).min().unwrap();
    let at = tilde_alpha(frame, f);
    let dy = frame.dy_top(ord);
    let first = at.d()?.wedge(&dy);
    let second = tau_circ(&at, &frame.j0(ord))?.d()?.sub(&at.wedge(&at.deriv_coeffs(frame.m()))).wedge(&dy);
    Ok(vec![first, second])
}

/// Admissibility of a germ on S₀ = {x₁ = … = x_{n−1}}: every φ_j = 1 on
/// y = 0 and φ₁ = 1 on s = 0.
pub fn check_admissible(frame: &ProblemFrame, germ: &[JetSeries]) -> Result<(), SolveError> {
    if frame.r != 1 {
        return Err(SolveError::Frame("versal models need r = 1".into()));
    }
    check_datum(frame, germ, frame.m())?;
    for (jx, g) in germ.iter().enumerate() {
        if g.set_zero(1) != JetSeries::one(frame.s_vars(), g.order()) {
            return Err(SolveError::Precondition(format!(
                "component {} is not 1 on the curve x₁ = … = x_{{n−1}}, y = 0",
                jx + 1
            )));
        }
    }
    if germ[0].set_zero(0) != JetSeries::one(frame.s_vars(), germ[0].order()) {
        return Err(SolveError::Precondition("first component is not 1 on the curve x = 0".into()));
    }
    Ok(())
}

/// The unique solution of the versal system with f_j|_{S₀} = germ_j.
pub fn solve_versal(frame: &ProblemFrame, germ: &[JetSeries]) -> Result<VersalSolution, SolveError> {
    check_admissible(frame, germ)?;
    let m = frame.m();
    let residual = |u: &[JetSeries]| -> Result<Vec<JetSeries>, SolveError> {
        Ok(versal_residual(frame, u)?.iter().flat_map(form_coeffs).collect())
    };
    let data = |u: &[JetSeries]| -> Vec<JetSeries> { u.iter().map(|x| frame.restrict(x)).collect() };
    let prob = CauchyProblem {
        vars: frame.vars().clone(),
        unknowns: m,
        first: 0,
        last: frame.order as usize,
        eq_shift: 1,
        residual: Box::new(residual),
        data_shift: 0,
        data: Box::new(data),
        targets: germ.to_vec(),
        rank_only: false,
    };
    let (f, certificates) = prob.run()?;
    Ok(VersalSolution { f, residual_order: frame.order - 1, certificates })
}

/// J with dx_j∘J = a_j dx_j, dy∘J = a dy + Σ f_j dx_j, and
/// γ(t) = −Σ_j ∏_{k≠j}(t + a_k) f_j dx_j + ∏_k (t + a_k) dy.
pub fn versal_to_web(frame: &ProblemFrame, sol: &VersalSolution) -> Result<(JetTensor11, FormPoly), SolveError> {
    let j = frame.tensor(std::slice::from_ref(&sol.f))?;
    let vars = frame.vars();
    let ord = j.order();
    let m = frame.m();
    let lin = |k: usize| UniPoly::linear(frame.ax[k].clone());
    let full = (0..m).fold(UniPoly::one(), |acc, k| acc.mul(&lin(k)));
    let mut curve: FormPoly = vec![JetForm::zero(vars, ord, 1); m + 1];
    for d in 0..=m {
        curve[d] = JetForm::dx(vars, ord, m).scale(&full.coeff(d));
    }
    for (jx, fj) in sol.f.iter().enumerate() {
        let others = (0..m).filter(|&k| k != jx).fold(UniPoly::one(), |acc, k| acc.mul(&lin(k)));
        let w = JetForm::dx(vars, ord, jx).mul_fn(fj);
        for d in 0..m {
            curve[d] = curve[d].sub(&w.scale(&others.coeff(d)));
        }
    }
    Ok((j, curve))
}

/// Independent check: the representative computed from J and dy.
pub fn versal_curve_matches(frame: &ProblemFrame, j: &JetTensor11, curve: &FormPoly) -> Result<bool, SolveError> {
    let dy = JetForm::dx(frame.vars(), j.order(), frame.m());
    Ok(&representative(j, &dy)? == curve)
}

/// Also checks the versal system through the torsion criterion.
pub fn versal_torsion_free(frame: &ProblemFrame, sol: &VersalSolution) -> Result<bool, SolveError> {
    let j = frame.tensor(std::slice::from_ref(&sol.f))?;
    let at = tilde_alpha(frame, &sol.f);
    let cond = frame_torsion_condition(&frame.ax, &frame.a, &[at])?;
    Ok(nijenhuis(&j)?.is_zero() && cond.iter().all(|c| c.is_zero()))
}

/// Series solution of y′ = F(y), y(0) = 0 in one variable.
fn ode_series(vars: &Vars, order: i32, rhs: impl Fn(&JetSeries) -> JetSeries) -> JetSeries {
    let mut h = JetSeries::zero(vars, order);
    for _ in 0..=order {
        h = rhs(&h).integrate(0).truncate(order);
    }
    h
}

/// Chart change (h₁, h₂) and the normalised coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartNormalization {
    pub h1: JetSeries,
    pub h2: JetSeries,
    pub f: Vec<JetSeries>,
}

/// Coordinates (h₁(x₁), …, h₁(x_{n−1}), h₂(y)) in which f₁ = 1 on
/// {x = 0} and on {x₁ = … = x_{n−1}, y = 0}.
pub fn normalize_chart(f: &[JetSeries]) -> Result<ChartNormalization, SolveError> {
    if f.is_empty() {
        return Err(SolveError::Frame("no coefficients".into()));
    }
    let vars = f[0].vars().clone();
    let n = vars.len();
    let m = n - 1;
    if f.len() != m {
        return Err(SolveError::Frame(format!("need {m} coefficients")));
    }
    if !f[0].constant_term().is_positive() {
        return Err(SolveError::Precondition("f₁ must be positive at the base point".into()));
    }
    let ord = f.iter().map(|x| x.order()).min().unwrap();
    // the curve x₁ = … = x_{n−1}, y = 0, parametrised by t
    let tv = var_names(&["t"]);
    let t = JetSeries::var(&tv, ord, 0);
    let on_r = |g: &JetSeries| -> JetSeries {
        let mut subs = vec![t.clone(); m];
        subs.push(JetSeries::zero(&tv, ord));
        g.compose(&subs)
    };
    let r0 = on_r(&f[0]);
    if f[1..].iter().any(|g| on_r(g) != r0) {
        return Err(SolveError::Precondition("the f_j differ on the curve x₁ = … = x_{n−1}, y = 0".into()));
    }
    let on_y = |g: &JetSeries, h: &JetSeries| -> JetSeries {
        let mut subs = vec![JetSeries::zero(&tv, h.order()); m];
        subs.push(h.clone());
        g.compose(&subs)
    };
    // h₂′ = f₁(0, …, 0, h₂)
    let h2 = ode_series(&tv, ord, |h| on_y(&f[0], h));
    let c = h2.deriv(0).constant_term();
    // h₁′ = h₂′(0) / f₁(h₁, …, h₁, 0)
    let h1 = ode_series(&tv, ord, |h| {
        let mut subs = vec![h.clone(); m];
        subs.push(JetSeries::zero(&tv, h.order()));
        f[0].compose(&subs).inverse().expect("unit").scale(&c)
    });
    // pull back: f′_j = h₁′(x_j) h₂′(y)⁻¹ f_j(h₁(x), h₂(y))
    let mut subs: Vec<JetSeries> = (0..m).map(|i| h1.compose(&[JetSeries::var(&vars, ord, i)])).collect();
    subs.push(h2.compose(&[JetSeries::var(&vars, ord, m)]));
    let inv_h2p = h2.deriv(0).compose(&[JetSeries::var(&vars, ord, m)]).inverse().expect("unit");
    let out: Vec<JetSeries> = f
        .iter()
        .enumerate()
        .map(|(jx, fj)| h1.deriv(0).compose(&[JetSeries::var(&vars, ord, jx)]).mul(&inv_h2p).mul(&fj.compose(&subs)))
        .collect();
    Ok(ChartNormalization { h1, h2, f: out })
}

fn rational_root(x: &Q, d: u32) -> Vec<Q> {
    if x.is_zero() {
        return vec![Q::zero()];
    }
    let root = |v: &BigInt| -> Option<BigInt> {
        let r = v.abs().nth_root(d);
        (r.pow(d) == v.abs()).then_some(r)
    };
    let (Some(nu), Some(de)) = (root(x.numer()), root(x.denom())) else {
        return vec![];
    };
    let b = Q::new(nu, de);
    if d.is_multiple_of(2) {
        if x.is_negative() {
            return vec![];
        }
        vec![b.clone(), -b]
    } else if x.is_negative() {
        vec![-b]
    } else {
        vec![b]
    }
}

/// b ≠ 0 with φ̄(s, y) = φ(bs, by) on all terms up to `order`.
pub fn germ_equiv(phi: &[JetSeries], phibar: &[JetSeries], order: i32) -> Option<Q> {
    if phi.len() != phibar.len() || phi.is_empty() {
        return None;
    }
    let matches = |b: &Q| {
        phi.iter().zip(phibar).all(|(p, pb)| {
            monomials(p.nvars(), order).iter().all(|mo| {
                let d = mo.degree() as i32;
                pb.coeff(&mo.0) == p.coeff(&mo.0) * b.clone().pow(d)
            })
        })
    };
    // the lowest degree with a nonzero coefficient fixes b up to roots of 1
    for d in 1..=order {
        for (p, pb) in phi.iter().zip(phibar) {
            for mo in monomials(p.nvars(), d).iter().filter(|m| m.degree() as i32 == d) {
                let (c, cb) = (p.coeff(&mo.0), pb.coeff(&mo.0));
                if c.is_zero() && cb.is_zero() {
                    continue;
                }
                if c.is_zero() || cb.is_zero() {
                    return None;
                }
                let mut cands = rational_root(&(cb / c), d as u32);
                cands.sort_by(|a, b| b.cmp(a));
                return cands.into_iter().find(|b| matches(b));
            }
        }
    }
    matches(&Q::one()).then(Q::one)
}

/// Derivative of ∏(t + a_k) with its discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ramification {
    pub poly: UniPoly,
    pub degree: usize,
    pub discriminant: Q,
}

pub fn ramification_polynomial(a: &[Q]) -> Result<Ramification, SolveError> {
    for (i, x) in a.iter().enumerate() {
        if a[..i].contains(x) {
            return Err(SolveError::Frame("scalars must be distinct".into()));
        }
    }
    if a.len() < 2 {
        return Err(SolveError::Frame("need at least two scalars".into()));
    }
    let prod = a.iter().fold(UniPoly::one(), |acc, x| acc.mul(&UniPoly::linear(x.clone())));
    let poly = prod.derivative();
    let discriminant = poly.discriminant();
    let degree = poly.degree().unwrap_or(0);
    debug_assert!(degree == 0 || !discriminant.is_zero());
    Ok(Ramification { poly, degree, discriminant })
}

/// Germ φ(s, y) composed with the homothety (s, y) ↦ (bs, by).
pub fn scale_germ(phi: &[JetSeries], b: &Q) -> Vec<JetSeries> {
    phi.iter()
        .map(|p| {
            let mut out = JetSeries::zero(p.vars(), p.order());
            for (mo, c) in p.terms() {
                out.add_term(mo.clone(), c * b.clone().pow(mo.degree() as i32));
            }
            out
        })
        .collect()
}

/// Constant germ (1, …, 1).
pub fn flat_germ(frame: &ProblemFrame) -> Vec<JetSeries> {
    vec![JetSeries::one(frame.s_vars(), frame.order); frame.m()]
}

pub fn default_order() -> i32 {
    6
}

pub fn q_list(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::qf;
    use crate::tensor::verify_web;

    fn series(vars: &Vars, order: i32, terms: &[(&[u8], i64)]) -> JetSeries {
        JetSeries::from_terms(vars, order, terms.iter().map(|(m, c)| (m.to_vec(), q(*c))).collect::<Vec<_>>())
    }

    fn var(vars: &Vars, order: i32, i: usize) -> JetSeries {
        JetSeries::var(vars, order, i)
    }

    /// J with y-row entries F′_j(x_j) where F_j = x_j + c_j x_j² + d_j x_j³.
    fn separable(frame: &ProblemFrame, order: i32, cs: &[(i64, i64)]) -> (JetTensor11, Vec<JetSeries>) {
        let vars = frame.vars();
        let mut big_f = Vec::new();
        let mut f = Vec::new();
        for (jx, &(c, d)) in cs.iter().enumerate() {
            let x = var(vars, order + 1, jx);
            let fj = x.add(&x.mul(&x).scale(&q(c))).add(&x.mul(&x).mul(&x).scale(&q(d)));
            f.push(fj.deriv(jx).truncate(order));
            big_f.push(fj);
        }
        (frame.tensor(&[f]).unwrap(), big_f)
    }

    /// g = Σ h_j(x_j) + k(v) with v = y + Σ F_j(x_j)/(a − a_j): dv∘J = a dv.
    fn manufactured(frame: &ProblemFrame, big_f: &[JetSeries], order: i32, shift: i64) -> JetSeries {
        let vars = frame.vars();
        let m = frame.m();
        let mut v = var(vars, order, m);
        for (jx, fj) in big_f.iter().enumerate() {
            v = v.add(&fj.truncate(order).scale(&(Q::one() / (&frame.a - &frame.ax[jx]))));
        }
        let mut g = v.mul(&v).scale(&q(shift)).add(&v.mul(&v).mul(&v));
        for jx in 0..m {
            let x = var(vars, order, jx);
            g = g.add(&x.mul(&x).scale(&q(jx as i64 + shift))).add(&x.scale(&q(2)));
        }
        g
    }

    fn data_of(frame: &ProblemFrame, g: &JetSeries) -> Vec<JetSeries> {
        (0..frame.n()).map(|i| frame.restrict(&g.deriv(i))).collect()
    }

    #[test]
    fn frame_rejects_repeated_scalars_and_bad_sign() {
        assert!(ProblemFrame::new(&q_list(&[0, 1]), &q(1), 1, 4).is_err());
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(3), 1, 4).unwrap();
        let vars = frame.vars().clone();
        let f = vec![JetSeries::constant(&vars, 4, q(-1)), JetSeries::one(&vars, 4)];
        let j = frame.tensor(&[f]).unwrap();
        assert!(matches!(frame.coefficients(&j), Err(SolveError::Precondition(_))));
    }

    #[test]
    fn frame_rejects_torsion() {
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(3), 1, 4).unwrap();
        let vars = frame.vars().clone();
        // f₁ depending on x₂ breaks dy∧dα̃ = 0
        let f = vec![JetSeries::one(&vars, 4).add(&var(&vars, 4, 1)), JetSeries::one(&vars, 4)];
        let j = frame.tensor(&[f]).unwrap();
        assert!(matches!(frame.coefficients(&j), Err(SolveError::Residual { .. })));
    }

    #[test]
    fn manufactured_closed_forms_round_trip() {
        let order = 5;
        for (ax, a) in [(vec![0, 1], 3), (vec![0, 2, -1], 1)] {
            let frame = ProblemFrame::new(&q_list(&ax), &q(a), 1, order).unwrap();
            let cs: Vec<(i64, i64)> = (0..ax.len()).map(|k| (k as i64 - 1, 1)).collect();
            let (j, big_f) = separable(&frame, order, &cs);
            let g = manufactured(&frame, &big_f, order + 1, 2);
            let sol = solve_closed_form(&frame, &j, None, &data_of(&frame, &g)).unwrap();
            assert_eq!(sol.potential, g);
            assert!(sol.certificates.iter().all(|c| c.rank == c.unknowns));
            let top = frame.dy_top(order);
            assert!(tau_circ(&sol.beta, &j).unwrap().d().unwrap().wedge(&top).is_zero());
        }
    }

    #[test]
    fn linear_data_gives_constant_forms() {
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(2), 1, 4).unwrap();
        let germ = vec![series(frame.s_vars(), 4, &[(&[0, 0], 1), (&[1, 1], 2)]), JetSeries::one(frame.s_vars(), 4)];
        let j = versal_to_web(&frame, &solve_versal(&frame, &germ).unwrap()).unwrap().0;
        let sv = frame.s_vars().clone();
        let datum = vec![
            JetSeries::constant(&sv, 4, q(1)),
            JetSeries::constant(&sv, 4, q(-2)),
            JetSeries::constant(&sv, 4, q(3)),
        ];
        let sol = solve_closed_form(&frame, &j, None, &datum).unwrap();
        let vars = frame.vars();
        let expect = var(vars, 5, 0).sub(&var(vars, 5, 1).scale(&q(2))).add(&var(vars, 5, 2).scale(&q(3)));
        assert_eq!(sol.potential, expect);
    }

    #[test]
    fn different_data_give_different_solutions() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(-1), 1, order).unwrap();
        let (j, big_f) = separable(&frame, order, &[(1, 0), (0, 2)]);
        let g = manufactured(&frame, &big_f, order + 1, 1);
        let d1 = data_of(&frame, &g);
        let s1 = solve_closed_form(&frame, &j, None, &d1).unwrap();
        assert_eq!(s1, solve_closed_form(&frame, &j, None, &d1).unwrap());
        // closed perturbation d(s²y) on S
        let sv = frame.s_vars().clone();
        let mut d2 = d1.clone();
        d2[0] = d2[0].add(&series(&sv, order, &[(&[1, 1], 2)]));
        d2[2] = d2[2].add(&series(&sv, order, &[(&[2, 0], 1)]));
        let s2 = solve_closed_form(&frame, &j, None, &d2).unwrap();
        let diff = s2.potential.sub(&s1.potential);
        assert!(!diff.is_zero());
        assert!(diff.terms().keys().all(|m| m.degree() >= 3));
    }

    #[test]
    fn open_datum_is_refused() {
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(2), 1, 4).unwrap();
        let (j, _) = separable(&frame, 4, &[(0, 0), (1, 0)]);
        let sv = frame.s_vars().clone();
        let datum = vec![var(&sv, 4, 1), JetSeries::zero(&sv, 4), JetSeries::zero(&sv, 4)];
        assert!(matches!(solve_closed_form(&frame, &j, None, &datum), Err(SolveError::Residual { .. })));
    }

    #[test]
    fn lower_order_term_is_honoured() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(2), 1, order).unwrap();
        let (j, _) = separable(&frame, order, &[(1, 0), (0, 0)]);
        let vars = frame.vars();
        let alpha0 = JetForm::dx(vars, order, 0).mul_fn(&var(vars, order, 2)).add(&JetForm::dx(vars, order, 1));
        let sv = frame.s_vars().clone();
        let datum = vec![JetSeries::one(&sv, order), var(&sv, order, 1), var(&sv, order, 0)];
        let sol = solve_closed_form(&frame, &j, Some(&alpha0), &datum).unwrap();
        let w = tau_circ(&sol.beta, &j).unwrap().d().unwrap().add(&sol.beta.wedge(&alpha0)).wedge(&frame.dy_top(order));
        assert!(w.is_zero());
        assert_eq!(data_of(&frame, &sol.potential), datum.iter().map(|d| d.truncate(order)).collect::<Vec<_>>());
    }

    #[test]
    fn rhs_form_solution() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(2), 1, order).unwrap();
        let (j, _) = separable(&frame, order, &[(1, 0), (-1, 1)]);
        let gamma = JetForm::dx(frame.vars(), order, 1);
        let sol = solve_rhs_form(&frame, &j, &gamma).unwrap();
        let top = frame.dy_top(order);
        let lhs = tau_circ(&sol.beta, &j).unwrap().d().unwrap().wedge(&top);
        let rhs = JetForm::dx(frame.vars(), order, 0).wedge(&gamma).wedge(&top);
        assert_eq!(lhs, rhs.truncate(lhs.order()));
        assert!(data_of(&frame, &sol.potential).iter().all(|d| d.is_zero()));
    }

    #[test]
    fn rhs_form_hypothesis_is_checked() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0, 1, 3]), &q(2), 1, order).unwrap();
        let (j, _) = separable(&frame, order, &[(1, 0), (0, 0), (0, 0)]);
        let vars = frame.vars();
        // γ = d(x₂x₃): γ∘J = x₃ dx₂ + 3x₂ dx₃ is not closed
        let gamma = JetForm::function(&var(vars, order + 1, 1).mul(&var(vars, order + 1, 2))).d().unwrap();
        assert!(matches!(solve_rhs_form(&frame, &j, &gamma), Err(SolveError::Residual { .. })));
    }

    #[test]
    fn potential_for_planted_source() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(2), 1, order).unwrap();
        let (j, _) = separable(&frame, order, &[(1, 0), (1, 1)]);
        let vars = frame.vars();
        let h = series(vars, order + 2, &[(&[2, 1, 0], 1), (&[0, 1, 2], 1), (&[1, 0, 1], 2)]);
        let jh = JetTensor11::from_rows(vars, order + 2, j.rows().to_vec()).unwrap();
        let omega = tau_circ(&JetForm::function(&h).d().unwrap(), &jh).unwrap().d().unwrap().truncate(order);
        let e = FoliationSpec::new("E", vec![JetForm::dx(vars, order, 2)]).unwrap();
        let sol = solve_potential(&frame, &j, &e, &omega).unwrap();
        let top = frame.dy_top(order);
        let w = tau_circ(&sol.beta, &j).unwrap().d().unwrap().sub(&omega).wedge(&top);
        assert!(w.is_zero());
        assert!(sol.potential.constant_term().is_zero());
        assert!((0..3).all(|i| sol.potential.deriv(i).constant_term().is_zero()));
    }

    #[test]
    fn potential_refuses_incompatible_source() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(2), 1, order).unwrap();
        let (j, _) = separable(&frame, order, &[(1, 0), (0, 0)]);
        let vars = frame.vars();
        let omega = JetForm::function(&var(vars, order + 1, 2).mul(&var(vars, order + 1, 2)))
            .wedge(&JetForm::dx(vars, order + 1, 0))
            .d()
            .unwrap()
            .truncate(order);
        let e = FoliationSpec::new("E", vec![JetForm::dx(vars, order, 2)]).unwrap();
        let r = solve_potential(&frame, &j, &e, &omega);
        // y² dx₁ has d = 2y dy∧dx₁; its J-twist carries a dx₁∧dx₂∧dy term only if it fails
        let twisted = tau_sub(&omega, &j).unwrap().d().unwrap().wedge(&frame.dy_top(order));
        assert_eq!(r.is_err(), !twisted.is_zero());
    }

    #[test]
    fn flat_germ_gives_flat_model() {
        for ax in [vec![0, 1], vec![0, 1, 2]] {
            let frame = ProblemFrame::new(&q_list(&ax), &q(-1), 1, 4).unwrap();
            let sol = solve_versal(&frame, &flat_germ(&frame)).unwrap();
            assert!(sol.f.iter().all(|f| *f == JetSeries::one(frame.vars(), 4)));
        }
    }

    #[test]
    fn versal_from_bent_germ() {
        let order = 5;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(3), 1, order).unwrap();
        let sv = frame.s_vars().clone();
        let germ = vec![series(&sv, order, &[(&[0, 0], 1), (&[1, 1], 1)]), JetSeries::one(&sv, order)];
        let sol = solve_versal(&frame, &germ).unwrap();
        assert_eq!(sol.f.iter().map(|f| frame.restrict(f)).collect::<Vec<_>>(), germ);
        assert!(versal_torsion_free(&frame, &sol).unwrap());
        for r in versal_residual(&frame, &sol.f).unwrap() {
            assert!(r.is_zero());
        }
        let (j, curve) = versal_to_web(&frame, &sol).unwrap();
        assert!(versal_curve_matches(&frame, &j, &curve).unwrap());
        let dy = JetForm::dx(frame.vars(), order, 2);
        let fol = FoliationSpec::new("w(inf)", vec![dy.clone()]).unwrap();
        let rep = verify_web(&j, Some(&dy), &fol, 4).unwrap();
        assert!(rep.passes, "{rep:?}");
    }

    #[test]
    fn inadmissible_germs_name_the_curve() {
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(3), 1, 4).unwrap();
        let sv = frame.s_vars().clone();
        let bad_r = vec![series(&sv, 4, &[(&[0, 0], 1), (&[1, 0], 1)]), JetSeries::one(&sv, 4)];
        let e = solve_versal(&frame, &bad_r).unwrap_err();
        assert!(e.to_string().contains("y = 0"), "{e}");
        let bad_axis = vec![series(&sv, 4, &[(&[0, 0], 1), (&[0, 1], 1)]), JetSeries::one(&sv, 4)];
        let e = solve_versal(&frame, &bad_axis).unwrap_err();
        assert!(e.to_string().contains("x = 0"), "{e}");
    }

    #[test]
    fn chart_normalisation_of_constants() {
        let vars = var_names(&["x1", "x2", "y"]);
        let c = q(3);
        let f = vec![JetSeries::constant(&vars, 4, c.clone()); 2];
        let n = normalize_chart(&f).unwrap();
        let tv = var_names(&["t"]);
        assert_eq!(n.h2, var(&tv, 4, 0).scale(&c));
        assert_eq!(n.h1, var(&tv, 4, 0));
        assert!(n.f.iter().all(|x| *x == JetSeries::one(&vars, x.order())));
    }

    #[test]
    fn chart_normalisation_fixes_both_curves() {
        let vars = var_names(&["x1", "x2", "y"]);
        let o = 5;
        // f₁ = f₂ on x₁ = x₂, y = 0; f₁ ≠ 1 on both curves
        let f1 = series(&vars, o, &[(&[0, 0, 0], 2), (&[1, 0, 0], 1), (&[0, 0, 1], 1), (&[0, 0, 2], 1)]);
        let f2 = series(&vars, o, &[(&[0, 0, 0], 2), (&[0, 1, 0], 1), (&[1, 0, 1], 3)]);
        let n = normalize_chart(&[f1, f2]).unwrap();
        let ord = n.f[0].order();
        let tv = var_names(&["t"]);
        let t = var(&tv, ord, 0);
        let z = JetSeries::zero(&tv, ord);
        let one = JetSeries::one(&tv, ord);
        assert_eq!(n.f[0].compose(&[z.clone(), z.clone(), t.clone()]), one);
        for fj in &n.f {
            assert_eq!(fj.compose(&[t.clone(), t.clone(), z.clone()]), one);
        }
        let bad = vec![JetSeries::one(&vars, o).add(&var(&vars, o, 0)), JetSeries::one(&vars, o)];
        assert!(normalize_chart(&bad).is_err());
        assert!(normalize_chart(&[JetSeries::constant(&vars, o, q(-1)), JetSeries::constant(&vars, o, q(-1))]).is_err());
    }

    #[test]
    fn germ_homotheties() {
        let sv = var_names(&["s", "y"]);
        let phi = vec![
            series(&sv, 5, &[(&[0, 0], 1), (&[1, 1], 1), (&[2, 1], -1)]),
            series(&sv, 5, &[(&[0, 0], 1), (&[3, 1], 2)]),
        ];
        for b in [q(2), qf(-1, 3), q(1)] {
            assert_eq!(germ_equiv(&phi, &scale_germ(&phi, &b), 5), Some(b));
        }
        let mut other = scale_germ(&phi, &q(2));
        other[1].add_term(Mono(vec![1, 3]), q(1));
        assert_eq!(germ_equiv(&phi, &other, 5), None);
        // only s y: b and −b both work, the positive one is reported
        let even = vec![series(&sv, 5, &[(&[0, 0], 1), (&[1, 1], 1)])];
        assert_eq!(germ_equiv(&even, &scale_germ(&even, &q(-2)), 5), Some(q(2)));
        // s y scaled by 2 has no rational square root
        assert_eq!(
            germ_equiv(
                &even,
                &scale_germ(&even, &q(1)).iter().map(|p| p.add(&series(&sv, 5, &[(&[1, 1], 1)]))).collect::<Vec<_>>(),
                5
            ),
            None
        );
    }

    #[test]
    fn ramification_examples() {
        let r = ramification_polynomial(&q_list(&[0, 1])).unwrap();
        assert_eq!(r.poly, UniPoly::new(q_list(&[1, 2])));
        let r = ramification_polynomial(&q_list(&[0, 1, 2])).unwrap();
        assert_eq!(r.poly, UniPoly::new(q_list(&[2, 6, 3])));
        assert_eq!(r.discriminant, q(12));
        assert!(ramification_polynomial(&q_list(&[1, 1])).is_err());
    }

    #[test]
    fn coupled_without_coupling_splits() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(3), 1, order).unwrap();
        let (j, big_f) = separable(&frame, order, &[(1, 0), (0, 1)]);
        let g1 = manufactured(&frame, &big_f, order + 1, 1);
        let g2 = manufactured(&frame, &big_f, order + 1, 3);
        let zero = JetForm::zero(frame.vars(), order, 1);
        let rho = vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero]];
        let sols = solve_coupled(&frame, &j, &rho, &[data_of(&frame, &g1), data_of(&frame, &g2)]).unwrap();
        assert_eq!(sols[0].potential, g1);
        assert_eq!(sols[1].potential, g2);
    }

    #[test]
    fn coupled_uniqueness_certificate() {
        let order = 3;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(3), 1, order).unwrap();
        let (j, _) = separable(&frame, order, &[(1, 0), (0, 1)]);
        let vars = frame.vars();
        let rho = vec![
            vec![JetForm::dx(vars, order, 0), JetForm::dx(vars, order, 1).mul_fn(&var(vars, order, 2))],
            vec![JetForm::dx(vars, order, 2), JetForm::zero(vars, order, 1)],
        ];
        let certs = coupled_uniqueness(&frame, &j, &rho).unwrap();
        assert_eq!(certs.len(), order as usize + 1);
        assert!(certs.iter().all(|c| c.rank == c.unknowns));
    }

    #[test]
    fn renormalising_is_the_identity_change() {
        let vars = var_names(&["x1", "x2", "y"]);
        let o = 5;
        let f1 = series(&vars, o, &[(&[0, 0, 0], 3), (&[1, 0, 0], 1), (&[0, 0, 1], -1), (&[1, 1, 1], 1)]);
        let f2 = series(&vars, o, &[(&[0, 0, 0], 3), (&[0, 1, 0], 1), (&[0, 1, 1], 2)]);
        let once = normalize_chart(&[f1, f2]).unwrap();
        let twice = normalize_chart(&once.f).unwrap();
        let tv = var_names(&["t"]);
        assert_eq!(twice.h1, var(&tv, twice.h1.order(), 0));
        assert_eq!(twice.h2, var(&tv, twice.h2.order(), 0));
    }

    #[test]
    fn zero_sources_give_zero() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0, 1]), &q(2), 1, order).unwrap();
        let (j, _) = separable(&frame, order, &[(1, 0), (0, 1)]);
        let vars = frame.vars();
        let e = FoliationSpec::new("E", vec![JetForm::dx(vars, order, 2)]).unwrap();
        let sol = solve_potential(&frame, &j, &e, &JetForm::zero(vars, order, 2)).unwrap();
        assert!(sol.potential.is_zero());
        let sol = solve_rhs_form(&frame, &j, &JetForm::zero(vars, order, 1)).unwrap();
        assert!(sol.beta.is_zero());
        let datum = zeros(frame.s_vars(), order, 3);
        assert!(solve_closed_form(&frame, &j, None, &datum).unwrap().beta.is_zero());
    }

    #[test]
    fn single_x_frame_is_the_whole_space() {
        let order = 4;
        let frame = ProblemFrame::new(&q_list(&[0]), &q(1), 1, order).unwrap();
        let (j, _) = separable(&frame, order, &[(2, 1)]);
        let gamma = JetForm::function(&var(frame.vars(), order + 1, 1).mul(&var(frame.vars(), order + 1, 1)))
            .d()
            .unwrap()
            .truncate(order);
        let sol = solve_rhs_form(&frame, &j, &gamma).unwrap();
        let top = frame.dy_top(order);
        let lhs = tau_circ(&sol.beta, &j).unwrap().d().unwrap().wedge(&top);
        assert!(lhs.is_zero());
    }
}
