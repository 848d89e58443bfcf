//! Differential forms and (1,1) tensors with truncated power-series
//! coefficients, plus the identities and web tests built on them.
//!
//! Every exterior derivative costs one order of truncation. A form's
//! `order` is the order to which its coefficients are known, so a residual
//! that comes out zero certifies the identity to exactly that order.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::jet::JetSeries;
use crate::exact::matrix::Matrix;
use crate::exact::scalar::{q, Q};
use crate::exact::subspace::Subspace;
use crate::exterior::{mask_indices, subsets, MultiVector, MAX_DIM};
use crate::veronese::char_numbers_from_chain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("variable lists differ")]
    Vars,
    #[error("dimension error: {0}")]
    Dim(String),
    #[error("truncation order {0} is exhausted")]
    Truncation(i32),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("jet matrix is singular at the base point")]
    Singular,
}

type Vars = Arc<Vec<String>>;

/// Sign and union of dx_a ∧ dx_b for sorted index masks.
fn merge(a: u32, b: u32) -> Option<(u32, bool)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    for j in mask_indices(b) {
        swaps += (a >> (j + 1)).count_ones();
    }
    Some((a | b, swaps % 2 == 1))
}

/// A differential k-form Σ f_I dx_I with jet coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetForm {
    vars: Vars,
    order: i32,
    grade: usize,
    terms: BTreeMap<u32, JetSeries>,
}

impl JetForm {
    pub fn zero(vars: &Vars, order: i32, grade: usize) -> Self {
        assert!(vars.len() <= MAX_DIM, "at most {MAX_DIM} coordinates");
        JetForm { vars: vars.clone(), order, grade, terms: BTreeMap::new() }
    }

    pub fn function(f: &JetSeries) -> Self {
        let mut r = Self::zero(f.vars(), f.order(), 0);
        r.add_term(0, f.clone());
        r
    }

    pub fn dx(vars: &Vars, order: i32, i: usize) -> Self {
        let mut r = Self::zero(vars, order, 1);
        r.add_term(1 << i, JetSeries::one(vars, order));
        r
    }

    /// Σ c_i dx_i.
    pub fn one_form(vars: &Vars, order: i32, coeffs: &[JetSeries]) -> Self {
        let mut r = Self::zero(vars, order, 1);
        for (i, c) in coeffs.iter().enumerate() {
            r.add_term(1 << i, c.clone());
        }
        r
    }

    /// From (index list, coefficient) pairs; unsorted lists pick up the
    /// permutation sign, repeated indices vanish.
    pub fn from_terms(vars: &Vars, order: i32, grade: usize, terms: Vec<(Vec<usize>, JetSeries)>) -> Self {
        let mut r = Self::zero(vars, order, grade);
        for (ix, c) in terms {
            assert_eq!(ix.len(), grade, "index count must equal the grade");
            let mut sign = false;
            let mut mask = 0u32;
            let mut ok = true;
            for &i in &ix {
                match merge(mask, 1 << i) {
                    Some((m, s)) => {
                        mask = m;
                        sign ^= s;
                    }
                    None => ok = false,
                }
            }
            if ok {
                r.add_term(mask, if sign { c.neg() } else { c });
            }
        }
        r
    }

    /// Constant-coefficient form from a multivector of covectors.
    pub fn constant(vars: &Vars, order: i32, m: &MultiVector) -> Self {
        let mut r = Self::zero(vars, order, m.grade());
        for (mask, c) in m.terms() {
            r.add_term(*mask, JetSeries::constant(vars, order, c.clone()));
        }
        r
    }

    pub fn add_term(&mut self, mask: u32, c: JetSeries) {
        assert_eq!(mask.count_ones() as usize, self.grade, "mask grade");
        let c = c.truncate(self.order);
        let v = match self.terms.remove(&mask) {
            Some(old) => old.add(&c),
            None => c.with_order(self.order),
        };
        if !v.is_zero() {
            self.terms.insert(mask, v);
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn terms(&self) -> &BTreeMap<u32, JetSeries> {
        &self.terms
    }

    pub fn coeff(&self, ix: &[usize]) -> JetSeries {
        let probe = Self::from_terms(
            &self.vars,
            self.order,
            self.grade,
            vec![(ix.to_vec(), JetSeries::one(&self.vars, self.order))],
        );
        match probe.terms.iter().next() {
            None => JetSeries::zero(&self.vars, self.order),
            Some((mask, s)) => {
                let c = self.terms.get(mask).cloned().unwrap_or_else(|| JetSeries::zero(&self.vars, self.order));
                if s.constant_term() < Q::zero() {
                    c.neg()
                } else {
                    c
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same(&self, o: &Self) -> Result<(), TensorError> {
        if self.vars != o.vars {
            return Err(TensorError::Vars);
        }
        Ok(())
    }

    pub fn truncate(&self, order: i32) -> Self {
        let order = order.min(self.order);
        let mut r = Self::zero(&self.vars, order, self.grade);
        for (m, c) in &self.terms {
            r.add_term(*m, c.truncate(order));
        }
        r
    }

    /// Declare a higher order; only sound for exact polynomial data.
    pub fn with_order(&self, order: i32) -> Self {
        let mut r = Self::zero(&self.vars, order, self.grade);
        for (m, c) in &self.terms {
            r.add_term(*m, c.with_order(order));
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same(o).expect("common variables");
        assert_eq!(self.grade, o.grade, "grades differ");
        let mut r = self.truncate(o.order);
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut r = Self::zero(&self.vars, self.order, self.grade);
        for (m, c) in &self.terms {
            r.add_term(*m, c.scale(s));
        }
        r
    }

    /// Multiply by a function.
    pub fn mul_fn(&self, f: &JetSeries) -> Self {
        let order = self.order.min(f.order());
        let mut r = Self::zero(&self.vars, order, self.grade);
        for (m, c) in &self.terms {
            r.add_term(*m, c.mul(f));
        }
        r
    }

    pub fn wedge(&self, o: &Self) -> Self {
        self.same(o).expect("common variables");
        let order = self.order.min(o.order);
        let mut r = Self::zero(&self.vars, order, self.grade + o.grade);
        if self.grade + o.grade > self.nvars() {
            return r;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if let Some((m, neg)) = merge(*ma, *mb) {
                    let p = ca.mul(cb);
                    r.add_term(m, if neg { p.neg() } else { p });
                }
            }
        }
        r
    }

    /// Exterior derivative, known to one order less.
    pub fn d(&self) -> Result<Self, TensorError> {
        if self.order < 1 {
            return Err(TensorError::Truncation(self.order));
        }
        let n = self.nvars();
        let mut r = Self::zero(&self.vars, self.order - 1, self.grade + 1);
        for (m, c) in &self.terms {
            for i in 0..n {
                if let Some((mm, neg)) = merge(1 << i, *m) {
                    let dc = c.deriv(i);
                    r.add_term(mm, if neg { dc.neg() } else { dc });
                }
            }
        }
        Ok(r)
    }

    /// Coefficientwise partial derivative ∂/∂x_i.
    pub fn deriv_coeffs(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars, self.order - 1, self.grade);
        for (m, c) in &self.terms {
            r.add_term(*m, c.deriv(i));
        }
        r
    }

    /// Contraction with ∂/∂x_i in the first slot.
    pub fn interior(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars, self.order, self.grade.saturating_sub(1));
        for (m, c) in &self.terms {
            if m & (1 << i) == 0 {
                continue;
            }
            let pos = (m & ((1u32 << i) - 1)).count_ones();
            r.add_term(m & !(1 << i), if pos % 2 == 1 { c.neg() } else { c.clone() });
        }
        r
    }

    /// Value at the base point.
    pub fn at_base(&self) -> MultiVector {
        let mut m = MultiVector::zero(self.nvars(), self.grade);
        for (mask, c) in &self.terms {
            m.add_term(*mask, c.constant_term());
        }
        m
    }

    /// Re-express over a larger variable list (`map[i]` = new index of
    /// old variable i), both in coefficients and differentials.
    pub fn embed(&self, vars: &Vars, map: &[usize]) -> Self {
        let mut r = Self::zero(vars, self.order, self.grade);
        for (m, c) in &self.terms {
            let ix: Vec<usize> = mask_indices(*m).into_iter().map(|i| map[i]).collect();
            let f = Self::from_terms(vars, self.order, self.grade, vec![(ix, c.embed(vars, map))]);
            r = r.add(&f);
        }
        r
    }

    /// 1-form coefficients (c_0, …, c_{n−1}).
    pub fn one_form_coeffs(&self) -> Vec<JetSeries> {
        assert_eq!(self.grade, 1);
        (0..self.nvars()).map(|i| self.coeff(&[i])).collect()
    }

    /// τ(X₁, …, X_k) for jet vector fields, with determinant normalisation.
    pub fn eval_on(&self, xs: &[Vec<JetSeries>]) -> JetSeries {
        assert_eq!(xs.len(), self.grade);
        let mut acc = JetSeries::zero(&self.vars, self.order);
        for (m, c) in &self.terms {
            let ix = mask_indices(*m);
            let mat: Vec<Vec<JetSeries>> = ix.iter().map(|&i| xs.iter().map(|x| x[i].clone()).collect()).collect();
            acc = acc.add(&c.mul(&jet_det(&mat)));
        }
        acc
    }
}

/// Cofactor determinant of a small jet matrix.
fn jet_det(m: &[Vec<JetSeries>]) -> JetSeries {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = m[0][0].mul(&minor_det(m, 0));
    for j in 1..n {
        let t = m[0][j].mul(&minor_det(m, j));
        acc = if j % 2 == 1 { acc.sub(&t) } else { acc.add(&t) };
    }
    acc
}

fn minor_det(m: &[Vec<JetSeries>], col: usize) -> JetSeries {
    let sub: Vec<Vec<JetSeries>> = m[1..]
        .iter()
        .map(|r| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect();
    jet_det(&sub)
}

/// A (1,1) tensor G with entries G[i][j] = dx_i(G ∂_j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetTensor11 {
    vars: Vars,
    order: i32,
    rows: Vec<Vec<JetSeries>>,
}

impl JetTensor11 {
    pub fn from_rows(vars: &Vars, order: i32, rows: Vec<Vec<JetSeries>>) -> Result<Self, TensorError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(TensorError::Dim("tensor must be square".into()));
        }
        if n != vars.len() {
            return Err(TensorError::Dim(format!("frame {n} vs {} coordinates", vars.len())));
        }
        if rows.iter().flatten().any(|x| x.vars() != vars) {
            return Err(TensorError::Vars);
        }
        let rows =
            rows.into_iter().map(|r| r.into_iter().map(|x| x.truncate(order).with_order(order)).collect()).collect();
        Ok(JetTensor11 { vars: vars.clone(), order, rows })
    }

    pub fn constant(vars: &Vars, order: i32, m: &Matrix) -> Self {
        let rows = m
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|c| JetSeries::constant(vars, order, c)).collect())
            .collect();
        Self::from_rows(vars, order, rows).expect("square constant matrix")
    }

    pub fn identity(vars: &Vars, order: i32) -> Self {
        Self::constant(vars, order, &Matrix::identity(vars.len()))
    }

    pub fn diag(vars: &Vars, order: i32, d: &[JetSeries]) -> Self {
        let n = d.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { JetSeries::zero(vars, order) }).collect())
            .collect();
        Self::from_rows(vars, order, rows).expect("square diagonal")
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &JetSeries {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<JetSeries>] {
        &self.rows
    }

    pub fn truncate(&self, order: i32) -> Self {
        let order = order.min(self.order);
        JetTensor11 {
            vars: self.vars.clone(),
            order,
            rows: self.rows.iter().map(|r| r.iter().map(|x| x.truncate(order)).collect()).collect(),
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(&JetSeries, &JetSeries) -> JetSeries) -> Self {
        let rows =
            self.rows.iter().zip(&o.rows).map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect()).collect();
        JetTensor11 { vars: self.vars.clone(), order: self.order.min(o.order), rows }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: &Q) -> Self {
        JetTensor11 {
            vars: self.vars.clone(),
            order: self.order,
            rows: self.rows.iter().map(|r| r.iter().map(|x| x.scale(s)).collect()).collect(),
        }
    }

    /// G + cI.
    pub fn shift(&self, c: &Q) -> Self {
        self.add(&Self::identity(&self.vars, self.order).scale(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.dim();
        let order = self.order.min(o.order);
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(JetSeries::zero(&self.vars, order), |acc, k| {
                            acc.add(&self.rows[i][k].mul(&o.rows[k][j]))
                        })
                    })
                    .collect()
            })
            .collect();
        JetTensor11 { vars: self.vars.clone(), order, rows }
    }

    pub fn trace(&self) -> JetSeries {
        (0..self.dim()).fold(JetSeries::zero(&self.vars, self.order), |a, i| a.add(&self.rows[i][i]))
    }

    /// G applied to a vector field.
    pub fn apply(&self, v: &[JetSeries]) -> Vec<JetSeries> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).fold(JetSeries::zero(&self.vars, self.order), |a, (g, x)| a.add(&g.mul(x))))
            .collect()
    }

    /// dx_i ∘ G as a 1-form.
    pub fn row_form(&self, i: usize) -> JetForm {
        JetForm::one_form(&self.vars, self.order, &self.rows[i])
    }

    pub fn at_base(&self) -> Matrix {
        Matrix::from_rows(self.rows.iter().map(|r| r.iter().map(|x| x.constant_term()).collect()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|x| x.is_zero())
    }

    /// Inverse over the jet ring (Gauss–Jordan with unit pivots).
    pub fn inverse(&self) -> Result<Self, TensorError> {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut inv = Self::identity(&self.vars, self.order).rows;
        for col in 0..n {
            let p = (col..n).find(|&i| !a[i][col].constant_term().is_zero()).ok_or(TensorError::Singular)?;
            a.swap(p, col);
            inv.swap(p, col);
            let pinv = a[col][col].inverse().ok_or(TensorError::Singular)?;
            for j in 0..n {
                a[col][j] = a[col][j].mul(&pinv);
                inv[col][j] = inv[col][j].mul(&pinv);
            }
            for i in 0..n {
                if i == col || a[i][col].is_zero() {
                    continue;
                }
                let f = a[i][col].clone();
                for j in 0..n {
                    a[i][j] = a[i][j].sub(&f.mul(&a[col][j]));
                    inv[i][j] = inv[i][j].sub(&f.mul(&inv[col][j]));
                }
            }
        }
        Ok(JetTensor11 { vars: self.vars.clone(), order: self.order, rows: inv })
    }
}

/// Exterior derivative.
pub fn ext_d(f: &JetForm) -> Result<JetForm, TensorError> {
    f.d()
}

/// Covector rows of a tensor as 1-forms, used to compose forms slotwise.
fn rows_as_forms(g: &JetTensor11) -> Vec<JetForm> {
    (0..g.dim()).map(|i| g.row_form(i)).collect()
}

/// (τ∘G)(X₁, …, X_k) = τ(GX₁, …, GX_k).
pub fn tau_circ(tau: &JetForm, g: &JetTensor11) -> Result<JetForm, TensorError> {
    if tau.vars() != g.vars() {
        return Err(TensorError::Vars);
    }
    let rows = rows_as_forms(g);
    let order = tau.order().min(g.order());
    let mut acc = JetForm::zero(tau.vars(), order, tau.grade());
    for (m, c) in tau.terms() {
        let mut w = JetForm::function(c);
        for i in mask_indices(*m) {
            w = w.wedge(&rows[i]);
        }
        acc = acc.add(&w);
    }
    Ok(acc)
}

/// τ_G: G inserted in one slot at a time, summed over slots.
pub fn tau_sub(tau: &JetForm, g: &JetTensor11) -> Result<JetForm, TensorError> {
    if tau.vars() != g.vars() {
        return Err(TensorError::Vars);
    }
    let rows = rows_as_forms(g);
    let vars = tau.vars();
    let order = tau.order().min(g.order());
    let mut acc = JetForm::zero(vars, order, tau.grade());
    for (m, c) in tau.terms() {
        let ix = mask_indices(*m);
        for s in 0..ix.len() {
            let mut w = JetForm::function(c);
            for (p, &i) in ix.iter().enumerate() {
                let f = if p == s { rows[i].clone() } else { JetForm::dx(vars, order, i) };
                w = w.wedge(&f);
            }
            acc = acc.add(&w);
        }
    }
    Ok(acc)
}

/// Vector-valued 2-form: component i is the 2-form dx_i ∘ N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorTwoForm {
    pub comps: Vec<JetForm>,
}

impl VectorTwoForm {
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn order(&self) -> i32 {
        self.comps.iter().map(|c| c.order()).min().unwrap_or(i32::MAX)
    }

    /// ρ ∘ N for a 1-form ρ.
    pub fn contract(&self, rho: &JetForm) -> JetForm {
        let coeffs = rho.one_form_coeffs();
        let mut acc = JetForm::zero(rho.vars(), rho.order().min(self.order()), 2);
        for (c, f) in coeffs.iter().zip(&self.comps) {
            acc = acc.add(&f.mul_fn(c));
        }
        acc
    }
}

/// Nijenhuis torsion N_G(X,Y) = [GX,GY] − G[GX,Y] − G[X,GY] + G²[X,Y].
pub fn nijenhuis(g: &JetTensor11) -> Result<VectorTwoForm, TensorError> {
    if g.order() < 1 {
        return Err(TensorError::Truncation(g.order()));
    }
    let n = g.dim();
    let vars = g.vars();
    let order = g.order() - 1;
    let dg: Vec<Vec<Vec<JetSeries>>> =
        (0..n).map(|l| (0..n).map(|i| (0..n).map(|j| g.get(i, j).deriv(l)).collect()).collect()).collect();
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let mut f = JetForm::zero(vars, order, 2);
        for j in 0..n {
            for k in j + 1..n {
                let mut c = JetSeries::zero(vars, order);
                for l in 0..n {
                    c = c
                        .add(&g.get(l, j).mul(&dg[l][i][k]))
                        .sub(&g.get(l, k).mul(&dg[l][i][j]))
                        .add(&g.get(i, l).mul(&dg[k][l][j]))
                        .sub(&g.get(i, l).mul(&dg[j][l][k]));
                }
                f.add_term((1 << j) | (1 << k), c);
            }
        }
        comps.push(f);
    }
    Ok(VectorTwoForm { comps })
}

/// d(ρ∘G)(G·,·) + d(ρ∘G)(·,G·) − dρ(G·,G·) − d(ρ∘G²) − ρ∘N_G.
pub fn torsion_identity_residual(rho: &JetForm, g: &JetTensor11) -> Result<JetForm, TensorError> {
    if rho.grade() != 1 {
        return Err(TensorError::Dim("ρ must be a 1-form".into()));
    }
    let lhs = tau_sub(&tau_circ(rho, g)?.d()?, g)?;
    let rhs = tau_circ(&rho.d()?, g)?.add(&tau_circ(rho, &g.mul(g))?.d()?).add(&nijenhuis(g)?.contract(rho));
    Ok(lhs.sub(&rhs))
}

/// (d(τ∘G))_G − d((τ∘G)_G) − (dτ)∘G for torsion-free G.
pub fn torsion_free_identity_residual(tau: &JetForm, g: &JetTensor11) -> Result<JetForm, TensorError> {
    if !nijenhuis(g)?.is_zero() {
        return Err(TensorError::Precondition("Nijenhuis torsion does not vanish".into()));
    }
    let tg = tau_circ(tau, g)?;
    let lhs = tau_sub(&tg.d()?, g)?;
    let rhs = tau_sub(&tg, g)?.d()?.add(&tau_circ(&tau.d()?, g)?);
    Ok(lhs.sub(&rhs))
}

/// adj(J + tI) and det(J + tI) as polynomials in t with jet coefficients,
/// by Faddeev–LeVerrier (only divisions by integers).
pub fn shifted_adjugate_jet(j: &JetTensor11) -> (Vec<JetTensor11>, Vec<JetSeries>) {
    let n = j.dim();
    let vars = j.vars();
    let a = j.scale(&q(-1));
    let id = JetTensor11::identity(vars, j.order());
    // c[k] = coefficient of t^k in det(tI − A)
    let mut c = vec![JetSeries::zero(vars, j.order()); n + 1];
    c[n] = JetSeries::one(vars, j.order());
    let mut mk = JetTensor11::constant(vars, j.order(), &Matrix::zeros(n, n));
    let mut ms = Vec::with_capacity(n);
    for k in 1..=n {
        mk = a.mul(&mk).add(&id_scaled(&id, &c[n - k + 1]));
        let tr = a.mul(&mk).trace();
        c[n - k] = tr.scale(&(-Q::one() / q(k as i64)));
        ms.push(mk.clone());
    }
    // adj(tI − A) = Σ_{k=1}^{n} M_k t^{n−k}
    let adj: Vec<JetTensor11> = (0..n).map(|d| ms[n - 1 - d].clone()).collect();
    (adj, c)
}

fn id_scaled(id: &JetTensor11, s: &JetSeries) -> JetTensor11 {
    let rows = id.rows().iter().map(|r| r.iter().map(|x| x.mul(s)).collect()).collect();
    JetTensor11 { vars: id.vars().clone(), order: id.order().min(s.order()), rows }
}

/// Polynomial in t with form coefficients, lowest degree first.
pub type FormPoly = Vec<JetForm>;

fn poly_wedge(a: &FormPoly, b: &FormPoly) -> FormPoly {
    let vars = a[0].vars();
    let order = a[0].order().min(b[0].order());
    let grade = a[0].grade() + b[0].grade();
    let mut out = vec![JetForm::zero(vars, order, grade); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            out[i + k] = out[i + k].add(&x.wedge(y));
        }
    }
    out
}

/// Evaluate a form polynomial at a scalar t.
pub fn eval_form_poly(p: &FormPoly, t: &Q) -> JetForm {
    let mut acc = p[0].clone();
    let mut pw = Q::one();
    for c in &p[1..] {
        pw *= t;
        acc = acc.add(&c.scale(&pw));
    }
    acc
}

/// β ∘ M(t) for a polynomial matrix M(t) = Σ t^d M_d.
fn compose_poly(beta: &JetForm, m: &[JetTensor11]) -> FormPoly {
    let n = beta.nvars();
    let rows: Vec<FormPoly> = (0..n).map(|i| m.iter().map(|md| md.row_form(i)).collect()).collect();
    let order = beta.order().min(m[0].order());
    let mut acc: FormPoly = vec![JetForm::zero(beta.vars(), order, beta.grade())];
    for (mask, c) in beta.terms() {
        let mut w: FormPoly = vec![JetForm::function(c)];
        for i in mask_indices(*mask) {
            w = poly_wedge(&w, &rows[i]);
        }
        if w.len() > acc.len() {
            acc.resize(w.len(), JetForm::zero(beta.vars(), order, beta.grade()));
        }
        for (d, x) in w.into_iter().enumerate() {
            acc[d] = acc[d].add(&x);
        }
    }
    acc
}

/// Exact division of a form polynomial by a monic jet polynomial.
fn divide_monic(num: &FormPoly, den: &[JetSeries]) -> Result<FormPoly, TensorError> {
    let dd = den.len() - 1;
    if num.len() <= dd {
        return if num.iter().all(|x| x.is_zero()) {
            Ok(vec![num[0].clone()])
        } else {
            Err(TensorError::Precondition("division leaves a remainder".into()))
        };
    }
    let mut rem = num.clone();
    let mut quo = vec![JetForm::zero(num[0].vars(), num[0].order(), num[0].grade()); num.len() - dd];
    for k in (0..quo.len()).rev() {
        let c = rem[k + dd].clone();
        for (i, di) in den.iter().enumerate() {
            rem[k + i] = rem[k + i].sub(&c.mul_fn(di));
        }
        quo[k] = c;
    }
    if rem.iter().any(|x| !x.is_zero()) {
        return Err(TensorError::Precondition("division leaves a remainder".into()));
    }
    Ok(quo)
}

/// γ(t) = det(J + tI) · ((J + tI)⁻¹)* β, computed without division as
/// β∘adj(J + tI) / det(J + tI)^{r−1}. Coefficients of t⁰ … t^{n−r}.
pub fn representative(j: &JetTensor11, beta: &JetForm) -> Result<FormPoly, TensorError> {
    if j.vars() != beta.vars() {
        return Err(TensorError::Vars);
    }
    let r = beta.grade();
    if r == 0 || r > j.dim() {
        return Err(TensorError::Dim(format!("β has grade {r}")));
    }
    if beta.at_base().is_zero() {
        return Err(TensorError::Precondition("β vanishes at the base point".into()));
    }
    let (adj, det) = shifted_adjugate_jet(j);
    let mut num = compose_poly(beta, &adj);
    let mut den = vec![JetSeries::one(j.vars(), j.order())];
    for _ in 1..r {
        den = poly_mul_series(&den, &det);
    }
    let mut g = divide_monic(&num, &den)?;
    num.clear();
    g.truncate(j.dim() - r + 1);
    Ok(g)
}

fn poly_mul_series(a: &[JetSeries], b: &[JetSeries]) -> Vec<JetSeries> {
    let vars = a[0].vars();
    let order = a[0].order().min(b[0].order());
    let mut out = vec![JetSeries::zero(vars, order); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            out[i + k] = out[i + k].add(&x.mul(y));
        }
    }
    out
}

/// Foliation given by r closed defining covectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoliationSpec {
    pub name: String,
    pub covectors: Vec<JetForm>,
}

impl FoliationSpec {
    pub fn new(name: &str, covectors: Vec<JetForm>) -> Result<Self, TensorError> {
        if covectors.is_empty() {
            return Err(TensorError::Dim("need at least one covector".into()));
        }
        if covectors.iter().any(|c| c.grade() != 1) {
            return Err(TensorError::Dim("defining forms must be 1-forms".into()));
        }
        let vars = covectors[0].vars();
        if covectors.iter().any(|c| c.vars() != vars) {
            return Err(TensorError::Vars);
        }
        for c in &covectors {
            if !c.d()?.is_zero() {
                return Err(TensorError::Precondition("defining form is not closed".into()));
            }
        }
        let f = FoliationSpec { name: name.to_string(), covectors };
        if f.top_form().at_base().is_zero() {
            return Err(TensorError::Precondition("defining forms are dependent at the base point".into()));
        }
        Ok(f)
    }

    pub fn codim(&self) -> usize {
        self.covectors.len()
    }

    /// λ₁ ∧ … ∧ λ_r.
    pub fn top_form(&self) -> JetForm {
        let mut w = self.covectors[0].clone();
        for c in &self.covectors[1..] {
            w = w.wedge(c);
        }
        w
    }

    /// Coordinate foliation dy = 0 for the listed coordinates.
    pub fn coordinate(name: &str, vars: &Vars, order: i32, ix: &[usize]) -> Result<Self, TensorError> {
        Self::new(name, ix.iter().map(|&i| JetForm::dx(vars, order, i)).collect())
    }
}

/// Involutivity of ker γ at one parameter value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusSample {
    pub t: Q,
    pub involutive: bool,
    pub order: i32,
}

/// Ideal-closure test for ker γ with γ a decomposable r-form near the base
/// point: generators μ = i_V γ with base values spanning the annihilator;
/// require μ ∧ γ ≡ 0 and dμ ∧ γ ≡ 0.
pub fn frobenius_check(gamma: &JetForm, t: &Q) -> Result<FrobeniusSample, TensorError> {
    let r = gamma.grade();
    let n = gamma.nvars();
    let base = gamma.at_base();
    if base.is_zero() {
        return Err(TensorError::Precondition("curve vanishes at the base point".into()));
    }
    let mut gens = Vec::new();
    let mut span = Subspace::zero(n);
    for v in subsets(n, r - 1) {
        let mut mu = gamma.clone();
        for i in mask_indices(v).into_iter().rev() {
            mu = mu.interior(i);
        }
        let b0: Vec<Q> = (0..n).map(|i| mu.at_base().coeff(&[i])).collect();
        let next = span.sum(&Subspace::span(n, [b0])).expect("same ambient");
        if next.dim() > span.dim() {
            span = next;
            gens.push(mu);
            if span.dim() == r {
                break;
            }
        }
    }
    if span.dim() < r {
        return Ok(FrobeniusSample { t: t.clone(), involutive: false, order: gamma.order() });
    }
    let mut ok = true;
    let mut order = gamma.order();
    for mu in &gens {
        let dec = mu.wedge(gamma);
        let clo = mu.d()?.wedge(gamma);
        order = order.min(clo.order());
        ok &= dec.is_zero() && clo.is_zero();
    }
    Ok(FrobeniusSample { t: t.clone(), involutive: ok, order })
}

/// Characteristic numbers of the algebraic web of a curve at the base
/// point, from dimensions of sums of annihilators at distinct samples.
pub fn base_char_numbers(curve: &FormPoly) -> Result<Vec<usize>, TensorError> {
    let n = curve[0].nvars();
    let r = curve[0].grade();
    let mut acc = Subspace::zero(n);
    let mut chain = Vec::new();
    let mut t = 0i64;
    while acc.dim() < n {
        if t as usize > 2 * n + 2 {
            return Err(TensorError::Precondition("curve is not Veronese at the base point".into()));
        }
        let g = eval_form_poly(curve, &q(t)).at_base();
        t += 1;
        let mut ann = Subspace::zero(n);
        for v in subsets(n, r - 1) {
            let mut mu = g.clone();
            for i in mask_indices(v).into_iter().rev() {
                mu = mu.interior(&crate::exact::matrix::unit(n, i));
            }
            let b0: Vec<Q> = (0..n).map(|i| mu.coeff(&[i])).collect();
            ann = ann.sum(&Subspace::span(n, [b0])).expect("same ambient");
        }
        if ann.dim() != r {
            return Err(TensorError::Precondition("curve is not decomposable at a sample".into()));
        }
        let grown = acc.sum(&ann).expect("same ambient");
        if grown.dim() == acc.dim() {
            return Err(TensorError::Precondition("annihilators stop growing".into()));
        }
        acc = grown;
        chain.push(acc.dim());
    }
    Ok(char_numbers_from_chain(&chain))
}

/// Verdict of the web test for (J, β, 𝓕).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebReport {
    pub input_order: i32,
    pub span_ok: bool,
    pub beta_matches_foliation: bool,
    pub nijenhuis_on_foliation: bool,
    pub nijenhuis_order: i32,
    pub closure_condition: bool,
    pub closure_order: i32,
    pub base_char_numbers: Vec<usize>,
    pub height: usize,
    pub frobenius: Vec<FrobeniusSample>,
    pub curve: FormPoly,
    pub curve_closed: bool,
    pub curve_closed_order: i32,
    pub passes: bool,
}

/// Whether the covectors and their iterates under Jᵀ span the dual space.
pub fn krylov_full(j: &Matrix, vs: &[Vec<Q>]) -> bool {
    let n = j.rows();
    let jt = j.transpose();
    let mut s = Subspace::span(n, vs.to_vec());
    loop {
        let next = s.sum(&s.image_under(&jt)).expect("same ambient");
        if next.dim() == s.dim() {
            return s.is_full();
        }
        s = next;
    }
}

fn curve_closed(curve: &FormPoly) -> Result<(bool, i32), TensorError> {
    let mut ok = true;
    let mut order = i32::MAX;
    for c in curve {
        let dc = c.d()?;
        order = order.min(dc.order());
        ok &= dc.is_zero();
    }
    Ok((ok, order))
}

fn frobenius_samples(curve: &FormPoly, count: usize) -> Result<Vec<FrobeniusSample>, TensorError> {
    (0..count)
        .map(|k| {
            let t = q(k as i64);
            frobenius_check(&eval_form_poly(curve, &t), &t)
        })
        .collect()
}

/// Checks the hypotheses of the web construction for (J, β, 𝓕) and the
/// involutivity of w(t) at max(samples, n₁ + 2) values t = 0, 1, ….
pub fn verify_web(
    j: &JetTensor11,
    beta: Option<&JetForm>,
    fol: &FoliationSpec,
    samples: usize,
) -> Result<WebReport, TensorError> {
    if j.order() < 2 {
        return Err(TensorError::Truncation(j.order()));
    }
    if fol.covectors[0].vars() != j.vars() {
        return Err(TensorError::Vars);
    }
    let top = fol.top_form();
    let beta = beta.cloned().unwrap_or_else(|| top.clone());
    let beta_matches_foliation = beta.grade() == fol.codim()
        && fol.covectors.iter().all(|l| l.wedge(&beta).is_zero())
        && !beta.at_base().is_zero();

    let j0 = j.at_base();
    let base_covs: Vec<Vec<Q>> =
        fol.covectors.iter().map(|l| l.one_form_coeffs().iter().map(|c| c.constant_term()).collect()).collect();
    let span_ok = krylov_full(&j0, &base_covs);

    let nj = nijenhuis(j)?;
    let mut nij_ok = true;
    let mut nij_order = i32::MAX;
    for c in &nj.comps {
        let w = c.wedge(&top);
        nij_order = nij_order.min(w.order());
        nij_ok &= w.is_zero();
    }

    let mut clo_ok = true;
    let mut clo_order = i32::MAX;
    for l in &fol.covectors {
        let w = top.wedge(&tau_circ(l, j)?.d()?);
        clo_order = clo_order.min(w.order());
        clo_ok &= w.is_zero();
    }

    let curve = representative(j, &beta)?;
    let chars = base_char_numbers(&curve)?;
    let height = chars.first().copied().unwrap_or(0);
    let frobenius = frobenius_samples(&curve, samples.max(height + 2))?;
    let (closed, closed_order) = curve_closed(&curve)?;
    let passes = span_ok && beta_matches_foliation && nij_ok && clo_ok && frobenius.iter().all(|s| s.involutive);
    Ok(WebReport {
        input_order: j.order(),
        span_ok,
        beta_matches_foliation,
        nijenhuis_on_foliation: nij_ok,
        nijenhuis_order: nij_order,
        closure_condition: clo_ok,
        closure_order: clo_order,
        base_char_numbers: chars,
        height,
        frobenius,
        curve,
        curve_closed: closed,
        curve_closed_order: closed_order,
        passes,
    })
}

/// Verdict for a web presented directly by its representative curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveReport {
    pub base_char_numbers: Vec<usize>,
    pub height: usize,
    pub frobenius: Vec<FrobeniusSample>,
    pub curve_closed: bool,
    pub curve_closed_order: i32,
    pub passes: bool,
}

pub fn verify_curve(curve: &FormPoly, samples: usize) -> Result<CurveReport, TensorError> {
    if curve.is_empty() {
        return Err(TensorError::Dim("empty curve".into()));
    }
    let n = curve[0].nvars();
    let r = curve[0].grade();
    if curve.len() != n - r + 1 {
        return Err(TensorError::Dim(format!("curve degree must be {}", n - r)));
    }
    let chars = base_char_numbers(curve)?;
    let height = chars.first().copied().unwrap_or(0);
    let frobenius = frobenius_samples(curve, samples.max(height + 2))?;
    let (closed, closed_order) = curve_closed(curve)?;
    let passes = frobenius.iter().all(|s| s.involutive);
    Ok(CurveReport {
        base_char_numbers: chars,
        height,
        frobenius,
        curve_closed: closed,
        curve_closed_order: closed_order,
        passes,
    })
}

/// Coefficients of dx_i∧dx_j∧dx_k (i<j<k) in γ_{n−2}∧dγ_{n−2} for the
/// diagonal field diag(f_j(x_j)), by the closed expression.
pub fn flatness_obstruction(f: &[JetSeries]) -> Result<BTreeMap<(usize, usize, usize), JetSeries>, TensorError> {
    let n = f.len();
    if n < 3 {
        return Err(TensorError::Dim("need at least three fields".into()));
    }
    let df: Vec<JetSeries> = f.iter().enumerate().map(|(j, fj)| fj.deriv(j)).collect();
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v =
                    f[i].mul(&df[k].sub(&df[j])).add(&f[j].mul(&df[i].sub(&df[k]))).add(&f[k].mul(&df[j].sub(&df[i])));
                out.insert((i, j, k), v);
            }
        }
    }
    Ok(out)
}

/// The same coefficients computed from the representative of
/// (diag(f), Σ dx_j) directly.
pub fn flatness_direct(f: &[JetSeries]) -> Result<BTreeMap<(usize, usize, usize), JetSeries>, TensorError> {
    let n = f.len();
    if n < 3 {
        return Err(TensorError::Dim("need at least three fields".into()));
    }
    let vars = f[0].vars();
    let order = f.iter().map(|x| x.order()).min().unwrap();
    let j = JetTensor11::diag(vars, order, f);
    let beta = JetForm::one_form(vars, order, &vec![JetSeries::one(vars, order); n]);
    let g = representative(&j, &beta)?;
    let gn2 = &g[n - 2];
    let w = gn2.wedge(&gn2.d()?);
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.insert((i, j, k), w.coeff(&[i, j, k]));
            }
        }
    }
    Ok(out)
}

/// Outcome of the compatibility criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatReport {
    pub compatible: bool,
    pub order: i32,
}

/// α₁∧…∧α_r∧dω_J ≡ 0, for closed ω.
pub fn compatibility(alphas: &FoliationSpec, j: &JetTensor11, omega: &JetForm) -> Result<CompatReport, TensorError> {
    if omega.grade() != 2 {
        return Err(TensorError::Dim("ω must be a 2-form".into()));
    }
    if !omega.d()?.is_zero() {
        return Err(TensorError::Precondition("ω is not closed".into()));
    }
    let w = alphas.top_form().wedge(&tau_sub(omega, j)?.d()?);
    Ok(CompatReport { compatible: w.is_zero(), order: w.order() })
}

/// Poisson structure of constant rank given by closed covectors (its image
/// is their common kernel) and a 2-form symplectic on that image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonData {
    pub covectors: Vec<JetForm>,
    pub form: JetForm,
}

/// Skew jet matrix B with Λ(ξ, η) = ξᵀ B η.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetBivector {
    pub vars: Vars,
    pub order: i32,
    pub b: Vec<Vec<JetSeries>>,
}

impl JetBivector {
    pub fn add(&self, o: &Self) -> Self {
        JetBivector {
            vars: self.vars.clone(),
            order: self.order.min(o.order),
            b: self.b.iter().zip(&o.b).map(|(x, y)| x.iter().zip(y).map(|(a, c)| a.add(c)).collect()).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        JetBivector {
            vars: self.vars.clone(),
            order: self.order,
            b: self.b.iter().map(|r| r.iter().map(|x| x.scale(s)).collect()).collect(),
        }
    }

    pub fn at_base(&self) -> MultiVector {
        let m = Matrix::from_rows(self.b.iter().map(|r| r.iter().map(|x| x.constant_term()).collect()).collect());
        MultiVector::from_skew(&m)
    }

    pub fn truncate(&self, order: i32) -> Self {
        JetBivector {
            vars: self.vars.clone(),
            order: order.min(self.order),
            b: self.b.iter().map(|r| r.iter().map(|x| x.truncate(order)).collect()).collect(),
        }
    }
}

fn jet_matrix(vars: &Vars, order: i32, rows: Vec<Vec<JetSeries>>) -> JetTensor11 {
    JetTensor11 { vars: vars.clone(), order, rows }
}

fn jet_inverse_rect(a: Vec<Vec<JetSeries>>, vars: &Vars, order: i32) -> Result<Vec<Vec<JetSeries>>, TensorError> {
    Ok(jet_matrix(vars, order, a).inverse()?.rows)
}

impl PoissonData {
    /// Dual bivector field: image ∩ ker αᵢ, inverse of the restricted form.
    pub fn to_bivector(&self) -> Result<JetBivector, TensorError> {
        let vars = self.form.vars().clone();
        let m = vars.len();
        let mut order = self.form.order();
        let a: Vec<Vec<JetSeries>> = self
            .covectors
            .iter()
            .map(|c| {
                order = order.min(c.order());
                c.one_form_coeffs()
            })
            .collect();
        let r = a.len();
        // pivot columns of the covector matrix at the base point
        let (pivots, free): (Vec<usize>, Vec<usize>) = if r == 0 {
            (vec![], (0..m).collect())
        } else {
            let a0 = Matrix::from_rows(a.iter().map(|row| row.iter().map(|x| x.constant_term()).collect()).collect());
            let (_, piv) = a0.rref();
            if piv.len() < r {
                return Err(TensorError::Singular);
            }
            (piv.clone(), (0..m).filter(|i| !piv.contains(i)).collect())
        };
        let zero = JetSeries::zero(&vars, order);
        // kernel basis: x_F = e_f, x_C = −A_C⁻¹ A_F e_f
        let ac: Vec<Vec<JetSeries>> = a.iter().map(|row| pivots.iter().map(|&p| row[p].clone()).collect()).collect();
        let ac_inv = if r == 0 {
            vec![]
        } else {
            // pad to a square frame-sized matrix so the generic inverse applies
            jet_inverse_rect(ac, &vars, order).map_err(|_| TensorError::Singular)?
        };
        let mut p: Vec<Vec<JetSeries>> = Vec::new();
        for &f in &free {
            let mut v = vec![zero.clone(); m];
            v[f] = JetSeries::one(&vars, order);
            for (ci, &pc) in pivots.iter().enumerate() {
                let mut s = zero.clone();
                for k in 0..r {
                    s = s.add(&ac_inv[ci][k].mul(&a[k][f]));
                }
                v[pc] = s.neg();
            }
            p.push(v);
        }
        let d = p.len();
        let sform: Vec<Vec<JetSeries>> =
            (0..d).map(|i| (0..d).map(|k| self.form.eval_on(&[p[i].clone(), p[k].clone()])).collect()).collect();
        let sinv = jet_inverse_rect(sform, &vars, order)?;
        // B = P (S⁻¹)ᵀ Pᵀ
        let mut b = vec![vec![zero.clone(); m]; m];
        for i in 0..m {
            for k in 0..m {
                let mut s = zero.clone();
                for x in 0..d {
                    if p[x][i].is_zero() {
                        continue;
                    }
                    for y in 0..d {
                        s = s.add(&p[x][i].mul(&sinv[y][x]).mul(&p[y][k]));
                    }
                }
                b[i][k] = s;
            }
        }
        Ok(JetBivector { vars, order, b })
    }
}

/// Coefficients [P,Q]^{ijk} (i<j<k) of the Schouten bracket of two
/// bivector fields, up to a global normalisation.
pub fn schouten(p: &JetBivector, qv: &JetBivector) -> Vec<JetSeries> {
    let m = p.b.len();
    let order = p.order.min(qv.order) - 1;
    let dp: Vec<Vec<Vec<JetSeries>>> =
        (0..m).map(|l| (0..m).map(|i| (0..m).map(|j| p.b[i][j].deriv(l)).collect()).collect()).collect();
    let dq: Vec<Vec<Vec<JetSeries>>> =
        (0..m).map(|l| (0..m).map(|i| (0..m).map(|j| qv.b[i][j].deriv(l)).collect()).collect()).collect();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let mut s = JetSeries::zero(&p.vars, order);
                for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                    for l in 0..m {
                        s = s.add(&p.b[l][a].mul(&dq[l][b][c])).add(&qv.b[l][a].mul(&dp[l][b][c]));
                    }
                }
                out.push(s);
            }
        }
    }
    out
}

/// Mixed Schouten bracket vanishes, for two Poisson structures.
pub fn schouten_compat_oracle(a: &PoissonData, b: &PoissonData) -> Result<CompatReport, TensorError> {
    let pa = a.to_bivector()?;
    let pb = b.to_bivector()?;
    for p in [&pa, &pb] {
        if schouten(p, p).iter().any(|x| !x.is_zero()) {
            return Err(TensorError::Precondition("input is not Poisson".into()));
        }
    }
    let s = schouten(&pa, &pb);
    let order = s.first().map_or(pa.order.min(pb.order) - 1, |x| x.order());
    Ok(CompatReport { compatible: s.iter().all(|x| x.is_zero()), order })
}

/// The Liouville model on coordinates (x, y, u).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiouvilleModel {
    pub vars: Vars,
    pub first: PoissonData,
    pub second: PoissonData,
    /// Fibre scaling u_j ↦ a_j u_j.
    pub fiber_scaling: Vec<Q>,
}

/// Λ from (dy, Σ dx_j∧du_j), Λ₁ from (α, Σ a_j dx_j∧du_j). The αs live on
/// the (x, y) coordinates and are pulled back.
pub fn liouville_model(a: &[Q], alphas: &FoliationSpec) -> Result<LiouvilleModel, TensorError> {
    bihamiltonian_model(a, alphas, None)
}

/// As the Liouville model, with a closed 2-form ω on (x, y) added to the
/// form of Λ₁.
pub fn bihamiltonian_model(
    a: &[Q],
    alphas: &FoliationSpec,
    omega: Option<&JetForm>,
) -> Result<LiouvilleModel, TensorError> {
    let base = alphas.covectors[0].vars();
    let n = base.len();
    let r = alphas.codim();
    if a.len() + r != n {
        return Err(TensorError::Dim(format!("need {} scalars", n - r)));
    }
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() || a[..i].contains(x) {
            return Err(TensorError::Precondition("scalars must be distinct and nonzero".into()));
        }
    }
    let order = alphas.covectors.iter().map(|c| c.order()).min().unwrap();
    let mut names: Vec<String> = base.as_ref().clone();
    for j in 0..n - r {
        names.push(format!("u{}", j + 1));
    }
    let vars: Vars = Arc::new(names);
    let map: Vec<usize> = (0..n).collect();
    let u = |j: usize| n + j;
    let mut om = JetForm::zero(&vars, order, 2);
    let mut om1 = JetForm::zero(&vars, order, 2);
    for j in 0..n - r {
        let w = JetForm::dx(&vars, order, j).wedge(&JetForm::dx(&vars, order, u(j)));
        om = om.add(&w);
        om1 = om1.add(&w.scale(&a[j]));
    }
    let first = PoissonData { covectors: (n - r..n).map(|k| JetForm::dx(&vars, order, k)).collect(), form: om };
    if let Some(w) = omega {
        if w.vars() != base || w.grade() != 2 {
            return Err(TensorError::Dim("ω must be a 2-form on the base coordinates".into()));
        }
        if !w.d()?.is_zero() {
            return Err(TensorError::Precondition("ω is not closed".into()));
        }
        om1 = om1.add(&w.embed(&vars, &map));
    }
    let second = PoissonData { covectors: alphas.covectors.iter().map(|c| c.embed(&vars, &map)).collect(), form: om1 };
    Ok(LiouvilleModel { vars, first, second, fiber_scaling: a.to_vec() })
}

/// G with dx_j∘G = a_j dx_j and dy_k∘G = β_k + a dy_k, on coordinates
/// (x₁…x_{n−r}, y₁…y_r).
pub fn frame_tensor(ax: &[Q], a: &Q, betas: &[JetForm]) -> Result<JetTensor11, TensorError> {
    let vars = betas[0].vars();
    let n = vars.len();
    let r = betas.len();
    if ax.len() + r != n {
        return Err(TensorError::Dim("coordinate count".into()));
    }
    let order = betas.iter().map(|b| b.order()).min().unwrap();
    let mut rows = vec![vec![JetSeries::zero(vars, order); n]; n];
    for (j, aj) in ax.iter().enumerate() {
        rows[j][j] = JetSeries::constant(vars, order, aj.clone());
    }
    for (k, b) in betas.iter().enumerate() {
        let c = b.one_form_coeffs();
        if c[n - r..].iter().any(|x| !x.is_zero()) {
            return Err(TensorError::Precondition("β must only involve dx".into()));
        }
        rows[n - r + k][..n - r].clone_from_slice(&c[..n - r]);
        rows[n - r + k][n - r + k] = JetSeries::constant(vars, order, a.clone());
    }
    JetTensor11::from_rows(vars, order, rows)
}

/// (d(β_k∘J₀) − Σ_ℓ β_ℓ∧∂β_k/∂y_ℓ)∧dy₁∧…∧dy_r for each k.
pub fn frame_torsion_condition(ax: &[Q], a: &Q, betas: &[JetForm]) -> Result<Vec<JetForm>, TensorError> {
    let vars = betas[0].vars();
    let n = vars.len();
    let r = betas.len();
    let order = betas.iter().map(|b| b.order()).min().unwrap();
    let mut d0 = ax.to_vec();
    d0.extend(std::iter::repeat_n(a.clone(), r));
    let j0 = JetTensor11::constant(vars, order, &Matrix::diag(&d0));
    let mut dy = JetForm::function(&JetSeries::one(vars, order));
    for k in 0..r {
        dy = dy.wedge(&JetForm::dx(vars, order, n - r + k));
    }
    for b in betas {
        if !b.d()?.wedge(&dy).is_zero() {
            return Err(TensorError::Precondition("dβ∧dy ≠ 0".into()));
        }
    }
    betas
        .iter()
        .map(|bk| {
            let mut e = tau_circ(bk, &j0)?.d()?;
            for (l, bl) in betas.iter().enumerate() {
                e = e.sub(&bl.wedge(&bk.deriv_coeffs(n - r + l)));
            }
            Ok(e.wedge(&dy))
        })
        .collect()
}
