//! Truncated multivariate power series (jets) with rational coefficients.
//!
//! A jet of order N records every Taylor coefficient of total degree ≤ N.
//! Differentiation costs one order and products keep the smaller order, so
//! the order carried by a result is exactly the order to which it is known.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::scalar::{q, q_to_string, Q};

/// Exponent vector, ordered graded-lexicographically: lower total degree
/// first, then larger exponent of the earlier variable first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u8>);

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| o.0.cmp(&self.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// All monomials in `nvars` variables of total degree ≤ `order`, graded-lex.
pub fn monomials(nvars: usize, order: i32) -> Vec<Mono> {
    let mut out = Vec::new();
    if order < 0 {
        return out;
    }
    fn rec(nvars: usize, i: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Mono>) {
        if i == nvars {
            out.push(Mono(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur.push(e as u8);
            rec(nvars, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    rec(nvars, 0, order as u32, &mut Vec::new(), &mut out);
    out.sort();
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetSeries {
    vars: Arc<Vec<String>>,
    order: i32,
    terms: BTreeMap<Mono, Q>,
}

/// Shared variable list constructor.
pub fn var_names(names: &[&str]) -> Arc<Vec<String>> {
    Arc::new(names.iter().map(|s| s.to_string()).collect())
}

impl JetSeries {
    pub fn zero(vars: &Arc<Vec<String>>, order: i32) -> Self {
        JetSeries { vars: vars.clone(), order, terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Arc<Vec<String>>, order: i32, c: Q) -> Self {
        let mut j = Self::zero(vars, order);
        j.add_term(Mono::one(vars.len()), c);
        j
    }

    pub fn one(vars: &Arc<Vec<String>>, order: i32) -> Self {
        Self::constant(vars, order, Q::one())
    }

    /// The coordinate function of variable `i`.
    pub fn var(vars: &Arc<Vec<String>>, order: i32, i: usize) -> Self {
        let mut j = Self::zero(vars, order);
        j.add_term(Mono::var(vars.len(), i), Q::one());
        j
    }

    /// Build from (exponents, coefficient) pairs; terms above the order drop.
    pub fn from_terms<I: IntoIterator<Item = (Vec<u8>, Q)>>(vars: &Arc<Vec<String>>, order: i32, terms: I) -> Self {
        let mut j = Self::zero(vars, order);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length");
            j.add_term(Mono(e), c);
        }
        j
    }

    /// Adds c·x^e in place, respecting truncation.
    pub fn add_term(&mut self, e: Mono, c: Q) {
        if c.is_zero() || e.degree() as i32 > self.order {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Q> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u8]) -> Q {
        self.terms.get(&Mono(e.to_vec())).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.nvars()])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    fn same_vars(&self, o: &Self) {
        assert!(Arc::ptr_eq(&self.vars, &o.vars) || self.vars == o.vars, "jets over different variables");
    }

    /// Lower the truncation order.
    pub fn truncate(&self, order: i32) -> Self {
        let order = order.min(self.order);
        JetSeries {
            vars: self.vars.clone(),
            order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() as i32 <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Raise the declared order, treating missing higher terms as zero.
    /// Only sound for jets that are exact polynomials.
    pub fn with_order(&self, order: i32) -> Self {
        let mut j = self.truncate(order);
        j.order = order;
        j
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_vars(o);
        let order = self.order.min(o.order);
        let mut r = self.truncate(order);
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
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
        if s.is_zero() {
            return Self::zero(&self.vars, self.order);
        }
        JetSeries {
            vars: self.vars.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_vars(o);
        let order = self.order.min(o.order);
        let mut r = Self::zero(&self.vars, order);
        for (ma, ca) in &self.terms {
            let da = ma.degree() as i32;
            for (mb, cb) in &o.terms {
                if da + mb.degree() as i32 > order {
                    // terms are graded, so later ones are only larger
                    break;
                }
                r.add_term(ma.mul(mb), ca * cb);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(&self.vars, self.order);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Partial derivative; the result is known to one order less.
    pub fn deriv(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars, self.order - 1);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            r.add_term(m2, c * q(e as i64));
        }
        r
    }

    /// Antiderivative in variable i with zero integration constant; gains an order.
    pub fn integrate(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars, self.order + 1);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2.0[i] += 1;
            r.add_term(m2.clone(), c / q(m2.0[i] as i64));
        }
        r
    }

    /// Multiplicative inverse of a jet with nonzero constant term.
    pub fn inverse(&self) -> Option<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return None;
        }
        // 1/(c(1 - u)) = c⁻¹ Σ uᵏ with u = 1 - f/c of positive valuation
        let ci = Q::one() / &c;
        let one = Self::one(&self.vars, self.order);
        let u = one.sub(&self.scale(&ci));
        let mut acc = one.clone();
        let mut pw = one;
        for _ in 0..self.order.max(0) {
            pw = pw.mul(&u);
            acc = acc.add(&pw);
        }
        Some(acc.scale(&ci))
    }

    /// Substitute series `subs[i]` (over a common target variable list,
    /// each with zero constant term) for variable i.
    pub fn compose(&self, subs: &[JetSeries]) -> Self {
        assert_eq!(subs.len(), self.nvars());
        let tv = subs[0].vars.clone();
        let order = subs.iter().map(|s| s.order).min().unwrap().min(self.order);
        assert!(
            subs.iter().all(|s| s.constant_term().is_zero()),
            "composition needs substitutions vanishing at the origin"
        );
        let mut powers: Vec<Vec<JetSeries>> = subs
            .iter()
            .map(|s| vec![JetSeries::one(&tv, order)].into_iter().chain(std::iter::once(s.truncate(order))).collect())
            .collect();
        let mut r = JetSeries::zero(&tv, order);
        for (m, c) in &self.terms {
            let mut t = JetSeries::constant(&tv, order, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&powers[i][1]);
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            r = r.add(&t);
        }
        r
    }

    /// Substitute a constant for variable i (only 0 keeps exactness for
    /// truncated data; other values are rejected).
    pub fn set_zero(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars, self.order);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                r.add_term(m.clone(), c.clone());
            }
        }
        r
    }

    /// Re-express over a new variable list through a variable map
    /// (`map[i]` = index of old variable i in the new list).
    pub fn embed(&self, vars: &Arc<Vec<String>>, map: &[usize]) -> Self {
        let mut r = Self::zero(vars, self.order);
        for (m, c) in &self.terms {
            let mut e = vec![0u8; vars.len()];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            r.add_term(Mono(e), c.clone());
        }
        r
    }

    /// Evaluate the truncated polynomial at a point.
    pub fn eval_poly(&self, pt: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in pt.iter().zip(&m.0) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Graded-lex "(i1,...,ik)" → "p/q" map, used for JSON.
    pub fn term_strings(&self) -> Vec<(String, String)> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let e: Vec<String> = m.0.iter().map(|x| x.to_string()).collect();
                (format!("({})", e.join(",")), q_to_string(c))
            })
            .collect()
    }
}

impl fmt::Display for JetSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O({})", self.order + 1);
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", q_to_string(c))?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", self.vars[i])?,
                    _ => write!(f, "*{}^{}", self.vars[i], e)?,
                }
            }
        }
        write!(f, " + O({})", self.order + 1)
    }
}
