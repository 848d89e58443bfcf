//! Factorisation of rational univariate polynomials: square-free parts,
//! rational roots and Kronecker's method for the remaining factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::UniPoly;
use super::scalar::Q;

/// Above this many divisor combinations Kronecker's search gives up.
const KRONECKER_BUDGET: usize = 200_000;

/// Monic irreducible factors with exponents, plus whether every factor was
/// certified irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(UniPoly, usize)>,
    pub complete: bool,
}

/// Integer primitive multiple (positive leading coefficient).
pub fn primitive_part(p: &UniPoly) -> Vec<BigInt> {
    let l = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.last().is_some_and(|c| c.is_negative()) { -1 } else { 1 };
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g * sign).collect()
}

fn from_ints(c: &[BigInt]) -> UniPoly {
    UniPoly::new(c.iter().map(|x| Q::from_integer(x.clone())).collect())
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    // trial division; inputs are small at desk scale
    let Some(nn) = n.to_u64() else {
        return vec![BigInt::one(), n];
    };
    let mut d = 1u64;
    while d * d <= nn {
        if nn % d == 0 {
            out.push(BigInt::from(d));
            if d * d != nn {
                out.push(BigInt::from(nn / d));
            }
        }
        d += 1;
    }
    out.sort();
    out
}

/// Rational roots (distinct, ascending).
pub fn rational_roots(p: &UniPoly) -> Vec<Q> {
    let mut roots = Vec::new();
    if p.is_zero() {
        return roots;
    }
    let mut c = primitive_part(p);
    // strip roots at zero
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        if !roots.contains(&Q::zero()) {
            roots.push(Q::zero());
        }
    }
    if c.len() <= 1 {
        return roots;
    }
    let f = from_ints(&c);
    for num in divisors(&c[0]) {
        for den in divisors(c.last().unwrap()) {
            for s in [1, -1] {
                let x = Q::new(num.clone() * s, den.clone());
                if !roots.contains(&x) && f.eval(&x).is_zero() {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Square-free decomposition p = ∏ s_k^k (monic s_k), Yun's algorithm.
pub fn squarefree(p: &UniPoly) -> Vec<(UniPoly, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = p.monic();
    let d = f.derivative();
    let a = f.gcd(&d);
    let mut b = f.div_exact(&a).unwrap();
    let mut c = d.div_exact(&a).unwrap_or_else(UniPoly::zero);
    let mut k = 1;
    while b.degree() > Some(0) {
        let dd = c.sub(&b.derivative());
        let g = b.gcd(&dd);
        if g.degree() > Some(0) {
            out.push((g.clone(), k));
        }
        b = b.div_exact(&g).unwrap();
        c = dd.div_exact(&g).unwrap();
        k += 1;
    }
    out
}

fn lagrange(xs: &[Q], ys: &[Q]) -> UniPoly {
    let mut acc = UniPoly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut term = UniPoly::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                term = term.mul(&UniPoly::linear(-xj.clone())).scale(&(Q::one() / (xi - xj)));
            }
        }
        acc = acc.add(&term);
    }
    acc
}

/// A nontrivial factor of degree k of a square-free integer polynomial,
/// `Err(())` when the search budget runs out.
fn kronecker_factor(f: &UniPoly, k: usize) -> Result<Option<UniPoly>, ()> {
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    let mut x = 0i64;
    while xs.len() < k + 1 {
        let xq = Q::from_integer(BigInt::from(x));
        let v = f.eval(&xq);
        if !v.is_zero() {
            xs.push(xq);
            vals.push(v.to_integer());
        }
        x = if x <= 0 { -x + 1 } else { -x };
    }
    let choices: Vec<Vec<BigInt>> =
        vals.iter().map(|v| divisors(v).into_iter().flat_map(|d| [d.clone(), -d]).collect()).collect();
    let total: usize = choices.iter().map(|c| c.len()).product();
    if total > KRONECKER_BUDGET {
        return Err(());
    }
    let mut idx = vec![0usize; k + 1];
    loop {
        let ys: Vec<Q> = idx.iter().zip(&choices).map(|(&i, c)| Q::from_integer(c[i].clone())).collect();
        let g = lagrange(&xs, &ys);
        if g.degree() == Some(k) && g.coeffs().iter().all(|c| c.is_integer()) && f.div_exact(&g).is_some() {
            return Ok(Some(g.monic()));
        }
        // odometer
        let mut p = 0;
        loop {
            if p == idx.len() {
                return Ok(None);
            }
            idx[p] += 1;
            if idx[p] < choices[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// Split a monic square-free polynomial into monic irreducible factors.
fn split_squarefree(p: &UniPoly, complete: &mut bool) -> Vec<UniPoly> {
    let mut out = Vec::new();
    let mut rest = p.monic();
    for r in rational_roots(&rest) {
        let lin = UniPoly::linear(-r);
        rest = rest.div_exact(&lin).unwrap();
        out.push(lin);
    }
    let mut stack = vec![rest];
    while let Some(f) = stack.pop() {
        let d = f.degree().unwrap_or(0);
        if d == 0 {
            continue;
        }
        if d <= 3 {
            // no rational roots left, so irreducible
            out.push(f);
            continue;
        }
        let fi = from_ints(&primitive_part(&f));
        let mut found = None;
        for k in 2..=d / 2 {
            match kronecker_factor(&fi, k) {
                Ok(Some(g)) => {
                    found = Some(g);
                    break;
                }
                Ok(None) => {}
                Err(()) => {
                    *complete = false;
                    break;
                }
            }
        }
        match found {
            Some(g) => {
                let h = f.div_exact(&g).unwrap().monic();
                stack.push(g);
                stack.push(h);
            }
            None => out.push(f),
        }
    }
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| format!("{a}").cmp(&format!("{b}"))));
    out
}

/// Full factorisation into monic irreducibles over Q.
pub fn factor(p: &UniPoly) -> Factorization {
    let mut complete = true;
    let mut factors = Vec::new();
    for (s, k) in squarefree(p) {
        for f in split_squarefree(&s, &mut complete) {
            factors.push((f, k));
        }
    }
    factors.sort_by(|a, b| {
        a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs().iter().rev().cmp(b.0.coeffs().iter().rev()))
    });
    Factorization { factors, complete }
}
