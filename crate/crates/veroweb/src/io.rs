//! JSON encodings. Scalars are strings "p/q"; matrices are row-major
//! arrays; exterior index sets are 1-based strings "1,3,4"; jet exponents
//! are "(i1,...,ik)" keys in graded-lex order.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::exact::jet::{JetSeries, Mono};
use crate::exact::matrix::Matrix;
use crate::exact::poly::UniPoly;
use crate::exact::scalar::{Field, Q};
use crate::exact::subspace::Subspace;
use crate::exterior::{indices_mask, mask_indices, MultiVector, PolyMultiVector};
use crate::tensor::{JetForm, JetTensor11};

/// A schema violation located by a JSON pointer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{p}: {}", self.message)
    }
}

impl std::error::Error for SchemaError {}

type R<T> = Result<T, SchemaError>;

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// A parsed input document.
pub struct Doc {
    root: Value,
}

impl Doc {
    pub fn parse(text: &str) -> R<Doc> {
        if text.trim().is_empty() {
            return Err(SchemaError { pointer: String::new(), message: "empty input".into() });
        }
        serde_json::from_str(text)
            .map(|root| Doc { root })
            .map_err(|e| SchemaError { pointer: String::new(), message: format!("invalid JSON: {e}") })
    }

    pub fn root(&self) -> At<'_> {
        At { v: &self.root, ptr: String::new() }
    }
}

/// A JSON value together with its pointer.
#[derive(Clone, Debug)]
pub struct At<'a> {
    pub v: &'a Value,
    pub ptr: String,
}

impl<'a> At<'a> {
    pub fn err<T>(&self, msg: impl Into<String>) -> R<T> {
        Err(SchemaError { pointer: self.ptr.clone(), message: msg.into() })
    }

    pub fn get(&self, key: &str) -> R<At<'a>> {
        match self.opt(key)? {
            Some(x) => Ok(x),
            None => {
                Err(SchemaError { pointer: format!("{}/{}", self.ptr, escape(key)), message: "missing field".into() })
            }
        }
    }

    pub fn opt(&self, key: &str) -> R<Option<At<'a>>> {
        let Some(obj) = self.v.as_object() else {
            return self.err("expected an object");
        };
        Ok(obj.get(key).filter(|v| !v.is_null()).map(|v| At { v, ptr: format!("{}/{}", self.ptr, escape(key)) }))
    }

    pub fn items(&self) -> R<Vec<At<'a>>> {
        let Some(arr) = self.v.as_array() else {
            return self.err("expected an array");
        };
        Ok(arr.iter().enumerate().map(|(i, v)| At { v, ptr: format!("{}/{i}", self.ptr) }).collect())
    }

    pub fn entries(&self) -> R<Vec<(String, At<'a>)>> {
        let Some(obj) = self.v.as_object() else {
            return self.err("expected an object");
        };
        Ok(obj.iter().map(|(k, v)| (k.clone(), At { v, ptr: format!("{}/{}", self.ptr, escape(k)) })).collect())
    }

    pub fn str(&self) -> R<&'a str> {
        match self.v.as_str() {
            Some(s) => Ok(s),
            None => self.err("expected a string"),
        }
    }

    pub fn usize(&self) -> R<usize> {
        match self.v.as_u64() {
            Some(x) => Ok(x as usize),
            None => self.err("expected a nonnegative integer"),
        }
    }

    pub fn scalar<F: Field>(&self) -> R<F> {
        let s = match self.v {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() => n.to_string(),
            _ => return self.err("expected a scalar string \"p/q\""),
        };
        F::parse(&s).or_else(|e| self.err(e.to_string()))
    }

    pub fn vector<F: Field>(&self) -> R<Vec<F>> {
        self.items()?.iter().map(|x| x.scalar()).collect()
    }

    pub fn matrix<F: Field>(&self) -> R<Matrix<F>> {
        let rows: Vec<Vec<F>> = self.items()?.iter().map(|r| r.vector()).collect::<R<_>>()?;
        if rows.is_empty() {
            return self.err("empty matrix");
        }
        let c = rows[0].len();
        if let Some(i) = rows.iter().position(|r| r.len() != c) {
            return Err(SchemaError {
                pointer: format!("{}/{i}", self.ptr),
                message: format!("row length differs from {c}"),
            });
        }
        Ok(Matrix::from_rows(rows))
    }

    pub fn square<F: Field>(&self) -> R<Matrix<F>> {
        let m = self.matrix()?;
        if !m.is_square() {
            return self.err("expected a square matrix");
        }
        Ok(m)
    }

    pub fn subspace<F: Field>(&self) -> R<Subspace<F>> {
        let n = self.get("ambient")?.usize()?;
        let b = self.get("basis")?;
        let vs: Vec<Vec<F>> = b.items()?.iter().map(|v| v.vector()).collect::<R<_>>()?;
        if let Some(i) = vs.iter().position(|v| v.len() != n) {
            return Err(SchemaError {
                pointer: format!("{}/{i}", b.ptr),
                message: format!("vector length differs from ambient {n}"),
            });
        }
        Ok(Subspace::span(n, vs))
    }

    fn index_set(&self, key: &str, n: usize) -> R<Vec<usize>> {
        let ix: Vec<usize> = if key.trim().is_empty() {
            Vec::new()
        } else {
            key.split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .or_else(|_| self.err(format!("bad index set {key:?}")))?
        };
        if ix.iter().any(|&i| i == 0 || i > n) || ix.windows(2).any(|w| w[0] >= w[1]) {
            return self.err(format!("index set {key:?} must be strictly increasing in 1..={n}"));
        }
        Ok(ix.into_iter().map(|i| i - 1).collect())
    }

    pub fn multivector<F: Field>(&self) -> R<MultiVector<F>> {
        let n = self.get("dim")?.usize()?;
        let grade = self.get("grade")?.usize()?;
        let mut out = MultiVector::zero(n, grade);
        for (k, v) in self.get("terms")?.entries()? {
            let ix = v.index_set(&k, n)?;
            if ix.len() != grade {
                return v.err(format!("index set has {} entries, grade is {grade}", ix.len()));
            }
            out.add_term(indices_mask(&ix), v.scalar()?);
        }
        Ok(out)
    }

    fn vars(&self) -> R<Arc<Vec<String>>> {
        let names: Vec<String> = self.items()?.iter().map(|x| x.str().map(str::to_string)).collect::<R<_>>()?;
        if names.is_empty() {
            return self.err("no variables");
        }
        Ok(Arc::new(names))
    }

    fn order(&self) -> R<i32> {
        match self.v.as_i64() {
            Some(x) if (0..=64).contains(&x) => Ok(x as i32),
            _ => self.err("order must be an integer in 0..=64"),
        }
    }

    fn series_terms(&self, vars: &Arc<Vec<String>>, order: i32) -> R<JetSeries> {
        let mut s = JetSeries::zero(vars, order);
        for (k, v) in self.entries()? {
            let inner = k.trim().trim_start_matches('(').trim_end_matches(')');
            let e: Vec<u8> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|p| p.trim().parse::<u8>())
                    .collect::<Result<_, _>>()
                    .or_else(|_| v.err(format!("bad exponent tuple {k:?}")))?
            };
            if e.len() != vars.len() {
                return v.err(format!("exponent tuple needs {} entries", vars.len()));
            }
            let mono = Mono(e);
            if mono.degree() as i32 > order {
                return v.err(format!("term degree exceeds order {order}"));
            }
            s.add_term(mono, v.scalar()?);
        }
        Ok(s)
    }

    pub fn series(&self) -> R<JetSeries> {
        let vars = self.get("vars")?.vars()?;
        let order = self.get("order")?.order()?;
        self.get("terms")?.series_terms(&vars, order)
    }

    pub fn form(&self) -> R<JetForm> {
        let vars = self.get("vars")?.vars()?;
        let order = self.get("order")?.order()?;
        let grade = self.get("grade")?.usize()?;
        if grade > vars.len() {
            return self.err("grade exceeds the number of variables");
        }
        let mut f = JetForm::zero(&vars, order, grade);
        for (k, v) in self.get("terms")?.entries()? {
            let ix = v.index_set(&k, vars.len())?;
            if ix.len() != grade {
                return v.err(format!("index set has {} entries, grade is {grade}", ix.len()));
            }
            f.add_term(indices_mask(&ix), v.series_terms(&vars, order)?);
        }
        Ok(f)
    }

    pub fn tensor(&self) -> R<JetTensor11> {
        let vars = self.get("vars")?.vars()?;
        let order = self.get("order")?.order()?;
        let rows_at = self.get("rows")?;
        let rows_in = rows_at.items()?;
        if rows_in.len() != vars.len() {
            return rows_at.err(format!("need {} rows", vars.len()));
        }
        let mut rows = Vec::new();
        for r in rows_in {
            let cells = r.items()?;
            if cells.len() != vars.len() {
                return r.err(format!("need {} entries", vars.len()));
            }
            rows.push(cells.iter().map(|c| c.series_terms(&vars, order)).collect::<R<Vec<_>>>()?);
        }
        JetTensor11::from_rows(&vars, order, rows).or_else(|e| self.err(e.to_string()))
    }

    /// Optional "schema" key must carry the expected family name.
    pub fn check_schema(&self, family: &str) -> R<()> {
        if let Some(s) = self.opt("schema")? {
            let name = s.str()?;
            if !name.starts_with(family) {
                return s.err(format!("expected schema {family}@…, found {name:?}"));
            }
        }
        Ok(())
    }
}

pub fn scalar<F: Field>(x: &F) -> Value {
    Value::String(x.to_string())
}

pub fn vector<F: Field>(v: &[F]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn matrix<F: Field>(m: &Matrix<F>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector(r)).collect())
}

pub fn subspace<F: Field>(s: &Subspace<F>) -> Value {
    json!({"ambient": s.ambient(), "basis": s.basis().iter().map(|b| vector(b)).collect::<Vec<_>>()})
}

fn index_key(mask: u32) -> String {
    mask_indices(mask).iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub fn multivector<F: Field>(m: &MultiVector<F>) -> Value {
    let mut terms = Map::new();
    for (mask, c) in m.terms() {
        terms.insert(index_key(*mask), scalar(c));
    }
    json!({"dim": m.dim(), "grade": m.grade(), "terms": terms})
}

pub fn poly_multivector<F: Field>(p: &PolyMultiVector<F>) -> Value {
    Value::Array(p.coeffs().iter().map(multivector).collect())
}

/// Coefficients in ascending degree.
pub fn poly<F: Field>(p: &UniPoly<F>) -> Value {
    vector(p.coeffs())
}

fn series_terms(s: &JetSeries) -> Value {
    let mut terms = Map::new();
    for (k, v) in s.term_strings() {
        terms.insert(k, Value::String(v));
    }
    Value::Object(terms)
}

pub fn series(s: &JetSeries) -> Value {
    json!({"vars": s.vars().as_ref(), "order": s.order(), "terms": series_terms(s)})
}

pub fn form(f: &JetForm) -> Value {
    let mut terms = Map::new();
    for (mask, c) in f.terms() {
        if !c.is_zero() {
            terms.insert(index_key(*mask), series_terms(c));
        }
    }
    json!({"vars": f.vars().as_ref(), "order": f.order(), "grade": f.grade(), "terms": terms})
}

pub fn tensor(t: &JetTensor11) -> Value {
    let rows: Vec<Value> = t.rows().iter().map(|r| Value::Array(r.iter().map(series_terms).collect())).collect();
    json!({"vars": t.vars().as_ref(), "order": t.order(), "rows": rows})
}

pub fn q(x: &Q) -> Value {
    scalar(x)
}
