//! Exact scalars: rationals, plus the Gaussian rationals Q(i) standing in
//! for the complex ground field.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The rational ground field.
pub type Q = BigRational;

/// Scalar used by the differential-geometric layers.
pub type Scalar = Q;

/// Operations every exact ground field provides.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Short name used in reports ("rational", "quadratic-extension").
    const MODE: &'static str;

    fn from_q(q: Q) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_q(q(v))
    }

    /// Inverse; panics on zero like integer division.
    fn inv(&self) -> Self {
        Self::one() / self
    }

    fn parse(s: &str) -> Result<Self, ScalarParseError>;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar {0:?}")]
pub struct ScalarParseError(pub String);

/// Shorthand for an integer rational.
pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Shorthand for `n/d`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical "p/q" string (integers print without the denominator).
pub fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q, ScalarParseError> {
    let t = s.trim();
    let err = || ScalarParseError(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(BigInt::from_str(t).map_err(|_| err())?)),
    }
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

impl Field for Q {
    const MODE: &'static str = "rational";

    fn from_q(q: Q) -> Self {
        q
    }

    fn parse(s: &str) -> Result<Self, ScalarParseError> {
        parse_q(s)
    }
}

/// Gaussian rational re + im·i.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QI {
    pub re: Q,
    pub im: Q,
}

impl QI {
    pub fn new(re: Q, im: Q) -> Self {
        QI { re, im }
    }

    pub fn i() -> Self {
        QI::new(Q::zero(), Q::one())
    }

    pub fn conj(&self) -> Self {
        QI::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Display for QI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", q_to_string(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}i", q_to_string(&self.im));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}i", q_to_string(&self.re), sign, q_to_string(&self.im.abs()))
    }
}

impl Zero for QI {
    fn zero() -> Self {
        QI::new(Q::zero(), Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for QI {
    fn one() -> Self {
        QI::new(Q::one(), Q::zero())
    }
}

impl Add for QI {
    type Output = QI;
    fn add(self, o: QI) -> QI {
        QI::new(self.re + o.re, self.im + o.im)
    }
}
impl Add<&QI> for QI {
    type Output = QI;
    fn add(self, o: &QI) -> QI {
        QI::new(self.re + &o.re, self.im + &o.im)
    }
}
impl Sub for QI {
    type Output = QI;
    fn sub(self, o: QI) -> QI {
        QI::new(self.re - o.re, self.im - o.im)
    }
}
impl Sub<&QI> for QI {
    type Output = QI;
    fn sub(self, o: &QI) -> QI {
        QI::new(self.re - &o.re, self.im - &o.im)
    }
}
impl Mul<&QI> for QI {
    type Output = QI;
    fn mul(self, o: &QI) -> QI {
        QI::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}
impl Mul for QI {
    type Output = QI;
    fn mul(self, o: QI) -> QI {
        self * &o
    }
}
impl Div<&QI> for QI {
    type Output = QI;
    fn div(self, o: &QI) -> QI {
        let n = o.norm();
        if n.is_zero() {
            panic!("division by zero");
        }
        let p = self * &o.conj();
        QI::new(p.re / &n, p.im / &n)
    }
}
impl Div for QI {
    type Output = QI;
    fn div(self, o: QI) -> QI {
        self / &o
    }
}
impl Neg for QI {
    type Output = QI;
    fn neg(self) -> QI {
        QI::new(-self.re, -self.im)
    }
}

impl Field for QI {
    const MODE: &'static str = "quadratic-extension";

    fn from_q(q: Q) -> Self {
        QI::new(q, Q::zero())
    }

    /// Accepts "a", "bi", "a+bi", "a-bi" with rational a, b.
    fn parse(s: &str) -> Result<Self, ScalarParseError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ScalarParseError(s.to_string());
        let Some(body) = t.strip_suffix('i') else {
            return Ok(QI::from_q(parse_q(&t)?));
        };
        // split at the last sign that is not the leading one
        let cut = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(k, _)| k).last();
        let (re, im) = match cut {
            Some(k) => (parse_q(&body[..k])?, &body[k..]),
            None => (Q::zero(), body),
        };
        let im = match im {
            "" | "+" => Q::one(),
            "-" => -Q::one(),
            x => parse_q(x.strip_prefix('+').unwrap_or(x)).map_err(|_| err())?,
        };
        Ok(QI::new(re, im))
    }
}
