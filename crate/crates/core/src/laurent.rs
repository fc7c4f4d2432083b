//! Exact Laurent polynomials in `q` and `t` with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::LaurentError;

/// A finite sum of monomials `c * q^a * t^b`.
///
/// Keys are stored as `(t_exp, q_exp)` so that iteration follows the
/// canonical rendering order: ascending `t`, then ascending `q`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<(i64, i64), BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 1)
    }

    pub fn q() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn t() -> Self {
        Self::monomial(0, 1, 1)
    }

    /// `c * q^q_exp * t^t_exp`
    pub fn monomial(q_exp: i64, t_exp: i64, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(q_exp, t_exp, c.into());
        p
    }

    /// Builds a polynomial from `(q_exp, t_exp, coeff)` triples, summing repeats.
    pub fn from_triples<I, C>(triples: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (a, b, c) in triples {
            p.add_term(a, b, c.into());
        }
        p
    }

    /// Univariate helper: `Σ c * q^a` from `(a, c)` pairs.
    pub fn from_q_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        Self::from_triples(terms.into_iter().map(|(a, c)| (a, 0, c)))
    }

    pub fn add_term(&mut self, q_exp: i64, t_exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let key = (t_exp, q_exp);
        let remove = {
            let slot = self.coeffs.entry(key).or_insert_with(BigInt::zero);
            *slot += c;
            slot.is_zero()
        };
        if remove {
            self.coeffs.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, q_exp: i64, t_exp: i64) -> BigInt {
        self.coeffs.get(&(t_exp, q_exp)).cloned().unwrap_or_default()
    }

    /// Iterates `(q_exp, t_exp, coeff)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, &BigInt)> + '_ {
        self.coeffs.iter().map(|(&(b, a), c)| (a, b, c))
    }

    /// `(q_exp, t_exp, coeff)` triples with coefficients narrowed to `i64`.
    pub fn to_triples(&self) -> Result<Vec<(i64, i64, i64)>, LaurentError> {
        self.terms()
            .map(|(a, b, c)| {
                c.to_i64().map(|c| (a, b, c)).ok_or_else(|| LaurentError::CoefficientOverflow(c.to_string()))
            })
            .collect()
    }

    pub fn t_degrees(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.coeffs.keys().map(|&(b, _)| b).collect();
        ds.dedup();
        ds
    }

    pub fn min_q_degree(&self) -> Option<i64> {
        self.coeffs.keys().map(|&(_, a)| a).min()
    }

    pub fn max_q_degree(&self) -> Option<i64> {
        self.coeffs.keys().map(|&(_, a)| a).max()
    }

    /// Multiplies by `q^s`.
    pub fn shift_q(&self, s: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|(&(b, a), c)| ((b, a + s), c.clone())).collect();
        Self { coeffs }
    }

    /// Multiplies by `t^s`.
    pub fn shift_t(&self, s: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|(&(b, a), c)| ((b + s, a), c.clone())).collect();
        Self { coeffs }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The substitution `q -> q^-1`.
    pub fn bar_q(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(&(b, a), c)| ((b, -a), c.clone())).collect();
        Self { coeffs }
    }

    /// Substitutes `t = t0` and collects by powers of `q`.
    ///
    /// Fails when a coefficient of the result is not an integer, or when `t0`
    /// is zero and a negative power of `t` occurs.
    pub fn eval_t(&self, t0: &BigRational) -> Result<LaurentPoly, LaurentError> {
        let mut acc: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (a, b, c) in self.terms() {
            let factor = if b >= 0 {
                num_traits::pow(t0.clone(), b as usize)
            } else if t0.is_zero() {
                return Err(LaurentError::ZeroToNegativePower(b));
            } else {
                num_traits::pow(t0.recip(), (-b) as usize)
            };
            *acc.entry(a).or_insert_with(BigRational::zero) += factor * BigRational::from_integer(c.clone());
        }
        let mut out = LaurentPoly::zero();
        for (a, c) in acc {
            if !c.is_integer() {
                return Err(LaurentError::NonIntegral(c.to_string()));
            }
            out.add_term(a, 0, c.to_integer());
        }
        Ok(out)
    }
}

/// The quantum integer `[m]_q = q^{1-m} + q^{3-m} + ... + q^{m-1}`.
pub fn quantum_int(m: i64) -> Result<LaurentPoly, LaurentError> {
    if m < 0 {
        return Err(LaurentError::NegativeQuantumInt(m));
    }
    Ok(LaurentPoly::from_q_terms((0..m).map(|j| (1 - m + 2 * j, 1))))
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

fn fmt_var(out: &mut Vec<String>, var: &str, e: i64) {
    match e {
        0 => {}
        1 => out.push(var.to_string()),
        _ => out.push(format!("{var}^{e}")),
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (a, b, c)) in self.terms().enumerate() {
            let mut vars = Vec::new();
            fmt_var(&mut vars, "t", b);
            fmt_var(&mut vars, "q", a);
            let mag = c.abs();
            let body = if vars.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                vars.join("*")
            } else {
                format!("{mag}*{}", vars.join("*"))
            };
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (a, b, c) in self.terms() {
            match c.to_i64() {
                Some(c) => seq.serialize_element(&(a, b, c))?,
                None => seq.serialize_element(&(a, b, c.to_string()))?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coeff {
            Int(i64),
            Big(String),
        }
        let raw: Vec<(i64, i64, Coeff)> = Vec::deserialize(d)?;
        let mut p = LaurentPoly::zero();
        for (a, b, c) in raw {
            let c = match c {
                Coeff::Int(c) => BigInt::from(c),
                Coeff::Big(s) => s.parse::<BigInt>().map_err(de::Error::custom)?,
            };
            p.add_term(a, b, c);
        }
        Ok(p)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (a, b, c) in rhs.terms() {
            self.add_term(a, b, c.clone());
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let coeffs = self.coeffs.iter().map(|(k, c)| (*k, -c)).collect();
        LaurentPoly { coeffs }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a1, b1, c1) in self.terms() {
            for (a2, b2, c2) in rhs.terms() {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = LaurentPoly>>(iter: I) -> Self {
        iter.fold(LaurentPoly::zero(), |acc, p| acc + p)
    }
}
