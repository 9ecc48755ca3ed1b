//! Exact arithmetic in the Laurent polynomial ring `Z[q, q^-1]`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QIntError {
    #[error("q-binomial [{m} choose {p}] is undefined")]
    BinomialRange { m: i64, p: i64 },
    #[error("cannot parse Laurent polynomial from {0:?}")]
    Parse(String),
}

/// An element of `Z[q, q^-1]`, stored as a sparse map exponent -> coefficient.
///
/// Zero coefficients are never stored, so structural equality is ring equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// The variable `q`.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * q^e`.
    pub fn monomial(c: impl Into<BigInt>, e: i32) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `q^e`.
    pub fn q_pow(e: i32) -> Self {
        Self::monomial(1, e)
    }

    /// `(-q)^e`, the unit that appears in the exterior algebra structure maps.
    pub fn neg_q_pow(e: i32) -> Self {
        let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
        Self::monomial(sign, e)
    }

    /// `sign * q^e` with `sign` in `{1, -1}`.
    pub fn signed_q_pow(negative: bool, e: i32) -> Self {
        Self::monomial(if negative { -1 } else { 1 }, e)
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: i32) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    /// Terms in ascending exponent order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i32, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    fn add_term(&mut self, e: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Bar involution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    /// True iff `self = ±q^k`.
    pub fn is_unit(&self) -> bool {
        self.as_unit().is_some()
    }

    /// Returns `(negative, k)` when `self = ±q^k`.
    pub fn as_unit(&self) -> Option<(bool, i32)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        if c.abs().is_one() {
            Some((c.is_negative(), *e))
        } else {
            None
        }
    }

    /// Inverse of a unit; `None` otherwise.
    pub fn unit_inverse(&self) -> Option<Self> {
        self.as_unit().map(|(neg, k)| Self::signed_q_pow(neg, -k))
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Specialization at `q = 1`.
    pub fn eval_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Exact division. Returns `None` if `divisor` does not divide `self` in `Z[q, q^-1]`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        let (dlo, dhi) = (divisor.min_exponent()?, divisor.max_exponent()?);
        let lead = divisor.terms[&dhi].clone();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(rhi) = rem.max_exponent() {
            let rlo = rem.min_exponent().unwrap();
            if rhi - rlo < dhi - dlo {
                return None;
            }
            let c = &rem.terms[&rhi];
            if !(c % &lead).is_zero() {
                return None;
            }
            let t = Self::monomial(c / &lead, rhi - dhi);
            rem -= &(&t * divisor);
            quot += &t;
        }
        Some(quot)
    }

    fn fmt_term(e: i32, c: &BigInt) -> String {
        format!("{c}*q^{e}")
    }
}

/// Balanced q-integer `[m] = (q^m - q^-m) / (q - q^-1)`.
pub fn qint(m: i32) -> LaurentPoly {
    let (sign, m) = if m < 0 { (-1, -m) } else { (1, m) };
    let mut p = LaurentPoly::zero();
    for k in 0..m {
        p.add_term(m - 1 - 2 * k, BigInt::from(sign));
    }
    p
}

/// Balanced Gaussian binomial `[m choose p]`, invariant under the bar involution.
pub fn qbinomial(m: i64, p: i64) -> Result<LaurentPoly, QIntError> {
    if p < 0 || m < 0 || p > m {
        return Err(QIntError::BinomialRange { m, p });
    }
    let (m, p) = (m as usize, p as usize);
    // Pascal rule: [m, p] = q^p [m-1, p] + q^-(m-p) [m-1, p-1].
    let mut row = vec![LaurentPoly::one()];
    for mm in 1..=m {
        let mut next = Vec::with_capacity(mm + 1);
        for pp in 0..=mm {
            let mut v = LaurentPoly::zero();
            if pp < mm {
                v += &row[pp].shift(pp as i32);
            }
            if pp > 0 {
                v += &row[pp - 1].shift(-((mm - pp) as i32));
            }
            next.push(v);
        }
        row = next;
    }
    Ok(row.swap_remove(p))
}

impl fmt::Display for LaurentPoly {
    /// `c0*q^e0 + c1*q^e1 + ...` with exponents descending, `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.terms.iter().rev().map(|(e, c)| Self::fmt_term(*e, c)).collect();
        write!(f, "{}", s.join(" + "))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl FromStr for LaurentPoly {
    type Err = QIntError;

    /// Accepts the display form plus the usual shorthand (`q^2 - 1`, `-q^-1`, `3`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QIntError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        // Split into signed terms, keeping a '-' that follows '^' with its exponent.
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() && prev != Some('^') && prev != Some('+') {
                terms.push(std::mem::take(&mut cur));
            }
            if ch == '+' && prev == Some('+') {
                return Err(err());
            }
            cur.push(ch);
            prev = Some(ch);
        }
        terms.push(cur);

        let mut p = LaurentPoly::zero();
        for t in terms {
            let t = t.trim_start_matches('+');
            let (neg, body) = match t.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, t),
            };
            if body.is_empty() {
                return Err(err());
            }
            let (coef, exp) = if let Some(qpos) = body.find('q') {
                let c = body[..qpos].trim_end_matches('*');
                let c: BigInt = if c.is_empty() { BigInt::one() } else { c.parse().map_err(|_| err())? };
                let rest = &body[qpos + 1..];
                let e: i32 = if rest.is_empty() { 1 } else { rest.strip_prefix('^').ok_or_else(err)?.parse().map_err(|_| err())? };
                (c, e)
            } else {
                (body.parse::<BigInt>().map_err(|_| err())?, 0)
            };
            p.add_term(exp, if neg { -coef } else { coef });
        }
        Ok(p)
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c);
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        r += rhs;
        r
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        r -= rhs;
        r
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut r = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }
}

impl MulAssign<&LaurentPoly> for LaurentPoly {
    fn mul_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self * rhs;
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $f(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::constant(c)
    }
}

/// Orders by degree first; only used to give deterministic sort keys.
pub fn degree_cmp(a: &LaurentPoly, b: &LaurentPoly) -> Ordering {
    a.max_exponent().cmp(&b.max_exponent()).then_with(|| a.cmp(b))
}
