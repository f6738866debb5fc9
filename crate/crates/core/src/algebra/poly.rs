//! Dense univariate polynomials over a pluggable coefficient ring.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ring::Ring;
use crate::error::{Error, Result};

/// Dense polynomial, `coeffs[i]` is the coefficient of `x^i`.
///
/// The zero polynomial is the empty coefficient vector; otherwise the
/// leading coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

/// Integer polynomials.
pub type ZPoly = Poly<BigInt>;
/// Rational polynomials.
pub type QPoly = Poly<BigRational>;

impl<R: Ring> Poly<R> {
    pub fn new(coeffs: Vec<R>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^deg`
    pub fn monomial(c: R, deg: usize) -> Self {
        if c.is_zero_elem() {
            return Self::zero();
        }
        let mut coeffs = vec![c.zero_like(); deg + 1];
        coeffs[deg] = c;
        Self { coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero_elem()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&R> {
        self.coeffs.get(i)
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    fn sample(&self, other: &Self) -> Option<R> {
        self.coeffs
            .first()
            .or_else(|| other.coeffs.first())
            .map(|c| c.zero_like())
    }

    /// True when every coefficient of both operands lives in one ring.
    pub fn same_ring(&self, other: &Self) -> bool {
        match (self.coeffs.first(), other.coeffs.first()) {
            (Some(a), Some(b)) => a.same_ring(b),
            _ => true,
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let Some(zero) = self.sample(other) else {
            return Self::zero();
        };
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.plus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => zero.clone(),
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn neg_ref(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.negated()).collect(),
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_elem() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero_elem() {
                    continue;
                }
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    /// `self^e`; the zero polynomial has no ring context, so `0^e = 0` for all `e`.
    pub fn pow(&self, mut e: u32) -> Self {
        let Some(c) = self.coeffs.first() else {
            return Self::zero();
        };
        let one = Self::constant(c.one_like());
        let mut base = self.clone();
        let mut acc = one;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Euclidean division; the divisor's leading coefficient must be a unit.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if !self.same_ring(divisor) {
            return Err(Error::RingMismatch);
        }
        let Some(lead) = divisor.leading() else {
            return Err(Error::DivisionByZero);
        };
        let lead_inv = lead.inverse().ok_or(Error::NonInvertibleLeading)?;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let zero = lead.zero_like();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![zero; self.coeffs.len() - dd];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero_elem() {
                continue;
            }
            let q = top.times(&lead_inv);
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                if !dc.is_zero_elem() {
                    rem[i + j] = rem[i + j].minus(&q.times(dc));
                }
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Division that must leave no remainder.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.divrem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::CheckFailed("polynomial division left a remainder".into()))
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.times(&c.from_i64_like(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }

    /// `self(inner(x))`
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(inner).add_ref(&Self::constant(c.clone()));
        }
        acc
    }

    /// Divide through by the leading coefficient.
    pub fn monic(&self) -> Result<Self> {
        let Some(lead) = self.leading() else {
            return Ok(Self::zero());
        };
        let inv = lead.inverse().ok_or(Error::NonInvertibleLeading)?;
        Ok(self.scale(&inv))
    }

    /// Monic gcd over a field.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Reflect the coefficient sequence: `x^deg * f(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl Poly<BigInt> {
    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn to_rational(&self) -> QPoly {
        self.map(|c| BigRational::from_integer(c.clone()))
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }
}

impl Poly<BigRational> {
    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
    }

    /// The integer polynomial with the same coefficients, if all are integral.
    pub fn to_integer(&self) -> Option<ZPoly> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(Poly::new)
    }
}

/// Operation selector for [`poly_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    DivRem,
}

/// Result of [`poly_arith`]: a single polynomial, or (quotient, remainder).
#[derive(Debug, Clone, PartialEq)]
pub enum PolyArith<R> {
    Single(Poly<R>),
    QuotRem(Poly<R>, Poly<R>),
}

/// Checked polynomial arithmetic with ring-compatibility validation.
pub fn poly_arith<R: Ring>(a: &Poly<R>, b: &Poly<R>, op: PolyOp) -> Result<PolyArith<R>> {
    let compatible = a
        .coeffs
        .iter()
        .chain(b.coeffs.iter())
        .zip(a.coeffs.iter().chain(b.coeffs.iter()).skip(1))
        .all(|(x, y)| x.same_ring(y));
    if !compatible {
        return Err(Error::RingMismatch);
    }
    Ok(match op {
        PolyOp::Add => PolyArith::Single(a.add_ref(b)),
        PolyOp::Sub => PolyArith::Single(a.sub_ref(b)),
        PolyOp::Mul => PolyArith::Single(a.mul_ref(b)),
        PolyOp::DivRem => {
            let (q, r) = a.divrem(b)?;
            PolyArith::QuotRem(q, r)
        }
    })
}

/// Squarefreeness over a field: `gcd(f, f')` is constant.
///
/// A derivative that vanishes identically (characteristic dividing every
/// exponent) is reported as "not squarefree" rather than treated as an error.
pub fn squarefree<R: Ring>(f: &Poly<R>) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::InvalidModel("zero polynomial".into()));
    }
    let d = f.derivative();
    if d.is_zero() {
        return Ok(f.is_constant());
    }
    Ok(f.gcd(&d)?.is_constant())
}

/// Squarefreeness of an integer polynomial, tested over Q.
pub fn squarefree_over_q(f: &ZPoly) -> Result<bool> {
    squarefree(&f.to_rational())
}

/// The integer polynomial from a rational one whose coefficients are
/// integral after clearing denominators (primitive part, positive leading).
pub fn primitive_part(f: &QPoly) -> ZPoly {
    use num_integer::Integer;
    if f.is_zero() {
        return ZPoly::zero();
    }
    let lcm = f
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: Vec<BigInt> = ints.into_iter().map(|c| c / &g).collect();
    if out.last().is_some_and(|c| c.sign() == num_bigint::Sign::Minus) {
        out.iter_mut().for_each(|c| *c = -c.clone());
    }
    ZPoly::new(out)
}

impl<R: Ring> Add for &Poly<R> {
    type Output = Poly<R>;
    fn add(self, rhs: Self) -> Poly<R> {
        self.add_ref(rhs)
    }
}

impl<R: Ring> Sub for &Poly<R> {
    type Output = Poly<R>;
    fn sub(self, rhs: Self) -> Poly<R> {
        self.sub_ref(rhs)
    }
}

impl<R: Ring> Mul for &Poly<R> {
    type Output = Poly<R>;
    fn mul(self, rhs: Self) -> Poly<R> {
        self.mul_ref(rhs)
    }
}

impl<R: Ring> Neg for &Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Poly<R> {
        self.neg_ref()
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Poly<R> {
    /// Renders highest degree first, e.g. `x^3 + 2*x^2 - 2*x - 4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero_elem() {
                continue;
            }
            let s = c.to_string();
            let (neg, body) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = body == "1";
            match (i, unit) {
                (0, _) => write!(f, "{body}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{body}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{body}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<R: fmt::Debug> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
