//! Laurent polynomials `sum c_k x^k`, `k` ranging over a window of integers.

use std::fmt;

use super::poly::Poly;
use super::ring::Ring;

/// Dense Laurent polynomial: `coeffs[i]` is the coefficient of `x^(low + i)`.
///
/// Normalized so both boundary coefficients are nonzero; the zero
/// polynomial has no coefficients and `low == 0`.
#[derive(Clone, PartialEq)]
pub struct Laurent<R> {
    low: i64,
    coeffs: Vec<R>,
}

impl<R: Ring> Laurent<R> {
    pub fn new(low: i64, coeffs: Vec<R>) -> Self {
        let mut l = Self { low, coeffs };
        l.normalize();
        l
    }

    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    /// `c * x^k`
    pub fn monomial(c: R, k: i64) -> Self {
        Self::new(k, vec![c])
    }

    pub fn from_poly(p: &Poly<R>) -> Self {
        Self::new(0, p.coeffs().to_vec())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero_elem()) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero_elem()).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.low += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_degree(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn max_degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, k: i64) -> Option<&R> {
        let idx = k.checked_sub(self.low)?;
        usize::try_from(idx).ok().and_then(|i| self.coeffs.get(i))
    }

    /// `(exponent, coefficient)` pairs for nonzero terms, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &R)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero_elem())
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    /// The single term if this is a monomial.
    pub fn as_monomial(&self) -> Option<(i64, &R)> {
        (self.coeffs.len() == 1).then(|| (self.low, &self.coeffs[0]))
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.max_degree().unwrap().max(other.max_degree().unwrap());
        let zero = self.coeffs[0].zero_like();
        let coeffs = (low..=high)
            .map(|k| match (self.coeff(k), other.coeff(k)) {
                (Some(a), Some(b)) => a.plus(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => zero.clone(),
            })
            .collect();
        Self::new(low, coeffs)
    }

    pub fn neg_ref(&self) -> Self {
        Self {
            low: self.low,
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
                if !b.is_zero_elem() {
                    out[i + j] = out[i + j].plus(&a.times(b));
                }
            }
        }
        Self::new(self.low + other.low, out)
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    /// Non-negative powers; `one` supplies the ring context for `e = 0`.
    pub fn pow(&self, e: u32, one: &R) -> Self {
        let mut acc = Self::monomial(one.clone(), 0);
        for _ in 0..e {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Integer powers of a monomial; `None` when a negative power of a
    /// non-monomial (or non-invertible monomial) is requested.
    pub fn pow_i(&self, e: i64, one: &R) -> Option<Self> {
        if e >= 0 {
            return Some(self.pow(e as u32, one));
        }
        let (k, c) = self.as_monomial()?;
        let inv = c.inverse()?;
        Some(Self::monomial(inv, -k).pow((-e) as u32, one))
    }

    /// Formal derivative `d/dx`.
    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.times(&c.from_i64_like(self.low + i as i64)))
            .collect();
        Self::new(self.low - 1, coeffs)
    }

    /// Substitute `x -> inner` where `inner` is an invertible monomial,
    /// so negative powers stay Laurent.
    pub fn substitute_monomial(&self, inner: &Self) -> Option<Self> {
        let (_, c) = inner.as_monomial()?;
        let one = c.one_like();
        let mut acc = Self::zero();
        for (k, coeff) in self.terms() {
            acc = acc.add_ref(&inner.pow_i(k, &one)?.scale(coeff));
        }
        Some(acc)
    }

    /// Evaluate a polynomial at this Laurent polynomial.
    pub fn eval_poly(p: &Poly<R>, at: &Self) -> Self {
        let mut acc = Self::zero();
        for c in p.coeffs().iter().rev() {
            acc = acc.mul_ref(at).add_ref(&Self::monomial(c.clone(), 0));
        }
        acc
    }

    /// Coefficient of `x^k` equals coefficient of `x^-k` for every `k`.
    pub fn is_symmetric(&self) -> bool {
        self.terms().all(|(k, c)| self.coeff(-k) == Some(c))
    }

    /// The ordinary polynomial, if no negative exponents occur.
    pub fn to_poly(&self) -> Option<Poly<R>> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if self.low < 0 {
            return None;
        }
        let zero = self.coeffs[0].zero_like();
        let mut c = vec![zero; self.low as usize];
        c.extend(self.coeffs.iter().cloned());
        Some(Poly::new(c))
    }
}

/// `f(x + 1/x)` expanded as a Laurent polynomial.
pub fn laurent_compose<R: Ring>(f: &Poly<R>) -> Laurent<R> {
    let Some(c) = f.coeffs().first() else {
        return Laurent::zero();
    };
    let one = c.one_like();
    let x_plus_inv = Laurent::new(-1, vec![one.clone(), one.zero_like(), one]);
    Laurent::eval_poly(f, &x_plus_inv)
}

impl<R: Ring + fmt::Debug> fmt::Debug for Laurent<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::ZPoly;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn l(low: i64, c: &[i64]) -> Laurent<BigInt> {
        Laurent::new(low, c.iter().map(|&v| BigInt::from(v)).collect())
    }

    #[test]
    fn compose_examples() {
        assert_eq!(laurent_compose(&ZPoly::from_i64s(&[0, 0, 1])), l(-2, &[1, 0, 2, 0, 1]));
        assert_eq!(laurent_compose(&ZPoly::from_i64s(&[-2, 0, 1])), l(-2, &[1, 0, 0, 0, 1]));
        assert_eq!(laurent_compose(&ZPoly::x()), l(-1, &[1, 0, 1]));
        assert!(laurent_compose(&ZPoly::from_i64s(&[1, 3, 0, 2])).is_symmetric());
    }

    #[test]
    fn normalization_is_canonical() {
        assert_eq!(l(-3, &[0, 0, 5, 0]), l(-1, &[5]));
        assert_eq!(l(4, &[0, 0]), Laurent::zero());
        assert_eq!(l(-2, &[1, 0, 3]).min_degree(), Some(-2));
        assert_eq!(l(-2, &[1, 0, 3]).max_degree(), Some(0));
    }

    #[test]
    fn monomial_substitution_and_derivative() {
        // f = 3/x + x^2 under x -> 1/x; 2/x is not invertible over Z
        let f = l(-1, &[3, 0, 0, 1]);
        let inv_x = l(-1, &[1]);
        assert_eq!(f.substitute_monomial(&inv_x).unwrap(), l(-2, &[1, 0, 0, 3]));
        assert!(f.substitute_monomial(&l(-1, &[2])).is_none());
        assert_eq!(f.derivative(), l(-2, &[-3, 0, 0, 2]));
    }

    fn small() -> impl Strategy<Value = ZPoly> {
        prop::collection::vec(-9i64..9, 0..7).prop_map(|c| ZPoly::from_i64s(&c))
    }

    proptest! {
        #[test]
        fn compose_is_a_ring_homomorphism(f in small(), g in small()) {
            let lhs = laurent_compose(&(&f * &g));
            let rhs = laurent_compose(&f).mul_ref(&laurent_compose(&g));
            prop_assert_eq!(lhs, rhs);
            let lhs = laurent_compose(&(&f + &g));
            prop_assert_eq!(lhs, laurent_compose(&f).add_ref(&laurent_compose(&g)));
        }
    }
}
