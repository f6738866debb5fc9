//! Prime fields `F_p` for `p < 2^32`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::poly::{Poly, ZPoly};
use super::ring::Ring;

/// Residue in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl Fp {
    pub fn new(value: u64, p: u64) -> Self {
        debug_assert!((2..(1 << 32)).contains(&p));
        Self { value: value % p, p }
    }

    pub fn from_bigint(v: &BigInt, p: u64) -> Self {
        let r = v.mod_floor(&BigInt::from(p));
        Self { value: r.to_u64().expect("residue fits"), p }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn pow(&self, e: u64) -> Self {
        Self { value: pow_mod(self.value, e, self.p), p: self.p }
    }
}

pub fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

/// Deterministic primality by trial division; inputs here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Odd primes in `[lo, hi]`.
pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| is_prime(n)).collect()
}

impl Ring for Fp {
    fn zero_like(&self) -> Self {
        Self { value: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Self { value: 1, p: self.p }
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Self { value: v.rem_euclid(self.p as i64) as u64, p: self.p }
    }
    fn is_zero_elem(&self) -> bool {
        self.value == 0
    }
    fn plus(&self, o: &Self) -> Self {
        Self { value: (self.value + o.value) % self.p, p: self.p }
    }
    fn minus(&self, o: &Self) -> Self {
        Self { value: (self.value + self.p - o.value) % self.p, p: self.p }
    }
    fn times(&self, o: &Self) -> Self {
        Self { value: self.value * o.value % self.p, p: self.p }
    }
    fn negated(&self) -> Self {
        Self { value: (self.p - self.value) % self.p, p: self.p }
    }
    fn inverse(&self) -> Option<Self> {
        (self.value != 0).then(|| self.pow(self.p - 2))
    }
    fn same_ring(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Reduce an integer polynomial modulo `p`.
pub fn reduce_poly(f: &ZPoly, p: u64) -> Poly<Fp> {
    f.map(|c| Fp::from_bigint(c, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for a in 1..7 {
            let x = Fp::new(a, 7);
            assert_eq!(x.times(&x.inverse().unwrap()), x.one_like());
        }
        assert!(Fp::new(0, 7).inverse().is_none());
        assert_eq!(Fp::new(3, 7).negated().value(), 4);
        assert_eq!(Fp::new(0, 7).from_i64_like(-1).value(), 6);
    }

    #[test]
    fn primes() {
        assert_eq!(odd_primes(1, 30), vec![3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime(1) && is_prime(2) && !is_prime(9));
    }
}
