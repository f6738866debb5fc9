//! Extension fields `F_{p^k}`, `k <= 6`, in a deterministic polynomial basis.

use std::fmt;
use std::sync::Arc;

use super::fp::{is_prime, pow_mod};
use crate::error::{Error, Result};

pub const MAX_EXT_DEGREE: usize = 6;

/// Coefficient vector of an element, low degree first; entries past `k` are zero.
pub type Raw = [u64; MAX_EXT_DEGREE];

/// `F_{p^k} = F_p[x] / (m(x))` with `m` the first monic irreducible of degree `k`
/// in the scan order used by [`field_tower`].
#[derive(Clone, PartialEq, Eq)]
pub struct GfContext {
    p: u64,
    k: usize,
    /// Monic modulus, `k + 1` coefficients, low degree first.
    modulus: Vec<u64>,
    /// `x^(k + j) mod m` for `j = 0..k-1`.
    high_powers: Vec<Raw>,
    /// Images of `x^i` under Frobenius `a -> a^p`.
    frobenius: Vec<Raw>,
    wide: bool,
}

/// Build `F_{p^k}`.
///
/// The modulus is found by scanning monic degree-`k` polynomials with the
/// coefficient vector read as a base-`p` number (constant term least
/// significant), and certifying irreducibility by exhaustive search for
/// monic factors of degree `1..=k/2`.
pub fn field_tower(p: u64, k: usize) -> Result<Arc<GfContext>> {
    if p == 2 || !is_prime(p) || p >= 1 << 32 {
        return Err(Error::NotOddPrime(p));
    }
    if !(1..=MAX_EXT_DEGREE).contains(&k) {
        return Err(Error::DegreeOutOfRange(k));
    }
    let total = (p as u128).pow(k as u32);
    let modulus = (0..total)
        .map(|n| {
            let mut c = digits(n, p, k);
            c.push(1);
            c
        })
        .find(|m| is_irreducible_exhaustive(m, p))
        .expect("irreducible polynomials exist in every degree");
    Ok(Arc::new(GfContext::with_modulus(p, modulus)))
}

fn digits(mut n: u128, p: u64, k: usize) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = (n % p as u128) as u64;
            n /= p as u128;
            d
        })
        .collect()
}

/// Remainder of `a` modulo monic `m` over `F_p`; inputs low degree first.
fn rem_monic(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let top = r.pop().unwrap() % p;
        if top != 0 {
            let base = r.len() - dm;
            for (i, &mi) in m[..dm].iter().enumerate() {
                r[base + i] = (r[base + i] + (p - mi) * top % p) % p;
            }
        }
    }
    r
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=deg/2`.
pub fn is_irreducible_exhaustive(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    // roots first: cheapest rejection
    for r in 0..p {
        let v = m.iter().rev().fold(0u64, |acc, &c| (acc * r + c) % p);
        if v == 0 {
            return false;
        }
    }
    for j in 2..=deg / 2 {
        for n in 0..(p as u128).pow(j as u32) {
            let mut f = digits(n, p, j);
            f.push(1);
            if rem_monic(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl GfContext {
    fn with_modulus(p: u64, modulus: Vec<u64>) -> Self {
        let k = modulus.len() - 1;
        let wide = (p as u128) * (p as u128) * (2 * MAX_EXT_DEGREE as u128) >= 1u128 << 63;
        let mut ctx = Self {
            p,
            k,
            modulus: modulus.clone(),
            high_powers: Vec::new(),
            frobenius: Vec::new(),
            wide,
        };
        ctx.high_powers = (0..k.saturating_sub(1))
            .map(|j| {
                let mut mono = vec![0u64; k + j + 1];
                mono[k + j] = 1;
                ctx.raw_from_slice(&rem_monic(&mono, &modulus, p))
            })
            .collect();
        let x = ctx.raw_from_slice(&[0, 1]);
        let xp = ctx.pow_raw(&x, p);
        let mut col = ctx.one_raw();
        ctx.frobenius = (0..k)
            .map(|_| {
                let c = col;
                col = ctx.mul_raw(&col, &xp);
                c
            })
            .collect();
        ctx
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.k as u32)
    }

    /// Monic modulus coefficients, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn raw_from_slice(&self, c: &[u64]) -> Raw {
        let reduced = if c.len() > self.k { rem_monic(c, &self.modulus, self.p) } else { c.to_vec() };
        let mut r = [0u64; MAX_EXT_DEGREE];
        for (slot, v) in r.iter_mut().zip(reduced) {
            *slot = v % self.p;
        }
        r
    }

    pub fn one_raw(&self) -> Raw {
        let mut r = [0u64; MAX_EXT_DEGREE];
        r[0] = 1;
        r
    }

    /// Element with base-`p` digits of `index` as coefficients.
    pub fn raw_from_index(&self, index: u128) -> Raw {
        self.raw_from_slice(&digits(index, self.p, self.k))
    }

    /// Advance to the element with the next index; wraps to zero.
    #[inline]
    pub fn increment_raw(&self, a: &mut Raw) {
        for c in a.iter_mut().take(self.k) {
            *c += 1;
            if *c < self.p {
                return;
            }
            *c = 0;
        }
    }

    #[inline]
    pub fn add_raw(&self, a: &Raw, b: &Raw) -> Raw {
        let mut r = [0u64; MAX_EXT_DEGREE];
        for i in 0..self.k {
            let s = a[i] + b[i];
            r[i] = if s >= self.p { s - self.p } else { s };
        }
        r
    }

    #[inline]
    pub fn add_scalar_raw(&self, a: &Raw, c: u64) -> Raw {
        let mut r = *a;
        r[0] = (r[0] + c) % self.p;
        r
    }

    #[inline]
    pub fn mul_raw(&self, a: &Raw, b: &Raw) -> Raw {
        let (p, k) = (self.p, self.k);
        if k == 1 {
            let mut r = [0u64; MAX_EXT_DEGREE];
            r[0] = ((a[0] as u128 * b[0] as u128) % p as u128) as u64;
            return r;
        }
        if self.wide {
            return self.mul_raw_wide(a, b);
        }
        let mut t = [0u64; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..k {
                t[i + j] += a[i] * b[j];
            }
        }
        let mut r = [0u64; MAX_EXT_DEGREE];
        r[..k].copy_from_slice(&t[..k]);
        for (j, hp) in self.high_powers.iter().enumerate() {
            let c = t[k + j] % p;
            if c != 0 {
                for i in 0..k {
                    r[i] += c * hp[i];
                }
            }
        }
        for v in r.iter_mut().take(k) {
            *v %= p;
        }
        r
    }

    fn mul_raw_wide(&self, a: &Raw, b: &Raw) -> Raw {
        let (p, k) = (self.p as u128, self.k);
        let mut t = [0u128; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..k {
            for j in 0..k {
                t[i + j] = (t[i + j] + a[i] as u128 * b[j] as u128) % p;
            }
        }
        let mut r = [0u128; MAX_EXT_DEGREE];
        r[..k].copy_from_slice(&t[..k]);
        for (j, hp) in self.high_powers.iter().enumerate() {
            for i in 0..k {
                r[i] = (r[i] + t[k + j] * hp[i] as u128) % p;
            }
        }
        let mut out = [0u64; MAX_EXT_DEGREE];
        for i in 0..k {
            out[i] = r[i] as u64;
        }
        out
    }

    pub fn pow_raw(&self, a: &Raw, mut e: u64) -> Raw {
        let mut base = *a;
        let mut acc = self.one_raw();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_raw(&base, &base);
            }
        }
        acc
    }

    /// `a^p`, applied as the precomputed linear map.
    #[inline]
    pub fn frobenius_raw(&self, a: &Raw) -> Raw {
        let (p, k) = (self.p, self.k);
        let mut r = [0u128; MAX_EXT_DEGREE];
        for (i, col) in self.frobenius.iter().enumerate() {
            if a[i] == 0 {
                continue;
            }
            for j in 0..k {
                r[j] += a[i] as u128 * col[j] as u128;
            }
        }
        let mut out = [0u64; MAX_EXT_DEGREE];
        for j in 0..k {
            out[j] = (r[j] % p as u128) as u64;
        }
        out
    }

    /// Norm down to `F_p`: the product of all Frobenius conjugates.
    #[inline]
    pub fn norm_raw(&self, a: &Raw) -> u64 {
        let mut conj = *a;
        let mut acc = *a;
        for _ in 1..self.k {
            conj = self.frobenius_raw(&conj);
            acc = self.mul_raw(&acc, &conj);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0));
        acc[0]
    }

    pub fn element(self: &Arc<Self>, coeffs: &[u64]) -> GfElement {
        GfElement { ctx: Arc::clone(self), c: self.raw_from_slice(coeffs) }
    }
}

impl fmt::Debug for GfContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.k, self.modulus)
    }
}

/// An element of `F_{p^k}` bound to its context.
#[derive(Clone)]
pub struct GfElement {
    ctx: Arc<GfContext>,
    c: Raw,
}

impl GfElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.c[..self.ctx.k]
    }

    pub fn context(&self) -> &Arc<GfContext> {
        &self.ctx
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self { ctx: Arc::clone(&self.ctx), c: self.ctx.mul_raw(&self.c, &o.c) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { ctx: Arc::clone(&self.ctx), c: self.ctx.add_raw(&self.c, &o.c) }
    }

    pub fn pow(&self, e: u64) -> Self {
        Self { ctx: Arc::clone(&self.ctx), c: self.ctx.pow_raw(&self.c, e) }
    }

    pub fn frobenius(&self) -> Self {
        Self { ctx: Arc::clone(&self.ctx), c: self.ctx.frobenius_raw(&self.c) }
    }

    pub fn norm(&self) -> u64 {
        self.ctx.norm_raw(&self.c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }
}

impl PartialEq for GfElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx && self.c == other.c
    }
}

impl fmt::Debug for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs())
    }
}

/// Legendre symbol table for `F_p`: entry `v` is `0`, `1` or `-1`.
pub fn legendre_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..=(p / 2) {
        t[(x * x % p) as usize] = 1;
    }
    t
}

/// Legendre symbol by Euler's criterion.
pub fn legendre(a: u64, p: u64) -> i8 {
    match pow_mod(a % p, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: first monic in scan order that is not a product
    /// of two lower-degree monics (all such products enumerated).
    fn scan_oracle(p: u64, k: usize) -> Vec<u64> {
        let monics = |d: usize| -> Vec<Vec<u64>> {
            (0..(p as u128).pow(d as u32))
                .map(|n| {
                    let mut c = digits(n, p, d);
                    c.push(1);
                    c
                })
                .collect()
        };
        let mul = |a: &[u64], b: &[u64]| {
            let mut r = vec![0u64; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    r[i + j] = (r[i + j] + x * y) % p;
                }
            }
            r
        };
        let mut reducible = std::collections::HashSet::new();
        for d in 1..=k / 2 {
            for a in monics(d) {
                for b in monics(k - d) {
                    reducible.insert(mul(&a, &b));
                }
            }
        }
        monics(k).into_iter().find(|m| !reducible.contains(m)).unwrap()
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(field_tower(3, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(field_tower(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(field_tower(5, 2).unwrap().modulus(), &[2, 0, 1]);
    }

    #[test]
    fn modulus_matches_product_oracle() {
        for (p, k) in [(3, 2), (5, 2), (3, 3), (7, 3), (3, 4), (5, 4), (3, 5), (3, 6)] {
            assert_eq!(field_tower(p, k).unwrap().modulus(), scan_oracle(p, k).as_slice(), "p={p} k={k}");
        }
    }

    #[test]
    fn tower_rejects_bad_input() {
        assert_eq!(field_tower(2, 1).unwrap_err(), Error::NotOddPrime(2));
        assert_eq!(field_tower(9, 1).unwrap_err(), Error::NotOddPrime(9));
        assert_eq!(field_tower(3, 7).unwrap_err(), Error::DegreeOutOfRange(7));
        assert_eq!(field_tower(3, 0).unwrap_err(), Error::DegreeOutOfRange(0));
    }

    #[test]
    fn multiplicative_group_order() {
        let ctx = field_tower(5, 3).unwrap();
        let q = ctx.order() as u64;
        let mut a = ctx.raw_from_index(1);
        for _ in 1..q {
            assert_eq!(ctx.pow_raw(&a, q - 1), ctx.one_raw());
            ctx.increment_raw(&mut a);
        }
    }

    #[test]
    fn norm_is_multiplicative_and_lands_in_base() {
        let ctx = field_tower(7, 3).unwrap();
        let a = ctx.element(&[3, 1, 4]);
        let b = ctx.element(&[2, 6, 5]);
        assert_eq!(a.mul(&b).norm(), a.norm() * b.norm() % 7);
        let q = ctx.order() as u64;
        // N(a) = a^((q - 1)/(p - 1))
        assert_eq!(a.pow((q - 1) / 6).coeffs(), &[a.norm(), 0, 0]);
    }

    #[test]
    fn legendre_agrees_with_euler() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let t = legendre_table(p);
            for a in 0..p {
                assert_eq!(t[a as usize], legendre(a, p));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn frobenius_has_order_k(
            (p, k) in prop::sample::select(vec![(3u64, 2usize), (3, 4), (5, 3), (7, 2), (11, 3), (3, 6), (13, 4)]),
            seed in prop::collection::vec(0u64..1000, 6)
        ) {
            let ctx = field_tower(p, k).unwrap();
            let a = ctx.element(&seed[..k]);
            let mut b = a.clone();
            for _ in 0..k {
                b = b.frobenius();
            }
            prop_assert_eq!(&b, &a);
            prop_assert_eq!(a.frobenius(), a.pow(p));
        }
    }
}
