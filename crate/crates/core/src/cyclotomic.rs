//! Exact arithmetic in `Q(zeta_n)` in the power basis modulo `Phi_n`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Poly, QPoly, Ring, ZPoly};
use crate::error::{Error, Result};
use crate::residue::{unit_group, Subgroup};

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// `Phi_n`, by exact division of `x^n - 1` by `Phi_d` for the proper divisors `d`.
pub fn cyclotomic_polynomial(n: u64) -> ZPoly {
    static CACHE: OnceLock<Mutex<HashMap<u64, ZPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    assert!(n >= 1);
    let mut acc = {
        let mut c = vec![BigInt::zero(); n as usize + 1];
        c[0] = BigInt::from(-1);
        c[n as usize] = BigInt::one();
        ZPoly::new(c)
    };
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        acc = acc
            .exact_div(&cyclotomic_polynomial(d))
            .expect("Phi_d divides x^n - 1 for d | n");
    }
    cache.lock().unwrap().insert(n, acc.clone());
    acc
}

/// Arithmetic data for `Q(zeta_n)`.
pub struct CyclotomicContext {
    n: u64,
    phi_n: ZPoly,
    dim: usize,
    /// Nonzero `(j, c_j)` of `Phi_n` below the leading term.
    phi_terms: Vec<(usize, BigInt)>,
    /// `zeta^k` in the power basis for `k = 0..n`.
    powers: Vec<Vec<BigInt>>,
}

impl CyclotomicContext {
    /// Shared context for conductor `n`.
    pub fn get(n: u64) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CyclotomicContext>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(c) = cache.lock().unwrap().get(&n) {
            return Arc::clone(c);
        }
        let ctx = Arc::new(Self::build(n));
        cache.lock().unwrap().entry(n).or_insert(ctx).clone()
    }

    fn build(n: u64) -> Self {
        let phi_n = cyclotomic_polynomial(n);
        let dim = phi_n.degree().unwrap();
        let phi_terms = phi_n.coeffs()[..dim]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j, c.clone()))
            .collect();
        let mut ctx = Self { n, phi_n, dim, phi_terms, powers: Vec::new() };
        let mut cur = vec![BigInt::zero(); dim];
        cur[0] = BigInt::one();
        let mut powers = Vec::with_capacity(n as usize);
        for _ in 0..n {
            powers.push(cur.clone());
            let mut next = vec![BigInt::zero(); dim + 1];
            next[1..].clone_from_slice(&cur);
            cur = ctx.reduce(next);
        }
        ctx.powers = powers;
        ctx
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn phi_n(&self) -> &ZPoly {
        &self.phi_n
    }

    /// Field degree `phi(n)`.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Reduce an integer coefficient vector of any length modulo `Phi_n`.
    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        let dim = self.dim;
        for i in (dim..v.len()).rev() {
            if v[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut v[i]);
            for (j, pj) in &self.phi_terms {
                v[i - dim + j] -= &c * pj;
            }
        }
        v.resize(dim, BigInt::zero());
        v
    }
}

impl fmt::Debug for CyclotomicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.n)
    }
}

/// `num / den` with `num` a power-basis coefficient vector.
///
/// Normalized: `den > 0` and `gcd(den, num...) = 1`.
#[derive(Clone)]
pub struct CyclotomicElement {
    ctx: Arc<CyclotomicContext>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CyclotomicElement {
    fn from_parts(ctx: &Arc<CyclotomicContext>, num: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(num.len(), ctx.dim);
        let mut e = Self { ctx: Arc::clone(ctx), num, den };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            self.num.iter_mut().for_each(|c| *c = -std::mem::take(c));
        }
        if self.den.is_one() {
            return;
        }
        let g = self.num.iter().fold(self.den.clone(), |g, c| if c.is_zero() { g } else { g.gcd(c) });
        if !g.is_one() {
            self.den /= &g;
            self.num.iter_mut().for_each(|c| *c /= &g);
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
        }
    }

    pub fn zero(ctx: &Arc<CyclotomicContext>) -> Self {
        Self { ctx: Arc::clone(ctx), num: vec![BigInt::zero(); ctx.dim], den: BigInt::one() }
    }

    pub fn from_rational(ctx: &Arc<CyclotomicContext>, q: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); ctx.dim];
        num[0] = q.numer().clone();
        Self::from_parts(ctx, num, q.denom().clone())
    }

    pub fn from_i64(ctx: &Arc<CyclotomicContext>, v: i64) -> Self {
        let mut num = vec![BigInt::zero(); ctx.dim];
        num[0] = BigInt::from(v);
        Self { ctx: Arc::clone(ctx), num, den: BigInt::one() }
    }

    /// `zeta_n^k` for any integer `k`.
    pub fn zeta_power(ctx: &Arc<CyclotomicContext>, k: i64) -> Self {
        let idx = k.rem_euclid(ctx.n as i64) as usize;
        Self { ctx: Arc::clone(ctx), num: ctx.powers[idx].clone(), den: BigInt::one() }
    }

    /// From power-basis coordinates (length at most `phi(n)`; longer input is reduced).
    pub fn from_coeffs(ctx: &Arc<CyclotomicContext>, coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let num: Vec<BigInt> = coeffs.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
        let mut padded = num;
        if padded.len() < ctx.dim {
            padded.resize(ctx.dim, BigInt::zero());
        }
        let reduced = ctx.reduce(padded);
        Self::from_parts(ctx, reduced, den)
    }

    pub fn context(&self) -> &Arc<CyclotomicContext> {
        &self.ctx
    }

    /// Power-basis coordinates.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    /// The rational value, when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.num[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx.n == other.ctx.n {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn add_impl(&self, other: &Self, sign: i8) -> Self {
        let combine = |a: &BigInt, b: &BigInt| if sign > 0 { a + b } else { a - b };
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| combine(a, b)).collect();
            return Self::from_parts(&self.ctx, num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| combine(&(a * &other.den), &(b * &self.den)))
            .collect();
        Self::from_parts(&self.ctx, num, &self.den * &other.den)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(self.add_impl(other, 1))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        Ok(self.mul_impl(other))
    }

    fn scale_int(&self, c: &BigInt, den: &BigInt) -> Self {
        let num = self.num.iter().map(|a| a * c).collect();
        Self::from_parts(&self.ctx, num, &self.den * den)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if let Some(q) = other.as_rational() {
            return self.scale_int(q.numer(), q.denom());
        }
        if let Some(q) = self.as_rational() {
            return other.scale_int(q.numer(), q.denom());
        }
        let dim = self.ctx.dim;
        let mut prod = vec![BigInt::zero(); 2 * dim - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let num = self.ctx.reduce(prod);
        Self::from_parts(&self.ctx, num, &self.den * &other.den)
    }

    /// Inverse via the extended Euclidean algorithm against `Phi_n`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(&self.ctx, &q.recip()));
        }
        let a: QPoly = Poly::new(self.coeffs());
        let m = self.ctx.phi_n.to_rational();
        let (g, s) = ext_gcd_left(&a, &m)?;
        // g is a nonzero constant because Phi_n is irreducible
        let g0 = g.coeff(0).cloned().ok_or(Error::DivisionByZero)?;
        let s = s.scale(&g0.recip());
        Ok(Self::from_coeffs(&self.ctx, s.coeffs()))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_i64(&self.ctx, 1);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        acc
    }

    /// `sigma_a`: substitute `zeta -> zeta^a` and reduce.
    pub fn galois_apply(&self, a: u64) -> Result<Self> {
        let n = self.ctx.n;
        if n > 1 && a.gcd(&n) != 1 {
            return Err(Error::NotAUnit { a, n });
        }
        let mut spread = vec![BigInt::zero(); n.max(1) as usize];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                spread[(a as u128 * i as u128 % n as u128) as usize] += c;
            }
        }
        if spread.len() < self.ctx.dim {
            spread.resize(self.ctx.dim, BigInt::zero());
        }
        let num = self.ctx.reduce(spread);
        Ok(Self::from_parts(&self.ctx, num, self.den.clone()))
    }
}

/// Returns `(g, s)` with `s * a = g (mod m)`, `g = gcd(a, m)` up to a unit.
fn ext_gcd_left(a: &QPoly, m: &QPoly) -> Result<(QPoly, QPoly)> {
    let (mut r0, mut r1) = (m.clone(), a.clone());
    let (mut s0, mut s1) = (QPoly::zero(), QPoly::from_i64s(&[1]));
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1)?;
        let s = &s0 - &(&q * &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    Ok((r0, s0))
}

impl PartialEq for CyclotomicElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.n == other.ctx.n && self.den == other.den && self.num == other.num
    }
}

impl Eq for CyclotomicElement {}

impl Hash for CyclotomicElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.n.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl Ring for CyclotomicElement {
    fn zero_like(&self) -> Self {
        Self::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        Self::from_i64(&self.ctx, 1)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Self::from_i64(&self.ctx, v)
    }
    fn is_zero_elem(&self) -> bool {
        CyclotomicElement::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.ctx.n, other.ctx.n, "cyclotomic context mismatch");
        self.add_impl(other, 1)
    }
    fn minus(&self, other: &Self) -> Self {
        assert_eq!(self.ctx.n, other.ctx.n, "cyclotomic context mismatch");
        self.add_impl(other, -1)
    }
    fn times(&self, other: &Self) -> Self {
        assert_eq!(self.ctx.n, other.ctx.n, "cyclotomic context mismatch");
        self.mul_impl(other)
    }
    fn negated(&self) -> Self {
        Self {
            ctx: Arc::clone(&self.ctx),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn same_ring(&self, other: &Self) -> bool {
        self.ctx.n == other.ctx.n
    }
}

impl fmt::Display for CyclotomicElement {
    /// Linear combination of powers of `ζ` (the conductor is implicit), e.g. `ζ - ζ^7`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = BigRational::new(c.clone(), self.den.clone());
            let neg = q.is_negative();
            let mag = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mag_s = if mag.is_integer() { mag.to_integer().to_string() } else { format!("({mag})") };
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag_s}")?,
                (1, true) => write!(f, "ζ")?,
                (1, false) => write!(f, "{mag_s}ζ")?,
                (_, true) => write!(f, "ζ^{k}")?,
                (_, false) => write!(f, "{mag_s}ζ^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self, self.ctx.n)
    }
}

/// `zeta_n - zeta_n^-1`.
pub fn eta(n: u64) -> CyclotomicElement {
    let ctx = CyclotomicContext::get(n);
    CyclotomicElement::zeta_power(&ctx, 1).minus(&CyclotomicElement::zeta_power(&ctx, -1))
}

/// Units `a` with `sigma_a(x) = x`.
pub fn stabilizer(x: &CyclotomicElement) -> Vec<u64> {
    let n = x.ctx.n;
    unit_group(n)
        .elements()
        .iter()
        .copied()
        .filter(|&a| x.galois_apply(a).map(|y| &y == x).unwrap_or(false))
        .collect()
}

/// Minimal polynomial over `Q` as the product of `t - y` over the distinct
/// Galois conjugates `y` of `x`.
pub fn minimal_polynomial(x: &CyclotomicElement) -> QPoly {
    let ctx = &x.ctx;
    let mut seen: HashSet<CyclotomicElement> = HashSet::new();
    let mut conjugates = Vec::new();
    for &a in unit_group(ctx.n).elements() {
        let y = x.galois_apply(a).expect("unit");
        if seen.insert(y.clone()) {
            conjugates.push(y);
        }
    }
    let one = CyclotomicElement::from_i64(ctx, 1);
    let mut acc: Poly<CyclotomicElement> = Poly::constant(one.clone());
    for y in conjugates {
        acc = acc.mul_ref(&Poly::new(vec![y.negated(), one.clone()]));
    }
    let coeffs = acc
        .coeffs()
        .iter()
        .map(|c| c.as_rational().expect("orbit product is fixed by the Galois group"))
        .collect();
    QPoly::new(coeffs)
}

/// Evaluate a rational polynomial at a cyclotomic element.
pub fn eval_at(p: &QPoly, x: &CyclotomicElement) -> CyclotomicElement {
    let mut acc = CyclotomicElement::zero(&x.ctx);
    for c in p.coeffs().iter().rev() {
        acc = acc.times(x).plus(&CyclotomicElement::from_rational(&x.ctx, c));
    }
    acc
}

/// `deg minpoly(eta(n)) = phi(n) / |kd_kernel(n)|`.
pub fn kd_degree_check(n: u64) -> bool {
    let deg = minimal_polynomial(&eta(n)).degree().unwrap_or(0);
    let kernel: Subgroup = crate::residue::kd_kernel(n);
    deg * kernel.order() == CyclotomicContext::get(n).dimension()
}
