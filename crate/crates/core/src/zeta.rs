//! Point counts over `F_{p^k}` and L-polynomials.
//!
//! Convention: `L(T) = prod (1 - alpha_i T) = sum b_i T^i`, with power sums
//! `s_k = sum alpha_i^k = q^k + 1 - N_k`.

use std::fmt;

use nalgebra::{DMatrix, Schur};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::fp::reduce_poly;
use crate::algebra::gf::{field_tower, legendre, legendre_table, GfContext, Raw};
use crate::algebra::{is_prime, odd_primes, squarefree, Fp, Poly, QPoly, Ring, ZPoly};
use crate::curves::{make_cd, make_dm, HyperellipticCurve};
use crate::error::{Error, Result};

/// Default bound on the number of field elements enumerated per count.
pub const DEFAULT_CAP: u64 = 10_000_000;
/// Tolerance on `| |alpha| - sqrt(q) |`.
pub const ROOT_TOLERANCE: f64 = 1e-6;

const CHUNK: u128 = 1 << 15;

/// `p` odd, `p` does not divide the leading coefficient, and `f mod p` is
/// squarefree.
pub fn good_reduction(curve: &HyperellipticCurve, p: u64) -> bool {
    if p == 2 || !is_prime(p) {
        return false;
    }
    let fp = reduce_poly(curve.f(), p);
    fp.degree() == curve.f().degree() && squarefree(&fp).unwrap_or(false)
}

fn check_good(curve: &HyperellipticCurve, p: u64) -> Result<()> {
    if good_reduction(curve, p) {
        return Ok(());
    }
    let reason = if p == 2 {
        "characteristic 2".to_string()
    } else if !is_prime(p) {
        format!("{p} is not prime")
    } else {
        format!("{} mod {p} is singular or drops degree", curve.name())
    };
    Err(Error::BadReduction { p, reason })
}

/// `N_k = #C(F_{p^k})` on the smooth projective model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCount {
    pub p: u64,
    pub k: usize,
    pub count: u64,
}

/// Nonzero terms of `f mod p`, highest degree first.
fn sparse_terms(f: &ZPoly, p: u64) -> Vec<(usize, u64)> {
    let fp = reduce_poly(f, p);
    let mut terms: Vec<(usize, u64)> = fp
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.value() != 0)
        .map(|(i, c)| (i, c.value()))
        .collect();
    terms.reverse();
    terms
}

/// `sum_{x in F_p} chi(f(x))`.
fn character_sum_prime(terms: &[(usize, u64)], p: u64) -> i64 {
    let table = legendre_table(p);
    let deg = terms[0].0;
    let mut dense = vec![0u64; deg + 1];
    for &(i, c) in terms {
        dense[i] = c;
    }
    let eval = |x: u64| dense.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p);
    let chunks = (p as u128).div_ceil(CHUNK) as u64;
    (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let lo = ch * CHUNK as u64;
            let hi = (lo + CHUNK as u64).min(p);
            (lo..hi).map(|x| table[eval(x) as usize] as i64).sum::<i64>()
        })
        .sum()
}

/// Horner over the sparse terms, multiplying by `x^gap` between terms.
#[inline]
fn eval_sparse(ctx: &GfContext, terms: &[(usize, u64)], x: &Raw, gap_powers: &mut [(usize, Raw)]) -> Raw {
    for (g, pw) in gap_powers.iter_mut() {
        *pw = ctx.pow_raw(x, *g as u64);
    }
    let lookup = |g: usize, gp: &[(usize, Raw)]| gp.iter().find(|(h, _)| *h == g).map(|(_, r)| *r).unwrap();
    let mut acc = ctx.raw_from_slice(&[terms[0].1]);
    let mut prev = terms[0].0;
    for &(deg, c) in &terms[1..] {
        acc = ctx.mul_raw(&acc, &lookup(prev - deg, gap_powers));
        acc = ctx.add_scalar_raw(&acc, c);
        prev = deg;
    }
    if prev > 0 {
        acc = ctx.mul_raw(&acc, &lookup(prev, gap_powers));
    }
    acc
}

/// `sum_{x in F_q} chi(f(x))` with `chi = legendre o norm`.
fn character_sum_extension(terms: &[(usize, u64)], ctx: &GfContext) -> i64 {
    let p = ctx.characteristic();
    let table = legendre_table(p);
    let mut gaps: Vec<usize> = terms.windows(2).map(|w| w[0].0 - w[1].0).collect();
    if let Some(&(last, _)) = terms.last() {
        if last > 0 {
            gaps.push(last);
        }
    }
    gaps.sort_unstable();
    gaps.dedup();
    let q = ctx.order();
    let chunks = q.div_ceil(CHUNK) as u64;
    (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let lo = ch as u128 * CHUNK;
            let hi = (lo + CHUNK).min(q);
            let mut x = ctx.raw_from_index(lo);
            let mut gap_powers: Vec<(usize, Raw)> = gaps.iter().map(|&g| (g, [0u64; 6])).collect();
            let mut sum = 0i64;
            for _ in lo..hi {
                let v = eval_sparse(ctx, terms, &x, &mut gap_powers);
                sum += table[ctx.norm_raw(&v) as usize] as i64;
                ctx.increment_raw(&mut x);
            }
            sum
        })
        .sum()
}

fn weil_ok(count: u64, q: u128, genus: usize) -> bool {
    let dev = count as i128 - q as i128 - 1;
    let bound = 4 * (genus as i128).pow(2) * q as i128;
    dev * dev <= bound
}

/// Count points over `F_{p^k}` by exhaustive enumeration, refusing fields
/// with more than `cap` elements.
pub fn count_points_capped(curve: &HyperellipticCurve, p: u64, k: usize, cap: u64) -> Result<PointCount> {
    check_good(curve, p)?;
    if !(1..=6).contains(&k) {
        return Err(Error::DegreeOutOfRange(k));
    }
    let q = (p as u128).pow(k as u32);
    if q > cap as u128 {
        return Err(Error::CapExceeded { size: q, cap });
    }
    let terms = sparse_terms(curve.f(), p);
    let chi_sum = if k == 1 {
        character_sum_prime(&terms, p)
    } else {
        character_sum_extension(&terms, &*field_tower(p, k)?)
    };
    let deg = terms[0].0;
    let lead = terms[0].1;
    let infinity: i64 = if deg % 2 == 1 {
        1
    } else {
        // chi_q(lead) = legendre(norm(lead)) = legendre(lead)^k
        1 + (legendre(lead, p) as i64).pow(k as u32)
    };
    let count = (q as i128 + chi_sum as i128 + infinity as i128) as u64;
    if !weil_ok(count, q, curve.genus()) {
        return Err(Error::WeilViolation { count, q: q as u64, genus: curve.genus() });
    }
    Ok(PointCount { p, k, count })
}

pub fn count_points(curve: &HyperellipticCurve, p: u64, k: usize) -> Result<PointCount> {
    count_points_capped(curve, p, k, DEFAULT_CAP)
}

/// `L(T) = sum b_i T^i` for a genus-`g` curve over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPolynomial {
    pub q: u64,
    pub genus: usize,
    #[serde(with = "big_list")]
    pub coeffs: Vec<BigInt>,
}

impl LPolynomial {
    /// Newton's identities on `s_k = q^k + 1 - N_k` for `k = 1..=g`, then
    /// the functional equation for the upper half.
    pub fn from_counts(q: u64, genus: usize, counts: &[u64]) -> Result<Self> {
        if counts.len() < genus {
            return Err(Error::CheckFailed(format!("need {genus} counts, got {}", counts.len())));
        }
        let qb = BigInt::from(q);
        let sums: Vec<BigInt> = (1..=genus)
            .map(|k| qb.pow(k as u32) + 1 - BigInt::from(counts[k - 1]))
            .collect();
        let mut b = vec![BigInt::one()];
        for k in 1..=genus {
            let acc: BigInt = (1..=k).map(|i| &sums[i - 1] * &b[k - i]).sum();
            let kb = BigInt::from(k);
            if !(&acc % &kb).is_zero() {
                return Err(Error::CheckFailed(format!("Newton step {k} is not integral over F_{q}")));
            }
            b.push(-(acc / kb));
        }
        for i in (0..genus).rev() {
            b.push(qb.pow((genus - i) as u32) * &b[i]);
        }
        Ok(Self { q, genus, coeffs: b })
    }

    pub fn trivial(q: u64) -> Self {
        Self { q, genus: 0, coeffs: vec![BigInt::one()] }
    }

    pub fn as_poly(&self) -> ZPoly {
        ZPoly::new(self.coeffs.clone())
    }

    /// Product of L-polynomials over the same field.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::RingMismatch);
        }
        let coeffs = (&self.as_poly() * &other.as_poly()).into_coeffs();
        Ok(Self { q: self.q, genus: self.genus + other.genus, coeffs })
    }

    /// `b_{2g-i} = q^{g-i} b_i` for `0 <= i <= g`, with `b_0 = 1`.
    pub fn satisfies_functional_equation(&self) -> bool {
        let g = self.genus;
        if self.coeffs.len() != 2 * g + 1 || !self.coeffs[0].is_one() {
            return false;
        }
        let q = BigInt::from(self.q);
        (0..=g).all(|i| self.coeffs[2 * g - i] == q.pow((g - i) as u32) * &self.coeffs[i])
    }

    /// `s_1..s_kmax` from the coefficients.
    pub fn power_sums(&self, kmax: usize) -> Vec<BigInt> {
        let b = |i: usize| self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
        let mut s: Vec<BigInt> = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let mut v = -BigInt::from(k) * b(k);
            for i in 1..k {
                v -= &s[i - 1] * b(k - i);
            }
            s.push(v);
        }
        s
    }

    /// `N_k = q^k + 1 - s_k` as implied by the coefficients.
    pub fn predicted_count(&self, k: usize) -> BigInt {
        BigInt::from(self.q).pow(k as u32) + 1 - &self.power_sums(k)[k - 1]
    }

    /// Reciprocal roots `alpha_i`, one per distinct root.
    pub fn reciprocal_roots(&self) -> Vec<Complex64> {
        if self.genus == 0 {
            return Vec::new();
        }
        let sqf = squarefree_part(&self.as_poly());
        let expected = sqf.degree().unwrap_or(0);
        let sq = (self.q as f64).sqrt();
        // roots of sqf(w / sqrt q) lie on the unit circle
        let scaled: Vec<f64> = sqf
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_f64().unwrap_or(f64::NAN) / sq.powi(i as i32))
            .collect();
        let roots: Vec<Complex64> = polynomial_roots(&scaled).into_iter().map(|w| sq / w).collect();
        if roots.len() == expected {
            roots
        } else {
            Vec::new()
        }
    }

    /// Largest `| |alpha| - sqrt(q) |` over the reciprocal roots.
    pub fn root_modulus_deviation(&self) -> f64 {
        let sq = (self.q as f64).sqrt();
        if self.genus > 0 && self.reciprocal_roots().is_empty() {
            return f64::INFINITY;
        }
        self.reciprocal_roots().iter().map(|a| (a.norm() - sq).abs()).fold(0.0, f64::max)
    }

    /// Exact functional equation and numeric root moduli within [`ROOT_TOLERANCE`].
    pub fn weil_invariants_hold(&self) -> bool {
        self.satisfies_functional_equation() && self.root_modulus_deviation() <= ROOT_TOLERANCE
    }
}

impl fmt::Display for LPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `f / gcd(f, f')` with integer coefficients.
fn squarefree_part(f: &ZPoly) -> ZPoly {
    let fq = f.to_rational();
    let g = fq.gcd(&fq.derivative()).expect("field coefficients");
    if g.degree().unwrap_or(0) == 0 {
        return f.clone();
    }
    let (q, _) = fq.divrem(&g).expect("nonzero gcd");
    crate::algebra::primitive_part(&q)
}

/// Complex roots of `sum c_i w^i` (leading coefficient nonzero): eigenvalues
/// of the companion matrix, polished by Newton steps.
fn polynomial_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -monic[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for &coef in monic.iter().rev() {
            dv = dv * z + v;
            v = v * z + coef;
        }
        (v, dv)
    };
    // shifted retries when the QR iteration stalls
    let eigen = [0.0, 0.3183, -0.5772, 0.7071]
        .iter()
        .find_map(|&shift| {
            let shifted = &companion + DMatrix::identity(n, n) * shift;
            Schur::try_new(shifted, f64::EPSILON, 20_000)
                .map(|s| s.complex_eigenvalues().iter().map(|z| z - shift).collect::<Vec<Complex64>>())
        })
        .unwrap_or_default();
    eigen
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..8 {
                let (v, dv) = eval(z);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = v / dv;
                z -= step;
                if step.norm() < 1e-15 * z.norm().max(1.0) {
                    break;
                }
            }
            z
        })
        .collect()
}

/// `L` for `N_1..N_g` counted directly.
pub fn l_polynomial_capped(curve: &HyperellipticCurve, p: u64, cap: u64) -> Result<(LPolynomial, Vec<u64>)> {
    check_good(curve, p)?;
    let g = curve.genus();
    if g == 0 {
        return Ok((LPolynomial::trivial(p), Vec::new()));
    }
    let q_g = (p as u128).pow(g as u32);
    if q_g > cap as u128 {
        return Err(Error::CapExceeded { size: q_g, cap });
    }
    let counts = (1..=g)
        .map(|k| count_points_capped(curve, p, k, cap).map(|c| c.count))
        .collect::<Result<Vec<_>>>()?;
    let l = LPolynomial::from_counts(p, g, &counts)?;
    if !l.satisfies_functional_equation() {
        return Err(Error::CheckFailed(format!("functional equation for {} at {p}", curve.name())));
    }
    Ok((l, counts))
}

pub fn l_polynomial(curve: &HyperellipticCurve, p: u64) -> Result<LPolynomial> {
    l_polynomial_capped(curve, p, DEFAULT_CAP).map(|(l, _)| l)
}

/// Direct counts over `F_{q^k}` for every `k` with `q^k <= cap`, compared
/// with the counts implied by `l`. Returns how many extension degrees agreed,
/// or an error naming the first disagreement.
pub fn extension_consistency(curve: &HyperellipticCurve, l: &LPolynomial, cap: u64) -> Result<usize> {
    let mut checked = 0;
    for k in 1..=6usize {
        if (l.q as u128).pow(k as u32) > cap as u128 {
            break;
        }
        let direct = count_points_capped(curve, l.q, k, cap)?.count;
        if BigInt::from(direct) != l.predicted_count(k) {
            return Err(Error::CheckFailed(format!(
                "{} over F_{}^{k}: counted {direct}, L-polynomial predicts {}",
                curve.name(),
                l.q,
                l.predicted_count(k)
            )));
        }
        checked += 1;
    }
    Ok(checked)
}

/// How an L-polynomial of `D_{2d}` was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum Route {
    /// From `N_1..N_g` of the curve itself.
    Direct,
    /// As `L(D_d) L(E)` with `E : y^2 = x^{d+1} + x` the quotient by
    /// `(x, y) -> (-x, -y)`, after matching direct counts over `F_{q^k}` for
    /// `k = 1..=checked_degrees`.
    Decomposition { checked_degrees: usize },
}

/// `E_d : y^2 = x^{d+1} + x`, the quotient of `D_{2d}` by `(x, y) -> (-x, -y)`
/// via `u = x^2`, `w = x y`.
pub fn make_twisted_quotient(d: usize) -> Result<HyperellipticCurve> {
    let mut c = vec![0i64; d + 2];
    c[d + 1] = 1;
    c[1] = 1;
    HyperellipticCurve::new(format!("E_{d}"), ZPoly::from_i64s(&c))
}

/// `L(D_{2d}, q)` directly when `q^{d-1} <= cap`, otherwise through the
/// decomposition `Jac(D_{2d}) ~ Jac(D_d) x Jac(E_d)` given by the two
/// involutions `(-x, y)` and `(-x, -y)`.
pub fn l_polynomial_d2d(d: usize, q: u64, cap: u64) -> Result<(LPolynomial, Route)> {
    let d2d = make_dm(2 * d)?;
    match l_polynomial_capped(&d2d, q, cap) {
        Ok((l, _)) => Ok((l, Route::Direct)),
        Err(Error::CapExceeded { .. }) => {
            let ld = l_polynomial_capped(&make_dm(d)?, q, cap)?.0;
            let le = l_polynomial_capped(&make_twisted_quotient(d)?, q, cap)?.0;
            let l = ld.product(&le)?;
            let checked = extension_consistency(&d2d, &l, cap)?;
            Ok((l, Route::Decomposition { checked_degrees: checked }))
        }
        Err(e) => Err(e),
    }
}

/// Outcome of the isogeny consistency test at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyCheck {
    pub d: u64,
    pub q: u64,
    pub l_c: LPolynomial,
    pub l_d: LPolynomial,
    pub l_d2d: LPolynomial,
    pub d2d_route: Route,
    /// `L(C_d) = L(D_d)`
    pub c_matches_d: bool,
    /// `L(D_{2d}) = L(D_d) L(C_d)`
    pub d2d_matches_product: bool,
}

impl IsogenyCheck {
    pub fn passed(&self) -> bool {
        self.c_matches_d && self.d2d_matches_product
    }
}

/// Both L-polynomial identities behind `Jac(D_{2d}) ~ Jac(D_d)^2` and
/// `Jac(D_d) ~ Jac(C_d)` at one good prime.
pub fn isogeny_check(d: u64, q: u64, cap: u64) -> Result<IsogenyCheck> {
    if d < 3 || !is_prime(d) {
        return Err(Error::NotOddPrime(d));
    }
    let du = d as usize;
    let c = make_cd(du)?;
    let dd = make_dm(du)?;
    let d2d = make_dm(2 * du)?;
    for curve in [&c, &dd, &d2d] {
        check_good(curve, q)?;
    }
    let l_c = l_polynomial_capped(&c, q, cap)?.0;
    let l_d = l_polynomial_capped(&dd, q, cap)?.0;
    let (l_d2d, route) = l_polynomial_d2d(du, q, cap)?;
    let product = l_d.product(&l_c)?;
    Ok(IsogenyCheck {
        d,
        q,
        c_matches_d: l_c == l_d,
        d2d_matches_product: l_d2d == product,
        l_c,
        l_d,
        l_d2d,
        d2d_route: route,
    })
}

/// Good primes `q <= qmax` for `C_d`, `D_d` and `D_{2d}` simultaneously.
pub fn isogeny_primes(d: u64, qmax: u64) -> Result<Vec<u64>> {
    let du = d as usize;
    let curves = [make_cd(du)?, make_dm(du)?, make_dm(2 * du)?];
    Ok(odd_primes(3, qmax).into_iter().filter(|&q| curves.iter().all(|c| good_reduction(c, q))).collect())
}

/// Why an L-polynomial is (ir)reducible over `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Irreducibility {
    /// Irreducible modulo `ell` with full degree: an exact certificate.
    IrreducibleModPrime { ell: u64 },
    /// No subset of the complex roots multiplies out to an integer factor.
    IrreducibleNoRootSubset,
    /// An exact proper factor.
    Reducible {
        #[serde(with = "big_list")]
        factor: Vec<BigInt>,
    },
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        !matches!(self, Irreducibility::Reducible { .. })
    }
}

fn poly_powmod(base: &Poly<Fp>, mut e: u64, m: &Poly<Fp>) -> Poly<Fp> {
    let one = base.coeffs()[0].one_like();
    let mut acc = Poly::constant(one);
    let mut b = base.divrem(m).expect("monic modulus").1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_ref(&b).divrem(m).expect("monic modulus").1;
        }
        e >>= 1;
        if e > 0 {
            b = b.mul_ref(&b).divrem(m).expect("monic modulus").1;
        }
    }
    acc
}

/// Rabin's test over `F_ell`; `f` must keep its degree mod `ell`.
pub fn irreducible_mod(f: &ZPoly, ell: u64) -> bool {
    let fp = reduce_poly(f, ell);
    let n = match fp.degree() {
        Some(n) if Some(n) == f.degree() => n,
        _ => return false,
    };
    if n <= 1 {
        return n == 1;
    }
    let m = fp.monic().expect("nonzero leading coefficient");
    let zero = Fp::new(0, ell);
    let x = Poly::new(vec![zero, zero.one_like()]);
    // x^(ell^j) mod m for j = 1..=n
    let mut frob = vec![x.clone()];
    for _ in 0..n {
        let next = poly_powmod(frob.last().unwrap(), ell, &m);
        frob.push(next);
    }
    if frob[n] != x.divrem(&m).unwrap().1 {
        return false;
    }
    let prime_factors = crate::residue::factorize(n as u64);
    prime_factors.iter().all(|&(r, _)| {
        let h = frob[n / r as usize].sub_ref(&x);
        m.gcd(&h).map(|g| g.degree() == Some(0)).unwrap_or(false)
    })
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Irreducibility of an integer polynomial with constant term 1.
///
/// Repeated roots give an exact reducibility witness; otherwise an
/// irreducible reduction modulo a small prime is an exact certificate;
/// failing that, every subset of at most half the complex roots is
/// multiplied out, rounded, and any integral candidate confirmed by exact
/// division.
pub fn irreducibility(f: &ZPoly) -> Result<Irreducibility> {
    let n = f.degree().unwrap_or(0);
    if n <= 1 {
        return Ok(Irreducibility::IrreducibleNoRootSubset);
    }
    let sqf = squarefree_part(f);
    if sqf.degree() != Some(n) {
        let fq = f.to_rational();
        let g = fq.gcd(&fq.derivative()).expect("field coefficients");
        return Ok(Irreducibility::Reducible { factor: crate::algebra::primitive_part(&g).into_coeffs() });
    }
    for ell in std::iter::once(2).chain(odd_primes(3, 400)) {
        if irreducible_mod(f, ell) {
            return Ok(Irreducibility::IrreducibleModPrime { ell });
        }
    }
    let coeffs: Vec<f64> = f.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let roots = polynomial_roots(&coeffs);
    if roots.len() != n {
        return Err(Error::CheckFailed("eigenvalue iteration did not converge".into()));
    }
    let fq = f.to_rational();
    for k in 1..=n / 2 {
        let mut subs = Vec::new();
        subsets(n, k, 0, &mut Vec::new(), &mut subs);
        for s in subs {
            // prod (1 - T / r) has constant term 1, like f
            let mut c = vec![Complex64::new(1.0, 0.0)];
            for &i in &s {
                let inv = -Complex64::new(1.0, 0.0) / roots[i];
                let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
                for (j, v) in c.iter().enumerate() {
                    next[j] += v;
                    next[j + 1] += v * inv;
                }
                c = next;
            }
            let near_integer = c.iter().all(|z| z.im.abs() < 1e-3 && (z.re - z.re.round()).abs() < 1e-3);
            if !near_integer {
                continue;
            }
            let cand: Vec<BigInt> = c.iter().map(|z| BigInt::from(z.re.round() as i128)).collect();
            let cand_q = ZPoly::new(cand.clone()).to_rational();
            if let Ok((quot, rem)) = fq.divrem(&cand_q) {
                if rem.is_zero() && quot.to_integer().is_some() {
                    return Ok(Irreducibility::Reducible { factor: cand });
                }
            }
        }
    }
    Ok(Irreducibility::IrreducibleNoRootSubset)
}

/// Per-prime irreducibility verdicts for `L(curve, q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicityVerdict {
    pub q: u64,
    pub l: LPolynomial,
    pub verdict: Irreducibility,
}

pub fn simplicity_evidence(curve: &HyperellipticCurve, primes: &[u64], cap: u64) -> Result<Vec<SimplicityVerdict>> {
    primes
        .iter()
        .map(|&q| {
            let (l, _) = l_polynomial_capped(curve, q, cap)?;
            let verdict = irreducibility(&l.as_poly())?;
            Ok(SimplicityVerdict { q, l, verdict })
        })
        .collect()
}

/// The first good prime `q <= qmax` with `L(curve, q)` irreducible.
pub fn first_simple_prime(curve: &HyperellipticCurve, qmax: u64, cap: u64) -> Result<Option<SimplicityVerdict>> {
    for q in odd_primes(3, qmax).into_iter().filter(|&q| good_reduction(curve, q)) {
        let v = simplicity_evidence(curve, &[q], cap)?.remove(0);
        if v.verdict.is_irreducible() {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// `a_q` of `C_2` against the prediction from CM by `Q(sqrt(-2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub q: u64,
    pub a_q: i64,
    /// `-2` is a non-square mod `q`.
    pub inert: bool,
}

impl TraceRow {
    pub fn matches(&self) -> bool {
        (self.a_q == 0) == self.inert
    }
}

pub fn cm_trace_pattern_c2(bound: u64) -> Result<Vec<TraceRow>> {
    let c2 = make_cd(2)?;
    odd_primes(3, bound)
        .into_iter()
        .filter(|&q| good_reduction(&c2, q))
        .map(|q| {
            let n = count_points(&c2, q, 1)?.count;
            Ok(TraceRow { q, a_q: q as i64 + 1 - n as i64, inert: legendre(q - 2, q) == -1 })
        })
        .collect()
}

/// One row of the zeta section of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaRow {
    pub curve: String,
    pub p: u64,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: Vec<u64>,
    #[serde(rename = "L", with = "big_list")]
    pub l: Vec<BigInt>,
    pub irreducible: bool,
}

pub fn zeta_row(curve: &HyperellipticCurve, p: u64, cap: u64) -> Result<ZetaRow> {
    let (l, counts) = l_polynomial_capped(curve, p, cap)?;
    let irreducible = irreducibility(&l.as_poly())?.is_irreducible();
    Ok(ZetaRow { curve: curve.name().to_string(), p, k: counts.len(), n: counts, l: l.coeffs, irreducible })
}

/// Integers as JSON numbers when they fit in 64 bits, decimal strings otherwise.
pub mod big_list {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<Repr> = v
            .iter()
            .map(|b| b.to_i64().map(Repr::Small).unwrap_or_else(|| Repr::Big(b.to_string())))
            .collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                Repr::Small(v) => Ok(BigInt::from(v)),
                Repr::Big(s) => s.parse().map_err(D::Error::custom),
            })
            .collect()
    }
}

/// Coefficients as rationals, for callers working over `Q`.
pub fn as_rational_poly(l: &LPolynomial) -> QPoly {
    QPoly::new(l.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::make_xd;
    use crate::algebra::gf::GfElement;
    use proptest::prelude::*;

    /// Projective count by brute force over `F_p`: every `(x, y)` pair plus
    /// points at infinity worked out from the leading coefficient.
    fn brute_count_prime(f: &ZPoly, p: u64) -> u64 {
        let fp = reduce_poly(f, p);
        let mut affine = 0;
        for x in 0..p {
            let v = fp.eval(&Fp::new(x, p)).value();
            affine += (0..p).filter(|y| y * y % p == v).count() as u64;
        }
        let deg = fp.degree().unwrap();
        let lead = fp.leading().unwrap().value();
        let inf = if deg % 2 == 1 { 1 } else if (0..p).any(|y| y * y % p == lead) { 2 } else { 0 };
        affine + inf
    }

    /// Brute force over `F_{p^k}`: square roots found by squaring every element.
    fn brute_count_ext(f: &ZPoly, p: u64, k: usize) -> u64 {
        let ctx = field_tower(p, k).unwrap();
        let q = ctx.order();
        let elems: Vec<GfElement> = (0..q).map(|i| ctx.element(&ctx.raw_from_index(i)[..k])).collect();
        let mut squares = std::collections::HashMap::new();
        for y in &elems {
            *squares.entry(y.mul(y).coeffs().to_vec()).or_insert(0u64) += 1;
        }
        let fp = reduce_poly(f, p);
        let mut affine = 0;
        for x in &elems {
            let mut v = ctx.element(&[0]);
            for c in fp.coeffs().iter().rev() {
                v = v.mul(x).add(&ctx.element(&[c.value()]));
            }
            affine += squares.get(v.coeffs()).copied().unwrap_or(0);
        }
        let deg = fp.degree().unwrap();
        let lead = ctx.element(&[fp.leading().unwrap().value()]);
        let inf = if deg % 2 == 1 { 1 } else { 2 * squares.contains_key(lead.coeffs()) as u64 };
        affine + inf
    }

    #[test]
    fn reduction_examples() {
        let c2 = make_cd(2).unwrap();
        assert!(good_reduction(&c2, 3));
        assert!(!good_reduction(&c2, 2));
        assert!(!good_reduction(&make_xd(4).unwrap(), 2));
        // D_6: x^6 + 1 has repeated roots mod 3
        assert!(!good_reduction(&make_dm(6).unwrap(), 3));
        assert!(matches!(count_points(&make_dm(6).unwrap(), 3, 1), Err(Error::BadReduction { .. })));
    }

    #[test]
    fn spot_counts() {
        let c2 = make_cd(2).unwrap();
        assert_eq!(count_points(&c2, 3, 1).unwrap().count, 2);
        assert_eq!(count_points(&c2, 5, 1).unwrap().count, 6);
        assert_eq!(count_points(&make_dm(3).unwrap(), 7, 1).unwrap().count, 12);
        for (f, p) in [(c2.f().clone(), 3u64), (c2.f().clone(), 5), (make_dm(3).unwrap().f().clone(), 7)] {
            let curve = HyperellipticCurve::new("t", f.clone()).unwrap();
            assert_eq!(count_points(&curve, p, 1).unwrap().count, brute_count_prime(&f, p));
        }
    }

    #[test]
    fn counts_match_brute_force() {
        let curves = [make_cd(2).unwrap(), make_cd(4).unwrap(), make_cd(5).unwrap(), make_dm(6).unwrap(), make_xd(2).unwrap()];
        for c in &curves {
            for p in [5u64, 7, 11, 13] {
                if !good_reduction(c, p) {
                    continue;
                }
                assert_eq!(count_points(c, p, 1).unwrap().count, brute_count_prime(c.f(), p), "{} at {p}", c.name());
                assert_eq!(count_points(c, p, 2).unwrap().count, brute_count_ext(c.f(), p, 2), "{} over F_{p}^2", c.name());
            }
            if good_reduction(c, 3) {
                assert_eq!(count_points(c, 3, 3).unwrap().count, brute_count_ext(c.f(), 3, 3));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let c = make_cd(4).unwrap();
        assert!(matches!(count_points_capped(&c, 101, 4, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn l_polynomial_examples() {
        let c2 = make_cd(2).unwrap();
        assert_eq!(l_polynomial(&c2, 3).unwrap().coeffs, [1, -2, 3].map(BigInt::from).to_vec());
        assert_eq!(l_polynomial(&c2, 5).unwrap().coeffs, [1, 0, 5].map(BigInt::from).to_vec());
        assert_eq!(LPolynomial::trivial(7).coeffs, vec![BigInt::one()]);
    }

    #[test]
    fn l_polynomials_predict_higher_counts() {
        for (c, p) in [(make_cd(4).unwrap(), 7u64), (make_cd(5).unwrap(), 11), (make_dm(7).unwrap(), 5)] {
            let (l, _) = l_polynomial_capped(&c, p, DEFAULT_CAP).unwrap();
            assert!(l.weil_invariants_hold());
            let g = c.genus();
            let direct = count_points(&c, p, g + 1).unwrap().count;
            assert_eq!(l.predicted_count(g + 1), BigInt::from(direct), "{}", c.name());
        }
    }

    #[test]
    fn power_sums_invert_newton() {
        let c = make_cd(8).unwrap();
        let (l, counts) = l_polynomial_capped(&c, 3, DEFAULT_CAP).unwrap();
        for (k, n) in counts.iter().enumerate() {
            assert_eq!(l.predicted_count(k + 1), BigInt::from(*n));
        }
    }

    #[test]
    fn functional_equation_rejects_tampering() {
        let mut l = l_polynomial(&make_cd(4).unwrap(), 7).unwrap();
        assert!(l.satisfies_functional_equation());
        l.coeffs[3] += 1;
        assert!(!l.satisfies_functional_equation());
    }

    #[test]
    fn isogeny_small_cases() {
        assert!(isogeny_check(3, 7, DEFAULT_CAP).unwrap().passed());
        assert!(isogeny_check(5, 11, DEFAULT_CAP).unwrap().passed());
        assert!(isogeny_check(3, 5, DEFAULT_CAP).unwrap().passed());
        assert!(isogeny_check(4, 5, DEFAULT_CAP).is_err());
    }

    #[test]
    fn decomposition_route_agrees_with_direct_route() {
        for q in [3u64, 5, 11] {
            let (direct, route) = l_polynomial_d2d(7, q, DEFAULT_CAP).unwrap();
            assert_eq!(route, Route::Direct);
            let ld = l_polynomial(&make_dm(7).unwrap(), q).unwrap();
            let le = l_polynomial(&make_twisted_quotient(7).unwrap(), q).unwrap();
            assert_eq!(ld.product(&le).unwrap(), direct, "q = {q}");
        }
        let (_, route) = l_polynomial_d2d(7, 3, 3u64.pow(5)).unwrap();
        assert_eq!(route, Route::Decomposition { checked_degrees: 5 });
    }

    #[test]
    fn irreducibility_examples() {
        let c2 = make_cd(2).unwrap();
        assert!(irreducibility(&l_polynomial(&c2, 3).unwrap().as_poly()).unwrap().is_irreducible());
        let f = &ZPoly::from_i64s(&[1, -2, 3]) * &ZPoly::from_i64s(&[1, 1, 5]);
        match irreducibility(&f).unwrap() {
            Irreducibility::Reducible { factor } => assert_eq!(factor.len(), 3),
            other => panic!("{other:?}"),
        }
        let square = &ZPoly::from_i64s(&[1, 0, 5]) * &ZPoly::from_i64s(&[1, 0, 5]);
        assert!(!irreducibility(&square).unwrap().is_irreducible());
        assert!(irreducible_mod(&ZPoly::from_i64s(&[1, 0, 1]), 3));
        assert!(!irreducible_mod(&ZPoly::from_i64s(&[1, 0, 1]), 5));
    }

    #[test]
    fn root_subset_search_finds_factors_without_mod_certificate() {
        // (1 + 5T^2)(1 + 7T^2) has Galois group V4: reducible mod every prime
        let f = &ZPoly::from_i64s(&[1, 0, 5]) * &ZPoly::from_i64s(&[1, 0, 7]);
        assert!(!irreducibility(&f).unwrap().is_irreducible());
        // 1 + T^4 is irreducible over Q but reducible mod every prime
        assert_eq!(irreducibility(&ZPoly::from_i64s(&[1, 0, 0, 0, 1])).unwrap(), Irreducibility::IrreducibleNoRootSubset);
    }

    #[test]
    fn trace_pattern_small() {
        let rows = cm_trace_pattern_c2(40).unwrap();
        assert!(rows.iter().all(TraceRow::matches));
        let a = |q| rows.iter().find(|r| r.q == q).unwrap().a_q;
        assert_eq!(a(5), 0);
        assert_eq!(a(3), 2);
        assert_eq!(a(7), 0);
    }

    #[test]
    fn zeta_row_json() {
        let row = zeta_row(&make_cd(2).unwrap(), 3, DEFAULT_CAP).unwrap();
        let json = serde_json::to_string(&row).unwrap();
        assert_eq!(json, r#"{"curve":"C_2","p":3,"k":1,"N":[2],"L":[1,-2,3],"irreducible":true}"#);
        let big = LPolynomial { q: 3, genus: 0, coeffs: vec![BigInt::from(u64::MAX) * 4] };
        let s = serde_json::to_string(&big).unwrap();
        assert!(s.contains("\"73786976294838206460\""));
        assert_eq!(serde_json::from_str::<LPolynomial>(&s).unwrap(), big);
    }
    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn random_curves_obey_counting_invariants(
            coeffs in prop::collection::vec(-4i64..=4, 4..=7),
            p in prop::sample::select(vec![3u64, 5, 7, 11]),
        ) {
            let mut c = coeffs;
            *c.last_mut().unwrap() = 1;
            let Ok(curve) = HyperellipticCurve::new("f", ZPoly::from_i64s(&c)) else { return Ok(()) };
            prop_assume!(good_reduction(&curve, p));
            prop_assert_eq!(count_points(&curve, p, 1).unwrap().count, brute_count_prime(curve.f(), p));
            prop_assert_eq!(count_points(&curve, p, 2).unwrap().count, brute_count_ext(curve.f(), p, 2));
            let (l, _) = l_polynomial_capped(&curve, p, DEFAULT_CAP).unwrap();
            prop_assert!(l.weil_invariants_hold());
            let k = curve.genus() + 1;
            prop_assert_eq!(l.predicted_count(k), BigInt::from(count_points(&curve, p, k).unwrap().count));
        }
    }
}
