//! Hyperelliptic models, monomial automorphisms, and their exact action on
//! the regular differentials `omega_j = x^{j-1} dx / y`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::{squarefree_over_q, Laurent, Poly, Ring, ZPoly};
use crate::chebyshev::{chebyshev, curve_polynomial, genus_of_cd};
use crate::cm::{cm_type_case1, cm_type_case2, CmType, CmTypeRecord};
use crate::cyclotomic::{
    cyclotomic_polynomial, eta, minimal_polynomial, CyclotomicContext, CyclotomicElement,
};
use crate::error::{Error, Result};
use crate::residue::{euler_phi, unit_group};

type Cyc = CyclotomicElement;

/// `y^2 = f(x)` over `Q` with `f` squarefree of degree at least 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperellipticCurve {
    name: String,
    f: ZPoly,
    genus: usize,
}

impl HyperellipticCurve {
    pub fn new(name: impl Into<String>, f: ZPoly) -> Result<Self> {
        let name = name.into();
        let deg = f.degree().unwrap_or(0);
        if deg < 3 {
            return Err(Error::InvalidModel(format!("{name}: degree {deg} < 3")));
        }
        if !squarefree_over_q(&f)? {
            return Err(Error::InvalidModel(format!("{name}: {f} is not squarefree")));
        }
        Ok(Self { name, f, genus: (deg - 1) / 2 })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn f(&self) -> &ZPoly {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }
}

impl fmt::Display for HyperellipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: y^2 = {}", self.name, self.f)
    }
}

fn binomial_model(deg: usize, low: i64) -> ZPoly {
    let mut c = vec![0i64; deg + 1];
    c[deg] = 1;
    c[low as usize] += 1;
    ZPoly::from_i64s(&c)
}

/// `X_d : y^2 = x (x^{2d} + 1)`, genus `d`.
pub fn make_xd(d: usize) -> Result<HyperellipticCurve> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidModel(format!("X_d needs even d >= 2, got {d}")));
    }
    HyperellipticCurve::new(format!("X_{d}"), binomial_model(2 * d + 1, 1))
}

/// `D_m : y^2 = x^m + 1`.
pub fn make_dm(m: usize) -> Result<HyperellipticCurve> {
    if m < 3 {
        return Err(Error::InvalidModel(format!("D_m needs m >= 3, got {m}")));
    }
    HyperellipticCurve::new(format!("D_{m}"), binomial_model(m, 0))
}

/// `C_d : y^2 = (x + 2) phi_d(x)`.
pub fn make_cd(d: usize) -> Result<HyperellipticCurve> {
    genus_of_cd(d)?;
    HyperellipticCurve::new(format!("C_{d}"), curve_polynomial(d))
}

/// Which branch of the construction covers `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `d = 2^e`: `C_d = X_d / <tau>`, CM by `Q(zeta_{4d} - zeta_{4d}^-1)`.
    #[serde(rename = "1")]
    PowerOfTwo,
    /// `d = p` odd prime: `C_d = D_{2d} / <sigma>`, CM by `Q(zeta_p)`.
    #[serde(rename = "2")]
    OddPrime,
}

impl Case {
    /// Classify `d`, rejecting values outside the theorem with the failing criterion.
    pub fn for_d(d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfScope(format!("d = {d}: C_{d} has genus 0")));
        }
        if d % 2 == 0 {
            let phi = euler_phi(4 * d);
            if phi != 2 * d {
                return Err(Error::OutOfScope(format!(
                    "d = {d}: φ(4d) ≠ 2d (φ({}) = {phi}, 2d = {})",
                    4 * d,
                    2 * d
                )));
            }
            return Ok(Case::PowerOfTwo);
        }
        let phi = euler_phi(d);
        if phi != d - 1 {
            return Err(Error::OutOfScope(format!("d = {d}: φ(d) ≠ d - 1 (φ({d}) = {phi})")));
        }
        Ok(Case::OddPrime)
    }

    pub fn number(self) -> u8 {
        match self {
            Case::PowerOfTwo => 1,
            Case::OddPrime => 2,
        }
    }

    /// Conductor of the cyclotomic field holding the automorphisms.
    pub fn conductor(self, d: u64) -> u64 {
        match self {
            Case::PowerOfTwo => 4 * d,
            Case::OddPrime => 2 * d,
        }
    }

    /// Parity check only; the CM criterion is separate.
    fn check_parity(self, d: usize) -> Result<()> {
        match self {
            Case::PowerOfTwo if d >= 2 && d % 2 == 0 => Ok(()),
            Case::OddPrime if d >= 3 && d % 2 == 1 => Ok(()),
            _ => Err(Error::InvalidModel(format!("d = {d} has the wrong parity for case {}", self.number()))),
        }
    }
}

fn cpow(c: &Cyc, k: i64) -> Result<Cyc> {
    if k >= 0 {
        Ok(c.pow(k as u64))
    } else {
        Ok(c.inv()?.pow(k.unsigned_abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomorphismKind {
    /// `(x, y) -> (alpha x, beta y x^m)`
    Scale,
    /// `(x, y) -> (gamma / x, delta y x^m)`
    Invert,
}

/// `(x, y) -> (c x^s, e y x^m)` with `s = ±1`.
///
/// Composition stays in this shape, so products and inverses are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialAutomorphism {
    c: Cyc,
    s: i64,
    e: Cyc,
    m: i64,
}

impl MonomialAutomorphism {
    /// `(x, y) -> (alpha x, beta y)`.
    pub fn scale(alpha: Cyc, beta: Cyc) -> Self {
        Self { c: alpha, s: 1, e: beta, m: 0 }
    }

    /// `(x, y) -> (gamma / x, delta y / x^m)`.
    pub fn invert(gamma: Cyc, delta: Cyc, m: i64) -> Self {
        Self { c: gamma, s: -1, e: delta, m: -m }
    }

    pub fn identity(ctx: &Arc<CyclotomicContext>) -> Self {
        let one = Cyc::from_i64(ctx, 1);
        Self::scale(one.clone(), one)
    }

    /// `(x, y) -> (x, -y)`.
    pub fn hyperelliptic_involution(ctx: &Arc<CyclotomicContext>) -> Self {
        Self::scale(Cyc::from_i64(ctx, 1), Cyc::from_i64(ctx, -1))
    }

    pub fn kind(&self) -> AutomorphismKind {
        if self.s == 1 {
            AutomorphismKind::Scale
        } else {
            AutomorphismKind::Invert
        }
    }

    pub fn context(&self) -> &Arc<CyclotomicContext> {
        self.c.context()
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let c = self.c.checked_mul(&cpow(&other.c, self.s)?)?;
        let e = self.e.checked_mul(&other.e)?.times(&cpow(&other.c, self.m)?);
        Ok(Self { c, s: self.s * other.s, e, m: other.m + other.s * self.m })
    }

    pub fn inverse(&self) -> Result<Self> {
        let e_inv = self.e.inv()?;
        if self.s == 1 {
            Ok(Self { c: self.c.inv()?, s: 1, e: e_inv.times(&cpow(&self.c, self.m)?), m: -self.m })
        } else {
            Ok(Self { c: self.c.clone(), s: -1, e: e_inv.times(&cpow(&self.c, -self.m)?), m: self.m })
        }
    }

    pub fn pow(&self, k: u64) -> Result<Self> {
        let mut acc = Self::identity(self.context());
        for _ in 0..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        self.s == 1 && self.m == 0 && self.c.is_one_elem() && self.e.is_one_elem()
    }

    /// Order as a map, if at most `max`.
    pub fn order(&self, max: u64) -> Result<Option<u64>> {
        let mut acc = self.clone();
        for k in 1..=max {
            if acc.is_identity() {
                return Ok(Some(k));
            }
            acc = self.compose(&acc)?;
        }
        Ok(None)
    }

    fn x_image(&self) -> Laurent<Cyc> {
        Laurent::monomial(self.c.clone(), self.s)
    }
}

impl fmt::Display for MonomialAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = if self.s == 1 { format!("({}) x", self.c) } else { format!("({}) / x", self.c) };
        let y = match self.m {
            0 => format!("({}) y", self.e),
            m => format!("({}) y x^{m}", self.e),
        };
        write!(f, "(x, y) -> ({x}, {y})")
    }
}

fn lift_poly(f: &ZPoly, ctx: &Arc<CyclotomicContext>) -> Poly<Cyc> {
    f.map(|z| Cyc::from_rational(ctx, &BigRational::from_integer(z.clone())))
}

/// Substitute the map into `y^2 - f(x)` and test for the zero function:
/// `e^2 x^{2m} f(x) = f(c x^s)` as Laurent polynomials.
pub fn automorphism_valid(curve: &HyperellipticCurve, a: &MonomialAutomorphism) -> bool {
    if !a.c.same_ring(&a.e) {
        return false;
    }
    let ctx = a.context();
    let f = lift_poly(&curve.f, ctx);
    let lhs = Laurent::from_poly(&f).scale(&a.e.times(&a.e)).shift(2 * a.m);
    let rhs = Laurent::eval_poly(&f, &a.x_image());
    lhs == rhs
}

/// Square matrix over `Q(zeta_n)`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycMatrix {
    n: usize,
    entries: Vec<Cyc>,
}

impl CycMatrix {
    pub fn zeros(ctx: &Arc<CyclotomicContext>, n: usize) -> Self {
        Self { n, entries: vec![Cyc::zero(ctx); n * n] }
    }

    pub fn identity(ctx: &Arc<CyclotomicContext>, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n);
        for i in 0..n {
            m.entries[i * n + i] = Cyc::from_i64(ctx, 1);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Cyc {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Cyc) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        let n = self.n;
        let mut out = self.clone();
        out.entries.iter_mut().for_each(|e| *e = e.zero_like());
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).plus(&a.times(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.minus(b)).collect();
        Self { n: self.n, entries }
    }

    pub fn apply(&self, v: &[Cyc]) -> Vec<Cyc> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(v[0].zero_like(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_zero() || v[j].is_zero() {
                        acc
                    } else {
                        acc.plus(&a.times(&v[j]))
                    }
                })
            })
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<Cyc> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    /// Basis of the right kernel by reduction to row echelon form.
    pub fn kernel(&self) -> Vec<Vec<Cyc>> {
        let n = self.n;
        let mut rows: Vec<Vec<Cyc>> = (0..n).map(|i| self.entries[i * n..(i + 1) * n].to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let Some(p) = (r..n).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][col].inv().expect("nonzero pivot");
            rows[r] = rows[r].iter().map(|x| x.times(&inv)).collect();
            for i in 0..n {
                if i != r && !rows[i][col].is_zero() {
                    let factor = rows[i][col].clone();
                    let pivot_row = rows[r].clone();
                    for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                        if !p.is_zero() {
                            *x = x.minus(&factor.times(p));
                        }
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        let zero = self.entries.first().map(|e| e.zero_like());
        let Some(zero) = zero else { return Vec::new() };
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![zero.clone(); n];
                v[fc] = zero.one_like();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = rows[row][fc].negated();
                }
                v
            })
            .collect()
    }
}

/// Matrix of `a^*` on `omega_1..omega_g`: column `j` holds the coordinates of
/// `a^* omega_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackMatrix {
    curve: String,
    automorphism: MonomialAutomorphism,
    matrix: CycMatrix,
}

impl PullbackMatrix {
    pub fn matrix(&self) -> &CycMatrix {
        &self.matrix
    }

    pub fn genus(&self) -> usize {
        self.matrix.size()
    }

    pub fn curve_name(&self) -> &str {
        &self.curve
    }

    pub fn automorphism(&self) -> &MonomialAutomorphism {
        &self.automorphism
    }
}

/// `a^* (x^{j-1} dx / y) = X^{j-1} X' / (e x^m) dx / y` with `X = c x^s`,
/// re-expressed in the `omega` basis.
pub fn pullback_matrix(curve: &HyperellipticCurve, a: &MonomialAutomorphism) -> Result<PullbackMatrix> {
    if !automorphism_valid(curve, a) {
        return Err(Error::InvalidModel(format!("{a} does not preserve {curve}")));
    }
    let ctx = a.context();
    let g = curve.genus();
    let one = Cyc::from_i64(ctx, 1);
    let x_img = a.x_image();
    let dx_img = x_img.derivative();
    let y_factor_inv = a.e.inv()?;
    let mut matrix = CycMatrix::zeros(ctx, g);
    for j in 1..=g {
        let form = x_img
            .pow(j as u32 - 1, &one)
            .mul_ref(&dx_img)
            .scale(&y_factor_inv)
            .shift(-a.m);
        for (k, coeff) in form.terms() {
            if k < 0 || k as usize >= g {
                return Err(Error::NotRegular(format!("x^{k} dx/y from omega_{j} on {}", curve.name())));
            }
            matrix.set(k as usize, j - 1, coeff.clone());
        }
    }
    Ok(PullbackMatrix { curve: curve.name().to_string(), automorphism: a.clone(), matrix })
}

/// Kernel of `M - I` for the pullback of an involution.
pub fn invariant_subspace(m: &PullbackMatrix) -> Result<Vec<Vec<Cyc>>> {
    let ctx = m.automorphism.context();
    let id = CycMatrix::identity(ctx, m.genus());
    if m.matrix.mul(&m.matrix) != id {
        return Err(Error::NotInvolution);
    }
    Ok(m.matrix.sub(&id).kernel())
}

/// `tau : (x, y) -> (1/x, y / x^{d+1})` on `X_d`.
pub fn tau_case1(d: usize) -> MonomialAutomorphism {
    let ctx = CyclotomicContext::get(4 * d as u64);
    let one = Cyc::from_i64(&ctx, 1);
    MonomialAutomorphism::invert(one.clone(), one, d as i64 + 1)
}

/// The naive map `(x, y) -> (zeta_{4d} x, zeta_{4d} y)`; it does not
/// preserve `X_d` and is kept for the validity check.
pub fn naive_zeta_case1(d: usize) -> MonomialAutomorphism {
    let ctx = CyclotomicContext::get(4 * d as u64);
    MonomialAutomorphism::scale(Cyc::zeta_power(&ctx, 1), Cyc::zeta_power(&ctx, 1))
}

/// `zeta : (x, y) -> (zeta_{4d}^2 x, zeta_{4d} y)` on `X_d`, checked to be an
/// automorphism.
pub fn zeta_case1(d: usize) -> Result<MonomialAutomorphism> {
    let ctx = CyclotomicContext::get(4 * d as u64);
    let z = MonomialAutomorphism::scale(Cyc::zeta_power(&ctx, 2), Cyc::zeta_power(&ctx, 1));
    if !automorphism_valid(&make_xd(d)?, &z) {
        return Err(Error::CheckFailed(format!("zeta does not preserve X_{d}")));
    }
    Ok(z)
}

/// `sigma : (x, y) -> (1/x, y / x^d)` on `D_{2d}`.
pub fn sigma_case2(d: usize) -> MonomialAutomorphism {
    let ctx = CyclotomicContext::get(2 * d as u64);
    let one = Cyc::from_i64(&ctx, 1);
    MonomialAutomorphism::invert(one.clone(), one, d as i64)
}

/// `zeta : (x, y) -> (zeta_{2d} x, y)` on `D_{2d}`.
pub fn zeta_case2(d: usize) -> MonomialAutomorphism {
    let ctx = CyclotomicContext::get(2 * d as u64);
    MonomialAutomorphism::scale(Cyc::zeta_power(&ctx, 1), Cyc::from_i64(&ctx, 1))
}

/// `zeta_n^k - zeta_n^-k`.
fn eta_power(ctx: &Arc<CyclotomicContext>, k: i64) -> Cyc {
    Cyc::zeta_power(ctx, k).minus(&Cyc::zeta_power(ctx, -k))
}

/// The cover, involution, automorphism and invariant basis for one case.
struct QuotientSetup {
    cover: HyperellipticCurve,
    involution: MonomialAutomorphism,
    zeta: MonomialAutomorphism,
    /// Pairs `(j, j')` with invariant vector `omega_j - omega_{j'}` (1-based).
    pairs: Vec<(usize, usize)>,
    /// Expected eigenvalue on each pair.
    closed_forms: Vec<Cyc>,
}

fn quotient_setup(d: usize, case: Case) -> Result<QuotientSetup> {
    case.check_parity(d)?;
    let ctx = CyclotomicContext::get(case.conductor(d as u64));
    Ok(match case {
        Case::PowerOfTwo => QuotientSetup {
            cover: make_xd(d)?,
            involution: tau_case1(d),
            zeta: zeta_case1(d)?,
            pairs: (1..=d / 2).map(|j| (j, d - j + 1)).collect(),
            closed_forms: (1..=d / 2).map(|j| eta_power(&ctx, 2 * j as i64 - 1)).collect(),
        },
        Case::OddPrime => QuotientSetup {
            cover: make_dm(2 * d)?,
            involution: sigma_case2(d),
            zeta: zeta_case2(d),
            pairs: (1..=(d - 1) / 2).map(|j| (j, d - j)).collect(),
            closed_forms: (1..=(d - 1) / 2).map(|j| eta_power(&ctx, j as i64)).collect(),
        },
    })
}

/// The action of `zeta - zeta^-1` on the invariant differentials.
#[derive(Debug, Clone)]
pub struct QuotientAction {
    pub cover: String,
    /// `zeta^* - (zeta^-1)^*` commutes with the involution's pullback.
    pub commutes: bool,
    pub invariant_dimension: usize,
    /// The span of `omega_j - omega_j'` equals the computed invariant subspace.
    pub invariant_basis_matches: bool,
    /// Each `omega_j - omega_j'` is an eigenvector.
    pub diagonal: bool,
    pub eigenvalues: Vec<Cyc>,
    pub matches_closed_form: bool,
}

impl QuotientAction {
    pub fn all_pass(&self) -> bool {
        self.commutes && self.invariant_basis_matches && self.diagonal && self.matches_closed_form
    }
}

fn pair_vector(ctx: &Arc<CyclotomicContext>, g: usize, (j, k): (usize, usize)) -> Vec<Cyc> {
    let mut v = vec![Cyc::zero(ctx); g];
    v[j - 1] = Cyc::from_i64(ctx, 1);
    v[k - 1] = Cyc::from_i64(ctx, -1);
    v
}

/// Compute `zeta^* - (zeta^-1)^*` on the cover, restrict it to the
/// involution-invariant differentials, and read off its eigenvalues.
pub fn quotient_action(d: usize, case: Case) -> Result<QuotientAction> {
    let setup = quotient_setup(d, case)?;
    let ctx = setup.zeta.context().clone();
    let g = setup.cover.genus();
    let m_zeta = pullback_matrix(&setup.cover, &setup.zeta)?;
    let m_zeta_inv = pullback_matrix(&setup.cover, &setup.zeta.inverse()?)?;
    let m_inv = pullback_matrix(&setup.cover, &setup.involution)?;
    let endo = m_zeta.matrix.sub(&m_zeta_inv.matrix);
    let commutes = endo.mul(&m_inv.matrix) == m_inv.matrix.mul(&endo);

    let invariant = invariant_subspace(&m_inv)?;
    let fixed = m_inv.matrix.sub(&CycMatrix::identity(&ctx, g));
    let vectors: Vec<Vec<Cyc>> = setup.pairs.iter().map(|&p| pair_vector(&ctx, g, p)).collect();
    let invariant_basis_matches = invariant.len() == vectors.len()
        && vectors.iter().all(|v| fixed.apply(v).iter().all(|c| c.is_zero()));

    let mut diagonal = true;
    let mut eigenvalues = Vec::with_capacity(vectors.len());
    for (v, &(j, _)) in vectors.iter().zip(&setup.pairs) {
        let image = endo.apply(v);
        let lambda = image[j - 1].clone();
        let scaled: Vec<Cyc> = v.iter().map(|c| c.times(&lambda)).collect();
        diagonal &= image == scaled;
        eigenvalues.push(lambda);
    }
    let matches_closed_form = eigenvalues == setup.closed_forms;
    Ok(QuotientAction {
        cover: setup.cover.name().to_string(),
        commutes,
        invariant_dimension: invariant.len(),
        invariant_basis_matches,
        diagonal,
        eigenvalues,
        matches_closed_form,
    })
}

/// Eigenvalues of `zeta - zeta^-1` on the invariant differentials, failing
/// unless commutation, diagonality and the closed forms all check out.
pub fn endo_on_quotient(d: usize, case: Case) -> Result<Vec<Cyc>> {
    let action = quotient_action(d, case)?;
    if !action.commutes {
        return Err(Error::CheckFailed(format!("zeta - zeta^-1 does not commute with the involution on {}", action.cover)));
    }
    if !action.invariant_basis_matches || !action.diagonal {
        return Err(Error::CheckFailed(format!("action on invariant differentials of {} is not diagonal", action.cover)));
    }
    if !action.matches_closed_form {
        return Err(Error::CheckFailed(format!("eigenvalues on {} differ from the closed form", action.cover)));
    }
    Ok(action.eigenvalues)
}

/// `M_tau M_zeta M_tau = M_{zeta^{2d-1}}` on `X_d`, together with the same
/// relation between the maps themselves.
pub fn dihedral_relation_case1(d: usize) -> Result<bool> {
    let x = make_xd(d)?;
    let tau = tau_case1(d);
    let zeta = zeta_case1(d)?;
    let target = zeta.pow(2 * d as u64 - 1)?;
    let maps_agree = tau.compose(&zeta)?.compose(&tau)? == target;
    let mt = pullback_matrix(&x, &tau)?;
    let mz = pullback_matrix(&x, &zeta)?;
    let lhs = mt.matrix.mul(&mz.matrix).mul(&mt.matrix);
    Ok(maps_agree && lhs == *pullback_matrix(&x, &target)?.matrix())
}

/// Exact Laurent identities behind `C_d = cover / <involution>`:
/// `v^2 = (u + 2) phi_d(u)` with `u = x + 1/x`, plus invariance of `u`, `v`.
pub fn quotient_identity(d: usize, case: Case) -> Result<bool> {
    case.check_parity(d)?;
    let one = BigInt::from(1);
    let mono = |k: i64| Laurent::monomial(one.clone(), k);
    let (f, v_factor, tau_m, middle) = match case {
        Case::PowerOfTwo => {
            let f = mono(2 * d as i64 + 1).add_ref(&mono(1));
            // v = y (x + 1) / x^{1 + d/2}
            let v = mono(1).add_ref(&mono(0)).shift(-(1 + d as i64 / 2));
            let middle = f.mul_ref(&mono(1).add_ref(&mono(0).scale(&BigInt::from(2))).add_ref(&mono(-1))).shift(-(d as i64) - 1);
            (f, v, -(d as i64 + 1), middle)
        }
        Case::OddPrime => {
            let f = mono(2 * d as i64).add_ref(&mono(0));
            // v = y (1 + x) x^{-(d+1)/2}
            let v = mono(1).add_ref(&mono(0)).shift(-((d as i64 + 1) / 2));
            let pd = mono(d as i64).add_ref(&mono(-(d as i64)));
            let middle = pd.mul_ref(&mono(1).add_ref(&mono(0).scale(&BigInt::from(2))).add_ref(&mono(-1)));
            (f, v, -(d as i64), middle)
        }
    };
    let v_squared = f.mul_ref(&v_factor).mul_ref(&v_factor);
    let target = crate::algebra::laurent_compose(&curve_polynomial(d));
    let u = mono(1).add_ref(&mono(-1));
    let inv = mono(-1);
    let u_invariant = u.substitute_monomial(&inv) == Some(u.clone());
    // v(tau(x, y)) = y x^{tau_m} v_factor(1/x)
    let v_invariant = v_factor.substitute_monomial(&inv).map(|l| l.shift(tau_m)) == Some(v_factor.clone());
    let f_laurent = |p: &ZPoly| Laurent::eval_poly(p, &u);
    let chebyshev_form = f_laurent(&chebyshev(d)).mul_ref(&u.add_ref(&mono(0).scale(&BigInt::from(2))));
    Ok(v_squared == middle && middle == target && target == chebyshev_form && u_invariant && v_invariant)
}

/// Every computational ingredient of the CM statement for one `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmSummary {
    pub d: u64,
    pub case: Case,
    pub genus: usize,
    /// Minimal polynomial over `Q` of a generator of the CM field.
    pub field_polynomial: String,
    pub field_degree: usize,
    pub degree_is_twice_genus: bool,
    pub cm_type: CmTypeRecord,
    pub cm_type_valid: bool,
    pub primitive: bool,
    pub induced_by_subgroup_scan: bool,
    /// The type read off from the eigenvalues via the Galois action on `eta`.
    pub eigenvalue_type: CmTypeRecord,
    /// Some `g` with `g S = S_eigen`, when one exists.
    pub eigenvalue_type_translate: Option<u64>,
    pub eigenvalues: Vec<String>,
}

/// `{ a : sigma_a(eta) in eigenvalues }`, mapped into the type's group.
fn type_from_eigenvalues(eta_n: &Cyc, eigenvalues: &[Cyc], like: &CmType) -> Result<CmType> {
    let n = eta_n.context().conductor();
    let target = like.group().modulus();
    let mut residues = Vec::new();
    for lambda in eigenvalues {
        let a = unit_group(n)
            .elements()
            .iter()
            .copied()
            .find(|&a| eta_n.galois_apply(a).map(|y| &y == lambda).unwrap_or(false))
            .ok_or_else(|| Error::CheckFailed(format!("eigenvalue {lambda} is not a conjugate of eta")))?;
        residues.push(a % target);
    }
    CmType::new(like.group().clone(), &residues)
}

pub fn cm_summary(d: u64) -> Result<CmSummary> {
    let case = Case::for_d(d)?;
    let genus = genus_of_cd(d as usize)?;
    let (field_poly, cm_type) = match case {
        Case::PowerOfTwo => (minimal_polynomial(&eta(4 * d)), cm_type_case1(d.trailing_zeros())?),
        Case::OddPrime => (cyclotomic_polynomial(d).to_rational(), cm_type_case2(d)?),
    };
    let field_degree = field_poly.degree().unwrap_or(0);
    let eta_n = eta(case.conductor(d));
    let eta_degree = minimal_polynomial(&eta_n).degree().unwrap_or(0);
    let eigenvalues = endo_on_quotient(d as usize, case)?;
    let eigen_type = type_from_eigenvalues(&eta_n, &eigenvalues, &cm_type)?;
    let translate = cm_type
        .group()
        .quotient()
        .representatives()
        .iter()
        .copied()
        .find(|&g| cm_type.translate(g).map(|t| t == eigen_type).unwrap_or(false));
    Ok(CmSummary {
        d,
        case,
        genus,
        field_polynomial: field_poly.to_string(),
        field_degree,
        degree_is_twice_genus: field_degree == 2 * genus && eta_degree == field_degree,
        cm_type: cm_type.record(),
        cm_type_valid: cm_type.is_valid(),
        primitive: cm_type.is_primitive(),
        induced_by_subgroup_scan: cm_type.induced_oracle()?,
        eigenvalue_type: eigen_type.record(),
        eigenvalue_type_translate: translate,
        eigenvalues: eigenvalues.iter().map(|e| e.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::QPoly;

    fn z(n: u64, k: i64) -> Cyc {
        Cyc::zeta_power(&CyclotomicContext::get(n), k)
    }

    #[test]
    fn models_and_genera() {
        let x2 = make_xd(2).unwrap();
        assert_eq!(x2.f(), &ZPoly::from_i64s(&[0, 1, 0, 0, 0, 1]));
        assert_eq!(x2.genus(), 2);
        assert_eq!(make_dm(6).unwrap().genus(), 2);
        assert_eq!(make_dm(7).unwrap().genus(), 3);
        assert_eq!(make_cd(3).unwrap().f(), &ZPoly::from_i64s(&[0, -6, -3, 2, 1]));
        assert_eq!(make_cd(3).unwrap().genus(), 1);
        assert_eq!(make_xd(8).unwrap().genus(), 8);
        assert!(make_xd(3).is_err());
        assert!(HyperellipticCurve::new("sq", ZPoly::from_i64s(&[0, 0, 1, 1])).is_err());
    }

    #[test]
    fn case_classification() {
        assert_eq!(Case::for_d(8).unwrap(), Case::PowerOfTwo);
        assert_eq!(Case::for_d(2).unwrap(), Case::PowerOfTwo);
        assert_eq!(Case::for_d(7).unwrap(), Case::OddPrime);
        let msg = Case::for_d(6).unwrap_err().to_string();
        assert!(msg.contains("φ(4d) ≠ 2d") && msg.contains("φ(24) = 8"), "{msg}");
        assert!(Case::for_d(9).is_err());
        assert!(Case::for_d(1).is_err());
    }

    #[test]
    fn validity_oracle() {
        for d in [2usize, 4, 8] {
            let x = make_xd(d).unwrap();
            assert!(automorphism_valid(&x, &zeta_case1(d).unwrap()));
            assert!(!automorphism_valid(&x, &naive_zeta_case1(d)));
            assert!(automorphism_valid(&x, &tau_case1(d)));
        }
        let d10 = make_dm(10).unwrap();
        assert!(automorphism_valid(&d10, &sigma_case2(5)));
        assert!(automorphism_valid(&d10, &zeta_case2(5)));
    }

    #[test]
    fn zeta_case1_structure() {
        let zeta = zeta_case1(2).unwrap();
        assert_eq!(zeta.order(100).unwrap(), Some(8));
        let zeta4 = zeta_case1(4).unwrap();
        let ctx = zeta4.context().clone();
        assert_eq!(zeta4.pow(8).unwrap(), MonomialAutomorphism::hyperelliptic_involution(&ctx));
        let tau = tau_case1(4);
        assert_eq!(tau.compose(&zeta4).unwrap().compose(&tau).unwrap(), zeta4.pow(7).unwrap());
        assert_eq!(tau.order(10).unwrap(), Some(2));
    }

    #[test]
    fn composition_and_inverse() {
        let zeta = zeta_case1(4).unwrap();
        let tau = tau_case1(4);
        for a in [&zeta, &tau] {
            assert!(a.compose(&a.inverse().unwrap()).unwrap().is_identity());
            assert!(a.inverse().unwrap().compose(a).unwrap().is_identity());
        }
        let zt = zeta.compose(&tau).unwrap();
        assert!(automorphism_valid(&make_xd(4).unwrap(), &zt));
        assert_eq!(zt.kind(), AutomorphismKind::Invert);
    }

    #[test]
    fn pullback_examples() {
        let d = 4;
        let x = make_xd(d).unwrap();
        let mt = pullback_matrix(&x, &tau_case1(d)).unwrap();
        let ctx = tau_case1(d).context().clone();
        for j in 1..=d {
            for i in 1..=d {
                let expected = if i == d - j + 1 { Cyc::from_i64(&ctx, -1) } else { Cyc::zero(&ctx) };
                assert_eq!(mt.matrix().get(i - 1, j - 1), &expected);
            }
        }
        let mz = pullback_matrix(&x, &zeta_case1(d).unwrap()).unwrap();
        assert!(mz.matrix().is_diagonal());
        for j in 1..=d {
            assert_eq!(mz.matrix().get(j - 1, j - 1), &z(16, 2 * j as i64 - 1));
        }
        let d10 = make_dm(10).unwrap();
        let ms = pullback_matrix(&d10, &sigma_case2(5)).unwrap();
        let ctx10 = sigma_case2(5).context().clone();
        for j in 1..=4 {
            assert_eq!(ms.matrix().get(5 - j - 1, j - 1), &Cyc::from_i64(&ctx10, -1));
        }
        assert!(pullback_matrix(&x, &naive_zeta_case1(d)).is_err());
    }

    #[test]
    fn hyperelliptic_involution_is_minus_identity() {
        for curve in [make_xd(4).unwrap(), make_dm(10).unwrap(), make_cd(5).unwrap(), make_cd(8).unwrap()] {
            let ctx = CyclotomicContext::get(4);
            let m = pullback_matrix(&curve, &MonomialAutomorphism::hyperelliptic_involution(&ctx)).unwrap();
            let minus = CycMatrix::zeros(&ctx, curve.genus()).sub(&CycMatrix::identity(&ctx, curve.genus()));
            assert_eq!(m.matrix(), &minus);
        }
    }

    #[test]
    fn pullback_is_contravariant() {
        for d in [2usize, 4, 8, 16] {
            let x = make_xd(d).unwrap();
            let zeta = zeta_case1(d).unwrap();
            let tau = tau_case1(d);
            let pairs = [(zeta.clone(), tau.clone()), (tau.clone(), zeta.clone()), (zeta.pow(3).unwrap(), tau.compose(&zeta).unwrap())];
            for (a, b) in pairs {
                let ab = pullback_matrix(&x, &a.compose(&b).unwrap()).unwrap();
                let ma = pullback_matrix(&x, &a).unwrap();
                let mb = pullback_matrix(&x, &b).unwrap();
                assert_eq!(ab.matrix(), &mb.matrix().mul(ma.matrix()), "d = {d}");
            }
        }
    }

    #[test]
    fn invariant_subspaces() {
        let m = pullback_matrix(&make_xd(4).unwrap(), &tau_case1(4)).unwrap();
        assert_eq!(invariant_subspace(&m).unwrap().len(), 2);
        let m = pullback_matrix(&make_dm(10).unwrap(), &sigma_case2(5)).unwrap();
        assert_eq!(invariant_subspace(&m).unwrap().len(), 2);
        let m = pullback_matrix(&make_xd(2).unwrap(), &tau_case1(2)).unwrap();
        assert_eq!(invariant_subspace(&m).unwrap().len(), 1);
        let m = pullback_matrix(&make_xd(4).unwrap(), &zeta_case1(4).unwrap()).unwrap();
        assert_eq!(invariant_subspace(&m), Err(Error::NotInvolution));
    }

    #[test]
    fn eigenvalue_displays() {
        assert_eq!(endo_on_quotient(4, Case::PowerOfTwo).unwrap(), vec![eta_power(&CyclotomicContext::get(16), 1), eta_power(&CyclotomicContext::get(16), 3)]);
        let c2 = endo_on_quotient(5, Case::OddPrime).unwrap();
        assert_eq!(c2, vec![z(10, 1).minus(&z(10, -1)), z(10, 2).minus(&z(10, -2))]);
        let e2 = endo_on_quotient(2, Case::PowerOfTwo).unwrap();
        assert_eq!(minimal_polynomial(&e2[0]), QPoly::from_i64s(&[2, 0, 1]));
        // the construction works for any even d; only the CM degree count needs d = 2^e
        assert_eq!(endo_on_quotient(6, Case::PowerOfTwo).unwrap().len(), 3);
        assert!(endo_on_quotient(5, Case::PowerOfTwo).is_err());
    }

    #[test]
    fn quotient_identities() {
        assert!(quotient_identity(2, Case::PowerOfTwo).unwrap());
        assert!(quotient_identity(3, Case::OddPrime).unwrap());
        assert!(quotient_identity(6, Case::PowerOfTwo).unwrap());
        assert!(quotient_identity(9, Case::OddPrime).unwrap());
    }

    #[test]
    fn dihedral_relation() {
        for d in [2usize, 4, 8] {
            assert!(dihedral_relation_case1(d).unwrap());
        }
    }

    #[test]
    fn summaries() {
        let s2 = cm_summary(2).unwrap();
        assert_eq!((s2.genus, s2.field_degree), (1, 2));
        assert_eq!(s2.field_polynomial, "x^2 + 2");
        assert!(s2.primitive && s2.degree_is_twice_genus);
        let s8 = cm_summary(8).unwrap();
        assert_eq!((s8.genus, s8.field_degree), (4, 8));
        assert_eq!(s8.eigenvalue_type, s8.cm_type);
        assert!(s8.primitive && !s8.induced_by_subgroup_scan);
        let s5 = cm_summary(5).unwrap();
        assert_eq!(s5.genus, 2);
        assert_eq!(s5.field_polynomial, "x^4 + x^3 + x^2 + x + 1");
        assert_eq!(s5.cm_type.s, vec![1, 2]);
        assert!(s5.primitive);
        assert_eq!(s5.eigenvalue_type_translate, Some(3));
        assert!(cm_summary(6).is_err());
    }

    #[test]
    fn summary_round_trips() {
        let s = cm_summary(7).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains(r#""case":"2""#));
        assert_eq!(serde_json::from_str::<CmSummary>(&json).unwrap(), s);
    }
}
