//! Explicit computation in `(Z/nZ)^x`: subgroups, quotients, element
//! orders, and the subgroup attached to `K_n = Q(zeta_n - zeta_n^-1)`.
//!
//! All functions take the cyclotomic index `n` directly. Callers working
//! with the curve index `d` translate (`n = 4d` for powers of two,
//! `n = 2d` or `n = d` for odd primes).

use std::collections::HashSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group handed to full subgroup enumeration.
pub const MAX_ENUMERATED_ORDER: usize = 1 << 12;
/// Bail out once this many subgroups have been found.
pub const MAX_SUBGROUPS: usize = 100_000;

/// `(Z/nZ)^x` as a sorted list of residues.
///
/// For `n = 1` the trivial group is represented as `{0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    n: u64,
    elements: Vec<u64>,
}

impl UnitGroup {
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, a: u64) -> bool {
        self.elements.binary_search(&(a % self.n)).is_ok()
    }

    pub fn identity(&self) -> u64 {
        1 % self.n
    }
}

pub fn unit_group(n: u64) -> UnitGroup {
    assert!(n >= 1, "modulus must be positive");
    if n == 1 {
        return UnitGroup { n, elements: vec![0] };
    }
    let elements = (1..n).filter(|a| a.gcd(&n) == 1).collect();
    UnitGroup { n, elements }
}

/// Prime factorization by trial division, ascending, with multiplicities.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient from the factorization of `n`.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// A subgroup of `(Z/nZ)^x`, enumerated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    n: u64,
    generators: Vec<u64>,
    elements: Vec<u64>,
}

impl Subgroup {
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Sorted elements.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, a: u64) -> bool {
        self.elements.binary_search(&(a % self.n)).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn trivial(n: u64) -> Self {
        Self { n, generators: Vec::new(), elements: vec![1 % n] }
    }
}

fn check_unit(n: u64, a: u64) -> Result<u64> {
    let r = a % n;
    if n > 1 && r.gcd(&n) != 1 {
        return Err(Error::NotAUnit { a, n });
    }
    Ok(r)
}

/// Closure of `gens` under multiplication modulo `n` (breadth first).
pub fn subgroup_generated(n: u64, gens: &[u64]) -> Result<Subgroup> {
    let gens: Vec<u64> = gens.iter().map(|&g| check_unit(n, g)).collect::<Result<_>>()?;
    let mut seen: HashSet<u64> = HashSet::from([1 % n]);
    let mut frontier = vec![1 % n];
    while let Some(x) = frontier.pop() {
        for &g in &gens {
            let y = x * g % n;
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    let mut elements: Vec<u64> = seen.into_iter().collect();
    elements.sort_unstable();
    Ok(Subgroup { n, generators: gens, elements })
}

/// Least `k >= 1` with `a^k = 1 (mod n)`.
pub fn element_order(n: u64, a: u64) -> Result<u64> {
    let a = check_unit(n, a)?;
    let one = 1 % n;
    let mut x = a;
    let mut k = 1;
    while x != one {
        x = x * a % n;
        k += 1;
    }
    Ok(k)
}

/// The subgroup of `(Z/nZ)^x` fixing `zeta_n - zeta_n^-1`: generated by
/// `-1 + n/2` when `4 | n`, trivial otherwise.
pub fn kd_kernel(n: u64) -> Subgroup {
    if n % 4 == 0 {
        subgroup_generated(n, &[n / 2 - 1]).expect("n/2 - 1 is odd and coprime to n when 4 | n")
    } else {
        Subgroup::trivial(n)
    }
}

/// The same subgroup found by scanning units `a` for which
/// `sin(2 pi / n) = sin(2 pi a / n)`, i.e. `a = 1 (mod n)` or
/// `2 = n - 2a (mod 2n)`.
pub fn kd_kernel_from_congruences(n: u64) -> Vec<u64> {
    let two_n = 2 * n as i64;
    unit_group(n)
        .elements()
        .iter()
        .copied()
        .filter(|&a| {
            let a_i = a as i64;
            a % n == 1 % n || (2 - (n as i64 - 2 * a_i)).rem_euclid(two_n) == 0
        })
        .collect()
}

/// `K_n` is a CM field: `n >= 3` and complex conjugation `-1` is not in the kernel.
pub fn kd_is_cm(n: u64) -> bool {
    n >= 3 && !kd_kernel(n).contains(n - 1)
}

/// `(Z/nZ)^x / H` with the smallest residue of each coset as representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGroup {
    n: u64,
    kernel: Subgroup,
    reps: Vec<u64>,
    /// Coset index of each residue; `u32::MAX` for non-units.
    coset_of: Vec<u32>,
}

impl QuotientGroup {
    pub fn new(kernel: Subgroup) -> Self {
        let n = kernel.n;
        let mut coset_of = vec![u32::MAX; n as usize];
        let mut reps = Vec::new();
        for &a in unit_group(n).elements() {
            if coset_of[a as usize] != u32::MAX {
                continue;
            }
            let idx = reps.len() as u32;
            reps.push(a);
            for &h in kernel.elements() {
                coset_of[(a * h % n) as usize] = idx;
            }
        }
        Self { n, kernel, reps, coset_of }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    /// Canonical coset representatives, ascending.
    pub fn representatives(&self) -> &[u64] {
        &self.reps
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    /// Canonical representative of the coset of `a`.
    pub fn canonical(&self, a: u64) -> Result<u64> {
        let r = check_unit(self.n, a)?;
        Ok(self.reps[self.coset_of[r as usize] as usize])
    }

    pub fn index_of(&self, a: u64) -> Result<usize> {
        let r = check_unit(self.n, a)?;
        Ok(self.coset_of[r as usize] as usize)
    }

    #[inline]
    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        self.coset_of[(self.reps[i] * self.reps[j] % self.n) as usize] as usize
    }

    pub fn identity_index(&self) -> usize {
        self.coset_of[(1 % self.n) as usize] as usize
    }

    /// Order of a coset in the quotient.
    pub fn order_of(&self, a: u64) -> Result<usize> {
        let i = self.index_of(a)?;
        let id = self.identity_index();
        let mut x = i;
        let mut k = 1;
        while x != id {
            x = self.mul_index(x, i);
            k += 1;
        }
        Ok(k)
    }

    /// Cyclic subgroup generated by coset index `i`, as a sorted index list.
    pub fn cyclic_subgroup(&self, i: usize) -> Vec<usize> {
        let id = self.identity_index();
        let mut out = vec![id];
        let mut x = i;
        while x != id {
            out.push(x);
            x = self.mul_index(x, i);
        }
        out.sort_unstable();
        out
    }

    /// Every subgroup of the quotient, as sorted coset-index lists.
    ///
    /// Built by repeatedly joining known subgroups with cyclic subgroups
    /// until nothing new appears.
    pub fn all_subgroups(&self) -> Result<Vec<Vec<usize>>> {
        let order = self.order();
        if order > MAX_ENUMERATED_ORDER {
            return Err(Error::GroupTooLarge(order));
        }
        let cyclics: Vec<Vec<usize>> = {
            let mut set: HashSet<Vec<usize>> = HashSet::new();
            for i in 0..order {
                set.insert(self.cyclic_subgroup(i));
            }
            set.into_iter().collect()
        };
        let trivial = vec![self.identity_index()];
        let mut found: HashSet<Vec<usize>> = HashSet::from([trivial.clone()]);
        let mut queue = vec![trivial];
        while let Some(h) = queue.pop() {
            let member: Vec<bool> = {
                let mut m = vec![false; order];
                h.iter().for_each(|&i| m[i] = true);
                m
            };
            for c in &cyclics {
                if c.iter().all(|&i| member[i]) {
                    continue;
                }
                let mut joined: Vec<usize> = {
                    let mut m = vec![false; order];
                    for &a in &h {
                        for &b in c {
                            m[self.mul_index(a, b)] = true;
                        }
                    }
                    (0..order).filter(|&i| m[i]).collect()
                };
                joined.sort_unstable();
                if found.insert(joined.clone()) {
                    if found.len() > MAX_SUBGROUPS {
                        return Err(Error::GroupTooLarge(order));
                    }
                    queue.push(joined);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(out)
    }
}

/// Certificate that `Gal(K_n / Q)` is cyclic for `n = 2^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicCertificate {
    pub quotient_order: usize,
    /// Canonical representative of the image of 5.
    pub generator: u64,
    pub generator_order: usize,
    /// Canonical representative of the image of -1.
    pub conjugation: u64,
    /// All order-2 elements of the quotient.
    pub involutions: Vec<u64>,
}

impl CyclicCertificate {
    pub fn is_cyclic(&self) -> bool {
        self.generator_order == self.quotient_order
    }
}

/// `(Z/nZ)^x / kd_kernel(n)` for `n = 2^e`, `e >= 3`, with the image of 5
/// exhibited as a generator.
pub fn kd_galois_structure(n: u64) -> Result<(QuotientGroup, CyclicCertificate)> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::OutOfScope(format!("{n} is not 2^e with e >= 3")));
    }
    let q = QuotientGroup::new(kd_kernel(n));
    let generator = q.canonical(5)?;
    let generator_order = q.order_of(5)?;
    let involutions = q
        .representatives()
        .iter()
        .copied()
        .filter(|&r| q.order_of(r).ok() == Some(2))
        .collect();
    let cert = CyclicCertificate {
        quotient_order: q.order(),
        generator,
        generator_order,
        conjugation: q.canonical(n - 1)?,
        involutions,
    };
    Ok((q, cert))
}

/// Every nontrivial subgroup of `Gal(K_{2^e} / Q)` contains complex
/// conjugation, so every proper subfield of `K_{2^e}` is totally real.
/// Checked by full subgroup enumeration.
pub fn proper_subfields_totally_real(e: u32) -> Result<bool> {
    assert!(e >= 1);
    let n = 1u64 << e;
    let q = QuotientGroup::new(kd_kernel(n));
    let conj = q.index_of(n - 1)?;
    let id = q.identity_index();
    Ok(q
        .all_subgroups()?
        .iter()
        .filter(|h| h.len() > 1)
        .all(|h| h.contains(&conj) && conj != id))
}

/// `phi(4d) = 2d`: the CM criterion for the curves built from `X_d`.
pub fn case1_cm_criterion(d: u64) -> bool {
    assert!(d >= 2 && d % 2 == 0, "case 1 needs even d >= 2");
    euler_phi(4 * d) == 2 * d
}

/// `phi(d) = d - 1`: the CM criterion for the curves built from `D_{2d}`.
pub fn case2_cm_criterion(d: u64) -> bool {
    assert!(d >= 3 && d % 2 == 1, "case 2 needs odd d >= 3");
    euler_phi(d) == d - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_groups() {
        assert_eq!(unit_group(8).elements(), &[1, 3, 5, 7]);
        assert_eq!(unit_group(16).order(), 8);
        assert_eq!(unit_group(1).elements(), &[0]);
        assert_eq!(unit_group(1).identity(), 0);
    }

    #[test]
    fn totients() {
        assert_eq!(euler_phi(32), 16);
        assert_eq!(euler_phi(7), 6);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(24), 8);
        for n in 1..500u64 {
            assert_eq!(euler_phi(n), unit_group(n).order() as u64);
        }
    }

    #[test]
    fn generated_subgroups() {
        assert_eq!(subgroup_generated(16, &[7]).unwrap().elements(), &[1, 7]);
        assert_eq!(subgroup_generated(8, &[3]).unwrap().elements(), &[1, 3]);
        assert_eq!(subgroup_generated(5, &[1]).unwrap().elements(), &[1]);
        assert_eq!(subgroup_generated(8, &[2]).unwrap_err(), Error::NotAUnit { a: 2, n: 8 });
    }

    #[test]
    fn orders() {
        assert_eq!(element_order(32, 5).unwrap(), 8);
        assert_eq!(element_order(11, 1).unwrap(), 1);
        assert_eq!(element_order(16, 7).unwrap(), 2);
        assert!(element_order(16, 4).is_err());
    }

    #[test]
    fn kernel_cases() {
        assert!(kd_kernel(4).is_trivial());
        assert!(kd_kernel(6).is_trivial());
        assert_eq!(kd_kernel(16).elements(), &[1, 7]);
        for n in 3..=512 {
            assert_eq!(kd_kernel(n).elements(), kd_kernel_from_congruences(n).as_slice(), "n = {n}");
        }
    }

    #[test]
    fn cm_fields() {
        assert!(!kd_is_cm(1) && !kd_is_cm(2));
        assert!(kd_is_cm(3) && kd_is_cm(8));
    }

    #[test]
    fn galois_structure() {
        for (e, order) in [(3u32, 2usize), (4, 4), (5, 8)] {
            let (_, cert) = kd_galois_structure(1 << e).unwrap();
            assert_eq!(cert.quotient_order, order);
            assert!(cert.is_cyclic());
            assert_eq!(cert.involutions, vec![cert.conjugation]);
        }
        assert!(kd_galois_structure(12).is_err());
        assert!(kd_galois_structure(4).is_err());
    }

    #[test]
    fn quotient_cosets() {
        let q = QuotientGroup::new(kd_kernel(16));
        assert_eq!(q.representatives(), &[1, 3, 9, 11]);
        assert_eq!(q.canonical(13).unwrap(), 11);
        assert_eq!(q.canonical(5).unwrap(), 3);
    }

    #[test]
    fn subgroup_enumeration_counts() {
        // (Z/15Z)^x = Z/2 x Z/4 has 8 subgroups
        let q = QuotientGroup::new(Subgroup::trivial(15));
        assert_eq!(q.all_subgroups().unwrap().len(), 8);
        // (Z/24Z)^x = (Z/2)^3 has 16 subgroups
        let q = QuotientGroup::new(Subgroup::trivial(24));
        assert_eq!(q.all_subgroups().unwrap().len(), 16);
        // cyclic of order 16 has 5
        let q = QuotientGroup::new(kd_kernel(64));
        assert_eq!(q.all_subgroups().unwrap().len(), 5);
    }

    #[test]
    fn subfields() {
        assert!(proper_subfields_totally_real(1).unwrap());
        assert!(proper_subfields_totally_real(2).unwrap());
        assert!(proper_subfields_totally_real(3).unwrap());
        assert!(proper_subfields_totally_real(6).unwrap());
    }

    #[test]
    fn criteria() {
        assert!(case1_cm_criterion(8));
        assert!(!case1_cm_criterion(6));
        assert!(case1_cm_criterion(2));
        assert!(case2_cm_criterion(7));
        assert!(!case2_cm_criterion(9));
        assert!(case2_cm_criterion(3));
    }
}
