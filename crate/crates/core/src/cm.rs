//! CM types as half-systems in quotients of `(Z/nZ)^x`, their stabilizers,
//! and primitivity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::is_prime;
use crate::error::{Error, Result};
use crate::residue::{subgroup_generated, QuotientGroup, Subgroup};

/// Galois group of an abelian CM field, `(Z/nZ)^x / kernel`, together with
/// the coset of complex conjugation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmGroup {
    quotient: QuotientGroup,
    conj: usize,
}

impl CmGroup {
    /// Fails when `-1` lies in the kernel (the fixed field is not CM).
    pub fn new(kernel: Subgroup) -> Result<Self> {
        let n = kernel.modulus();
        if n < 3 {
            return Err(Error::OutOfScope(format!("Q(zeta_{n}) has no CM subfield")));
        }
        let quotient = QuotientGroup::new(kernel);
        let conj = quotient.index_of(n - 1)?;
        if conj == quotient.identity_index() {
            return Err(Error::CheckFailed(format!("-1 lies in the kernel mod {n}")));
        }
        Ok(Self { quotient, conj })
    }

    pub fn quotient(&self) -> &QuotientGroup {
        &self.quotient
    }

    pub fn modulus(&self) -> u64 {
        self.quotient.modulus()
    }

    pub fn order(&self) -> usize {
        self.quotient.order()
    }

    /// Canonical representative of complex conjugation.
    pub fn conjugation(&self) -> u64 {
        self.quotient.representatives()[self.conj]
    }
}

/// A subset `S` of the quotient, stored as canonical coset representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmType {
    group: CmGroup,
    /// Sorted coset indices.
    indices: Vec<usize>,
}

impl CmType {
    pub fn new(group: CmGroup, residues: &[u64]) -> Result<Self> {
        let mut indices = residues
            .iter()
            .map(|&a| group.quotient.index_of(a))
            .collect::<Result<Vec<_>>>()?;
        indices.sort_unstable();
        indices.dedup();
        Ok(Self { group, indices })
    }

    pub fn group(&self) -> &CmGroup {
        &self.group
    }

    /// `S` as sorted canonical representatives.
    pub fn residues(&self) -> Vec<u64> {
        let reps = self.group.quotient.representatives();
        let mut out: Vec<u64> = self.indices.iter().map(|&i| reps[i]).collect();
        out.sort_unstable();
        out
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn membership(&self) -> Vec<bool> {
        let mut m = vec![false; self.group.order()];
        self.indices.iter().for_each(|&i| m[i] = true);
        m
    }

    /// Exactly one element from each pair `{g, conj g}`.
    pub fn is_valid(&self) -> bool {
        let q = &self.group.quotient;
        let member = self.membership();
        2 * self.indices.len() == q.order()
            && self.indices.iter().all(|&i| !member[q.mul_index(self.group.conj, i)])
    }

    /// The translate `g S`.
    pub fn translate(&self, g: u64) -> Result<Self> {
        let q = &self.group.quotient;
        let gi = q.index_of(g)?;
        let mut indices: Vec<usize> = self.indices.iter().map(|&i| q.mul_index(gi, i)).collect();
        indices.sort_unstable();
        Ok(Self { group: self.group.clone(), indices })
    }

    /// `{g : g S = S}` as sorted canonical representatives.
    pub fn stabilizer(&self) -> Vec<u64> {
        let q = &self.group.quotient;
        let member = self.membership();
        (0..q.order())
            .filter(|&g| self.indices.iter().all(|&i| member[q.mul_index(g, i)]))
            .map(|g| q.representatives()[g])
            .collect()
    }

    /// Primitive iff the stabilizer is trivial.
    pub fn is_primitive(&self) -> bool {
        self.stabilizer().len() == 1
    }

    /// Whether `S` is a union of cosets of some nontrivial subgroup, found by
    /// enumerating every subgroup of the quotient.
    pub fn induced_oracle(&self) -> Result<bool> {
        let q = &self.group.quotient;
        let member = self.membership();
        let subgroups = q.all_subgroups()?;
        Ok(subgroups.par_iter().filter(|h| h.len() > 1).any(|h| {
            self.indices.iter().all(|&s| h.iter().all(|&x| member[q.mul_index(x, s)]))
        }))
    }

    pub fn record(&self) -> CmTypeRecord {
        CmTypeRecord {
            n: self.group.modulus(),
            kernel_generators: self.group.quotient.kernel().generators().to_vec(),
            s: self.residues(),
        }
    }
}

/// Serialized form of a CM type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmTypeRecord {
    pub n: u64,
    pub kernel_generators: Vec<u64>,
    #[serde(rename = "S")]
    pub s: Vec<u64>,
}

/// `{1, 3, ..., 2^e - 1}` in `(Z/2^{e+2})^x / <2^{e+1} - 1>`.
pub fn cm_type_case1(e: u32) -> Result<CmType> {
    if e == 0 || e > 40 {
        return Err(Error::OutOfScope(format!("e = {e}")));
    }
    let n = 1u64 << (e + 2);
    let kernel = subgroup_generated(n, &[(1u64 << (e + 1)) - 1])?;
    let s: Vec<u64> = (1..(1u64 << e)).step_by(2).collect();
    CmType::new(CmGroup::new(kernel)?, &s)
}

/// `{1, 2, ..., (p - 1)/2}` in `(Z/pZ)^x`.
pub fn cm_type_case2(p: u64) -> Result<CmType> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let s: Vec<u64> = (1..=(p - 1) / 2).collect();
    CmType::new(CmGroup::new(Subgroup::trivial(p))?, &s)
}

/// `sum_{i=1}^{(p-1)/2} i mod p`, and whether it equals `(p^2 - 1)/8 mod p`
/// and is nonzero.
pub fn sum_criterion(p: u64) -> Result<(u64, bool)> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let h = (p - 1) / 2;
    let sum = (h as u128 * (h as u128 + 1) / 2 % p as u128) as u64;
    let closed = ((p as u128 * p as u128 - 1) / 8 % p as u128) as u64;
    Ok((sum, sum == closed && sum != 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::odd_primes;
    use crate::residue::kd_kernel;
    use proptest::prelude::*;

    fn case2_group(p: u64) -> CmGroup {
        CmGroup::new(Subgroup::trivial(p)).unwrap()
    }

    /// Union of the cosets `rep * H` over `reps`.
    fn coset_union(n: u64, h: &[u64], reps: &[u64]) -> Vec<u64> {
        reps.iter().flat_map(|&r| h.iter().map(move |&x| r * x % n)).collect()
    }

    #[test]
    fn validity_examples() {
        assert!(CmType::new(case2_group(5), &[1, 2]).unwrap().is_valid());
        assert!(!CmType::new(case2_group(5), &[1, 4]).unwrap().is_valid());
        let t = cm_type_case1(1).unwrap();
        assert_eq!(t.residues(), vec![1]);
        assert_eq!(t.group().order(), 2);
        assert!(t.is_valid());
        assert!(CmGroup::new(subgroup_generated(8, &[7]).unwrap()).is_err());
    }

    #[test]
    fn explicit_types() {
        assert_eq!(cm_type_case1(2).unwrap().residues(), vec![1, 3]);
        assert_eq!(cm_type_case1(2).unwrap().group().modulus(), 16);
        let t3 = cm_type_case1(3).unwrap();
        assert_eq!(t3.residues(), vec![1, 3, 5, 7]);
        assert_eq!(t3.len(), 4);
        assert_eq!(cm_type_case2(3).unwrap().residues(), vec![1]);
        assert_eq!(cm_type_case2(7).unwrap().residues(), vec![1, 2, 3]);
        assert_eq!(cm_type_case2(11).unwrap().residues(), vec![1, 2, 3, 4, 5]);
        assert!(cm_type_case2(9).is_err());
    }

    #[test]
    fn stabilizers_and_primitivity() {
        assert_eq!(cm_type_case2(7).unwrap().stabilizer(), vec![1]);
        assert!(cm_type_case2(5).unwrap().is_primitive());
        assert_eq!(cm_type_case1(3).unwrap().stabilizer(), vec![1]);
        assert!(cm_type_case1(2).unwrap().is_primitive());
        assert!(!cm_type_case2(13).unwrap().induced_oracle().unwrap());
        assert!(!cm_type_case2(3).unwrap().induced_oracle().unwrap());
    }

    #[test]
    fn synthetic_induced_type() {
        // (Z/13)^x has the order-3 subgroup {1, 3, 9}; its four cosets pair
        // up under -1 as {1,3,9}<->{12,10,4} and {2,6,5}<->{11,7,8}.
        let h = [1u64, 3, 9];
        let s = coset_union(13, &h, &[1, 2]);
        let t = CmType::new(case2_group(13), &s).unwrap();
        assert!(t.is_valid());
        assert_eq!(t.stabilizer(), vec![1, 3, 9]);
        assert!(!t.is_primitive());
        assert!(t.induced_oracle().unwrap());
    }

    #[test]
    fn sums() {
        assert_eq!(sum_criterion(5).unwrap(), (3, true));
        assert_eq!(sum_criterion(7).unwrap(), (6, true));
        assert_eq!(sum_criterion(3).unwrap(), (1, true));
        assert!(odd_primes(3, 199).into_iter().all(|p| sum_criterion(p).unwrap().1));
    }

    #[test]
    fn every_case1_subgroup_contains_conjugation() {
        for e in 1..=8u32 {
            let t = cm_type_case1(e).unwrap();
            let q = t.group().quotient();
            let conj = q.index_of(q.modulus() - 1).unwrap();
            for h in q.all_subgroups().unwrap().iter().filter(|h| h.len() > 1) {
                assert!(h.contains(&conj), "e = {e}");
            }
            assert_eq!(q.kernel(), &kd_kernel(1 << (e + 2)));
        }
    }

    #[test]
    fn record_serializes() {
        let r = cm_type_case1(2).unwrap().record();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"n":16,"kernel_generators":[7],"S":[1,3]}"#);
        assert_eq!(serde_json::from_str::<CmTypeRecord>(&json).unwrap(), r);
    }

    proptest! {
        #[test]
        fn translates_share_stabilizer(p in prop::sample::select(odd_primes(5, 61)), g in 1u64..1000) {
            let g = 1 + g % (p - 1);
            let t = cm_type_case2(p).unwrap();
            let moved = t.translate(g).unwrap();
            prop_assert!(moved.is_valid());
            prop_assert_eq!(moved.stabilizer(), t.stabilizer());
        }

        #[test]
        fn oracle_matches_stabilizer_on_random_types(p in prop::sample::select(vec![7u64, 11, 13, 17, 19]), bits in any::<u32>()) {
            let half: Vec<u64> = (1..=(p - 1) / 2).map(|a| if bits >> a & 1 == 1 { p - a } else { a }).collect();
            let t = CmType::new(case2_group(p), &half).unwrap();
            prop_assert!(t.is_valid());
            prop_assert_eq!(t.induced_oracle().unwrap(), !t.is_primitive());
        }
    }
}
