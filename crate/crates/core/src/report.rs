//! Claim registry and JSON verification reports.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{genus_of_cd, verify_functional_equation};
use crate::cm::sum_criterion;
use crate::curves::{cm_summary, dihedral_relation_case1, make_cd, quotient_action, quotient_identity, Case};
use crate::cyclotomic::{eta, kd_degree_check, stabilizer};
use crate::error::{Error, Result};
use crate::residue::{
    kd_galois_structure, kd_is_cm, kd_kernel, kd_kernel_from_congruences, proper_subfields_totally_real,
};
use crate::zeta::{good_reduction, zeta_row, ZetaRow, DEFAULT_CAP};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `(claim id, statement)` in report order.
pub const CLAIMS: &[(&str, &str)] = &[
    ("chebyshev-functional-equation", "phi_k(x + 1/x) = x^k + x^-k for 0 <= k <= d"),
    ("quotient-identity", "C_d is the quotient of the cover by the involution: v^2 = (u + 2) phi_d(u)"),
    ("cm-field-is-cm", "K_n is a CM field for n >= 3"),
    ("cm-field-kernel", "Gal(K_n/Q) = (Z/nZ)^x / <-1 + n/2> when 4 | n, and K_n = Q(zeta_n) otherwise"),
    ("cm-field-degree", "[K_n : Q] = phi(n) / |kernel|"),
    ("cm-field-cyclic", "Gal(K_{2^e}/Q) is cyclic of order 2^{e-2}, generated by the image of 5"),
    ("cm-field-subfields-real", "every proper subfield of K_{2^e} is totally real"),
    ("cm-criterion", "phi(4d) = 2d for d = 2^e; phi(d) = d - 1 for d = p prime"),
    ("eigenvalues", "zeta - zeta^-1 acts diagonally on invariant differentials with eigenvalues zeta_n^k - zeta_n^-k"),
    ("dihedral-relation", "tau zeta tau = zeta^{2d-1} on X_d"),
    ("cm-type-valid", "S contains one element of each pair {g, -g}"),
    ("cm-type-primitive", "the CM type S has trivial stabilizer and is not induced from a proper CM subfield"),
    ("cm-type-eigenvalues", "the type read off from the eigenvalues is a translate of S"),
    ("sum-criterion", "sum_{i <= (p-1)/2} i = (p^2 - 1)/8 is a unit mod p"),
    ("degree-equals-twice-genus", "[K : Q] = 2 g(C_d)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub claim_id: String,
    pub anchor: String,
    pub status: Status,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool_version: String,
    pub d: u64,
    pub case: Case,
    pub claims: Vec<ClaimRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.status != Status::Fail)
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimRecord> {
        self.claims.iter().find(|c| c.claim_id == id)
    }

    pub fn table(&self) -> String {
        let width = CLAIMS.iter().map(|(id, _)| id.len()).max().unwrap_or(0);
        let mut out = format!("d = {} (case {})\n", self.d, self.case.number());
        for c in &self.claims {
            out.push_str(&format!("  {:<width$}  {:<4}  {}\n", c.claim_id, c.status.to_string(), c.details));
        }
        out
    }
}

type Outcome = (Status, String);

fn verdict(ok: bool, details: impl Into<String>) -> Outcome {
    (if ok { Status::Pass } else { Status::Fail }, details.into())
}

fn skip(details: &str) -> Outcome {
    (Status::Skip, details.to_string())
}

fn from_result(r: Result<Outcome>) -> Outcome {
    r.unwrap_or_else(|e| (Status::Fail, e.to_string()))
}

fn check_claim(id: &str, d: u64, case: Case) -> Result<Outcome> {
    let du = d as usize;
    let n = case.conductor(d);
    Ok(match id {
        "chebyshev-functional-equation" => {
            let bad: Vec<usize> = (0..=du).filter(|&k| !verify_functional_equation(k)).collect();
            verdict(bad.is_empty(), format!("k = 0..={d}, failures {bad:?}"))
        }
        "quotient-identity" => verdict(quotient_identity(du, case)?, format!("exact Laurent identity in x for d = {d}")),
        "cm-field-is-cm" => verdict(kd_is_cm(n), format!("n = {n}")),
        "cm-field-kernel" => {
            let mut k = kd_kernel(n).elements().to_vec();
            k.sort_unstable();
            let ok = k == kd_kernel_from_congruences(n) && k == stabilizer(&eta(n));
            verdict(ok, format!("n = {n}, kernel {k:?}"))
        }
        "cm-field-degree" => verdict(kd_degree_check(n), format!("n = {n}")),
        "cm-field-cyclic" => match case {
            Case::PowerOfTwo if n >= 8 => {
                let e = n.trailing_zeros();
                let (_, cert) = kd_galois_structure(n)?;
                let ok = cert.is_cyclic()
                    && cert.quotient_order == 1 << (e - 2)
                    && cert.involutions == vec![cert.conjugation];
                verdict(ok, format!("order {}, generator {} of order {}", cert.quotient_order, cert.generator, cert.generator_order))
            }
            _ => skip("only for n = 2^e"),
        },
        "cm-field-subfields-real" => match case {
            Case::PowerOfTwo => {
                let e = n.trailing_zeros();
                verdict(proper_subfields_totally_real(e)?, format!("all subgroups of Gal(K_{n}/Q) enumerated"))
            }
            Case::OddPrime => skip("only for n = 2^e"),
        },
        "cm-criterion" => match Case::for_d(d) {
            Ok(c) if c == case => verdict(true, format!("criterion holds for d = {d}")),
            Ok(_) => verdict(false, "case mismatch"),
            Err(e) => verdict(false, e.to_string()),
        },
        "eigenvalues" => {
            let a = quotient_action(du, case)?;
            let text: Vec<String> = a.eigenvalues.iter().map(|e| e.to_string()).collect();
            verdict(
                a.all_pass(),
                format!("cover {}, invariant dimension {}, eigenvalues [{}]", a.cover, a.invariant_dimension, text.join(", ")),
            )
        }
        "dihedral-relation" => match case {
            Case::PowerOfTwo => verdict(dihedral_relation_case1(du)?, "maps and pullback matrices"),
            Case::OddPrime => skip("case 1 only"),
        },
        "cm-type-valid" | "cm-type-primitive" | "cm-type-eigenvalues" | "degree-equals-twice-genus" => {
            let s = cm_summary(d)?;
            match id {
                "cm-type-valid" => verdict(s.cm_type_valid, format!("S = {:?}", s.cm_type.s)),
                "cm-type-primitive" => verdict(
                    s.primitive && !s.induced_by_subgroup_scan,
                    format!("stabilizer trivial: {}, induced by subgroup scan: {}", s.primitive, s.induced_by_subgroup_scan),
                ),
                "cm-type-eigenvalues" => match s.eigenvalue_type_translate {
                    Some(g) => verdict(true, format!("eigenvalue type {:?} = {g} * S", s.eigenvalue_type.s)),
                    None => verdict(false, format!("eigenvalue type {:?} is not a translate of S", s.eigenvalue_type.s)),
                },
                _ => verdict(
                    s.degree_is_twice_genus,
                    format!("[K : Q] = {}, g = {}, K = Q[x]/({})", s.field_degree, s.genus, s.field_polynomial),
                ),
            }
        }
        "sum-criterion" => match case {
            Case::OddPrime => {
                let (sum, ok) = sum_criterion(d)?;
                verdict(ok, format!("sum = {sum} mod {d}"))
            }
            Case::PowerOfTwo => skip("case 2 only"),
        },
        other => return Err(Error::CheckFailed(format!("unknown claim {other}"))),
    })
}

/// Run every registered claim for one `d`. Values outside the theorem are
/// rejected with the failing criterion.
pub fn cmd_verify(d: u64) -> Result<VerificationReport> {
    let case = Case::for_d(d)?;
    genus_of_cd(d as usize)?;
    let claims = CLAIMS
        .par_iter()
        .map(|&(id, anchor)| {
            let (status, details) = from_result(check_claim(id, d, case));
            ClaimRecord { claim_id: id.to_string(), anchor: anchor.to_string(), status, details }
        })
        .collect();
    Ok(VerificationReport { tool_version: TOOL_VERSION.to_string(), d, case, claims })
}

/// `d <= dmax` covered by the theorem: powers of two and odd primes.
pub fn in_scope(dmax: u64) -> Vec<u64> {
    (2..=dmax).filter(|&d| Case::for_d(d).is_ok()).collect()
}

/// Largest `d` accepted by [`cmd_report`].
pub const REPORT_DMAX: u64 = 64;
/// Zeta rows are emitted for `C_d` of genus at most this.
pub const ZETA_MAX_GENUS: usize = 3;
/// Primes used for zeta rows.
pub const ZETA_PRIMES: &[u64] = &[3, 5, 7, 11, 13];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchReport {
    pub tool_version: String,
    pub dmax: u64,
    pub reports: Vec<VerificationReport>,
    pub zeta: Vec<ZetaRow>,
    pub warnings: Vec<String>,
}

impl BatchReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(VerificationReport::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::CheckFailed(format!("report JSON: {e}")))
    }
}

/// Verification reports for every in-scope `d <= dmax`, plus zeta rows for
/// the small-genus curves.
pub fn cmd_report(dmax: u64) -> Result<BatchReport> {
    if dmax > REPORT_DMAX {
        return Err(Error::OutOfScope(format!("dmax = {dmax} exceeds {REPORT_DMAX}")));
    }
    let ds = in_scope(dmax);
    let mut warnings = Vec::new();
    if ds.is_empty() {
        warnings.push(format!("no d in [2, {dmax}] is a power of two or an odd prime"));
    }
    let reports = ds.par_iter().map(|&d| cmd_verify(d)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(u64, u64)> = ds
        .iter()
        .filter(|&&d| genus_of_cd(d as usize).map(|g| g <= ZETA_MAX_GENUS).unwrap_or(false))
        .flat_map(|&d| ZETA_PRIMES.iter().map(move |&q| (d, q)))
        .collect();
    let zeta = jobs
        .par_iter()
        .filter_map(|&(d, q)| {
            let c = make_cd(d as usize).ok()?;
            good_reduction(&c, q).then(|| zeta_row(&c, q, DEFAULT_CAP))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchReport { tool_version: TOOL_VERSION.to_string(), dmax, reports, zeta, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique() {
        let mut ids: Vec<&str> = CLAIMS.iter().map(|(id, _)| *id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), CLAIMS.len());
    }

    #[test]
    fn verify_small_cases() {
        for d in [2u64, 3, 4, 5, 8] {
            let r = cmd_verify(d).unwrap();
            assert!(r.passed(), "{}", r.table());
            assert_eq!(r.claims.len(), CLAIMS.len());
            for (rec, (id, _)) in r.claims.iter().zip(CLAIMS) {
                assert_eq!(rec.claim_id, *id);
            }
        }
        let r3 = cmd_verify(3).unwrap();
        assert_eq!(r3.claim("dihedral-relation").unwrap().status, Status::Skip);
        assert_eq!(r3.claim("sum-criterion").unwrap().status, Status::Pass);
        let r8 = cmd_verify(8).unwrap();
        assert_eq!(r8.claim("cm-field-cyclic").unwrap().status, Status::Pass);
    }

    #[test]
    fn out_of_theorem_values() {
        let msg = cmd_verify(6).unwrap_err().to_string();
        assert!(msg.contains("φ(4d) ≠ 2d"), "{msg}");
        assert!(cmd_verify(9).is_err());
        assert!(cmd_verify(1).is_err());
    }

    #[test]
    fn scope_list() {
        assert_eq!(in_scope(16), vec![2, 3, 4, 5, 7, 8, 11, 13, 16]);
        assert!(in_scope(1).is_empty());
    }

    #[test]
    fn empty_batch_warns() {
        let b = cmd_report(1).unwrap();
        assert!(b.reports.is_empty() && b.passed());
        assert_eq!(b.warnings.len(), 1);
        assert!(cmd_report(65).is_err());
    }

    #[test]
    fn batch_round_trips() {
        let b = cmd_report(5).unwrap();
        assert_eq!(b.reports.iter().map(|r| r.d).collect::<Vec<_>>(), vec![2, 3, 4, 5]);
        assert!(b.zeta.iter().any(|z| z.curve == "C_2" && z.p == 3));
        assert_eq!(BatchReport::from_json(&b.to_json()).unwrap(), b);
        let json = b.to_json();
        assert!(json.find("\"tool_version\"").unwrap() < json.find("\"reports\"").unwrap());
    }
}
