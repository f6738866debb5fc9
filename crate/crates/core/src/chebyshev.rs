//! Monic Chebyshev polynomials `phi_d` (`phi_0 = 2`, `phi_1 = x`,
//! `phi_{d+1} = x phi_d - phi_{d-1}`) and the curve polynomials
//! `f_d(u) = (u + 2) phi_d(u)`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;

use crate::algebra::{laurent_compose, squarefree_over_q, Laurent, ZPoly};
use crate::error::{Error, Result};

/// Immutable table `phi_0, ..., phi_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevTable {
    polys: Vec<ZPoly>,
}

impl ChebyshevTable {
    pub fn new(max_d: usize) -> Self {
        let mut polys = vec![ZPoly::from_i64s(&[2]), ZPoly::x()];
        while polys.len() <= max_d {
            let n = polys.len();
            let next = &(&polys[n - 1] * &ZPoly::x()) - &polys[n - 2];
            polys.push(next);
        }
        polys.truncate(max_d + 1);
        Self { polys }
    }

    pub fn get(&self, d: usize) -> Option<&ZPoly> {
        self.polys.get(d)
    }

    pub fn max_index(&self) -> usize {
        self.polys.len() - 1
    }
}

fn cache() -> &'static RwLock<ChebyshevTable> {
    static CACHE: OnceLock<RwLock<ChebyshevTable>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(ChebyshevTable::new(64)))
}

/// `phi_d`, memoized for the lifetime of the process.
pub fn chebyshev(d: usize) -> ZPoly {
    if let Some(p) = cache().read().unwrap().get(d) {
        return p.clone();
    }
    let mut table = cache().write().unwrap();
    if table.max_index() < d {
        *table = ChebyshevTable::new(d.max(2 * table.max_index()));
    }
    table.get(d).cloned().expect("table extended past d")
}

/// `x^d + x^-d` (equal to the constant 2 for `d = 0`).
pub fn power_sum_laurent(d: usize) -> Laurent<BigInt> {
    let one = BigInt::from(1);
    Laurent::monomial(one.clone(), d as i64).add_ref(&Laurent::monomial(one, -(d as i64)))
}

/// Exact check of `phi_d(x + 1/x) = x^d + x^-d`.
pub fn verify_functional_equation(d: usize) -> bool {
    laurent_compose(&chebyshev(d)) == power_sum_laurent(d)
}

/// `f_d(u) = (u + 2) phi_d(u)`.
pub fn curve_polynomial(d: usize) -> ZPoly {
    &ZPoly::from_i64s(&[2, 1]) * &chebyshev(d)
}

/// Genus of `y^2 = f_d(x)`: `d/2` for even `d`, `(d - 1)/2` for odd `d`.
pub fn genus_of_cd(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidModel(format!("C_{d} has genus 0; d must be at least 2")));
    }
    let f = curve_polynomial(d);
    if !squarefree_over_q(&f)? {
        return Err(Error::InvalidModel(format!("(u + 2) phi_{d}(u) is not squarefree")));
    }
    // deg f = d + 1
    Ok(d / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn small_indices() {
        assert_eq!(chebyshev(0), ZPoly::from_i64s(&[2]));
        assert_eq!(chebyshev(1), ZPoly::x());
        assert_eq!(chebyshev(3), ZPoly::from_i64s(&[0, -3, 0, 1]));
        assert_eq!(chebyshev(4), ZPoly::from_i64s(&[2, 0, -4, 0, 1]));
    }

    #[test]
    fn memo_extends_past_initial_table() {
        let p = chebyshev(130);
        assert_eq!(p.degree(), Some(130));
        assert_eq!(chebyshev(130), ChebyshevTable::new(130).get(130).unwrap().clone());
    }

    #[test]
    fn degree_parity_and_value_at_two() {
        for d in 0..=64usize {
            let p = chebyshev(d);
            if d >= 1 {
                assert_eq!(p.degree(), Some(d));
                assert_eq!(p.leading(), Some(&BigInt::from(1)));
            }
            // phi_d(-x) = (-1)^d phi_d(x): odd (resp. even) coefficients vanish
            assert!(p.coeffs().iter().enumerate().all(|(i, c)| (i + d) % 2 == 0 || c.is_zero()));
            assert_eq!(p.eval_i64(2), BigInt::from(2));
        }
    }

    #[test]
    fn functional_equation_holds() {
        assert!(verify_functional_equation(0));
        assert!(verify_functional_equation(2));
        assert!((0..=64).all(verify_functional_equation));
    }

    #[test]
    fn curve_polynomials() {
        assert_eq!(curve_polynomial(1), ZPoly::from_i64s(&[0, 2, 1]));
        assert_eq!(curve_polynomial(2), ZPoly::from_i64s(&[-4, -2, 2, 1]));
        assert_eq!(curve_polynomial(3), ZPoly::from_i64s(&[0, -6, -3, 2, 1]));
    }

    #[test]
    fn genus_values() {
        assert_eq!(genus_of_cd(2).unwrap(), 1);
        assert_eq!(genus_of_cd(8).unwrap(), 4);
        assert_eq!(genus_of_cd(7).unwrap(), 3);
        assert!(genus_of_cd(1).is_err());
    }

    #[test]
    fn theorem_range_is_squarefree() {
        let ds = [2usize, 4, 8, 16, 32, 64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];
        for d in ds {
            assert!(squarefree_over_q(&curve_polynomial(d)).unwrap(), "d = {d}");
        }
    }
}
