//! Exact arithmetic substrate: integers, rationals, polynomials, Laurent
//! polynomials, prime fields and their small extensions.

pub mod fp;
pub mod gf;
pub mod laurent;
pub mod poly;
pub mod ring;

pub use fp::{is_prime, odd_primes, Fp};
pub use gf::{field_tower, GfContext, GfElement};
pub use laurent::{laurent_compose, Laurent};
pub use poly::{poly_arith, primitive_part, squarefree, squarefree_over_q, Poly, PolyArith, PolyOp, QPoly, ZPoly};
pub use ring::Ring;

/// Arbitrary-precision rational, always stored reduced with positive denominator.
pub type ExactRational = num_rational::BigRational;
