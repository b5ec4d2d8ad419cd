//! Polynomial engines: exact big-rational arithmetic for constructing the
//! likelihood-equation polynomials, and complex-double evaluation plus
//! simultaneous root finding for extracting their roots.

pub mod aberth;
pub mod cpoly;
pub mod poly;

pub use aberth::{aberth_roots, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use cpoly::ComplexPoly;
pub use poly::{compose_rational, parse_rational, poly_gcd, RationalPoly};
