//! Exact construction and verification of graded Roby (generalized Clifford)
//! modules, characteristic morphisms of finite free algebras, and the
//! line-restriction pipeline that produces filtered pseudomorphisms.
//!
//! Everything is exact: scalars live in cyclotomic fields `Q(ζ_e)` and every
//! identity is checked as a polynomial-matrix equality with symbolic
//! coefficients, never by sampling.

pub mod error;
pub mod freealg;
pub mod linegeom;
pub mod pipeline;
pub mod poly;
pub mod report;
pub mod roby;
pub mod scalar;
pub mod specfile;
pub mod surfnum;

pub use error::{AlgebraError, LineError, PolyError, RobyError, ScalarError};
pub use freealg::{CharPoly, FreeAlgebra};
pub use poly::{HomForm, Monomial, Poly, PolyMatrix, Var};
pub use scalar::CycScalar;
