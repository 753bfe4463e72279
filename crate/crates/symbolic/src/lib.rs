//! Exact symbolic calculus for derivatives on the symmetrized bidisk.
//!
//! Coefficients are Gaussian rationals; nothing here uses floating point
//! except the explicit `eval_c64` helpers.

pub mod error;
pub mod expansion;
pub mod poly;
pub mod tangential;

pub use error::SymbolicError;
pub use expansion::{
    apply_expansion, apply_zop, compose_with_dz, direct_dz, dwbar_expansion, dz_expansion, DiffOpExpansion, RationalFn,
    ZOpExpansion,
};
pub use poly::{BivarPoly, Coeff, MixedPoly, Poly};
pub use tangential::{lemma32_report, stirling_identity_check, tangential_apply, EtaPoly, Lemma32Row};
