//! Default numerical tolerances, in one place.
//!
//! These are sized for double precision with Fock cutoffs up to ~300.

/// Allowed deviation of a normalized state's squared norm from 1.
pub const NORM_TOL: f64 = 1e-10;

/// Allowed max-entry deviation of `M†M` from the identity on the interior
/// block of an operator tagged unitary.
pub const UNITARY_TOL: f64 = 1e-9;

/// Allowed disagreement between a closed-form matrix element and the
/// brute-force operator oracle.
pub const ORACLE_TOL: f64 = 1e-9;

/// Probability mass a cutoff-respecting operation may leave past the
/// truncation edge.
pub const TAIL_TOL: f64 = 1e-9;

/// Conditional outcomes below this probability are rejected as improbable;
/// renormalizing by them would amplify roundoff into garbage.
pub const UNDERFLOW_TOL: f64 = 1e-14;
