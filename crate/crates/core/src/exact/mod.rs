//! Exact arithmetic kernel: rationals, polynomials, and the rational
//! functions in which all correlators live.

pub mod den;
pub mod mpoly;
pub mod rat;
pub mod ratfn;
pub mod ypoly;

pub use den::DenForm;
pub use mpoly::{mono, MPoly, Mono, MAX_POINTS};
pub use rat::Rat;
pub use ratfn::RatFn;
pub use ypoly::{YMask, YPoly};
