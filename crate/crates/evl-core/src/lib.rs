//! Extreme value laws and extremal indices for the tripling map with
//! observables maximised on a countable set.
//!
//! The crate computes, in exact rational arithmetic with rigorous error
//! radii:
//!
//! - the special points `z`, `xi_j = f^(3^j)(z)` of the maximal set and
//!   their enclosures ([`constants`]);
//! - exact set algebra on finite interval unions, preimages under iterates
//!   of `f(x) = 3x mod 1`, survivor (declustered) sets and avoidance
//!   windows ([`interval`]);
//! - exceedance sets, threshold/level plans and truncations for the two
//!   built-in observables ([`observable`]);
//! - extremal-index quantities: the closed-form index of the
//!   piecewise-linear observable, finite-level index sequences, bounded
//!   variation norms, dependence-condition diagnostics ([`extremal`]);
//! - a digit-exact Monte Carlo engine for block maxima and a runs
//!   declustering estimator ([`monte_carlo`]);
//! - a reproduction harness with JSON/CSV reporting ([`report`]).

pub mod constants;
pub mod error;
pub mod extremal;
pub mod interval;
pub mod monte_carlo;
pub mod observable;
pub mod precision;
pub mod report;

pub use error::{EvlError, Result};
pub use precision::{BoundedOrdering, BoundedValue, PrecisionConfig};
