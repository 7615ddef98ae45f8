//! Inner-outer machinery on the circle grid.
//!
//! A Hardy function factors as `f = f_in · f_out`: the inner part collects a
//! Blaschke product and a singular factor (here a finite sum of point masses),
//! the outer part is determined by the boundary modulus through
//! `exp(log|f| + i·H log|f|)`.

mod blaschke;
mod factored;
mod outer;
mod schur;
mod singular;

pub use blaschke::{BlaschkeSpec, ZERO_MARGIN};
pub use factored::{inner_outer_split, synthesize, FactoredFunction, FactoredFunctionWire, InnerOuter, SynthesisOptions};
pub use outer::{outer_from_log_modulus, outer_from_modulus, DEFAULT_LOG_FLOOR};
pub use schur::{make_schur_positive, schur_check, SchurCheck, SCHUR_MODULUS_SLACK};
pub use singular::SingularAtomSpec;
