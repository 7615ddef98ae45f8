//! Discretized complex Brownian motion stopped on the unit circle, and the
//! martingale constructions built on it: Doob embedding and projection,
//! stochastic Hilbert transforms, truncation at a level, stopping-time
//! decompositions and truncation families.

mod config;
pub mod hilbert;
pub mod holo;
pub mod martingale;
mod paths;
pub mod regress;
pub mod stopping;

pub use config::SimConfig;
pub use hilbert::{
    harmonic_pair, holomorphic_truncate, isometry_check, relative_l2, stochastic_hilbert_closed, stochastic_hilbert_mc,
    th34_report, verify_th32, HarmonicPair, HilbertMc, Th32Report, Th34Report,
};
pub use holo::{harmonic_completion, Constant, ExpForm, HolomorphicFunction};
pub use martingale::{
    doob_check, embed, embed_snapped, maximal_function, project, snap, terminal_mean, MartingaleMatrix, MIN_BIN_COUNT,
};
pub use paths::{exit_statistics, sample_paths, ExitStatistics, PathEnsemble};
pub use regress::{representation_regress, time_buckets, Bucket, RepresentationFit, DEFAULT_BUCKET_ROWS};
pub use stopping::{
    basic_estimates_report, decomposition_report, family_report, stopping_decompose, truncation_family, BasicEstimates,
    DecompositionReport, FamilyReport, PhaseModeInputs, StoppingDecomposition, TruncationFamily, MAX_LEVELS,
};
