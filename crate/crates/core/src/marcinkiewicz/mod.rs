//! Truncation of `H^p` functions at a level `λ` by cutting down the outer
//! modulus, with the Schur-defect inequality behind its `L^1` bound and
//! K-functional estimates built on it.

mod decompose;
mod kfunc;
mod lemma12;
mod theorem11;

pub use decompose::{decompose, level_set, s_zero_two_ways, DecompositionNorms, DecompositionResult, SZeroTwoWays};
pub use kfunc::{
    default_lambda_grid, dyadic_grid, interp_lambda_grid, interp_t_grid, k_lower_l, k_report, k_upper, lorentz_comparison,
    real_interp_norm, real_interp_norm_lower, real_interp_norm_with, KReport, LevelProfile, LorentzComparison,
    DIVERGENCE_FRACTION, T_OCTAVES, T_POINTS_PER_OCTAVE,
};
pub use lemma12::{lemma12_report, schur_defect_constant, Lemma12Report, S0_REAL_TOL};
pub use theorem11::{
    hoelder_conjugate, quarter_octave_grid, theorem11_constant, theorem11_report, theorem11_sweep, Theorem11Chain,
    Theorem11Report, Theorem11Sweep, SLOPE_FLOOR, SLOPE_SLACK,
};
