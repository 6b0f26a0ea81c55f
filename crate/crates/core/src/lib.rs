//! Zero structure of the partial theta function
//! `θ(q,x) = Σ_{j≥0} q^{j(j+1)/2} x^j`.
//!
//! The crate provides, for |q| < 1:
//!
//! - [`eval`]: certified evaluation of θ and ∂θ/∂x with rigorous truncation
//!   tails, plus the infinite-product reconstruction from a located zero set;
//! - [`delta`]/[`series`]: the exact integer-coefficient power series Δ_s
//!   correcting the geometric-progression law `1/ξ_s = q^s Δ_s` of the zeros;
//! - [`certify`]: an exact-rational inequality chain certifying that all
//!   zeros of θ(q,·) are simple on a disk |q| ≤ a (feasible at a = 0.108);
//! - [`zeros`]: Newton localization of the zeros with distinctness
//!   diagnostics and a disk scanner;
//! - [`spectrum`]: the real spectral values q̃_j where θ acquires a double
//!   zero, with the q̃_j → 1 - π/(2j) and x̃_j → -e^π trend reports;
//! - [`dd`]: the double-double arithmetic backing the high-precision mode.

pub mod certify;
pub mod dd;
pub mod delta;
pub mod eval;
pub mod series;
pub mod spectrum;
pub mod zeros;

pub use certify::{
    band_sandwich, bound_b, bound_b_oracle, certify_disk, check_conditions, inverse_entry,
    inverse_oracle_check, max_certified_radius, parse_rational, separation_margin, CertParams,
    Certificate,
};
pub use dd::Dd;
pub use delta::{
    elementary_symmetric, leading_gap, sign_pattern_probe, solve_delta, DeltaError, DeltaTable,
};
pub use eval::{
    eval_dtheta_dx, eval_product, eval_theta, eval_theta_opts, eval_theta_terms, EvalError,
    EvalOptions, EvalResult,
};
pub use series::TruncSeries;
pub use spectrum::{
    asymptotic_report, count_real_zeros, default_window, find_spectral, scan_brackets,
    spectrum_table, SpectralPoint, SpectrumError,
};
pub use zeros::{
    find, find_with_table, scan_csv, scan_disk, separation_report, ScanRow, SeparationReport,
    ZeroEntry, ZeroSet, ZerosError,
};
