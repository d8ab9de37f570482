//! Zeros of polynomials and entire functions: root finding, region counts,
//! reciprocal power sums, Jensen and Appell polynomials, class membership
//! tests and convergence diagnostics for polynomial sequences.

pub mod classify;
pub mod convergence;
pub mod io;
pub mod jensen;
pub mod poly;
pub mod powersums;
pub mod regions;
pub mod rootfind;
pub mod series;

pub use classify::{check_membership, jensen_zero_counts, ClassId, ClassVerdict, ClassifyError, Verdict};
pub use convergence::{
    builtin_sequence, strong_convergence_probe, validate_theorem, weak_convergence_probe, ConvergenceError,
    ConvergenceReport, GenParams, PolySequence, TheoremId, TheoremParams,
};
pub use jensen::{appell, hermite_poulain, jensen, jensen_sequence_member, JensenError};
pub use poly::{Complex, PolyError, Polynomial};
pub use powersums::{power_sums_from_coeffs, power_sums_from_roots, SumTable, SumsError};
pub use regions::{count_zeros, Region, RegionError};
pub use rootfind::{find_roots, find_roots_default, Root, RootError, RootOptions, RootSet};
pub use series::PowerSeries;
