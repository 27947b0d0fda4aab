//! Yield-optimized superoscillating signals.
//!
//! A band-limited even periodic signal is constrained to alternate between
//! `±1` at equally spaced points inside a domain `D`; among all such signals
//! the fraction of energy inside `D` (the yield) is maximized. The stationary
//! yields are the roots of a rational eigenvalue equation, computed here in
//! `f64` or in MPFR arbitrary precision.
//!
//! ```
//! use superosc::{solve, Precision, Problem, SolveMethod};
//!
//! let problem = Problem::interval(6, 3, 1.0_f64, 0, Precision::FAST).unwrap();
//! let solution = solve(&problem, SolveMethod::Secular).unwrap();
//! assert_eq!(solution.spectrum.len(), 5);
//! ```

pub mod analysis;
pub mod constraints;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod par;
pub mod problem;
pub mod quadrature;
pub mod real;
pub mod signal;
pub mod spectrum;

pub use analysis::{
    monotonicity_table, scaling_sweep, yield_of, zero_crossings, zero_crossings_with, MonotonicityViolation, SlopeFit,
    SweepFailure, SweepRow, SweepTable, YieldReport,
};
pub use constraints::{
    alternating_constraints, constraint_matrix, orthonormal_frame, reduce_rank, ConstraintMatrix, ConstraintSet,
    RotatedFrame,
};
pub use domain::{overlap_matrix, symmetrize_domain, Domain, OverlapMatrix};
pub use error::{Error, Result};
pub use par::Execution;
pub use problem::{solve, Problem, Solution, SolveMethod};
pub use real::{parse_real, MpReal, Precision, Real};
pub use signal::FourierCosineSignal;
pub use spectrum::{
    fk_min_energy_signal, polynomial_spectrum, rotate_and_partition, secular_spectrum, slepian_modes,
    BlockDecomposition, GeneralizedSpectrum, Method, RootDiagnostics,
};
