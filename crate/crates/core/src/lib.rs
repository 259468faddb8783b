//! Exact-arithmetic kernel for partial generalized Riordan matrices,
//! Riordan-matrix geometric-continuity checks, and order-by-order local
//! series solutions of two-point interior F-chordal problems.

pub mod bivariate;
pub mod coeff;
pub mod gcheck;
pub mod implicit;
pub mod oracles;
pub mod problem;
pub mod riordan;
pub mod series;
pub mod solver;
pub mod verify;

pub use bivariate::BivariateTaylor;
pub use coeff::{Backend, CoeffError, Coefficient};
pub use gcheck::{
    apply_reparam, match_curves, solve_join, Coordinate, GCheckError, GCReport, JoinData,
};
pub use implicit::{
    bivariate_taylor, condition_check, phi_from_family, phi_implicit, phi_involution_check,
    ChordFunction, ConditionReport, ImplicitError, PhiPair,
};
pub use oracles::{
    chord_residual_numeric, circle_series, ellipse_series, OracleError, RESIDUAL_BITS,
};
pub use problem::{
    normalize, FChordalError, FChordalProblem, FocusPoint, Gauge, Mode, NormalizedProblem,
    Overrides, Point, SimilarityTransform, Unknown,
};
pub use riordan::{PartialRiordanMatrix, RiordanError};
pub use series::{SeriesError, TruncatedSeries};
pub use solver::{
    assemble_residual, denormalize, solve, solve_order, solve_problem, LocalSolution,
    LocalSolverState, OrderPivots,
};
pub use verify::{induced_parametrization, verify_residual};
