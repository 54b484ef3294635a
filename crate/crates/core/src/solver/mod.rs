//! Tame continuation solver, certificates and sampled surjectivity/openness
//! checkers.

mod certificate;
mod checkers;
mod continuation;
mod gradient;

pub use certificate::{tame_certificate, CertificateTable, LevelRow};
pub use checkers::{
    check_openness, check_weak_pi_surjectivity, BoxRegion, Grading, GraphPair, MultimapSample,
    OpennessReport, ProbeOutcome, RadiusReport, Verdict, WeakPiReport,
};
pub use continuation::{
    solve_continuation, DirectionMode, SolveCertificate, SolverError, SolverParams, StepRecord,
};
pub use gradient::{validate_right_inverse, GradientReport};

use thiserror::Error;

use crate::graded::{GradedError, GradedVector, SpaceConfig};

/// Failure of a problem oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("query outside the problem's domain: {0}")]
    Domain(String),
}

/// A map `f` with `f(0) = 0` and a tame right inverse `R` of its derivative:
/// `f'(x) R(x, v) = v` and `||R(x, v)||_n <= c |v|_{n+d}`.
pub trait TameProblem {
    fn config(&self) -> &SpaceConfig;

    /// The tame constant `c`.
    fn constant(&self) -> f64;

    /// The loss of derivatives `d`.
    fn loss(&self) -> usize;

    fn apply(&self, x: &GradedVector) -> Result<GradedVector, OracleError>;

    fn right_inverse(
        &self,
        x: &GradedVector,
        v: &GradedVector,
    ) -> Result<GradedVector, OracleError>;

    fn name(&self) -> String;
}
