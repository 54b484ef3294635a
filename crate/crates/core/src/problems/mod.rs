//! Concrete tame problems and lattice samples of their graphs.

mod diagonal;
mod lattice;
mod smoothing;

pub use diagonal::{make_diagonal, DiagonalProblem};
pub use lattice::{sample_graph, Deletion, LatticeMultimap, LatticeSpec};
pub use smoothing::{make_smoothing_quadratic, NeumannSolution, SmoothingQuadraticProblem};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded::{GradedError, SpaceConfig};
use crate::solver::TameProblem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("invalid problem parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("graph sample needs {required} pairs, cap is {cap}")]
    SampleTooLarge { required: f64, cap: usize },
}

fn default_c() -> f64 {
    1.0
}

/// Problem instance as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemDescriptor {
    Diagonal {
        d: usize,
        #[serde(default = "default_c")]
        c: f64,
    },
    Smoothing {
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
}

impl ProblemDescriptor {
    pub fn build(&self, config: SpaceConfig) -> Result<Box<dyn TameProblem>, ProblemError> {
        Ok(match *self {
            ProblemDescriptor::Diagonal { d, c } => Box::new(make_diagonal(config, d, c)?),
            ProblemDescriptor::Smoothing { lambda, radius } => Box::new(match radius {
                Some(r) => SmoothingQuadraticProblem::with_radius(config, lambda, r)?,
                None => make_smoothing_quadratic(config, lambda)?,
            }),
        })
    }
}
