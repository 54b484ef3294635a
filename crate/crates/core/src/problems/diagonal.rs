use super::ProblemError;
use crate::graded::{GradedVector, SpaceConfig};
use crate::solver::{OracleError, TameProblem};

/// `f(x)_k = (1+k)^{-d} x_k` with the exact inverse `R(x, v)_k = (1+k)^d v_k`.
///
/// The map is fixed by `d`; `c` is the declared tame constant. The true
/// constant is 1, so `c < 1` makes the right inverse violate its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalProblem {
    config: SpaceConfig,
    d: usize,
    c: f64,
}

pub fn make_diagonal(
    config: SpaceConfig,
    d: usize,
    c: f64,
) -> Result<DiagonalProblem, ProblemError> {
    config.validate()?;
    if d >= config.levels {
        return Err(ProblemError::InvalidParameter(format!(
            "loss d = {d} must be below the {} tracked levels",
            config.levels
        )));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(ProblemError::InvalidParameter(format!(
            "tame constant must be positive, got {c}"
        )));
    }
    Ok(DiagonalProblem { config, d, c })
}

impl DiagonalProblem {
    fn scale(&self, x: &GradedVector, power: i32) -> Result<GradedVector, OracleError> {
        if !self.config.same_shape(x.config()) {
            return Err(crate::graded::GradedError::ConfigMismatch.into());
        }
        let coeffs = x
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, v)| v * ((1 + k) as f64).powi(power))
            .collect();
        Ok(GradedVector::from_coeffs(self.config, coeffs)?)
    }
}

impl TameProblem for DiagonalProblem {
    fn config(&self) -> &SpaceConfig {
        &self.config
    }

    fn constant(&self) -> f64 {
        self.c
    }

    fn loss(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &GradedVector) -> Result<GradedVector, OracleError> {
        self.scale(x, -(self.d as i32))
    }

    fn right_inverse(
        &self,
        _x: &GradedVector,
        v: &GradedVector,
    ) -> Result<GradedVector, OracleError> {
        self.scale(v, self.d as i32)
    }

    fn name(&self) -> String {
        format!("diagonal(d={}, c={})", self.d, self.c)
    }
}
