use serde::Serialize;

use super::{OracleError, TameProblem};
use crate::graded::{GradedVector, MetricHandle};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientReport {
    pub t: f64,
    pub tolerance: f64,
    /// `rho_Y((f(x + t u) - f(x)) / t, v)` per sample, `u = R(x, v)`.
    pub errors: Vec<f64>,
    pub worst: f64,
    pub pass: bool,
}

/// Finite-difference check that `R(x, .)` inverts the directional derivative.
pub fn validate_right_inverse<P: TameProblem + ?Sized>(
    problem: &P,
    samples: &[(GradedVector, GradedVector)],
    t: f64,
    tolerance: f64,
) -> Result<GradientReport, OracleError> {
    let mut errors = Vec::with_capacity(samples.len());
    for (x, v) in samples {
        let u = problem.right_inverse(x, v)?;
        let fx = problem.apply(x)?;
        let fxt = problem.apply(&x.axpy(t, &u)?)?;
        let quotient = fxt.checked_sub(&fx)?.scaled(1.0 / t);
        errors.push(MetricHandle::Canonical.distance(&quotient, v)?);
    }
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(GradientReport {
        t,
        tolerance,
        pass: worst <= tolerance,
        errors,
        worst,
    })
}
