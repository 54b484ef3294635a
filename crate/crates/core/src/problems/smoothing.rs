use serde::Serialize;

use super::ProblemError;
use crate::graded::{GradedError, GradedVector, SpaceConfig};
use crate::solver::{OracleError, TameProblem};

/// Relative size of the last Neumann term at which the series is cut.
const NEUMANN_TERM_TOL: f64 = 1e-14;
/// Required relative residual of `f'(x) R(x, v) - v` per level.
const NEUMANN_RESIDUAL_TOL: f64 = 1e-10;
const NEUMANN_MAX_DEPTH: usize = 2_000;

/// `f(x) = x + lambda Q(x)` with the smoothing convolution
/// `Q(x)_k = (1+k)^{-2} sum_{i+j=k} x_i x_j`, truncated at `K`.
///
/// Since `(1+i+j)^n <= (1+i)^n (1+j)^n` and a convolution row has `k+1`
/// terms, `|Q(x, u)|_n <= ||x||_n ||u||_n` (convolution constant 1). On the
/// region `max_n ||x||_n <= r` with `2 lambda r < 1` the Neumann series for
/// `f'(x) = I + 2 lambda Q(x, .)` converges and `||R(x, v)||_n <= c |v|_n` with
/// `c = 1 / (1 - 2 lambda r)` and no loss of derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingQuadraticProblem {
    config: SpaceConfig,
    lambda: f64,
    radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeumannSolution {
    pub u: GradedVector,
    pub depth: usize,
    /// `|f'(x) u - v|_n` per level.
    pub residual_levels: Vec<f64>,
}

/// Default region: `r = 1 / (4 lambda)`, so `c = 2`.
pub fn make_smoothing_quadratic(
    config: SpaceConfig,
    lambda: f64,
) -> Result<SmoothingQuadraticProblem, ProblemError> {
    let radius = if lambda == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (4.0 * lambda)
    };
    SmoothingQuadraticProblem::with_radius(config, lambda, radius)
}

impl SmoothingQuadraticProblem {
    pub fn with_radius(
        config: SpaceConfig,
        lambda: f64,
        radius: f64,
    ) -> Result<Self, ProblemError> {
        config.validate()?;
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(ProblemError::InvalidParameter(format!(
                "lambda must be non-negative, got {lambda}"
            )));
        }
        if !(radius > 0.0) || (lambda > 0.0 && !(2.0 * lambda * radius < 1.0)) {
            return Err(ProblemError::InvalidParameter(format!(
                "region radius {radius} must be positive with 2 lambda r < 1"
            )));
        }
        Ok(Self {
            config,
            lambda,
            radius,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Radius `r` of the contraction region `max_n ||x||_n <= r`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn convolve(&self, a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
        let kk = a.len();
        let mut out = vec![0.0; kk];
        let mut spill = vec![0.0; kk];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                let k = i + j;
                if k < kk {
                    out[k] += ai * bj;
                } else {
                    spill[k - kk] += ai * bj;
                }
            }
        }
        for (k, v) in out.iter_mut().enumerate() {
            *v /= ((1 + k) as f64).powi(2);
        }
        let spillover = spill
            .iter()
            .enumerate()
            .map(|(m, v)| (v / ((1 + kk + m) as f64).powi(2)).abs())
            .fold(0.0, f64::max);
        (out, spillover)
    }

    /// `Q(x)`.
    pub fn quadratic(&self, x: &GradedVector) -> Result<GradedVector, GradedError> {
        self.check(x)?;
        let (q, _) = self.convolve(x.coeffs(), x.coeffs());
        GradedVector::from_coeffs(self.config, q)
    }

    /// `Q(x, u)`, the symmetric bilinear form with `Q(x, x) = Q(x)`.
    pub fn bilinear(
        &self,
        x: &GradedVector,
        u: &GradedVector,
    ) -> Result<GradedVector, GradedError> {
        self.check(x)?;
        self.check(u)?;
        let (q, _) = self.convolve(x.coeffs(), u.coeffs());
        GradedVector::from_coeffs(self.config, q)
    }

    /// Largest discarded coefficient of `Q(x)` beyond the window.
    pub fn spillover(&self, x: &GradedVector) -> Result<f64, GradedError> {
        self.check(x)?;
        Ok(self.convolve(x.coeffs(), x.coeffs()).1)
    }

    /// `f'(x) u = u + 2 lambda Q(x, u)`.
    pub fn derivative(
        &self,
        x: &GradedVector,
        u: &GradedVector,
    ) -> Result<GradedVector, GradedError> {
        u.axpy(2.0 * self.lambda, &self.bilinear(x, u)?)
    }

    fn check(&self, x: &GradedVector) -> Result<(), GradedError> {
        if self.config.same_shape(x.config()) {
            Ok(())
        } else {
            Err(GradedError::ConfigMismatch)
        }
    }

    /// Truncated Neumann series with its depth and residual.
    pub fn neumann(
        &self,
        x: &GradedVector,
        v: &GradedVector,
    ) -> Result<NeumannSolution, OracleError> {
        self.check(v)?;
        let size = x.seminorms().into_iter().fold(0.0, f64::max);
        if !(size <= self.radius) {
            return Err(OracleError::Domain(format!(
                "max_n ||x||_n = {size} exceeds the region radius {}",
                self.radius
            )));
        }
        let vs = v.seminorms();
        let mut u = v.clone();
        let mut term = v.clone();
        let mut depth = 0;
        while depth < NEUMANN_MAX_DEPTH {
            let ts = term.seminorms();
            if ts.iter().zip(&vs).all(|(t, s)| *t <= NEUMANN_TERM_TOL * s) {
                break;
            }
            term = self.bilinear(x, &term)?.scaled(-2.0 * self.lambda);
            u = u.checked_add(&term)?;
            depth += 1;
        }
        let residual_levels = self.derivative(x, &u)?.checked_sub(v)?.seminorms();
        if residual_levels
            .iter()
            .zip(&vs)
            .any(|(r, s)| *r > NEUMANN_RESIDUAL_TOL * s)
        {
            return Err(OracleError::Domain(format!(
                "Neumann series missed the residual tolerance after {depth} terms"
            )));
        }
        Ok(NeumannSolution {
            u,
            depth,
            residual_levels,
        })
    }
}

impl TameProblem for SmoothingQuadraticProblem {
    fn config(&self) -> &SpaceConfig {
        &self.config
    }

    fn constant(&self) -> f64 {
        if self.lambda == 0.0 {
            1.0
        } else {
            1.0 / (1.0 - 2.0 * self.lambda * self.radius)
        }
    }

    fn loss(&self) -> usize {
        0
    }

    fn apply(&self, x: &GradedVector) -> Result<GradedVector, OracleError> {
        Ok(x.axpy(self.lambda, &self.quadratic(x)?)?)
    }

    fn right_inverse(
        &self,
        x: &GradedVector,
        v: &GradedVector,
    ) -> Result<GradedVector, OracleError> {
        Ok(self.neumann(x, v)?.u)
    }

    fn name(&self) -> String {
        format!("smoothing(lambda={}, radius={})", self.lambda, self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SpaceConfig {
        SpaceConfig::default()
    }

    #[test]
    fn zero_strength_is_identity() {
        let p = make_smoothing_quadratic(cfg(), 0.0).unwrap();
        let x = GradedVector::from_prefix(cfg(), &[0.4, -0.1, 0.3]).unwrap();
        assert_eq!(p.apply(&x).unwrap(), x);
        assert_eq!(p.right_inverse(&x, &x).unwrap(), x);
        assert_eq!(p.constant(), 1.0);
    }

    #[test]
    fn quadratic_by_hand() {
        let p = make_smoothing_quadratic(cfg(), 0.1).unwrap();
        let e0 = GradedVector::basis(cfg(), 0).unwrap();
        let q = p.quadratic(&e0).unwrap();
        assert_eq!(q, e0);
        assert_eq!(p.apply(&e0).unwrap().coeff(0), 1.1);
        // (e_0 + e_1)^2 = e_0 + 2 e_1 + e_2, weighted by (1+k)^{-2}
        let x = GradedVector::from_prefix(cfg(), &[1.0, 1.0]).unwrap();
        let q = p.quadratic(&x).unwrap();
        assert_eq!(&q.coeffs()[..3], &[1.0, 0.5, 1.0 / 9.0]);
        assert!(p.apply(&GradedVector::zeros(cfg())).unwrap().is_zero());
    }

    #[test]
    fn spillover_is_reported() {
        let small = SpaceConfig::new(4, 3).unwrap();
        let p = make_smoothing_quadratic(small, 0.1).unwrap();
        let x = GradedVector::from_coeffs(small, vec![0.0, 0.0, 1.0]).unwrap();
        // x_2^2 lands on k = 4, weighted by 1/25
        assert_eq!(p.spillover(&x).unwrap(), 1.0 / 25.0);
        assert!(p.quadratic(&x).unwrap().is_zero());
    }

    #[test]
    fn neumann_inverts_the_derivative() {
        let p = make_smoothing_quadratic(cfg(), 0.1).unwrap();
        let x = GradedVector::from_prefix(cfg(), &[0.5, -4e-4, 1e-8]).unwrap();
        let v = GradedVector::from_prefix(cfg(), &[0.2, 0.05, -1e-3, 1e-5]).unwrap();
        let sol = p.neumann(&x, &v).unwrap();
        assert!(sol.depth > 0);
        let back = p.derivative(&x, &sol.u).unwrap();
        let gap = back.checked_sub(&v).unwrap().seminorms();
        for (g, s) in gap.iter().zip(v.seminorms()) {
            assert!(*g <= 1e-10 * s);
        }
        let c = p.constant();
        for (a, b) in sol.u.seminorms().iter().zip(v.seminorms()) {
            assert!(*a <= c * b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn outside_region_is_a_domain_error() {
        let p = make_smoothing_quadratic(cfg(), 0.1).unwrap();
        let x = GradedVector::from_prefix(cfg(), &[3.0]).unwrap();
        let v = GradedVector::basis(cfg(), 0).unwrap();
        assert!(matches!(
            p.right_inverse(&x, &v),
            Err(OracleError::Domain(_))
        ));
        assert!(SmoothingQuadraticProblem::with_radius(cfg(), 0.1, 5.0).is_err());
        assert!(make_smoothing_quadratic(cfg(), -1.0).is_err());
    }
}
