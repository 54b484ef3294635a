use serde::{Deserialize, Serialize};

use super::{dyadic_magnitude, rho_metric, GradedError, GradedVector, MetricHandle, SpaceConfig};

/// A finite profile `s = (s_0, .., s_{L-1})` of non-negative level bounds.
///
/// The profile may be shorter than the space's level count; levels past its
/// end are unconstrained. Most callers use full-length profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SeminormProfile {
    levels: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SeminormProfile {
    type Error = GradedError;
    fn try_from(levels: Vec<f64>) -> Result<Self, GradedError> {
        Self::new(levels)
    }
}

impl From<SeminormProfile> for Vec<f64> {
    fn from(p: SeminormProfile) -> Vec<f64> {
        p.levels
    }
}

impl SeminormProfile {
    pub fn new(levels: Vec<f64>) -> Result<Self, GradedError> {
        if levels.is_empty() {
            return Err(GradedError::InvalidProfile("profile has no levels".into()));
        }
        for (i, &s) in levels.iter().enumerate() {
            if !s.is_finite() {
                return Err(GradedError::NonFinite(i));
            }
            if s < 0.0 {
                return Err(GradedError::InvalidProfile(format!(
                    "level {i} is negative ({s})"
                )));
            }
        }
        Ok(Self { levels })
    }

    pub fn constant(len: usize, value: f64) -> Result<Self, GradedError> {
        Self::new(vec![value; len])
    }

    /// The profile `s_n = ||x||_n` over all tracked levels.
    pub fn of_vector(x: &GradedVector) -> Self {
        Self {
            levels: x.seminorms(),
        }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Indices with `s_n > 0`.
    pub fn support(&self) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0.0)
            .map(|(n, _)| n)
            .collect()
    }

    /// `|s| = max_n 2^{-n} s_n / (1 + s_n)`.
    pub fn magnitude(&self) -> f64 {
        dyadic_magnitude(&self.levels)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            levels: self.levels.iter().map(|s| s * c).collect(),
        }
    }

    pub(crate) fn check_fits(&self, config: &SpaceConfig) -> Result<(), GradedError> {
        if self.levels.len() > config.levels {
            Err(GradedError::InvalidProfile(format!(
                "profile has {} levels, space tracks {}",
                self.levels.len(),
                config.levels
            )))
        } else {
            Ok(())
        }
    }

    /// Coordinate half-widths of the box: `b_k = min_n s_n (1+k)^{-n}`.
    ///
    /// Because every seminorm is a weighted max over coordinates, the box is
    /// exactly the product `prod_k [-b_k, b_k]`.
    pub fn box_half_widths(&self, config: &SpaceConfig) -> Result<Vec<f64>, GradedError> {
        self.box_half_widths_shifted(config, 0)
    }

    /// Half-widths of `{v : |v|_{n+shift} <= s_n}`.
    pub fn box_half_widths_shifted(
        &self,
        config: &SpaceConfig,
        shift: usize,
    ) -> Result<Vec<f64>, GradedError> {
        if self.levels.len() + shift > config.levels {
            return Err(GradedError::InvalidProfile(format!(
                "profile of {} levels shifted by {} exceeds {} tracked levels",
                self.levels.len(),
                shift,
                config.levels
            )));
        }
        Ok((0..config.coeffs)
            .map(|k| {
                let base = (1 + k) as f64;
                self.levels
                    .iter()
                    .enumerate()
                    .map(|(n, &s)| s / base.powi((n + shift) as i32))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect())
    }
}

/// `|s|`.
pub fn s_magnitude(s: &SeminormProfile) -> f64 {
    s.magnitude()
}

/// `x` lies in the box `Pi_s`, up to the space's membership slack.
pub fn pi_membership(x: &GradedVector, s: &SeminormProfile) -> Result<bool, GradedError> {
    s.check_fits(x.config())?;
    let slack = x.config().membership_slack;
    let norms = x.seminorms();
    Ok(s.levels()
        .iter()
        .zip(&norms)
        .all(|(&bound, &v)| v <= bound + slack))
}

/// Banach norm `||x||_s = sup_{n in supp s} ||x||_n / s_n`.
///
/// Returns `f64::INFINITY` when `x` has a nonzero seminorm on a level where
/// `s_n = 0`. An empty support is an error: the box is `{0}` and the norm is
/// undefined.
pub fn s_norm(x: &GradedVector, s: &SeminormProfile) -> Result<f64, GradedError> {
    s.check_fits(x.config())?;
    if s.support().is_empty() {
        return Err(GradedError::EmptySupport);
    }
    let norms = x.seminorms();
    let mut best = 0.0f64;
    for (&bound, &v) in s.levels().iter().zip(&norms) {
        if bound > 0.0 {
            best = best.max(v / bound);
        } else if v > 0.0 {
            return Ok(f64::INFINITY);
        }
    }
    Ok(best)
}

/// Probe for the inclusion `c Pi_s subset B(0; c|s|)`.
///
/// Returns `true` unless `x` is in `c Pi_s` while `rho(0, x) > c |s|`.
pub fn key_inclusion_check(
    x: &GradedVector,
    s: &SeminormProfile,
    c: f64,
) -> Result<bool, GradedError> {
    if !(c >= 1.0) {
        return Err(GradedError::FactorBelowOne(c));
    }
    if s.len() != x.config().levels {
        return Err(GradedError::InvalidProfile(format!(
            "inclusion probe needs a full profile of {} levels, got {}",
            x.config().levels,
            s.len()
        )));
    }
    if !pi_membership(x, &s.scaled(c))? {
        return Ok(true);
    }
    let zero = GradedVector::zeros(*x.config());
    let rho = rho_metric(&MetricHandle::Canonical, &zero, x)?;
    Ok(rho <= c * s.magnitude() + x.config().membership_slack)
}

/// `max_n 2^{-n} t s_n / (1 + t s_n)`, an upper bound for `sup rho(0, t Pi_s)`.
pub fn diam_upper_bound(s: &SeminormProfile, t: f64) -> Result<f64, GradedError> {
    if !(t > 0.0) {
        return Err(GradedError::NonPositive {
            name: "t",
            value: t,
        });
    }
    Ok(s.scaled(t).magnitude())
}
