use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize, Serializer};

use super::GradedError;

/// Absolute slack used by box-membership comparisons.
pub const DEFAULT_MEMBERSHIP_SLACK: f64 = 1e-12;

fn default_slack() -> f64 {
    DEFAULT_MEMBERSHIP_SLACK
}

/// Truncation of the model space: `levels` seminorms and `coeffs` coefficients.
///
/// The weight law `w(k, n) = (1 + k)^n` is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub levels: usize,
    pub coeffs: usize,
    #[serde(default = "default_slack", skip_serializing_if = "is_default_slack")]
    pub membership_slack: f64,
}

fn is_default_slack(s: &f64) -> bool {
    *s == DEFAULT_MEMBERSHIP_SLACK
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            levels: 12,
            coeffs: 64,
            membership_slack: DEFAULT_MEMBERSHIP_SLACK,
        }
    }
}

impl SpaceConfig {
    pub fn new(levels: usize, coeffs: usize) -> Result<Self, GradedError> {
        Self::with_slack(levels, coeffs, DEFAULT_MEMBERSHIP_SLACK)
    }

    pub fn with_slack(levels: usize, coeffs: usize, slack: f64) -> Result<Self, GradedError> {
        let cfg = Self {
            levels,
            coeffs,
            membership_slack: slack,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GradedError> {
        if self.levels == 0 {
            return Err(GradedError::InvalidConfig(
                "levels must be at least 1".into(),
            ));
        }
        if self.coeffs == 0 {
            return Err(GradedError::InvalidConfig(
                "coeffs must be at least 1".into(),
            ));
        }
        if !(self.membership_slack >= 0.0 && self.membership_slack.is_finite()) {
            return Err(GradedError::InvalidConfig(format!(
                "membership slack must be finite and non-negative, got {}",
                self.membership_slack
            )));
        }
        let top = self.weight(self.coeffs - 1, self.levels - 1);
        if !top.is_finite() {
            return Err(GradedError::InvalidConfig(format!(
                "weight (1+{})^{} overflows",
                self.coeffs - 1,
                self.levels - 1
            )));
        }
        Ok(())
    }

    /// Same truncation, ignoring the slack setting.
    pub fn same_shape(&self, other: &SpaceConfig) -> bool {
        self.levels == other.levels && self.coeffs == other.coeffs
    }

    #[inline]
    pub fn weight(&self, k: usize, n: usize) -> f64 {
        ((1 + k) as f64).powi(n as i32)
    }

    /// Upper bound on the metric contribution of the untracked levels `n >= N`.
    pub fn metric_tail_bound(&self) -> f64 {
        0.5f64.powi(self.levels as i32)
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<(), GradedError> {
        if n >= self.levels {
            Err(GradedError::LevelOutOfRange {
                level: n,
                levels: self.levels,
            })
        } else {
            Ok(())
        }
    }
}

/// A point of the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedVector {
    config: SpaceConfig,
    coeffs: Vec<f64>,
}

impl Serialize for GradedVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl GradedVector {
    pub fn zeros(config: SpaceConfig) -> Self {
        Self {
            config,
            coeffs: vec![0.0; config.coeffs],
        }
    }

    /// The unit coordinate vector `e_k`.
    pub fn basis(config: SpaceConfig, k: usize) -> Result<Self, GradedError> {
        if k >= config.coeffs {
            return Err(GradedError::IndexOutOfRange {
                index: k,
                coeffs: config.coeffs,
            });
        }
        let mut v = Self::zeros(config);
        v.coeffs[k] = 1.0;
        Ok(v)
    }

    pub fn from_coeffs(config: SpaceConfig, coeffs: Vec<f64>) -> Result<Self, GradedError> {
        if coeffs.len() != config.coeffs {
            return Err(GradedError::LengthMismatch {
                expected: config.coeffs,
                found: coeffs.len(),
            });
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(GradedError::NonFinite(i));
        }
        Ok(Self { config, coeffs })
    }

    /// Builds a vector from a prefix of coefficients, padding with zeros.
    pub fn from_prefix(config: SpaceConfig, prefix: &[f64]) -> Result<Self, GradedError> {
        if prefix.len() > config.coeffs {
            return Err(GradedError::LengthMismatch {
                expected: config.coeffs,
                found: prefix.len(),
            });
        }
        let mut coeffs = prefix.to_vec();
        coeffs.resize(config.coeffs, 0.0);
        Self::from_coeffs(config, coeffs)
    }

    pub fn config(&self) -> &SpaceConfig {
        &self.config
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Seminorm at level `n`.
    pub fn seminorm(&self, n: usize) -> Result<f64, GradedError> {
        self.config.check_level(n)?;
        let n = n as i32;
        Ok(self.coeffs.iter().enumerate().fold(0.0f64, |acc, (k, &c)| {
            acc.max(((1 + k) as f64).powi(n) * c.abs())
        }))
    }

    /// All tracked seminorms `||x||_0, .., ||x||_{N-1}` in one pass.
    pub fn seminorms(&self) -> Vec<f64> {
        let levels = self.config.levels;
        let mut out = vec![0.0f64; levels];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let a = c.abs();
            if a == 0.0 {
                continue;
            }
            let base = (1 + k) as f64;
            let mut w = 1.0;
            for slot in out.iter_mut() {
                *slot = slot.max(w * a);
                w *= base;
            }
        }
        out
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            config: self.config,
            coeffs: self.coeffs.iter().map(|c| c * t).collect(),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GradedError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GradedError> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `self + t * dir`.
    pub fn axpy(&self, t: f64, dir: &Self) -> Result<Self, GradedError> {
        self.zip_with(dir, |a, b| a + t * b)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self, GradedError> {
        if !self.config.same_shape(&other.config) {
            return Err(GradedError::ConfigMismatch);
        }
        Ok(Self {
            config: self.config,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }
}

/// Level-`n` seminorm of `x`.
pub fn seminorm(x: &GradedVector, n: usize) -> Result<f64, GradedError> {
    x.seminorm(n)
}

// Operator impls panic on mismatched configs; use the `checked_*` methods when
// operands come from untrusted input.

impl Add for &GradedVector {
    type Output = GradedVector;
    fn add(self, rhs: Self) -> GradedVector {
        self.checked_add(rhs)
            .expect("graded vectors of different shapes")
    }
}

impl Sub for &GradedVector {
    type Output = GradedVector;
    fn sub(self, rhs: Self) -> GradedVector {
        self.checked_sub(rhs)
            .expect("graded vectors of different shapes")
    }
}

impl Mul<f64> for &GradedVector {
    type Output = GradedVector;
    fn mul(self, t: f64) -> GradedVector {
        self.scaled(t)
    }
}

impl Neg for &GradedVector {
    type Output = GradedVector;
    fn neg(self) -> GradedVector {
        self.scaled(-1.0)
    }
}
