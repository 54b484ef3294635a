use std::path::Path;

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};

use nme_core::graded::{GradedVector, SeminormProfile, SpaceConfig, DEFAULT_NET_CAP};
use nme_core::problems::{Deletion, LatticeSpec, ProblemDescriptor};
use nme_core::solver::SolverParams;
use nme_core::suites::SuiteName;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything a run needs. Sections a subcommand does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default)]
    pub space: SpaceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub suites: SuiteSelection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net: Option<NetConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            space: SpaceConfig::default(),
            problem: None,
            target: None,
            solver: SolverParams::default(),
            suites: SuiteSelection::default(),
            check: None,
            net: None,
        }
    }
}

/// Right-hand side `y`, as explicit leading coefficients or a named preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Target {
    /// Leading coefficients; the rest are zero.
    Coeffs(Vec<f64>),
    Preset(Preset),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `e_1 + 0.1 e_3`.
    E1PlusTenthE3,
    /// `0.05 (-1)^k (1+k)^{-N}`, with every seminorm at most 0.05.
    SmoothAlternating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSelection {
    /// Empty selects every suite.
    pub names: Vec<SuiteName>,
    pub seed: u64,
    pub slack: f64,
}

impl Default for SuiteSelection {
    fn default() -> Self {
        Self {
            names: Vec::new(),
            seed: 0,
            slack: nme_core::graded::DEFAULT_MEMBERSHIP_SLACK,
        }
    }
}

fn default_cap() -> usize {
    10_000
}

fn default_kappa() -> f64 {
    1.0
}

fn default_budget() -> usize {
    4_000
}

/// Lattice sample of a problem's graph and the checker settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub active: Vec<usize>,
    pub pitch: f64,
    pub bound: f64,
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default)]
    pub deletions: Vec<Deletion>,
    pub u_radii: Vec<f64>,
    pub v_radii: Vec<f64>,
    /// Box profile `s` for the weak Pi-surjectivity probe.
    pub s: Vec<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Openness rate; defaults to `kappa / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default = "default_budget")]
    pub probe_budget: usize,
}

impl CheckConfig {
    pub fn lattice(&self) -> LatticeSpec {
        LatticeSpec {
            active: self.active.clone(),
            pitch: self.pitch,
            bound: self.bound,
            cap: self.cap,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or(self.kappa / 2.0)
    }
}

fn default_net_cap() -> usize {
    DEFAULT_NET_CAP
}

fn default_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetConfig {
    pub profile: Vec<f64>,
    pub epsilon: f64,
    #[serde(default = "default_net_cap")]
    pub cap: usize,
    /// Box points sampled to measure coverage.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("malformed config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        ensure!(
            self.schema == SCHEMA_VERSION,
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            self.schema
        );
        self.space.validate()?;
        if let Err(e) = self.solver.validate() {
            bail!("{e}");
        }
        ensure!(self.suites.slack >= 0.0, "suite slack must be non-negative");
        if let Some(Target::Coeffs(c)) = &self.target {
            ensure!(
                c.len() <= self.space.coeffs,
                "target has {} coefficients, the space has {}",
                c.len(),
                self.space.coeffs
            );
        }
        if let Some(check) = &self.check {
            ensure!(
                check.kappa > 0.0 && check.theta() > 0.0,
                "kappa and theta must be positive"
            );
            ensure!(check.probe_budget > 0, "probe_budget must be positive");
            for list in [&check.u_radii, &check.v_radii, &check.s] {
                SeminormProfile::new(list.clone())?;
            }
            ensure!(
                check.active.iter().all(|&k| k < self.space.coeffs),
                "active coordinate out of range"
            );
        }
        if let Some(net) = &self.net {
            ensure!(
                net.profile.len() == self.space.levels,
                "net profile needs one entry per level ({})",
                self.space.levels
            );
            SeminormProfile::new(net.profile.clone())?;
            ensure!(net.epsilon > 0.0, "epsilon must be positive");
        }
        Ok(())
    }

    pub fn target_vector(&self) -> anyhow::Result<GradedVector> {
        let cfg = self.space;
        let target = self.target.as_ref().context("config has no `target`")?;
        Ok(match target {
            Target::Coeffs(c) => GradedVector::from_prefix(cfg, c)?,
            Target::Preset(Preset::E1PlusTenthE3) => {
                ensure!(cfg.coeffs > 3, "preset needs at least 4 coefficients");
                GradedVector::from_prefix(cfg, &[0.0, 1.0, 0.0, 0.1])?
            }
            Target::Preset(Preset::SmoothAlternating) => {
                let n = cfg.levels as i32;
                let c = (0..cfg.coeffs)
                    .map(|k| {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        0.05 * sign * ((1 + k) as f64).powi(-n)
                    })
                    .collect();
                GradedVector::from_coeffs(cfg, c)?
            }
        })
    }
}
