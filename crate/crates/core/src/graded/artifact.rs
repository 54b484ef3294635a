//! JSON file shapes for vectors and profiles.
//!
//! Every artifact embeds the truncation under the keys `levels` and `coeffs`.

use serde::{Deserialize, Serialize};

use super::{GradedError, GradedVector, SeminormProfile, SpaceConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorArtifact {
    pub levels: usize,
    pub coeffs: usize,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileArtifact {
    pub levels: usize,
    pub coeffs: usize,
    pub profile: Vec<f64>,
}

impl VectorArtifact {
    pub fn from_vector(x: &GradedVector) -> Self {
        Self {
            levels: x.config().levels,
            coeffs: x.config().coeffs,
            vector: x.coeffs().to_vec(),
        }
    }

    pub fn into_vector(self) -> Result<GradedVector, GradedError> {
        let config = SpaceConfig::new(self.levels, self.coeffs)?;
        GradedVector::from_coeffs(config, self.vector)
    }
}

impl ProfileArtifact {
    pub fn from_profile(config: &SpaceConfig, s: &SeminormProfile) -> Self {
        Self {
            levels: config.levels,
            coeffs: config.coeffs,
            profile: s.levels().to_vec(),
        }
    }

    pub fn into_parts(self) -> Result<(SpaceConfig, SeminormProfile), GradedError> {
        let config = SpaceConfig::new(self.levels, self.coeffs)?;
        let profile = SeminormProfile::new(self.profile)?;
        profile.check_fits(&config)?;
        Ok((config, profile))
    }
}
