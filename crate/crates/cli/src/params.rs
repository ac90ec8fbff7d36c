//! Single JSON config holding every tunable of the toolchain.

use anyhow::Context;
use serde::{Deserialize, Serialize};
use std::path::Path;

use nlhs_core::estimator::EstimatorParams;
use nlhs_core::spectral::NlhsParams;
use nlhs_core::synth::SynthConfig;
use nlhs_core::RadarConfig;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsFile {
    pub estimator: EstimatorParams,
    pub nlhs: NlhsParams,
    pub radar: RadarConfig,
    pub synth: SynthConfig,
}

impl ParamsFile {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading params file {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing params file {}", p.display()))
            }
        }
    }
}
