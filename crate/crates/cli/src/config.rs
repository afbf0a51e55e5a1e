//! Per-command configuration: defaults by profile, optional JSON config
//! file, and CLI flag overrides (flags win over file values, file values win
//! over defaults). The merged result is echoed into each output's sidecar.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sigmens::sphere::Sigma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Publication-scale sample counts.
    Paper,
    /// 10x fewer samples for quick runs; tolerances widen accordingly.
    Ci,
}

impl Profile {
    pub fn spectra_samples(self) -> u64 {
        match self {
            Profile::Paper => 1000,
            Profile::Ci => 100,
        }
    }

    pub fn surface_samples(self) -> u64 {
        match self {
            Profile::Paper => 20,
            Profile::Ci => 2,
        }
    }

    pub fn admission_states(self) -> usize {
        match self {
            Profile::Paper => 10_000,
            Profile::Ci => 1000,
        }
    }

    pub fn scan_samples(self) -> u64 {
        match self {
            Profile::Paper => 1000,
            Profile::Ci => 100,
        }
    }
}

/// Loads a JSON config file for one command, rejecting unknown keys so typos
/// are reported by name.
pub fn load_config<T: for<'de> Deserialize<'de> + Default>(
    path: Option<&Path>,
) -> Result<T, String> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("invalid config {}: {e}", p.display()))
        }
    }
}

/// Picks `flag` if given, else the config-file value, else the default.
pub fn resolve<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Like [`resolve`] but with no default; errors name the missing key.
pub fn require<T>(flag: Option<T>, file: Option<T>, key: &str) -> Result<T, String> {
    flag.or(file)
        .ok_or_else(|| format!("missing required parameter `{key}` (flag or config file)"))
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSpectraFile {
    pub n: Option<usize>,
    pub sigma: Option<Sigma>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildFile {
    pub length: Option<usize>,
    pub sigma: Option<Sigma>,
    pub chi: Option<usize>,
    pub trunc: Option<f64>,
    pub seed: Option<u64>,
    pub max_sweeps: Option<usize>,
    pub delta: Option<f64>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepFile {
    pub max_sweeps: Option<usize>,
    pub delta: Option<f64>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmissionFile {
    pub length: Option<Vec<usize>>,
    pub chi: Option<Vec<usize>>,
    pub sigma: Option<Vec<Sigma>>,
    pub eps: Option<f64>,
    pub states: Option<usize>,
    pub trunc: Option<f64>,
    pub seed: Option<u64>,
    pub max_sweeps: Option<usize>,
    pub delta: Option<f64>,
    pub stall_window: Option<usize>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseDiagramFile {
    pub n: Option<Vec<usize>>,
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub points: Option<usize>,
    pub samples: Option<u64>,
    pub trunc: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfacesFile {
    pub l_max: Option<usize>,
    pub sigma_grid: Option<Vec<Sigma>>,
    pub samples: Option<u64>,
    pub trunc: Option<f64>,
    pub seed: Option<u64>,
}
