//! Run configuration: JSON file plus flag overrides, hashed for metadata.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::SurfaceSpec;
use crate::error::{Error, Result};
use crate::flow::IntegratorParams;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceParams {
    pub flow: String,
    /// Explicit starts `[u, v, alpha]`.
    pub starts: Vec<[f64; 3]>,
    /// Additional starts drawn uniformly from the chart with the run seed.
    pub random: usize,
    pub arc_length: f64,
    /// Integrate backward along the initial orientation.
    pub reverse: bool,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self { flow: "darboux".into(), starts: Vec::new(), random: 0, arc_length: 10.0, reverse: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RidgesParams {
    /// Grid resolution of the ridge scan (non-quadrics) or samples per
    /// coordinate-plane line (quadrics).
    pub resolution: usize,
    /// Phase portraits per classified ridge.
    pub portraits: bool,
    pub portrait_orbits: usize,
}

impl Default for RidgesParams {
    fn default() -> Self {
        Self { resolution: 24, portraits: true, portrait_orbits: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RotationParams {
    /// Angles (from P2) of the constant-angle leaves.
    pub alphas: Vec<f64>,
    /// Levels of the Darboux return maps; empty selects five levels in
    /// `(b, a)`.
    pub lambdas: Vec<f64>,
    pub iterates: usize,
    /// Start on the section, in the chart coordinate along it.
    pub start: f64,
    /// Also integrate the constant-angle return maps.
    pub falpha_maps: bool,
}

impl Default for RotationParams {
    fn default() -> Self {
        Self {
            alphas: vec![0.2, 0.4, 0.6, std::f64::consts::FRAC_PI_4, 1.0, 1.2, 1.4],
            lambdas: Vec::new(),
            iterates: 50,
            start: 0.7,
            falpha_maps: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegimesParams {
    /// Levels; empty selects one representative per case of the quadric.
    pub lambdas: Vec<f64>,
    /// Trajectories per level.
    pub trajectories: usize,
    pub arc_length: f64,
}

impl Default for RegimesParams {
    fn default() -> Self {
        Self { lambdas: Vec::new(), trajectories: 4, arc_length: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CansecParams {
    pub flow: String,
    pub start: [f64; 3],
    pub arc_length: f64,
}

impl Default for CansecParams {
    fn default() -> Self {
        Self { flow: "darboux".into(), start: [2.5, 1.5, std::f64::consts::FRAC_PI_4], arc_length: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegrabilityParams {
    /// Grid points per chart axis.
    pub resolution: usize,
}

impl Default for IntegrabilityParams {
    fn default() -> Self {
        Self { resolution: 8 }
    }
}

/// Contents of `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub trace: TraceParams,
    #[serde(default)]
    pub ridges: RidgesParams,
    #[serde(default)]
    pub rotation: RotationParams,
    #[serde(default)]
    pub regimes: RegimesParams,
    #[serde(default)]
    pub cansec: CansecParams,
    #[serde(default)]
    pub integrability: IntegrabilityParams,
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameters(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if o.rel_tol.is_some() {
            self.tolerances.rel_tol = o.rel_tol;
        }
        if o.abs_tol.is_some() {
            self.tolerances.abs_tol = o.abs_tol;
        }
    }

    pub fn integrator(&self) -> IntegratorParams {
        let mut p = IntegratorParams::default();
        if let Some(r) = self.tolerances.rel_tol {
            p.rel_tol = r;
        }
        if let Some(a) = self.tolerances.abs_tol {
            p.abs_tol = a;
        }
        p
    }

    /// SHA-256 of the effective configuration without the output path.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// Block written into every output.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub surface: SurfaceSpec,
    pub integrator: IntegratorParams,
    pub terminations: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config_hash: config.hash(),
            seed: config.seed,
            surface: config.surface.clone(),
            integrator: config.integrator(),
            terminations: Vec::new(),
        }
    }
}
