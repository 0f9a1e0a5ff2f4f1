use std::path::PathBuf;

use mitbag_core::geometry::{point_validity_floor, CurvatureData, ModelGeometry};
use mitbag_core::numerics::ToleranceConfig;
use serde::{Deserialize, Serialize};

use crate::error::VerifyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Transverse,
    Exterior,
    Dirac,
    Robin,
    All,
}

impl Suite {
    /// The concrete suites this one runs, in report order.
    pub fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Transverse,
                Suite::Exterior,
                Suite::Dirac,
                Suite::Robin,
            ],
            s => vec![s],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

pub const TRANSVERSE_M_GRID: [f64; 5] = [25.0, 100.0, 400.0, 1600.0, 6400.0];
pub const EXTERIOR_M_GRID: [f64; 3] = [1e2, 1e3, 1e4];
pub const DIRAC_M_GRID: [f64; 6] = [50.0, 100.0, 200.0, 400.0, 800.0, 1600.0];

/// The `(kappa, K)` box `{-3,-1,0,1,3} x {-2,0,1,2}`.
pub fn default_curvature_grid() -> Vec<(f64, f64)> {
    [-3.0, -1.0, 0.0, 1.0, 3.0]
        .iter()
        .flat_map(|&k| [-2.0, 0.0, 1.0, 2.0].map(|g| (k, g)))
        .collect()
}

fn default_geometry() -> ModelGeometry {
    ModelGeometry::BallInterior { radius: 1.0 }
}

/// One verification run. Missing grids fall back to per-suite defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature_grid: Option<Vec<(f64, f64)>>,
    #[serde(default = "default_geometry")]
    pub geometry: ModelGeometry,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    pub output_path: PathBuf,
    #[serde(default)]
    pub format: Format,
    /// Seed for the random test functions.
    #[serde(default)]
    pub seed: u64,
    /// Record wall-clock time per check. Off by default so that reports are
    /// byte-identical between runs.
    #[serde(default)]
    pub record_runtime: bool,
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| VerifyError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn m_grid_for(&self, suite: Suite) -> Vec<f64> {
        if let Some(g) = &self.m_grid {
            return g.clone();
        }
        match suite {
            Suite::Transverse => TRANSVERSE_M_GRID.to_vec(),
            Suite::Exterior => EXTERIOR_M_GRID.to_vec(),
            Suite::Dirac | Suite::Robin | Suite::All => DIRAC_M_GRID.to_vec(),
        }
    }

    pub fn curvatures(&self) -> Vec<(f64, f64)> {
        self.curvature_grid
            .clone()
            .unwrap_or_else(default_curvature_grid)
    }

    /// Ball radius for the Dirac and Robin suites.
    pub fn radius(&self) -> Option<f64> {
        match self.geometry {
            ModelGeometry::BallInterior { radius } | ModelGeometry::BallExterior { radius } => {
                Some(radius)
            }
            ModelGeometry::FlatTorusHalfSpace { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |msg: String| Err(VerifyError::Config(msg));
        if let Some(g) = &self.m_grid {
            if g.is_empty() {
                return bad("m_grid is empty".into());
            }
            if g.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
                return bad("m_grid entries must be positive and finite".into());
            }
            if g.windows(2).any(|w| w[0] >= w[1]) {
                return bad("m_grid must be strictly ascending".into());
            }
        }
        if let Some(c) = &self.curvature_grid {
            if c.is_empty() {
                return bad("curvature_grid is empty".into());
            }
        }
        self.geometry
            .validate()
            .map_err(|e| VerifyError::Config(e.to_string()))?;
        self.tolerances
            .validate()
            .map_err(|e| VerifyError::Config(e.to_string()))?;
        if self.output_path.as_os_str().is_empty() {
            return bad("output_path is empty".into());
        }
        for suite in self.suite.members() {
            let grid = self.m_grid_for(suite);
            match suite {
                Suite::Transverse => {
                    for (k, g) in self.curvatures() {
                        let c = CurvatureData::new(k, g)
                            .map_err(|e| VerifyError::Config(e.to_string()))?;
                        let floor = point_validity_floor(&c);
                        if grid.iter().filter(|&&m| m >= floor).count() < 2 {
                            return bad(format!(
                                "curvature ({k}, {g}) needs two grid masses above its validity floor {floor}"
                            ));
                        }
                    }
                }
                Suite::Exterior => {
                    if grid.len() < 2 {
                        return bad("the exterior suite needs at least two masses".into());
                    }
                }
                Suite::Dirac | Suite::Robin => {
                    if grid.len() < 4 {
                        return bad("slope fits with drift need at least four masses".into());
                    }
                    if self.radius().is_none() {
                        return bad("the Dirac and Robin suites need a ball geometry".into());
                    }
                }
                Suite::All => unreachable!(),
            }
        }
        Ok(())
    }
}
