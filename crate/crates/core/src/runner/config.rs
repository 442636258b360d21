use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::degree::DegreeForm;
use crate::error::{Error, Result};
use crate::hamiltonian::{ModelParams, DEFAULT_MAX_SITES};
use crate::lattice::LatticeSpec;
use crate::spectral::GibbsSign;
use crate::vorticity::TraceSlot;

pub const PRESETS: &[&str] = &["fig1a", "fig1b", "fig1c", "fig2", "fig2a", "fig3", "fig4", "table1", "antiferro"];

/// A scalar or a list of scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreeTag {
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Free(FreeTag),
    Winding {
        degree: OneOrMany<i32>,
        #[serde(default)]
        phase: f64,
    },
}

impl BoundarySpec {
    pub fn winding(degrees: Vec<i32>) -> Self {
        BoundarySpec::Winding { degree: OneOrMany::Many(degrees), phase: 0.0 }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, BoundarySpec::Free(_))
    }

    /// Degrees to sweep; `None` for a free lattice.
    pub fn degrees(&self) -> Vec<Option<i32>> {
        match self {
            BoundarySpec::Free(_) => vec![None],
            BoundarySpec::Winding { degree, .. } => degree.to_vec().into_iter().map(Some).collect(),
        }
    }

    pub fn phase(&self) -> f64 {
        match self {
            BoundarySpec::Free(_) => 0.0,
            BoundarySpec::Winding { phase, .. } => *phase,
        }
    }
}

fn default_n() -> f64 {
    1.0
}

fn default_beta() -> OneOrMany<f64> {
    OneOrMany::One(1.0)
}

fn default_contours() -> Vec<usize> {
    vec![1, 2]
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

fn default_kernel_tol() -> f64 {
    1e-9
}

fn default_idos_points() -> usize {
    400
}

fn default_max_sites() -> usize {
    DEFAULT_MAX_SITES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub lattice: LatticeSpec,
    #[serde(default = "default_n")]
    pub n: f64,
    pub k: OneOrMany<f64>,
    #[serde(default = "default_beta")]
    pub beta: OneOrMany<f64>,
    pub boundary: BoundarySpec,
    #[serde(default = "default_contours")]
    pub contour_m: Vec<usize>,
    #[serde(default)]
    pub gibbs_sign: GibbsSign,
    #[serde(default)]
    pub trace_slot: TraceSlot,
    #[serde(default)]
    pub degree_form: DegreeForm,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default = "default_kernel_tol")]
    pub kernel_tol: f64,
    #[serde(default = "default_idos_points")]
    pub idos_points: usize,
    #[serde(default = "default_max_sites")]
    pub max_sites: usize,
}

impl ExperimentConfig {
    fn base(name: &str, lattice: LatticeSpec, k: Vec<f64>, boundary: BoundarySpec) -> Self {
        Self {
            name: name.into(),
            lattice,
            n: 1.0,
            k: OneOrMany::Many(k),
            beta: default_beta(),
            boundary,
            contour_m: default_contours(),
            gibbs_sign: GibbsSign::default(),
            trace_slot: TraceSlot::default(),
            degree_form: DegreeForm::default(),
            outputs: PathBuf::from("out").join(name),
            kernel_tol: default_kernel_tol(),
            idos_points: default_idos_points(),
            max_sites: DEFAULT_MAX_SITES,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        let total = |w, h| LatticeSpec::from_total(w, h, 2);
        let free = LatticeSpec::free(19, 29);
        let cfg = match name {
            "fig1a" => Self::base(name, free, vec![1.0], BoundarySpec::Free(FreeTag::Free)),
            "fig1b" => Self::base(name, free, vec![10.0], BoundarySpec::Free(FreeTag::Free)),
            "fig1c" => Self::base(name, total(23, 33)?, vec![10.0], BoundarySpec::winding(vec![1])),
            "fig2" => Self::base(name, total(15, 19)?, vec![1.0], BoundarySpec::winding(vec![0, 1])),
            "fig2a" => Self::base(name, total(15, 19)?, vec![1.0], BoundarySpec::winding(vec![0])),
            "fig3" => Self::base(name, total(15, 19)?, vec![10.0], BoundarySpec::winding(vec![0, 1, 2, 3])),
            "fig4" => Self {
                beta: OneOrMany::Many(vec![1.0, 8.0, 16.0]),
                ..Self::base(name, total(23, 33)?, vec![10.0], BoundarySpec::winding(vec![1]))
            },
            "table1" => Self::base(name, total(23, 33)?, vec![2.0, 10.0], BoundarySpec::winding(vec![1, 2, 3])),
            "antiferro" => Self::base(name, total(15, 19)?, vec![10.0], BoundarySpec::winding(vec![1])),
            other => {
                return Err(Error::Config(format!("unknown preset `{other}` (known: {})", PRESETS.join(", "))));
            }
        };
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn ks(&self) -> Vec<f64> {
        self.k.to_vec()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.beta.to_vec()
    }

    pub fn params(&self, k: f64) -> Result<ModelParams<f64>> {
        ModelParams::new(self.n, k)
    }

    /// Checks everything that can be checked before any numerics run.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("`{field}`: {msg}")));
        self.lattice.validate().map_err(|e| Error::Config(format!("`lattice`: {e}")))?;
        if self.lattice.total_sites() > self.max_sites {
            return bad(
                "lattice",
                format!("{} sites exceed max_sites = {}", self.lattice.total_sites(), self.max_sites),
            );
        }
        if self.ks().is_empty() {
            return bad("k", "at least one value required".into());
        }
        for k in self.ks() {
            self.params(k).map_err(|e| Error::Config(format!("`n`/`k`: {e}")))?;
        }
        if self.betas().is_empty() {
            return bad("beta", "at least one value required".into());
        }
        if let Some(b) = self.betas().into_iter().find(|b| !b.is_finite()) {
            return bad("beta", format!("{b} is not finite"));
        }
        match (&self.boundary, self.lattice.boundary_layers) {
            (BoundarySpec::Free(_), 0) => {}
            (BoundarySpec::Free(_), b) => {
                return bad("boundary", format!("\"free\" but lattice has {b} boundary layers"))
            }
            (BoundarySpec::Winding { .. }, 0) => {
                return bad("boundary", "winding given for a lattice without boundary layers".into())
            }
            (BoundarySpec::Winding { degree, phase }, _) => {
                if degree.to_vec().is_empty() {
                    return bad("boundary.degree", "at least one value required".into());
                }
                if !phase.is_finite() {
                    return bad("boundary.phase", "must be finite".into());
                }
            }
        }
        let rings = (self.lattice.inner_width.min(self.lattice.inner_height) + 1) / 2;
        for &m in &self.contour_m {
            if m == 0 || m > rings {
                return bad("contour_m", format!("{m} outside 1..={rings}"));
            }
        }
        if !(self.kernel_tol > 0.0) {
            return bad("kernel_tol", "must be positive".into());
        }
        if self.idos_points == 0 {
            return bad("idos_points", "must be positive".into());
        }
        Ok(())
    }
}
