//! JSON instance files: a pure state or a density matrix plus a list of
//! observables, with complex numbers written as `[re, im]` pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::explorer::Instance;
use crate::hilbert::{CMatrix, DensityMatrix, Observable, StateVector, C64};
use crate::moments::{moments_from_density, moments_from_state, DimensionalScales, MomentSet};
use crate::tolerance::DEFAULT_TOL;

pub const SCHEMA_VERSION: &str = "1";

pub type ComplexPair = [f64; 2];
pub type MatrixRows = Vec<Vec<ComplexPair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default = "default_schema")]
    pub schema_version: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<ComplexPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<MatrixRows>,
    pub observables: Vec<MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

fn default_schema() -> String {
    SCHEMA_VERSION.to_string()
}

/// The physical state an instance describes.
#[derive(Debug, Clone, PartialEq)]
pub enum PreparedState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

/// A validated instance file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedInstance {
    pub state: PreparedState,
    pub observables: Vec<Observable>,
    pub scales: Option<DimensionalScales>,
}

impl LoadedInstance {
    pub fn dim(&self) -> usize {
        match &self.state {
            PreparedState::Pure(psi) => psi.dim(),
            PreparedState::Mixed(w) => w.dim(),
        }
    }

    pub fn moments(&self) -> crate::Result<MomentSet> {
        match &self.state {
            PreparedState::Pure(psi) => moments_from_state(&self.observables, psi, self.scales.as_ref()),
            PreparedState::Mixed(w) => moments_from_density(&self.observables, w),
        }
    }
}

pub fn pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

pub fn matrix_rows(m: &CMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect())
        .collect()
}

fn parse_matrix(rows: &MatrixRows, dim: usize, what: &str) -> Result<CMatrix, String> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(format!("{what} must be a {dim}x{dim} matrix"));
    }
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        let [re, im] = rows[r][c];
        C64::new(re, im)
    }))
}

impl InstanceFile {
    pub fn from_pure(psi: &StateVector, observables: &[Observable]) -> Self {
        Self {
            schema_version: default_schema(),
            dim: psi.dim(),
            state: Some(psi.components().iter().copied().map(pair).collect()),
            density: None,
            observables: observables.iter().map(|a| matrix_rows(a.matrix())).collect(),
            scales: None,
            meta: None,
        }
    }

    pub fn from_mixed(w: &DensityMatrix, observables: &[Observable]) -> Self {
        Self {
            schema_version: default_schema(),
            dim: w.dim(),
            state: None,
            density: Some(matrix_rows(w.matrix())),
            observables: observables.iter().map(|a| matrix_rows(a.matrix())).collect(),
            scales: None,
            meta: None,
        }
    }

    pub fn from_instance(inst: &Instance) -> Self {
        Self::from_pure(&inst.state, &inst.observables)
    }

    pub fn with_meta(mut self, meta: serde_json::Value) -> Self {
        self.meta = Some(meta);
        self
    }

    /// Checks every invariant and builds the typed instance. Error messages
    /// name the violated invariant.
    pub fn validate(&self, tol: f64) -> Result<LoadedInstance, String> {
        let dim = self.dim;
        if dim == 0 {
            return Err("dim must be >= 1".into());
        }
        let state = match (&self.state, &self.density) {
            (Some(_), Some(_)) => return Err("exactly one of state/density must be present, found both".into()),
            (None, None) => return Err("exactly one of state/density must be present, found neither".into()),
            (Some(s), None) => {
                if s.len() != dim {
                    return Err(format!("state must have {dim} components, got {}", s.len()));
                }
                let psi = StateVector::new(s.iter().map(|&[re, im]| C64::new(re, im)).collect())
                    .map_err(|e| format!("state: {e}"))?;
                if !psi.is_normalized(tol) {
                    return Err(format!("state must be normalized, |psi|^2 = {}", psi.norm_sqr()));
                }
                PreparedState::Pure(psi)
            }
            (None, Some(rows)) => {
                let m = parse_matrix(rows, dim, "density")?;
                PreparedState::Mixed(DensityMatrix::with_tolerance(m, tol).map_err(|e| format!("density: {e}"))?)
            }
        };
        if self.observables.is_empty() {
            return Err("at least one observable is required".into());
        }
        let observables = self
            .observables
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let m = parse_matrix(rows, dim, &format!("observable {k}"))?;
                Observable::with_tolerance(m, tol).map_err(|e| format!("observable {k}: {e}"))
            })
            .collect::<Result<Vec<_>, String>>()?;
        let scales = match &self.scales {
            None => None,
            Some(d) => {
                if d.len() != observables.len() {
                    return Err(format!(
                        "scales must have one entry per observable ({}), got {}",
                        observables.len(),
                        d.len()
                    ));
                }
                Some(DimensionalScales::new(d.clone()).map_err(|e| format!("scales: {e}"))?)
            }
        };
        Ok(LoadedInstance {
            state,
            observables,
            scales,
        })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed instance file {}: {e}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

pub fn load_validated(path: &Path) -> Result<LoadedInstance, String> {
    InstanceFile::load(path)?.validate(DEFAULT_TOL)
}
