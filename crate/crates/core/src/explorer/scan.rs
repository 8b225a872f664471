use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relations::{gur_normalized, RhoSigmaPoint};
use crate::tolerance::Tolerance;

/// Absolute tolerance separating `boundary` cells from the other classes.
pub const DEFAULT_SCAN_TOL: f64 = 1e-12;

/// Regular grid over `(rho_12, rho_23, rho_31, Sigma)`, with `Sigma` on
/// `[0, pi]` so that `cos Sigma` covers `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rho_steps: usize,
    pub sigma_steps: usize,
    /// Inclusive `[lo, hi]` per axis, in the order rho12, rho23, rho31.
    pub rho_bounds: [(f64, f64); 3],
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            rho_steps: 21,
            sigma_steps: 13,
            rho_bounds: [(0.0, 1.0); 3],
        }
    }
}

impl GridSpec {
    pub fn new(rho_steps: usize, sigma_steps: usize) -> Result<Self> {
        let g = Self {
            rho_steps,
            sigma_steps,
            ..Self::default()
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_bounds(mut self, bounds: [(f64, f64); 3]) -> Result<Self> {
        self.rho_bounds = bounds;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho_steps < 2 {
            return Err(Error::Precondition(format!("rho_steps must be >= 2, got {}", self.rho_steps)));
        }
        if self.sigma_steps < 1 {
            return Err(Error::Precondition("sigma_steps must be >= 1".into()));
        }
        for &(lo, hi) in &self.rho_bounds {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(Error::Precondition(format!("invalid rho bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.rho_steps.pow(3) * self.sigma_steps
    }

    fn rho_value(&self, axis: usize, k: usize) -> f64 {
        let (lo, hi) = self.rho_bounds[axis];
        lo + (hi - lo) * (k as f64 / (self.rho_steps - 1) as f64)
    }

    fn sigma_value(&self, k: usize) -> f64 {
        if self.sigma_steps == 1 {
            0.0
        } else {
            PI * (k as f64 / (self.sigma_steps - 1) as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Allowed,
    Forbidden,
    Boundary,
}

impl Classification {
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        if margin.abs() <= tol {
            Self::Boundary
        } else if margin < -tol {
            Self::Forbidden
        } else {
            Self::Allowed
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Allowed => "allowed",
            Self::Forbidden => "forbidden",
            Self::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub point: RhoSigmaPoint,
    pub sigma: f64,
    pub margin: f64,
    pub class: Classification,
}

/// Evaluates the normalized three-observable relation on every grid point.
/// Cells are ordered lexicographically by (rho12, rho23, rho31, Sigma) index.
pub fn scan_grid(g: &GridSpec, tol: f64) -> Result<Vec<ScanCell>> {
    g.validate()?;
    let (r, s) = (g.rho_steps, g.sigma_steps);
    (0..g.cell_count())
        .into_par_iter()
        .map(|idx| {
            let ks = idx % s;
            let i31 = (idx / s) % r;
            let i23 = (idx / (s * r)) % r;
            let i12 = idx / (s * r * r);
            let sigma = g.sigma_value(ks);
            let point = RhoSigmaPoint::new(
                g.rho_value(0, i12),
                g.rho_value(1, i23),
                g.rho_value(2, i31),
                sigma.cos(),
            )?;
            let margin = gur_normalized(&point, Tolerance::new(tol))?.margin;
            Ok(ScanCell {
                point,
                sigma,
                margin,
                class: Classification::from_margin(margin, tol),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_grid_size_and_order() {
        let cells = scan_grid(&GridSpec::default(), DEFAULT_SCAN_TOL).unwrap();
        assert_eq!(cells.len(), 21 * 21 * 21 * 13);
        assert_eq!(cells[0].point.rhos(), [0.0, 0.0, 0.0]);
        assert_eq!(cells[1].sigma, PI / 12.0);
        assert_eq!(cells[13].point.rhos(), [0.0, 0.0, 0.05]);
        assert_eq!(cells.last().unwrap().point.rhos(), [1.0, 1.0, 1.0]);
        assert_eq!(cells.last().unwrap().point.cos_sigma, -1.0);
    }

    #[test]
    fn origin_is_allowed() {
        let g = GridSpec::new(2, 1).unwrap();
        let cells = scan_grid(&g, DEFAULT_SCAN_TOL).unwrap();
        assert_eq!(cells[0].margin, 1.0);
        assert_eq!(cells[0].class, Classification::Allowed);
    }

    #[test]
    fn half_cube_has_no_forbidden_cells() {
        let g = GridSpec::new(11, 13).unwrap().with_bounds([(0.0, 0.5); 3]).unwrap();
        let cells = scan_grid(&g, DEFAULT_SCAN_TOL).unwrap();
        assert!(cells.iter().all(|c| c.class != Classification::Forbidden));
        let corner = cells.last().unwrap();
        assert_abs_diff_eq!(corner.margin, 0.0);
        assert_eq!(corner.class, Classification::Boundary);
    }

    #[test]
    fn forbidden_box_is_forbidden_at_cos_one() {
        let g = GridSpec::new(9, 1)
            .unwrap()
            .with_bounds([(0.867, 1.0), (0.0, 0.499), (0.867, 1.0)])
            .unwrap();
        let cells = scan_grid(&g, DEFAULT_SCAN_TOL).unwrap();
        assert!(cells.iter().all(|c| c.class == Classification::Forbidden));
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(GridSpec::new(1, 3).is_err());
        assert!(GridSpec::new(3, 0).is_err());
        assert!(GridSpec::default().with_bounds([(0.5, 0.2), (0.0, 1.0), (0.0, 1.0)]).is_err());
    }
}
