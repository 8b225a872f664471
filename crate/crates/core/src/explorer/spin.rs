use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::haar_state;
use super::stream_rng;
use crate::error::{Error, Result};
use crate::hilbert::{Observable, StateVector};
use crate::moments::{moments_from_state, normalized_correlations};
use crate::relations::{forbidden_region_check, gur_normalized, gur_raw, RhoSigmaPoint};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn observable(self) -> Observable {
        match self {
            Pauli::X => Observable::pauli_x(),
            Pauli::Y => Observable::pauli_y(),
            Pauli::Z => Observable::pauli_z(),
        }
    }
}

impl std::str::FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Pauli::X),
            "y" => Ok(Pauli::Y),
            "z" => Ok(Pauli::Z),
            other => Err(Error::Precondition(format!("unknown Pauli projection '{other}'"))),
        }
    }
}

/// `s1 ⊗ I ⊗ I`, `I ⊗ s2 ⊗ I`, `I ⊗ I ⊗ s3` on three spin-1/2 particles.
pub fn spin_observables(projections: [Pauli; 3]) -> Vec<Observable> {
    let id = Observable::identity(2);
    let [a, b, c] = projections.map(Pauli::observable);
    vec![
        a.kron(&id).kron(&id),
        id.kron(&b).kron(&id),
        id.kron(&id).kron(&c),
    ]
}

/// `(|000> + |111>)/sqrt(2)`.
pub fn ghz_state() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![0.0; 8];
    v[0] = s;
    v[7] = s;
    StateVector::from_real(&v).expect("finite")
}

/// `|000>`.
pub fn product_state() -> StateVector {
    StateVector::basis(8, 0)
}

/// One evaluated three-spin state. For degenerate states the `rho` of the
/// flagged pairs is 0 and `margin` is the raw (unnormalized) margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinRow {
    pub rho12: f64,
    pub rho23: f64,
    pub rho31: f64,
    pub cos_sigma: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub degenerate: bool,
    pub in_forbidden_region: bool,
}

pub fn evaluate_spin_state(state: &StateVector, projections: [Pauli; 3], tol: Tolerance) -> Result<SpinRow> {
    let m = moments_from_state(&spin_observables(projections), state, None)?;
    let nc = normalized_correlations(&m);
    let (rho12, rho23, rho31) = nc.rho_triple().expect("three observables");
    let cos_sigma = nc.cos_sigma().expect("three observables");
    let degenerate = nc.any_degenerate();
    let report = if degenerate {
        gur_raw(&m, tol)?
    } else {
        gur_normalized(&RhoSigmaPoint::from_correlations(&nc)?, tol)?
    };
    Ok(SpinRow {
        rho12,
        rho23,
        rho31,
        cos_sigma,
        margin: report.margin,
        satisfied: report.satisfied,
        degenerate,
        in_forbidden_region: !degenerate && forbidden_region_check(rho12, rho23, rho31),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinDemoConfig {
    pub seed: u64,
    pub trials: usize,
    pub projections: [Pauli; 3],
    pub tol: Tolerance,
}

impl Default for SpinDemoConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 10_000,
            projections: [Pauli::X, Pauli::X, Pauli::X],
            tol: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinDemoReport {
    pub config: SpinDemoConfig,
    pub ghz: SpinRow,
    pub product: SpinRow,
    pub samples: Vec<SpinRow>,
    pub violations: usize,
    pub forbidden_hits: usize,
    pub degenerate: usize,
    /// Statistics of rho12, rho23, rho31 over the non-degenerate samples.
    pub rho_stats: Option<[RhoStats; 3]>,
}

/// Polarization-correlation demonstration on random three-spin states.
pub fn spin_demo(config: &SpinDemoConfig) -> Result<SpinDemoReport> {
    let ghz = evaluate_spin_state(&ghz_state(), [Pauli::Z; 3], config.tol)?;
    let product = evaluate_spin_state(&product_state(), [Pauli::X; 3], config.tol)?;
    let samples = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let psi = haar_state(8, &mut stream_rng(config.seed, t as u64));
            evaluate_spin_state(&psi, config.projections, config.tol)
        })
        .collect::<Result<Vec<_>>>()?;

    let regular: Vec<&SpinRow> = samples.iter().filter(|r| !r.degenerate).collect();
    let rho_stats = (!regular.is_empty()).then(|| {
        let stats = |f: fn(&SpinRow) -> f64| {
            let vals = regular.iter().map(|r| f(r));
            RhoStats {
                min: vals.clone().fold(f64::INFINITY, f64::min),
                max: vals.clone().fold(f64::NEG_INFINITY, f64::max),
                mean: vals.sum::<f64>() / regular.len() as f64,
            }
        };
        [stats(|r| r.rho12), stats(|r| r.rho23), stats(|r| r.rho31)]
    });

    Ok(SpinDemoReport {
        config: config.clone(),
        ghz,
        product,
        violations: samples.iter().filter(|r| !r.satisfied).count(),
        forbidden_hits: samples.iter().filter(|r| r.in_forbidden_region).count(),
        degenerate: samples.len() - regular.len(),
        samples,
        rho_stats,
    })
}
