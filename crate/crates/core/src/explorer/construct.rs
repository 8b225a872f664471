use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{gaussian_hermitian, haar_state};
use crate::error::{check_dim, Error, Result};
use crate::hilbert::{CMatrix, CVector, Observable, StateVector, C64};
use crate::moments::{moments_from_state, normalized_correlations};
use crate::relations::{forbidden_region_check, gur_normalized, gur_raw, gur_weakened, RhoSigmaPoint};
use crate::tolerance::Tolerance;

/// A pure state together with the observables measured in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub state: StateVector,
    pub observables: Vec<Observable>,
}

/// Normalized correlations and relation margins realized by an [`Instance`]
/// of three observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizedPoint {
    pub rho12: f64,
    pub rho23: f64,
    pub rho31: f64,
    pub sigma_sum: f64,
    pub cos_sigma: f64,
    pub degenerate: bool,
    pub gur_raw_margin: f64,
    pub gur_raw_satisfied: bool,
    pub gur_normalized_margin: Option<f64>,
    pub gur_weakened_margin: Option<f64>,
    pub in_forbidden_region: bool,
}

impl RealizedPoint {
    pub fn rhos(&self) -> [f64; 3] {
        [self.rho12, self.rho23, self.rho31]
    }

    pub fn distance_to(&self, target: [f64; 3]) -> f64 {
        self.rhos()
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl Instance {
    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, n_observables: usize, rng: &mut R) -> Self {
        Self {
            state: haar_state(dim, rng),
            observables: (0..n_observables).map(|_| gaussian_hermitian(dim, rng)).collect(),
        }
    }

    /// Evaluates the three-observable relations for this instance.
    pub fn realize(&self, tol: Tolerance) -> Result<RealizedPoint> {
        check_dim(3, self.observables.len())?;
        let m = moments_from_state(&self.observables, &self.state, None)?;
        let raw = gur_raw(&m, tol)?;
        let nc = normalized_correlations(&m);
        let (rho12, rho23, rho31) = nc.rho_triple().expect("three observables");
        let sigma_sum = nc.sigma_sum.expect("three observables");
        let degenerate = nc.any_degenerate();
        let (norm_margin, weak_margin) = if degenerate {
            (None, None)
        } else {
            let p = RhoSigmaPoint::from_correlations(&nc)?;
            (
                Some(gur_normalized(&p, tol)?.margin),
                Some(gur_weakened(p.rho12, p.rho23, p.rho31, tol)?.margin),
            )
        };
        Ok(RealizedPoint {
            rho12,
            rho23,
            rho31,
            sigma_sum,
            cos_sigma: sigma_sum.cos(),
            degenerate,
            gur_raw_margin: raw.margin,
            gur_raw_satisfied: raw.satisfied,
            gur_normalized_margin: norm_margin,
            gur_weakened_margin: weak_margin,
            in_forbidden_region: !degenerate && forbidden_region_check(rho12, rho23, rho31),
        })
    }

    /// Gaussian perturbation of state and observables with relative size `step`.
    pub fn perturbed<R: Rng + ?Sized>(&self, step: f64, rng: &mut R) -> Self {
        let d = self.dim();
        let noise = haar_state(d, rng);
        let v = self.state.as_vector() + noise.as_vector().scale(step);
        let state = StateVector::from_vector(v.unscale(v.norm())).expect("finite perturbation");
        let observables = self
            .observables
            .iter()
            .map(|a| {
                let size = a.matrix().norm() / (d as f64).sqrt();
                let h = gaussian_hermitian(d, rng);
                Observable::new(a.matrix() + h.matrix().scale(step * size.max(1e-3)))
                    .expect("Hermitian perturbation")
            })
            .collect();
        Self { state, observables }
    }
}

/// Builds a state in `C^dim` and observables whose correlator matrix is the
/// given PSD matrix `g`.
///
/// With `psi = e_0` and vectors `v_i` orthogonal to it satisfying
/// `(v_i, v_j) = g_ij`, the observables `A_i = psi v_i^dagger + v_i psi^dagger`
/// have zero mean and `dA_i psi = v_i`. Needs `dim > rank(g)`.
pub fn realize_correlations(g: &CMatrix, dim: usize) -> Result<Instance> {
    let n = g.nrows();
    if !crate::hilbert::is_hermitian(g, 1e-12) {
        return Err(Error::Precondition("target correlator matrix must be Hermitian".into()));
    }
    let eig = g.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |a, &x| a.max(x.abs())).max(1.0);
    if eig.eigenvalues.iter().any(|&l| l < -1e-12 * scale) {
        return Err(Error::Precondition("target correlator matrix is not PSD".into()));
    }
    let kept: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 1e-14 * scale).collect();
    if dim < kept.len() + 1 {
        return Err(Error::Precondition(format!(
            "rank {} correlations need dim >= {}, got {dim}",
            kept.len(),
            kept.len() + 1
        )));
    }
    // Column i of V = diag(sqrt(lambda)) U^dagger is v_i.
    let mut vecs = vec![CVector::zeros(dim); n];
    for (row, &k) in kept.iter().enumerate() {
        let s = eig.eigenvalues[k].sqrt();
        for (i, v) in vecs.iter_mut().enumerate() {
            v[row + 1] = eig.eigenvectors[(i, k)].conj() * s;
        }
    }
    let psi = StateVector::basis(dim, 0);
    let observables = vecs
        .iter()
        .map(|v| {
            let outer = psi.as_vector() * v.adjoint();
            Observable::new(&outer + outer.adjoint())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance {
        state: psi,
        observables,
    })
}

/// Correlator matrix with unit dispersions realizing `(rho_12, rho_23,
/// rho_31)` and phase sum `sigma_sum` (all of the phase placed on pair 12).
pub fn unit_correlation_matrix(rho: [f64; 3], sigma_sum: f64) -> CMatrix {
    let one = C64::new(1.0, 0.0);
    let c12 = C64::from_polar(rho[0], sigma_sum);
    let c23 = C64::new(rho[1], 0.0);
    let c31 = C64::new(rho[2], 0.0);
    CMatrix::from_row_slice(3, 3, &[one, c12, c31.conj(), c12.conj(), one, c23, c31, c23.conj(), one])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::stream_rng;
    use approx::assert_abs_diff_eq;

    #[test]
    fn construction_reproduces_target() {
        let g = unit_correlation_matrix([0.4, 0.3, 0.5], 1.1);
        let inst = realize_correlations(&g, 5).unwrap();
        let p = inst.realize(Tolerance::default()).unwrap();
        assert_abs_diff_eq!(p.rho12, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(p.rho23, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(p.rho31, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.cos_sigma, 1.1_f64.cos(), epsilon = 1e-12);
    }

    #[test]
    fn construction_needs_room_and_psd() {
        let g = unit_correlation_matrix([0.0, 0.0, 0.0], 0.0);
        assert!(realize_correlations(&g, 3).is_err());
        assert!(realize_correlations(&g, 4).is_ok());
        let bad = unit_correlation_matrix([0.9, 0.3, 0.9], 0.0);
        assert!(realize_correlations(&bad, 6).is_err());
    }

    #[test]
    fn rank_one_target_fits_in_dim_two() {
        let g = unit_correlation_matrix([1.0, 1.0, 1.0], 0.0);
        let p = realize_correlations(&g, 2).unwrap().realize(Tolerance::default()).unwrap();
        assert_abs_diff_eq!(p.rho12, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn perturbation_keeps_validity() {
        let mut rng = stream_rng(1, 0);
        let inst = Instance::random(4, 3, &mut rng);
        let p = inst.perturbed(0.1, &mut rng);
        assert!(p.state.is_normalized(1e-12));
        assert_eq!(p.observables.len(), 3);
    }
}
