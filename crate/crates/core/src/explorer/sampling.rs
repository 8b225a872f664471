use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::stream_rng;
use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, CVector, DensityMatrix, Observable, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    HaarState,
    RandomHermitian,
    RandomDensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub dim: usize,
    pub n_observables: usize,
    pub seed: u64,
    pub ensemble: Ensemble,
}

impl RandomSpec {
    pub fn new(dim: usize, n_observables: usize, seed: u64, ensemble: Ensemble) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Precondition(format!("random spec needs dim >= 2, got {dim}")));
        }
        if n_observables < 2 {
            return Err(Error::Precondition(format!(
                "random spec needs at least 2 observables, got {n_observables}"
            )));
        }
        Ok(Self {
            dim,
            n_observables,
            seed,
            ensemble,
        })
    }

    fn expect(&self, ensemble: Ensemble) -> Result<()> {
        if self.ensemble == ensemble {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "spec ensemble is {:?}, expected {ensemble:?}",
                self.ensemble
            )))
        }
    }
}

/// Standard complex normal: real and imaginary parts N(0, 1/2).
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng))
}

/// Uniformly distributed unit vector in `C^dim`.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
        let n = v.norm();
        if n > 0.0 {
            return StateVector::from_vector(v.unscale(n)).expect("finite nonempty vector");
        }
    }
}

/// `(G + G^dagger)/2` with `G` complex Ginibre.
pub fn gaussian_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Observable {
    let g = ginibre(dim, rng);
    Observable::new((&g + g.adjoint()).unscale(2.0)).expect("Hermitian by construction")
}

/// `G G^dagger / Tr(G G^dagger)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, rng);
    let w = &g * g.adjoint();
    let w = (&w + w.adjoint()).unscale(2.0);
    let tr = w.trace().re;
    DensityMatrix::new(w.unscale(tr)).expect("valid density matrix by construction")
}

/// Haar unitary from the QR decomposition of a Ginibre matrix with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, k)] *= ph;
        }
    }
    q
}

pub fn sample_state(spec: &RandomSpec) -> Result<StateVector> {
    spec.expect(Ensemble::HaarState)?;
    Ok(haar_state(spec.dim, &mut stream_rng(spec.seed, 0)))
}

pub fn sample_observable(spec: &RandomSpec) -> Result<Observable> {
    spec.expect(Ensemble::RandomHermitian)?;
    Ok(gaussian_hermitian(spec.dim, &mut stream_rng(spec.seed, 0)))
}

pub fn sample_density(spec: &RandomSpec) -> Result<DensityMatrix> {
    spec.expect(Ensemble::RandomDensity)?;
    Ok(random_density(spec.dim, &mut stream_rng(spec.seed, 0)))
}
