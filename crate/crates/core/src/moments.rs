//! Second moments of observables: centered operators, dispersions, mixed
//! correlators, their Hermitian real/imaginary split, and the normalized
//! magnitude/phase parametrization.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::hilbert::{gram_matrix, CMatrix, DensityMatrix, Observable, StateVector, VectorSet, C64};
use crate::tolerance::{scale_of, DEFAULT_TOL};

/// Relative tolerance for the anticommutator/commutator cross-check.
pub const RJ_CHECK_TOL: f64 = 1e-10;

/// `sigma_i < DEGENERACY_THRESHOLD * (1 + |mean_i|)` marks a degenerate
/// dispersion.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentSource {
    PureState,
    DensityMatrix,
}

/// `A - <A> I` together with the mean it was centered on.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredOperator {
    pub base: Observable,
    pub mean: f64,
    pub centered: CMatrix,
}

impl CenteredOperator {
    fn new(base: &Observable, mean: f64) -> Self {
        let n = base.dim();
        let centered = base.matrix() - CMatrix::identity(n, n).scale(mean);
        Self {
            base: base.clone(),
            mean,
            centered,
        }
    }
}

/// Per-observable unit constants `d_i > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionalScales(Vec<f64>);

impl DimensionalScales {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if let Some(bad) = d.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Precondition(format!(
                "dimensional scales must be positive and finite, got {bad}"
            )));
        }
        Ok(Self(d))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Dispersions `sigma_i^2` and correlators `<i,j>` of a family of observables
/// in one state.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub sigma2: Vec<f64>,
    pub corr: CMatrix,
    pub means: Vec<f64>,
    pub source: MomentSource,
}

impl MomentSet {
    /// Builds a moment set from raw values, checking the Hermitian-pair and
    /// diagonal invariants. The Cauchy bound is left to the relations.
    pub fn from_raw(sigma2: Vec<f64>, corr: CMatrix, means: Vec<f64>, source: MomentSource) -> Result<Self> {
        let n = sigma2.len();
        check_dim(n, corr.nrows())?;
        check_dim(n, corr.ncols())?;
        check_dim(n, means.len())?;
        if let Some(s) = sigma2.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::Precondition(format!("dispersion must be nonnegative, got {s}")));
        }
        let scale = scale_of(corr.iter().map(|z| z.norm()));
        for i in 0..n {
            if (corr[(i, i)] - C64::new(sigma2[i], 0.0)).norm() > DEFAULT_TOL * scale {
                return Err(Error::Precondition(format!(
                    "diagonal correlator {i} must equal the dispersion"
                )));
            }
            for j in 0..i {
                if (corr[(i, j)] - corr[(j, i)].conj()).norm() > DEFAULT_TOL * scale {
                    return Err(Error::Precondition(format!(
                        "correlators ({i},{j}) and ({j},{i}) are not conjugate"
                    )));
                }
            }
        }
        Ok(Self {
            sigma2,
            corr,
            means,
            source,
        })
    }

    pub fn n(&self) -> usize {
        self.sigma2.len()
    }

    pub fn sigma(&self, i: usize) -> f64 {
        self.sigma2[i].sqrt()
    }

    pub fn corr(&self, i: usize, j: usize) -> C64 {
        self.corr[(i, j)]
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "observable index {i} out of range for {} observables",
                self.n()
            )))
        }
    }

    /// Matrix with `sigma_i^2` on the diagonal and `<i,j>` off it.
    pub fn moment_matrix(&self) -> CMatrix {
        let mut m = self.corr.clone();
        for i in 0..self.n() {
            m[(i, i)] = C64::new(self.sigma2[i], 0.0);
        }
        m
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.sigma(i) < DEGENERACY_THRESHOLD * (1.0 + self.means[i].abs())
    }

    /// Largest difference to another moment set, relative to `max(1, |x|)`.
    pub fn max_relative_difference(&self, other: &MomentSet) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.n() {
            let (a, b) = (self.sigma2[i], other.sigma2[i]);
            worst = worst.max((a - b).abs() / scale_of([a, b]));
            for j in 0..self.n() {
                let (a, b) = (self.corr[(i, j)], other.corr[(i, j)]);
                worst = worst.max((a - b).norm() / scale_of([a.norm(), b.norm()]));
            }
        }
        worst
    }
}

/// Expectations of `R = {dA_i, dA_j}/2` and `J = (-i/2)[dA_i, dA_j]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RJDecomposition {
    pub r: f64,
    pub j: f64,
}

/// Magnitudes `rho_ij`, phases `phi_ij` and, for three observables, the
/// phase sum `phi_12 + phi_23 + phi_31`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCorrelations {
    pub rho: DMatrix<f64>,
    pub phi: DMatrix<f64>,
    /// Raw phase sum; `None` unless there are exactly three observables.
    pub sigma_sum: Option<f64>,
    /// Phase sum wrapped to `(-pi, pi]`.
    pub sigma_sum_wrapped: Option<f64>,
    /// `degenerate[(i, j)]` is set when `sigma_i sigma_j` is numerically zero.
    pub degenerate: DMatrix<bool>,
}

impl NormalizedCorrelations {
    pub fn n(&self) -> usize {
        self.rho.nrows()
    }

    pub fn cos_sigma(&self) -> Option<f64> {
        self.sigma_sum.map(f64::cos)
    }

    pub fn any_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }

    /// `(rho_12, rho_23, rho_31)` for a triple.
    pub fn rho_triple(&self) -> Option<(f64, f64, f64)> {
        (self.n() == 3).then(|| (self.rho[(0, 1)], self.rho[(1, 2)], self.rho[(2, 0)]))
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

fn phase(z: C64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

fn expectation(op: &CMatrix, psi: &StateVector) -> C64 {
    let v = psi.as_vector();
    v.dotc(&(op * v))
}

pub fn center_observable(a: &Observable, psi: &StateVector) -> Result<CenteredOperator> {
    check_dim(a.dim(), psi.dim())?;
    psi.require_normalized(DEFAULT_TOL)?;
    let mean = expectation(a.matrix(), psi).re;
    Ok(CenteredOperator::new(a, mean))
}

/// `(psi, (dA)^2 psi)`, clamped at zero.
pub fn dispersion(a: &Observable, psi: &StateVector) -> Result<f64> {
    let c = center_observable(a, psi)?;
    let v = psi.as_vector();
    let value = v.dotc(&(&c.centered * (&c.centered * v))).re;
    Ok(value.max(0.0))
}

/// `(psi, dA_i dA_j psi)`.
pub fn correlator(ai: &Observable, aj: &Observable, psi: &StateVector) -> Result<C64> {
    check_dim(ai.dim(), aj.dim())?;
    let ci = center_observable(ai, psi)?;
    let cj = center_observable(aj, psi)?;
    Ok(expectation(&(&ci.centered * &cj.centered), psi))
}

/// Computes `r` and `j` from the anticommutator and commutator and checks
/// them against the real and imaginary parts of the correlator.
pub fn rj_split(ai: &Observable, aj: &Observable, psi: &StateVector) -> Result<RJDecomposition> {
    check_dim(ai.dim(), aj.dim())?;
    let ci = center_observable(ai, psi)?;
    let cj = center_observable(aj, psi)?;
    let ij = &ci.centered * &cj.centered;
    let ji = &cj.centered * &ci.centered;
    let r_op = (&ij + &ji).unscale(2.0);
    let j_op = (&ij - &ji) * C64::new(0.0, -0.5);
    let r = expectation(&r_op, psi).re;
    let j = expectation(&j_op, psi).re;

    let corr = expectation(&ij, psi);
    let si = expectation(&(&ci.centered * &ci.centered), psi).re.max(0.0).sqrt();
    let sj = expectation(&(&cj.centered * &cj.centered), psi).re.max(0.0).sqrt();
    let tol = RJ_CHECK_TOL * scale_of([si * sj, corr.norm()]);
    if (r - corr.re).abs() > tol || (j - corr.im).abs() > tol {
        return Err(Error::Numerical(format!(
            "r/j split disagrees with correlator: r = {r}, j = {j}, <i,j> = {corr}"
        )));
    }
    Ok(RJDecomposition { r, j })
}

fn fill_hermitian(n: usize, mut entry: impl FnMut(usize, usize) -> C64) -> (Vec<f64>, CMatrix) {
    let mut corr = CMatrix::zeros(n, n);
    let mut sigma2 = vec![0.0; n];
    for i in 0..n {
        let d = entry(i, i).re.max(0.0);
        sigma2[i] = d;
        corr[(i, i)] = C64::new(d, 0.0);
        for j in (i + 1)..n {
            let z = entry(i, j);
            corr[(i, j)] = z;
            corr[(j, i)] = z.conj();
        }
    }
    (sigma2, corr)
}

/// Moments of `observables` in the pure state `psi`.
///
/// With `scales`, the vectors `d_i^{-1} dA_i psi` are formed and their Gram
/// matrix, rescaled by `d_i d_j`, is required to reproduce the correlators.
/// The result does not depend on the scales.
pub fn moments_from_state(
    observables: &[Observable],
    psi: &StateVector,
    scales: Option<&DimensionalScales>,
) -> Result<MomentSet> {
    psi.require_normalized(DEFAULT_TOL)?;
    let centered = observables
        .iter()
        .map(|a| center_observable(a, psi))
        .collect::<Result<Vec<_>>>()?;
    let n = centered.len();
    let (sigma2, corr) = fill_hermitian(n, |i, j| {
        expectation(&(&centered[i].centered * &centered[j].centered), psi)
    });
    let means: Vec<f64> = centered.iter().map(|c| c.mean).collect();

    if let Some(scales) = scales {
        check_dim(n, scales.values().len())?;
        let d = scales.values();
        if n > 0 {
            let alphas = centered
                .iter()
                .zip(d)
                .map(|(c, &di)| StateVector::from_vector((&c.centered * psi.as_vector()).unscale(di)))
                .collect::<Result<Vec<_>>>()?;
            let g = gram_matrix(&VectorSet::new(alphas)?);
            for i in 0..n {
                for j in 0..n {
                    let rescaled = g.matrix()[(i, j)] * (d[i] * d[j]);
                    let tol = DEFAULT_TOL * scale_of([sigma2[i].sqrt() * sigma2[j].sqrt()]);
                    if (rescaled - corr[(i, j)]).norm() > tol {
                        return Err(Error::Numerical(format!(
                            "scale factors failed to cancel for pair ({i},{j})"
                        )));
                    }
                }
            }
        }
    }

    Ok(MomentSet {
        sigma2,
        corr,
        means,
        source: MomentSource::PureState,
    })
}

/// Trace-form moments `Tr W dA_i dA_j` with `dA_i` centered on `Tr W A_i`.
pub fn moments_from_density(observables: &[Observable], w: &DensityMatrix) -> Result<MomentSet> {
    let centered = observables
        .iter()
        .map(|a| {
            check_dim(w.dim(), a.dim())?;
            let mean = (w.matrix() * a.matrix()).trace().re;
            Ok(CenteredOperator::new(a, mean))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = centered.len();
    let (sigma2, corr) = fill_hermitian(n, |i, j| {
        (w.matrix() * &centered[i].centered * &centered[j].centered).trace()
    });
    Ok(MomentSet {
        sigma2,
        corr,
        means: centered.iter().map(|c| c.mean).collect(),
        source: MomentSource::DensityMatrix,
    })
}

/// `<i,j> / (sigma_i sigma_j) = rho_ij exp(i phi_ij)`. Pairs involving a
/// degenerate dispersion get `rho = 0`, `phi = 0` and are flagged.
pub fn normalized_correlations(m: &MomentSet) -> NormalizedCorrelations {
    let n = m.n();
    let mut rho = DMatrix::<f64>::zeros(n, n);
    let mut phi = DMatrix::<f64>::zeros(n, n);
    let mut degenerate = DMatrix::<bool>::from_element(n, n, false);
    let deg: Vec<bool> = (0..n).map(|i| m.is_degenerate(i)).collect();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if deg[i] || deg[j] {
                degenerate[(i, j)] = true;
                continue;
            }
            let z = m.corr(i, j);
            rho[(i, j)] = z.norm() / (m.sigma(i) * m.sigma(j));
            phi[(i, j)] = phase(z);
        }
    }
    let sigma_sum = (n == 3).then(|| phi[(0, 1)] + phi[(1, 2)] + phi[(2, 0)]);
    NormalizedCorrelations {
        rho,
        phi,
        sigma_sum,
        sigma_sum_wrapped: sigma_sum.map(wrap_phase),
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn up() -> StateVector {
        StateVector::basis(2, 0)
    }

    fn paulis() -> Vec<Observable> {
        vec![Observable::pauli_x(), Observable::pauli_y(), Observable::pauli_z()]
    }

    #[test]
    fn center_identity_gives_zero() {
        let psi = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let co = center_observable(&Observable::identity(2), &psi).unwrap();
        assert_abs_diff_eq!(co.mean, 1.0, epsilon = 1e-15);
        assert!(co.centered.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn center_pauli_z_and_x_on_up() {
        let co = center_observable(&Observable::pauli_z(), &up()).unwrap();
        assert_eq!(co.mean, 1.0);
        assert_eq!(co.centered, CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 0.0), c(-2.0, 0.0)])));
        let co = center_observable(&Observable::pauli_x(), &up()).unwrap();
        assert_eq!(co.mean, 0.0);
        assert_eq!(&co.centered, Observable::pauli_x().matrix());
    }

    #[test]
    fn center_rejects_unnormalized_state() {
        let psi = StateVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            center_observable(&Observable::pauli_z(), &psi),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            center_observable(&Observable::identity(3), &up()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion(&Observable::pauli_z(), &up()).unwrap(), 0.0);
        assert_eq!(dispersion(&Observable::pauli_x(), &up()).unwrap(), 1.0);
        let psi = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert_abs_diff_eq!(dispersion(&Observable::identity(2), &psi).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn correlator_examples() {
        let (x, y) = (Observable::pauli_x(), Observable::pauli_y());
        assert_eq!(correlator(&x, &x, &up()).unwrap(), c(1.0, 0.0));
        assert_eq!(correlator(&x, &y, &up()).unwrap(), c(0.0, 1.0));
        assert_eq!(correlator(&y, &x, &up()).unwrap(), c(0.0, -1.0));

        let a = Observable::from_real_diagonal(&[1.0, -2.0, 0.5]).unwrap();
        let b = Observable::from_real_diagonal(&[0.0, 3.0, -1.0]).unwrap();
        let psi = StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let z = correlator(&a, &b, &psi).unwrap();
        assert_eq!(z.im, 0.0);
        // means: a = 0.36 + 0.32 = 0.68, b = -0.64; covariance by hand
        let expect = 0.36 * (1.0 - 0.68) * (0.0 + 0.64) + 0.64 * (0.5 - 0.68) * (-1.0 + 0.64);
        assert_abs_diff_eq!(z.re, expect, epsilon = 1e-15);
    }

    #[test]
    fn rj_split_examples() {
        let (x, y) = (Observable::pauli_x(), Observable::pauli_y());
        let rj = rj_split(&x, &y, &up()).unwrap();
        assert_abs_diff_eq!(rj.r, 0.0);
        assert_abs_diff_eq!(rj.j, 1.0);

        let a = Observable::from_real_diagonal(&[1.0, 2.0]).unwrap();
        let b = Observable::from_real_diagonal(&[-1.0, 4.0]).unwrap();
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        assert_eq!(rj_split(&a, &b, &psi).unwrap().j, 0.0);

        let rj = rj_split(&x, &x, &psi).unwrap();
        assert_abs_diff_eq!(rj.r, dispersion(&x, &psi).unwrap(), epsilon = 1e-15);
        assert_eq!(rj.j, 0.0);
    }

    #[test]
    fn moments_of_paulis_on_up() {
        let m = moments_from_state(&paulis(), &up(), None).unwrap();
        assert_eq!(m.sigma2, vec![1.0, 1.0, 0.0]);
        assert_eq!(m.corr(0, 1), c(0.0, 1.0));
        assert_eq!(m.source, MomentSource::PureState);
    }

    #[test]
    fn dimensional_scales_cancel() {
        let psi = StateVector::new(vec![c(0.6, 0.1), c(0.2, -0.4)]).unwrap().normalize().unwrap();
        let plain = moments_from_state(&paulis(), &psi, None).unwrap();
        let scales = DimensionalScales::new(vec![2.0, 3.0, 5.0]).unwrap();
        let scaled = moments_from_state(&paulis(), &psi, Some(&scales)).unwrap();
        assert!(plain.max_relative_difference(&scaled) <= 1e-12);
    }

    #[test]
    fn bad_scales_rejected() {
        assert!(DimensionalScales::new(vec![1.0, 0.0]).is_err());
        assert!(DimensionalScales::new(vec![-2.0]).is_err());
        let scales = DimensionalScales::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            moments_from_state(&paulis(), &up(), Some(&scales)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn single_observable_on_plus_state() {
        let psi = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let m = moments_from_state(&[Observable::pauli_z()], &psi, None).unwrap();
        assert_abs_diff_eq!(m.sigma2[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn density_path_matches_pure_path() {
        let w = DensityMatrix::from_pure(&up()).unwrap();
        let m = moments_from_density(&paulis()[..2], &w).unwrap();
        assert_eq!(m.corr(0, 1), c(0.0, 1.0));
        assert_eq!(m.source, MomentSource::DensityMatrix);
    }

    #[test]
    fn maximally_mixed_moments() {
        let w = DensityMatrix::maximally_mixed(2);
        let m = moments_from_density(&paulis(), &w).unwrap();
        assert_eq!(m.sigma2, vec![1.0, 1.0, 1.0]);
        assert_eq!(m.means, vec![0.0, 0.0, 0.0]);
        assert_eq!(m.corr(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn normalized_examples() {
        let m = moments_from_state(&paulis()[..2], &up(), None).unwrap();
        let nc = normalized_correlations(&m);
        assert_abs_diff_eq!(nc.rho[(0, 1)], 1.0);
        assert_abs_diff_eq!(nc.phi[(0, 1)], std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(nc.phi[(1, 0)], -std::f64::consts::FRAC_PI_2);
        assert!(nc.sigma_sum.is_none());
    }

    #[test]
    fn commuting_observables_have_real_phases() {
        let obs = [
            Observable::from_real_diagonal(&[1.0, 2.0, -1.0, 0.0]).unwrap(),
            Observable::from_real_diagonal(&[0.5, -1.0, 3.0, 2.0]).unwrap(),
            Observable::from_real_diagonal(&[-2.0, 0.0, 1.0, 1.5]).unwrap(),
        ];
        let psi = StateVector::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let nc = normalized_correlations(&moments_from_state(&obs, &psi, None).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let p = nc.phi[(i, j)];
                    assert!(p == 0.0 || p == PI, "phase {p}");
                }
            }
        }
        assert_abs_diff_eq!(nc.cos_sigma().unwrap().abs(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_correlations_give_zero_rho() {
        let corr = CMatrix::identity(3, 3);
        let m = MomentSet::from_raw(vec![1.0; 3], corr, vec![0.0; 3], MomentSource::PureState).unwrap();
        let nc = normalized_correlations(&m);
        assert!(nc.rho.iter().all(|&r| r == 0.0));
        assert_eq!(nc.sigma_sum, Some(0.0));
    }

    #[test]
    fn degenerate_pairs_flagged() {
        let m = moments_from_state(&paulis(), &up(), None).unwrap();
        let nc = normalized_correlations(&m);
        assert!(nc.degenerate[(0, 2)] && nc.degenerate[(2, 1)]);
        assert!(!nc.degenerate[(0, 1)]);
        assert_eq!(nc.rho[(0, 2)], 0.0);
    }

    #[test]
    fn from_raw_checks_invariants() {
        let mut corr = CMatrix::identity(2, 2);
        corr[(0, 1)] = c(0.0, 0.5);
        corr[(1, 0)] = c(0.0, 0.5);
        assert!(MomentSet::from_raw(vec![1.0, 1.0], corr, vec![0.0; 2], MomentSource::PureState).is_err());
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert_abs_diff_eq!(wrap_phase(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_phase(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_eq!(phase(c(-1.0, -0.0)), PI);
    }
}
