//! Pairwise and three-way uncertainty relations and Cauchy inequalities,
//! evaluated as margin reports.
//!
//! Every report uses `margin = lhs - rhs`, so a relation is satisfied when
//! `margin >= -tol` and saturated when `|margin| <= saturation_tol`, with both
//! tolerances already multiplied by the relation's natural scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{determinant, gram_matrix, inner_product, psd_check_matrix, PsdVerdict, VectorSet};
use crate::moments::{MomentSet, NormalizedCorrelations};
use crate::tolerance::{scale_of, Tolerance};

/// Relative tolerance for the agreement between the expanded three-vector
/// inequality and the LU determinant of the Gram matrix.
pub const GCI_CROSS_CHECK_TOL: f64 = 1e-10;

/// Slack allowed on the `[0, 1]` / `[-1, 1]` ranges of normalized inputs.
pub const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Heisenberg,
    Schroedinger,
    CauchyPair,
    GciTriple,
    GurRaw,
    GurNormalized,
    GurWeakened,
    GurN,
    OrthogonalSpecial,
}

impl RelationKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Heisenberg => "heisenberg",
            Self::Schroedinger => "schroedinger",
            Self::CauchyPair => "cauchy_pair",
            Self::GciTriple => "gci_triple",
            Self::GurRaw => "gur_raw",
            Self::GurNormalized => "gur_normalized",
            Self::GurWeakened => "gur_weakened",
            Self::GurN => "gur_n",
            Self::OrthogonalSpecial => "orthogonal_special",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: RelationKind,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub saturated: bool,
    /// Absolute satisfaction tolerance (relative tolerance times scale).
    pub tol: f64,
    /// Absolute saturation tolerance.
    pub saturation_tol: f64,
    pub degenerate: bool,
}

impl RelationReport {
    fn new(relation: RelationKind, lhs: f64, rhs: f64, scale: f64, tol: Tolerance) -> Self {
        Self::with_margin(relation, lhs, rhs, lhs - rhs, scale, tol)
    }

    fn with_margin(relation: RelationKind, lhs: f64, rhs: f64, margin: f64, scale: f64, tol: Tolerance) -> Self {
        let abs_tol = tol.satisfy * scale;
        let sat_tol = tol.saturate * scale;
        Self {
            relation,
            lhs,
            rhs,
            margin,
            satisfied: margin >= -abs_tol,
            saturated: margin.abs() <= sat_tol,
            tol: abs_tol,
            saturation_tol: sat_tol,
            degenerate: false,
        }
    }

    fn degenerate(mut self, flag: bool) -> Self {
        self.degenerate = flag;
        self
    }
}

/// A point `(rho_12, rho_23, rho_31, cos Sigma)` of normalized correlation
/// space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoSigmaPoint {
    pub rho12: f64,
    pub rho23: f64,
    pub rho31: f64,
    pub cos_sigma: f64,
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&x) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must lie in [0, 1], got {x}")))
    }
}

impl RhoSigmaPoint {
    pub fn new(rho12: f64, rho23: f64, rho31: f64, cos_sigma: f64) -> Result<Self> {
        check_unit_interval("rho12", rho12)?;
        check_unit_interval("rho23", rho23)?;
        check_unit_interval("rho31", rho31)?;
        if !(cos_sigma.is_finite() && cos_sigma.abs() <= 1.0 + RANGE_SLACK) {
            return Err(Error::Precondition(format!(
                "cos_sigma must lie in [-1, 1], got {cos_sigma}"
            )));
        }
        Ok(Self {
            rho12,
            rho23,
            rho31,
            cos_sigma,
        })
    }

    /// Extracts the point of a non-degenerate triple. Degenerate triples
    /// have no defined ratios and must be judged with [`gur_raw`].
    pub fn from_correlations(nc: &NormalizedCorrelations) -> Result<Self> {
        let (r12, r23, r31) = nc.rho_triple().ok_or_else(|| {
            Error::Precondition(format!("normalized form needs 3 observables, got {}", nc.n()))
        })?;
        if nc.any_degenerate() {
            return Err(Error::Precondition(
                "degenerate dispersion: ratios undefined, use gur_raw".into(),
            ));
        }
        Self::new(r12, r23, r31, nc.cos_sigma().unwrap_or(1.0))
    }

    pub fn rhos(&self) -> [f64; 3] {
        [self.rho12, self.rho23, self.rho31]
    }
}

fn pair_indices(m: &MomentSet, i: usize, j: usize) -> Result<()> {
    m.check_index(i)?;
    m.check_index(j)?;
    if i == j {
        return Err(Error::Precondition(format!("pair relation needs i != j, got {i}")));
    }
    Ok(())
}

/// `sigma_i^2 sigma_j^2 >= j^2` with `j = Im <i,j>`.
pub fn heisenberg_pair(m: &MomentSet, i: usize, j: usize, tol: Tolerance) -> Result<RelationReport> {
    pair_indices(m, i, j)?;
    let lhs = m.sigma2[i] * m.sigma2[j];
    let rhs = m.corr(i, j).im.powi(2);
    let deg = m.is_degenerate(i) || m.is_degenerate(j);
    Ok(RelationReport::new(RelationKind::Heisenberg, lhs, rhs, scale_of([lhs, rhs]), tol).degenerate(deg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchroedingerReport {
    pub report: RelationReport,
    /// Right-hand side of the commutator-only bound for the same pair.
    pub heisenberg_rhs: f64,
    /// `r^2 + j^2 >= j^2`.
    pub at_least_as_restrictive: bool,
}

/// `sigma_i^2 sigma_j^2 >= |<i,j>|^2 = r^2 + j^2`.
pub fn schroedinger_pair(m: &MomentSet, i: usize, j: usize, tol: Tolerance) -> Result<SchroedingerReport> {
    pair_indices(m, i, j)?;
    let z = m.corr(i, j);
    let lhs = m.sigma2[i] * m.sigma2[j];
    let rhs = z.re * z.re + z.im * z.im;
    let heisenberg_rhs = z.im * z.im;
    let deg = m.is_degenerate(i) || m.is_degenerate(j);
    Ok(SchroedingerReport {
        report: RelationReport::new(RelationKind::Schroedinger, lhs, rhs, scale_of([lhs, rhs]), tol).degenerate(deg),
        heisenberg_rhs,
        at_least_as_restrictive: rhs >= heisenberg_rhs,
    })
}

/// `|a_i|^2 |a_j|^2 >= |(a_i, a_j)|^2`.
pub fn cauchy_pair(vs: &VectorSet, i: usize, j: usize, tol: Tolerance) -> Result<RelationReport> {
    if i == j {
        return Err(Error::Precondition(format!("pair relation needs i != j, got {i}")));
    }
    let (a, b) = (vs.get(i)?, vs.get(j)?);
    let lhs = a.norm_sqr() * b.norm_sqr();
    let rhs = inner_product(a, b)?.norm_sqr();
    Ok(RelationReport::new(RelationKind::CauchyPair, lhs, rhs, scale_of([lhs]), tol))
}

/// Nonnegativity of the 3x3 Gram determinant, written out term by term and
/// checked against an LU determinant of the same matrix.
pub fn gci_triple(vs: &VectorSet, tol: Tolerance) -> Result<RelationReport> {
    if vs.len() != 3 {
        return Err(Error::Precondition(format!(
            "three-vector inequality needs exactly 3 vectors, got {}",
            vs.len()
        )));
    }
    let v = vs.vectors();
    let (n1, n2, n3) = (v[0].norm_sqr(), v[1].norm_sqr(), v[2].norm_sqr());
    let g12 = inner_product(&v[0], &v[1])?;
    let g23 = inner_product(&v[1], &v[2])?;
    let g31 = inner_product(&v[2], &v[0])?;
    let lhs = n1 * n2 * n3 + 2.0 * (g12 * g23 * g31).re;
    let rhs = g12.norm_sqr() * n3 + g23.norm_sqr() * n1 + g31.norm_sqr() * n2;
    let margin = lhs - rhs;
    let scale = scale_of([n1 * n2 * n3]);

    let det = determinant(gram_matrix(vs).matrix()).re;
    if (det - margin).abs() > GCI_CROSS_CHECK_TOL * scale {
        return Err(Error::Numerical(format!(
            "expanded form {margin:e} disagrees with Gram determinant {det:e}"
        )));
    }
    Ok(RelationReport::with_margin(RelationKind::GciTriple, lhs, rhs, margin, scale, tol))
}

/// Three-observable relation on raw moments.
pub fn gur_raw(m: &MomentSet, tol: Tolerance) -> Result<RelationReport> {
    if m.n() != 3 {
        return Err(Error::Precondition(format!(
            "three-observable relation needs exactly 3 observables, got {}",
            m.n()
        )));
    }
    let s = &m.sigma2;
    let (c12, c23, c31) = (m.corr(0, 1), m.corr(1, 2), m.corr(2, 0));
    let product = s[0] * s[1] * s[2];
    let lhs = product + 2.0 * (c12 * c23 * c31).re;
    let rhs = c12.norm_sqr() * s[2] + c23.norm_sqr() * s[0] + c31.norm_sqr() * s[1];
    let deg = (0..3).any(|i| m.is_degenerate(i));
    Ok(RelationReport::new(RelationKind::GurRaw, lhs, rhs, scale_of([product]), tol).degenerate(deg))
}

/// `1 + 2 rho_12 rho_23 rho_31 cos Sigma - rho_12^2 - rho_23^2 - rho_31^2 >= 0`.
pub fn gur_normalized(p: &RhoSigmaPoint, tol: Tolerance) -> Result<RelationReport> {
    let p = RhoSigmaPoint::new(p.rho12, p.rho23, p.rho31, p.cos_sigma)?;
    let lhs = 1.0 + 2.0 * p.rho12 * p.rho23 * p.rho31 * p.cos_sigma;
    let rhs = p.rho12 * p.rho12 + p.rho23 * p.rho23 + p.rho31 * p.rho31;
    Ok(RelationReport::new(RelationKind::GurNormalized, lhs, rhs, 1.0, tol))
}

/// The normalized relation with `cos Sigma` replaced by its upper bound 1.
pub fn gur_weakened(rho12: f64, rho23: f64, rho31: f64, tol: Tolerance) -> Result<RelationReport> {
    let p = RhoSigmaPoint::new(rho12, rho23, rho31, 1.0)?;
    let mut r = gur_normalized(&p, tol)?;
    r.relation = RelationKind::GurWeakened;
    Ok(r)
}

/// Membership in the explicit forbidden box
/// `sqrt(3)/2 < rho_12 <= 1, sqrt(3)/2 < rho_31 <= 1, 0 <= rho_23 < 1/2`
/// or one of its two images under `rho_12 <-> rho_23` and `rho_31 <-> rho_23`.
pub fn forbidden_region_check(rho12: f64, rho23: f64, rho31: f64) -> bool {
    let hi = |x: f64| x > 3.0_f64.sqrt() / 2.0 && x <= 1.0;
    let lo = |x: f64| (0.0..0.5).contains(&x);
    (hi(rho12) && hi(rho31) && lo(rho23))
        || (hi(rho23) && hi(rho31) && lo(rho12))
        || (hi(rho12) && hi(rho23) && lo(rho31))
}

/// `rho_12^2 + rho_31^2 <= 1`, the form taken when vectors 2 and 3 are
/// orthogonal.
pub fn orthogonal_special(rho12: f64, rho31: f64, tol: Tolerance) -> Result<RelationReport> {
    check_unit_interval("rho12", rho12)?;
    check_unit_interval("rho31", rho31)?;
    Ok(RelationReport::new(
        RelationKind::OrthogonalSpecial,
        1.0,
        rho12 * rho12 + rho31 * rho31,
        1.0,
        tol,
    ))
}

/// Positivity of the full `n x n` moment matrix: the margin is its
/// determinant, the verdict the eigenvalue/minor test.
pub fn gur_n(m: &MomentSet, tol: Tolerance) -> Result<(RelationReport, PsdVerdict)> {
    if m.n() < 2 {
        return Err(Error::Precondition(format!(
            "moment-matrix relation needs at least 2 observables, got {}",
            m.n()
        )));
    }
    let mm = m.moment_matrix();
    let det = determinant(&mm).re;
    let scale = scale_of([m.sigma2.iter().product::<f64>()]);
    let verdict = psd_check_matrix(&mm, tol.satisfy)?;
    let deg = (0..m.n()).any(|i| m.is_degenerate(i));
    let report = RelationReport::with_margin(RelationKind::GurN, det, 0.0, det, scale, tol).degenerate(deg);
    Ok((report, verdict))
}
