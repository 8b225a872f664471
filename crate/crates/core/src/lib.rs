//! Numerical laboratory for uncertainty relations of several observables.
//!
//! Computes dispersions and mixed correlators of Hermitian observables in
//! pure or mixed states, evaluates the pairwise (commutator-only and full)
//! uncertainty relations, the Gram-determinant inequalities for three and
//! more vectors or observables, and maps the allowed and forbidden parts of
//! normalized correlation space.

pub mod cli;
pub mod error;
pub mod explorer;
pub mod hilbert;
pub mod moments;
pub mod relations;
pub mod tolerance;

pub use error::{Error, Result};
pub use hilbert::{
    gram_matrix, inner_product, linear_dependence_check, principal_minor, psd_check, quadratic_form, CMatrix,
    CVector, CoefficientVector, DensityMatrix, GramMatrix, Observable, PsdVerdict, StateVector, VectorSet, C64,
};
pub use moments::{
    center_observable, correlator, dispersion, moments_from_density, moments_from_state, normalized_correlations,
    rj_split, DimensionalScales, MomentSet, MomentSource, NormalizedCorrelations, RJDecomposition,
};
pub use relations::{
    cauchy_pair, forbidden_region_check, gci_triple, gur_n, gur_normalized, gur_raw, gur_weakened, heisenberg_pair,
    orthogonal_special, schroedinger_pair, RelationKind, RelationReport, RhoSigmaPoint,
};
pub use tolerance::{Tolerance, DEFAULT_TOL};
