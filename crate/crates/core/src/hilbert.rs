//! Finite-dimensional complex linear algebra: state vectors, Hermitian
//! operators, inner products, Gram matrices and their principal minors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::tolerance::scale_of;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest dimension for which every principal minor is enumerated in
/// [`psd_check`].
pub const MINOR_ENUMERATION_LIMIT: usize = 8;

fn all_finite<'a, I: IntoIterator<Item = &'a C64>>(it: I) -> bool {
    it.into_iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// A vector in `C^dim`. Not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    pub fn new(components: Vec<C64>) -> Result<Self> {
        Self::from_vector(CVector::from_vec(components))
    }

    pub fn from_vector(v: CVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Precondition("state vector must have dim >= 1".into()));
        }
        if !all_finite(v.iter()) {
            return Err(Error::Precondition("state vector has non-finite components".into()));
        }
        Ok(Self(v))
    }

    pub fn from_real(components: &[f64]) -> Result<Self> {
        Self::new(components.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Unit vector `e_k` of `C^dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut v = CVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    pub fn components(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Precondition("cannot normalize the zero vector".into()));
        }
        Ok(Self(self.0.unscale(n)))
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub(crate) fn require_normalized(&self, tol: f64) -> Result<()> {
        if self.is_normalized(tol) {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "state must be normalized (|psi|^2 = {})",
                self.norm_sqr()
            )))
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &StateVector) -> StateVector {
        Self(self.0.kronecker(&other.0))
    }
}

/// Ordered family of vectors sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    dim: usize,
    vectors: Vec<StateVector>,
}

impl VectorSet {
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::Precondition("vector set must be nonempty".into()))?;
        let dim = first.dim();
        for v in &vectors {
            check_dim(dim, v.dim())?;
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> Result<&StateVector> {
        self.vectors.get(i).ok_or_else(|| {
            Error::Precondition(format!("index {i} out of range for {} vectors", self.len()))
        })
    }

    /// Vectors as the columns of a `dim x n` matrix.
    pub fn stacked(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.len(), |r, c| self.vectors[c].0[r])
    }
}

/// Largest `|m_ij - conj(m_ji)|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_magnitude(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Hermitian within `tol * max(1, max |m_ij|)`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && hermiticity_residual(m) <= tol * scale_of([max_magnitude(m)])
}

fn require_hermitian(m: &CMatrix, tol: f64, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Precondition(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !all_finite(m.iter()) {
        return Err(Error::Precondition(format!("{what} has non-finite entries")));
    }
    if !is_hermitian(m, tol) {
        return Err(Error::Numerical(format!(
            "{what} is not Hermitian (residual {:e})",
            hermiticity_residual(m)
        )));
    }
    Ok(())
}

/// A Hermitian operator on `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable(CMatrix);

impl Observable {
    /// Validates squareness, finiteness and Hermiticity at the default tolerance.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, crate::tolerance::DEFAULT_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::Precondition("observable must have dim >= 1".into()));
        }
        require_hermitian(&m, tol, "observable")?;
        Ok(Self(m))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let v: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(CMatrix::from_diagonal(&CVector::from_vec(v)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self(CMatrix::from_row_slice(2, 2, &[o, l, l, o]))
    }

    pub fn pauli_y() -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
        Self(CMatrix::from_row_slice(2, 2, &[o, -i, i, o]))
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self(CMatrix::from_row_slice(2, 2, &[l, o, o, -l]))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn kron(&self, other: &Observable) -> Observable {
        Self(self.0.kronecker(&other.0))
    }

    /// `A + c I`.
    pub fn shifted(&self, c: f64) -> Observable {
        let n = self.dim();
        Self(&self.0 + CMatrix::identity(n, n).scale(c))
    }

    /// `c A` for real `c`.
    pub fn scaled(&self, c: f64) -> Observable {
        Self(self.0.scale(c))
    }

    /// `U A U†`.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Observable> {
        check_dim(self.dim(), u.nrows())?;
        let m = u * &self.0 * u.adjoint();
        // Re-symmetrize to remove rounding-level anti-Hermitian parts.
        Ok(Self((&m + m.adjoint()).unscale(2.0)))
    }
}

/// A positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, crate::tolerance::DEFAULT_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::Precondition("density matrix must have dim >= 1".into()));
        }
        require_hermitian(&m, tol, "density matrix")
            .map_err(|e| Error::Precondition(e.to_string()))?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Precondition(format!(
                "density matrix trace must be 1, got {tr}"
            )));
        }
        let min_eig = min_eigenvalue(&m);
        if min_eig < -tol {
            return Err(Error::Precondition(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self(m))
    }

    /// `psi psi†` for a normalized `psi`.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        psi.require_normalized(crate::tolerance::DEFAULT_TOL)?;
        Ok(Self(psi.0.clone() * psi.0.adjoint()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

/// Matrix of pairwise inner products `(a_i, a_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(CMatrix);

impl GramMatrix {
    /// Accepts any Hermitian matrix with real, nonnegative diagonal.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let tol = crate::tolerance::DEFAULT_TOL;
        if m.nrows() == 0 {
            return Err(Error::Precondition("Gram matrix must be nonempty".into()));
        }
        require_hermitian(&m, tol, "Gram matrix")?;
        let scale = scale_of([max_magnitude(&m)]);
        for i in 0..m.nrows() {
            if m[(i, i)].re < -tol * scale {
                return Err(Error::Numerical(format!(
                    "Gram matrix diagonal entry {i} is negative: {}",
                    m[(i, i)].re
                )));
            }
        }
        Ok(Self(m))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Superposition coefficients `mu_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(CVector);

impl CoefficientVector {
    pub fn new(components: Vec<C64>) -> Result<Self> {
        if !all_finite(components.iter()) {
            return Err(Error::Precondition("coefficients must be finite".into()));
        }
        Ok(Self(CVector::from_vec(components)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }
}

/// `sum_k conj(a_k) b_k`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.0.dotc(&b.0))
}

pub fn gram_matrix(vs: &VectorSet) -> GramMatrix {
    let n = vs.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(vs.vectors[i].norm_sqr(), 0.0);
        for j in (i + 1)..n {
            let z = vs.vectors[i].0.dotc(&vs.vectors[j].0);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    GramMatrix(m)
}

/// Real part of `mu† M mu`. Errors when the imaginary residual exceeds the
/// default tolerance relative to `sum |mu_i| |M_ij| |mu_j|`.
pub fn quadratic_form(m: &GramMatrix, mu: &CoefficientVector) -> Result<f64> {
    check_dim(m.n(), mu.len())?;
    let v = &mu.0;
    let value = v.dotc(&(&m.0 * v));
    let mut bound = 0.0;
    for i in 0..m.n() {
        for j in 0..m.n() {
            bound += v[i].norm() * m.0[(i, j)].norm() * v[j].norm();
        }
    }
    let tol = crate::tolerance::DEFAULT_TOL * scale_of([bound]);
    if value.im.abs() > tol {
        return Err(Error::Numerical(format!(
            "quadratic form has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Determinant through an LU factorization with partial pivoting.
pub fn determinant(m: &CMatrix) -> C64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Product of row 2-norms: Hadamard's bound on `|det m|`.
fn hadamard_bound(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

fn submatrix(m: &CMatrix, rows: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), rows.len(), |a, b| m[(rows[a], rows[b])])
}

/// Determinant of the principal submatrix on `rows x rows` of a Hermitian
/// matrix.
pub fn principal_minor_of(m: &CMatrix, rows: &[usize]) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::Precondition("principal minor needs at least one index".into()));
    }
    let n = m.nrows();
    for (k, &r) in rows.iter().enumerate() {
        if r >= n {
            return Err(Error::Precondition(format!("index {r} out of range for n = {n}")));
        }
        if rows[..k].contains(&r) {
            return Err(Error::Precondition(format!("duplicate index {r}")));
        }
    }
    let sub = submatrix(m, rows);
    let det = determinant(&sub);
    let tol = crate::tolerance::DEFAULT_TOL * scale_of([hadamard_bound(&sub)]);
    if det.im.abs() > tol {
        return Err(Error::Numerical(format!(
            "principal minor has imaginary part {:e}",
            det.im
        )));
    }
    Ok(det.re)
}

pub fn principal_minor(m: &GramMatrix, rows: &[usize]) -> Result<f64> {
    principal_minor_of(&m.0, rows)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Most negative principal minor, when all of them were enumerated.
    pub worst_minor: Option<f64>,
    pub worst_minor_rows: Option<Vec<usize>>,
    /// Whether every enumerated minor is nonnegative within tolerance.
    pub minors_nonnegative: Option<bool>,
}

/// PSD test on a Hermitian matrix. The eigenvalue criterion decides;
/// for `n <= 8` all `2^n - 1` principal minors are enumerated as a
/// cross-check.
pub fn psd_check_matrix(m: &CMatrix, tol: f64) -> Result<PsdVerdict> {
    require_hermitian(m, tol, "matrix")?;
    let n = m.nrows();
    let max_diag = (0..n).map(|i| m[(i, i)].re).fold(0.0_f64, f64::max);
    let scale = max_diag.max(1.0);
    let min_eig = min_eigenvalue(m);
    let is_psd = min_eig >= -tol * scale;

    let (mut worst_minor, mut worst_rows, mut minors_ok) = (None, None, None);
    if n <= MINOR_ENUMERATION_LIMIT {
        let mut worst = f64::INFINITY;
        let mut rows_at = Vec::new();
        let mut ok = true;
        for mask in 1u32..(1u32 << n) {
            let rows: Vec<usize> = (0..n).filter(|&k| mask & (1 << k) != 0).collect();
            let minor = principal_minor_of(m, &rows)?;
            let sub_scale = scale_of([hadamard_bound(&submatrix(m, &rows))]);
            if minor < -tol * sub_scale {
                ok = false;
            }
            if minor < worst {
                worst = minor;
                rows_at = rows;
            }
        }
        worst_minor = Some(worst);
        worst_rows = Some(rows_at);
        minors_ok = Some(ok);
    }
    Ok(PsdVerdict {
        is_psd,
        min_eigenvalue: min_eig,
        worst_minor,
        worst_minor_rows: worst_rows,
        minors_nonnegative: minors_ok,
    })
}

pub fn psd_check(m: &GramMatrix, tol: f64) -> Result<PsdVerdict> {
    psd_check_matrix(&m.0, tol)
}

/// True when the smallest singular value of the stacked vectors is at most
/// `tol` times the largest one.
pub fn linear_dependence_check(vs: &VectorSet, tol: f64) -> bool {
    if vs.len() > vs.dim() {
        return true;
    }
    let sv = vs.stacked().singular_values();
    let max = sv.iter().copied().fold(0.0_f64, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    max == 0.0 || min <= tol * max
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sv(v: &[(f64, f64)]) -> StateVector {
        StateVector::new(v.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    fn gram(rows: usize, data: &[C64]) -> GramMatrix {
        GramMatrix::from_matrix(CMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let e1 = StateVector::basis(2, 0);
        let e2 = StateVector::basis(2, 1);
        assert_eq!(inner_product(&e1, &e2).unwrap(), c(0.0, 0.0));
        assert_eq!(inner_product(&e1, &e1).unwrap(), c(1.0, 0.0));
        let b = sv(&[(0.0, 1.0), (0.0, 0.0)]);
        assert_eq!(inner_product(&e1, &b).unwrap(), c(0.0, 1.0));
        assert_eq!(inner_product(&b, &e1).unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let err = inner_product(&StateVector::basis(2, 0), &StateVector::basis(3, 0)).unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 2, found: 3 }));
    }

    #[test]
    fn gram_of_orthonormal_basis_is_identity() {
        let vs = VectorSet::new((0..3).map(|k| StateVector::basis(3, k)).collect()).unwrap();
        assert_eq!(gram_matrix(&vs).matrix(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn gram_of_duplicated_vector() {
        let v = sv(&[(0.6, 0.0), (0.0, 0.8)]);
        let g = gram_matrix(&VectorSet::new(vec![v.clone(), v]).unwrap());
        for z in g.matrix().iter() {
            assert_abs_diff_eq!(z.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(principal_minor(&g, &[0, 1]).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn gram_off_diagonals() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let vs = VectorSet::new(vec![
            StateVector::basis(3, 0),
            StateVector::basis(3, 1),
            sv(&[(s, 0.0), (s, 0.0), (0.0, 0.0)]),
        ])
        .unwrap();
        let g = gram_matrix(&vs);
        assert_abs_diff_eq!(g.matrix()[(0, 1)].norm(), 0.0);
        assert_abs_diff_eq!(g.matrix()[(0, 2)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(g.matrix()[(1, 2)].re, s, epsilon = 1e-15);
    }

    #[test]
    fn quadratic_form_examples() {
        let id = GramMatrix::from_matrix(CMatrix::identity(2, 2)).unwrap();
        let mu = CoefficientVector::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(quadratic_form(&id, &mu).unwrap(), 2.0);

        let v = sv(&[(0.6, 0.0), (0.0, 0.8)]);
        let g = gram_matrix(&VectorSet::new(vec![v.clone(), v]).unwrap());
        let mu = CoefficientVector::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(quadratic_form(&g, &mu).unwrap(), 0.0, epsilon = 1e-15);

        let m = gram(2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let mu = CoefficientVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(quadratic_form(&m, &mu).unwrap(), 2.0);
    }

    #[test]
    fn quadratic_form_dimension_mismatch() {
        let id = GramMatrix::from_matrix(CMatrix::identity(2, 2)).unwrap();
        let mu = CoefficientVector::new(vec![c(1.0, 0.0)]).unwrap();
        assert!(matches!(quadratic_form(&id, &mu), Err(Error::Dimension { .. })));
    }

    #[test]
    fn principal_minor_examples() {
        let id = GramMatrix::from_matrix(CMatrix::identity(3, 3)).unwrap();
        assert_abs_diff_eq!(principal_minor(&id, &[0, 2]).unwrap(), 1.0);
        let m = gram(2, &[c(1.0, 0.0), c(0.9, 0.0), c(0.9, 0.0), c(1.0, 0.0)]);
        assert_abs_diff_eq!(principal_minor(&m, &[0, 1]).unwrap(), 0.19, epsilon = 1e-15);
    }

    #[test]
    fn principal_minor_rejects_bad_rows() {
        let id = GramMatrix::from_matrix(CMatrix::identity(3, 3)).unwrap();
        assert!(principal_minor(&id, &[]).is_err());
        assert!(principal_minor(&id, &[0, 0]).is_err());
        assert!(principal_minor(&id, &[3]).is_err());
    }

    #[test]
    fn dependent_triple_has_zero_determinant() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let vs = VectorSet::new(vec![
            StateVector::basis(3, 0),
            StateVector::basis(3, 1),
            sv(&[(s, 0.0), (0.0, s), (0.0, 0.0)]),
        ])
        .unwrap();
        let g = gram_matrix(&vs);
        assert_abs_diff_eq!(principal_minor(&g, &[0, 1, 2]).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn psd_examples() {
        let id = GramMatrix::from_matrix(CMatrix::identity(4, 4)).unwrap();
        let v = psd_check(&id, 1e-9).unwrap();
        assert!(v.is_psd);
        assert_abs_diff_eq!(v.min_eigenvalue, 1.0, epsilon = 1e-14);
        assert_eq!(v.minors_nonnegative, Some(true));

        let m = gram(2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let v = psd_check(&m, 1e-9).unwrap();
        assert!(!v.is_psd);
        assert_abs_diff_eq!(v.min_eigenvalue, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.worst_minor.unwrap(), -3.0, epsilon = 1e-14);
        assert_eq!(v.worst_minor_rows.as_deref(), Some(&[0usize, 1][..]));
    }

    #[test]
    fn psd_skips_minor_enumeration_above_limit() {
        let v = psd_check_matrix(&CMatrix::identity(9, 9), 1e-9).unwrap();
        assert!(v.is_psd);
        assert!(v.worst_minor.is_none());
    }

    #[test]
    fn leading_minors_alone_miss_indefiniteness() {
        // Leading minors are 0, 0, 0 but the (2,2) entry is negative.
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-1.0, 0.0),
            ],
        );
        let v = psd_check_matrix(&m, 1e-9).unwrap();
        assert!(!v.is_psd);
        assert_eq!(v.minors_nonnegative, Some(false));
    }

    #[test]
    fn psd_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(psd_check_matrix(&m, 1e-9), Err(Error::Numerical(_))));
        assert!(GramMatrix::from_matrix(m).is_err());
    }

    #[test]
    fn linear_dependence_examples() {
        let e = |k| StateVector::basis(3, k);
        let sum = sv(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!(linear_dependence_check(&VectorSet::new(vec![e(0), e(1), sum]).unwrap(), 1e-9));
        assert!(!linear_dependence_check(&VectorSet::new(vec![e(0), e(1), e(2)]).unwrap(), 1e-9));
        let v = sv(&[(0.3, 0.1), (0.2, -0.5), (1.0, 0.0)]);
        let w = StateVector::from_vector(v.as_vector().scale(2.0)).unwrap();
        assert!(linear_dependence_check(&VectorSet::new(vec![v, w]).unwrap(), 1e-9));
    }

    #[test]
    fn more_vectors_than_dimensions_are_dependent() {
        let vs = VectorSet::new(vec![
            StateVector::basis(2, 0),
            StateVector::basis(2, 1),
            StateVector::basis(2, 0),
        ])
        .unwrap();
        assert!(linear_dependence_check(&vs, 1e-9));
    }

    #[test]
    fn vector_set_rejects_mixed_dims() {
        assert!(VectorSet::new(vec![StateVector::basis(2, 0), StateVector::basis(3, 0)]).is_err());
        assert!(VectorSet::new(vec![]).is_err());
    }

    #[test]
    fn single_index_minor_is_diagonal() {
        let v = sv(&[(0.3, 0.4), (1.2, 0.0)]);
        let w = sv(&[(0.0, 2.0), (0.5, -0.5)]);
        let g = gram_matrix(&VectorSet::new(vec![v.clone(), w]).unwrap());
        assert_abs_diff_eq!(principal_minor(&g, &[0]).unwrap(), v.norm_sqr(), epsilon = 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(CMatrix::identity(2, 2)).is_err());
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(bad), Err(Error::Precondition(_))));
        let w = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(w.purity(), 0.5);
        let psi = sv(&[(0.6, 0.0), (0.0, 0.8)]);
        assert_abs_diff_eq!(DensityMatrix::from_pure(&psi).unwrap().purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn pauli_matrices_are_hermitian() {
        for p in [Observable::pauli_x(), Observable::pauli_y(), Observable::pauli_z()] {
            assert_eq!(hermiticity_residual(p.matrix()), 0.0);
        }
        let xy = Observable::pauli_x().matrix() * Observable::pauli_y().matrix();
        assert_eq!(xy, Observable::pauli_z().matrix().scale(1.0) * c(0.0, 1.0));
    }
}
