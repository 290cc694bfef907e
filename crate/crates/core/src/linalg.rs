//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a matrix from row-major entries.
pub fn from_row_major(rows: usize, cols: usize, data: &[C64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_row_slice(rows, cols, data)
}

pub fn to_row_major(m: &CMatrix) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(m[(r, c)]);
        }
    }
    out
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest entrywise deviation of `m` from `target`.
pub fn max_abs_diff(m: &CMatrix, target: &CMatrix) -> f64 {
    m.iter()
        .zip(target.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(&(m.adjoint() * m), &identity(m.nrows())) <= tol
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending
/// order; column `k` of the returned matrix is the eigenvector of value `k`.
pub fn hermitian_eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_square() {
        return Err(Error::invalid("eigendecomposition of a non-square matrix"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    // symmetrize away rounding so the solver sees an exactly Hermitian input
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// `V f(Λ) V†` for Hermitian `m = V Λ V†`.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigh(m)?;
    let mut scaled = vectors.clone();
    for (k, &v) in values.iter().enumerate() {
        let fv = f(v);
        scaled.column_mut(k).scale_mut(fv);
    }
    Ok(scaled * vectors.adjoint())
}

/// Square root of a positive semidefinite matrix; eigenvalues below `1e-14`
/// are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    hermitian_function(m, |v| if v < 1e-14 { 0.0 } else { v.sqrt() })
}

/// `exp(-t m)` for Hermitian `m`.
pub fn expm_hermitian(m: &CMatrix, t: f64) -> Result<CMatrix> {
    if t == 0.0 {
        return Ok(identity(m.nrows()));
    }
    hermitian_function(m, |v| (-t * v).exp())
}

/// Spectral norm of a Hermitian matrix (largest eigenvalue magnitude).
pub fn hermitian_norm(m: &CMatrix) -> Result<f64> {
    let (values, _) = hermitian_eigh(m)?;
    Ok(values.iter().map(|v| v.abs()).fold(0.0, f64::max))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let svd = m.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Full SVD `m = U diag(s) V†` with singular values in descending order.
pub fn svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut uu = CMatrix::zeros(u.nrows(), k);
    let mut vv = CMatrix::zeros(k, v_t.ncols());
    let mut s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        uu.set_column(dst, &u.column(src));
        vv.set_row(dst, &v_t.row(src));
        s.push(svd.singular_values[src]);
    }
    (uu, s, vv)
}

pub fn pauli_x() -> CMatrix {
    from_row_major(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    from_row_major(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    from_row_major(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    from_row_major(2, 2, &[c64(h, 0.0), c64(h, 0.0), c64(h, 0.0), c64(-h, 0.0)])
}

/// Normalized overlap `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let inner: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    inner.norm_sqr() / (na * nb)
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}
