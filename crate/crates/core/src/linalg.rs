//! Dense complex linear algebra used throughout the crate.
//!
//! Tripartite indices are always laid out lexicographically: the composite
//! index of `(i, j, k)` in a space of dimensions `(n, p, q)` is
//! `(i * p + j) * q + k`, with all indices 0-based.

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Relative cutoff below which singular values are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Absolute bound on `‖M − M*‖` accepted by [`hermitian_eig`].
pub const DEFAULT_HERM_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_finite(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Compact SVD in the transpose convention `M = U · diag(D) · Vᵗ`.
///
/// `V` is the entrywise conjugate of the usual right singular vectors, which
/// is the form the block decompositions `R_i = U_i D_i V_iᵗ` are written in.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: ComplexMatrix,
    pub d: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.rank();
        let mut ud = self.u.clone();
        for (j, &s) in self.d.iter().enumerate().take(k) {
            ud.column_mut(j).scale_mut(s);
        }
        ud * self.v.transpose()
    }
}

/// Relative reconstruction error accepted from a factorization before it is
/// rejected as unreliable.
const RECON_TOL: f64 = 1e-9;

fn to_faer(m: &ComplexMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `M = U diag(s) W*` with unitary `U` (rows × rows) and `W`
/// (cols × cols), singular values descending. Checked by reconstruction.
pub(crate) fn full_svd(m: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let (rows, cols) = m.shape();
    let dec = to_faer(m).svd().map_err(|_| Error::Decomposition("svd did not converge"))?;
    let s: Vec<f64> = (0..rows.min(cols)).map(|i| dec.S().column_vector()[i].re).collect();
    let u = from_faer(dec.U());
    let w = from_faer(dec.V());
    let mut us = u.columns(0, s.len()).into_owned();
    for (j, &x) in s.iter().enumerate() {
        us.column_mut(j).scale_mut(x);
    }
    let err = (&us * w.columns(0, s.len()).adjoint() - m).norm();
    if err > RECON_TOL * m.norm().max(1.0) {
        return Err(Error::Decomposition("svd failed its reconstruction check"));
    }
    Ok((u, s, w))
}

/// Compact SVD with singular values below `rank_tol × σ_max` discarded.
pub fn svd(m: &ComplexMatrix, rank_tol: f64) -> Result<SvdFactors> {
    ensure_finite(m, "svd input")?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(SvdFactors {
            u: ComplexMatrix::zeros(rows, 0),
            d: Vec::new(),
            v: ComplexMatrix::zeros(cols, 0),
        });
    }
    let (u, s, w) = full_svd(m)?;
    let smax = s.first().copied().unwrap_or(0.0);
    let k = s.iter().take_while(|&&x| x > 0.0 && x > rank_tol * smax).count();
    Ok(SvdFactors {
        u: u.columns(0, k).into_owned(),
        d: s[..k].to_vec(),
        // transpose convention: V = conj(W)
        v: w.columns(0, k).map(|z| z.conj()),
    })
}

/// Moore-Penrose pseudo-inverse, dropping singular values below
/// `rank_tol × σ_max`.
pub fn pseudo_inverse(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let f = svd(m, rank_tol)?;
    let mut w = f.v.map(|z| z.conj());
    for (j, &x) in f.d.iter().enumerate() {
        w.column_mut(j).unscale_mut(x);
    }
    Ok(w * f.u.adjoint())
}

/// All singular values, descending, without truncation.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_finite(m, "singular value input")?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let mut s = to_faer(m).singular_values().map_err(|_| Error::Decomposition("svd did not converge"))?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Thin SVD of a real matrix, `A = U diag(s) Wᵗ`, singular values
/// descending. Checked by reconstruction.
pub(crate) fn real_thin_svd(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let (rows, cols) = a.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok((DMatrix::zeros(rows, 0), Vec::new(), DMatrix::zeros(cols, 0)));
    }
    if !a.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("svd input"));
    }
    let fa = Mat::<f64>::from_fn(rows, cols, |i, j| a[(i, j)]);
    let dec = fa.thin_svd().map_err(|_| Error::Decomposition("svd did not converge"))?;
    let s: Vec<f64> = (0..k).map(|i| dec.S().column_vector()[i]).collect();
    let u = DMatrix::from_fn(rows, k, |i, j| dec.U()[(i, j)]);
    let w = DMatrix::from_fn(cols, k, |i, j| dec.V()[(i, j)]);
    let err = (&u * DMatrix::from_diagonal(&DVector::from_row_slice(&s)) * w.transpose() - a).norm();
    if err > RECON_TOL * a.norm().max(1.0) {
        return Err(Error::Decomposition("svd failed its reconstruction check"));
    }
    Ok((u, s, w))
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

/// Half the trace norm of the difference.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "trace distance of {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    Ok(0.5 * trace_norm(&(a - b))?)
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending and
/// eigenvectors as orthonormal columns.
///
/// The input is symmetrized as `(M + M*)/2` before factoring.
pub fn hermitian_eig(m: &ComplexMatrix, herm_tol: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    ensure_finite(m, "eigendecomposition input")?;
    let dev = hermitian_deviation(m);
    if dev > herm_tol {
        return Err(Error::NotHermitian(dev));
    }
    Ok(hermitian_eig_unchecked(m))
}

/// Same as [`hermitian_eig`] without validation; used in solver inner loops.
pub(crate) fn hermitian_eig_unchecked(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), ComplexMatrix::zeros(0, 0));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let fm = to_faer(&sym);
    match fm.self_adjoint_eigen(Side::Lower) {
        Ok(eig) => {
            // faer sorts ascending
            let values = (0..n).rev().map(|i| eig.S().column_vector()[i].re).collect();
            let vectors = ComplexMatrix::from_fn(n, n, |r, col| eig.U()[(r, n - 1 - col)]);
            (values, vectors)
        }
        Err(_) => {
            let eig = SymmetricEigen::new(sym);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            let mut vectors = ComplexMatrix::zeros(n, n);
            for (col, &i) in order.iter().enumerate() {
                vectors.set_column(col, &eig.eigenvectors.column(i));
            }
            (values, vectors)
        }
    }
}

/// Nearest PSD matrix in Frobenius norm, by clipping negative eigenvalues.
/// Also returns the Frobenius norm of the removed negative part.
pub(crate) fn project_psd(m: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let (values, vectors) = hermitian_eig_unchecked(m);
    let n = m.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut neg = 0.0;
    for (j, &lam) in values.iter().enumerate() {
        if lam > 0.0 {
            let w = vectors.column(j);
            out.ger(cr(lam), &w, &w.conjugate(), cr(1.0));
        } else {
            neg += lam * lam;
        }
    }
    (out, neg.sqrt())
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Dimensions `(n, p, q)` of a tripartite space.
pub type Dims = (usize, usize, usize);

/// The subsystem traced out by [`partial_trace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
    Third,
}

/// Partial trace of an operator on `Cⁿ ⊗ Cᵖ ⊗ C^q`.
///
/// The result acts on the two remaining factors, ordered lexicographically.
pub fn partial_trace(rho: &ComplexMatrix, dims: Dims, subsystem: Subsystem) -> Result<ComplexMatrix> {
    let (n, p, q) = dims;
    let total = n * p * q;
    if rho.shape() != (total, total) {
        return Err(Error::Dimension(format!(
            "partial trace of a {:?} matrix over dims {:?}",
            rho.shape(),
            dims
        )));
    }
    let idx = |i: usize, j: usize, k: usize| (i * p + j) * q + k;
    let out = match subsystem {
        Subsystem::First => ComplexMatrix::from_fn(p * q, p * q, |r, s| {
            let (j, k) = (r / q, r % q);
            let (j2, k2) = (s / q, s % q);
            (0..n).map(|i| rho[(idx(i, j, k), idx(i, j2, k2))]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(n * q, n * q, |r, s| {
            let (i, k) = (r / q, r % q);
            let (i2, k2) = (s / q, s % q);
            (0..p).map(|j| rho[(idx(i, j, k), idx(i2, j, k2))]).sum()
        }),
        Subsystem::Third => ComplexMatrix::from_fn(n * p, n * p, |r, s| {
            let (i, j) = (r / p, r % p);
            let (i2, j2) = (s / p, s % p);
            (0..q).map(|k| rho[(idx(i, j, k), idx(i2, j2, k))]).sum()
        }),
    };
    Ok(out)
}

/// Gram matrix with entries `u_i* u_j`.
pub fn gram(vectors: &[ComplexVector]) -> Result<ComplexMatrix> {
    if let Some(first) = vectors.first() {
        if let Some(bad) = vectors.iter().find(|v| v.len() != first.len()) {
            return Err(Error::Dimension(format!(
                "gram of vectors with lengths {} and {}",
                first.len(),
                bad.len()
            )));
        }
    }
    let n = vectors.len();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| vectors[i].dotc(&vectors[j])))
}

/// Apply `X ↦ Σ F X F*`.
pub fn apply_kraus(kraus: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let rows = kraus.first().map(|f| f.nrows()).unwrap_or(0);
    let mut out = ComplexMatrix::zeros(rows, rows);
    for f in kraus {
        out += f * x * f.adjoint();
    }
    out
}

/// Apply `I_n ⊗ Φ` blockwise: block `(u, v)` of the result is `Φ(X_uv)`.
pub fn apply_kraus_local(kraus: &[ComplexMatrix], x: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let (out_dim, in_dim) = match kraus.first() {
        Some(f) => f.shape(),
        None => return Err(Error::InvalidParameter("empty Kraus set".into())),
    };
    if x.shape() != (n * in_dim, n * in_dim) {
        return Err(Error::Dimension(format!(
            "cannot apply I_{n} ⊗ Φ (input dim {in_dim}) to a {:?} matrix",
            x.shape()
        )));
    }
    let mut out = ComplexMatrix::zeros(n * out_dim, n * out_dim);
    for u in 0..n {
        for v in 0..n {
            let block = x.view((u * in_dim, v * in_dim), (in_dim, in_dim)).into_owned();
            let image = apply_kraus(kraus, &block);
            out.view_mut((u * out_dim, v * out_dim), (out_dim, out_dim))
                .copy_from(&image);
        }
    }
    Ok(out)
}

/// `‖Σ F*F − I‖_F`.
pub fn completeness_deviation(kraus: &[ComplexMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let d = first.ncols();
    let mut sum = ComplexMatrix::zeros(d, d);
    for f in kraus {
        sum += f.adjoint() * f;
    }
    (sum - ComplexMatrix::identity(d, d)).norm()
}

/// Orthonormal basis of the orthogonal complement of the column space of `m`.
pub(crate) fn orthogonal_complement(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let rows = m.nrows();
    if m.ncols() == 0 {
        return Ok(ComplexMatrix::identity(rows, rows));
    }
    ensure_finite(m, "complement input")?;
    let (u, sv, _) = full_svd(m)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&x| x > rank_tol * smax.max(f64::MIN_POSITIVE)).count();
    Ok(u.columns(rank, rows - rank).into_owned())
}
