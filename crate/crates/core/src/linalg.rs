//! Thin wrappers over the dense linear-algebra backend, fixing conventions
//! used throughout: SVDs return (U, s, V^H) with descending real singular
//! values, Hermitian eigendecompositions return ascending eigenvalues.

use std::sync::Once;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = Mat<C64>;

// Decompositions run sequentially: parallelism lives at the sample level,
// and per-op splitting would make results depend on the worker-pool shape.
static INIT: Once = Once::new();

fn sequential() {
    INIT.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

/// Thin SVD `a = u · diag(s) · vh` with descending nonnegative `s`.
pub fn svd_thin(a: &CMat) -> Result<(CMat, Vec<f64>, CMat)> {
    sequential();
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("svd failed: {e:?}")))?;
    let u = svd.U().to_owned();
    let s: Vec<f64> = svd
        .S()
        .column_vector()
        .iter()
        .map(|v| v.re)
        .collect();
    let vh = svd.V().adjoint().to_owned();
    Ok((u, s, vh))
}

/// Singular values only, descending.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    sequential();
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("svd failed: {e:?}")))?;
    Ok(svd.S().column_vector().iter().map(|v| v.re).collect())
}

/// Thin QR `a = q · r` with `q` having orthonormal columns.
pub fn qr_thin(a: &CMat) -> (CMat, CMat) {
    sequential();
    let qr = a.qr();
    (qr.compute_thin_Q(), qr.thin_R().to_owned())
}

/// Thin LQ `a = l · q` with `q` having orthonormal rows.
pub fn lq_thin(a: &CMat) -> (CMat, CMat) {
    let (q, r) = qr_thin(&a.adjoint().to_owned());
    (r.adjoint().to_owned(), q.adjoint().to_owned())
}

/// Hermitian eigendecomposition `a = v · diag(e) · v^H`, eigenvalues
/// ascending.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    sequential();
    let eig = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let e: Vec<f64> = eig.S().column_vector().iter().map(|v| v.re).collect();
    Ok((e, eig.U().to_owned()))
}

/// Fixes the SVD gauge: the largest-magnitude entry of each column of `u` is
/// made real and positive, with the compensating phase applied to the rows of
/// `vh` so that `u · diag(s) · vh` is unchanged.
pub fn gauge_fix_svd(u: &mut CMat, vh: &mut CMat) {
    for j in 0..u.ncols() {
        let mut best = 0usize;
        let mut best_norm = 0.0f64;
        for i in 0..u.nrows() {
            let nrm = u[(i, j)].norm_sqr();
            if nrm > best_norm {
                best_norm = nrm;
                best = i;
            }
        }
        if best_norm == 0.0 {
            continue;
        }
        let z = u[(best, j)];
        let phase = z / z.norm();
        let conj = phase.conj();
        for i in 0..u.nrows() {
            u[(i, j)] *= conj;
        }
        if j < vh.nrows() {
            for c in 0..vh.ncols() {
                vh[(j, c)] *= phase;
            }
        }
    }
}

/// Row scaling `diag(d) · a`.
pub fn diag_mul(d: &[f64], a: &CMat) -> CMat {
    assert_eq!(d.len(), a.nrows());
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * d[i])
}

/// Column scaling `a · diag(d)`.
pub fn mul_diag(a: &CMat, d: &[f64]) -> CMat {
    assert_eq!(d.len(), a.ncols());
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * d[j])
}

/// Frobenius norm.
pub fn frob(a: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Max absolute deviation of `a` from the identity.
pub fn identity_error(a: &CMat) -> f64 {
    let mut err: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((a[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    err
}
