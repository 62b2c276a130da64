//! Thin safe wrappers over the LAPACK drivers used by the crate.
//!
//! All matrices handed in and out are `ndarray` arrays; the column-major
//! copies LAPACK needs are made here.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

fn lapack_check(routine: &'static str, info: i32) -> Result<()> {
    if info == 0 {
        Ok(())
    } else {
        Err(Error::Lapack { routine, info })
    }
}

fn to_i32(n: usize) -> Result<i32> {
    i32::try_from(n).map_err(|_| Error::CapExceeded {
        what: "LAPACK dimension",
        value: n,
        cap: i32::MAX as usize,
    })
}

/// Eigen-decomposition of a real symmetric matrix (divide and conquer).
///
/// Returns ascending eigenvalues and a matrix whose columns are the
/// orthonormal eigenvectors. Only the lower triangle is referenced.
pub fn eigh_real(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh_real needs a square matrix");
    if n == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    let ni = to_i32(n)?;
    // Column-major copy: buf[j * n + i] = a[i, j].
    let mut buf: Vec<f64> = a.t().iter().copied().collect();
    let mut w = vec![0.0; n];
    let mut info = 0;
    let mut work = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    unsafe {
        lapack::dsyevd(
            b'V', b'L', ni, &mut buf, ni, &mut w, &mut work, -1, &mut iwork, -1, &mut info,
        );
    }
    lapack_check("dsyevd(query)", info)?;
    let lwork = work[0] as usize;
    let liwork = iwork[0] as usize;
    work = vec![0.0; lwork.max(1)];
    iwork = vec![0; liwork.max(1)];
    unsafe {
        lapack::dsyevd(
            b'V',
            b'L',
            ni,
            &mut buf,
            ni,
            &mut w,
            &mut work,
            to_i32(lwork)?,
            &mut iwork,
            to_i32(liwork)?,
            &mut info,
        );
    }
    lapack_check("dsyevd", info)?;
    let vecs = Array2::from_shape_vec((n, n), buf)
        .expect("shape matches buffer")
        .reversed_axes();
    Ok((Array1::from(w), vecs))
}

/// Eigen-decomposition of a complex Hermitian matrix (divide and conquer).
pub fn eigh_complex(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh_complex needs a square matrix");
    if n == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    let ni = to_i32(n)?;
    let mut buf: Vec<C64> = a.t().iter().copied().collect();
    let mut w = vec![0.0; n];
    let mut info = 0;
    let mut work = vec![C64::new(0.0, 0.0); 1];
    let mut rwork = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    unsafe {
        lapack::zheevd(
            b'V', b'L', ni, &mut buf, ni, &mut w, &mut work, -1, &mut rwork, -1, &mut iwork, -1,
            &mut info,
        );
    }
    lapack_check("zheevd(query)", info)?;
    let lwork = work[0].re as usize;
    let lrwork = rwork[0] as usize;
    let liwork = iwork[0] as usize;
    work = vec![C64::new(0.0, 0.0); lwork.max(1)];
    rwork = vec![0.0; lrwork.max(1)];
    iwork = vec![0; liwork.max(1)];
    unsafe {
        lapack::zheevd(
            b'V',
            b'L',
            ni,
            &mut buf,
            ni,
            &mut w,
            &mut work,
            to_i32(lwork)?,
            &mut rwork,
            to_i32(lrwork)?,
            &mut iwork,
            to_i32(liwork)?,
            &mut info,
        );
    }
    lapack_check("zheevd", info)?;
    let vecs = Array2::from_shape_vec((n, n), buf)
        .expect("shape matches buffer")
        .reversed_axes();
    Ok((Array1::from(w), vecs))
}

/// Eigenvalues of a complex Hermitian matrix, without vectors.
pub fn eigvalsh_complex(a: &Array2<C64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigvalsh_complex needs a square matrix");
    if n == 0 {
        return Ok(Array1::zeros(0));
    }
    let ni = to_i32(n)?;
    let mut buf: Vec<C64> = a.t().iter().copied().collect();
    let mut w = vec![0.0; n];
    let mut info = 0;
    let mut work = vec![C64::new(0.0, 0.0); 1];
    let mut rwork = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    unsafe {
        lapack::zheevd(
            b'N', b'L', ni, &mut buf, ni, &mut w, &mut work, -1, &mut rwork, -1, &mut iwork, -1,
            &mut info,
        );
    }
    lapack_check("zheevd(query)", info)?;
    let lwork = work[0].re as usize;
    let lrwork = rwork[0] as usize;
    let liwork = iwork[0] as usize;
    work = vec![C64::new(0.0, 0.0); lwork.max(1)];
    rwork = vec![0.0; lrwork.max(1)];
    iwork = vec![0; liwork.max(1)];
    unsafe {
        lapack::zheevd(
            b'N',
            b'L',
            ni,
            &mut buf,
            ni,
            &mut w,
            &mut work,
            to_i32(lwork)?,
            &mut rwork,
            to_i32(lrwork)?,
            &mut iwork,
            to_i32(liwork)?,
            &mut info,
        );
    }
    lapack_check("zheevd", info)?;
    Ok(Array1::from(w))
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
///
/// `diag` has length m, `offdiag` length m - 1. Eigenvectors are returned
/// column-major in a flat buffer: component i of vector k is `z[k * m + i]`.
pub fn eigh_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = diag.len();
    assert_eq!(offdiag.len() + 1, m.max(1), "tridiagonal shape");
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; m * m];
    let mut work = vec![0.0; (2 * m).saturating_sub(2).max(1)];
    let mut info = 0;
    let mi = to_i32(m)?;
    unsafe {
        lapack::dstev(b'V', mi, &mut d, &mut e, &mut z, mi.max(1), &mut work, &mut info);
    }
    lapack_check("dstev", info)?;
    Ok((d, z))
}

/// Solves `a * x = b` for square complex `a` by LU with partial pivoting.
pub fn solve_complex(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "solve needs a square matrix");
    assert_eq!(n, b.nrows(), "right-hand side rows");
    let nrhs = b.ncols();
    let ni = to_i32(n)?;
    let mut abuf: Vec<C64> = a.t().iter().copied().collect();
    let mut bbuf: Vec<C64> = b.t().iter().copied().collect();
    let mut ipiv = vec![0i32; n];
    let mut info = 0;
    unsafe {
        lapack::zgesv(
            ni,
            to_i32(nrhs)?,
            &mut abuf,
            ni,
            &mut ipiv,
            &mut bbuf,
            ni,
            &mut info,
        );
    }
    lapack_check("zgesv", info)?;
    Ok(Array2::from_shape_vec((nrhs, n), bbuf)
        .expect("shape matches buffer")
        .reversed_axes()
        .as_standard_layout()
        .to_owned())
}

/// Hermitian eigensolver for 3 x 3 real symmetric matrices (used for the
/// spin covariance quadratic form).
pub fn eigh_sym3(a: &[[f64; 3]; 3]) -> Result<([f64; 3], [[f64; 3]; 3])> {
    let m = Array2::from_shape_fn((3, 3), |(i, j)| a[i][j]);
    let (w, v) = eigh_real(&m)?;
    let mut vecs = [[0.0; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            vecs[k][i] = v[[i, k]];
        }
    }
    Ok(([w[0], w[1], w[2]], vecs))
}
