//! Small dense helpers on top of `faer` that the physics modules share.

use faer::{c64, Mat, MatRef};

use crate::hilbert::ComplexMatrix;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

pub fn identity(n: usize) -> ComplexMatrix {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn scaled(a: MatRef<'_, c64>, k: c64) -> ComplexMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * k)
}

pub fn adjoint(a: MatRef<'_, c64>) -> ComplexMatrix {
    a.adjoint().to_owned()
}

/// Kronecker product with `a` as the slow (outer) factor.
pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> ComplexMatrix {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn trace(a: MatRef<'_, c64>) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

/// Largest entrywise modulus of `a - a†`.
pub fn hermiticity_defect(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

pub fn conjugate(a: MatRef<'_, c64>) -> ComplexMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].conj())
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_one(a: MatRef<'_, c64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(a + a†) / 2`.
pub fn hermitian_part(a: MatRef<'_, c64>) -> ComplexMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        (a[(i, j)] + a[(j, i)].conj()) * 0.5
    })
}

const EXPM_TOL: f64 = 1e-13;

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
///
/// The argument is scaled so that its 1-norm is at most 1/2; the series is then
/// summed until the next term is below `1e-13` relative to the partial sum.
pub fn expm(a: MatRef<'_, c64>) -> ComplexMatrix {
    assert_eq!(a.nrows(), a.ncols(), "expm of a non-square matrix");
    let n = a.nrows();
    let norm = norm_one(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let x = scaled(a, c64::new(scale, 0.0));

    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..64 {
        term = scaled((&term * &x).as_ref(), c64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
        if norm_one(term.as_ref()) <= EXPM_TOL * norm_one(sum.as_ref()) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
