//! Small dense-matrix helpers shared by the numerical modules.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;

use crate::error::{numeric, Result};

pub type CMat = Mat<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn max_abs(m: MatRef<'_, C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

pub fn max_abs_diff(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            best = best.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    best
}

/// Largest elementwise deviation of `m` from its conjugate transpose.
pub fn hermiticity_defect(m: MatRef<'_, C64>) -> f64 {
    assert_eq!(m.nrows(), m.ncols());
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..=j {
            best = best.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    best
}

/// Largest elementwise deviation of `m` from its transpose.
pub fn symmetry_defect(m: MatRef<'_, C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..j {
            best = best.max((m[(i, j)] - m[(j, i)]).norm());
        }
    }
    best
}

pub fn identity_defect(m: MatRef<'_, C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let target = if i == j { c(1.0) } else { c(0.0) };
            best = best.max((m[(i, j)] - target).norm());
        }
    }
    best
}

pub fn hermitian_eigenvalues(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| crate::Error::Numeric(format!("hermitian eigenvalue solver: {e:?}")))
}

/// Eigenvalues of a general complex matrix, in solver order.
pub fn eigenvalues(m: MatRef<'_, C64>) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    match m.eigenvalues() {
        Ok(v) => Ok(v),
        Err(e) => numeric(format!("eigenvalue solver: {e:?}")),
    }
}

pub fn trace(m: MatRef<'_, C64>) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// `(e^{i z t} - 1) / (i z)`, i.e. the integral of `e^{i z s}` over `[0, t]`.
///
/// Switches to a Taylor series when `|z t|` is small so the resonant limit
/// `t` is reached without cancellation.
pub fn phase_integral(z: C64, t: f64) -> C64 {
    let x = z * t;
    if x.norm() < 1e-4 {
        // t * (1 + x/2 + x^2/6 + x^3/24) with x -> i z t
        let ix = I * x;
        return t * (1.0 + ix / 2.0 + ix * ix / 6.0 + ix * ix * ix / 24.0);
    }
    ((I * x).exp() - 1.0) / (I * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_integral_branches_agree() {
        let t = 3.0;
        for z in [C64::new(1e-3, 2e-4), C64::new(0.5, 0.1), C64::new(-2.0, 0.7)] {
            let direct = ((I * z * t).exp() - 1.0) / (I * z);
            assert!((phase_integral(z, t) - direct).norm() < 1e-12);
        }
        // small-argument branch against the closed form at a point where both are accurate
        let z = C64::new(2e-5, 1e-5);
        let direct = ((I * z * t).exp() - 1.0) / (I * z);
        assert!((phase_integral(z, t) - direct).norm() < 1e-9);
        assert_eq!(phase_integral(c(0.0), t), c(t));
    }

    #[test]
    fn defects_of_simple_matrices() {
        let m = Mat::from_fn(2, 2, |i, j| if i == j { c(1.0) } else { C64::new(0.0, (i as f64) - (j as f64)) });
        assert_eq!(hermiticity_defect(m.as_ref()), 0.0);
        assert_eq!(symmetry_defect(m.as_ref()), 2.0);
        assert_eq!(identity_defect(m.as_ref()), 1.0);
    }
}
