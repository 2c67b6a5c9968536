//! Exact dissipation spectrum: the non-Hermitian dynamical matrix, its
//! eigenvalues, and its closed-form left eigenvectors and inverse.
//!
//! In the eigenmode basis `A = diag(ε) − (i/2) g g†` with
//! `gᵢ = e^{−iφᵢ}√Γ̄ᵢ`. Every eigenvalue solves the self-consistency
//! equation `S(λ) = ½ Σⱼ Γ̄ⱼ/(λ − εⱼ) = i`.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::eigen::EigenSystem;
use crate::error::{input, numeric, Result};
use crate::linalg::{c, eigenvalues, identity_defect, max_abs, CMat, I};

/// `A_ij = δ_ij εᵢ − i e^{i(φⱼ−φᵢ)} ½√(Γ̄ᵢΓ̄ⱼ)` on the retained modes.
pub fn dynamical_matrix(es: &EigenSystem, gamma: f64) -> Result<CMat> {
    check_gamma(gamma)?;
    let g = es.coupling_vector(gamma);
    let m = es.n_modes();
    Ok(Mat::from_fn(m, m, |i, j| {
        let diag = if i == j { c(es.energies[i]) } else { c(0.0) };
        diag - 0.5 * I * g[i] * g[j].conj()
    }))
}

/// The same operator on the lattice sites: `H − i(Γ/2)|n₀⟩⟨n₀|`.
pub fn site_dynamical_matrix(h: &CMat, drain: usize, gamma: f64) -> Result<CMat> {
    check_gamma(gamma)?;
    if drain >= h.nrows() {
        return input(format!("drain site {drain} outside {}-site lattice", h.nrows()));
    }
    let mut a = h.clone();
    a[(drain, drain)] -= 0.5 * I * gamma;
    Ok(a)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        input(format!("drain coupling must be non-negative and finite, got {gamma}"))
    }
}

#[derive(Debug, Clone)]
pub struct ModeVectors {
    /// Rows are left eigenvectors: `V A = diag(λ) V`.
    pub left: CMat,
    pub inverse: CMat,
    pub weights: Vec<C64>,
    /// `max |V A − diag(λ) V|`.
    pub left_residual: f64,
    /// `max |V V⁻¹ − 1|`.
    pub inverse_residual: f64,
    /// Largest deviation between the closed-form rows and the numerically
    /// computed left eigenvectors, after matching their normalization.
    pub numeric_left_mismatch: f64,
}

/// Complex spectrum `λᵢ = εᵢ + δνᵢ − iγᵢ/2`, with `λᵢ` paired to its parent
/// energy `εᵢ` (same index).
#[derive(Debug, Clone)]
pub struct DynamicalSpectrum {
    pub gamma: f64,
    pub energies: Vec<f64>,
    pub lambdas: Vec<C64>,
    pub shifts: Vec<f64>,
    pub rates: Vec<f64>,
    /// `solver_order[i]` is the position of `λᵢ` in the raw eigensolver output.
    pub solver_order: Vec<usize>,
    /// Two eigenvalues had equal real parts; pairing fell back to index order.
    pub ambiguous_match: bool,
    /// Overdamped drain-localized modes (`γ > 10·max Δ`).
    pub macroscopic: Vec<bool>,
    /// Largest `|S(λᵢ) − i|` after refinement.
    pub consistency_residual: f64,
    /// `None` when `Γ = 0`: `A` is then diagonal and the closed forms are singular.
    pub vectors: Option<ModeVectors>,
}

impl DynamicalSpectrum {
    pub fn n_modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn min_rate(&self) -> f64 {
        self.rates.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `S(λ) = ½ Σⱼ Γ̄ⱼ/(λ − εⱼ)`.
pub fn self_consistency(es: &EigenSystem, gamma: f64, lambda: C64) -> C64 {
    0.5 * es
        .energies
        .iter()
        .zip(&es.weight)
        .map(|(&e, &w)| w * gamma / (lambda - e))
        .sum::<C64>()
}

fn self_consistency_with_slope(es: &EigenSystem, gamma: f64, lambda: C64) -> (C64, C64) {
    let mut s = c(0.0);
    let mut ds = c(0.0);
    for (&e, &w) in es.energies.iter().zip(&es.weight) {
        let inv = 1.0 / (lambda - e);
        s += w * gamma * inv;
        ds -= w * gamma * inv * inv;
    }
    (0.5 * s, 0.5 * ds)
}

/// Newton iteration on `S(λ) − i` from `lambda0`, until `|S − i| < 1e-10`.
pub fn refine_root(es: &EigenSystem, gamma: f64, lambda0: C64) -> Result<C64> {
    let mut lambda = lambda0;
    for _ in 0..100 {
        let (s, ds) = self_consistency_with_slope(es, gamma, lambda);
        let f = s - I;
        if f.norm() < 1e-10 {
            return Ok(lambda);
        }
        if !ds.is_finite() || ds.norm() == 0.0 {
            break;
        }
        lambda -= f / ds;
        if !lambda.is_finite() {
            break;
        }
    }
    numeric(format!("self-consistency refinement did not converge (last iterate {lambda})"))
}

/// Diagonalizes `a` (the eigenmode-basis dynamical matrix of `es` at `gamma`),
/// pairs eigenvalues with energies in rank order of the real part, polishes
/// each eigenvalue on `S(λ) = i`, and builds the closed-form vectors.
pub fn exact_dynamical_spectrum(a: &CMat, es: &EigenSystem, gamma: f64) -> Result<DynamicalSpectrum> {
    check_gamma(gamma)?;
    let m = es.n_modes();
    if a.nrows() != m || a.ncols() != m {
        return input(format!("dynamical matrix is {}x{}, eigensystem has {m} modes", a.nrows(), a.ncols()));
    }
    let scale = es.hop_scale.max(gamma);
    if gamma == 0.0 {
        return Ok(DynamicalSpectrum {
            gamma,
            energies: es.energies.clone(),
            lambdas: es.energies.iter().map(|&e| c(e)).collect(),
            shifts: vec![0.0; m],
            rates: vec![0.0; m],
            solver_order: (0..m).collect(),
            ambiguous_match: false,
            macroscopic: vec![false; m],
            consistency_residual: 0.0,
            vectors: None,
        });
    }

    let raw = eigenvalues(a.as_ref())?;
    let mut solver_order: Vec<usize> = (0..m).collect();
    solver_order.sort_by(|&x, &y| raw[x].re.total_cmp(&raw[y].re));
    let ambiguous_match = solver_order
        .windows(2)
        .any(|w| (raw[w[1]].re - raw[w[0]].re).abs() < 1e-12 * es.hop_scale);

    let mut lambdas: Vec<C64> = solver_order.iter().map(|&k| raw[k]).collect();
    for i in 0..m {
        if let Ok(refined) = refine_root(es, gamma, lambdas[i]) {
            if (refined - lambdas[i]).norm() <= 1e-8 * scale {
                lambdas[i] = refined;
            }
        }
    }
    let consistency_residual = lambdas
        .iter()
        .map(|&l| (self_consistency(es, gamma, l) - I).norm())
        .fold(0.0, f64::max);

    let max_spacing = es.spacing.iter().copied().fold(0.0, f64::max);
    let rates: Vec<f64> = lambdas.iter().map(|l| -2.0 * l.im).collect();
    let macroscopic = rates.iter().map(|&g| m > 1 && g > 10.0 * max_spacing).collect();

    let (left, left_residual) = closed_form_left_eigenvectors(&lambdas, es, gamma)?;
    let (inverse, weights) = closed_form_inverse(&lambdas, es, gamma)?;
    let inverse_residual = identity_defect((&left * &inverse).as_ref());
    let numeric_left_mismatch = numeric_left_mismatch(a, &raw, &solver_order, &left)?;

    Ok(DynamicalSpectrum {
        gamma,
        energies: es.energies.clone(),
        shifts: lambdas.iter().zip(&es.energies).map(|(l, e)| l.re - e).collect(),
        rates,
        lambdas,
        solver_order,
        ambiguous_match,
        macroscopic,
        consistency_residual,
        vectors: Some(ModeVectors { left, inverse, weights, left_residual, inverse_residual, numeric_left_mismatch }),
    })
}

fn check_poles(lambdas: &[C64], es: &EigenSystem) -> Result<()> {
    for (i, l) in lambdas.iter().enumerate() {
        for (j, &e) in es.energies.iter().enumerate() {
            if (l - e).norm() < 1e-14 * es.hop_scale {
                return numeric(format!("pole collision: lambda_{i} = {l} coincides with energy_{j} = {e}"));
            }
        }
    }
    Ok(())
}

/// `V_ij = ½ e^{iφⱼ}√Γ̄ⱼ/(λᵢ − εⱼ)`, returned with `max |V A − diag(λ) V|`.
pub fn closed_form_left_eigenvectors(lambdas: &[C64], es: &EigenSystem, gamma: f64) -> Result<(CMat, f64)> {
    check_poles(lambdas, es)?;
    let m = es.n_modes();
    if lambdas.len() != m {
        return input(format!("{} eigenvalues for {m} modes", lambdas.len()));
    }
    let g = es.coupling_vector(gamma);
    let v = Mat::from_fn(m, m, |i, j| 0.5 * g[j].conj() / (lambdas[i] - es.energies[j]));
    let a = dynamical_matrix(es, gamma)?;
    let mut r = &v * &a;
    for i in 0..m {
        for j in 0..m {
            r[(i, j)] -= lambdas[i] * v[(i, j)];
        }
    }
    Ok((v, max_abs(r.as_ref())))
}

/// `V⁻¹_ij = e^{−iφᵢ}√Γ̄ᵢ Gⱼ/(λⱼ − εᵢ)` with `1/Gᵢ = ½ Σⱼ Γ̄ⱼ/(λᵢ − εⱼ)²`.
pub fn closed_form_inverse(lambdas: &[C64], es: &EigenSystem, gamma: f64) -> Result<(CMat, Vec<C64>)> {
    check_poles(lambdas, es)?;
    let m = es.n_modes();
    if lambdas.len() != m {
        return input(format!("{} eigenvalues for {m} modes", lambdas.len()));
    }
    let g = es.coupling_vector(gamma);
    let weights: Vec<C64> = lambdas
        .iter()
        .map(|&l| {
            let inv: C64 = es
                .energies
                .iter()
                .zip(&es.weight)
                .map(|(&e, &w)| w * gamma / ((l - e) * (l - e)))
                .sum::<C64>()
                * 0.5;
            1.0 / inv
        })
        .collect();
    let inverse = Mat::from_fn(m, m, |i, j| g[i] * weights[j] / (lambdas[j] - es.energies[i]));
    Ok((inverse, weights))
}

/// Left eigenvectors from the numerical right eigenvectors (`R⁻¹`), each row
/// rescaled onto the matching closed-form row; returns the largest deviation
/// relative to the row's largest entry.
fn numeric_left_mismatch(a: &CMat, raw: &[C64], solver_order: &[usize], closed: &CMat) -> Result<f64> {
    let m = a.nrows();
    let eig = a.eigen().map_err(|e| crate::Error::Numeric(format!("eigensolver: {e:?}")))?;
    let vals: Vec<C64> = eig.S().column_vector().iter().copied().collect();
    let right = eig.U().to_owned();
    let left = right.partial_piv_lu().inverse();
    let mut worst = 0.0f64;
    for (i, &k) in solver_order.iter().enumerate() {
        // the second decomposition reproduces the first; locate by value
        let target = raw[k];
        let row = (0..m)
            .min_by(|&x, &y| (vals[x] - target).norm().total_cmp(&(vals[y] - target).norm()))
            .unwrap();
        let pivot = (0..m).max_by(|&x, &y| closed[(i, x)].norm().total_cmp(&closed[(i, y)].norm())).unwrap();
        let ratio = closed[(i, pivot)] / left[(row, pivot)];
        let top = closed[(i, pivot)].norm();
        for j in 0..m {
            worst = worst.max((left[(row, j)] * ratio - closed[(i, j)]).norm() / top);
        }
    }
    Ok(worst)
}
