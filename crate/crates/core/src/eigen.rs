//! Drain-coupled eigenmodes of a lattice Hamiltonian.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{input, Result};
use crate::lattice::LatticeModel;
use crate::linalg::{c, CMat};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Energies closer than `degeneracy_tol · J` form one degenerate group.
    pub degeneracy_tol: f64,
    /// Modes with `|ψ(n₀)|² ≤ drop_tol` are treated as decoupled.
    pub drop_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { degeneracy_tol: 1e-9, drop_tol: 1e-12 }
    }
}

/// Energy eigenmodes that couple to the drain, sorted by energy.
///
/// `weight[i] = |ψᵢ(n₀)|²`, so the effective coupling of mode `i` to a drain
/// of strength `Γ` is `Γ̄ᵢ = weight[i] · Γ`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub n_sites: usize,
    pub drain: usize,
    pub hop_scale: f64,
    pub energies: Vec<f64>,
    /// `N × M`; column `i` is `ψᵢ`.
    pub wavefunctions: CMat,
    pub drain_amp: Vec<C64>,
    pub drain_phase: Vec<f64>,
    pub weight: Vec<f64>,
    /// Local level spacing `Δᵢ`; empty when fewer than two modes are retained.
    pub spacing: Vec<f64>,
    pub dropped_energies: Vec<f64>,
    /// `N × (N − M)` basis of the decoupled subspace.
    pub dropped_vectors: CMat,
}

impl EigenSystem {
    pub fn n_modes(&self) -> usize {
        self.energies.len()
    }

    pub fn n_dropped(&self) -> usize {
        self.dropped_energies.len()
    }

    /// `g_i = e^{−iφᵢ}·√(Γ̄ᵢ)`, the drain coupling vector of the dynamical matrix.
    pub fn coupling_vector(&self, gamma: f64) -> Vec<C64> {
        self.drain_amp.iter().map(|a| a.conj() * gamma.sqrt()).collect()
    }

    pub fn couplings(&self, gamma: f64) -> Vec<f64> {
        self.weight.iter().map(|w| w * gamma).collect()
    }

    /// `Σ |ψ(n₀)|²` over retained and dropped modes; equals 1 for a complete basis.
    pub fn total_drain_weight(&self) -> f64 {
        let dropped: f64 = (0..self.n_dropped()).map(|k| self.dropped_vectors[(self.drain, k)].norm_sqr()).sum();
        self.weight.iter().sum::<f64>() + dropped
    }

    /// `Ψ diag(ε) Ψ†` over the full (retained + dropped) basis.
    pub fn reconstruct_hamiltonian(&self) -> CMat {
        let n = self.n_sites;
        let mut h = Mat::<C64>::zeros(n, n);
        let mut add = |e: f64, v: &dyn Fn(usize) -> C64| {
            for col in 0..n {
                let vc = v(col).conj() * e;
                for row in 0..n {
                    h[(row, col)] += v(row) * vc;
                }
            }
        };
        for (i, &e) in self.energies.iter().enumerate() {
            add(e, &|r| self.wavefunctions[(r, i)]);
        }
        for (k, &e) in self.dropped_energies.iter().enumerate() {
            add(e, &|r| self.dropped_vectors[(r, k)]);
        }
        h
    }
}

pub fn diagonalize_coupled(model: &LatticeModel) -> Result<EigenSystem> {
    diagonalize_coupled_with(model, &EigenOptions::default())
}

pub fn diagonalize_coupled_with(model: &LatticeModel, opts: &EigenOptions) -> Result<EigenSystem> {
    model.validate()?;
    let n = model.n_sites;
    let n0 = model.drain;
    let eig = model
        .hamiltonian
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| crate::Error::Numeric(format!("hermitian eigensolver: {e:?}")))?;
    let vals: Vec<f64> = eig.S().column_vector().iter().map(|z| z.re).collect();
    let u = eig.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));

    let mut kept: Vec<(f64, Vec<C64>)> = Vec::new();
    let mut dropped: Vec<(f64, Vec<C64>)> = Vec::new();
    let column = |k: usize| -> Vec<C64> { (0..n).map(|r| u[(r, k)]).collect() };

    let tol = opts.degeneracy_tol * model.hop_scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[order[end]] - vals[order[end - 1]] < tol {
            end += 1;
        }
        let group: Vec<Vec<C64>> = order[start..end].iter().map(|&k| column(k)).collect();
        let energy = order[start..end].iter().map(|&k| vals[k]).sum::<f64>() / (end - start) as f64;
        if group.len() == 1 {
            let v = fix_phase(group.into_iter().next().unwrap());
            if v[n0].norm_sqr() > opts.drop_tol {
                kept.push((energy, v));
            } else {
                dropped.push((energy, v));
            }
        } else {
            let (coupled, rest) = rotate_group(&group, n0);
            match coupled {
                Some(v) if v[n0].norm_sqr() > opts.drop_tol => kept.push((energy, fix_phase(v))),
                Some(v) => dropped.push((energy, fix_phase(v))),
                None => {}
            }
            dropped.extend(rest.into_iter().map(|v| (energy, fix_phase(v))));
        }
        start = end;
    }

    let m = kept.len();
    let wavefunctions = Mat::from_fn(n, m, |r, i| kept[i].1[r]);
    let dropped_vectors = Mat::from_fn(n, dropped.len(), |r, k| dropped[k].1[r]);
    let energies: Vec<f64> = kept.iter().map(|(e, _)| *e).collect();
    let drain_amp: Vec<C64> = kept.iter().map(|(_, v)| v[n0]).collect();
    let spacing = if m >= 2 { spacings_of(&energies) } else { Vec::new() };
    Ok(EigenSystem {
        n_sites: n,
        drain: n0,
        hop_scale: model.hop_scale,
        drain_phase: drain_amp.iter().map(|a| a.arg()).collect(),
        weight: drain_amp.iter().map(|a| a.norm_sqr()).collect(),
        energies,
        wavefunctions,
        drain_amp,
        spacing,
        dropped_energies: dropped.iter().map(|(e, _)| *e).collect(),
        dropped_vectors,
    })
}

/// Centered differences inside the spectrum, one-sided at both ends.
pub fn level_spacings(es: &EigenSystem) -> Result<Vec<f64>> {
    if es.n_modes() < 2 {
        return input(format!("level spacing needs at least two coupled modes, got {}", es.n_modes()));
    }
    Ok(spacings_of(&es.energies))
}

pub(crate) fn spacings_of(e: &[f64]) -> Vec<f64> {
    let m = e.len();
    (0..m)
        .map(|i| match i {
            0 => e[1] - e[0],
            i if i == m - 1 => e[m - 1] - e[m - 2],
            i => (e[i + 1] - e[i - 1]) / 2.0,
        })
        .collect()
}

/// Scales `v` so its largest-magnitude entry (first one, within 1e-8
/// relative) is real and positive.
fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-8)).unwrap();
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in &mut v {
        *z *= phase;
    }
    v
}

/// Splits a degenerate group into the single combination that carries all
/// the drain amplitude and an orthonormal complement with none.
fn rotate_group(group: &[Vec<C64>], n0: usize) -> (Option<Vec<C64>>, Vec<Vec<C64>>) {
    let k = group.len();
    let n = group[0].len();
    let amp: Vec<C64> = group.iter().map(|v| v[n0]).collect();
    let norm = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let combine = |coef: &[C64]| -> Vec<C64> {
        (0..n).map(|r| (0..k).map(|q| coef[q] * group[q][r]).sum()).collect()
    };
    if norm == 0.0 {
        return (None, group.to_vec());
    }
    // coefficient-space direction of the coupled vector, then its complement
    let lead: Vec<C64> = amp.iter().map(|z| z.conj() / norm).collect();
    let mut basis: Vec<Vec<C64>> = vec![lead.clone()];
    for e in 0..k {
        if basis.len() == k {
            break;
        }
        let mut w: Vec<C64> = (0..k).map(|q| if q == e { c(1.0) } else { c(0.0) }).collect();
        for b in &basis {
            let proj: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wq, bq) in w.iter_mut().zip(b) {
                *wq -= proj * bq;
            }
        }
        let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if wn > 1e-6 {
            basis.push(w.into_iter().map(|z| z / wn).collect());
        }
    }
    let coupled = combine(&lead);
    let rest = basis[1..].iter().map(|b| combine(b)).collect();
    (Some(coupled), rest)
}
