//! Large-system dissipation spectrum evaluated from the Hamiltonian alone.
//!
//! With `d = Δᵢ/π`, `g = Γ/2`, `w = |ψᵢ(n₀)|²` and the remainder `rᵢ`,
//!
//! ```text
//! γᵢ = d · ln | (d + g(w + i r)) / (d − g(w − i r)) |
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigen::EigenSystem;
use crate::error::{input, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Perturbative,
    Impedance,
    Zeno,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Perturbative => "perturbative",
            Regime::Impedance => "impedance",
            Regime::Zeno => "zeno",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxSpectrum {
    pub gamma: f64,
    pub remainder: Vec<f64>,
    pub gamma_approx: Vec<f64>,
    pub regime: Vec<Regime>,
    /// Mode sits exactly on the impedance pole; its rate is `+∞`.
    pub pole: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeInfo {
    pub regime: Regime,
    /// Value of the limiting form for this regime.
    pub limit: f64,
    /// `|rᵢ| < |ψᵢ(n₀)|²/√3`: `γᵢ/Γ̄ᵢ` first rises with `Γ` before the Zeno decline.
    pub enhanced: bool,
}

/// `rᵢ = (1/π) Σ_{j≠i} Δᵢ |ψⱼ(n₀)|²/(εᵢ − εⱼ)` over the retained modes.
pub fn remainder_r(es: &EigenSystem, i: usize) -> Result<f64> {
    if es.spacing.is_empty() {
        return input("remainder needs at least two coupled modes");
    }
    if i >= es.n_modes() {
        return input(format!("mode {i} out of range ({} modes)", es.n_modes()));
    }
    Ok(remainder_unchecked(es, i))
}

fn remainder_unchecked(es: &EigenSystem, i: usize) -> f64 {
    let ei = es.energies[i];
    let sum: f64 = es
        .energies
        .iter()
        .zip(&es.weight)
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, (&ej, &wj))| wj / (ei - ej))
        .sum();
    es.spacing[i] * sum / PI
}

pub fn remainders(es: &EigenSystem) -> Result<Vec<f64>> {
    if es.spacing.is_empty() {
        return input("remainder needs at least two coupled modes");
    }
    Ok((0..es.n_modes()).map(|i| remainder_unchecked(es, i)).collect())
}

/// Approximate rate of one mode. Returns `+∞` on the exact pole
/// (`r = 0`, `Γ̄/2 = Δ/π`) and `0` for `Γ = 0`.
pub fn approx_rate(spacing: f64, weight: f64, r: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let d = spacing / PI;
    let g = gamma / 2.0;
    let num = (d + g * weight).powi(2) + (g * r).powi(2);
    let den = (d - g * weight).powi(2) + (g * r).powi(2);
    if den == 0.0 {
        return f64::INFINITY;
    }
    0.5 * d * (num / den).ln()
}

pub fn approx_dissipation_spectrum(es: &EigenSystem, r: &[f64], gamma: f64) -> Result<ApproxSpectrum> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return input(format!("drain coupling must be non-negative and finite, got {gamma}"));
    }
    if r.len() != es.n_modes() || es.spacing.len() != es.n_modes() {
        return input(format!("{} remainders for {} modes", r.len(), es.n_modes()));
    }
    let gamma_approx: Vec<f64> = (0..es.n_modes())
        .map(|i| approx_rate(es.spacing[i], es.weight[i], r[i], gamma))
        .collect();
    Ok(ApproxSpectrum {
        gamma,
        remainder: r.to_vec(),
        pole: gamma_approx.iter().map(|g| g.is_infinite()).collect(),
        regime: (0..es.n_modes()).map(|i| classify(es.spacing[i], es.weight[i], r[i], gamma).regime).collect(),
        gamma_approx,
    })
}

pub fn classify_regime(es: &EigenSystem, r: &[f64], gamma: f64, i: usize) -> Result<RegimeInfo> {
    if i >= es.n_modes() || i >= r.len() || i >= es.spacing.len() {
        return input(format!("mode {i} out of range"));
    }
    Ok(classify(es.spacing[i], es.weight[i], r[i], gamma))
}

fn classify(spacing: f64, w: f64, r: f64, gamma: f64) -> RegimeInfo {
    let d = spacing / PI;
    let coupling = w * gamma;
    let half = coupling / 2.0;
    let enhanced = r.abs() < w / 3f64.sqrt();
    let (regime, limit) = if half < d / 3.0 {
        (Regime::Perturbative, coupling * d * d / (d * d + (r * gamma / 2.0).powi(2)))
    } else if half > 3.0 * d {
        let zeno = w * w / (w * w + r * r) * (4.0 / (PI * PI)) * spacing * spacing / coupling;
        (Regime::Zeno, zeno)
    } else {
        let value = if r == 0.0 { f64::INFINITY } else { coupling * 0.25 * (1.0 + 4.0 * w * w / (r * r)).ln() };
        (Regime::Impedance, value)
    };
    RegimeInfo { regime, limit, enhanced }
}
