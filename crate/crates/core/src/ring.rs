//! Closed-form dissipation spectrum of the flux-π/2 ring with `N` sites.
//!
//! Modes are labelled by half-integer-shifted `i ∈ {−(N−1)/2, …, (N−1)/2}`
//! with `εᵢ = 2J sin(πi/N)`; each couples to the drain with `Γ̄ᵢ = Γ/N`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{input, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingAnalytics {
    pub n: usize,
    pub j: f64,
    pub gamma: f64,
    /// Critical momentum `arccos(Γ/4J)` where the band velocity matches the
    /// drain; `None` in the overdamped case `Γ > 4J`.
    pub k_c: Option<f64>,
    pub labels: Vec<f64>,
    pub energies: Vec<f64>,
    pub spacing: Vec<f64>,
    pub gamma_of_mode: Vec<f64>,
    /// Rate of the drain-localized mode that splits off for `Γ > 4J`:
    /// `√(Γ² − 16J²)`, the large-`N` root of `S(λ) = i` on the imaginary axis.
    pub gamma_0: Option<f64>,
}

impl RingAnalytics {
    /// `πi/N` for each mode.
    pub fn momenta(&self) -> Vec<f64> {
        self.labels.iter().map(|i| PI * i / self.n as f64).collect()
    }
}

pub fn ring_analytics(n: usize, j: f64, gamma: f64) -> Result<RingAnalytics> {
    if n < 3 {
        return input(format!("ring needs at least 3 sites, got {n}"));
    }
    if !(j > 0.0 && j.is_finite()) {
        return input(format!("hopping must be positive, got {j}"));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return input(format!("drain coupling must be non-negative and finite, got {gamma}"));
    }
    let nf = n as f64;
    let labels: Vec<f64> = (0..n).map(|rank| rank as f64 - (nf - 1.0) / 2.0).collect();
    let ratio = gamma / (4.0 * j);
    let k_c = (ratio <= 1.0).then(|| ratio.acos());
    let gamma_of_mode = labels
        .iter()
        .map(|i| {
            let cos = (PI * i / nf).cos();
            let pref = 2.0 * j / nf * cos;
            if (cos - ratio).abs() < 1e-12 {
                pref * nf.ln()
            } else {
                pref * ((cos + ratio) / (cos - ratio)).abs().ln()
            }
        })
        .collect();
    Ok(RingAnalytics {
        n,
        j,
        gamma,
        k_c,
        energies: labels.iter().map(|i| 2.0 * j * (PI * i / nf).sin()).collect(),
        spacing: labels.iter().map(|i| (PI / nf).sin() * 2.0 * j * (PI * i / nf).cos()).collect(),
        labels,
        gamma_of_mode,
        gamma_0: (ratio > 1.0).then(|| (gamma * gamma - 16.0 * j * j).sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_momentum() {
        let ra = ring_analytics(100, 1.0, 1.0).unwrap();
        assert!((ra.k_c.unwrap() - 0.25f64.acos()).abs() < 1e-15);
        assert!((ra.k_c.unwrap() - 1.3181).abs() < 1e-4);
        assert!(ra.gamma_0.is_none());
    }

    #[test]
    fn boundary_case() {
        let ra = ring_analytics(101, 1.0, 4.0).unwrap();
        assert_eq!(ra.k_c, Some(0.0));
        assert!(ra.gamma_0.is_none());
        // the centre mode i = 0 sits on the matching point
        assert!((ra.gamma_of_mode[50] - 2.0 / 101.0 * 101f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn overdamped_rates() {
        let ra = ring_analytics(50, 1.0, 5.0).unwrap();
        assert!(ra.k_c.is_none());
        assert!((ra.gamma_0.unwrap() - 3.0).abs() < 1e-15);
        for (g, k) in ra.gamma_of_mode.iter().zip(ra.momenta()) {
            let expect = 2.0 / 50.0 * k.cos() * ((5.0 + 4.0 * k.cos()) / (5.0 - 4.0 * k.cos())).ln();
            assert!((g - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn energies_and_spacing() {
        let ra = ring_analytics(10, 1.0, 1.0).unwrap();
        assert_eq!(ra.labels[0], -4.5);
        assert!((ra.energies[9] - 2.0 * (0.45 * PI).sin()).abs() < 1e-15);
        assert!(ra.spacing.iter().all(|&d| d > 0.0));
    }
}
