//! Squeezed bath parameters and Gaussian states described by their normal
//! (`⟨x†y⟩`) and anomalous (`⟨xy⟩`) correlation matrices.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::eigen::EigenSystem;
use crate::error::{input, Result};
use crate::linalg::{c, hermitian_eigenvalues, hermiticity_defect, max_abs_diff, symmetry_defect, CMat};

/// Markovian Gaussian bath on the drain site:
/// `⟨ζ†(t)ζ(t′)⟩ = 𝒩 δ(t−t′)`, `⟨ζ(t)ζ(t′)⟩ = ℳ δ(t−t′)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub nbar: f64,
    pub m: C64,
    pub gamma: f64,
}

impl BathSpec {
    pub fn new(nbar: f64, m: C64, gamma: f64) -> Result<Self> {
        let bath = BathSpec { nbar, m, gamma };
        bath.validate()?;
        Ok(bath)
    }

    /// `|ℳ|² = 𝒩(𝒩+1)` with real positive `ℳ`.
    pub fn pure_squeezing(nbar: f64, gamma: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return input(format!("bath occupation must be non-negative, got {nbar}"));
        }
        Self::new(nbar, c((nbar * (nbar + 1.0)).sqrt()), gamma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return input(format!("bath occupation must be non-negative, got {}", self.nbar));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return input(format!("drain coupling must be non-negative, got {}", self.gamma));
        }
        if !self.m.is_finite() || self.m.norm_sqr() > self.nbar * (self.nbar + 1.0) + 1e-12 {
            return input(format!(
                "unphysical bath: |M|^2 = {} exceeds N(N+1) = {}",
                self.m.norm_sqr(),
                self.nbar * (self.nbar + 1.0)
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Eigenmode,
    Site,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub normal: CMat,
    pub anomalous: CMat,
    pub basis: Basis,
    pub time: f64,
}

impl GaussianState {
    pub fn vacuum(dim: usize, basis: Basis) -> Self {
        GaussianState { normal: Mat::zeros(dim, dim), anomalous: Mat::zeros(dim, dim), basis, time: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.normal.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(self.normal.as_ref())
    }

    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(self.anomalous.as_ref())
    }

    /// Smallest eigenvalue of the Gram matrix `⟨oₖ† oₗ⟩` of the operator
    /// family `o = (x₁…x_M, x₁†…x_M†)`:
    /// `[[N, M*], [M, 1 + Nᵀ]]`. Non-negative for a physical state.
    pub fn gram_min_eigenvalue(&self) -> Result<f64> {
        let m = self.dim();
        let n = &self.normal;
        let a = &self.anomalous;
        let k = Mat::from_fn(2 * m, 2 * m, |r, s| match (r < m, s < m) {
            (true, true) => n[(r, s)],
            (true, false) => a[(r, s - m)].conj(),
            (false, true) => a[(r - m, s)],
            (false, false) => {
                let (i, j) = (r - m, s - m);
                n[(j, i)] + if i == j { c(1.0) } else { c(0.0) }
            }
        });
        // symmetrize away rounding before the Hermitian solver
        let k = Mat::from_fn(2 * m, 2 * m, |r, s| 0.5 * (k[(r, s)] + k[(s, r)].conj()));
        let vals = hermitian_eigenvalues(k.as_ref())?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// `Tr⟨x†x⟩`.
    pub fn particle_number(&self) -> f64 {
        (0..self.dim()).map(|i| self.normal[(i, i)].re).sum()
    }

    /// Max-norm distance over both blocks.
    pub fn distance(&self, other: &GaussianState) -> f64 {
        max_abs_diff(self.normal.as_ref(), other.normal.as_ref())
            .max(max_abs_diff(self.anomalous.as_ref(), other.anomalous.as_ref()))
    }
}

/// States of one run at increasing times, all in the same basis.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub model_label: String,
    pub bath: BathSpec,
    pub times: Vec<f64>,
    pub states: Vec<GaussianState>,
}

impl TrajectoryRecord {
    pub fn new(model_label: impl Into<String>, bath: BathSpec) -> Self {
        TrajectoryRecord { model_label: model_label.into(), bath, times: Vec::new(), states: Vec::new() }
    }

    pub fn push(&mut self, state: GaussianState) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if state.time <= last {
                return input(format!("trajectory times must increase ({} after {last})", state.time));
            }
            if state.basis != self.states[0].basis {
                return input("trajectory states must share one basis");
            }
        }
        self.times.push(state.time);
        self.states.push(state);
        Ok(())
    }
}

/// `⟨aₘ†aₙ⟩ = Σ ψᵢ*(m) ψⱼ(n) ⟨bᵢ†bⱼ⟩` and `⟨aₘaₙ⟩ = Σ ψᵢ(m) ψⱼ(n) ⟨bᵢbⱼ⟩`.
pub fn to_site_basis(state: &GaussianState, es: &EigenSystem) -> Result<GaussianState> {
    if state.basis != Basis::Eigenmode {
        return input("state is already in the site basis");
    }
    if state.dim() != es.n_modes() {
        return input(format!("state has {} modes, eigensystem {}", state.dim(), es.n_modes()));
    }
    let psi = &es.wavefunctions;
    let normal = psi.conjugate() * &state.normal * psi.transpose();
    let anomalous = psi * &state.anomalous * psi.transpose();
    Ok(GaussianState { normal, anomalous, basis: Basis::Site, time: state.time })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bath_validation() {
        assert!(BathSpec::pure_squeezing(1.0, 1.0).is_ok());
        let b = BathSpec::pure_squeezing(1.0, 1.0).unwrap();
        assert!((b.m.norm_sqr() - 2.0).abs() < 1e-14);
        assert!(BathSpec::new(1.0, c(1.5), 1.0).is_err());
        assert!(BathSpec::new(-0.1, c(0.0), 1.0).is_err());
        assert!(BathSpec::new(0.0, c(0.0), -1.0).is_err());
    }

    #[test]
    fn vacuum_is_physical() {
        let v = GaussianState::vacuum(3, Basis::Site);
        assert!((v.gram_min_eigenvalue().unwrap()).abs() < 1e-14);
        assert_eq!(v.particle_number(), 0.0);
    }

    #[test]
    fn single_mode_gram_bound() {
        // one mode: physical iff |M|² ≤ N(N+1)
        let state = |n: f64, m: f64| GaussianState {
            normal: Mat::from_fn(1, 1, |_, _| c(n)),
            anomalous: Mat::from_fn(1, 1, |_, _| c(m)),
            basis: Basis::Site,
            time: 0.0,
        };
        assert!(state(1.0, 2f64.sqrt()).gram_min_eigenvalue().unwrap() > -1e-12);
        assert!(state(1.0, 1.6).gram_min_eigenvalue().unwrap() < -1e-3);
    }

    #[test]
    fn trajectory_ordering() {
        let bath = BathSpec::pure_squeezing(1.0, 1.0).unwrap();
        let mut rec = TrajectoryRecord::new("x", bath);
        let mut s = GaussianState::vacuum(2, Basis::Site);
        rec.push(s.clone()).unwrap();
        assert!(rec.push(s.clone()).is_err());
        s.time = 1.0;
        s.basis = Basis::Eigenmode;
        assert!(rec.push(s).is_err());
    }
}
