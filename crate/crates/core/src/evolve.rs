//! Correlation dynamics under the squeezed drain.
//!
//! The Langevin equation in the eigenmode basis is `ḃ = −iA b + g ζ`.
//! The dynamical modes `b̃ = V b` decouple to `dₜb̃ᵢ = −iλᵢ b̃ᵢ + iζ`, so every
//! correlator has a closed form; the RK4 oracle integrates the moment
//! equations of `b` directly instead.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::eigen::EigenSystem;
use crate::error::{input, numeric, Result};
use crate::gaussian::{Basis, BathSpec, GaussianState};
use crate::linalg::{c, max_abs_diff, phase_integral, CMat, I};
use crate::spectrum::{dynamical_matrix, DynamicalSpectrum};

/// Closed-form evolution from a fixed initial state.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    lambdas: Vec<C64>,
    v: CMat,
    vinv: CMat,
    bath: BathSpec,
    driven: bool,
    c0: CMat,
    d0: CMat,
}

impl ExactPropagator {
    pub fn new(ds: &DynamicalSpectrum, bath: &BathSpec, initial: &GaussianState) -> Result<Self> {
        bath.validate()?;
        if initial.basis != Basis::Eigenmode {
            return input("exact evolution needs an eigenmode-basis initial state");
        }
        let m = ds.n_modes();
        if initial.dim() != m {
            return input(format!("initial state has {} modes, spectrum {m}", initial.dim()));
        }
        if (bath.gamma - ds.gamma).abs() > 1e-12 * ds.gamma.max(1.0) {
            return input(format!("bath coupling {} differs from spectrum coupling {}", bath.gamma, ds.gamma));
        }
        let (v, vinv, driven) = match &ds.vectors {
            Some(mv) => (mv.left.clone(), mv.inverse.clone(), true),
            None => (Mat::identity(m, m), Mat::identity(m, m), false),
        };
        let c0 = v.conjugate() * &initial.normal * v.transpose();
        let d0 = &v * &initial.anomalous * v.transpose();
        Ok(ExactPropagator { lambdas: ds.lambdas.clone(), v, vinv, bath: *bath, driven, c0, d0 })
    }

    fn dynamical_blocks(&self, t: f64) -> (CMat, CMat) {
        let m = self.lambdas.len();
        let l = &self.lambdas;
        let (nbar, mm) = if self.driven { (self.bath.nbar, self.bath.m) } else { (0.0, c(0.0)) };
        let cn = Mat::from_fn(m, m, |i, j| {
            let z = l[i].conj() - l[j];
            (I * z * t).exp() * self.c0[(i, j)] + nbar * phase_integral(z, t)
        });
        let dn = Mat::from_fn(m, m, |i, j| {
            let s = l[i] + l[j];
            (-I * s * t).exp() * self.d0[(i, j)] - mm * phase_integral(-s, t)
        });
        (cn, dn)
    }

    pub fn state_at(&self, t: f64) -> Result<GaussianState> {
        if !(t >= 0.0 && t.is_finite()) {
            return input(format!("time must be non-negative, got {t}"));
        }
        let (cn, dn) = self.dynamical_blocks(t);
        Ok(GaussianState {
            normal: self.vinv.conjugate() * &cn * self.vinv.transpose(),
            anomalous: &self.vinv * &dn * self.vinv.transpose(),
            basis: Basis::Eigenmode,
            time: t,
        })
    }

    /// Single entry `⟨b_k† b_l⟩(t)`, at `O(M²)` cost.
    pub fn normal_entry(&self, t: f64, k: usize, l: usize) -> C64 {
        let m = self.lambdas.len();
        let lam = &self.lambdas;
        let nbar = if self.driven { self.bath.nbar } else { 0.0 };
        let mut sum = c(0.0);
        for i in 0..m {
            let left = self.vinv[(k, i)].conj();
            if left == c(0.0) {
                continue;
            }
            for j in 0..m {
                let z = lam[i].conj() - lam[j];
                let cij = (I * z * t).exp() * self.c0[(i, j)] + nbar * phase_integral(z, t);
                sum += left * cij * self.vinv[(l, j)];
            }
        }
        sum
    }

    /// Correlators of the dynamical modes `b̃` themselves.
    pub fn dynamical_state_at(&self, t: f64) -> (CMat, CMat) {
        self.dynamical_blocks(t)
    }

    pub fn left_vectors(&self) -> &CMat {
        &self.v
    }
}

pub fn evolve_exact(ds: &DynamicalSpectrum, bath: &BathSpec, initial: &GaussianState, t: f64) -> Result<GaussianState> {
    ExactPropagator::new(ds, bath, initial)?.state_at(t)
}

/// `t → ∞` limit of the exact solution:
/// `⟨b̃ᵢ†b̃ⱼ⟩ = i𝒩/(λᵢ* − λⱼ)`, `⟨b̃ᵢb̃ⱼ⟩ = iℳ/(λᵢ + λⱼ)`.
pub fn steady_state(ds: &DynamicalSpectrum, bath: &BathSpec) -> Result<GaussianState> {
    bath.validate()?;
    if let Some((i, g)) = ds.rates.iter().enumerate().find(|(_, &g)| g <= 1e-12) {
        return numeric(format!("steady state not unique on the coupled sector: mode {i} has rate {g:.3e}"));
    }
    let vectors = ds.vectors.as_ref().ok_or_else(|| crate::Error::Numeric("no dynamical eigenvectors".into()))?;
    let m = ds.n_modes();
    let l = &ds.lambdas;
    let cn = Mat::from_fn(m, m, |i, j| I * bath.nbar / (l[i].conj() - l[j]));
    let dn = Mat::from_fn(m, m, |i, j| I * bath.m / (l[i] + l[j]));
    let vinv = &vectors.inverse;
    Ok(GaussianState {
        normal: vinv.conjugate() * &cn * vinv.transpose(),
        anomalous: vinv * &dn * vinv.transpose(),
        basis: Basis::Eigenmode,
        time: f64::INFINITY,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk4Options {
    pub dt: f64,
    /// Accept once halving the step changes the result by less than this.
    pub tol: f64,
    pub max_halvings: usize,
}

impl Default for Rk4Options {
    fn default() -> Self {
        Rk4Options { dt: 0.05, tol: 1e-8, max_halvings: 10 }
    }
}

/// Integrates `Ṅ = iA* N − i N Aᵀ + 𝒩 ḡ gᵀ` and `Ṁ = −iA M − i M Aᵀ + ℳ g gᵀ`
/// (`N_kl = ⟨b_k†b_l⟩`, `M_kl = ⟨b_k b_l⟩`) with classical RK4, halving the
/// step until two successive results agree to `opts.tol`.
pub fn evolve_rk4_oracle(
    a: &CMat,
    coupling: &[C64],
    bath: &BathSpec,
    initial: &GaussianState,
    t: f64,
    opts: &Rk4Options,
) -> Result<GaussianState> {
    bath.validate()?;
    let m = a.nrows();
    if a.ncols() != m || coupling.len() != m || initial.dim() != m {
        return input("dimension mismatch between dynamical matrix, coupling and state");
    }
    if !(opts.dt > 0.0) || !(t >= 0.0 && t.is_finite()) {
        return input(format!("need dt > 0 and t >= 0, got dt={} t={t}", opts.dt));
    }
    let drive_n = Mat::from_fn(m, m, |k, l| bath.nbar * coupling[k].conj() * coupling[l]);
    let drive_m = Mat::from_fn(m, m, |k, l| bath.m * coupling[k] * coupling[l]);
    let sys = Moments { a: a.clone(), a_conj: a.conjugate().to_owned(), a_t: a.transpose().to_owned(), drive_n, drive_m };

    let mut steps = (t / opts.dt).ceil().max(1.0) as usize;
    let mut prev = sys.integrate(initial, t, steps);
    for _ in 0..opts.max_halvings {
        steps *= 2;
        let next = sys.integrate(initial, t, steps);
        let change = max_abs_diff(prev.0.as_ref(), next.0.as_ref()).max(max_abs_diff(prev.1.as_ref(), next.1.as_ref()));
        if change < opts.tol {
            return Ok(GaussianState { normal: next.0, anomalous: next.1, basis: initial.basis, time: t });
        }
        prev = next;
    }
    numeric(format!("RK4 step halving did not converge to {:.1e} after {} halvings", opts.tol, opts.max_halvings))
}

/// RK4 oracle on the eigenmode-basis dynamical matrix of `es`.
pub fn evolve_rk4_modes(
    es: &EigenSystem,
    bath: &BathSpec,
    initial: &GaussianState,
    t: f64,
    opts: &Rk4Options,
) -> Result<GaussianState> {
    if initial.basis != Basis::Eigenmode {
        return input("oracle evolution in the eigenmode basis needs an eigenmode-basis state");
    }
    let a = dynamical_matrix(es, bath.gamma)?;
    evolve_rk4_oracle(&a, &es.coupling_vector(bath.gamma), bath, initial, t, opts)
}

struct Moments {
    a: CMat,
    a_conj: CMat,
    a_t: CMat,
    drive_n: CMat,
    drive_m: CMat,
}

impl Moments {
    fn rhs(&self, n: &CMat, m: &CMat) -> (CMat, CMat) {
        let dn = faer::Scale(I) * (&self.a_conj * n - n * &self.a_t) + &self.drive_n;
        let dm = faer::Scale(-I) * (&self.a * m + m * &self.a_t) + &self.drive_m;
        (dn, dm)
    }

    fn integrate(&self, initial: &GaussianState, t: f64, steps: usize) -> (CMat, CMat) {
        let h = t / steps as f64;
        let mut n = initial.normal.clone();
        let mut m = initial.anomalous.clone();
        let axpy = |x: &CMat, k: &CMat, s: f64| x + faer::Scale(c(s)) * k;
        for _ in 0..steps {
            let (k1n, k1m) = self.rhs(&n, &m);
            let (k2n, k2m) = self.rhs(&axpy(&n, &k1n, h / 2.0), &axpy(&m, &k1m, h / 2.0));
            let (k3n, k3m) = self.rhs(&axpy(&n, &k2n, h / 2.0), &axpy(&m, &k2m, h / 2.0));
            let (k4n, k4m) = self.rhs(&axpy(&n, &k3n, h), &axpy(&m, &k3m, h));
            let w = h / 6.0;
            n = &n + faer::Scale(c(w)) * (&k1n + faer::Scale(c(2.0)) * (&k2n + &k3n) + &k4n);
            m = &m + faer::Scale(c(w)) * (&k1m + faer::Scale(c(2.0)) * (&k2m + &k3m) + &k4m);
        }
        (n, m)
    }
}

/// Intermediate-time correlations from a vacuum start, with the drain
/// response renormalized by `1/(1 + Γ/4𝒥)`:
///
/// `⟨bᵢ†bⱼ⟩ = K ψᵢ(n₀) ψⱼ*(n₀) (1 − e^{−i(εⱼ−εᵢ)t})/(i(εⱼ−εᵢ))`,
/// `⟨bᵢbⱼ⟩ = K′ ψᵢ*(n₀) ψⱼ*(n₀) (1 − e^{−i(εᵢ+εⱼ)t})/(i(εᵢ+εⱼ))`,
/// with `K = Γ𝒩/(1+Γ/4𝒥)²` and `K′` the same with `ℳ`.
pub fn intermediate_correlations(es: &EigenSystem, bath: &BathSpec, jeff: f64, t: f64) -> Result<GaussianState> {
    bath.validate()?;
    if !(jeff > 0.0 && jeff.is_finite()) {
        return input(format!("effective hopping must be positive, got {jeff}"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return input(format!("time must be non-negative, got {t}"));
    }
    let m = es.n_modes();
    let renorm = 1.0 / (1.0 + bath.gamma / (4.0 * jeff)).powi(2);
    let k_n = bath.gamma * bath.nbar * renorm;
    let k_m = bath.gamma * bath.m * renorm;
    let amp = &es.drain_amp;
    let e = &es.energies;
    let resonant = 1e-12 * es.hop_scale;
    let window = |x: f64| if x.abs() < resonant { c(t) } else { phase_integral(c(x), t) };
    let normal = Mat::from_fn(m, m, |i, j| k_n * amp[i] * amp[j].conj() * window(e[i] - e[j]));
    let anomalous = Mat::from_fn(m, m, |i, j| k_m * amp[i].conj() * amp[j].conj() * window(-(e[i] + e[j])));
    Ok(GaussianState { normal, anomalous, basis: Basis::Eigenmode, time: t })
}

/// `𝒥 = 1/(2 Re ∫₀^T Σᵢ|ψᵢ(n₀)|² e^{−iεᵢτ} dτ)` with `T = N/(4J)`: the
/// drain-site autocorrelation integrated up to the time a wavepacket needs
/// to cross a quarter of the lattice.
pub fn default_jeff(es: &EigenSystem) -> Result<f64> {
    let horizon = es.n_sites as f64 / (4.0 * es.hop_scale);
    let integral: f64 = es
        .energies
        .iter()
        .zip(&es.weight)
        .map(|(&e, &w)| if e.abs() * horizon < 1e-12 { w * horizon } else { w * (e * horizon).sin() / e })
        .sum();
    if integral <= 0.0 {
        return numeric(format!("drain autocorrelation integral is not positive ({integral:.3e})"));
    }
    Ok(1.0 / (2.0 * integral))
}
