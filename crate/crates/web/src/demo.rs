use localdiss::{
    approx_dissipation_spectrum, build_chain, build_hofstadter, build_ring_flux, diagonalize_coupled,
    dynamical_matrix, exact_dynamical_spectrum, remainders, to_site_basis, Basis, BathSpec, EigenSystem, Error,
    ExactPropagator, GaussianState, LatticeModel, Result,
};

const MAX_SITES: usize = 400;

/// `chain` and `ring` take `size` sites; `hofstadter` is a `size × size` square.
pub fn model(kind: &str, size: usize, flux: f64) -> Result<LatticeModel> {
    let n_sites = if kind == "hofstadter" { size.saturating_mul(size) } else { size };
    if n_sites > MAX_SITES {
        return Err(Error::Input(format!("demo is limited to {MAX_SITES} sites")));
    }
    match kind {
        "chain" => build_chain(size, 1.0, &[]),
        "ring" => build_ring_flux(size, 1.0, flux),
        "hofstadter" => build_hofstadter(size, size, 1.0, flux),
        other => Err(Error::Input(format!("unknown model `{other}`"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
    pub gamma_exact: Vec<f64>,
    pub gamma_approx: Vec<f64>,
}

fn rates(es: &EigenSystem, r: &[f64], gamma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let exact = exact_dynamical_spectrum(&dynamical_matrix(es, gamma)?, es, gamma)?.rates;
    let approx = approx_dissipation_spectrum(es, r, gamma)?.gamma_approx;
    Ok((exact, approx))
}

pub fn spectrum(kind: &str, size: usize, flux: f64, gamma: f64) -> Result<Spectrum> {
    let es = diagonalize_coupled(&model(kind, size, flux)?)?;
    let (gamma_exact, gamma_approx) = rates(&es, &remainders(&es)?, gamma)?;
    Ok(Spectrum { energies: es.energies.clone(), weights: es.weight.clone(), gamma_exact, gamma_approx })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub n_modes: usize,
    pub gammas: Vec<f64>,
    /// `γ_i / (w_i Γ)`, row-major `[gamma][mode]`.
    pub ratio_exact: Vec<f64>,
    pub ratio_approx: Vec<f64>,
}

pub fn sweep(kind: &str, size: usize, flux: f64, min: f64, max: f64, points: usize) -> Result<Sweep> {
    if !(min > 0.0 && max > min && points >= 2) {
        return Err(Error::Input("sweep needs 0 < min < max and at least two points".into()));
    }
    let es = diagonalize_coupled(&model(kind, size, flux)?)?;
    let r = remainders(&es)?;
    let m = es.n_modes();
    let gammas: Vec<f64> =
        (0..points).map(|k| (min.ln() + (max / min).ln() * k as f64 / (points - 1) as f64).exp()).collect();
    let mut ratio_exact = Vec::with_capacity(points * m);
    let mut ratio_approx = Vec::with_capacity(points * m);
    for &g in &gammas {
        let (exact, approx) = rates(&es, &r, g)?;
        for i in 0..m {
            ratio_exact.push(exact[i] / (es.weight[i] * g));
            ratio_approx.push(approx[i] / (es.weight[i] * g));
        }
    }
    Ok(Sweep { n_modes: m, gammas, ratio_exact, ratio_approx })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub values: Vec<f64>,
}

/// Vacuum start, squeezed bath with `𝒩 = 1`, drain on site 0.
pub fn lightcone(n: usize, gamma: f64, t: f64) -> Result<Snapshot> {
    let es = diagonalize_coupled(&model("ring", n, std::f64::consts::FRAC_PI_2)?)?;
    let bath = BathSpec::pure_squeezing(1.0, gamma)?;
    let ds = exact_dynamical_spectrum(&dynamical_matrix(&es, gamma)?, &es, gamma)?;
    let prop = ExactPropagator::new(&ds, &bath, &GaussianState::vacuum(es.n_modes(), Basis::Eigenmode))?;
    let site = to_site_basis(&prop.state_at(t)?, &es)?;
    let scale = bath.m.norm();
    let values = (0..n * n).map(|k| site.anomalous[(k / n, k % n)].norm_sqr() / scale).collect();
    Ok(Snapshot { n, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_and_oversized_models() {
        assert!(model("torus", 10, 0.0).is_err());
        assert!(model("hofstadter", 30, 0.5).is_err());
        assert!(model("chain", 401, 0.0).is_err());
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        assert!(sweep("chain", 10, 0.0, 1.0, 0.5, 10).is_err());
        assert!(sweep("chain", 10, 0.0, 0.1, 1.0, 1).is_err());
    }
}
