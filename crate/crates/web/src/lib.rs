//! Browser demo. [`demo`] holds the plain-Rust computations (tested natively);
//! the `#[wasm_bindgen]` functions below only marshal arguments and results.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(e: localdiss::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Exact and approximate rates. Result layout:
/// `[energies | weights | gamma_exact | gamma_approx]`, each `n_modes` long.
#[wasm_bindgen]
pub fn spectrum(kind: &str, size: usize, flux: f64, gamma: f64) -> Result<Vec<f64>, JsValue> {
    let s = demo::spectrum(kind, size, flux, gamma).map_err(js)?;
    Ok([s.energies, s.weights, s.gamma_exact, s.gamma_approx].concat())
}

/// Coupling sweep. Result layout: `[n_modes, gammas.., ratio_exact.., ratio_approx..]`
/// with ratios stored row-major as `[gamma][mode]`.
#[wasm_bindgen]
pub fn sweep(kind: &str, size: usize, flux: f64, min: f64, max: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    let s = demo::sweep(kind, size, flux, min, max, points).map_err(js)?;
    Ok([vec![s.n_modes as f64], s.gammas, s.ratio_exact, s.ratio_approx].concat())
}

/// `|<a_m a_n>|^2 / |M|` on a flux-π/2 ring of `n` sites, row-major `n × n`.
#[wasm_bindgen]
pub fn lightcone(n: usize, gamma: f64, t: f64) -> Result<Vec<f64>, JsValue> {
    demo::lightcone(n, gamma, t).map(|s| s.values).map_err(js)
}
