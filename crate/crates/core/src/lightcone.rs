//! Ballistic light cone of the anomalous site correlations `⟨aₘaₙ⟩`.

use serde::Serialize;

use crate::error::{input, Result};
use crate::gaussian::{Basis, GaussianState};
use crate::lattice::Geometry;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightConeOptions {
    /// Front speed `c` in sites per unit time (`2J` for a cosine band).
    pub speed: f64,
    /// Sites added to `c·t` before an entry counts as outside.
    pub buffer: f64,
    /// The front is the outermost distance whose largest correlation reaches
    /// this fraction of the overall maximum.
    pub front_fraction: f64,
}

impl Default for LightConeOptions {
    fn default() -> Self {
        LightConeOptions { speed: 2.0, buffer: 4.0, front_fraction: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LightConeProfile {
    pub time: f64,
    pub radius: f64,
    pub inside_max: f64,
    pub outside_max: f64,
    pub front_position: usize,
    /// `max |⟨aₘaₙ⟩|` over entries with `max(d(m,n₀), d(n,n₀)) = d`, indexed by `d`.
    pub per_distance: Vec<f64>,
}

pub fn light_cone_profile(state: &GaussianState, geometry: &Geometry, n0: usize, t: f64) -> Result<LightConeProfile> {
    light_cone_profile_with(state, geometry, n0, t, &LightConeOptions::default())
}

pub fn light_cone_profile_with(
    state: &GaussianState,
    geometry: &Geometry,
    n0: usize,
    t: f64,
    opts: &LightConeOptions,
) -> Result<LightConeProfile> {
    if !geometry.is_one_dimensional() {
        return Err(crate::Error::Unsupported("light-cone analysis is defined for 1D lattices only".into()));
    }
    if state.basis != Basis::Site {
        return input("light-cone analysis needs a site-basis state");
    }
    let n = geometry.n_sites();
    if state.dim() != n || n0 >= n {
        return input(format!("state of dimension {} does not fit a {n}-site lattice with drain {n0}", state.dim()));
    }
    let dist: Vec<usize> = (0..n).map(|m| geometry.distance(m, n0).unwrap()).collect();
    let max_d = dist.iter().copied().max().unwrap_or(0);
    let radius = opts.speed * t + opts.buffer;
    let mut per_distance = vec![0.0f64; max_d + 1];
    let (mut inside_max, mut outside_max) = (0.0f64, 0.0f64);
    for a in 0..n {
        for b in 0..n {
            let d = dist[a].max(dist[b]);
            let value = state.anomalous[(a, b)].norm();
            per_distance[d] = per_distance[d].max(value);
            if d as f64 <= radius {
                inside_max = inside_max.max(value);
            } else {
                outside_max = outside_max.max(value);
            }
        }
    }
    let peak = per_distance.iter().copied().fold(0.0, f64::max);
    let front_position = if peak == 0.0 {
        0
    } else {
        per_distance.iter().rposition(|&v| v >= opts.front_fraction * peak).unwrap_or(0)
    };
    Ok(LightConeProfile { time: t, radius, inside_max, outside_max, front_position, per_distance })
}

/// Least-squares line through `(times, fronts)`; returns `(slope, intercept)`.
pub fn fit_front_speed(times: &[f64], fronts: &[f64]) -> Result<(f64, f64)> {
    if times.len() != fronts.len() || times.len() < 2 {
        return input("front fit needs at least two (time, position) pairs");
    }
    let k = times.len() as f64;
    let mt = times.iter().sum::<f64>() / k;
    let mf = fronts.iter().sum::<f64>() / k;
    let sxx: f64 = times.iter().map(|t| (t - mt) * (t - mt)).sum();
    if sxx == 0.0 {
        return input("front fit needs distinct times");
    }
    let sxy: f64 = times.iter().zip(fronts).map(|(t, f)| (t - mt) * (f - mf)).sum();
    let slope = sxy / sxx;
    Ok((slope, mf - slope * mt))
}
