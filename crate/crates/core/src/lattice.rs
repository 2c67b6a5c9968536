//! Quadratic hopping Hamiltonians for the benchmark lattices.
//!
//! Every builder returns a [`LatticeModel`] whose matrix `H` defines
//! `Σ H[m,n] a_m† a_n` in units of the hopping rate `J`. Two-dimensional
//! lattices are indexed row-major, `site = row * nx + col`, with row 0 the
//! top row.

use std::f64::consts::PI;
use std::fmt;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{input, Result};
use crate::linalg::{c, hermiticity_defect, CMat};

/// Lattice connectivity, kept for distance queries (light-cone analysis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Geometry {
    Chain { n: usize },
    Ring { n: usize },
    Square { nx: usize, ny: usize },
}

impl Geometry {
    pub fn n_sites(&self) -> usize {
        match *self {
            Geometry::Chain { n } | Geometry::Ring { n } => n,
            Geometry::Square { nx, ny } => nx * ny,
        }
    }

    pub fn is_one_dimensional(&self) -> bool {
        !matches!(self, Geometry::Square { .. })
    }

    /// Graph distance along a 1D lattice; the ring uses the shorter arc.
    /// `None` for 2D lattices.
    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        let d = a.abs_diff(b);
        match *self {
            Geometry::Chain { .. } => Some(d),
            Geometry::Ring { n } => Some(d.min(n - d)),
            Geometry::Square { .. } => None,
        }
    }

    /// Site reflected through `center`: `2·center − site` (mod n on a ring).
    pub fn mirror(&self, center: usize, site: usize) -> Option<usize> {
        match *self {
            Geometry::Chain { n } => {
                let m = 2 * center as isize - site as isize;
                (0..n as isize).contains(&m).then_some(m as usize)
            }
            Geometry::Ring { n } => Some((2 * center + n - site % n) % n),
            Geometry::Square { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LatticeModel {
    pub n_sites: usize,
    pub hamiltonian: CMat,
    pub drain: usize,
    pub label: String,
    /// Hopping rate J; every energy in the crate is measured against it.
    pub hop_scale: f64,
    pub geometry: Geometry,
}

impl LatticeModel {
    pub fn new(
        hamiltonian: CMat,
        drain: usize,
        label: impl Into<String>,
        hop_scale: f64,
        geometry: Geometry,
    ) -> Result<Self> {
        let model = LatticeModel {
            n_sites: hamiltonian.nrows(),
            hamiltonian,
            drain,
            label: label.into(),
            hop_scale,
            geometry,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let h = &self.hamiltonian;
        if self.n_sites == 0 || h.nrows() != h.ncols() || h.nrows() != self.n_sites {
            return input(format!(
                "hamiltonian must be a nonempty square {0}x{0} matrix, got {1}x{2}",
                self.n_sites,
                h.nrows(),
                h.ncols()
            ));
        }
        if !(self.hop_scale > 0.0 && self.hop_scale.is_finite()) {
            return input(format!("hop scale must be positive, got {}", self.hop_scale));
        }
        if self.drain >= self.n_sites {
            return input(format!("drain site {} outside lattice of {} sites", self.drain, self.n_sites));
        }
        if self.geometry.n_sites() != self.n_sites {
            return input("geometry does not match the hamiltonian size");
        }
        let defect = hermiticity_defect(h.as_ref());
        if defect > 1e-12 * self.hop_scale {
            return input(format!("hamiltonian is not hermitian (defect {defect:.3e})"));
        }
        Ok(())
    }

    pub fn with_drain(mut self, drain: usize) -> Result<Self> {
        self.drain = drain;
        self.validate()?;
        Ok(self)
    }
}

fn check_rate(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        input(format!("{name} must be positive and finite, got {x}"))
    }
}

fn open_chain_matrix(n: usize, j: f64, potential: &[f64]) -> CMat {
    Mat::from_fn(n, n, |a, b| {
        if a == b {
            c(potential.get(a).copied().unwrap_or(0.0))
        } else if a.abs_diff(b) == 1 {
            c(-j)
        } else {
            c(0.0)
        }
    })
}

/// Open chain with nearest-neighbor hopping `−j` and an optional on-site
/// potential; the drain sits on the edge site 0.
pub fn build_chain(n: usize, j: f64, potential: &[f64]) -> Result<LatticeModel> {
    if n == 0 {
        return input("chain needs at least one site");
    }
    check_rate("hopping", j)?;
    if !potential.is_empty() && potential.len() != n {
        return input(format!("potential has {} entries for {} sites", potential.len(), n));
    }
    let h = open_chain_matrix(n, j, potential);
    let label = if potential.is_empty() {
        format!("chain(n={n})")
    } else {
        format!("chain(n={n}, potential)")
    };
    LatticeModel::new(h, 0, label, j, Geometry::Chain { n })
}

/// Open chain with an antisymmetric step potential: `−v` left of the
/// central site, `+v` right of it, zero on it. The drain is the central site.
pub fn build_step_chain(n: usize, j: f64, v: f64) -> Result<LatticeModel> {
    if n % 2 == 0 {
        return input(format!("step chain needs an odd number of sites, got {n}"));
    }
    check_rate("hopping", j)?;
    if !(v >= 0.0 && v.is_finite()) {
        return input(format!("step height must be non-negative, got {v}"));
    }
    let center = n / 2;
    let potential: Vec<f64> = (0..n)
        .map(|k| match k.cmp(&center) {
            std::cmp::Ordering::Less => -v,
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => v,
        })
        .collect();
    let h = open_chain_matrix(n, j, &potential);
    LatticeModel::new(h, center, format!("step-chain(n={n}, v={v})"), j, Geometry::Chain { n })
}

/// Periodic ring threaded by total flux `flux ∈ [0, π]`:
/// `H[k, k+1] = −j·e^{−i·flux/n}`, `H[k+1, k]` its conjugate. Drain on site 0.
pub fn build_ring_flux(n: usize, j: f64, flux: f64) -> Result<LatticeModel> {
    if n < 3 {
        return input(format!("ring needs at least 3 sites, got {n}"));
    }
    check_rate("hopping", j)?;
    if !(0.0..=PI).contains(&flux) {
        return input(format!("ring flux must lie in [0, pi], got {flux}"));
    }
    let hop = -j * C64::from_polar(1.0, -flux / n as f64);
    let mut h = Mat::<C64>::zeros(n, n);
    for k in 0..n {
        let next = (k + 1) % n;
        h[(k, next)] = hop;
        h[(next, k)] = hop.conj();
    }
    LatticeModel::new(h, 0, format!("ring(n={n}, flux={flux})"), j, Geometry::Ring { n })
}

/// Open `nx × ny` square lattice with flux `flux_per_plaquette` through each
/// plaquette, in the Landau gauge: the hop `(x,y) → (x+1,y)` carries
/// `e^{−i·flux·y}`, vertical hops are real. Going around a plaquette
/// `(x,y) → (x+1,y) → (x+1,y+1) → (x,y+1) → (x,y)` collects `e^{i·flux}`.
///
/// The drain is the central site of the top row (column `⌈nx/2⌉ − 1`).
pub fn build_hofstadter(nx: usize, ny: usize, j: f64, flux_per_plaquette: f64) -> Result<LatticeModel> {
    if nx == 0 || ny == 0 {
        return input(format!("square lattice needs nx, ny >= 1, got {nx}x{ny}"));
    }
    check_rate("hopping", j)?;
    if !flux_per_plaquette.is_finite() {
        return input("flux per plaquette must be finite");
    }
    let n = nx * ny;
    let idx = |x: usize, y: usize| y * nx + x;
    let mut h = Mat::<C64>::zeros(n, n);
    for y in 0..ny {
        for x in 0..nx {
            if x + 1 < nx {
                let amp = -j * C64::from_polar(1.0, -flux_per_plaquette * y as f64);
                h[(idx(x + 1, y), idx(x, y))] = amp;
                h[(idx(x, y), idx(x + 1, y))] = amp.conj();
            }
            if y + 1 < ny {
                h[(idx(x, y + 1), idx(x, y))] = c(-j);
                h[(idx(x, y), idx(x, y + 1))] = c(-j);
            }
        }
    }
    let drain = idx(nx.div_ceil(2) - 1, 0);
    LatticeModel::new(
        h,
        drain,
        format!("hofstadter({nx}x{ny}, flux={flux_per_plaquette})"),
        j,
        Geometry::Square { nx, ny },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Chain,
    StepChain,
    Ring,
    Hofstadter,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Chain => "chain",
            ModelKind::StepChain => "step-chain",
            ModelKind::Ring => "ring",
            ModelKind::Hofstadter => "hofstadter",
        };
        f.write_str(s)
    }
}

/// Declarative model description, readable from key-value (TOML) text:
///
/// ```text
/// kind = "ring"
/// n = 100
/// j = 1.0
/// flux = "pi/2"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(default = "unit_rate")]
    pub j: f64,
    #[serde(default, deserialize_with = "angle_opt", skip_serializing_if = "Option::is_none")]
    pub flux: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
    #[serde(
        default,
        alias = "drain-override",
        alias = "drain_override",
        skip_serializing_if = "Option::is_none"
    )]
    pub drain: Option<usize>,
}

fn unit_rate() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).or_else(|e| input(format!("model spec: {}", e.message())))
    }

    pub fn build(&self) -> Result<LatticeModel> {
        let need = |name: &str, v: Option<usize>| {
            v.ok_or_else(|| crate::Error::Input(format!("model kind {} requires `{name}`", self.kind)))
        };
        let model = match self.kind {
            ModelKind::Chain => build_chain(need("n", self.n)?, self.j, self.potential.as_deref().unwrap_or(&[]))?,
            ModelKind::StepChain => build_step_chain(need("n", self.n)?, self.j, self.v.unwrap_or(0.0))?,
            ModelKind::Ring => build_ring_flux(need("n", self.n)?, self.j, self.flux.unwrap_or(0.0))?,
            ModelKind::Hofstadter => build_hofstadter(
                need("nx", self.nx)?,
                need("ny", self.ny)?,
                self.j,
                self.flux.unwrap_or(0.0),
            )?,
        };
        match self.drain {
            Some(d) => model.with_drain(d),
            None => Ok(model),
        }
    }
}

/// Parses an angle in radians: a plain number or an expression such as
/// `pi`, `pi/2`, `0.25*pi`, `3pi/4`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text.chars().filter(|ch| !ch.is_whitespace()).collect::<String>().to_lowercase();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(x);
    }
    let bad = || crate::Error::Input(format!("cannot parse angle `{text}`"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().map_err(|_| bad())?),
        None => (s.clone(), 1.0),
    };
    let coef = num
        .strip_suffix("pi")
        .map(|p| p.trim_end_matches('*'))
        .ok_or_else(bad)?;
    let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
    Ok(coef * PI / den)
}

fn angle_opt<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Int(i64),
        Text(String),
    }
    match Option::<Raw>::deserialize(de)? {
        None => Ok(None),
        Some(Raw::Num(x)) => Ok(Some(x)),
        Some(Raw::Int(x)) => Ok(Some(x as f64)),
        Some(Raw::Text(s)) => parse_angle(&s).map(Some).map_err(serde::de::Error::custom),
    }
}
