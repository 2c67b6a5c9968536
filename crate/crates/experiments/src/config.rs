//! Experiment configuration: built-in defaults per experiment, merged with an
//! optional TOML file (or a replayed JSON manifest) and `key=value` overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use localdiss::{BathSpec, ModelSpec, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Value;

use crate::error::{config_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DissipationSpectrum,
    GammaSweep,
    RingAnalytics,
    EigenmodeCorrelations,
    Lightcone,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::DissipationSpectrum,
        ExperimentKind::GammaSweep,
        ExperimentKind::RingAnalytics,
        ExperimentKind::EigenmodeCorrelations,
        ExperimentKind::Lightcone,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::DissipationSpectrum => "dissipation-spectrum",
            ExperimentKind::GammaSweep => "gamma-sweep",
            ExperimentKind::RingAnalytics => "ring-analytics",
            ExperimentKind::EigenmodeCorrelations => "eigenmode-correlations",
            ExperimentKind::Lightcone => "lightcone",
        }
    }

    fn defaults(&self) -> &'static str {
        match self {
            ExperimentKind::DissipationSpectrum => {
                "gammas = [0.5, 2.0, 4.0]\n[model]\nkind = \"chain\"\nn = 25\n"
            }
            ExperimentKind::GammaSweep => {
                "[sweep]\nmin = 0.01\nmax = 100.0\npoints = 60\n[model]\nkind = \"chain\"\nn = 25\n"
            }
            ExperimentKind::RingAnalytics => {
                "gammas = [1.0, 3.0, 5.0]\n[model]\nkind = \"ring\"\nn = 100\nflux = \"pi/2\"\n"
            }
            ExperimentKind::EigenmodeCorrelations => {
                "gammas = [1.0]\ntimes = [20.0]\n[model]\nkind = \"ring\"\nn = 100\nflux = \"pi/2\"\n"
            }
            ExperimentKind::Lightcone => {
                "gammas = [1.0]\ntimes = [2.0, 5.0, 10.0, 20.0, 35.0, 50.0]\n[model]\nkind = \"ring\"\nn = 100\nflux = \"pi/2\"\n"
            }
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Log-spaced coupling grid `min … max` with `points` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SweepGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let (a, b) = (self.min.ln(), self.max.ln());
        (0..self.points)
            .map(|k| match k {
                0 => self.min,
                k if k == self.points - 1 => self.max,
                k => (a + (b - a) * k as f64 / (self.points - 1) as f64).exp(),
            })
            .collect()
    }
}

/// Bath occupation `𝒩` and anomalous strength `ℳ = m_re + i m_im`;
/// `ℳ` defaults to pure squeezing `√(𝒩(𝒩+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    #[serde(default = "one")]
    pub nbar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_im: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for BathConfig {
    fn default() -> Self {
        BathConfig { nbar: 1.0, m_re: None, m_im: None }
    }
}

impl BathConfig {
    pub fn spec(&self, gamma: f64) -> localdiss::Result<BathSpec> {
        match (self.m_re, self.m_im) {
            (None, None) => BathSpec::pure_squeezing(self.nbar, gamma),
            (re, im) => BathSpec::new(self.nbar, C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)), gamma),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gammas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepGrid>,
    #[serde(default)]
    pub bath: BathConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    /// Effective hopping of the intermediate-time formula; computed from the
    /// drain autocorrelation when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jeff: Option<f64>,
    /// Light-cone speed in sites per unit time.
    #[serde(default = "two")]
    pub speed: f64,
    #[serde(default = "four")]
    pub buffer: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn two() -> f64 {
    2.0
}

fn four() -> f64 {
    4.0
}

impl ExperimentConfig {
    /// Defaults for `kind`, then `file` (TOML, or a JSON manifest with a
    /// `config` entry), then `overrides` of the form `dotted.key=value`.
    pub fn resolve(kind: ExperimentKind, file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut table: Value = toml::from_str(kind.defaults()).expect("built-in defaults parse");
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| crate::Error::Config(format!("{}: {e}", path.display())))?;
            let loaded = parse_config_text(&text, path)?;
            merge(&mut table, loaded);
        }
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let root = table.as_table_mut().expect("config root is a table");
        match root.get("experiment") {
            Some(Value::String(name)) if name != kind.name() => {
                return config_err(format!("config is for experiment `{name}`, not `{}`", kind.name()));
            }
            _ => {
                root.insert("experiment".into(), Value::String(kind.name().into()));
            }
        }
        let cfg: ExperimentConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| crate::Error::Config(context(file, e.message())))?;
        cfg.validate().map_err(|e| crate::Error::Config(context(file, &e.to_string())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return config_err("gamma values must be non-negative and finite");
        }
        if let Some(s) = &self.sweep {
            if !(s.min > 0.0 && s.max >= s.min && s.points >= 1 && s.max.is_finite()) {
                return config_err("sweep needs 0 < min <= max and points >= 1");
            }
        }
        if self.coupling_values().is_empty() {
            return config_err("no gamma values: give `gammas` or a `sweep` grid");
        }
        if self.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return config_err("times must be non-negative and finite");
        }
        if matches!(self.experiment, ExperimentKind::EigenmodeCorrelations | ExperimentKind::Lightcone)
            && self.times.is_empty()
        {
            return config_err(format!("{} needs `times`", self.experiment));
        }
        if let Some(j) = self.jeff {
            if !(j > 0.0 && j.is_finite()) {
                return config_err("jeff must be positive");
            }
        }
        if !(self.speed > 0.0 && self.buffer >= 0.0) {
            return config_err("speed must be positive and buffer non-negative");
        }
        self.bath.spec(0.0).map_err(|e| crate::Error::Config(e.to_string()))?;
        Ok(())
    }

    /// `gammas` followed by the sweep grid.
    pub fn coupling_values(&self) -> Vec<f64> {
        let mut v = self.gammas.clone();
        if let Some(s) = &self.sweep {
            v.extend(s.values());
        }
        v
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form,
    /// ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn context(file: Option<&Path>, msg: &str) -> String {
    match file {
        Some(p) => format!("{}: {msg}", p.display()),
        None => msg.to_string(),
    }
}

fn parse_config_text(text: &str, path: &Path) -> Result<Value> {
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    if is_json {
        let json: serde_json::Value =
            serde_json::from_str(text).map_err(|e| crate::Error::Config(format!("{}: {e}", path.display())))?;
        let body = json.get("config").cloned().unwrap_or(json);
        let value: Value = serde_json::from_value(body)
            .map_err(|e| crate::Error::Config(format!("{}: {e}", path.display())))?;
        Ok(value)
    } else {
        toml::from_str(text).map_err(|e| crate::Error::Config(format!("{}: {}", path.display(), e.message())))
    }
}

/// Recursive merge; a `model` table from the file replaces the default one
/// wholesale so keys of different lattice kinds never mix.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Table(b), Value::Table(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(existing) if k != "model" && existing.is_table() && v.is_table() => merge(existing, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

fn apply_override(table: &mut Value, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| crate::Error::Config(format!("override `{item}` is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return config_err(format!("override `{item}` has an empty key"));
    }
    let value = parse_value(raw.trim());
    let mut node = table;
    let parts: Vec<&str> = key.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        let t = node
            .as_table_mut()
            .ok_or_else(|| crate::Error::Config(format!("override `{key}`: `{part}` is not a table")))?;
        node = t.entry(part.to_string()).or_insert_with(|| Value::Table(Default::default()));
    }
    node.as_table_mut()
        .ok_or_else(|| crate::Error::Config(format!("override `{key}` does not address a table entry")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// TOML literal if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use localdiss::ModelKind;

    #[test]
    fn defaults_resolve() {
        for kind in ExperimentKind::ALL {
            let cfg = ExperimentConfig::resolve(kind, None, &[]).unwrap();
            assert_eq!(cfg.experiment, kind);
            cfg.model.build().unwrap();
        }
    }

    #[test]
    fn overrides_apply() {
        let cfg = ExperimentConfig::resolve(
            ExperimentKind::DissipationSpectrum,
            None,
            &["model.kind=step-chain".into(), "model.v=2".into(), "gammas=[1, 3]".into()],
        )
        .unwrap();
        assert_eq!(cfg.model.kind, ModelKind::StepChain);
        assert_eq!(cfg.model.v, Some(2.0));
        assert_eq!(cfg.gammas, vec![1.0, 3.0]);
        assert!(ExperimentConfig::resolve(ExperimentKind::Lightcone, None, &["nonsense".into()]).is_err());
        assert!(ExperimentConfig::resolve(ExperimentKind::Lightcone, None, &["gammas=[-1]".into()]).is_err());
        assert!(ExperimentConfig::resolve(ExperimentKind::Lightcone, None, &["bogus=1".into()]).is_err());
    }

    #[test]
    fn sweep_grid_is_log_spaced() {
        let v = SweepGrid { min: 0.01, max: 100.0, points: 5 }.values();
        for (x, y) in v.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert!((x / y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hash_ignores_output_dir() {
        let mut a = ExperimentConfig::resolve(ExperimentKind::GammaSweep, None, &[]).unwrap();
        let h = a.hash();
        a.output_dir = Some("elsewhere".into());
        assert_eq!(a.hash(), h);
        a.gammas.push(1.0);
        assert_ne!(a.hash(), h);
    }
}
