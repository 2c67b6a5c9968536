//! Experiment drivers: compute tables, then write CSV files and a manifest
//! into `<out>/<experiment>-<config hash>/`.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use localdiss::{
    approx_dissipation_spectrum, default_jeff, diagonalize_coupled, dynamical_matrix, exact_dynamical_spectrum,
    intermediate_correlations, light_cone_profile_with, remainders, ring_analytics, steady_state, to_site_basis,
    Basis, EigenSystem, ExactPropagator, GaussianState, Geometry, LatticeModel, LightConeOptions, ModelKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{config_err, Error, Result};

/// Fixed 17-significant-digit rendering used in every CSV file.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub description: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub description: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub label: String,
    pub n_sites: usize,
    pub drain: usize,
    pub site_indexing: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Platform {
    pub os: String,
    pub arch: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub experiment: ExperimentKind,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub model: ModelInfo,
    pub files: Vec<FileEntry>,
    pub float_format: String,
    pub wall_time_seconds: f64,
    pub platform: Platform,
    #[serde(default)]
    pub results: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

pub const SPECTRUM_COLUMNS: [&str; 15] = [
    "gamma",
    "i",
    "epsilon",
    "delta",
    "weight",
    "remainder",
    "gamma_exact",
    "gamma_approx",
    "delta_nu",
    "ratio_exact",
    "ratio_approx",
    "regime",
    "enhanced",
    "macroscopic",
    "error",
];

/// One mode at one coupling. Failed couplings keep their rows with `NaN`
/// values and the message in `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub gamma: f64,
    pub i: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub weight: f64,
    pub remainder: f64,
    pub gamma_exact: f64,
    pub gamma_approx: f64,
    pub delta_nu: f64,
    pub regime: String,
    pub enhanced: bool,
    pub macroscopic: bool,
    pub error: String,
}

impl SpectrumRow {
    fn cells(&self) -> Vec<String> {
        let coupling = self.weight * self.gamma;
        let ratio = |g: f64| if coupling > 0.0 { g / coupling } else { f64::NAN };
        vec![
            fmt_f64(self.gamma),
            self.i.to_string(),
            fmt_f64(self.epsilon),
            fmt_f64(self.delta),
            fmt_f64(self.weight),
            fmt_f64(self.remainder),
            fmt_f64(self.gamma_exact),
            fmt_f64(self.gamma_approx),
            fmt_f64(self.delta_nu),
            fmt_f64(ratio(self.gamma_exact)),
            fmt_f64(ratio(self.gamma_approx)),
            self.regime.clone(),
            self.enhanced.to_string(),
            self.macroscopic.to_string(),
            self.error.clone(),
        ]
    }
}

fn spectrum_rows(es: &EigenSystem, gamma: f64) -> Vec<SpectrumRow> {
    let m = es.n_modes();
    let base = |i: usize| SpectrumRow {
        gamma,
        i,
        epsilon: es.energies[i],
        delta: es.spacing.get(i).copied().unwrap_or(f64::NAN),
        weight: es.weight[i],
        remainder: f64::NAN,
        gamma_exact: f64::NAN,
        gamma_approx: f64::NAN,
        delta_nu: f64::NAN,
        regime: String::new(),
        enhanced: false,
        macroscopic: false,
        error: String::new(),
    };
    let mut rows: Vec<SpectrumRow> = (0..m).map(base).collect();
    let mut errors = Vec::new();
    match dynamical_matrix(es, gamma).and_then(|a| exact_dynamical_spectrum(&a, es, gamma)) {
        Ok(ds) => {
            for (i, row) in rows.iter_mut().enumerate() {
                row.gamma_exact = ds.rates[i];
                row.delta_nu = ds.shifts[i];
                row.macroscopic = ds.macroscopic[i];
            }
        }
        Err(e) => errors.push(e.to_string()),
    }
    match remainders(es).and_then(|r| approx_dissipation_spectrum(es, &r, gamma)) {
        Ok(ap) => {
            for (i, row) in rows.iter_mut().enumerate() {
                row.remainder = ap.remainder[i];
                row.gamma_approx = ap.gamma_approx[i];
                row.regime = ap.regime[i].as_str().to_string();
                row.enhanced = ap.remainder[i].abs() < es.weight[i] / 3f64.sqrt();
            }
        }
        Err(e) => errors.push(e.to_string()),
    }
    if !errors.is_empty() {
        let msg = errors.join("; ");
        for row in &mut rows {
            row.error = msg.clone();
        }
    }
    rows
}

/// Exact and approximate spectra for every coupling, with the eigensystem
/// shared across a pool of `workers` threads. Rows are ordered by `(Γ, i)`.
pub fn sweep_gamma(model: &LatticeModel, gammas: &[f64], workers: usize) -> Result<Vec<SpectrumRow>> {
    if gammas.is_empty() {
        return config_err("gamma sweep needs at least one value");
    }
    let es = diagonalize_coupled(model)?;
    let mut order: Vec<f64> = gammas.to_vec();
    order.sort_by(f64::total_cmp);
    let chunks: Vec<Vec<SpectrumRow>> = pool(workers)?.install(|| order.par_iter().map(|&g| spectrum_rows(&es, g)).collect());
    Ok(chunks.into_iter().flatten().collect())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

fn tag(x: f64) -> String {
    format!("{x}")
}

fn modes_table(es: &EigenSystem) -> Table {
    Table {
        name: "modes.csv".into(),
        description: "drain-coupled eigenmodes: energy, level spacing, drain weight |psi(n0)|^2, drain phase".into(),
        header: vec!["i", "epsilon", "delta", "weight", "phase"],
        rows: (0..es.n_modes())
            .map(|i| {
                vec![
                    i.to_string(),
                    fmt_f64(es.energies[i]),
                    fmt_f64(es.spacing.get(i).copied().unwrap_or(f64::NAN)),
                    fmt_f64(es.weight[i]),
                    fmt_f64(es.drain_phase[i]),
                ]
            })
            .collect(),
    }
}

fn spectrum_table(name: String, description: String, rows: &[SpectrumRow]) -> Table {
    Table { name, description, header: SPECTRUM_COLUMNS.to_vec(), rows: rows.iter().map(|r| r.cells()).collect() }
}

type Results = serde_json::Map<String, serde_json::Value>;

fn dissipation_spectrum(cfg: &ExperimentConfig, model: &LatticeModel, workers: usize) -> Result<(Vec<Table>, Results)> {
    let es = diagonalize_coupled(model)?;
    let gammas = cfg.coupling_values();
    let rows = sweep_gamma(model, &gammas, workers)?;
    let mut tables = vec![modes_table(&es)];
    let mut sorted = gammas.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    for g in sorted {
        let part: Vec<SpectrumRow> = rows.iter().filter(|r| r.gamma == g).cloned().collect();
        tables.push(spectrum_table(
            format!("spectrum_gamma-{}.csv", tag(g)),
            format!("exact and approximate dissipation spectrum at Gamma = {g} J"),
            &part,
        ));
    }
    Ok((tables, Results::new()))
}

fn gamma_sweep(cfg: &ExperimentConfig, model: &LatticeModel, workers: usize) -> Result<(Vec<Table>, Results)> {
    let rows = sweep_gamma(model, &cfg.coupling_values(), workers)?;
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    let mut results = Results::new();
    results.insert("failed_rows".into(), failed.into());
    let es = diagonalize_coupled(model)?;
    Ok((
        vec![
            modes_table(&es),
            spectrum_table("sweep.csv".into(), "dissipation spectrum over the coupling grid, ordered by (gamma, i)".into(), &rows),
        ],
        results,
    ))
}

fn ring_analytics_run(cfg: &ExperimentConfig, model: &LatticeModel, workers: usize) -> Result<(Vec<Table>, Results)> {
    let flux_ok = cfg.model.flux.is_some_and(|f| (f - PI / 2.0).abs() < 1e-12);
    if cfg.model.kind != ModelKind::Ring || !flux_ok || model.drain != 0 {
        return config_err("ring-analytics needs kind = \"ring\" with flux = pi/2 and the drain on site 0");
    }
    let es = diagonalize_coupled(model)?;
    let n = model.n_sites;
    let j = model.hop_scale;
    let gammas = cfg.coupling_values();
    let per_gamma: Vec<Result<(f64, Table, Vec<String>)>> = pool(workers)?.install(|| {
        gammas
            .par_iter()
            .map(|&g| {
                let a = dynamical_matrix(&es, g)?;
                let ds = exact_dynamical_spectrum(&a, &es, g)?;
                let ra = ring_analytics(n, j, g)?;
                let momenta = ra.momenta();
                let rows = (0..n)
                    .map(|i| {
                        let analytic = ra.gamma_of_mode[i];
                        vec![
                            i.to_string(),
                            fmt_f64(ra.labels[i]),
                            fmt_f64(momenta[i]),
                            fmt_f64(es.energies[i]),
                            fmt_f64(ds.rates[i]),
                            fmt_f64(analytic),
                            fmt_f64((ds.rates[i] - analytic).abs() / analytic),
                            fmt_f64(ds.rates[i] / (es.weight[i] * g)),
                            ds.macroscopic[i].to_string(),
                        ]
                    })
                    .collect();
                let table = Table {
                    name: format!("ring_gamma-{}.csv", tag(g)),
                    description: format!("exact vs analytic ring rates at Gamma = {g} J"),
                    header: vec![
                        "rank", "label", "momentum", "epsilon", "gamma_exact", "gamma_analytic", "rel_error",
                        "ratio_exact", "macroscopic",
                    ],
                    rows,
                };
                let gmax = ds.rates.iter().copied().fold(0.0, f64::max);
                let summary = vec![
                    fmt_f64(g),
                    fmt_f64(ra.k_c.unwrap_or(f64::NAN)),
                    fmt_f64(ra.gamma_0.unwrap_or(f64::NAN)),
                    fmt_f64(gmax),
                    ds.macroscopic.iter().filter(|&&m| m).count().to_string(),
                ];
                Ok((g, table, summary))
            })
            .collect()
    });
    let mut tables = Vec::new();
    let mut summary = Vec::new();
    for item in per_gamma {
        let (_, table, row) = item?;
        tables.push(table);
        summary.push(row);
    }
    tables.push(Table {
        name: "ring_summary.csv".into(),
        description: "critical momentum, analytic macroscopic rate and largest exact rate per coupling".into(),
        header: vec!["gamma", "k_c", "gamma_0_analytic", "gamma_max_exact", "n_macroscopic"],
        rows: summary,
    });
    Ok((tables, Results::new()))
}

fn abs2_over(value: localdiss::C64, m: localdiss::C64) -> f64 {
    if m.norm() == 0.0 {
        f64::NAN
    } else {
        value.norm_sqr() / m.norm()
    }
}

fn eigenmode_correlations(cfg: &ExperimentConfig, model: &LatticeModel, workers: usize) -> Result<(Vec<Table>, Results)> {
    let es = diagonalize_coupled(model)?;
    let jeff = match cfg.jeff {
        Some(j) => j,
        None => default_jeff(&es)?,
    };
    let mut results = Results::new();
    results.insert("jeff".into(), jeff.into());
    let mut tables = Vec::new();
    let workers = pool(workers)?;
    for g in cfg.coupling_values() {
        let bath = cfg.bath.spec(g)?;
        let ds = exact_dynamical_spectrum(&dynamical_matrix(&es, g)?, &es, g)?;
        let prop = ExactPropagator::new(&ds, &bath, &GaussianState::vacuum(es.n_modes(), Basis::Eigenmode))?;
        let snaps: Vec<Result<Table>> = workers.install(|| {
            cfg.times
                .par_iter()
                .map(|&t| {
                    let exact = prop.state_at(t)?;
                    let approx = intermediate_correlations(&es, &bath, jeff, t)?;
                    let m = es.n_modes();
                    let mut rows = Vec::with_capacity(m * m);
                    for i in 0..m {
                        for j in 0..m {
                            let (en, ea) = (exact.normal[(i, j)], exact.anomalous[(i, j)]);
                            let (an, aa) = (approx.normal[(i, j)], approx.anomalous[(i, j)]);
                            rows.push(vec![
                                i.to_string(),
                                j.to_string(),
                                fmt_f64(en.re),
                                fmt_f64(en.im),
                                fmt_f64(ea.re),
                                fmt_f64(ea.im),
                                fmt_f64(an.re),
                                fmt_f64(an.im),
                                fmt_f64(aa.re),
                                fmt_f64(aa.im),
                                fmt_f64(abs2_over(ea, bath.m)),
                                fmt_f64(abs2_over(aa, bath.m)),
                            ]);
                        }
                    }
                    Ok(Table {
                        name: format!("modes_gamma-{}_t-{}.csv", tag(g), tag(t)),
                        description: format!(
                            "eigenmode correlators <b_i^dag b_j>, <b_i b_j>: exact and intermediate-time formula, Gamma = {g} J, t = {t}/J"
                        ),
                        header: vec![
                            "i", "j", "normal_re", "normal_im", "anomalous_re", "anomalous_im", "approx_normal_re",
                            "approx_normal_im", "approx_anomalous_re", "approx_anomalous_im", "anomalous_abs2_over_m",
                            "approx_anomalous_abs2_over_m",
                        ],
                        rows,
                    })
                })
                .collect()
        });
        for s in snaps {
            tables.push(s?);
        }
    }
    Ok((tables, results))
}

fn site_rows(state: &GaussianState, m_bath: localdiss::C64) -> Vec<Vec<String>> {
    let n = state.dim();
    let mut rows = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (state.normal[(a, b)], state.anomalous[(a, b)]);
            rows.push(vec![
                a.to_string(),
                b.to_string(),
                fmt_f64(x.re),
                fmt_f64(x.im),
                fmt_f64(y.re),
                fmt_f64(y.im),
                fmt_f64(abs2_over(y, m_bath)),
            ]);
        }
    }
    rows
}

const SITE_HEADER: [&str; 7] = ["m", "n", "normal_re", "normal_im", "anomalous_re", "anomalous_im", "anomalous_abs2_over_m"];

fn lightcone(cfg: &ExperimentConfig, model: &LatticeModel, workers: usize) -> Result<(Vec<Table>, Results)> {
    if !matches!(model.geometry, Geometry::Chain { .. } | Geometry::Ring { .. }) {
        return Err(Error::Config("light-cone analysis is defined for 1D lattices only".into()));
    }
    let es = diagonalize_coupled(model)?;
    let opts = LightConeOptions { speed: cfg.speed, buffer: cfg.buffer, ..LightConeOptions::default() };
    let mut tables = Vec::new();
    let mut results = Results::new();
    let workers = pool(workers)?;
    for g in cfg.coupling_values() {
        let bath = cfg.bath.spec(g)?;
        let ds = exact_dynamical_spectrum(&dynamical_matrix(&es, g)?, &es, g)?;
        let prop = ExactPropagator::new(&ds, &bath, &GaussianState::vacuum(es.n_modes(), Basis::Eigenmode))?;
        let snaps: Vec<Result<(Table, Vec<String>, f64, f64)>> = workers.install(|| {
            cfg.times
                .par_iter()
                .map(|&t| {
                    let site = to_site_basis(&prop.state_at(t)?, &es)?;
                    let p = light_cone_profile_with(&site, &model.geometry, model.drain, t, &opts)?;
                    let table = Table {
                        name: format!("sites_gamma-{}_t-{}.csv", tag(g), tag(t)),
                        description: format!("site correlators <a_m^dag a_n>, <a_m a_n> at Gamma = {g} J, t = {t}/J"),
                        header: SITE_HEADER.to_vec(),
                        rows: site_rows(&site, bath.m),
                    };
                    let summary = vec![
                        fmt_f64(t),
                        fmt_f64(p.radius),
                        fmt_f64(p.inside_max),
                        fmt_f64(p.outside_max),
                        p.front_position.to_string(),
                    ];
                    let saturated = p.front_position + 1 >= p.per_distance.len();
                    Ok((table, summary, t, if saturated { f64::NAN } else { p.front_position as f64 }))
                })
                .collect()
        });
        let mut summary = Vec::new();
        let (mut ts, mut fronts) = (Vec::new(), Vec::new());
        for s in snaps {
            let (table, row, t, f) = s?;
            tables.push(table);
            summary.push(row);
            ts.push(t);
            fronts.push(f);
        }
        tables.push(Table {
            name: format!("lightcone_gamma-{}.csv", tag(g)),
            description: "max |<a_m a_n>| inside and outside radius speed*t + buffer, and the front position".into(),
            header: vec!["t", "radius", "inside_max", "outside_max", "front_position"],
            rows: summary,
        });
        let (ts, fronts): (Vec<f64>, Vec<f64>) = ts.into_iter().zip(fronts).filter(|(_, f)| f.is_finite()).unzip();
        if ts.len() >= 2 {
            if let Ok((slope, _)) = localdiss::fit_front_speed(&ts, &fronts) {
                results.insert(format!("front_speed_gamma-{}", tag(g)), slope.into());
            }
        }
        match steady_state(&ds, &bath) {
            Ok(ss) => tables.push(Table {
                name: format!("sites_gamma-{}_steady.csv", tag(g)),
                description: format!("steady-state site correlators at Gamma = {g} J"),
                header: SITE_HEADER.to_vec(),
                rows: site_rows(&to_site_basis(&ss, &es)?, bath.m),
            }),
            Err(e) => {
                results.insert(format!("steady_state_gamma-{}", tag(g)), e.to_string().into());
            }
        }
    }
    Ok((tables, results))
}

fn write_table(dir: &Path, table: &Table) -> Result<()> {
    let path = dir.join(&table.name);
    let out = |e: String| Error::Output(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(&path).map_err(|e| out(e.to_string()))?;
    w.write_record(&table.header).map_err(|e| out(e.to_string()))?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| out(e.to_string()))?;
    }
    w.flush().map_err(|e| out(e.to_string()))
}

/// Runs `cfg` and writes its datasets under `out_root`.
pub fn run_experiment(cfg: &ExperimentConfig, out_root: &Path, workers: usize) -> Result<RunOutput> {
    cfg.validate()?;
    let started = Instant::now();
    let model = cfg.model.build()?;
    let (tables, results) = match cfg.experiment {
        ExperimentKind::DissipationSpectrum => dissipation_spectrum(cfg, &model, workers)?,
        ExperimentKind::GammaSweep => gamma_sweep(cfg, &model, workers)?,
        ExperimentKind::RingAnalytics => ring_analytics_run(cfg, &model, workers)?,
        ExperimentKind::EigenmodeCorrelations => eigenmode_correlations(cfg, &model, workers)?,
        ExperimentKind::Lightcone => lightcone(cfg, &model, workers)?,
    };

    let hash = cfg.hash();
    let dir = out_root.join(format!("{}-{hash}", cfg.experiment));
    fs::create_dir_all(&dir).map_err(|e| Error::Output(format!("cannot create {}: {e}", dir.display())))?;
    for t in &tables {
        write_table(&dir, t)?;
    }
    let manifest = Manifest {
        tool: "localdiss".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: cfg.experiment,
        config_hash: hash,
        config: cfg.clone(),
        model: ModelInfo {
            label: model.label.clone(),
            n_sites: model.n_sites,
            drain: model.drain,
            site_indexing: "1D: site index along the chain/ring; 2D: row-major, site = row * nx + col, row 0 on top".into(),
        },
        files: tables
            .iter()
            .map(|t| FileEntry {
                name: t.name.clone(),
                description: t.description.clone(),
                columns: t.header.iter().map(|s| s.to_string()).collect(),
                rows: t.rows.len(),
            })
            .collect(),
        float_format: "{:.16e} (17 significant digits, round-trips f64)".into(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        platform: Platform {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            note: "CSV bytes are reproducible for a fixed config on one platform; other CPUs or compilers may differ in the last digits".into(),
        },
        results,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Output(e.to_string()))?;
    let path = dir.join("manifest.json");
    fs::write(&path, json).map_err(|e| Error::Output(format!("{}: {e}", path.display())))?;
    Ok(RunOutput { dir, manifest })
}
