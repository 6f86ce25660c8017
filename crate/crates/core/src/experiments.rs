//! Sweep configuration, grid expansion and CSV/JSON output.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{monte_carlo, MonteCarloSummary};
use crate::noise::NoiseParams;
use crate::sim::{Placement, Protocol, SimConfig, TdSchedule, TimingModel, MAX_LAYERS};

/// First line of every CSV file; bump when the column set changes.
pub const SCHEMA_LINE: &str = "#schema=1";

pub const DEFAULT_MAX_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

fn default_placement() -> Vec<Placement> {
    vec![Placement::default()]
}

fn default_n_sims() -> usize {
    100
}

fn default_true() -> bool {
    true
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    OneOrMany::<T>::deserialize(d).map(Into::into)
}

fn opt_one_or_many<'de, D, T>(d: D) -> std::result::Result<Option<Vec<T>>, D::Error>
where
    D: serde::Deserializer<'de>,
    T: Deserialize<'de>,
{
    Option::<OneOrMany<T>>::deserialize(d).map(|o| o.map(Into::into))
}

/// A sweep: the cross product of every list below, each point evaluated over
/// seeds base_seed..base_seed+n_sims.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub protocol: Protocol,
    #[serde(deserialize_with = "one_or_many")]
    pub layers: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub eta: Vec<f64>,
    /// Photon-mediated merge success; follows `eta` when absent.
    #[serde(default, deserialize_with = "opt_one_or_many", skip_serializing_if = "Option::is_none")]
    pub p_link: Option<Vec<f64>>,
    #[serde(rename = "T1_e", deserialize_with = "one_or_many")]
    pub t1_e: Vec<f64>,
    #[serde(rename = "T2_e", deserialize_with = "one_or_many")]
    pub t2_e: Vec<f64>,
    /// Applied to both the electronic and the nuclear CNOT.
    #[serde(deserialize_with = "one_or_many")]
    pub cnot_error: Vec<f64>,
    #[serde(default = "default_placement", deserialize_with = "one_or_many")]
    pub placement: Vec<Placement>,
    #[serde(default = "default_n_sims")]
    pub n_sims: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_true")]
    pub extend_with_qc_link: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_toml_str(&s).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("layers", self.layers.len()),
            ("eta", self.eta.len()),
            ("T1_e", self.t1_e.len()),
            ("T2_e", self.t2_e.len()),
            ("cnot_error", self.cnot_error.len()),
            ("placement", self.placement.len()),
            ("p_link", self.p_link.as_ref().map_or(1, Vec::len)),
        ];
        for (name, len) in lists {
            if len == 0 {
                return Err(Error::Config(format!("`{name}` must not be empty")));
            }
        }
        if let Some(&l) = self.layers.iter().find(|&&l| !(1..=MAX_LAYERS).contains(&l)) {
            return Err(Error::Config(format!("layer count {l} is not in 1..={MAX_LAYERS}")));
        }
        if self.n_sims < 2 {
            return Err(Error::Config("`n_sims` must be at least 2".into()));
        }
        for p in self.grid() {
            p.sim_config(&TimingModel::default(), TdSchedule::default())?.validate()?;
        }
        Ok(())
    }

    pub fn grid_size(&self) -> usize {
        self.layers.len()
            * self.eta.len()
            * self.p_link.as_ref().map_or(1, Vec::len)
            * self.t1_e.len()
            * self.t2_e.len()
            * self.cnot_error.len()
            * self.placement.len()
    }

    /// Grid points in output order; `layers` varies fastest.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.grid_size());
        for &t1_e in &self.t1_e {
            for &t2_e in &self.t2_e {
                for &cnot_error in &self.cnot_error {
                    for &placement in &self.placement {
                        for &eta in &self.eta {
                            let links: Vec<f64> = self.p_link.clone().unwrap_or_else(|| vec![eta]);
                            for &p_link in &links {
                                for &layers in &self.layers {
                                    out.push(GridPoint {
                                        protocol: self.protocol,
                                        layers,
                                        eta,
                                        p_link,
                                        t1_e,
                                        t2_e,
                                        cnot_error,
                                        placement,
                                        extend_with_qc_link: self.extend_with_qc_link,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub protocol: Protocol,
    pub layers: usize,
    pub eta: f64,
    pub p_link: f64,
    pub t1_e: f64,
    pub t2_e: f64,
    pub cnot_error: f64,
    pub placement: Placement,
    pub extend_with_qc_link: bool,
}

impl GridPoint {
    pub fn sim_config(&self, timing: &TimingModel, td_schedule: TdSchedule) -> Result<SimConfig> {
        let params =
            NoiseParams::from_electron_times(self.t1_e, self.t2_e, self.cnot_error, self.eta)?.with_p_link(self.p_link);
        Ok(SimConfig {
            protocol: self.protocol,
            n_layers: self.layers,
            params,
            timing: *timing,
            placement: self.placement,
            extend_with_qc_link: self.extend_with_qc_link,
            td_schedule,
        })
    }
}

/// Knobs that are not part of the config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub max_grid_points: usize,
    pub timing: TimingModel,
    pub td_schedule: TdSchedule,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_grid_points: DEFAULT_MAX_GRID_POINTS,
            timing: TimingModel::default(),
            td_schedule: TdSchedule::default(),
        }
    }
}

/// One output row. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub protocol: Protocol,
    pub layers: usize,
    pub eta: f64,
    pub p_link: f64,
    #[serde(rename = "T1_e")]
    pub t1_e: f64,
    #[serde(rename = "T2_e")]
    pub t2_e: f64,
    pub cnot_error: f64,
    pub placement: String,
    pub extend_with_qc_link: bool,
    pub n_sims: usize,
    pub base_seed: u64,
    pub mean_fidelity: f64,
    pub stderr_fidelity: f64,
    pub mean_query_time: f64,
    pub stderr_query_time: f64,
    pub runs_with_warnings: usize,
    /// Mean fidelity of layers 1..=layers, separated by ';'.
    pub layer_fidelities: String,
}

impl SweepRow {
    fn new(p: &GridPoint, s: &MonteCarloSummary) -> Self {
        SweepRow {
            protocol: p.protocol,
            layers: p.layers,
            eta: p.eta,
            p_link: p.p_link,
            t1_e: p.t1_e,
            t2_e: p.t2_e,
            cnot_error: p.cnot_error,
            placement: p.placement.label(),
            extend_with_qc_link: p.extend_with_qc_link,
            n_sims: s.n_sims,
            base_seed: s.base_seed,
            mean_fidelity: s.mean_fidelity,
            stderr_fidelity: s.stderr_fidelity,
            mean_query_time: s.mean_query_time,
            stderr_query_time: s.stderr_query_time,
            runs_with_warnings: s.runs_with_warnings,
            layer_fidelities: s
                .mean_layer_fidelity
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        }
    }

    pub fn layer_fidelity_values(&self) -> Vec<f64> {
        self.layer_fidelities
            .split(';')
            .filter_map(|s| s.parse().ok())
            .collect()
    }
}

/// Evaluates every grid point. Rows come back in grid order whatever the
/// number of worker threads.
pub fn run_sweep(cfg: &SweepConfig, opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let size = cfg.grid_size();
    if size > opts.max_grid_points {
        return Err(Error::Config(format!(
            "grid has {size} points, more than the cap of {}",
            opts.max_grid_points
        )));
    }
    let grid = cfg.grid();
    grid.par_iter()
        .map(|p| {
            let sim = p.sim_config(&opts.timing, opts.td_schedule)?;
            let summary = monte_carlo(&sim, cfg.n_sims, cfg.base_seed)?;
            log::info!(
                "{} layers={} eta={} placement={}: F={:.6} t={:.3e}s",
                p.protocol,
                p.layers,
                p.eta,
                p.placement.label(),
                summary.mean_fidelity,
                summary.mean_query_time
            );
            Ok(SweepRow::new(p, &summary))
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_csv(text: &str) -> Result<Vec<SweepRow>> {
    let body = text
        .strip_prefix(SCHEMA_LINE)
        .ok_or_else(|| Error::Config(format!("missing `{SCHEMA_LINE}` header line")))?;
    let mut r = csv::Reader::from_reader(body.trim_start_matches(['\r', '\n']).as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Write {
            path: path.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `path` as CSV and, if asked, a JSON mirror next to it.
pub fn write_outputs(rows: &[SweepRow], path: &Path, json: bool) -> Result<Vec<PathBuf>> {
    write_file(path, csv_string(rows)?.as_bytes())?;
    let mut written = vec![path.to_path_buf()];
    if json {
        let jpath = path.with_extension("json");
        let mut text = serde_json::to_string_pretty(rows)?;
        text.push('\n');
        write_file(&jpath, text.as_bytes())?;
        written.push(jpath);
    }
    Ok(written)
}

/// Shipped sweep configurations.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig6", include_str!("../presets/fig6.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("fig9", include_str!("../presets/fig9.toml")),
    ("fig12", include_str!("../presets/fig12.toml")),
    ("fig13", include_str!("../presets/fig13.toml")),
    ("fig14", include_str!("../presets/fig14.toml")),
    ("fig14-td", include_str!("../presets/fig14-td.toml")),
    ("appF-querytimes-random", include_str!("../presets/appF-querytimes-random.toml")),
    ("appF-querytimes-top", include_str!("../presets/appF-querytimes-top.toml")),
    ("appF-fidelities-1", include_str!("../presets/appF-fidelities-1.toml")),
    ("appF-fidelities-2", include_str!("../presets/appF-fidelities-2.toml")),
    ("appF-fidelities-3", include_str!("../presets/appF-fidelities-3.toml")),
    ("appF-fidelities-4", include_str!("../presets/appF-fidelities-4.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_source(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown preset `{name}` (available: {})",
                preset_names().collect::<Vec<_>>().join(", ")
            ))
        })
}

pub fn preset(name: &str) -> Result<SweepConfig> {
    SweepConfig::from_toml_str(preset_source(name)?)
}
