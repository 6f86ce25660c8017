//! QRAM-level figures of merit built from per-layer analytics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{chain_corner, ghz_fidelity, validity_warning, LinkChain, ValidityWarning};
use crate::error::{invalid, Result};
use crate::sim::{simulate_qram, QramRunResult, SimConfig};

/// Fidelity of one layer's GHZ state with the ideal one. A single-qubit chain
/// needs no GHZ state and has fidelity 1.
pub fn layer_fidelity(chain: &LinkChain) -> Result<f64> {
    if chain.pairs.is_empty() {
        return Ok(1.0);
    }
    Ok(ghz_fidelity(&chain_corner(chain)?))
}

/// Product of the layer fidelities.
pub fn qram_fidelity(per_layer: &[f64]) -> Result<f64> {
    if per_layer.is_empty() {
        return Err(invalid("per_layer", "no layers"));
    }
    Ok(per_layer.iter().product())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QramEstimate {
    pub per_layer_fidelity: Vec<f64>,
    pub tree_fidelity: f64,
    pub query_time: f64,
    #[serde(skip)]
    pub warnings: Vec<(usize, ValidityWarning)>,
}

pub fn estimate(run: &QramRunResult) -> Result<QramEstimate> {
    let mut per_layer_fidelity = Vec::with_capacity(run.layers.len());
    let mut warnings = Vec::new();
    for layer in &run.layers {
        per_layer_fidelity.push(layer_fidelity(&layer.chain)?);
        if let Some(w) = validity_warning(layer.chain.n_qubits(), layer.chain.max_final_eps()?) {
            warnings.push((layer.layer, w));
        }
    }
    Ok(QramEstimate {
        tree_fidelity: qram_fidelity(&per_layer_fidelity)?,
        per_layer_fidelity,
        query_time: run.query_time,
        warnings,
    })
}

/// Simulates one seed and evaluates it.
pub fn run_once(cfg: &SimConfig, seed: u64) -> Result<QramEstimate> {
    estimate(&simulate_qram(cfg, seed)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub n_sims: usize,
    pub base_seed: u64,
    pub mean_fidelity: f64,
    pub stderr_fidelity: f64,
    pub mean_query_time: f64,
    pub stderr_query_time: f64,
    /// Mean fidelity of each layer over the runs.
    pub mean_layer_fidelity: Vec<f64>,
    /// Runs in which some layer exceeded the first-order validity bound.
    pub runs_with_warnings: usize,
}

/// (mean, sample std / √n).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn summarize(estimates: &[QramEstimate], base_seed: u64) -> Result<MonteCarloSummary> {
    if estimates.len() < 2 {
        return Err(invalid("n_sims", "need at least 2 runs for a standard error"));
    }
    let fid: Vec<f64> = estimates.iter().map(|e| e.tree_fidelity).collect();
    let qt: Vec<f64> = estimates.iter().map(|e| e.query_time).collect();
    let (mean_fidelity, stderr_fidelity) = mean_stderr(&fid);
    let (mean_query_time, stderr_query_time) = mean_stderr(&qt);
    let n_layers = estimates[0].per_layer_fidelity.len();
    let mean_layer_fidelity = (0..n_layers)
        .map(|k| estimates.iter().map(|e| e.per_layer_fidelity[k]).sum::<f64>() / estimates.len() as f64)
        .collect();
    Ok(MonteCarloSummary {
        n_sims: estimates.len(),
        base_seed,
        mean_fidelity,
        stderr_fidelity,
        mean_query_time,
        stderr_query_time,
        mean_layer_fidelity,
        runs_with_warnings: estimates.iter().filter(|e| !e.warnings.is_empty()).count(),
    })
}

/// Runs seeds base_seed..base_seed+n_sims in parallel. Results are collected
/// in seed order, so the summary does not depend on the thread count.
pub fn monte_carlo(cfg: &SimConfig, n_sims: usize, base_seed: u64) -> Result<MonteCarloSummary> {
    if n_sims < 2 {
        return Err(invalid("n_sims", "need at least 2 runs for a standard error"));
    }
    let estimates = (0..n_sims as u64)
        .into_par_iter()
        .map(|i| run_once(cfg, base_seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    for e in &estimates {
        for (layer, w) in &e.warnings {
            log::debug!("layer {layer}: {w}");
        }
    }
    summarize(&estimates, base_seed)
}
