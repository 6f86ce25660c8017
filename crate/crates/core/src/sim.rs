//! Discrete-event timing of GHZ distribution in one QRAM run.
//!
//! The simulation is noiseless at the state level. It records when pairs are
//! heralded, how long every qubit idles in which memory and which noisy CNOTs
//! were applied; `analytics` turns that record into fidelities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::analytics::{
    pair_after_transfer, pair_electron_only, CnotEvent, CnotKind, ElectronPairTimes, IdleInterval, LinkChain,
    PairParams, TransferTimes,
};
use crate::error::{check_probability, invalid, Error, Result};
use crate::noise::{MemoryKind, NoiseParams};

/// Largest supported layer count (layer k has 2^(k-1) nodes).
pub const MAX_LAYERS: usize = 20;

/// Gate and communication durations, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingModel {
    pub single_qubit_gate: f64,
    pub qubit_init: f64,
    pub nuclear_cnot: f64,
    pub electronic_cnot: f64,
    pub photon_spin_interaction: f64,
    /// m/s
    pub light_velocity: f64,
    /// m
    pub cavity_distance: f64,
    pub measurement: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        TimingModel {
            single_qubit_gate: 32e-9,
            qubit_init: 5e-6,
            nuclear_cnot: 16e-6,
            electronic_cnot: 29e-9,
            photon_spin_interaction: 0.1e-9,
            light_velocity: 2e8,
            cavity_distance: 10e-6,
            measurement: 0.0,
        }
    }
}

impl TimingModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("single_qubit_gate", self.single_qubit_gate),
            ("qubit_init", self.qubit_init),
            ("nuclear_cnot", self.nuclear_cnot),
            ("electronic_cnot", self.electronic_cnot),
            ("photon_spin_interaction", self.photon_spin_interaction),
            ("cavity_distance", self.cavity_distance),
            ("measurement", self.measurement),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be a finite duration >= 0")));
            }
        }
        if !(self.light_velocity > 0.0) {
            return Err(invalid("light_velocity", "must be > 0"));
        }
        Ok(())
    }

    /// One-way photon or classical-message transit between neighbouring cavities.
    pub fn transit(&self) -> f64 {
        self.cavity_distance / self.light_velocity
    }

    /// Time for a heralded pair to be confirmed after the photon has left.
    pub fn herald_latency(&self) -> f64 {
        self.transit()
    }

    /// Duration of a photon-mediated parity merge, including the correction.
    pub fn photonic_merge(&self) -> f64 {
        2.0 * self.photon_spin_interaction + 2.0 * self.transit() + self.measurement + self.single_qubit_gate
    }

    /// Duration of a deterministic (electronic then nuclear CNOT) merge.
    pub fn deterministic_merge(&self) -> f64 {
        self.electronic_cnot + self.nuclear_cnot + 2.0 * self.measurement + self.single_qubit_gate
    }

    /// Electron-to-nuclear transfer after a heralded pair, including the correction.
    pub fn transfer(&self) -> f64 {
        self.electronic_cnot + self.measurement + self.single_qubit_gate
    }
}

/// Qubit initialisation, two photon-spin interactions, photon transit and the
/// herald coming back.
pub fn attempt_cycle_duration(timing: &TimingModel) -> f64 {
    timing.qubit_init + 2.0 * timing.photon_spin_interaction + 2.0 * timing.transit()
}

/// Number of attempts up to and including the first success.
pub fn sample_heralded_success<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<u64> {
    check_probability("p", p)?;
    if p == 0.0 {
        return Err(invalid("p", "success probability 0 never terminates"));
    }
    let geo = Geometric::new(p).map_err(|e| invalid("p", e.to_string()))?;
    Ok(geo.sample(rng) + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Td,
    Ts,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Protocol::Td => "td",
            Protocol::Ts => "ts",
        })
    }
}

/// Which TS merge nodes are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    /// Each merge node is deterministic with probability `p_d`.
    Random { p_d: f64 },
    /// Merge nodes above distribution level `offset` are deterministic.
    TopLayers { offset: usize },
}

impl Default for Placement {
    fn default() -> Self {
        Placement::Random { p_d: 0.0 }
    }
}

impl Placement {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Placement::Random { p_d } => check_probability("p_d", p_d),
            Placement::TopLayers { offset } if offset < 1 => Err(invalid("offset", "must be >= 1")),
            Placement::TopLayers { .. } => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Placement::Random { p_d } => format!("random:{p_d}"),
            Placement::TopLayers { offset } => format!("top_layers:{offset}"),
        }
    }
}

/// Whether TD step-2 pair generation waits for step 1 to finish everywhere.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TdSchedule {
    #[default]
    Sequential,
    /// Step-2 pairs are generated from t = 0; each nuclear CNOT still waits
    /// for both neighbouring transfers.
    Overlapped,
}

/// One stretch of time a final GHZ qubit spends in a memory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Custody {
    pub start: f64,
    pub end: f64,
    pub memory: MemoryKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairRecord {
    Transfer(TransferTimes),
    Electron(ElectronPairTimes),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    /// Time the pair is ready for linking.
    pub ready: f64,
    pub pair: PairRecord,
}

/// Event record of one layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerLedger {
    pub n_nodes: usize,
    /// One record per link of the chain, left to right; the QC extension, if
    /// any, is last.
    pub links: Vec<LinkRecord>,
    pub cnot_events: Vec<CnotEvent>,
    /// Memory custody of every final qubit from its last noisy operation to
    /// the end of the layer.
    pub custody: Vec<Vec<Custody>>,
    pub completion: f64,
    pub n_deterministic: usize,
    pub failed_merges: u64,
}

impl LayerLedger {
    fn empty(n_nodes: usize) -> Self {
        LayerLedger {
            n_nodes,
            links: Vec::new(),
            cnot_events: Vec::new(),
            custody: vec![Vec::new(); n_nodes],
            completion: 0.0,
            n_deterministic: 0,
            failed_merges: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.links.len() + 1
    }

    /// Custody intervals ordered, non-overlapping and ending by completion;
    /// every CNOT event refers to an existing link or node.
    pub fn check(&self) -> Result<()> {
        let tol = 1e-12 * self.completion.max(1e-6);
        if self.custody.len() != self.n_qubits() {
            return Err(Error::LengthMismatch {
                what: "custody records",
                expected: self.n_qubits(),
                actual: self.custody.len(),
            });
        }
        for (q, chain) in self.custody.iter().enumerate() {
            let mut last = f64::NEG_INFINITY;
            for c in chain {
                if !(c.start <= c.end) || c.start < last - tol || c.end > self.completion + tol {
                    return Err(Error::MalformedChain(format!("custody of qubit {q} is out of order: {c:?}")));
                }
                last = c.end;
            }
        }
        for l in &self.links {
            if l.ready > self.completion + tol {
                return Err(Error::MalformedChain(format!("link ready at {} after completion", l.ready)));
            }
        }
        self.chain_skeleton().validate()
    }

    fn chain_skeleton(&self) -> LinkChain {
        LinkChain {
            pairs: vec![PairParams::PERFECT; self.links.len()],
            cnot_events: self.cnot_events.clone(),
            final_idle: vec![Vec::new(); self.n_qubits()],
        }
    }

    /// Closed-form inputs of this layer under `params`.
    pub fn to_chain(&self, params: &NoiseParams) -> Result<LinkChain> {
        let pairs = self
            .links
            .iter()
            .map(|l| match &l.pair {
                PairRecord::Transfer(t) => pair_after_transfer(t, params),
                PairRecord::Electron(t) => pair_electron_only(t, params),
            })
            .collect::<Result<Vec<_>>>()?;
        let final_idle = self
            .custody
            .iter()
            .map(|chain| {
                chain
                    .iter()
                    .map(|c| {
                        let m = params.memory(c.memory);
                        IdleInterval {
                            duration: c.end - c.start,
                            t1: m.t1,
                            t2: m.t2,
                        }
                    })
                    .collect()
            })
            .collect();
        let chain = LinkChain {
            pairs,
            cnot_events: self.cnot_events.clone(),
            final_idle,
        };
        chain.validate()?;
        Ok(chain)
    }

    /// Appends the pair that joins the last node to the QC, generated after
    /// the layer is complete. Every existing qubit idles until it is ready.
    fn extend_with_qc_link<R: Rng + ?Sized>(
        &mut self,
        params: &NoiseParams,
        timing: &TimingModel,
        rng: &mut R,
    ) -> Result<()> {
        let k = sample_heralded_success(params.eta, rng)?;
        let end = self.completion + k as f64 * attempt_cycle_duration(timing) + timing.transfer();
        let h = timing.herald_latency();
        self.links.push(LinkRecord {
            ready: end,
            pair: PairRecord::Transfer(TransferTimes {
                t_el: h,
                t_er: h,
                t_nl: 0.0,
                t_nr: 0.0,
            }),
        });
        for chain in &mut self.custody {
            if let Some(last) = chain.last_mut() {
                last.end = end;
            }
        }
        self.custody.push(Vec::new());
        self.completion = end;
        Ok(())
    }
}

fn check_layer_size(n_nodes: usize) -> Result<()> {
    if n_nodes == 0 {
        return Err(invalid("layer_size", "a layer has at least one node"));
    }
    Ok(())
}

/// Two-step distribution over a chain of `n_nodes` nodes.
///
/// Links are numbered from 0; link j joins nodes j and j+1. Links with even j
/// are generated first and transferred to the nuclear spins, links with odd j
/// then join neighbouring nuclear pairs through nuclear CNOTs.
pub fn simulate_layer_td<R: Rng + ?Sized>(
    n_nodes: usize,
    params: &NoiseParams,
    timing: &TimingModel,
    schedule: TdSchedule,
    rng: &mut R,
) -> Result<LayerLedger> {
    check_layer_size(n_nodes)?;
    let mut ledger = LayerLedger::empty(n_nodes);
    if n_nodes == 1 {
        return Ok(ledger);
    }
    if n_nodes % 2 == 1 {
        return Err(invalid("layer_size", "two-step linking needs an even number of nodes"));
    }
    let m = n_nodes - 1;
    let cycle = attempt_cycle_duration(timing);
    let h = timing.herald_latency();

    let mut ready = vec![0.0; m];
    for j in (0..m).step_by(2) {
        let k = sample_heralded_success(params.eta, rng)?;
        ready[j] = k as f64 * cycle + timing.transfer();
    }
    let step1 = (0..m).step_by(2).map(|j| ready[j]).fold(0.0, f64::max);

    let mut cnot_start = vec![0.0; m];
    let mut completion = step1;
    for j in (1..m).step_by(2) {
        let start = match schedule {
            TdSchedule::Sequential => step1,
            TdSchedule::Overlapped => 0.0,
        };
        let k = sample_heralded_success(params.eta, rng)?;
        ready[j] = start + k as f64 * cycle + timing.single_qubit_gate;
        cnot_start[j] = ready[j].max(ready[j - 1]).max(ready[j + 1]);
        let done = cnot_start[j] + timing.nuclear_cnot + timing.measurement + timing.single_qubit_gate;
        completion = completion.max(done);
        ledger.cnot_events.push(CnotEvent {
            site: j,
            kind: CnotKind::TwoStepEvenLink,
            p_e: params.p_e,
            p_n: params.p_n,
        });
    }

    for j in 0..m {
        let pair = if j % 2 == 0 {
            PairRecord::Transfer(TransferTimes {
                t_el: h,
                t_er: h,
                t_nl: if j > 0 { cnot_start[j - 1] - ready[j] } else { 0.0 },
                t_nr: if j + 1 < m { cnot_start[j + 1] - ready[j] } else { 0.0 },
            })
        } else {
            let wait = cnot_start[j] - ready[j];
            PairRecord::Electron(ElectronPairTimes {
                t_el: h,
                t_er: h,
                t2_el: wait,
                t2_er: wait,
            })
        };
        ledger.links.push(LinkRecord { ready: ready[j], pair });
    }

    for (i, chain) in ledger.custody.iter_mut().enumerate() {
        let start = if i == 0 {
            ready[0]
        } else if i == n_nodes - 1 {
            ready[m - 1]
        } else if i % 2 == 1 {
            cnot_start[i]
        } else {
            cnot_start[i - 1]
        };
        chain.push(Custody {
            start,
            end: completion,
            memory: MemoryKind::Nuclear,
        });
    }
    ledger.completion = completion;
    Ok(ledger)
}

/// Height of the merge tree over links [lo, hi), recording the height of
/// every merge node (indexed by node) in `levels`.
fn assign_levels(lo: usize, hi: usize, levels: &mut [usize]) -> usize {
    if hi - lo <= 1 {
        return 0;
    }
    let mid = lo + (hi - lo) / 2;
    let h = 1 + assign_levels(lo, mid, levels).max(assign_levels(mid, hi, levels));
    levels[mid] = h;
    h
}

/// Distribution levels of the merge nodes of an `n_nodes` chain (0 for the
/// two end nodes, which never merge).
pub fn merge_levels(n_nodes: usize) -> Vec<usize> {
    let mut levels = vec![0; n_nodes];
    if n_nodes > 1 {
        assign_levels(0, n_nodes - 1, &mut levels);
    }
    levels
}

/// Deterministic flag of every node under `placement`.
pub fn place_deterministic<R: Rng + ?Sized>(n_nodes: usize, placement: &Placement, rng: &mut R) -> Vec<bool> {
    let levels = merge_levels(n_nodes);
    levels
        .iter()
        .enumerate()
        .map(|(i, &lvl)| {
            let interior = i > 0 && i + 1 < n_nodes;
            match *placement {
                Placement::Random { p_d } => interior && rng.random::<f64>() < p_d,
                Placement::TopLayers { offset } => interior && lvl > offset,
            }
        })
        .collect()
}

struct TsRun<'a, R: Rng + ?Sized> {
    params: &'a NoiseParams,
    timing: &'a TimingModel,
    cycle: f64,
    deterministic: &'a [bool],
    ready: Vec<f64>,
    merge_start: Vec<f64>,
    failed: u64,
    rng: &'a mut R,
}

impl<R: Rng + ?Sized> TsRun<'_, R> {
    /// Builds the GHZ fragment over links [lo, hi) starting at `t0`, returning
    /// the time it is complete. A failed merge discards both fragments and
    /// regenerates every link of the segment.
    fn build(&mut self, lo: usize, hi: usize, t0: f64) -> Result<f64> {
        if hi - lo == 1 {
            let k = sample_heralded_success(self.params.eta, self.rng)?;
            self.ready[lo] = t0 + k as f64 * self.cycle + self.timing.single_qubit_gate;
            return Ok(self.ready[lo]);
        }
        let mid = lo + (hi - lo) / 2;
        let mut t = t0;
        loop {
            let a = self.build(lo, mid, t)?;
            let b = self.build(mid, hi, t)?;
            let start = a.max(b);
            if self.deterministic[mid] {
                self.merge_start[mid] = start;
                return Ok(start + self.timing.deterministic_merge());
            }
            let end = start + self.timing.photonic_merge();
            if self.rng.random::<f64>() < self.params.p_link {
                self.merge_start[mid] = start;
                return Ok(end);
            }
            self.failed += 1;
            t = end;
        }
    }
}

/// Binary-tree distribution over a chain of `n_nodes` nodes with electron
/// pairs on every link and photon-mediated or deterministic merges.
pub fn simulate_layer_ts<R: Rng + ?Sized>(
    n_nodes: usize,
    params: &NoiseParams,
    timing: &TimingModel,
    placement: &Placement,
    rng: &mut R,
) -> Result<LayerLedger> {
    check_layer_size(n_nodes)?;
    placement.validate()?;
    let mut ledger = LayerLedger::empty(n_nodes);
    if n_nodes == 1 {
        return Ok(ledger);
    }
    let deterministic = place_deterministic(n_nodes, placement, rng);
    let probabilistic_merges = (1..n_nodes - 1).any(|i| !deterministic[i]);
    if probabilistic_merges && params.p_link == 0.0 {
        return Err(invalid("p_link", "photon-mediated merges never succeed with p_link = 0"));
    }
    let m = n_nodes - 1;
    let mut run = TsRun {
        params,
        timing,
        cycle: attempt_cycle_duration(timing),
        deterministic: &deterministic,
        ready: vec![0.0; m],
        merge_start: vec![0.0; n_nodes],
        failed: 0,
        rng,
    };
    let completion = run.build(0, m, 0.0)?;
    let TsRun {
        ready,
        merge_start,
        failed,
        ..
    } = run;

    let h = timing.herald_latency();
    for j in 0..m {
        ledger.links.push(LinkRecord {
            ready: ready[j],
            pair: PairRecord::Electron(ElectronPairTimes {
                t_el: h,
                t_er: h,
                t2_el: if j > 0 { merge_start[j] - ready[j] } else { 0.0 },
                t2_er: if j + 1 < m { merge_start[j + 1] - ready[j] } else { 0.0 },
            }),
        });
    }
    for (i, chain) in ledger.custody.iter_mut().enumerate() {
        let (start, memory) = if i == 0 {
            (ready[0], MemoryKind::Electron)
        } else if i == m {
            (ready[m - 1], MemoryKind::Electron)
        } else if deterministic[i] {
            (merge_start[i], MemoryKind::Nuclear)
        } else {
            (merge_start[i], MemoryKind::Electron)
        };
        chain.push(Custody {
            start,
            end: completion,
            memory,
        });
    }
    for (i, &det) in deterministic.iter().enumerate() {
        if det {
            ledger.cnot_events.push(CnotEvent {
                site: i,
                kind: CnotKind::TsDeterministic,
                p_e: params.p_e,
                p_n: params.p_n,
            });
        }
    }
    ledger.n_deterministic = ledger.cnot_events.len();
    ledger.failed_merges = failed;
    ledger.completion = completion;
    Ok(ledger)
}

/// Everything that defines one QRAM run apart from its seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub protocol: Protocol,
    pub n_layers: usize,
    pub params: NoiseParams,
    pub timing: TimingModel,
    pub placement: Placement,
    pub extend_with_qc_link: bool,
    pub td_schedule: TdSchedule,
}

impl SimConfig {
    pub fn new(protocol: Protocol, n_layers: usize, params: NoiseParams) -> Self {
        SimConfig {
            protocol,
            n_layers,
            params,
            timing: TimingModel::default(),
            placement: Placement::default(),
            extend_with_qc_link: true,
            td_schedule: TdSchedule::Sequential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_LAYERS).contains(&self.n_layers) {
            return Err(invalid("n_layers", format!("{} is not in 1..={MAX_LAYERS}", self.n_layers)));
        }
        self.params.validate()?;
        self.timing.validate()?;
        self.placement.validate()?;
        if self.params.eta == 0.0 {
            return Err(invalid("eta", "pair generation never succeeds with eta = 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerRun {
    /// 1-based layer index.
    pub layer: usize,
    pub ledger: LayerLedger,
    pub chain: LinkChain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QramRunResult {
    pub n_layers: usize,
    pub seed: u64,
    pub layers: Vec<LayerRun>,
    pub query_time: f64,
}

/// Simulates every layer k = 1..=n_layers (2^(k-1) nodes) from one seeded
/// stream, consumed in layer order. All layers start at t = 0.
pub fn simulate_qram(cfg: &SimConfig, seed: u64) -> Result<QramRunResult> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(cfg.n_layers);
    let mut query_time = 0.0f64;
    for layer in 1..=cfg.n_layers {
        let n_nodes = 1usize << (layer - 1);
        let mut ledger = match cfg.protocol {
            Protocol::Td => simulate_layer_td(n_nodes, &cfg.params, &cfg.timing, cfg.td_schedule, &mut rng)?,
            Protocol::Ts => simulate_layer_ts(n_nodes, &cfg.params, &cfg.timing, &cfg.placement, &mut rng)?,
        };
        if cfg.extend_with_qc_link {
            ledger.extend_with_qc_link(&cfg.params, &cfg.timing, &mut rng)?;
        }
        query_time = query_time.max(ledger.completion);
        let chain = ledger.to_chain(&cfg.params)?;
        layers.push(LayerRun { layer, ledger, chain });
    }
    Ok(QramRunResult {
        n_layers: cfg.n_layers,
        seed,
        layers,
        query_time,
    })
}
