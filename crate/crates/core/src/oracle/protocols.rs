//! Full density-matrix runs of the pair-creation and linking protocols.

use serde::{Deserialize, Serialize};

use super::state::{Basis, DenseState, Gate, DEFAULT_QUBIT_CAP};
use crate::analytics::{ElectronPairTimes, IdleInterval, QubitDecay, TransferTimes};
use crate::error::{Error, Result};
use crate::noise::{cnot_error_channel, kraus_set, ChannelKind, NoiseParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkMode {
    TwoStep,
    TsProbabilistic,
    TsDeterministic,
}

/// A density matrix whose qubits carry stable labels, so qubits can be
/// appended and traced out without renumbering call sites.
struct Register {
    state: DenseState,
    labels: Vec<usize>,
    next: usize,
    cap: usize,
}

impl Register {
    fn new(cap: usize) -> Self {
        Register {
            state: DenseState::zero(0).expect("empty register"),
            labels: Vec::new(),
            next: 0,
            cap,
        }
    }

    /// Appends `s`, returning the labels of its qubits.
    fn push(&mut self, s: &DenseState) -> Result<Vec<usize>> {
        self.state = self.state.tensor(s, self.cap)?;
        let new: Vec<usize> = (self.next..self.next + s.n_qubits()).collect();
        self.next += s.n_qubits();
        self.labels.extend(&new);
        Ok(new)
    }

    fn pos(&self, label: usize) -> usize {
        self.labels
            .iter()
            .position(|&l| l == label)
            .expect("label is live")
    }

    fn gate(&mut self, g: Gate, qs: &[usize]) -> Result<()> {
        let pos: Vec<usize> = qs.iter().map(|&q| self.pos(q)).collect();
        self.state.apply_gate_mut(g, &pos)
    }

    fn cnot_noise(&mut self, p: f64, qs: &[usize]) -> Result<()> {
        if p == 0.0 {
            return Ok(());
        }
        let k = cnot_error_channel(p)?;
        for &q in qs {
            let pos = self.pos(q);
            self.state.apply_channel_mut(&k, pos)?;
        }
        Ok(())
    }

    fn idle(&mut self, q: usize, dt: f64, t1: f64, t2: f64) -> Result<()> {
        self.decay(q, QubitDecay::from_time(dt, t1, t2)?)
    }

    /// Dephasing with Kraus weight ε⁽²⁾/2, then damping with ε⁽¹⁾.
    fn decay(&mut self, q: usize, d: QubitDecay) -> Result<()> {
        let pos = self.pos(q);
        if d.deph > 0.0 {
            self.state.apply_channel_mut(&kraus_set(ChannelKind::Dephasing, d.deph / 2.0)?, pos)?;
        }
        if d.damp > 0.0 {
            self.state.apply_channel_mut(&kraus_set(ChannelKind::Damping, d.damp)?, pos)?;
        }
        Ok(())
    }

    fn measure(&mut self, q: usize, basis: Basis, corrections: &[(usize, Gate)]) -> Result<()> {
        let pos = self.pos(q);
        let corr: Vec<_> = corrections.iter().map(|&(c, g)| (self.pos(c), g)).collect();
        self.state.measure_and_correct(pos, basis, &corr)
    }

    fn parity(&mut self, a: usize, b: usize, corrections: &[(usize, Gate)]) -> Result<()> {
        let (pa, pb) = (self.pos(a), self.pos(b));
        let corr: Vec<_> = corrections.iter().map(|&(c, g)| (self.pos(c), g)).collect();
        self.state.parity_check_and_correct(pa, pb, &corr)
    }

    /// Randomized correction over `qs`: (ρ + X_F ρ X_F)/2.
    fn randomize(&mut self, qs: &[usize]) -> Result<()> {
        let mut flipped = self.state.clone();
        for &q in qs {
            flipped.apply_gate_mut(Gate::X, &[self.pos(q)])?;
        }
        self.state = self.state.average(&flipped);
        Ok(())
    }

    fn discard(&mut self, q: usize) -> Result<()> {
        let pos = self.pos(q);
        self.state = self.state.trace_out(pos)?;
        self.labels.remove(pos);
        Ok(())
    }

    fn finish(self, order: &[usize]) -> Result<DenseState> {
        debug_assert_eq!(self.labels, order);
        Ok(self.state)
    }
}

fn flips(qs: &[usize]) -> Vec<(usize, Gate)> {
    qs.iter().map(|&q| (q, Gate::X)).collect()
}

/// Transfer block: electron Bell pair, electron idling, electronic CNOTs onto
/// the nuclear spins, X measurement of the electrons with correction, then
/// nuclear idling. Returns the symmetrized nuclear pair.
pub fn run_transfer_block_oracle(params: &NoiseParams, times: &TransferTimes) -> Result<DenseState> {
    params.validate()?;
    let (e1, e2, n1, n2) = (params.t1_e, params.t2_e, params.t1_n, params.t2_n);
    run_transfer_block_oracle_decays(
        [
            QubitDecay::from_time(times.t_el, e1, e2)?,
            QubitDecay::from_time(times.t_er, e1, e2)?,
            QubitDecay::from_time(times.t_nl, n1, n2)?,
            QubitDecay::from_time(times.t_nr, n1, n2)?,
        ],
        params.p_e,
    )
}

/// Transfer block driven by the decays of (eL, eR, nL, nR).
pub fn run_transfer_block_oracle_decays(d: [QubitDecay; 4], p_e: f64) -> Result<DenseState> {
    let mut r = Register::new(DEFAULT_QUBIT_CAP);
    // eL, eR then nL, nR
    let e = r.push(&DenseState::bell())?;
    let n = r.push(&DenseState::zero(2)?)?;
    let (el, er, nl, nr) = (e[0], e[1], n[0], n[1]);
    r.decay(el, d[0])?;
    r.decay(er, d[1])?;
    for (c, t) in [(el, nl), (er, nr)] {
        r.gate(Gate::Cnot, &[c, t])?;
        r.cnot_noise(p_e, &[c, t])?;
    }
    r.measure(el, Basis::X, &[(nl, Gate::Z)])?;
    r.measure(er, Basis::X, &[(nr, Gate::Z)])?;
    r.discard(el)?;
    r.discard(er)?;
    r.randomize(&[nl, nr])?;
    r.decay(nl, d[2])?;
    r.decay(nr, d[3])?;
    r.randomize(&[nl, nr])?;
    r.finish(&[nl, nr])
}

/// Electron Bell pair idling before and after its herald correction.
pub fn run_electron_pair_oracle(params: &NoiseParams, times: &ElectronPairTimes) -> Result<DenseState> {
    params.validate()?;
    let (t1, t2) = (params.t1_e, params.t2_e);
    run_electron_pair_oracle_decays([
        QubitDecay::from_time(times.t_el, t1, t2)?,
        QubitDecay::from_time(times.t_er, t1, t2)?,
        QubitDecay::from_time(times.t2_el, t1, t2)?,
        QubitDecay::from_time(times.t2_er, t1, t2)?,
    ])
}

/// Electron pair driven by the decays of (eL, eR) before and after the
/// herald correction.
pub fn run_electron_pair_oracle_decays(d: [QubitDecay; 4]) -> Result<DenseState> {
    let mut r = Register::new(DEFAULT_QUBIT_CAP);
    let q = r.push(&DenseState::bell())?;
    r.decay(q[0], d[0])?;
    r.decay(q[1], d[1])?;
    r.randomize(&q)?;
    r.decay(q[0], d[2])?;
    r.decay(q[1], d[3])?;
    r.randomize(&q)?;
    r.finish(&q)
}

/// Links `pairs` into one GHZ state with the given protocol, then applies
/// `final_idle[j]` to the j-th qubit of the result.
///
/// For `TwoStep` the pairs alternate nuclear (even index) and electron (odd
/// index) links and there must be an odd number of them; the electron pairs
/// are consumed. For the TS modes every pair is an electron pair.
pub fn run_link_oracle(
    pairs: &[DenseState],
    mode: LinkMode,
    params: &NoiseParams,
    final_idle: &[Vec<IdleInterval>],
) -> Result<DenseState> {
    run_link_oracle_with_cap(pairs, mode, params, final_idle, DEFAULT_QUBIT_CAP)
}

pub fn run_link_oracle_with_cap(
    pairs: &[DenseState],
    mode: LinkMode,
    params: &NoiseParams,
    final_idle: &[Vec<IdleInterval>],
    cap: usize,
) -> Result<DenseState> {
    params.validate()?;
    if pairs.is_empty() {
        return Err(Error::MalformedChain("no pairs to link".into()));
    }
    if pairs.iter().any(|p| p.n_qubits() != 2) {
        return Err(Error::MalformedChain("every pair must be a 2-qubit state".into()));
    }
    if mode == LinkMode::TwoStep && pairs.len() % 2 == 0 {
        return Err(Error::MalformedChain(
            "two-step linking needs an odd number of alternating pairs".into(),
        ));
    }
    let mut r = Register::new(cap);
    // chain: labels of the merged fragment, left to right
    let mut chain = r.push(&pairs[0])?;
    let mut k = 1;
    while k < pairs.len() {
        match mode {
            LinkMode::TwoStep => {
                let e = r.push(&pairs[k])?;
                let right = r.push(&pairs[k + 1])?;
                let (nl, el, er, nr) = (*chain.last().expect("non-empty"), e[0], e[1], right[0]);
                r.gate(Gate::Cnot, &[nl, el])?;
                r.gate(Gate::Cnot, &[nr, er])?;
                r.cnot_noise(params.p_n, &[nl, el, nr, er])?;
                r.measure(el, Basis::Z, &flips(&right))?;
                r.measure(er, Basis::Z, &flips(&right))?;
                r.discard(el)?;
                r.discard(er)?;
                chain.extend(&right);
                r.randomize(&chain)?;
                k += 2;
            }
            LinkMode::TsProbabilistic => {
                let right = r.push(&pairs[k])?;
                let (el, er) = (*chain.last().expect("non-empty"), right[0]);
                r.parity(el, er, &flips(&right))?;
                r.measure(er, Basis::X, &[(el, Gate::Z)])?;
                r.discard(er)?;
                chain.extend(&right[1..]);
                r.randomize(&chain)?;
                k += 1;
            }
            LinkMode::TsDeterministic => {
                let right = r.push(&pairs[k])?;
                let n = r.push(&DenseState::zero(1)?)?[0];
                let (el, er) = (chain.pop().expect("non-empty"), right[0]);
                r.gate(Gate::Cnot, &[el, n])?;
                r.cnot_noise(params.p_e, &[el, n])?;
                r.measure(el, Basis::X, &[(n, Gate::Z)])?;
                r.discard(el)?;
                r.gate(Gate::Cnot, &[n, er])?;
                r.cnot_noise(params.p_n, &[n, er])?;
                r.measure(er, Basis::Z, &flips(&right[1..]))?;
                r.discard(er)?;
                chain.push(n);
                chain.extend(&right[1..]);
                // restore chain order in the register: n was appended last
                r.move_to_chain_order(&chain)?;
                r.randomize(&chain)?;
                k += 1;
            }
        }
    }
    if final_idle.len() != chain.len() {
        return Err(Error::LengthMismatch {
            what: "final idle records",
            expected: chain.len(),
            actual: final_idle.len(),
        });
    }
    for (&q, intervals) in chain.iter().zip(final_idle) {
        for iv in intervals {
            r.idle(q, iv.duration, iv.t1, iv.t2)?;
        }
    }
    r.finish(&chain)
}

impl Register {
    /// Permutes qubits so that the register order equals `order`.
    fn move_to_chain_order(&mut self, order: &[usize]) -> Result<()> {
        if self.labels == order {
            return Ok(());
        }
        let perm: Vec<usize> = order.iter().map(|&l| self.pos(l)).collect();
        self.state = self.state.permute_qubits(&perm)?;
        self.labels = order.to_vec();
        Ok(())
    }
}
