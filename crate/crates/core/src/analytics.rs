//! Closed-form reconstruction of the GHZ corner entries of a layer.
//!
//! Corner values are entries of 2ρ: a perfect GHZ state has `rho00 = rho11 = rho01 = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::noise::{eps, eps_bar, f_factor, g_factor, h_factor, h_tilde_factor, NoiseParams};

/// A Bell pair of the form
/// ½[[1-μ,0,0,ν],[0,μ,0,0],[0,0,μ,0],[ν,0,0,1-μ]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    pub mu: f64,
    pub nu: f64,
}

impl PairParams {
    pub const PERFECT: PairParams = PairParams { mu: 0.0, nu: 1.0 };

    pub fn is_physical(&self) -> bool {
        (0.0..=1.0).contains(&self.mu) && self.nu.abs() <= 1.0 - self.mu + 1e-12
    }
}

/// Idle durations (seconds) of the four qubits of a transfer block: the
/// electrons before the transfer and the nuclear spins after it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TransferTimes {
    pub t_el: f64,
    pub t_er: f64,
    pub t_nl: f64,
    pub t_nr: f64,
}

/// Idle durations of an electron-only pair: before (`t_el`, `t_er`) and after
/// (`t2_el`, `t2_er`) the herald correction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ElectronPairTimes {
    pub t_el: f64,
    pub t_er: f64,
    pub t2_el: f64,
    pub t2_er: f64,
}

/// Decay probabilities of one qubit over an idle window: ε⁽¹⁾ from damping
/// and ε⁽²⁾ from dephasing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QubitDecay {
    pub damp: f64,
    pub deph: f64,
}

impl QubitDecay {
    pub fn from_time(dt: f64, t1: f64, t2: f64) -> Result<Self> {
        Ok(QubitDecay {
            damp: eps(dt, t1)?,
            deph: eps(dt, t2)?,
        })
    }

    fn bar1(&self) -> f64 {
        1.0 - self.damp
    }

    fn bar2(&self) -> f64 {
        1.0 - self.deph
    }
}

/// Nuclear pair produced by the transfer block.
pub fn pair_after_transfer(t: &TransferTimes, params: &NoiseParams) -> Result<PairParams> {
    params.validate()?;
    let (e1, e2, n1, n2) = (params.t1_e, params.t2_e, params.t1_n, params.t2_n);
    Ok(pair_after_transfer_decays(
        [
            QubitDecay::from_time(t.t_el, e1, e2)?,
            QubitDecay::from_time(t.t_er, e1, e2)?,
            QubitDecay::from_time(t.t_nl, n1, n2)?,
            QubitDecay::from_time(t.t_nr, n1, n2)?,
        ],
        params.p_e,
    ))
}

/// Transfer pair from the decays of (eL, eR, nL, nR).
pub fn pair_after_transfer_decays(d: [QubitDecay; 4], p_e: f64) -> PairParams {
    let [el, er, nl, nr] = d;
    let q = 1.0 - p_e;
    let mu = (1.0 - f_factor(el.damp, er.damp) * q * q * g_factor(nl.damp, nr.damp) - nl.damp * nr.damp) / 2.0;
    let nu = el.bar2() * er.bar2() * nl.bar2() * nr.bar2() * (el.bar1() * er.bar1() * nl.bar1() * nr.bar1()).sqrt()
        * q.powi(4);
    PairParams { mu, nu }
}

/// Pair kept in electron memories, without any transfer.
pub fn pair_electron_only(t: &ElectronPairTimes, params: &NoiseParams) -> Result<PairParams> {
    params.validate()?;
    let (t1, t2) = (params.t1_e, params.t2_e);
    Ok(pair_electron_only_decays([
        QubitDecay::from_time(t.t_el, t1, t2)?,
        QubitDecay::from_time(t.t_er, t1, t2)?,
        QubitDecay::from_time(t.t2_el, t1, t2)?,
        QubitDecay::from_time(t.t2_er, t1, t2)?,
    ]))
}

/// Electron pair from the decays of (eL, eR) before and (eL, eR) after the
/// herald correction.
///
/// The ε'ε' term carries the sign of the reference formula; the exact value
/// (see `oracle::run_electron_pair_oracle`) has the opposite sign. The two
/// differ at second order only.
pub fn pair_electron_only_decays(d: [QubitDecay; 4]) -> PairParams {
    let [el, er, el2, er2] = d;
    let mu = (1.0 - f_factor(el.damp, er.damp) * g_factor(el2.damp, er2.damp) + el2.damp * er2.damp) / 2.0;
    let nu = el.bar2() * er.bar2() * el2.bar2() * er2.bar2() * (el.bar1() * er.bar1() * el2.bar1() * er2.bar1()).sqrt();
    PairParams { mu, nu }
}

/// Corner entries of a layer GHZ state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzCorner {
    pub n_qubits: usize,
    pub rho00: f64,
    pub rho11: f64,
    pub rho01: f64,
    /// Product of the CNOT diagonal factors applied so far; scales the
    /// damping feed-in terms so that CNOT noise and final decoherence commute.
    pub diag_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CnotKind {
    /// Two nuclear CNOTs across one even link of the two-step protocol.
    /// `site` is the link index.
    TwoStepEvenLink,
    /// Electronic then nuclear CNOT at a deterministic node. `site` is the
    /// node (qubit) index.
    TsDeterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CnotEvent {
    pub site: usize,
    pub kind: CnotKind,
    pub p_e: f64,
    pub p_n: f64,
}

impl CnotEvent {
    /// (diagonal factor, off-diagonal factor).
    pub fn factors(&self) -> (f64, f64) {
        match self.kind {
            CnotKind::TwoStepEvenLink => {
                let p = self.p_n;
                let q = 1.0 - p;
                (h_factor(p), q * q * (1.0 - p + p * p / 2.0))
            }
            CnotKind::TsDeterministic => {
                let (pe, pn) = (self.p_e, self.p_n);
                (deterministic_diag_factor(pe, pn), (1.0 - pe).powi(2) * (1.0 - pn) * (1.0 - pn / 2.0))
            }
        }
    }
}

/// Diagonal factor of a deterministic node with distinct electronic and
/// nuclear errors; equals h̃(p) when both are p.
pub fn deterministic_diag_factor(p_e: f64, p_n: f64) -> f64 {
    if p_e == p_n {
        return h_tilde_factor(p_e);
    }
    (1.0 - p_e / 2.0) * (1.0 - p_n) + p_e * p_n / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdleInterval {
    pub duration: f64,
    pub t1: f64,
    pub t2: f64,
}

/// Everything needed to evaluate one layer: the pairs along the chain, the
/// noisy CNOTs used to link them and the idle time of each final qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkChain {
    pub pairs: Vec<PairParams>,
    pub cnot_events: Vec<CnotEvent>,
    pub final_idle: Vec<Vec<IdleInterval>>,
}

impl LinkChain {
    /// A single qubit: nothing to link.
    pub fn single() -> Self {
        LinkChain {
            pairs: Vec::new(),
            cnot_events: Vec::new(),
            final_idle: vec![Vec::new()],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.pairs.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        if self.final_idle.len() != n {
            return Err(Error::LengthMismatch {
                what: "final idle records",
                expected: n,
                actual: self.final_idle.len(),
            });
        }
        for ev in &self.cnot_events {
            let ok = match ev.kind {
                CnotKind::TwoStepEvenLink => ev.site < self.pairs.len(),
                CnotKind::TsDeterministic => ev.site > 0 && ev.site + 1 < n,
            };
            if !ok {
                return Err(Error::MalformedChain(format!(
                    "{:?} event at site {} in a {n}-qubit chain",
                    ev.kind, ev.site
                )));
            }
        }
        Ok(())
    }

    /// Accumulated (ε̄⁽¹⁾, ε̄⁽²⁾) of qubit j over its final idle intervals.
    pub fn final_decay(&self, j: usize) -> Result<(f64, f64)> {
        let intervals = self
            .final_idle
            .get(j)
            .ok_or_else(|| invalid("final_idle", format!("no idle data for qubit {j}")))?;
        let mut bar1 = 1.0;
        let mut bar2 = 1.0;
        for iv in intervals {
            bar1 *= eps_bar(iv.duration, iv.t1)?;
            bar2 *= eps_bar(iv.duration, iv.t2)?;
        }
        Ok((bar1, bar2))
    }

    /// Largest single-qubit decay probability over the final idle windows.
    pub fn max_final_eps(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for j in 0..self.n_qubits() {
            let (b1, b2) = self.final_decay(j)?;
            worst = worst.max(1.0 - b1).max(1.0 - b2);
        }
        Ok(worst)
    }
}

/// θ-rule: product over links of (1-μ_j) where the bits on both ends agree,
/// μ_j where they differ. Bit i (from the right) is chain qubit i; link j joins
/// qubits j and j+1.
pub fn diag_entry(pairs: &[PairParams], n_qubits: usize, bits: u64) -> Result<f64> {
    if pairs.len() + 1 != n_qubits {
        return Err(Error::LengthMismatch {
            what: "pairs",
            expected: n_qubits.saturating_sub(1),
            actual: pairs.len(),
        });
    }
    if n_qubits > 64 {
        return Err(invalid("n_qubits", "bitstrings are limited to 64 qubits"));
    }
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let same = (bits >> j & 1) == (bits >> (j + 1) & 1);
            if same {
                1.0 - p.mu
            } else {
                p.mu
            }
        })
        .product())
}

/// diag_entry with only qubit j flipped, for every j, in O(n).
pub fn neighbor_entries(pairs: &[PairParams]) -> Vec<f64> {
    let m = pairs.len();
    let mut prefix = vec![1.0; m + 1];
    for j in 0..m {
        prefix[j + 1] = prefix[j] * (1.0 - pairs[j].mu);
    }
    let mut suffix = vec![1.0; m + 1];
    for j in (0..m).rev() {
        suffix[j] = suffix[j + 1] * (1.0 - pairs[j].mu);
    }
    (0..=m)
        .map(|q| {
            // qubit q touches links q-1 and q
            let left = if q > 0 { prefix[q - 1] * pairs[q - 1].mu } else { 1.0 };
            let right = if q < m { pairs[q].mu * suffix[q + 1] } else { 1.0 };
            left * right
        })
        .collect()
}

pub fn link_noiseless(pairs: &[PairParams]) -> GhzCorner {
    let diag: f64 = pairs.iter().map(|p| 1.0 - p.mu).product();
    GhzCorner {
        n_qubits: pairs.len() + 1,
        rho00: diag,
        rho11: diag,
        rho01: pairs.iter().map(|p| p.nu).product(),
        diag_scale: 1.0,
    }
}

pub fn apply_cnot_noise(corner: &GhzCorner, chain: &LinkChain) -> GhzCorner {
    let mut out = *corner;
    for ev in &chain.cnot_events {
        let (d, o) = ev.factors();
        out.rho00 *= d;
        out.rho11 *= d;
        out.rho01 *= o;
        out.diag_scale *= d;
    }
    out
}

pub fn apply_final_decoherence(corner: &GhzCorner, chain: &LinkChain) -> Result<GhzCorner> {
    let n = chain.n_qubits();
    if chain.final_idle.len() != n {
        return Err(Error::LengthMismatch {
            what: "final idle records",
            expected: n,
            actual: chain.final_idle.len(),
        });
    }
    let neighbors = neighbor_entries(&chain.pairs);
    let mut out = *corner;
    let mut feed = 0.0;
    for (j, nb) in neighbors.iter().enumerate() {
        let (bar1, bar2) = chain.final_decay(j)?;
        out.rho01 *= bar2 * bar1.sqrt();
        out.rho11 *= bar1;
        feed += (1.0 - bar1) * nb;
    }
    out.rho00 += feed * corner.diag_scale;
    Ok(out)
}

pub fn ghz_fidelity(corner: &GhzCorner) -> f64 {
    (corner.rho00 + corner.rho11 + 2.0 * corner.rho01) / 4.0
}

/// Full pipeline for one chain.
pub fn chain_corner(chain: &LinkChain) -> Result<GhzCorner> {
    chain.validate()?;
    let c = link_noiseless(&chain.pairs);
    let c = apply_cnot_noise(&c, chain);
    apply_final_decoherence(&c, chain)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityWarning {
    pub n_qubits: usize,
    pub max_eps: f64,
}

impl std::fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "first-order expansion unreliable: {} qubits x eps {:.3e} = {:.3} > 1",
            self.n_qubits,
            self.max_eps,
            self.n_qubits as f64 * self.max_eps
        )
    }
}

/// Warns when N·ε exceeds 1 (N·ε = 1 is still accepted).
pub fn validity_warning(n_qubits: usize, max_eps: f64) -> Option<ValidityWarning> {
    (n_qubits as f64 * max_eps > 1.0).then_some(ValidityWarning { n_qubits, max_eps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params() -> NoiseParams {
        NoiseParams::from_electron_times(2.0, 0.1, 0.0, 1.0).unwrap()
    }

    fn chain(pairs: Vec<PairParams>) -> LinkChain {
        let n = pairs.len() + 1;
        LinkChain {
            pairs,
            cnot_events: Vec::new(),
            final_idle: vec![Vec::new(); n],
        }
    }

    #[test]
    fn transfer_pair_examples() {
        let p = params();
        assert_eq!(pair_after_transfer(&TransferTimes::default(), &p).unwrap(), PairParams::PERFECT);

        let mut noisy = p;
        noisy.p_e = 0.01;
        let pp = pair_after_transfer(&TransferTimes::default(), &noisy).unwrap();
        assert_abs_diff_eq!(pp.mu, 0.00995, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.nu, 0.96059601, epsilon = 1e-15);

        let mut deph = NoiseParams::noiseless(1.0);
        deph.t2_e = 0.1;
        let t = TransferTimes {
            t_el: 0.1 * 2f64.ln(),
            ..Default::default()
        };
        let pp = pair_after_transfer(&t, &deph).unwrap();
        assert_abs_diff_eq!(pp.mu, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.nu, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn electron_pair_examples() {
        let p = params();
        assert_eq!(pair_electron_only(&ElectronPairTimes::default(), &p).unwrap(), PairParams::PERFECT);

        let mut deph = NoiseParams::noiseless(1.0);
        deph.t2_e = 0.1;
        let t = ElectronPairTimes {
            t_el: 0.1,
            ..Default::default()
        };
        let pp = pair_electron_only(&t, &deph).unwrap();
        assert_abs_diff_eq!(pp.mu, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pp.nu, (-1.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn diag_entry_examples() {
        let pairs = [
            PairParams { mu: 0.1, nu: 0.8 },
            PairParams { mu: 0.2, nu: 0.7 },
            PairParams { mu: 0.3, nu: 0.6 },
        ];
        assert_abs_diff_eq!(diag_entry(&pairs, 4, 0).unwrap(), 0.9 * 0.8 * 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(diag_entry(&pairs, 4, 0b0001).unwrap(), 0.1 * 0.8 * 0.7, epsilon = 1e-15);
        let perfect = [PairParams::PERFECT; 3];
        for bits in 1..15u64 {
            assert_eq!(diag_entry(&perfect, 4, bits).unwrap(), 0.0);
        }
        assert!(diag_entry(&pairs, 5, 0).is_err());
    }

    #[test]
    fn theta_rule_sums_to_two() {
        let mus = [0.01, 0.2, 0.05, 0.3];
        for n in 2..=5usize {
            let pairs: Vec<_> = mus[..n - 1].iter().map(|&mu| PairParams { mu, nu: 0.5 }).collect();
            let total: f64 = (0..1u64 << n).map(|b| diag_entry(&pairs, n, b).unwrap()).sum();
            assert_abs_diff_eq!(total, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn neighbor_entries_match_bitstrings() {
        let pairs: Vec<_> = [0.1, 0.2, 0.3, 0.05].iter().map(|&mu| PairParams { mu, nu: 0.5 }).collect();
        let nb = neighbor_entries(&pairs);
        for (q, v) in nb.iter().enumerate() {
            assert_abs_diff_eq!(*v, diag_entry(&pairs, 5, 1 << q).unwrap(), epsilon = 1e-15);
        }
    }

    #[test]
    fn link_noiseless_examples() {
        let c = link_noiseless(&[PairParams::PERFECT; 5]);
        assert_eq!((c.rho00, c.rho11, c.rho01), (1.0, 1.0, 1.0));
        assert_eq!(ghz_fidelity(&c), 1.0);

        let c = link_noiseless(&[PairParams { mu: 0.01, nu: 0.96 }; 3]);
        assert_abs_diff_eq!(c.rho00, 0.970299, epsilon = 1e-12);
        assert_abs_diff_eq!(c.rho01, 0.884736, epsilon = 1e-12);
        assert_abs_diff_eq!(ghz_fidelity(&c), 0.927517, epsilon = 1e-6);

        let one = PairParams { mu: 0.1, nu: 0.7 };
        let c = link_noiseless(&[one]);
        assert_abs_diff_eq!(c.rho00, 0.9, epsilon = 1e-15);
        assert_eq!(c.rho01, 0.7);
    }

    #[test]
    fn cnot_noise_examples() {
        let mut ch = chain(vec![PairParams::PERFECT; 3]);
        let base = link_noiseless(&ch.pairs);
        assert_eq!(apply_cnot_noise(&base, &ch), base);

        ch.cnot_events.push(CnotEvent {
            site: 1,
            kind: CnotKind::TwoStepEvenLink,
            p_e: 0.01,
            p_n: 0.01,
        });
        let c = apply_cnot_noise(&base, &ch);
        assert_abs_diff_eq!(c.rho00, h_factor(0.01), epsilon = 1e-15);

        let mut ch = chain(vec![PairParams::PERFECT; 2]);
        ch.cnot_events.push(CnotEvent {
            site: 1,
            kind: CnotKind::TsDeterministic,
            p_e: 0.01,
            p_n: 0.01,
        });
        let c = apply_cnot_noise(&link_noiseless(&ch.pairs), &ch);
        assert_abs_diff_eq!(c.rho01, 0.99f64.powi(3) * 0.995, epsilon = 1e-15);
        assert_abs_diff_eq!(c.rho01, 0.965447505, epsilon = 1e-12);
        assert_abs_diff_eq!(c.rho00, h_tilde_factor(0.01), epsilon = 1e-15);
    }

    #[test]
    fn deterministic_factor_reduces_to_h_tilde() {
        for p in [0.0, 1e-4, 0.01, 0.3] {
            assert_abs_diff_eq!(
                (1.0 - p / 2.0) * (1.0 - p) + p * p / 4.0,
                h_tilde_factor(p),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn final_decoherence_two_step_display() {
        let mus = [0.02, 0.03, 0.04];
        let pairs: Vec<_> = mus.iter().map(|&mu| PairParams { mu, nu: 0.9 }).collect();
        let mut ch = chain(pairs);
        ch.cnot_events.push(CnotEvent {
            site: 1,
            kind: CnotKind::TwoStepEvenLink,
            p_e: 0.0,
            p_n: 0.01,
        });
        let (t1, t2) = (1.0, f64::INFINITY);
        let (a, b) = (0.05, 0.08);
        ch.final_idle[0] = vec![IdleInterval { duration: -(1.0f64 - a).ln(), t1, t2 }];
        ch.final_idle[3] = vec![IdleInterval { duration: -(1.0f64 - b).ln(), t1, t2 }];
        let c = chain_corner(&ch).unwrap();
        let m = |i: usize| mus[i];
        let mb = |i: usize| 1.0 - mus[i];
        let expect = h_factor(0.01) * (mb(0) * mb(1) * mb(2) + a * m(0) * mb(1) * mb(2) + b * mb(0) * mb(1) * m(2));
        assert_abs_diff_eq!(c.rho00, expect, epsilon = 1e-14);
        assert_abs_diff_eq!(c.rho11, h_factor(0.01) * mb(0) * mb(1) * mb(2) * (1.0 - a) * (1.0 - b), epsilon = 1e-14);
    }

    #[test]
    fn final_decoherence_probabilistic_display() {
        let ch = LinkChain {
            pairs: vec![PairParams { mu: 0.02, nu: 0.9 }, PairParams { mu: 0.03, nu: 0.9 }],
            cnot_events: Vec::new(),
            final_idle: vec![
                Vec::new(),
                vec![IdleInterval {
                    duration: 0.01,
                    t1: 0.5,
                    t2: 0.2,
                }],
                Vec::new(),
            ],
        };
        let c = chain_corner(&ch).unwrap();
        let e = 1.0 - (-0.02f64).exp();
        assert_abs_diff_eq!(c.rho00, 0.98 * 0.97 + e * 0.02 * 0.03, epsilon = 1e-15);
        assert_abs_diff_eq!(c.rho01, 0.81 * (-0.05f64).exp() * (-0.01f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn orders_commute() {
        let pairs: Vec<_> = [0.02, 0.01, 0.05].iter().map(|&mu| PairParams { mu, nu: 0.9 }).collect();
        let mut ch = chain(pairs);
        ch.cnot_events.push(CnotEvent {
            site: 1,
            kind: CnotKind::TwoStepEvenLink,
            p_e: 0.0,
            p_n: 0.02,
        });
        for j in 0..4 {
            ch.final_idle[j] = vec![IdleInterval {
                duration: 0.01 * (j + 1) as f64,
                t1: 0.3,
                t2: 0.2,
            }];
        }
        let base = link_noiseless(&ch.pairs);
        let a = apply_final_decoherence(&apply_cnot_noise(&base, &ch), &ch).unwrap();
        let b = apply_cnot_noise(&apply_final_decoherence(&base, &ch).unwrap(), &ch);
        assert_abs_diff_eq!(a.rho00, b.rho00, epsilon = 1e-12);
        assert_abs_diff_eq!(a.rho11, b.rho11, epsilon = 1e-12);
        assert_abs_diff_eq!(a.rho01, b.rho01, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_and_validity_examples() {
        let c = GhzCorner {
            n_qubits: 3,
            rho00: 1.0,
            rho11: 1.0,
            rho01: 0.0,
            diag_scale: 1.0,
        };
        assert_eq!(ghz_fidelity(&c), 0.5);
        assert!(validity_warning(4096, 1e-4).is_none());
        assert!(validity_warning(10, 0.5).is_some());
        assert!(validity_warning(4, 0.25).is_none());
    }

    #[test]
    fn chain_validation() {
        let mut ch = chain(vec![PairParams::PERFECT; 2]);
        ch.final_idle.pop();
        assert!(chain_corner(&ch).is_err());
        let mut ch = chain(vec![PairParams::PERFECT; 2]);
        ch.cnot_events.push(CnotEvent {
            site: 2,
            kind: CnotKind::TsDeterministic,
            p_e: 0.0,
            p_n: 0.0,
        });
        assert!(ch.validate().is_err());
    }
}
