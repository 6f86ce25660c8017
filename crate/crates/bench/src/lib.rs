//! Shared inputs for the benchmarks.

use qramnet::analytics::{CnotEvent, CnotKind, IdleInterval, LinkChain, PairParams};
use qramnet::NoiseParams;

pub fn standard_params() -> NoiseParams {
    NoiseParams::from_electron_times(2.0, 0.1, 1e-3, 0.7).expect("valid parameters")
}

/// A noisy `n_qubits` chain with a deterministic node at every interior site.
pub fn sample_chain(n_qubits: usize) -> LinkChain {
    let pairs = vec![PairParams { mu: 0.01, nu: 0.96 }; n_qubits - 1];
    let cnot_events = (1..n_qubits - 1)
        .map(|site| CnotEvent {
            site,
            kind: CnotKind::TsDeterministic,
            p_e: 1e-3,
            p_n: 1e-3,
        })
        .collect();
    let final_idle = (0..n_qubits)
        .map(|j| {
            vec![IdleInterval {
                duration: 1e-5 * j as f64,
                t1: 2.0,
                t2: 0.1,
            }]
        })
        .collect();
    LinkChain {
        pairs,
        cnot_events,
        final_idle,
    }
}
