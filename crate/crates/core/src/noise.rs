//! Scalar noise algebra shared by the closed-form analytics and the
//! density-matrix oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, invalid, Result};

/// Physical error model of one network node.
///
/// Times are in seconds. `p_e` and `p_n` are the errors of the electronic and
/// nuclear CNOTs, `eta` the Bell-pair distribution efficiency and `p_link` the
/// success probability of a photon-mediated link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub t1_e: f64,
    pub t2_e: f64,
    pub t1_n: f64,
    pub t2_n: f64,
    pub p_e: f64,
    pub p_n: f64,
    pub eta: f64,
    pub p_link: f64,
}

/// Ratio between nuclear and electronic memory times.
pub const NUCLEAR_TIME_FACTOR: f64 = 100.0;

impl NoiseParams {
    /// Builds a parameter set from electron times; nuclear memories get
    /// 100x longer T1/T2, `p_link` follows `eta`.
    pub fn from_electron_times(t1_e: f64, t2_e: f64, cnot_error: f64, eta: f64) -> Result<Self> {
        let params = NoiseParams {
            t1_e,
            t2_e,
            t1_n: NUCLEAR_TIME_FACTOR * t1_e,
            t2_n: NUCLEAR_TIME_FACTOR * t2_e,
            p_e: cnot_error,
            p_n: cnot_error,
            eta,
            p_link: eta,
        };
        params.validate()?;
        Ok(params)
    }

    /// Every noise source switched off; links still succeed with `eta`.
    pub fn noiseless(eta: f64) -> Self {
        NoiseParams {
            t1_e: f64::INFINITY,
            t2_e: f64::INFINITY,
            t1_n: f64::INFINITY,
            t2_n: f64::INFINITY,
            p_e: 0.0,
            p_n: 0.0,
            eta,
            p_link: eta,
        }
    }

    pub fn with_p_link(mut self, p_link: f64) -> Self {
        self.p_link = p_link;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("t1_e", self.t1_e),
            ("t2_e", self.t2_e),
            ("t1_n", self.t1_n),
            ("t2_n", self.t2_n),
        ] {
            if !(t > 0.0) {
                return Err(invalid(name, format!("{t} must be > 0")));
            }
        }
        check_probability("p_e", self.p_e)?;
        check_probability("p_n", self.p_n)?;
        check_probability("eta", self.eta)?;
        check_probability("p_link", self.p_link)?;
        Ok(())
    }

    pub fn memory(&self, kind: MemoryKind) -> Memory {
        match kind {
            MemoryKind::Electron => Memory {
                t1: self.t1_e,
                t2: self.t2_e,
            },
            MemoryKind::Nuclear => Memory {
                t1: self.t1_n,
                t2: self.t2_n,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemoryKind {
    Electron,
    Nuclear,
}

/// Damping (`t1`) and dephasing (`t2`) times of one memory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Memory {
    pub t1: f64,
    pub t2: f64,
}

/// ε(dt/T) = 1 - exp(-dt/T).
pub fn eps(dt: f64, t: f64) -> Result<f64> {
    Ok(1.0 - eps_bar(dt, t)?)
}

/// ε̄(dt/T) = exp(-dt/T).
pub fn eps_bar(dt: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("T", format!("{t} must be > 0")));
    }
    if !(dt >= 0.0) {
        return Err(invalid("dt", format!("{dt} must be >= 0")));
    }
    Ok((-dt / t).exp())
}

pub fn f_factor(e1: f64, e2: f64) -> f64 {
    1.0 - e1 - e2 + 2.0 * e1 * e2
}

pub fn g_factor(e1: f64, e2: f64) -> f64 {
    (1.0 - e1) * (1.0 - e2)
}

/// Diagonal factor of one noisy even link of the two-step protocol.
pub fn h_factor(p: f64) -> f64 {
    let q = 1.0 - p / 2.0;
    q * q - p * q
}

/// Diagonal factor of one deterministic link node.
pub fn h_tilde_factor(p: f64) -> f64 {
    (1.0 - p) * (1.0 - p) + p / 2.0 * (1.0 - p / 2.0)
}

pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Dephasing,
    Damping,
    Depolarizing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub label: ChannelKind,
    pub p: f64,
    pub operators: Vec<Mat2>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Kraus operators of the three single-qubit channels.
///
/// Depolarizing uses weights {1-p, p/3, p/3, p/3} on {I, X, Y, Z}.
pub fn kraus_set(kind: ChannelKind, p: f64) -> Result<KrausSet> {
    check_probability("p", p)?;
    let operators = match kind {
        ChannelKind::Dephasing => {
            let a = (1.0 - p).sqrt();
            let b = p.sqrt();
            let mut ops = vec![[[c(a), ZERO], [ZERO, c(a)]]];
            if p > 0.0 {
                ops.push([[c(b), ZERO], [ZERO, c(-b)]]);
            }
            ops
        }
        ChannelKind::Damping => vec![
            [[c(1.0), ZERO], [ZERO, c((1.0 - p).sqrt())]],
            [[ZERO, c(p.sqrt())], [ZERO, ZERO]],
        ],
        ChannelKind::Depolarizing => {
            let a = (1.0 - p).sqrt();
            let b = (p / 3.0).sqrt();
            let i = Complex64::new(0.0, b);
            vec![
                [[c(a), ZERO], [ZERO, c(a)]],
                [[ZERO, c(b)], [c(b), ZERO]],
                [[ZERO, -i], [i, ZERO]],
                [[c(b), ZERO], [ZERO, c(-b)]],
            ]
        }
    };
    Ok(KrausSet {
        label: kind,
        p,
        operators,
    })
}

/// Channel applied to each qubit a CNOT with error `p` acted on.
///
/// A CNOT error `p` replaces the qubit state by the maximally mixed state
/// with probability `p`, i.e. the depolarizing set above at weight 3p/4.
/// With this reading the pair and link closed forms are reproduced exactly.
pub fn cnot_error_channel(p: f64) -> Result<KrausSet> {
    check_probability("p", p)?;
    kraus_set(ChannelKind::Depolarizing, 0.75 * p)
}

/// Σ K†K, used to check completeness.
pub fn completeness(set: &KrausSet) -> Mat2 {
    let mut acc = [[ZERO; 2]; 2];
    for k in &set.operators {
        for (i, row) in acc.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for m in 0..2 {
                    *cell += k[m][i].conj() * k[m][j];
                }
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eps_examples() {
        assert_eq!(eps(0.0, 3.0).unwrap(), 0.0);
        assert_abs_diff_eq!(eps(1e6, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eps(2.0f64.ln() * 7.0, 7.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(eps(1.0, 0.0).is_err());
        assert!(eps(1.0, -2.0).is_err());
        assert_eq!(eps(5.0, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn factor_examples() {
        assert_eq!(f_factor(0.0, 0.0), 1.0);
        assert_eq!(f_factor(0.5, 0.5), 0.5);
        assert_eq!(f_factor(1.0, 1.0), 1.0);
        assert_eq!(g_factor(0.0, 0.0), 1.0);
        assert_abs_diff_eq!(g_factor(0.1, 0.2), 0.72, epsilon = 1e-15);
        assert_eq!(g_factor(1.0, 0.3), 0.0);
        assert_eq!(h_factor(0.0), 1.0);
        assert_abs_diff_eq!(h_factor(0.01), 0.980075, epsilon = 1e-12);
        assert_abs_diff_eq!(h_factor(0.02), 0.9603, epsilon = 1e-12);
        assert_eq!(h_tilde_factor(0.0), 1.0);
        assert_abs_diff_eq!(h_tilde_factor(0.01), 0.985075, epsilon = 1e-12);
        assert_abs_diff_eq!(h_tilde_factor(0.1), 0.8575, epsilon = 1e-12);
    }

    #[test]
    fn kraus_examples() {
        let deph = kraus_set(ChannelKind::Dephasing, 0.0).unwrap();
        assert_eq!(deph.operators.len(), 1);
        assert_eq!(deph.operators[0][0][0], c(1.0));

        let p = 0.3;
        let dep = kraus_set(ChannelKind::Depolarizing, p).unwrap();
        let weights: Vec<f64> = dep
            .operators
            .iter()
            .map(|k| (k[0][0].norm_sqr() + k[0][1].norm_sqr() + k[1][0].norm_sqr() + k[1][1].norm_sqr()) / 2.0)
            .collect();
        for (w, expected) in weights.iter().zip([1.0 - p, p / 3.0, p / 3.0, p / 3.0]) {
            assert_abs_diff_eq!(*w, expected, epsilon = 1e-15);
        }

        let damp = kraus_set(ChannelKind::Damping, 1.0).unwrap();
        assert_eq!(damp.operators[1], [[ZERO, c(1.0)], [ZERO, ZERO]]);

        assert!(kraus_set(ChannelKind::Damping, 1.5).is_err());
        assert!(kraus_set(ChannelKind::Damping, -0.1).is_err());
    }

    #[test]
    fn nuclear_defaults() {
        let p = NoiseParams::from_electron_times(2.0, 0.1, 1e-3, 0.9).unwrap();
        assert_eq!(p.t1_n, 200.0);
        assert_eq!(p.t2_n, 10.0);
        assert_eq!(p.p_link, 0.9);
        assert!(NoiseParams::from_electron_times(0.0, 0.1, 0.0, 0.9).is_err());
        assert!(NoiseParams::from_electron_times(1.0, 0.1, 0.0, 1.2).is_err());
    }
}
