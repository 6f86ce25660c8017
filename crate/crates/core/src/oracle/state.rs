use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{KrausSet, Mat2};

pub const DEFAULT_QUBIT_CAP: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gate {
    X,
    Z,
    H,
    Cnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub qubit: usize,
    pub basis: Basis,
    /// +1 or -1.
    pub outcome: i8,
    pub probability: f64,
}

/// How `measure` picks the outcome.
pub enum Outcome<'a, R: Rng> {
    Forced(i8),
    Sampled(&'a mut R),
}

pub fn pauli(g: Gate) -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match g {
        Gate::X => [[ZERO, ONE], [ONE, ZERO]],
        Gate::Z => [[ONE, ZERO], [ZERO, -ONE]],
        Gate::H => [
            [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
        ],
        Gate::Cnot => panic!("CNOT is not a single-qubit operator"),
    }
}

/// Full density matrix over `n_qubits`; qubit 0 is the most significant bit
/// of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseState {
    /// |0...0⟩⟨0...0|.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::zero_with_cap(n_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn zero_with_cap(n_qubits: usize, cap: usize) -> Result<Self> {
        if n_qubits > cap {
            return Err(Error::QubitCap {
                requested: n_qubits,
                cap,
            });
        }
        let dim = 1usize << n_qubits;
        let mut data = vec![ZERO; dim * dim];
        data[0] = ONE;
        Ok(DenseState {
            n_qubits,
            dim,
            data,
        })
    }

    /// Builds a state from a row-major real matrix.
    pub fn from_real(n_qubits: usize, rows: &[f64]) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if rows.len() != dim * dim {
            return Err(Error::LengthMismatch {
                what: "matrix entries",
                expected: dim * dim,
                actual: rows.len(),
            });
        }
        Ok(DenseState {
            n_qubits,
            dim,
            data: rows.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    pub fn from_complex(n_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch {
                what: "matrix entries",
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(DenseState { n_qubits, dim, data })
    }

    /// (|00⟩ + |11⟩)/√2.
    pub fn bell() -> Self {
        let mut s = DenseState::zero(2).expect("2 qubits fit");
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            s.data[i * 4 + j] = Complex64::new(0.5, 0.0);
        }
        s
    }

    /// Bell pair of the (μ, ν) form.
    pub fn pair(mu: f64, nu: f64) -> Self {
        let m = [
            1.0 - mu, 0.0, 0.0, nu, //
            0.0, mu, 0.0, 0.0, //
            0.0, 0.0, mu, 0.0, //
            nu, 0.0, 0.0, 1.0 - mu,
        ];
        let mut s = DenseState::from_real(2, &m).expect("4x4");
        s.data.iter_mut().for_each(|x| *x *= 0.5);
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn tensor(&self, other: &DenseState, cap: usize) -> Result<DenseState> {
        let n = self.n_qubits + other.n_qubits;
        if n > cap {
            return Err(Error::QubitCap { requested: n, cap });
        }
        let dim = self.dim * other.dim;
        let mut data = vec![ZERO; dim * dim];
        for a in 0..self.dim {
            for b in 0..self.dim {
                let x = self.get(a, b);
                if x == ZERO {
                    continue;
                }
                for c in 0..other.dim {
                    let row = (a * other.dim + c) * dim + b * other.dim;
                    for d in 0..other.dim {
                        data[row + d] = x * other.get(c, d);
                    }
                }
            }
        }
        Ok(DenseState {
            n_qubits: n,
            dim,
            data,
        })
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            })
        }
    }

    fn stride(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// ρ → (U ⊗ 1) ρ for a single-qubit U on qubit q.
    fn mul_left(&mut self, q: usize, u: &Mat2) {
        let s = self.stride(q);
        let d = self.dim;
        for i0 in (0..d).filter(|i| i & s == 0) {
            let i1 = i0 | s;
            for c in 0..d {
                let a = self.data[i0 * d + c];
                let b = self.data[i1 * d + c];
                self.data[i0 * d + c] = u[0][0] * a + u[0][1] * b;
                self.data[i1 * d + c] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    /// ρ → ρ (U ⊗ 1)†.
    fn mul_right_dagger(&mut self, q: usize, u: &Mat2) {
        let s = self.stride(q);
        let d = self.dim;
        for r in 0..d {
            let row = &mut self.data[r * d..(r + 1) * d];
            for j0 in (0..d).filter(|j| j & s == 0) {
                let j1 = j0 | s;
                let a = row[j0];
                let b = row[j1];
                row[j0] = a * u[0][0].conj() + b * u[0][1].conj();
                row[j1] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
    }

    fn conjugate(&mut self, q: usize, u: &Mat2) {
        self.mul_left(q, u);
        self.mul_right_dagger(q, u);
    }

    pub fn apply_gate(&self, gate: Gate, targets: &[usize]) -> Result<DenseState> {
        let mut out = self.clone();
        out.apply_gate_mut(gate, targets)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        let arity = if gate == Gate::Cnot { 2 } else { 1 };
        if targets.len() != arity {
            return Err(Error::LengthMismatch {
                what: "gate targets",
                expected: arity,
                actual: targets.len(),
            });
        }
        for &q in targets {
            self.check_qubit(q)?;
        }
        match gate {
            Gate::Cnot => {
                let (c, t) = (targets[0], targets[1]);
                if c == t {
                    return Err(Error::DuplicateTargets);
                }
                let (sc, st) = (self.stride(c), self.stride(t));
                let perm = |i: usize| if i & sc != 0 { i ^ st } else { i };
                let d = self.dim;
                let mut data = vec![ZERO; d * d];
                for i in 0..d {
                    let pi = perm(i);
                    for j in 0..d {
                        data[pi * d + perm(j)] = self.data[i * d + j];
                    }
                }
                self.data = data;
            }
            g => self.conjugate(targets[0], &pauli(g)),
        }
        Ok(())
    }

    /// Σ K ρ K†.
    pub fn apply_channel(&self, kraus: &KrausSet, target: usize) -> Result<DenseState> {
        let mut out = self.clone();
        out.apply_channel_mut(kraus, target)?;
        Ok(out)
    }

    pub fn apply_channel_mut(&mut self, kraus: &KrausSet, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        let mut acc = vec![ZERO; self.data.len()];
        for k in &kraus.operators {
            let mut term = self.clone();
            term.conjugate(target, k);
            acc.iter_mut().zip(&term.data).for_each(|(a, b)| *a += b);
        }
        self.data = acc;
        Ok(())
    }

    /// Keeps the block of basis states where `keep(i)` holds.
    fn project(&mut self, keep: impl Fn(usize) -> bool) {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                if !(keep(i) && keep(j)) {
                    self.data[i * d + j] = ZERO;
                }
            }
        }
    }

    fn scale(&mut self, x: f64) {
        self.data.iter_mut().for_each(|v| *v *= x);
    }

    fn add(&mut self, other: &DenseState) {
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
    }

    /// Unnormalized branch of a single-qubit measurement with outcome ±1.
    fn branch(&self, qubit: usize, basis: Basis, outcome: i8) -> DenseState {
        let mut s = self.clone();
        if basis == Basis::X {
            s.conjugate(qubit, &pauli(Gate::H));
        }
        let stride = s.stride(qubit);
        let want_one = outcome < 0;
        s.project(|i| (i & stride != 0) == want_one);
        if basis == Basis::X {
            s.conjugate(qubit, &pauli(Gate::H));
        }
        s
    }

    pub fn measure<R: Rng>(
        &self,
        qubit: usize,
        basis: Basis,
        policy: Outcome<'_, R>,
    ) -> Result<(MeasurementRecord, DenseState)> {
        self.check_qubit(qubit)?;
        let plus = self.branch(qubit, basis, 1);
        let p_plus = plus.trace().clamp(0.0, 1.0);
        let outcome = match policy {
            Outcome::Forced(o) => {
                if o != 1 && o != -1 {
                    return Err(crate::error::invalid("outcome", format!("{o} is not ±1")));
                }
                o
            }
            Outcome::Sampled(rng) => {
                if rng.random::<f64>() < p_plus {
                    1
                } else {
                    -1
                }
            }
        };
        let (mut post, prob) = if outcome == 1 {
            (plus, p_plus)
        } else {
            (self.branch(qubit, basis, -1), 1.0 - p_plus)
        };
        if prob <= 1e-15 {
            return Err(Error::ZeroProbabilityBranch { qubit });
        }
        post.scale(1.0 / post.trace());
        Ok((
            MeasurementRecord {
                qubit,
                basis,
                outcome,
                probability: prob,
            },
            post,
        ))
    }

    /// Non-selective measurement: the -1 branch gets `corrections` applied
    /// and both branches are summed back together.
    pub fn measure_and_correct(
        &mut self,
        qubit: usize,
        basis: Basis,
        corrections: &[(usize, Gate)],
    ) -> Result<()> {
        self.check_qubit(qubit)?;
        for &(q, _) in corrections {
            self.check_qubit(q)?;
        }
        let mut plus = self.branch(qubit, basis, 1);
        let mut minus = self.branch(qubit, basis, -1);
        for &(q, g) in corrections {
            minus.conjugate(q, &pauli(g));
        }
        plus.add(&minus);
        *self = plus;
        Ok(())
    }

    /// Non-selective Z⊗Z parity check on (a, b); the odd branch gets
    /// `corrections` applied.
    pub fn parity_check_and_correct(
        &mut self,
        a: usize,
        b: usize,
        corrections: &[(usize, Gate)],
    ) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        let (sa, sb) = (self.stride(a), self.stride(b));
        let parity = move |i: usize| ((i & sa != 0) ^ (i & sb != 0)) as u8;
        let mut even = self.clone();
        even.project(|i| parity(i) == 0);
        let mut odd = self.clone();
        odd.project(|i| parity(i) == 1);
        for &(q, g) in corrections {
            odd.conjugate(q, &pauli(g));
        }
        even.add(&odd);
        *self = even;
        Ok(())
    }

    /// (ρ + σ)/2.
    pub fn average(&self, other: &DenseState) -> DenseState {
        let mut out = self.clone();
        out.add(other);
        out.scale(0.5);
        out
    }

    /// Reorders qubits: new qubit i is old qubit `perm[i]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<DenseState> {
        let n = self.n_qubits;
        if perm.len() != n {
            return Err(Error::LengthMismatch {
                what: "permutation",
                expected: n,
                actual: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            self.check_qubit(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::DuplicateTargets);
            }
        }
        let map = |i: usize| {
            let mut old = 0;
            for (new_q, &old_q) in perm.iter().enumerate() {
                let bit = (i >> (n - 1 - new_q)) & 1;
                old |= bit << (n - 1 - old_q);
            }
            old
        };
        let idx: Vec<usize> = (0..self.dim).map(map).collect();
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = self.data[idx[i] * d + idx[j]];
            }
        }
        Ok(DenseState { n_qubits: n, dim: d, data })
    }

    /// Traces out `qubit`.
    pub fn trace_out(&self, qubit: usize) -> Result<DenseState> {
        self.check_qubit(qubit)?;
        let n = self.n_qubits - 1;
        let dim = 1usize << n;
        let s = self.stride(qubit);
        let low = s - 1;
        let expand = |i: usize, bit: usize| ((i & !low) << 1) | (bit * s) | (i & low);
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = ZERO;
                for bit in 0..2 {
                    acc += self.get(expand(i, bit), expand(j, bit));
                }
                data[i * dim + j] = acc;
            }
        }
        Ok(DenseState {
            n_qubits: n,
            dim,
            data,
        })
    }

    /// Traces out several qubits (indices refer to the current state).
    pub fn trace_out_many(&self, qubits: &[usize]) -> Result<DenseState> {
        let mut sorted = qubits.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted.dedup();
        let mut s = self.clone();
        for q in sorted {
            s = s.trace_out(q)?;
        }
        Ok(s)
    }

    /// (ρ + T_AD(ρ))/2 with T_AD the transposition along the anti-diagonal.
    pub fn symmetrize_antidiagonal(&self) -> DenseState {
        let d = self.dim;
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                out.data[i * d + j] = (self.get(i, j) + self.get(d - 1 - j, d - 1 - i)) * 0.5;
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        });
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks trace, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(crate::error::invalid("state", format!("trace {tr} != 1")));
        }
        let h = self.hermiticity_error();
        if h > 1e-12 {
            return Err(crate::error::invalid("state", format!("not Hermitian ({h:e})")));
        }
        let ev = self.min_eigenvalue();
        if ev < -1e-10 {
            return Err(crate::error::invalid("state", format!("negative eigenvalue {ev:e}")));
        }
        Ok(())
    }

    /// ⟨GHZ|ρ|GHZ⟩ for (|0..0⟩ + |1..1⟩)/√2.
    pub fn ghz_fidelity(&self) -> f64 {
        let l = self.dim - 1;
        (self.get(0, 0).re + self.get(l, l).re + 2.0 * self.get(0, l).re) / 2.0
    }

    /// Corner entries (ρ00, ρ11, ρ01) scaled by 2.
    pub fn corner(&self) -> (f64, f64, f64) {
        let l = self.dim - 1;
        (
            2.0 * self.get(0, 0).re,
            2.0 * self.get(l, l).re,
            2.0 * self.get(0, l).re,
        )
    }

    pub fn max_abs_diff(&self, other: &DenseState) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
