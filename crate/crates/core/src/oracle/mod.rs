//! Brute-force density-matrix oracle used to check the closed forms.

mod protocols;
mod state;

pub use protocols::{
    run_electron_pair_oracle, run_electron_pair_oracle_decays, run_link_oracle, run_link_oracle_with_cap, run_transfer_block_oracle, run_transfer_block_oracle_decays,
    LinkMode,
};
pub use state::{pauli, Basis, DenseState, Gate, MeasurementRecord, Outcome, DEFAULT_QUBIT_CAP};
