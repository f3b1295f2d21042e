//! Shared fixtures for the criterion benchmarks.

use qlg_core::fock::{bcs_gate, pair_number_operator, BcsParams, FockSpace, PairBranch};
use qlg_core::sampling::rng_from_seed;
use qlg_core::{c64, SpinorField, SquareMatrix};

pub const SEED: u64 = 0x5eed;

pub fn random_field(sites: usize) -> SpinorField {
    SpinorField::random(sites, &mut rng_from_seed(SEED))
}

pub fn random_state(qubits: usize) -> FockSpace {
    FockSpace::random(qubits, &mut rng_from_seed(SEED)).expect("qubit count in range")
}

pub fn pairing_gate() -> SquareMatrix {
    let p = BcsParams::with_e_tau(3.0, c64(4.0, 0.0), PairBranch::Plus, 0.5).expect("valid params");
    bcs_gate(&pair_number_operator(&p), p.e_tau()).expect("pairing operator folds")
}
