// SPDX-License-Identifier: Apache-2.0

//! Exact state-vector simulation of the recursive Bernstein-Vazirani
//! algorithm.
//!
//! Each level `l` owns an `n`-qubit register `x{l}`, an answer qubit `a{l}`
//! and a phase qubit `p{l}`; siblings at the same level reuse them because
//! every sub-call restores its workspace. Success probability is read off the
//! final amplitudes, never sampled.

mod circuit;
mod state;

pub use circuit::{build_circuit, Circuit, Gate, Layout, Mode, Register, DEFAULT_QUBIT_CAP};
pub use state::{apply_gate, register_value, StateVector};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::RfsInstance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub answer: bool,
    pub prob_correct: f64,
    pub prob_incorrect: f64,
    pub oracle_queries: u64,
    /// Probability mass on states where any qubit other than `out` is set.
    pub ancilla_residual: f64,
    pub qubits_used: usize,
    /// Largest `| ||psi||^2 - 1 |` seen after any gate.
    pub max_norm_drift: f64,
}

/// Run `circuit` from `|0...0>` against `instance`'s leaf oracle.
pub fn run(circuit: &Circuit, instance: &RfsInstance) -> Result<RunReport> {
    if circuit.n != instance.n() || circuit.h != instance.height() {
        return Err(Error::LayoutMismatch(format!(
            "circuit built for n={}, h={}; instance has n={}, h={}",
            circuit.n,
            circuit.h,
            instance.n(),
            instance.height()
        )));
    }
    if *circuit.g != *instance.function() {
        return Err(Error::LayoutMismatch(
            "circuit and instance use different inner functions".into(),
        ));
    }
    let qubits = circuit.layout.qubits();
    let leaves = instance.leaf_table(1u128 << qubits.min(64))?;
    let answer = instance.answer()?;

    let mut state = StateVector::zero(qubits);
    let mut oracle_queries = 0;
    let mut max_norm_drift: f64 = 0.0;
    for gate in &circuit.gates {
        apply_gate(&mut state, gate, &circuit.layout, Some(&leaves))?;
        if gate.is_oracle() {
            oracle_queries += 1;
        }
        max_norm_drift = max_norm_drift.max((state.norm_sqr() - 1.0).abs());
    }

    let out = 1usize << circuit.output_qubit();
    let prob_one = state.probability(|i| i & out != 0);
    let prob_zero = state.probability(|i| i & out == 0);
    let (prob_correct, prob_incorrect) = if answer {
        (prob_one, prob_zero)
    } else {
        (prob_zero, prob_one)
    };
    Ok(RunReport {
        answer,
        prob_correct,
        prob_incorrect,
        oracle_queries,
        ancilla_residual: state.probability(|i| i & !out != 0),
        qubits_used: qubits,
        max_norm_drift,
    })
}
