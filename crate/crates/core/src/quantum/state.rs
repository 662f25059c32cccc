// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::circuit::{Gate, Layout, Register};
use crate::error::{Error, Result};

/// Dense amplitude vector. Qubit `q` is bit `q` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(qubits: usize) -> Self {
        Self::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        Ok(Self {
            qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total probability of basis states satisfying `pred`.
    pub fn probability(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .fold(0.0, |acc, (_, a)| acc + a.norm_sqr())
    }

    fn check(&self, q: usize) -> Result<usize> {
        if q >= self.qubits {
            return Err(Error::QubitRange {
                qubit: q,
                qubits: self.qubits,
            });
        }
        Ok(1 << q)
    }

    fn check_register(&self, r: &Register) -> Result<()> {
        if r.width == 0 {
            return Ok(());
        }
        self.check(r.start + r.width - 1).map(|_| ())
    }

    // Swap amplitudes of `i` and `i | bit` for every `i` with `bit` clear
    // that satisfies `pred`.
    fn flip_where(&mut self, bit: usize, pred: impl Fn(usize) -> bool) {
        for i in 0..self.amps.len() {
            if i & bit == 0 && pred(i) {
                self.amps.swap(i, i | bit);
            }
        }
    }
}

/// Value of a register in basis state `index`.
pub fn register_value(index: usize, r: &Register) -> u64 {
    (0..r.width).fold(0u64, |acc, k| {
        (acc << 1) | ((index >> (r.start + k)) & 1) as u64
    })
}

/// Apply one gate in place. `leaves` is the oracle's truth table indexed by
/// the concatenated source registers; required only for oracle gates.
pub fn apply_gate(
    state: &mut StateVector,
    gate: &Gate,
    layout: &Layout,
    leaves: Option<&[bool]>,
) -> Result<()> {
    if state.qubits != layout.qubits() {
        return Err(Error::LayoutMismatch(format!(
            "state has {} qubits, layout {}",
            state.qubits,
            layout.qubits()
        )));
    }
    match gate {
        Gate::H(q) => {
            let bit = state.check(*q)?;
            let r = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..state.amps.len() {
                if i & bit == 0 {
                    let (a, b) = (state.amps[i], state.amps[i | bit]);
                    state.amps[i] = (a + b) * r;
                    state.amps[i | bit] = (a - b) * r;
                }
            }
        }
        Gate::X(q) => {
            let bit = state.check(*q)?;
            state.flip_where(bit, |_| true);
        }
        Gate::Cnot { control, target } => {
            let c = state.check(*control)?;
            let t = state.check(*target)?;
            if c == t {
                return Err(Error::LayoutMismatch("CNOT control equals target".into()));
            }
            state.flip_where(t, |i| i & c != 0);
        }
        Gate::PhaseFlipIfOne(q) => {
            let bit = state.check(*q)?;
            for (i, a) in state.amps.iter_mut().enumerate() {
                if i & bit != 0 {
                    *a = -*a;
                }
            }
        }
        Gate::G { source, target, g } => {
            let t = state.check(*target)?;
            let src = layout.register(*source)?.clone();
            state.check_register(&src)?;
            if src.width != g.arity() {
                return Err(Error::Arity {
                    expected: g.arity(),
                    got: src.width,
                });
            }
            if t >> src.start & ((1 << src.width) - 1) != 0 {
                return Err(Error::LayoutMismatch("G target inside its source".into()));
            }
            state.flip_where(t, |i| {
                let s = register_value(i, &src) as u32;
                g.is_defined(s) && g.evaluate(s).unwrap_or(false)
            });
        }
        Gate::Oracle { sources, target } => {
            let t = state.check(*target)?;
            let regs = sources
                .iter()
                .map(|&r| layout.register(r).cloned())
                .collect::<Result<Vec<_>>>()?;
            let bits: usize = regs.iter().map(|r| r.width).sum();
            for r in &regs {
                state.check_register(r)?;
                if t >> r.start & ((1 << r.width) - 1) != 0 {
                    return Err(Error::LayoutMismatch(
                        "oracle target inside a source".into(),
                    ));
                }
            }
            let leaves = leaves.ok_or_else(|| {
                Error::LayoutMismatch("oracle gate applied without a leaf table".into())
            })?;
            if bits >= usize::BITS as usize || leaves.len() != 1 << bits {
                return Err(Error::LayoutMismatch(format!(
                    "leaf table has {} entries, sources span {bits} bits",
                    leaves.len()
                )));
            }
            state.flip_where(t, |i| {
                let idx = regs
                    .iter()
                    .fold(0u64, |acc, r| (acc << r.width) | register_value(i, r));
                leaves[idx as usize]
            });
        }
    }
    Ok(())
}
