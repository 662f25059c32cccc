// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};

/// Default limit on total qubits for dense simulation.
pub const DEFAULT_QUBIT_CAP: usize = 22;

/// A contiguous block of qubits. The first qubit holds position 1 (the most
/// significant bit) of the register's value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    registers: Vec<Register>,
    qubits: usize,
}

impl Layout {
    pub fn new() -> Self {
        Self {
            registers: Vec::new(),
            qubits: 0,
        }
    }

    /// Append a register; returns its index.
    pub fn add(&mut self, name: &str, width: usize) -> usize {
        self.registers.push(Register {
            name: name.to_string(),
            start: self.qubits,
            width,
        });
        self.qubits += width;
        self.registers.len() - 1
    }

    /// Per level `l = 1..=h`: `x{l}` (n qubits), `a{l}`, `p{l}`; then `out`.
    pub fn rfs(n: usize, h: usize) -> Self {
        let mut layout = Self::new();
        for level in 1..=h {
            layout.add(&format!("x{level}"), n);
            layout.add(&format!("a{level}"), 1);
            layout.add(&format!("p{level}"), 1);
        }
        layout.add("out", 1);
        layout
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, index: usize) -> Result<&Register> {
        self.registers
            .get(index)
            .ok_or_else(|| Error::LayoutMismatch(format!("register index {index} not in layout")))
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.name == name)
    }

    fn first_qubit(&self, name: &str) -> usize {
        self.registers[self.find(name).expect("register exists")].start
    }
}

impl Default for Layout {
    fn default() -> Self {
        Self::new()
    }
}

/// Gates. Every kind is an involution, so each gate is its own inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    X(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    /// Phase `-1` on basis states where the qubit is 1.
    PhaseFlipIfOne(usize),
    /// `|s>|t> -> |s>|t xor g(s)>`; identity where `g` is undefined.
    G {
        source: usize,
        target: usize,
        g: Arc<BooleanFunction>,
    },
    /// `|x1..xh>|t> -> |x1..xh>|t xor A(x1..xh)>`.
    Oracle {
        sources: Vec<usize>,
        target: usize,
    },
}

impl Gate {
    pub fn inverse(&self) -> Gate {
        self.clone()
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, Gate::Oracle { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Compute `A(x)`, flip the phase, uncompute: two calls per phase.
    FourQuery,
    /// XOR `A(x)` into a `|->` ancilla: one call per phase.
    Kickback,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "four_query" => Ok(Mode::FourQuery),
            "kickback" => Ok(Mode::Kickback),
            other => Err(Error::Parse {
                token: other.to_string(),
                reason: "expected `four_query` or `kickback`".into(),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Circuit {
    pub n: usize,
    pub h: usize,
    pub g: Arc<BooleanFunction>,
    pub layout: Layout,
    pub gates: Vec<Gate>,
}

impl Circuit {
    /// RFS layout with no gates.
    pub fn empty(n: usize, h: usize, g: &BooleanFunction) -> Self {
        Self {
            n,
            h,
            g: Arc::new(g.clone()),
            layout: Layout::rfs(n, h),
            gates: Vec::new(),
        }
    }

    pub fn oracle_queries(&self) -> usize {
        self.gates.iter().filter(|g| g.is_oracle()).count()
    }

    pub fn output_qubit(&self) -> usize {
        self.layout.first_qubit("out")
    }

    /// One gate per line, e.g. `H q3` or `ORACLE x1,x2 -> q9`.
    pub fn dump(&self) -> String {
        let name = |r: usize| self.layout.registers[r].name.as_str();
        let mut out = String::new();
        for gate in &self.gates {
            let _ = match gate {
                Gate::H(q) => writeln!(out, "H q{q}"),
                Gate::X(q) => writeln!(out, "X q{q}"),
                Gate::Cnot { control, target } => writeln!(out, "CNOT q{control} -> q{target}"),
                Gate::PhaseFlipIfOne(q) => writeln!(out, "Z q{q}"),
                Gate::G { source, target, .. } => writeln!(out, "G {} -> q{target}", name(*source)),
                Gate::Oracle { sources, target } => {
                    let regs: Vec<&str> = sources.iter().map(|&r| name(r)).collect();
                    writeln!(out, "ORACLE {} -> q{target}", regs.join(","))
                }
            };
        }
        out
    }
}

/// Recursive Bernstein-Vazirani circuit computing `g(root secret)` into `out`
/// with every other register returned to zero.
pub fn build_circuit(
    n: usize,
    h: usize,
    g: &BooleanFunction,
    mode: Mode,
    qubit_cap: usize,
) -> Result<Circuit> {
    if g.arity() != n {
        return Err(Error::Arity {
            expected: n,
            got: g.arity(),
        });
    }
    if h == 0 {
        return Err(Error::ShapeMismatch("height must be at least 1".into()));
    }
    if g.is_constant() {
        return Err(Error::Unsatisfiable(format!(
            "`{g}` is constant on its domain"
        )));
    }
    let mut circuit = Circuit::empty(n, h, g);
    let qubits = circuit.layout.qubits();
    if qubits > qubit_cap {
        return Err(Error::TooLarge {
            what: "circuit",
            size: qubits as u128,
            cap: qubit_cap as u128,
        });
    }
    let builder = Builder {
        circuit: &circuit,
        mode,
    };
    let mut gates = Vec::new();
    builder.solve(1, circuit.output_qubit(), &mut gates);
    circuit.gates = gates;
    Ok(circuit)
}

struct Builder<'a> {
    circuit: &'a Circuit,
    mode: Mode,
}

impl Builder<'_> {
    fn reg(&self, prefix: char, level: usize) -> usize {
        self.circuit
            .layout
            .find(&format!("{prefix}{level}"))
            .expect("rfs layout")
    }

    fn qubit(&self, prefix: char, level: usize) -> usize {
        self.circuit.layout.registers[self.reg(prefix, level)].start
    }

    /// Level-`level` procedure: XOR the node's answer into `target`.
    fn solve(&self, level: usize, target: usize, gates: &mut Vec<Gate>) {
        let block = self.extract_secret(level);
        gates.extend(block.iter().cloned());
        gates.push(Gate::G {
            source: self.reg('x', level),
            target,
            g: self.circuit.g.clone(),
        });
        gates.extend(block.iter().rev().map(Gate::inverse));
    }

    /// Child answer `b(x_level)` XORed into `target`: one leaf query at the
    /// bottom level, otherwise the next level's whole procedure.
    fn child_answer(&self, level: usize, target: usize, gates: &mut Vec<Gate>) {
        if level == self.circuit.h {
            gates.push(Gate::Oracle {
                sources: (1..=self.circuit.h).map(|l| self.reg('x', l)).collect(),
                target,
            });
        } else {
            self.solve(level + 1, target, gates);
        }
    }

    /// Gates taking `x_level` from `|0>` to `|s>` with workspace restored.
    fn extract_secret(&self, level: usize) -> Vec<Gate> {
        let x = self.circuit.layout.registers[self.reg('x', level)].clone();
        let hadamards = (x.start..x.start + x.width).map(Gate::H);
        let mut gates: Vec<Gate> = hadamards.clone().collect();
        match self.mode {
            Mode::FourQuery => {
                let a = self.qubit('a', level);
                let mut call = Vec::new();
                self.child_answer(level, a, &mut call);
                gates.extend(call.iter().cloned());
                gates.push(Gate::PhaseFlipIfOne(a));
                gates.extend(call.iter().rev().map(Gate::inverse));
            }
            Mode::Kickback => {
                let p = self.qubit('p', level);
                gates.push(Gate::X(p));
                gates.push(Gate::H(p));
                self.child_answer(level, p, &mut gates);
                gates.push(Gate::H(p));
                gates.push(Gate::X(p));
            }
        }
        gates.extend(hadamards);
        gates
    }
}
