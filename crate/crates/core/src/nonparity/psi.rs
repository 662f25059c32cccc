// SPDX-License-Identifier: Apache-2.0

//! Threshold-of-parities witness `Psi(s) = sum p_z ((s . z) xor b_z)` read
//! off the column player's optimal strategy.

use std::collections::BTreeMap;

use serde::Serialize;

use super::game::{GameSolution, MatrixGame};
use crate::boolfn::{dot, format_bits, BooleanFunction};

/// Certificate comparisons use this absolute tolerance.
pub const PSI_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiTerm {
    pub z: u32,
    pub b: bool,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiRepresentation {
    pub n: usize,
    pub terms: Vec<PsiTerm>,
    pub margin: f64,
}

impl Serialize for PsiRepresentation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            z: String,
            b: u8,
            p: f64,
        }
        #[derive(Serialize)]
        struct Doc {
            terms: Vec<Term>,
            margin: f64,
        }
        Doc {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    z: format_bits(t.z, self.n),
                    b: t.b as u8,
                    p: t.p,
                })
                .collect(),
            margin: self.margin,
        }
        .serialize(serializer)
    }
}

impl PsiRepresentation {
    pub fn eval(&self, s: u32) -> f64 {
        self.terms
            .iter()
            .filter(|t| dot(s, t.z) ^ t.b)
            .fold(0.0, |acc, t| acc + t.p)
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.p).sum()
    }

    /// Signed coefficient per mask: `q_z = p(z, 0) - p(z, 1)`.
    pub fn signed_coefficients(&self) -> BTreeMap<u32, f64> {
        let mut q = BTreeMap::new();
        for t in &self.terms {
            *q.entry(t.z).or_insert(0.0) += if t.b { -t.p } else { t.p };
        }
        q
    }
}

/// Column `(z, a, b)` with weight `q` becomes the term `(z, b_z = a, q)`;
/// equal `(z, b_z)` terms are merged. Weights below `1e-15` are dropped as
/// solver noise and the rest renormalized.
pub fn dual_to_psi(game: &MatrixGame, solution: &GameSolution) -> PsiRepresentation {
    let mut merged: BTreeMap<(u32, bool), f64> = BTreeMap::new();
    for (col, &q) in game.cols.iter().zip(&solution.col_strategy) {
        if q > 1e-15 {
            *merged.entry((col.z, col.a)).or_insert(0.0) += q;
        }
    }
    let total: f64 = merged.values().sum();
    PsiRepresentation {
        n: game.n,
        terms: merged
            .into_iter()
            .map(|((z, b), p)| PsiTerm { z, b, p: p / total })
            .collect(),
        margin: solution.value,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiReport {
    pub margin: f64,
    pub max_on_zeros: f64,
    pub min_on_ones: f64,
    /// `max_on_zeros <= margin + tol`
    pub zeros_separated: bool,
    /// `min_on_ones >= 1 - margin - tol`
    pub ones_separated: bool,
    pub variance_brute: f64,
    pub variance_closed: f64,
    pub variance_agree: bool,
    /// Some term carries weight at least 1/2.
    pub parity_flag: bool,
    pub total_weight: f64,
}

pub fn psi_report(g: &BooleanFunction, psi: &PsiRepresentation) -> PsiReport {
    let max_on_zeros = g
        .preimage(false)
        .into_iter()
        .map(|s| psi.eval(s))
        .fold(f64::NEG_INFINITY, f64::max);
    let min_on_ones = g
        .preimage(true)
        .into_iter()
        .map(|s| psi.eval(s))
        .fold(f64::INFINITY, f64::min);

    let size = 1u32 << psi.n;
    let values: Vec<f64> = (0..size).map(|s| psi.eval(s)).collect();
    let mean = values.iter().sum::<f64>() / size as f64;
    let variance_brute = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / size as f64;
    // Distinct nonzero parities are pairwise independent with variance 1/4.
    let variance_closed = psi
        .signed_coefficients()
        .values()
        .map(|q| q * q)
        .sum::<f64>()
        / 4.0;

    PsiReport {
        margin: psi.margin,
        max_on_zeros,
        min_on_ones,
        zeros_separated: max_on_zeros <= psi.margin + PSI_TOL,
        ones_separated: min_on_ones >= 1.0 - psi.margin - PSI_TOL,
        variance_brute,
        variance_closed,
        variance_agree: (variance_brute - variance_closed).abs() <= PSI_TOL,
        parity_flag: psi.terms.iter().any(|t| t.p >= 0.5),
        total_weight: psi.total_weight(),
    }
}
