// SPDX-License-Identifier: Apache-2.0

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::simplex::{self, guarantees, LpScalar, SimplexFailure};
use crate::boolfn::{dot, format_bits, BooleanFunction};
use crate::error::{Error, Result};

/// Default certified duality gap for float solves.
pub const DEFAULT_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 200_000;

/// Adversary column `(z, a, b)`: `a` stands for `s0_hat . z` and `b` for
/// `s1_hat . z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Column {
    pub z: u32,
    pub a: bool,
    pub b: bool,
}

impl Column {
    /// `s0 . z = b  or  s1 . z = a`.
    pub fn hit(&self, s0: u32, s1: u32) -> bool {
        dot(s0, self.z) == self.b || dot(s1, self.z) == self.a
    }
}

/// Every nonzero `z` with each realizable `(a, b)`: some 0-input has
/// `s . z = a` and some 1-input has `s . z = b`.
pub fn realizable_columns(g: &BooleanFunction) -> Vec<Column> {
    let zeros = g.preimage(false);
    let ones = g.preimage(true);
    let mut cols = Vec::new();
    for z in 1..1u32 << g.arity() {
        let a_vals = realized(&zeros, z);
        let b_vals = realized(&ones, z);
        for a in [false, true] {
            for b in [false, true] {
                if a_vals[a as usize] && b_vals[b as usize] {
                    cols.push(Column { z, a, b });
                }
            }
        }
    }
    cols
}

fn realized(class: &[u32], z: u32) -> [bool; 2] {
    let mut seen = [false; 2];
    for &s in class {
        seen[dot(s, z) as usize] = true;
    }
    seen
}

/// The joint nonparity game: the row player picks a pair `(s0, s1)` of a
/// 0-input and a 1-input and scores 1 on a hit.
#[derive(Debug, Clone)]
pub struct MatrixGame {
    pub n: usize,
    pub rows: Vec<(u32, u32)>,
    pub cols: Vec<Column>,
    payoff: Vec<Vec<bool>>,
}

impl MatrixGame {
    pub fn payoff(&self, row: usize, col: usize) -> bool {
        self.payoff[row][col]
    }

    pub fn payoff_matrix<S: LpScalar>(&self) -> Vec<Vec<S>> {
        self.payoff
            .iter()
            .map(|r| r.iter().map(|&v| S::from_bool(v)).collect())
            .collect()
    }

    pub fn row_label(&self, row: usize) -> String {
        let (s0, s1) = self.rows[row];
        format!("{},{}", format_bits(s0, self.n), format_bits(s1, self.n))
    }
}

pub fn build_game(g: &BooleanFunction) -> Result<MatrixGame> {
    if g.is_constant() {
        return Err(Error::Unsatisfiable(format!(
            "`{g}` is constant on its domain; the game has no rows"
        )));
    }
    let zeros = g.preimage(false);
    let ones = g.preimage(true);
    let rows: Vec<(u32, u32)> = zeros
        .iter()
        .flat_map(|&s0| ones.iter().map(move |&s1| (s0, s1)))
        .collect();
    let cols = realizable_columns(g);
    let payoff = rows
        .iter()
        .map(|&(s0, s1)| cols.iter().map(|c| c.hit(s0, s1)).collect())
        .collect();
    Ok(MatrixGame {
        n: g.arity(),
        rows,
        cols,
        payoff,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GameSolution {
    /// Certified lower end: what `row_strategy` guarantees.
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
    /// `max_r (M q)_r - value`, clamped at zero.
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct ExactGameSolution {
    pub value: BigRational,
    pub row_strategy: Vec<BigRational>,
    pub col_strategy: Vec<BigRational>,
    pub gap: BigRational,
}

impl ExactGameSolution {
    pub fn to_float(&self) -> GameSolution {
        let f = |v: &BigRational| rational_to_f64(v);
        GameSolution {
            value: f(&self.value),
            row_strategy: self.row_strategy.iter().map(f).collect(),
            col_strategy: self.col_strategy.iter().map(f).collect(),
            gap: f(&self.gap),
        }
    }
}

pub fn rational_to_f64(v: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

fn clean(v: Vec<f64>) -> Vec<f64> {
    let v: Vec<f64> = v.into_iter().map(|x| x.max(0.0)).collect();
    let total: f64 = v.iter().sum();
    v.into_iter().map(|x| x / total).collect()
}

fn failure(reason: SimplexFailure) -> Error {
    Error::Unsolved {
        reason: format!("{reason:?}"),
        lower: 0.0,
        upper: 1.0,
    }
}

/// Solve a real payoff matrix (row player maximizes) and certify the result
/// by recomputing both strategies' guarantees.
pub fn solve_matrix(payoff: &[Vec<f64>], tol: f64) -> Result<GameSolution> {
    let raw = simplex::solve_zero_sum(payoff, MAX_PIVOTS).map_err(failure)?;
    let row = clean(raw.row);
    let col = clean(raw.col);
    let (lower, upper) = guarantees(payoff, &row, &col);
    let gap = (upper - lower).max(0.0);
    if gap.is_nan() || gap > tol {
        return Err(Error::Unsolved {
            reason: format!("duality gap {gap:e} above tolerance {tol:e}"),
            lower,
            upper,
        });
    }
    Ok(GameSolution {
        value: lower,
        row_strategy: row,
        col_strategy: col,
        gap,
    })
}

/// Exact rational solve; the certificate must close with gap zero.
pub fn solve_matrix_exact(payoff: &[Vec<BigRational>]) -> Result<ExactGameSolution> {
    let raw = simplex::solve_zero_sum(payoff, MAX_PIVOTS).map_err(failure)?;
    if raw.row.iter().chain(&raw.col).any(|v| v.is_negative()) {
        return Err(Error::Unsolved {
            reason: "negative probability in exact solution".into(),
            lower: 0.0,
            upper: 1.0,
        });
    }
    let (lower, upper) = guarantees(payoff, &raw.row, &raw.col);
    let gap = upper.clone() - lower.clone();
    if !gap.is_zero() || lower != raw.value {
        return Err(Error::Unsolved {
            reason: "exact certificate did not close".into(),
            lower: rational_to_f64(&lower),
            upper: rational_to_f64(&upper),
        });
    }
    Ok(ExactGameSolution {
        value: lower,
        row_strategy: raw.row,
        col_strategy: raw.col,
        gap,
    })
}

pub fn solve_game(game: &MatrixGame, tol: f64) -> Result<GameSolution> {
    solve_matrix(&game.payoff_matrix::<f64>(), tol)
}

pub fn solve_game_exact(game: &MatrixGame) -> Result<ExactGameSolution> {
    solve_matrix_exact(&game.payoff_matrix::<BigRational>())
}

/// Value of the joint game: an upper bound on the nonparity coefficient.
pub fn mu_joint(g: &BooleanFunction, tol: f64) -> Result<(f64, GameSolution)> {
    let sol = solve_game(&build_game(g)?, tol)?;
    Ok((sol.value, sol))
}

pub fn mu_joint_exact(g: &BooleanFunction) -> Result<(BigRational, ExactGameSolution)> {
    let sol = solve_game_exact(&build_game(g)?)?;
    Ok((sol.value.clone(), sol))
}
