// SPDX-License-Identifier: Apache-2.0

//! Dense primal simplex for zero-sum matrix games.
//!
//! The row player maximizes. After shifting payoffs so every entry is at
//! least 1, the column player's problem is
//!
//! ```text
//! maximize sum_j w_j   subject to   M w <= 1,  w >= 0
//! ```
//!
//! whose optimum is `1 / value`. The origin is feasible so no phase one is
//! needed. The row strategy is read from the slack reduced costs.
//!
//! Pivoting uses Dantzig's rule and falls back to Bland's rule after a run of
//! degenerate pivots, which rules out cycling.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};

pub trait LpScalar: Clone + Debug + PartialOrd + Num + Signed {
    /// Threshold below which a quantity counts as zero.
    fn tolerance() -> Self;

    /// Smallest admissible pivot element in the ratio test.
    fn pivot_tolerance() -> Self {
        Self::tolerance()
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Self::one()
        } else {
            Self::zero()
        }
    }

    fn from_u64(v: u64) -> Self;
}

impl LpScalar for f64 {
    fn tolerance() -> Self {
        1e-12
    }

    fn pivot_tolerance() -> Self {
        1e-9
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }
}

impl LpScalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

#[derive(Debug, Clone)]
pub struct ZeroSumSolution<S> {
    pub value: S,
    pub row: Vec<S>,
    pub col: Vec<S>,
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub enum SimplexFailure {
    PivotLimit(usize),
    Unbounded,
    Empty,
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

pub fn solve_zero_sum<S: LpScalar>(
    payoff: &[Vec<S>],
    max_pivots: usize,
) -> Result<ZeroSumSolution<S>, SimplexFailure> {
    let rows = payoff.len();
    let cols = payoff.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || payoff.iter().any(|r| r.len() != cols) {
        return Err(SimplexFailure::Empty);
    }
    // The tableau has one constraint per row; solve the transposed game when
    // that is smaller. Value of -M^T is -value(M), strategies swap.
    if rows > cols {
        let transposed: Vec<Vec<S>> = (0..cols)
            .map(|j| (0..rows).map(|i| -payoff[i][j].clone()).collect())
            .collect();
        let sol = solve_oriented(&transposed, max_pivots)?;
        return Ok(ZeroSumSolution {
            value: -sol.value,
            row: sol.col,
            col: sol.row,
            pivots: sol.pivots,
        });
    }
    solve_oriented(payoff, max_pivots)
}

fn solve_oriented<S: LpScalar>(
    payoff: &[Vec<S>],
    max_pivots: usize,
) -> Result<ZeroSumSolution<S>, SimplexFailure> {
    let m = payoff.len();
    let k = payoff[0].len();
    let min =
        payoff.iter().flatten().fold(
            payoff[0][0].clone(),
            |acc, v| if *v < acc { v.clone() } else { acc },
        );
    let shift = S::one() - min;

    let width = k + m;
    let mut tab: Vec<Vec<S>> = payoff
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut t: Vec<S> = row.iter().map(|v| v.clone() + shift.clone()).collect();
            t.extend((0..m).map(|s| S::from_bool(s == i)));
            t
        })
        .collect();
    let mut rhs: Vec<S> = vec![S::one(); m];
    let mut reduced: Vec<S> = (0..width).map(|j| S::from_bool(j < k)).collect();
    let mut objective = S::zero();
    let mut basis: Vec<usize> = (k..k + m).collect();

    let tol = S::tolerance();
    let pivot_tol = S::pivot_tolerance();
    let mut pivots = 0;
    let mut degenerate = 0;
    loop {
        let entering = if degenerate >= DEGENERATE_RUN {
            (0..width).find(|&j| reduced[j] > tol)
        } else {
            (0..width)
                .filter(|&j| reduced[j] > tol)
                .fold(None, |best: Option<usize>, j| match best {
                    Some(b) if reduced[b] >= reduced[j] => Some(b),
                    _ => Some(j),
                })
        };
        let Some(e) = entering else { break };
        if pivots >= max_pivots {
            return Err(SimplexFailure::PivotLimit(pivots));
        }

        let mut leaving: Option<(usize, S)> = None;
        for i in 0..m {
            if tab[i][e] > pivot_tol {
                let ratio = rhs[i].clone() / tab[i][e].clone();
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((l, best)) => {
                        let diff = ratio.clone() - best.clone();
                        if diff < -tol.clone() || (diff.abs() <= tol && basis[i] < basis[l]) {
                            Some((i, ratio))
                        } else {
                            Some((l, best))
                        }
                    }
                };
            }
        }
        let Some((l, _)) = leaving else {
            return Err(SimplexFailure::Unbounded);
        };

        if rhs[l].abs() <= tol {
            degenerate += 1;
        } else {
            degenerate = 0;
        }

        let piv = tab[l][e].clone();
        for v in tab[l].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        rhs[l] = rhs[l].clone() / piv;
        let pivot_row = tab[l].clone();
        let pivot_rhs = rhs[l].clone();
        for i in 0..m {
            if i == l || tab[i][e].is_zero() {
                continue;
            }
            let factor = tab[i][e].clone();
            for (v, p) in tab[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - factor.clone() * p.clone();
                }
            }
            tab[i][e] = S::zero();
            rhs[i] = rhs[i].clone() - factor * pivot_rhs.clone();
        }
        let factor = reduced[e].clone();
        for (v, p) in reduced.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v = v.clone() - factor.clone() * p.clone();
            }
        }
        reduced[e] = S::zero();
        objective = objective + factor * pivot_rhs;
        basis[l] = e;
        pivots += 1;
    }

    // objective = sum w = 1 / (value + shift) > 0
    let mut w = vec![S::zero(); k];
    for (i, &b) in basis.iter().enumerate() {
        if b < k {
            w[b] = rhs[i].clone();
        }
    }
    let y: Vec<S> = (0..m).map(|i| -reduced[k + i].clone()).collect();
    let col = w.into_iter().map(|v| v / objective.clone()).collect();
    let row = y.into_iter().map(|v| v / objective.clone()).collect();
    Ok(ZeroSumSolution {
        value: S::one() / objective - shift,
        row,
        col,
        pivots,
    })
}

/// `(min_c sum_r row_r M[r][c], max_r sum_c M[r][c] col_c)`: what each
/// strategy guarantees against the payoff matrix.
pub fn guarantees<S: LpScalar>(payoff: &[Vec<S>], row: &[S], col: &[S]) -> (S, S) {
    let cols = payoff[0].len();
    let lower = (0..cols)
        .map(|c| {
            payoff
                .iter()
                .zip(row)
                .fold(S::zero(), |acc, (r, p)| acc + r[c].clone() * p.clone())
        })
        .reduce(|a, b| if b < a { b } else { a })
        .unwrap();
    let upper = payoff
        .iter()
        .map(|r| {
            r.iter()
                .zip(col)
                .fold(S::zero(), |acc, (v, q)| acc + v.clone() * q.clone())
        })
        .reduce(|a, b| if b > a { b } else { a })
        .unwrap();
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn one_by_one() {
        let sol = solve_zero_sum(&[vec![1.0]], 100).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-15);
        assert_eq!(sol.row, vec![1.0]);
    }

    #[test]
    fn matching_pennies_exact() {
        let m = vec![vec![q(1, 1), q(-1, 1)], vec![q(-1, 1), q(1, 1)]];
        let sol = solve_zero_sum(&m, 100).unwrap();
        assert_eq!(sol.value, q(0, 1));
        assert_eq!(sol.row, vec![q(1, 2), q(1, 2)]);
        assert_eq!(sol.col, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn rock_paper_scissors_shifted() {
        let m: Vec<Vec<BigRational>> = [[0, -1, 1], [1, 0, -1], [-1, 1, 0]]
            .iter()
            .map(|r| r.iter().map(|&v| q(v + 2, 1)).collect())
            .collect();
        let sol = solve_zero_sum(&m, 100).unwrap();
        assert_eq!(sol.value, q(2, 1));
        let (lo, hi) = guarantees(&m, &sol.row, &sol.col);
        assert_eq!(lo, hi);
    }

    #[test]
    fn tall_matrix_uses_transpose() {
        // Rows dominate columns in count; value is 2/3 from rows 0 and 1.
        let m = vec![
            vec![q(1, 1), q(0, 1)],
            vec![q(0, 1), q(2, 1)],
            vec![q(0, 1), q(0, 1)],
        ];
        let sol = solve_zero_sum(&m, 100).unwrap();
        assert_eq!(sol.value, q(2, 3));
        let (lo, hi) = guarantees(&m, &sol.row, &sol.col);
        assert_eq!((lo, hi), (q(2, 3), q(2, 3)));
    }

    /// Brute-force check on random 2x2 and 2x3 games: value equals the best
    /// guarantee over a fine grid of row mixtures (up to grid resolution).
    #[test]
    fn random_small_games_against_grid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let cols = rng.gen_range(1..4);
            let m: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..cols).map(|_| rng.gen_range(-3..4) as f64).collect())
                .collect();
            let sol = solve_zero_sum(&m, 1000).unwrap();
            let grid = (0..=10_000)
                .map(|t| {
                    let p = t as f64 / 10_000.0;
                    (0..cols)
                        .map(|c| p * m[0][c] + (1.0 - p) * m[1][c])
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (sol.value - grid).abs() < 2e-3,
                "{m:?}: {} vs {grid}",
                sol.value
            );
            let (lo, hi) = guarantees(&m, &sol.row, &sol.col);
            assert!((hi - lo).abs() < 1e-9);
        }
    }
}
