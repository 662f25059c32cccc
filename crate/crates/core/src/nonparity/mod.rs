// SPDX-License-Identifier: Apache-2.0

//! The nonparity coefficient of an inner function and everything read off
//! its matrix game: product-distribution lower bounds, the threshold of
//! parities witness, and the trivial/nontrivial split.

mod classify;
mod game;
mod product;
mod psi;
mod scan;
pub mod simplex;

pub use classify::{classify, Dichotomy, DichotomyReport, Nontrivial, PRODUCT_ITERS};
pub use game::{
    build_game, mu_joint, mu_joint_exact, rational_to_f64, realizable_columns, solve_game,
    solve_game_exact, solve_matrix, solve_matrix_exact, Column, ExactGameSolution, GameSolution,
    MatrixGame, DEFAULT_TOL,
};
pub use product::{
    eval_product_floor, mu_product_lower, parity_bias, product_payoff, Distribution, ProductLower,
};
pub use psi::{dual_to_psi, psi_report, PsiReport, PsiRepresentation, PsiTerm, PSI_TOL};
pub use scan::{scan, scan_one, to_csv, ScanRow, CSV_HEADER, MAX_SCAN_ARITY};
