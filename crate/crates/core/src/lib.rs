// SPDX-License-Identifier: Apache-2.0

//! Recursive Fourier Sampling laboratory.

pub mod adversary;
pub mod boolfn;
pub mod classical;
pub mod cli;
pub mod error;
pub mod instance;
pub mod nonparity;
pub mod quantum;

pub use error::{Error, Result};
