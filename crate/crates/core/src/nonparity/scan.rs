// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::classify::PRODUCT_ITERS;
use super::game::mu_joint;
use super::product::mu_product_lower;
use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};

/// Exhaustive scans stop at 4 inputs (65536 functions).
pub const MAX_SCAN_ARITY: usize = 4;

pub const CSV_HEADER: &str = "fn_hex,is_parity,mu_joint,mu_product_lower,gap,class";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub fn_hex: String,
    pub is_parity: bool,
    pub mu_joint: f64,
    /// Absent when the scan ran without restarts.
    pub mu_product_lower: Option<f64>,
    pub gap: f64,
    pub class: &'static str,
}

impl ScanRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.fn_hex,
            self.is_parity,
            num(self.mu_joint),
            self.mu_product_lower.map_or(String::new(), num),
            num(self.gap),
            self.class
        )
    }
}

/// Shortest round-trip form, switching to exponent notation for tiny values.
fn num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Classify one function for a scan. Constants report `mu_joint = 0` and
/// count as parities (`z = 0`).
pub fn scan_one(g: &BooleanFunction, restarts: usize, seed: u64, tol: f64) -> Result<ScanRow> {
    let fn_hex = g.to_hex();
    if g.is_constant() {
        return Ok(ScanRow {
            fn_hex,
            is_parity: true,
            mu_joint: 0.0,
            mu_product_lower: (restarts > 0).then_some(0.0),
            gap: 0.0,
            class: "degenerate",
        });
    }
    let is_parity = g.is_parity().is_some();
    let (mu, sol) = mu_joint(g, tol)?;
    let mu_product_lower = if restarts > 0 {
        Some(mu_product_lower(g, seed, restarts, PRODUCT_ITERS)?.floor)
    } else {
        None
    };
    Ok(ScanRow {
        fn_hex,
        is_parity,
        mu_joint: mu,
        mu_product_lower,
        gap: sol.gap,
        class: if is_parity { "trivial" } else { "nontrivial" },
    })
}

/// Every total function on `n` inputs, in parallel, sorted by `fn_hex`.
/// Function `k` gets product-search seed `seed + k`.
pub fn scan(n: usize, restarts: usize, seed: u64, tol: f64) -> Result<Vec<ScanRow>> {
    if n == 0 || n > MAX_SCAN_ARITY {
        return Err(Error::TooLarge {
            what: "scan arity",
            size: n as u128,
            cap: MAX_SCAN_ARITY as u128,
        });
    }
    let count = 1u64 << (1u32 << n);
    let mut rows = (0..count)
        .into_par_iter()
        .map(|k| {
            let g = BooleanFunction::from_fn(n, |s| (k >> s) & 1 == 1)?;
            scan_one(&g, restarts, seed.wrapping_add(k), tol)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.fn_hex.cmp(&b.fn_hex));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonparity::game::DEFAULT_TOL;

    #[test]
    fn n2_scan() {
        let rows = scan(2, 0, 0, DEFAULT_TOL).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.windows(2).all(|w| w[0].fn_hex < w[1].fn_hex));
        for r in &rows {
            assert_eq!(r.is_parity, r.mu_joint == 0.0, "{r:?}");
        }
        let min = rows
            .iter()
            .filter(|r| r.mu_joint > 0.0)
            .map(|r| r.mu_joint)
            .fold(f64::INFINITY, f64::min);
        assert!((min - 1.0 / 3.0).abs() < 1e-9);
        // 2 constants + 6 nonconstant (negated) parities.
        assert_eq!(rows.iter().filter(|r| r.is_parity).count(), 8);
    }

    #[test]
    fn csv_shape() {
        let rows = scan(1, 2, 0, DEFAULT_TOL).unwrap();
        let csv = to_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 6));
    }

    #[test]
    fn arity_cap() {
        assert!(matches!(
            scan(5, 0, 0, DEFAULT_TOL),
            Err(Error::TooLarge { .. })
        ));
    }
}
