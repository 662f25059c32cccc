// SPDX-License-Identifier: Apache-2.0

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::game::mu_joint;
use super::product::{mu_product_lower, ProductLower};
use crate::boolfn::{format_bits, BooleanFunction, ParityForm};
use crate::error::Result;

/// Alternating-maximization rounds per restart.
pub const PRODUCT_ITERS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Nontrivial {
    /// Joint-game value, an upper bound on the coefficient.
    pub mu_upper: f64,
    /// Best product floor found, a lower bound.
    pub mu_lower: f64,
    /// `1 / (1 - mu_upper)`.
    pub bound_base: f64,
    /// `1 / (1 - mu_lower)`, backed by an explicit distribution pair.
    pub bound_base_certified: f64,
}

impl Nontrivial {
    /// Lower-bound growth `bound_base^(h/2)` at height `h`.
    pub fn lower_bound_at(&self, h: usize) -> f64 {
        self.bound_base.powf(h as f64 / 2.0)
    }

    pub fn certified_lower_bound_at(&self, h: usize) -> f64 {
        self.bound_base_certified.powf(h as f64 / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dichotomy {
    /// Constant on its domain; no game to play.
    Degenerate {
        value: bool,
    },
    /// A (negated) parity: one classical query suffices.
    Trivial(ParityForm),
    Nontrivial(Nontrivial),
}

impl Dichotomy {
    pub fn label(&self) -> &'static str {
        match self {
            Dichotomy::Degenerate { .. } => "degenerate",
            Dichotomy::Trivial(_) => "trivial",
            Dichotomy::Nontrivial(_) => "nontrivial",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DichotomyReport {
    pub function: BooleanFunction,
    pub class: Dichotomy,
    /// The product witness behind `mu_lower`, when one was searched for.
    pub product: Option<ProductLower>,
}

impl Serialize for DichotomyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.function.arity();
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("fn", &self.function.spec())?;
        map.serialize_entry("class", self.class.label())?;
        match &self.class {
            Dichotomy::Degenerate { value } => map.serialize_entry("value", &(*value as u8))?,
            Dichotomy::Trivial(form) => {
                map.serialize_entry("z", &format_bits(form.z, n))?;
                map.serialize_entry("c", &(form.c as u8))?;
            }
            Dichotomy::Nontrivial(r) => {
                map.serialize_entry("mu_upper", &r.mu_upper)?;
                map.serialize_entry("mu_lower", &r.mu_lower)?;
                map.serialize_entry("bound_base", &r.bound_base)?;
                map.serialize_entry("bound_base_certified", &r.bound_base_certified)?;
                if let Some(p) = &self.product {
                    map.serialize_entry("d0", &p.d0)?;
                    map.serialize_entry("d1", &p.d1)?;
                }
            }
        }
        map.end()
    }
}

/// Sort `g` into the dichotomy. Parity is decided by table scan, so the
/// trivial side never depends on the solver.
pub fn classify(
    g: &BooleanFunction,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> Result<DichotomyReport> {
    let report = |class, product| DichotomyReport {
        function: g.clone(),
        class,
        product,
    };
    if g.is_constant() {
        let value = g
            .domain()
            .next()
            .is_some_and(|s| g.evaluate(s).unwrap_or(false));
        return Ok(report(Dichotomy::Degenerate { value }, None));
    }
    if let Some(form) = g.is_parity() {
        return Ok(report(Dichotomy::Trivial(form), None));
    }
    let (mu_upper, _) = mu_joint(g, tol)?;
    let product = mu_product_lower(g, seed, restarts, PRODUCT_ITERS)?;
    let mu_lower = product.floor;
    let class = Dichotomy::Nontrivial(Nontrivial {
        mu_upper,
        mu_lower,
        bound_base: 1.0 / (1.0 - mu_upper),
        bound_base_certified: 1.0 / (1.0 - mu_lower),
    });
    Ok(report(class, Some(product)))
}
