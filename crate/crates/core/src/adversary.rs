// SPDX-License-Identifier: Apache-2.0

//! Exhaustive adversary bound for small instances.
//!
//! Every promise input is enumerated as a secret tree plus its leaf table.
//! The relation weighs a 0-input `x` against a 1-input `y` by
//! `p(x) p(y)` when they differ minimally, where `p` multiplies the
//! distribution weight of every vertex secret. The bound is `1 / nu` with
//! `nu = max sqrt(theta(x, i) theta(y, i))` over related pairs disagreeing
//! at leaf `i`.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::boolfn::{dot, format_bits, BooleanFunction};
use crate::error::{Error, Result};
use crate::instance::{NodePath, RfsInstance};
use crate::nonparity::Distribution;

pub const DEFAULT_INPUT_CAP: u128 = 1_000_000;

/// Leaf tables wider than `2^MAX_LEAF_BITS` are refused.
pub const MAX_LEAF_BITS: usize = 20;

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct SecretTree {
    pub secret: u32,
    /// `g(secret)`.
    pub answer: bool,
    /// One subtree per child edge; empty at the deepest internal level.
    pub children: Vec<Arc<SecretTree>>,
}

impl SecretTree {
    fn push_leaves(&self, n: usize, out: &mut Vec<bool>) {
        if self.children.is_empty() {
            out.extend((0..1u32 << n).map(|x| dot(self.secret, x)));
        } else {
            for child in &self.children {
                child.push_leaves(n, out);
            }
        }
    }

    fn collect(&self, path: &mut NodePath, out: &mut BTreeMap<NodePath, u32>) {
        out.insert(path.clone(), self.secret);
        for (x, child) in self.children.iter().enumerate() {
            path.push(x as u32);
            child.collect(path, out);
            path.pop();
        }
    }

    /// Secrets in preorder.
    pub fn secrets(&self) -> Vec<u32> {
        let mut out = vec![self.secret];
        for child in &self.children {
            out.extend(child.secrets());
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct PromiseInput {
    pub tree: Arc<SecretTree>,
    /// Leaf table indexed like [`RfsInstance::leaf_table`].
    pub leaves: Vec<bool>,
}

impl PromiseInput {
    pub fn answer(&self) -> bool {
        self.tree.answer
    }

    pub fn to_instance(&self, n: usize, h: usize, g: &BooleanFunction) -> Result<RfsInstance> {
        let mut secrets = BTreeMap::new();
        self.tree.collect(&mut Vec::new(), &mut secrets);
        RfsInstance::from_secrets(n, h, g, 0, secrets)
    }
}

#[derive(Debug, Clone)]
pub struct PromiseInputSet {
    pub n: usize,
    pub h: usize,
    pub g: BooleanFunction,
    pub zeros: Vec<PromiseInput>,
    pub ones: Vec<PromiseInput>,
}

/// Number of complete subtrees per required answer bit, from the deepest
/// internal level up. Saturates instead of overflowing.
fn subtree_counts(n: usize, h: usize, g: &BooleanFunction) -> Vec<[u128; 2]> {
    let classes = [g.preimage(false), g.preimage(true)];
    let mut counts = vec![[0u128; 2]; h];
    counts[h - 1] = [classes[0].len() as u128, classes[1].len() as u128];
    for d in (0..h - 1).rev() {
        for r in 0..2 {
            counts[d][r] = classes[r]
                .iter()
                .map(|&s| {
                    (0..1u32 << n).fold(1u128, |acc, x| {
                        acc.saturating_mul(counts[d + 1][dot(s, x) as usize])
                    })
                })
                .fold(0u128, u128::saturating_add);
        }
    }
    counts
}

/// Every 0-input and 1-input of `RFS_h^g`, built by recursive product over
/// preimage classes.
pub fn enumerate_inputs(
    n: usize,
    h: usize,
    g: &BooleanFunction,
    cap: u128,
) -> Result<PromiseInputSet> {
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
            "`{g}` is constant; one of the input sets is empty"
        )));
    }
    if n * h > MAX_LEAF_BITS {
        return Err(Error::TooLarge {
            what: "leaf table bits",
            size: (n * h) as u128,
            cap: MAX_LEAF_BITS as u128,
        });
    }
    let counts = subtree_counts(n, h, g);
    let total = counts[0][0].saturating_add(counts[0][1]);
    if total > cap {
        return Err(Error::TooLarge {
            what: "promise input set",
            size: total,
            cap,
        });
    }

    let classes = [g.preimage(false), g.preimage(true)];
    let mut below: [Vec<Arc<SecretTree>>; 2] = [Vec::new(), Vec::new()];
    for d in (0..h).rev() {
        let mut level: [Vec<Arc<SecretTree>>; 2] = [Vec::new(), Vec::new()];
        for r in 0..2 {
            for &s in &classes[r] {
                if d == h - 1 {
                    level[r].push(Arc::new(SecretTree {
                        secret: s,
                        answer: r == 1,
                        children: Vec::new(),
                    }));
                    continue;
                }
                let pools: Vec<&Vec<Arc<SecretTree>>> =
                    (0..1u32 << n).map(|x| &below[dot(s, x) as usize]).collect();
                for_each_product(&pools, |children| {
                    level[r].push(Arc::new(SecretTree {
                        secret: s,
                        answer: r == 1,
                        children,
                    }));
                });
            }
        }
        below = level;
    }

    let [zeros, ones] = below.map(|trees| {
        trees
            .into_iter()
            .map(|tree| {
                let mut leaves = Vec::with_capacity(1 << (n * h));
                tree.push_leaves(n, &mut leaves);
                PromiseInput { tree, leaves }
            })
            .collect::<Vec<_>>()
    });

    let mut seen = HashSet::new();
    if !zeros.iter().chain(&ones).all(|x| seen.insert(&x.leaves)) {
        return Err(Error::IllPosedRelation(
            "two secret trees induce the same leaf table".into(),
        ));
    }
    Ok(PromiseInputSet {
        n,
        h,
        g: g.clone(),
        zeros,
        ones,
    })
}

/// Calls `f` with every choice of one element per pool, odometer order
/// (last pool fastest).
fn for_each_product(pools: &[&Vec<Arc<SecretTree>>], mut f: impl FnMut(Vec<Arc<SecretTree>>)) {
    if pools.iter().any(|p| p.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; pools.len()];
    loop {
        f(idx
            .iter()
            .zip(pools)
            .map(|(&i, p)| Arc::clone(&p[i]))
            .collect());
        let mut k = pools.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < pools[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn trees_differ_minimally(a: &SecretTree, b: &SecretTree) -> bool {
    if a.answer == b.answer {
        return a == b;
    }
    a.children
        .iter()
        .zip(&b.children)
        .all(|(ca, cb)| Arc::ptr_eq(ca, cb) || trees_differ_minimally(ca, cb))
}

/// Subtrees agree wherever the two inputs' answer bits agree.
pub fn differ_minimally(x: &PromiseInput, y: &PromiseInput) -> Result<bool> {
    if x.leaves.len() != y.leaves.len() {
        return Err(Error::ShapeMismatch(format!(
            "leaf tables of length {} and {}",
            x.leaves.len(),
            y.leaves.len()
        )));
    }
    Ok(trees_differ_minimally(&x.tree, &y.tree))
}

/// Product over all vertices of `D_{g(s)}(s)`; zero off the support.
pub fn weight(x: &PromiseInput, d0: &Distribution, d1: &Distribution) -> f64 {
    fn walk(t: &SecretTree, d: [&Distribution; 2]) -> f64 {
        let own = d[t.answer as usize].prob(t.secret);
        t.children.iter().fold(own, |acc, c| acc * walk(c, d))
    }
    walk(&x.tree, [d0, d1])
}

/// One side of the bipartite relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Member {
    Zero(usize),
    One(usize),
}

/// Nonzero entries of `R`, keyed `(x, y)`; reads are symmetric.
#[derive(Debug, Clone, Default)]
pub struct RelationMatrix {
    pub x_count: usize,
    pub y_count: usize,
    pub entries: BTreeMap<(usize, usize), f64>,
}

impl RelationMatrix {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries.get(&(x, y)).copied().unwrap_or(0.0)
    }

    /// `R(u, v)`; zero within a side.
    pub fn between(&self, u: Member, v: Member) -> f64 {
        match (u, v) {
            (Member::Zero(x), Member::One(y)) | (Member::One(y), Member::Zero(x)) => self.get(x, y),
            _ => 0.0,
        }
    }
}

pub fn build_relation(
    inputs: &PromiseInputSet,
    d0: &Distribution,
    d1: &Distribution,
) -> Result<RelationMatrix> {
    let px: Vec<f64> = inputs.zeros.iter().map(|x| weight(x, d0, d1)).collect();
    let py: Vec<f64> = inputs.ones.iter().map(|y| weight(y, d0, d1)).collect();
    let mut entries = BTreeMap::new();
    for (i, x) in inputs.zeros.iter().enumerate() {
        if px[i] == 0.0 {
            continue;
        }
        for (j, y) in inputs.ones.iter().enumerate() {
            if py[j] > 0.0 && differ_minimally(x, y)? {
                entries.insert((i, j), px[i] * py[j]);
            }
        }
    }
    Ok(RelationMatrix {
        x_count: inputs.zeros.len(),
        y_count: inputs.ones.len(),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Argmax {
    pub x: usize,
    pub y: usize,
    /// Leaf position as `n * h` bits, first block most significant.
    pub i: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbainisReport {
    pub nu: f64,
    /// `1 / nu`, a lower-bound estimate without constant factors.
    pub bound: f64,
    pub argmax: Argmax,
    pub theta_x: f64,
    pub theta_y: f64,
    /// Largest `theta(x, i) theta(y, i)` over admissible triples.
    pub max_theta_product: f64,
    pub x_count: usize,
    pub y_count: usize,
    pub related_pairs: usize,
}

/// `theta(x, i)` divides by `sum_y R(x, y)` and `theta(y, i)` by
/// `sum_x R(x, y)`.
pub fn ambainis_bound(inputs: &PromiseInputSet, r: &RelationMatrix) -> Result<AmbainisReport> {
    let width = inputs.zeros.first().map_or(0, |x| x.leaves.len());
    let mut row = vec![0.0; r.x_count];
    let mut col = vec![0.0; r.y_count];
    let mut num_x = vec![vec![0.0; width]; r.x_count];
    let mut num_y = vec![vec![0.0; width]; r.y_count];
    for (&(x, y), &w) in &r.entries {
        row[x] += w;
        col[y] += w;
        let (lx, ly) = (&inputs.zeros[x].leaves, &inputs.ones[y].leaves);
        for i in (0..width).filter(|&i| lx[i] != ly[i]) {
            num_x[x][i] += w;
            num_y[y][i] += w;
        }
    }

    let mut best: Option<(f64, usize, usize, usize, f64, f64)> = None;
    for (&(x, y), &w) in &r.entries {
        if w <= 0.0 {
            continue;
        }
        if row[x] <= 0.0 || col[y] <= 0.0 {
            return Err(Error::IllPosedRelation(format!(
                "zero denominator at pair ({x}, {y})"
            )));
        }
        let (lx, ly) = (&inputs.zeros[x].leaves, &inputs.ones[y].leaves);
        for i in (0..width).filter(|&i| lx[i] != ly[i]) {
            let tx = num_x[x][i] / row[x];
            let ty = num_y[y][i] / col[y];
            if best.is_none_or(|b| tx * ty > b.0) {
                best = Some((tx * ty, x, y, i, tx, ty));
            }
        }
    }
    let Some((product, x, y, i, theta_x, theta_y)) = best else {
        return Err(Error::IllPosedRelation(
            "no related pair disagrees at any leaf".into(),
        ));
    };
    let nu = product.sqrt();
    Ok(AmbainisReport {
        nu,
        bound: 1.0 / nu,
        argmax: Argmax {
            x,
            y,
            i: format_bits(i as u32, inputs.n * inputs.h),
        },
        theta_x,
        theta_y,
        max_theta_product: product,
        x_count: r.x_count,
        y_count: r.y_count,
        related_pairs: r.entries.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn or2() -> BooleanFunction {
        "or:2".parse().unwrap()
    }

    fn or_dists() -> (Distribution, Distribution) {
        (
            Distribution::point(2, 0).unwrap(),
            Distribution::uniform(2, &[1, 2, 3]).unwrap(),
        )
    }

    #[test]
    fn counts_at_height_one_and_two() {
        let one = enumerate_inputs(2, 1, &or2(), DEFAULT_INPUT_CAP).unwrap();
        assert_eq!((one.zeros.len(), one.ones.len()), (1, 3));
        let two = enumerate_inputs(2, 2, &or2(), DEFAULT_INPUT_CAP).unwrap();
        assert_eq!(two.zeros.len() + two.ones.len(), 28);
        // Root 00 forces four 0-children (one choice each).
        assert_eq!(two.zeros.len(), 1);
    }

    #[test]
    fn count_oracle() {
        // sum over root secrets s of prod_x |OR^-1(s . x)|: 1 for s = 00 and
        // 1 * 1 * 3 * 3 for each of the three nonzero s.
        let counts = subtree_counts(2, 2, &or2());
        assert_eq!(counts[0], [1, 27]);
    }

    #[test]
    fn constant_rejected() {
        let g: BooleanFunction = "const:2:c=0".parse().unwrap();
        assert!(matches!(
            enumerate_inputs(2, 1, &g, DEFAULT_INPUT_CAP),
            Err(Error::Unsatisfiable(_))
        ));
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            enumerate_inputs(2, 2, &or2(), 10),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn inputs_validate() {
        let g = or2();
        let set = enumerate_inputs(2, 2, &g, DEFAULT_INPUT_CAP).unwrap();
        for (want, input) in set
            .zeros
            .iter()
            .map(|x| (false, x))
            .chain(set.ones.iter().map(|y| (true, y)))
        {
            let inst = input.to_instance(2, 2, &g).unwrap();
            assert!(inst.validate(1 << 20).unwrap().is_empty());
            assert_eq!(inst.answer().unwrap(), want);
            assert_eq!(inst.leaf_table(1 << 20).unwrap(), input.leaves);
        }
    }

    #[test]
    fn weights() {
        let (d0, d1) = or_dists();
        let one = enumerate_inputs(2, 1, &or2(), DEFAULT_INPUT_CAP).unwrap();
        assert_eq!(weight(&one.zeros[0], &d0, &d1), 1.0);
        assert!((weight(&one.ones[0], &d0, &d1) - 1.0 / 3.0).abs() < 1e-15);
        let two = enumerate_inputs(2, 2, &or2(), DEFAULT_INPUT_CAP).unwrap();
        // Root 11 and children 00, 11, 11, 00 (child bits 0, 1, 1, 0).
        let y = two
            .ones
            .iter()
            .find(|y| y.tree.secrets() == [3, 0, 3, 3, 0])
            .unwrap();
        assert!((weight(y, &d0, &d1) - 1.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn minimal_differences() {
        let one = enumerate_inputs(2, 1, &or2(), DEFAULT_INPUT_CAP).unwrap();
        for y in &one.ones {
            assert!(differ_minimally(&one.zeros[0], y).unwrap());
        }
        let two = enumerate_inputs(2, 2, &or2(), DEFAULT_INPUT_CAP).unwrap();
        let x = &two.zeros[0];
        // Root 01: children 0 and 2 keep answer 0 and secret 00, children 1
        // and 3 flip to 1.
        let pick = |secrets: [u32; 5]| {
            two.ones
                .iter()
                .find(|y| y.tree.secrets() == secrets)
                .unwrap()
        };
        assert!(differ_minimally(x, pick([1, 0, 1, 0, 2])).unwrap());
        let other = enumerate_inputs(2, 1, &or2(), DEFAULT_INPUT_CAP).unwrap();
        assert!(differ_minimally(x, &other.ones[0]).is_err());
    }

    #[test]
    fn agreeing_child_must_match() {
        // AND has three 0-secrets, so agreeing children can differ. Oracle:
        // at h = 2 the pair differs minimally iff every child with equal
        // answer bits carries the same secret.
        let g: BooleanFunction = "and:2".parse().unwrap();
        let set = enumerate_inputs(2, 2, &g, DEFAULT_INPUT_CAP).unwrap();
        let (mut yes, mut no) = (0, 0);
        for x in &set.zeros {
            for y in &set.ones {
                let (sx, sy) = (x.tree.secrets(), y.tree.secrets());
                let want = (1..5).all(|c| {
                    g.evaluate(sx[c]).unwrap() != g.evaluate(sy[c]).unwrap() || sx[c] == sy[c]
                });
                assert_eq!(differ_minimally(x, y).unwrap(), want);
                if want {
                    yes += 1;
                } else {
                    no += 1;
                }
            }
        }
        assert!(yes > 0 && no > 0);
    }

    #[test]
    fn height_one_relation() {
        let (d0, d1) = or_dists();
        let set = enumerate_inputs(2, 1, &or2(), DEFAULT_INPUT_CAP).unwrap();
        let r = build_relation(&set, &d0, &d1).unwrap();
        assert_eq!(r.entries.len(), 3);
        for j in 0..3 {
            assert!((r.get(0, j) - 1.0 / 3.0).abs() < 1e-15);
            assert_eq!(r.between(Member::One(j), Member::Zero(0)), r.get(0, j));
        }
        let report = ambainis_bound(&set, &r).unwrap();
        assert!((report.bound - 1.5f64.sqrt()).abs() < 1e-12, "{report:?}");
        assert!((report.max_theta_product - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn height_two_bound() {
        let (d0, d1) = or_dists();
        let set = enumerate_inputs(2, 2, &or2(), DEFAULT_INPUT_CAP).unwrap();
        let r = build_relation(&set, &d0, &d1).unwrap();
        let report = ambainis_bound(&set, &r).unwrap();
        assert!(report.bound >= 1.5 - 1e-6, "{report:?}");
        assert!(report.max_theta_product <= (2.0f64 / 3.0).powi(2) + 1e-9);
    }

    #[test]
    fn empty_relation_is_ill_posed() {
        let set = enumerate_inputs(2, 1, &or2(), DEFAULT_INPUT_CAP).unwrap();
        let r = RelationMatrix {
            x_count: 1,
            y_count: 3,
            entries: BTreeMap::new(),
        };
        assert!(matches!(
            ambainis_bound(&set, &r),
            Err(Error::IllPosedRelation(_))
        ));
    }
}
