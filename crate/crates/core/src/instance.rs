// SPDX-License-Identifier: Apache-2.0

//! Promise-consistent RFS instances and a query-counting leaf oracle.
//!
//! A height-`h` instance assigns a secret string to every internal node of a
//! tree whose edges are labelled by `n`-bit strings. The node reached by path
//! `(x1..xl)` with `l >= 1` must satisfy `g(secret) = parent_secret . xl`,
//! and the leaf oracle answers `A(x1..xh) = secret(x1..x_{h-1}) . xh`.
//!
//! Secrets are derived from `(seed, path)` alone: a keyed hash of the path
//! seeds a ChaCha stream whose first draw indexes the sorted preimage class
//! the promise demands. Lazy instances run the derivation on demand; explicit
//! ones store its output (or whatever a hand-written file says).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{dot, format_bits, parse_bits, BooleanFunction};
use crate::error::{Error, Result};

/// Edge labels from the root, one `n`-bit string per level.
pub type NodePath = Vec<u32>;

/// Default limit on the number of deepest internal nodes materialized.
pub const DEFAULT_MATERIALIZE_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecretStore {
    Explicit(BTreeMap<NodePath, u32>),
    Lazy { answer: Option<bool> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RfsInstance {
    n: usize,
    h: usize,
    g: BooleanFunction,
    seed: u64,
    store: SecretStore,
    zeros: Vec<u32>,
    ones: Vec<u32>,
    defined: Vec<u32>,
}

/// A node at which the instance breaks its promise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `g(secret)` differs from `parent_secret . edge`.
    Promise {
        path: String,
        expected: bool,
        got: bool,
    },
    MissingSecret {
        path: String,
    },
    OutsideDomain {
        path: String,
        secret: String,
    },
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn node_key(seed: u64, path: &[u32]) -> u64 {
    let mut k = mix64(seed ^ mix64(path.len() as u64));
    for &x in path {
        k = mix64(k ^ u64::from(x));
    }
    k
}

/// Number of nodes at depth `h - 1`, i.e. `2^(n(h-1))`.
fn deepest_internal_nodes(n: usize, h: usize) -> Option<u128> {
    let bits = n.checked_mul(h - 1)?;
    (bits < 128).then(|| 1u128 << bits)
}

pub fn format_path(path: &[u32], n: usize) -> String {
    path.iter()
        .map(|&x| format_bits(x, n))
        .collect::<Vec<_>>()
        .join("/")
}

pub fn parse_path(text: &str, n: usize) -> Result<NodePath> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split('/').map(|part| parse_bits(part, n)).collect()
}

impl RfsInstance {
    fn bare(
        n: usize,
        h: usize,
        g: &BooleanFunction,
        seed: u64,
        store: SecretStore,
    ) -> Result<Self> {
        if g.arity() != n {
            return Err(Error::Arity {
                expected: n,
                got: g.arity(),
            });
        }
        if h == 0 {
            return Err(Error::ShapeMismatch("height must be at least 1".into()));
        }
        Ok(Self {
            n,
            h,
            g: g.clone(),
            seed,
            store,
            zeros: g.preimage(false),
            ones: g.preimage(true),
            defined: g.domain().collect(),
        })
    }

    fn check_satisfiable(g: &BooleanFunction, answer: Option<bool>) -> Result<()> {
        if g.is_constant() {
            return Err(Error::Unsatisfiable(format!(
                "`{g}` is constant on its domain, one preimage class is empty"
            )));
        }
        if let Some(b) = answer {
            if g.preimage(b).is_empty() {
                return Err(Error::Unsatisfiable(format!("g^-1({}) is empty", b as u8)));
            }
        }
        Ok(())
    }

    /// Lazy instance: secrets derived on demand from `(seed, path)`.
    pub fn generate_lazy(
        n: usize,
        h: usize,
        g: &BooleanFunction,
        seed: u64,
        answer: Option<bool>,
    ) -> Result<Self> {
        Self::check_satisfiable(g, answer)?;
        Self::bare(n, h, g, seed, SecretStore::Lazy { answer })
    }

    /// Explicit instance with every secret materialized.
    pub fn generate(
        n: usize,
        h: usize,
        g: &BooleanFunction,
        seed: u64,
        answer: Option<bool>,
    ) -> Result<Self> {
        Self::generate_lazy(n, h, g, seed, answer)?.materialize(DEFAULT_MATERIALIZE_CAP)
    }

    /// Hand-built explicit instance; call [`validate`](Self::validate) to
    /// check the promise.
    pub fn from_secrets(
        n: usize,
        h: usize,
        g: &BooleanFunction,
        seed: u64,
        secrets: BTreeMap<NodePath, u32>,
    ) -> Result<Self> {
        for (path, &s) in &secrets {
            if path.len() >= h || path.iter().chain([&s]).any(|&x| x >> n != 0) {
                return Err(Error::ShapeMismatch(format!(
                    "secret at path {:?} does not fit n={n}, h={h}",
                    path
                )));
            }
        }
        Self::bare(n, h, g, seed, SecretStore::Explicit(secrets))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn function(&self) -> &BooleanFunction {
        &self.g
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.store, SecretStore::Lazy { .. })
    }

    pub fn store(&self) -> &SecretStore {
        &self.store
    }

    fn derive(&self, path: &[u32], root_answer: Option<bool>) -> Result<u32> {
        let class = match path.split_last() {
            None => match root_answer {
                Some(false) => &self.zeros,
                Some(true) => &self.ones,
                None => &self.defined,
            },
            Some((&edge, parent)) => {
                let parent_secret = self.derive(parent, root_answer)?;
                if dot(parent_secret, edge) {
                    &self.ones
                } else {
                    &self.zeros
                }
            }
        };
        if class.is_empty() {
            return Err(Error::Unsatisfiable(format!(
                "empty preimage class at path {}",
                format_path(path, self.n)
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(node_key(self.seed, path));
        Ok(class[rng.gen_range(0..class.len())])
    }

    /// Secret string at the node reached by `path` (`path.len() < h`).
    pub fn secret(&self, path: &[u32]) -> Result<u32> {
        if path.len() >= self.h {
            return Err(Error::Arity {
                expected: self.h - 1,
                got: path.len(),
            });
        }
        if let Some(&x) = path.iter().find(|&&x| x >> self.n != 0) {
            return Err(Error::Arity {
                expected: self.n,
                got: (32 - x.leading_zeros()) as usize,
            });
        }
        match &self.store {
            SecretStore::Explicit(map) => map.get(path).copied().ok_or_else(|| {
                Error::ShapeMismatch(format!("no secret at path `{}`", format_path(path, self.n)))
            }),
            SecretStore::Lazy { answer } => self.derive(path, *answer),
        }
    }

    /// Overwrite one secret. Explicit instances only.
    pub fn set_secret(&mut self, path: &[u32], s: u32) -> Result<()> {
        if path.len() >= self.h || s >> self.n != 0 {
            return Err(Error::ShapeMismatch("path or secret out of shape".into()));
        }
        match &mut self.store {
            SecretStore::Explicit(map) => {
                map.insert(path.to_vec(), s);
                Ok(())
            }
            SecretStore::Lazy { .. } => Err(Error::ShapeMismatch(
                "cannot edit a lazy instance; materialize it first".into(),
            )),
        }
    }

    /// Leaf value `A(x1..xh)`, not counted. Use an [`OracleHandle`] for
    /// counted access.
    pub fn leaf(&self, xs: &[u32]) -> Result<bool> {
        if xs.len() != self.h {
            return Err(Error::Arity {
                expected: self.h,
                got: xs.len(),
            });
        }
        let (&last, parent) = xs.split_last().unwrap();
        if last >> self.n != 0 {
            return Err(Error::Arity {
                expected: self.n,
                got: (32 - last.leading_zeros()) as usize,
            });
        }
        Ok(dot(self.secret(parent)?, last))
    }

    /// Split an `n*h`-bit leaf index into `(x1..xh)`, `x1` most significant.
    pub fn split_leaf_index(&self, index: u64) -> Result<Vec<u32>> {
        let bits = self.n * self.h;
        if bits > 64 || (bits < 64 && index >> bits != 0) {
            return Err(Error::Arity {
                expected: bits,
                got: (64 - index.leading_zeros()) as usize,
            });
        }
        let mask = (1u64 << self.n) - 1;
        Ok((0..self.h)
            .map(|j| ((index >> (self.n * (self.h - 1 - j))) & mask) as u32)
            .collect())
    }

    /// Full leaf table indexed by the `n*h`-bit leaf index.
    pub fn leaf_table(&self, cap: u128) -> Result<Vec<bool>> {
        let bits = self.n * self.h;
        let size = if bits < 128 { 1u128 << bits } else { u128::MAX };
        if size > cap {
            return Err(Error::TooLarge {
                what: "leaf table",
                size,
                cap,
            });
        }
        let leaves_per_node = 1usize << self.n;
        let mut table = Vec::with_capacity(size as usize);
        for parent in self.paths_at_depth(self.h - 1) {
            let s = self.secret(&parent)?;
            table.extend((0..leaves_per_node as u32).map(|x| dot(s, x)));
        }
        Ok(table)
    }

    /// `g(root secret)`.
    pub fn answer(&self) -> Result<bool> {
        self.g.evaluate(self.secret(&[])?)
    }

    // All paths of a given depth in increasing lexicographic order.
    fn paths_at_depth(&self, depth: usize) -> impl Iterator<Item = NodePath> + '_ {
        let n = self.n;
        let total = 1u128 << (n * depth);
        (0..total).map(move |code| {
            (0..depth)
                .map(|j| ((code >> (n * (depth - 1 - j))) & ((1 << n) - 1)) as u32)
                .collect()
        })
    }

    /// Copy with every secret stored explicitly.
    pub fn materialize(&self, cap: u128) -> Result<Self> {
        self.check_cap(cap)?;
        let mut secrets = BTreeMap::new();
        for depth in 0..self.h {
            for path in self.paths_at_depth(depth) {
                let s = self.secret(&path)?;
                secrets.insert(path, s);
            }
        }
        let mut out = self.clone();
        out.store = SecretStore::Explicit(secrets);
        Ok(out)
    }

    fn check_cap(&self, cap: u128) -> Result<()> {
        match deepest_internal_nodes(self.n, self.h) {
            Some(size) if size <= cap => Ok(()),
            size => Err(Error::TooLarge {
                what: "secret tree",
                size: size.unwrap_or(u128::MAX),
                cap,
            }),
        }
    }

    /// Every promise violation, one record per failing node.
    pub fn validate(&self, cap: u128) -> Result<Vec<Violation>> {
        self.check_cap(cap)?;
        let mut violations = Vec::new();
        for depth in 0..self.h {
            for path in self.paths_at_depth(depth) {
                let label = format_path(&path, self.n);
                let s = match self.secret(&path) {
                    Ok(s) => s,
                    Err(_) => {
                        violations.push(Violation::MissingSecret { path: label });
                        continue;
                    }
                };
                let Ok(got) = self.g.evaluate(s) else {
                    violations.push(Violation::OutsideDomain {
                        path: label,
                        secret: format_bits(s, self.n),
                    });
                    continue;
                };
                if let Some((&edge, parent)) = path.split_last() {
                    if let Ok(ps) = self.secret(parent) {
                        let expected = dot(ps, edge);
                        if expected != got {
                            violations.push(Violation::Promise {
                                path: label,
                                expected,
                                got,
                            });
                        }
                    }
                }
            }
        }
        Ok(violations)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&InstanceDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<InstanceDoc>(text)?.try_into()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Explicit,
    Lazy,
}

/// On-disk instance format.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n: usize,
    h: usize,
    g: BooleanFunction,
    mode: Mode,
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    answer: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    secrets: Option<BTreeMap<String, String>>,
}

impl From<&RfsInstance> for InstanceDoc {
    fn from(inst: &RfsInstance) -> Self {
        let (mode, answer, secrets) = match &inst.store {
            SecretStore::Explicit(map) => (
                Mode::Explicit,
                None,
                Some(
                    map.iter()
                        .map(|(p, &s)| (format_path(p, inst.n), format_bits(s, inst.n)))
                        .collect(),
                ),
            ),
            SecretStore::Lazy { answer } => (Mode::Lazy, answer.map(u8::from), None),
        };
        InstanceDoc {
            n: inst.n,
            h: inst.h,
            g: inst.g.clone(),
            mode,
            seed: inst.seed,
            answer,
            secrets,
        }
    }
}

impl TryFrom<InstanceDoc> for RfsInstance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        match (doc.mode, doc.secrets) {
            (Mode::Explicit, Some(secrets)) => {
                if doc.answer.is_some() {
                    return Err(Error::Json("`answer` is only valid in lazy mode".into()));
                }
                let secrets = secrets
                    .iter()
                    .map(|(p, s)| Ok((parse_path(p, doc.n)?, parse_bits(s, doc.n)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                RfsInstance::from_secrets(doc.n, doc.h, &doc.g, doc.seed, secrets)
            }
            (Mode::Lazy, None) => {
                let answer = match doc.answer {
                    None => None,
                    Some(0) => Some(false),
                    Some(1) => Some(true),
                    Some(other) => {
                        return Err(Error::Json(format!("`answer` must be 0 or 1, got {other}")))
                    }
                };
                RfsInstance::generate_lazy(doc.n, doc.h, &doc.g, doc.seed, answer)
            }
            (Mode::Explicit, None) => Err(Error::Json("explicit mode requires `secrets`".into())),
            (Mode::Lazy, Some(_)) => Err(Error::Json("lazy mode must not carry `secrets`".into())),
        }
    }
}

/// Counted access to an instance's leaf oracle.
#[derive(Debug)]
pub struct OracleHandle<'a> {
    instance: &'a RfsInstance,
    queries: u64,
}

impl<'a> OracleHandle<'a> {
    pub fn new(instance: &'a RfsInstance) -> Self {
        Self::resume(instance, 0)
    }

    /// Continue counting from an earlier handle's total.
    pub fn resume(instance: &'a RfsInstance, queries: u64) -> Self {
        Self { instance, queries }
    }

    pub fn instance(&self) -> &'a RfsInstance {
        self.instance
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn query(&mut self, xs: &[u32]) -> Result<bool> {
        let bit = self.instance.leaf(xs)?;
        self.queries += 1;
        Ok(bit)
    }

    pub fn query_index(&mut self, index: u64) -> Result<bool> {
        let xs = self.instance.split_leaf_index(index)?;
        self.query(&xs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn or2() -> BooleanFunction {
        "or:2".parse().unwrap()
    }

    #[test]
    fn generate_root_in_requested_class() {
        for seed in 0..20 {
            let inst = RfsInstance::generate(2, 1, &or2(), seed, Some(true)).unwrap();
            assert!([1, 2, 3].contains(&inst.secret(&[]).unwrap()));
            assert!(inst.answer().unwrap());
        }
    }

    #[test]
    fn constant_function_is_unsatisfiable() {
        let c0: BooleanFunction = "const:2:c=0".parse().unwrap();
        assert!(matches!(
            RfsInstance::generate(2, 1, &c0, 0, Some(true)),
            Err(Error::Unsatisfiable(_))
        ));
        assert!(matches!(
            RfsInstance::generate(2, 1, &c0, 0, None),
            Err(Error::Unsatisfiable(_))
        ));
    }

    #[test]
    fn query_examples() {
        let mut secrets = BTreeMap::new();
        secrets.insert(vec![], 0b11);
        let inst = RfsInstance::from_secrets(2, 1, &or2(), 0, secrets).unwrap();
        let mut handle = OracleHandle::new(&inst);
        assert_eq!(handle.queries(), 0);
        assert!(handle.query(&[0b10]).unwrap());
        assert_eq!(handle.queries(), 1);
        assert!(!handle.query(&[0b11]).unwrap());
        assert_eq!(handle.queries(), 2);
        assert!(matches!(
            handle.query(&[0b1, 0b1]),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(handle.query(&[0b100]), Err(Error::Arity { .. })));
        assert_eq!(handle.queries(), 2);
    }

    #[test]
    fn answer_examples() {
        for (s, want) in [(0b11, true), (0b00, false)] {
            let inst =
                RfsInstance::from_secrets(2, 1, &or2(), 0, BTreeMap::from([(vec![], s)])).unwrap();
            assert_eq!(inst.answer().unwrap(), want);
        }
        let g: BooleanFunction = "gmod3:6".parse().unwrap();
        let inst =
            RfsInstance::from_secrets(6, 1, &g, 0, BTreeMap::from([(vec![], 0b111000)])).unwrap();
        assert!(!inst.answer().unwrap());
    }

    #[test]
    fn validate_detects_mutation() {
        let mut inst = RfsInstance::generate(2, 2, &or2(), 3, Some(true)).unwrap();
        assert!(inst.validate(DEFAULT_MATERIALIZE_CAP).unwrap().is_empty());
        let root = inst.secret(&[]).unwrap();
        // Pick an edge whose required class is 1 and force a 0-input there.
        let edge = (0..4).find(|&x| dot(root, x)).unwrap();
        inst.set_secret(&[edge], 0).unwrap();
        let v = inst.validate(DEFAULT_MATERIALIZE_CAP).unwrap();
        assert_eq!(
            v,
            vec![Violation::Promise {
                path: format_bits(edge, 2),
                expected: true,
                got: false
            }]
        );
    }

    #[test]
    fn validate_reports_missing_and_out_of_domain() {
        let g: BooleanFunction = "table:2:0*11".parse().unwrap();
        let inst =
            RfsInstance::from_secrets(2, 2, &g, 0, BTreeMap::from([(vec![], 0b01)])).unwrap();
        let v = inst.validate(DEFAULT_MATERIALIZE_CAP).unwrap();
        assert_eq!(
            v,
            vec![
                Violation::OutsideDomain {
                    path: String::new(),
                    secret: "01".into()
                },
                Violation::MissingSecret { path: "00".into() },
                Violation::MissingSecret { path: "01".into() },
                Violation::MissingSecret { path: "10".into() },
                Violation::MissingSecret { path: "11".into() },
            ]
        );
    }

    #[test]
    fn validate_cap() {
        let inst = RfsInstance::generate_lazy(4, 3, &"or:4".parse().unwrap(), 0, None).unwrap();
        assert!(matches!(inst.validate(100), Err(Error::TooLarge { .. })));
        assert!(inst.validate(256).unwrap().is_empty());
    }

    #[test]
    fn height_one_has_no_edges() {
        let inst = RfsInstance::generate(3, 1, &"gmod3:3".parse().unwrap(), 9, None).unwrap();
        assert!(inst.validate(DEFAULT_MATERIALIZE_CAP).unwrap().is_empty());
    }

    #[test]
    fn count_valid_or_instances_by_brute_force() {
        // Enumerate all 4^5 secret assignments for n=2, h=2 and keep the
        // ones that satisfy the promise.
        let g = or2();
        let mut valid = 0;
        for code in 0..1u32 << 10 {
            let mut secrets = BTreeMap::new();
            secrets.insert(vec![], code & 3);
            for x in 0..4u32 {
                secrets.insert(vec![x], (code >> (2 + 2 * x)) & 3);
            }
            let inst = RfsInstance::from_secrets(2, 2, &g, 0, secrets).unwrap();
            if inst.validate(DEFAULT_MATERIALIZE_CAP).unwrap().is_empty() {
                valid += 1;
            }
        }
        assert_eq!(valid, 28);
    }

    #[test]
    fn lazy_matches_explicit() {
        let g: BooleanFunction = "gmod3:3".parse().unwrap();
        let lazy = RfsInstance::generate_lazy(3, 2, &g, 42, Some(false)).unwrap();
        let explicit = RfsInstance::generate(3, 2, &g, 42, Some(false)).unwrap();
        assert_eq!(
            lazy.leaf_table(1 << 20).unwrap(),
            explicit.leaf_table(1 << 20).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let inst = RfsInstance::generate(2, 2, &or2(), 5, None).unwrap();
        let text = inst.to_json().unwrap();
        assert!(text
            .starts_with(r#"{"n":2,"h":2,"g":"or:2","mode":"explicit","seed":5,"secrets":{"":"#));
        assert_eq!(RfsInstance::from_json(&text).unwrap(), inst);
        let lazy = RfsInstance::generate_lazy(2, 3, &or2(), 5, Some(true)).unwrap();
        let text = lazy.to_json().unwrap();
        assert_eq!(
            text,
            r#"{"n":2,"h":3,"g":"or:2","mode":"lazy","seed":5,"answer":1}"#
        );
        assert_eq!(RfsInstance::from_json(&text).unwrap(), lazy);
    }

    #[test]
    fn json_rejects_bad_documents() {
        for text in [
            r#"{"n":2,"h":1,"g":"or:2","mode":"explicit","seed":0}"#,
            r#"{"n":2,"h":1,"g":"or:2","mode":"lazy","seed":0,"secrets":{}}"#,
            r#"{"n":2,"h":1,"g":"or:2","mode":"explicit","seed":0,"secrets":{"":"1"}}"#,
            r#"{"n":2,"h":1,"g":"or:2","mode":"explicit","seed":0,"secrets":{"01":"11"}}"#,
            r#"{"n":3,"h":1,"g":"or:2","mode":"lazy","seed":0}"#,
        ] {
            assert!(RfsInstance::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn leaf_index_layout() {
        let inst = RfsInstance::generate(2, 2, &or2(), 1, None).unwrap();
        assert_eq!(inst.split_leaf_index(0b01_10).unwrap(), vec![0b01, 0b10]);
        let table = inst.leaf_table(1 << 20).unwrap();
        for idx in 0..16u64 {
            let xs = inst.split_leaf_index(idx).unwrap();
            assert_eq!(table[idx as usize], inst.leaf(&xs).unwrap());
        }
    }
}
