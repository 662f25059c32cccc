// SPDX-License-Identifier: Apache-2.0

//! Inner Boolean functions `g: {0,1}^n -> {0,1}`, total or partial.
//!
//! Bit strings are stored as `u32` values. Position 1 of a string is the most
//! significant of its `n` bits, so the string `10` is the integer 2 and truth
//! tables list outputs in increasing integer order (`00, 01, 10, 11`).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported arity.
pub const MAX_ARITY: usize = 24;

/// Inner product of two bit strings mod 2.
#[inline]
pub fn dot(a: u32, b: u32) -> bool {
    (a & b).count_ones() & 1 == 1
}

/// Hamming weight.
#[inline]
pub fn weight(s: u32) -> u32 {
    s.count_ones()
}

/// The basis string `e_i` (1-based position `i`).
pub fn basis(i: usize, n: usize) -> u32 {
    assert!(i >= 1 && i <= n, "basis position {i} out of 1..={n}");
    1 << (n - i)
}

/// Render `s` as `n` characters, position 1 first.
pub fn format_bits(s: u32, n: usize) -> String {
    (1..=n)
        .map(|i| if s & basis(i, n) != 0 { '1' } else { '0' })
        .collect()
}

/// Parse an `n`-character 0/1 string.
pub fn parse_bits(text: &str, n: usize) -> Result<u32> {
    if text.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: text.len(),
        });
    }
    text.chars().try_fold(0u32, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::Parse {
            token: text.to_string(),
            reason: format!("unexpected character `{ch}` in bit string"),
        }),
    })
}

/// `g(s) = (s . z) xor c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityForm {
    pub z: u32,
    pub c: bool,
}

impl ParityForm {
    pub fn new(z: u32, c: bool) -> Self {
        Self { z, c }
    }

    pub fn eval(&self, s: u32) -> bool {
        dot(s, self.z) ^ self.c
    }
}

/// Truth table of a Boolean function, optionally restricted to a domain.
#[derive(Clone)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<bool>,
    domain: Option<Vec<bool>>,
    label: Option<String>,
}

impl PartialEq for BooleanFunction {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table_on_domain() == other.table_on_domain()
    }
}

impl Eq for BooleanFunction {}

impl Hash for BooleanFunction {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.table_on_domain().hash(state);
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction({})", self.spec())
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::Parse {
            token: n.to_string(),
            reason: format!("arity must be in 1..={MAX_ARITY}"),
        });
    }
    Ok(())
}

impl BooleanFunction {
    pub fn total(n: usize, table: Vec<bool>) -> Result<Self> {
        check_arity(n)?;
        if table.len() != 1 << n {
            return Err(Error::Arity {
                expected: 1 << n,
                got: table.len(),
            });
        }
        Ok(Self {
            n,
            table,
            domain: None,
            label: None,
        })
    }

    /// A partial function. Table entries outside `domain` are ignored.
    pub fn partial(n: usize, table: Vec<bool>, domain: Vec<bool>) -> Result<Self> {
        let mut f = Self::total(n, table)?;
        if domain.len() != f.table.len() {
            return Err(Error::Arity {
                expected: f.table.len(),
                got: domain.len(),
            });
        }
        if !domain.iter().any(|&d| d) {
            return Err(Error::Parse {
                token: "domain".into(),
                reason: "domain must be nonempty".into(),
            });
        }
        // Normalize so that equality only sees defined points.
        for (t, &d) in f.table.iter_mut().zip(&domain) {
            if !d {
                *t = false;
            }
        }
        if domain.iter().all(|&d| d) {
            return Ok(f);
        }
        f.domain = Some(domain);
        Ok(f)
    }

    pub fn from_fn(n: usize, f: impl Fn(u32) -> bool) -> Result<Self> {
        check_arity(n)?;
        Self::total(n, (0..1u32 << n).map(f).collect())
    }

    /// Named constructors: `or`, `and`, `gmod3`, `parity`, `const`.
    pub fn builtin(name: &str, n: usize, params: Option<ParityForm>) -> Result<Self> {
        check_arity(n)?;
        let needs_params = matches!(name, "parity" | "const");
        if needs_params != params.is_some() {
            return Err(Error::Parse {
                token: name.to_string(),
                reason: if needs_params {
                    "missing parameters".into()
                } else {
                    "function takes no parameters".into()
                },
            });
        }
        let f = match name {
            "or" => Self::from_fn(n, |s| s != 0)?,
            "and" => Self::from_fn(n, |s| s == (1u32 << n) - 1)?,
            "gmod3" => Self::from_fn(n, |s| !weight(s).is_multiple_of(3))?,
            "parity" => {
                let form = params.unwrap();
                if form.z >> n != 0 {
                    return Err(Error::Arity {
                        expected: n,
                        got: (32 - form.z.leading_zeros()) as usize,
                    });
                }
                Self::from_fn(n, |s| form.eval(s))?
            }
            "const" => {
                let c = params.unwrap().c;
                Self::from_fn(n, |_| c)?
            }
            other => return Err(Error::UnknownFunction(other.to_string())),
        };
        Ok(f)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn is_total(&self) -> bool {
        self.domain.is_none()
    }

    pub fn is_defined(&self, s: u32) -> bool {
        (s as usize) < self.table.len() && self.domain.as_ref().is_none_or(|d| d[s as usize])
    }

    pub fn evaluate(&self, s: u32) -> Result<bool> {
        if (s as usize) >= self.table.len() {
            return Err(Error::Arity {
                expected: self.n,
                got: (32 - s.leading_zeros()) as usize,
            });
        }
        if !self.is_defined(s) {
            return Err(Error::UndefinedPoint {
                input: format_bits(s, self.n),
            });
        }
        Ok(self.table[s as usize])
    }

    /// Evaluate on a textual bit string.
    pub fn evaluate_str(&self, s: &str) -> Result<bool> {
        self.evaluate(parse_bits(s, self.n)?)
    }

    /// Defined inputs in increasing order.
    pub fn domain(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.table.len() as u32).filter(move |&s| self.is_defined(s))
    }

    /// Sorted `g^{-1}(bit)` restricted to the domain.
    pub fn preimage(&self, bit: bool) -> Vec<u32> {
        self.domain()
            .filter(|&s| self.table[s as usize] == bit)
            .collect()
    }

    /// Constant on its domain.
    pub fn is_constant(&self) -> bool {
        let mut it = self.domain().map(|s| self.table[s as usize]);
        let first = it.next();
        it.all(|b| Some(b) == first)
    }

    /// First `(z, c)` in lexicographic order with `g(s) = s.z xor c` on the
    /// whole domain.
    pub fn is_parity(&self) -> Option<ParityForm> {
        let defined: Vec<u32> = self.domain().collect();
        for z in 0..self.table.len() as u32 {
            for c in [false, true] {
                let form = ParityForm::new(z, c);
                if defined
                    .iter()
                    .all(|&s| self.table[s as usize] == form.eval(s))
                {
                    return Some(form);
                }
            }
        }
        None
    }

    /// `s -> g(s xor t)`.
    pub fn translate(&self, t: u32) -> Self {
        self.remap(|s| s ^ t)
    }

    /// `s -> not g(s)`.
    pub fn complement(&self) -> Self {
        let mut f = self.clone();
        f.label = None;
        for (s, v) in f.table.iter_mut().enumerate() {
            if self.is_defined(s as u32) {
                *v = !*v;
            }
        }
        f
    }

    /// `s -> g(s')` where position `i` of `s` lands at position `perm[i]` of
    /// `s'` (0-based from the most significant bit).
    pub fn permute_inputs(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        self.remap(|s| {
            let mut out = 0;
            for (i, &p) in perm.iter().enumerate() {
                if s & basis(i + 1, n) != 0 {
                    out |= basis(p + 1, n);
                }
            }
            out
        })
    }

    // New function f with f(s) = self(map(s)); `map` must be a bijection.
    fn remap(&self, map: impl Fn(u32) -> u32) -> Self {
        let size = self.table.len();
        let mut table = vec![false; size];
        let mut domain = vec![true; size];
        for s in 0..size as u32 {
            let m = map(s) as usize;
            table[s as usize] = self.table[m];
            domain[s as usize] = self.is_defined(m as u32);
        }
        Self::partial(self.n, table, domain).expect("bijection preserves shape")
    }

    fn table_on_domain(&self) -> Vec<Option<bool>> {
        (0..self.table.len() as u32)
            .map(|s| self.is_defined(s).then(|| self.table[s as usize]))
            .collect()
    }

    /// Truth table as hex, first digit's high bit holding `g(0...0)`.
    /// Undefined points read as 0.
    pub fn to_hex(&self) -> String {
        let digits = self.table.len().div_ceil(4);
        (0..digits)
            .map(|d| {
                let nibble = (0..4).fold(0u32, |acc, k| {
                    let idx = d * 4 + k;
                    let bit =
                        idx < self.table.len() && self.is_defined(idx as u32) && self.table[idx];
                    (acc << 1) | bit as u32
                });
                char::from_digit(nibble, 16).unwrap().to_ascii_uppercase()
            })
            .collect()
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        check_arity(n)?;
        let size = 1usize << n;
        let digits = size.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Parse {
                token: hex.to_string(),
                reason: format!("expected {digits} hex digits for arity {n}"),
            });
        }
        let mut table = Vec::with_capacity(digits * 4);
        for ch in hex.chars() {
            let v = ch.to_digit(16).ok_or_else(|| Error::Parse {
                token: hex.to_string(),
                reason: format!("`{ch}` is not a hex digit"),
            })?;
            table.extend((0..4).rev().map(|k| v >> k & 1 == 1));
        }
        if table[size..].iter().any(|&b| b) {
            return Err(Error::Parse {
                token: hex.to_string(),
                reason: "padding bits must be zero".into(),
            });
        }
        table.truncate(size);
        Self::total(n, table)
    }

    /// Canonical spec string: `table:N:bits`, with `*` at undefined points.
    pub fn canonical_spec(&self) -> String {
        let bits: String = (0..self.table.len() as u32)
            .map(
                |s| match self.is_defined(s).then(|| self.table[s as usize]) {
                    Some(true) => '1',
                    Some(false) => '0',
                    None => '*',
                },
            )
            .collect();
        format!("table:{}:{}", self.n, bits)
    }

    /// The spec string this function was parsed from, or the canonical one.
    pub fn spec(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.canonical_spec())
    }

    fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }
}

fn parse_usize(token: &str) -> Result<usize> {
    token.parse().map_err(|_| Error::Parse {
        token: token.to_string(),
        reason: "expected a positive integer".into(),
    })
}

fn parse_bit(token: &str) -> Result<bool> {
    match token {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::Parse {
            token: token.to_string(),
            reason: "expected 0 or 1".into(),
        }),
    }
}

// `z=11,c=0`, either order; `c` defaults to 0 and `z` to the zero string.
fn parse_form(token: &str, n: usize) -> Result<ParityForm> {
    let mut form = ParityForm::new(0, false);
    for part in token.split(',') {
        match part.split_once('=') {
            Some(("z", bits)) => form.z = parse_bits(bits, n)?,
            Some(("c", bit)) => form.c = parse_bit(bit)?,
            _ => {
                return Err(Error::Parse {
                    token: part.to_string(),
                    reason: "expected `z=<bits>` or `c=<bit>`".into(),
                })
            }
        }
    }
    Ok(form)
}

impl FromStr for BooleanFunction {
    type Err = Error;

    /// Accepts `or:2`, `and:3`, `gmod3:6`, `parity:2:z=11,c=0`,
    /// `const:2:c=1`, `table:2:0111` (with `*` for undefined points) and
    /// `table-hex:4:7FFF`.
    fn from_str(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let name = parts[0];
        let n_token = parts.get(1).ok_or_else(|| Error::Parse {
            token: spec.to_string(),
            reason: "expected `<name>:<arity>[:<params>]`".into(),
        })?;
        let n = parse_usize(n_token)?;
        check_arity(n)?;
        let param = parts.get(2).copied();
        if parts.len() > 3 {
            return Err(Error::Parse {
                token: parts[3].to_string(),
                reason: "unexpected trailing field".into(),
            });
        }
        let f = match (name, param) {
            ("or" | "and" | "gmod3", None) => Self::builtin(name, n, None)?,
            ("parity", Some(p)) => Self::builtin(name, n, Some(parse_form(p, n)?))?,
            ("const", Some(p)) => {
                let c = match p.strip_prefix("c=") {
                    Some(bit) => parse_bit(bit)?,
                    None => parse_bit(p)?,
                };
                Self::builtin(name, n, Some(ParityForm::new(0, c)))?
            }
            ("table", Some(bits)) => {
                if bits.len() != 1 << n {
                    return Err(Error::Parse {
                        token: bits.to_string(),
                        reason: format!("expected {} table entries", 1 << n),
                    });
                }
                let mut table = Vec::with_capacity(bits.len());
                let mut domain = Vec::with_capacity(bits.len());
                for ch in bits.chars() {
                    let (t, d) = match ch {
                        '0' => (false, true),
                        '1' => (true, true),
                        '*' | '-' => (false, false),
                        _ => {
                            return Err(Error::Parse {
                                token: bits.to_string(),
                                reason: format!("unexpected table entry `{ch}`"),
                            })
                        }
                    };
                    table.push(t);
                    domain.push(d);
                }
                Self::partial(n, table, domain)?
            }
            ("table-hex", Some(hex)) => Self::from_hex(n, hex)?,
            ("or" | "and" | "gmod3", Some(p)) => {
                return Err(Error::Parse {
                    token: p.to_string(),
                    reason: format!("`{name}` takes no parameters"),
                })
            }
            ("parity" | "const" | "table" | "table-hex", None) => {
                return Err(Error::Parse {
                    token: spec.to_string(),
                    reason: format!("`{name}` requires a parameter field"),
                })
            }
            (other, _) => return Err(Error::UnknownFunction(other.to_string())),
        };
        Ok(f.with_label(spec.trim()))
    }
}

impl Serialize for BooleanFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.spec())
    }
}

impl<'de> Deserialize<'de> for BooleanFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
