// SPDX-License-Identifier: Apache-2.0

//! Product distributions `D0 x D1` and the alternating search for a good
//! product floor.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::game::{realizable_columns, solve_matrix, Column};
use crate::boolfn::{dot, format_bits, parse_bits, BooleanFunction};
use crate::error::{Error, Result};

/// Probability distribution over `n`-bit strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n: usize,
    probs: BTreeMap<u32, f64>,
}

impl Distribution {
    /// Normalizes `weights` unless they already sum to 1 within `1e-12`;
    /// zero weights are dropped.
    pub fn from_weights(n: usize, weights: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut probs = BTreeMap::new();
        for (s, w) in weights {
            if s >> n != 0 || !w.is_finite() || w < 0.0 {
                return Err(Error::Support(format!("bad entry {s} -> {w}")));
            }
            if w > 0.0 {
                *probs.entry(s).or_insert(0.0) += w;
            }
        }
        let total: f64 = probs.values().sum();
        if total <= 0.0 {
            return Err(Error::Support("distribution has no mass".into()));
        }
        if (total - 1.0).abs() > 1e-12 {
            for p in probs.values_mut() {
                *p /= total;
            }
        }
        Ok(Self { n, probs })
    }

    pub fn uniform(n: usize, support: &[u32]) -> Result<Self> {
        Self::from_weights(n, support.iter().map(|&s| (s, 1.0)))
    }

    pub fn point(n: usize, s: u32) -> Result<Self> {
        Self::uniform(n, &[s])
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn prob(&self, s: u32) -> f64 {
        self.probs.get(&s).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.probs.iter().map(|(&s, &p)| (s, p))
    }

    /// `Pr[s . z != bit]`.
    pub fn miss(&self, z: u32, bit: bool) -> f64 {
        self.iter()
            .filter(|&(s, _)| dot(s, z) != bit)
            .map(|(_, p)| p)
            .sum()
    }

    fn check_support(&self, g: &BooleanFunction, class: bool) -> Result<()> {
        if self.n != g.arity() {
            return Err(Error::Arity {
                expected: g.arity(),
                got: self.n,
            });
        }
        for (s, _) in self.iter() {
            if g.evaluate(s).ok() != Some(class) {
                return Err(Error::Support(format!(
                    "{} is not in g^-1({})",
                    format_bits(s, self.n),
                    class as u8
                )));
            }
        }
        Ok(())
    }
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.probs.len()))?;
        for (s, p) in self.iter() {
            map.serialize_entry(&format_bits(s, self.n), &p)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<String, f64>::deserialize(deserializer)?;
        let n = raw.keys().next().map(String::len).unwrap_or(0);
        let weights = raw
            .iter()
            .map(|(k, &p)| Ok((parse_bits(k, n)?, p)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Distribution::from_weights(n, weights).map_err(D::Error::custom)
    }
}

/// `|Pr_{s~D}[s . z = 0] - 1/2|`.
pub fn parity_bias(d: &Distribution, z: u32) -> f64 {
    (d.miss(z, true) - 0.5).abs()
}

/// `1 - Pr[s0 . z != b] * Pr[s1 . z != a]` for independent `s0 ~ D0`,
/// `s1 ~ D1`.
pub fn product_payoff(d0: &Distribution, d1: &Distribution, col: Column) -> f64 {
    1.0 - d0.miss(col.z, col.b) * d1.miss(col.z, col.a)
}

/// Minimum of [`product_payoff`] over all realizable columns, with the first
/// minimizing column.
pub fn eval_product_floor(
    g: &BooleanFunction,
    d0: &Distribution,
    d1: &Distribution,
) -> Result<(f64, Column)> {
    d0.check_support(g, false)?;
    d1.check_support(g, true)?;
    let cols = realizable_columns(g);
    Ok(floor_over(&cols, d0, d1))
}

fn floor_over(cols: &[Column], d0: &Distribution, d1: &Distribution) -> (f64, Column) {
    cols.iter()
        .map(|&c| (product_payoff(d0, d1, c), c))
        .fold(None, |best: Option<(f64, Column)>, cur| match best {
            Some(b) if b.0 <= cur.0 => Some(b),
            _ => Some(cur),
        })
        .expect("nonconstant g has columns")
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductLower {
    pub d0: Distribution,
    pub d1: Distribution,
    pub floor: f64,
    pub column: Column,
}

/// Best `D0` against a fixed `D1` (or symmetrically): the floor is linear in
/// the free distribution, so this is a matrix game over its support.
fn best_response(
    class: &[u32],
    n: usize,
    cols: &[Column],
    fixed: &Distribution,
    free_is_zero_side: bool,
) -> Option<Distribution> {
    let payoff: Vec<Vec<f64>> = class
        .iter()
        .map(|&s| {
            cols.iter()
                .map(|c| {
                    let (own_bit, other_bit) = if free_is_zero_side {
                        (c.b, c.a)
                    } else {
                        (c.a, c.b)
                    };
                    let miss_own = (dot(s, c.z) != own_bit) as u8 as f64;
                    1.0 - fixed.miss(c.z, other_bit) * miss_own
                })
                .collect()
        })
        .collect();
    let sol = solve_matrix(&payoff, 1e-9).ok()?;
    Distribution::from_weights(n, class.iter().copied().zip(sol.row_strategy)).ok()
}

fn random_distribution(n: usize, class: &[u32], rng: &mut ChaCha8Rng) -> Distribution {
    // Exponential weights give a uniform point on the simplex.
    let weights = class
        .iter()
        .map(|&s| (s, -(1.0 - rng.gen::<f64>()).ln() + 1e-12));
    Distribution::from_weights(n, weights).expect("positive weights")
}

/// Alternating maximization of the product floor from `restarts` starting
/// points. Restart 0 starts from uniform `D1`; odd restarts seed `D0`.
pub fn mu_product_lower(
    g: &BooleanFunction,
    seed: u64,
    restarts: usize,
    iters: usize,
) -> Result<ProductLower> {
    if g.is_constant() {
        return Err(Error::Unsatisfiable(format!(
            "`{g}` is constant on its domain"
        )));
    }
    let n = g.arity();
    let zeros = g.preimage(false);
    let ones = g.preimage(true);
    let cols = realizable_columns(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ProductLower> = None;

    for restart in 0..restarts.max(1) {
        let (mut d0, mut d1) = if restart == 0 {
            let d1 = Distribution::uniform(n, &ones)?;
            (
                best_response(&zeros, n, &cols, &d1, true)
                    .unwrap_or(Distribution::uniform(n, &zeros)?),
                d1,
            )
        } else if restart % 2 == 1 {
            let d0 = random_distribution(n, &zeros, &mut rng);
            let d1 = best_response(&ones, n, &cols, &d0, false)
                .unwrap_or(Distribution::uniform(n, &ones)?);
            (d0, d1)
        } else {
            let d1 = random_distribution(n, &ones, &mut rng);
            (
                best_response(&zeros, n, &cols, &d1, true)
                    .unwrap_or(Distribution::uniform(n, &zeros)?),
                d1,
            )
        };
        let mut floor = floor_over(&cols, &d0, &d1).0;
        for _ in 0..iters {
            let before = floor;
            if let Some(next) = best_response(&ones, n, &cols, &d0, false) {
                let f = floor_over(&cols, &d0, &next).0;
                if f >= floor {
                    d1 = next;
                    floor = f;
                }
            }
            if let Some(next) = best_response(&zeros, n, &cols, &d1, true) {
                let f = floor_over(&cols, &next, &d1).0;
                if f >= floor {
                    d0 = next;
                    floor = f;
                }
            }
            if floor - before <= 1e-12 {
                break;
            }
        }
        let (floor, column) = floor_over(&cols, &d0, &d1);
        if best.as_ref().is_none_or(|b| floor > b.floor) {
            best = Some(ProductLower {
                d0,
                d1,
                floor,
                column,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::weight;

    fn f(spec: &str) -> BooleanFunction {
        spec.parse().unwrap()
    }

    fn weight_class(n: usize, w: u32) -> Vec<u32> {
        (0..1u32 << n).filter(|&s| weight(s) == w).collect()
    }

    #[test]
    fn or_primal_floor() {
        let g = f("or:2");
        let d0 = Distribution::point(2, 0).unwrap();
        let d1 = Distribution::uniform(2, &[1, 2, 3]).unwrap();
        let (floor, _) = eval_product_floor(&g, &d0, &d1).unwrap();
        assert!((floor - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gmod3_stated_distributions_hit_zero_at_all_ones() {
        let g = f("gmod3:6");
        let d0 = Distribution::uniform(6, &weight_class(6, 3)).unwrap();
        let d1 = Distribution::uniform(6, &weight_class(6, 5)).unwrap();
        let col = Column {
            z: 0b111111,
            a: dot(0, 0b111111),
            b: dot(0b110000, 0b111111),
        };
        assert_eq!(product_payoff(&d0, &d1, col), 0.0);
        let (floor, _) = eval_product_floor(&g, &d0, &d1).unwrap();
        assert_eq!(floor, 0.0);
    }

    #[test]
    fn matching_column_scores_one() {
        // Every 1-input of AND has s.z = 1 at z = 11... pick b so s0.z = b.
        let d0 = Distribution::point(2, 0b01).unwrap();
        let d1 = Distribution::point(2, 0b11).unwrap();
        let col = Column {
            z: 0b01,
            a: false,
            b: true,
        };
        assert_eq!(product_payoff(&d0, &d1, col), 1.0);
    }

    #[test]
    fn support_violation() {
        let g = f("or:2");
        let d0 = Distribution::point(2, 1).unwrap();
        let d1 = Distribution::point(2, 2).unwrap();
        assert!(matches!(
            eval_product_floor(&g, &d0, &d1),
            Err(Error::Support(_))
        ));
    }

    #[test]
    fn bias_examples() {
        let d0 = Distribution::uniform(6, &weight_class(6, 3)).unwrap();
        assert!(parity_bias(&d0, 0b100000) < 1e-15);
        assert!((parity_bias(&d0, 0b111111) - 0.5).abs() < 1e-15);
        let point = Distribution::point(4, 0b1011).unwrap();
        for z in 0..16 {
            assert_eq!(parity_bias(&point, z), 0.5);
        }
    }

    #[test]
    fn or_product_lower_finds_uniform() {
        let out = mu_product_lower(&f("or:2"), 0, 5, 50).unwrap();
        assert!((out.floor - 1.0 / 3.0).abs() < 1e-9);
        for s in 1..4 {
            assert!((out.d1.prob(s) - 1.0 / 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn parity_product_floor_is_zero() {
        let out = mu_product_lower(&f("parity:3:z=110,c=1"), 1, 4, 20).unwrap();
        assert_eq!(out.floor, 0.0);
    }

    #[test]
    fn distribution_json() {
        let d = Distribution::uniform(2, &[1, 3]).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"01":0.5,"11":0.5}"#);
        assert_eq!(serde_json::from_str::<Distribution>(&text).unwrap(), d);
    }
}
