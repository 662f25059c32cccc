// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rfs_core::adversary::{ambainis_bound, build_relation, enumerate_inputs, DEFAULT_INPUT_CAP};
use rfs_core::boolfn::{dot, weight, BooleanFunction, ParityForm};
use rfs_core::classical::solve_basis;
use rfs_core::instance::{OracleHandle, RfsInstance};
use rfs_core::nonparity::{
    eval_product_floor, mu_joint, mu_product_lower, Distribution, DEFAULT_TOL,
};
use rfs_core::quantum::{build_circuit, run, Mode, DEFAULT_QUBIT_CAP};

/// Random total function on 1..=max_n inputs.
fn total_fn(max_n: usize) -> impl Strategy<Value = BooleanFunction> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), 1 << n)
            .prop_map(move |t| BooleanFunction::total(n, t).unwrap())
    })
}

fn nonconstant_fn(max_n: usize) -> impl Strategy<Value = BooleanFunction> {
    total_fn(max_n).prop_filter("nonconstant", |g| !g.is_constant())
}

fn parity_oracle(g: &BooleanFunction) -> bool {
    let n = g.arity();
    (0..1u32 << n).any(|z| {
        [false, true]
            .iter()
            .any(|&c| (0..1u32 << n).all(|s| g.evaluate(s).unwrap() == (dot(s, z) ^ c)))
    })
}

fn mu(g: &BooleanFunction) -> f64 {
    mu_joint(g, DEFAULT_TOL).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn is_parity_matches_exhaustive_search(g in total_fn(4)) {
        let found = g.is_parity();
        prop_assert_eq!(found.is_some(), parity_oracle(&g));
        if let Some(form) = found {
            for s in 0..1u32 << g.arity() {
                prop_assert_eq!(g.evaluate(s).unwrap(), form.eval(s));
            }
        }
    }

    #[test]
    fn builtin_parity_round_trip(n in 1usize..=6, z_raw in any::<u32>(), c in any::<bool>()) {
        let z = z_raw & ((1 << n) - 1);
        prop_assume!(z != 0);
        let spec = format!("parity:{n}:z={},c={}", rfs_core::boolfn::format_bits(z, n), c as u8);
        let g: BooleanFunction = spec.parse().unwrap();
        prop_assert_eq!(g.is_parity(), Some(ParityForm::new(z, c)));
        let back: BooleanFunction = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn gmod3_counts_weight(n in 1usize..=8, s_raw in any::<u32>()) {
        let s = s_raw & ((1 << n) - 1);
        let g: BooleanFunction = format!("gmod3:{n}").parse().unwrap();
        prop_assert_eq!(g.evaluate(s).unwrap(), !weight(s).is_multiple_of(3));
    }

    #[test]
    fn hex_round_trip(g in total_fn(5)) {
        let spec = format!("table-hex:{}:{}", g.arity(), g.to_hex());
        let back: BooleanFunction = spec.parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn generation_is_deterministic_and_valid(
        g in nonconstant_fn(3),
        h in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let n = g.arity();
        prop_assume!(n * h <= 9);
        let a = RfsInstance::generate(n, h, &g, seed, None).unwrap();
        let b = RfsInstance::generate(n, h, &g, seed, None).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        prop_assert!(a.validate(1 << 20).unwrap().is_empty());

        let lazy = RfsInstance::generate_lazy(n, h, &g, seed, None).unwrap();
        prop_assert_eq!(lazy.leaf_table(1 << 20).unwrap(), a.leaf_table(1 << 20).unwrap());
        prop_assert_eq!(lazy.answer().unwrap(), a.answer().unwrap());

        let back = RfsInstance::from_json(&a.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.to_json().unwrap(), a.to_json().unwrap());
    }

    #[test]
    fn basis_solver_is_exact(g in nonconstant_fn(3), h in 1usize..=3, seed in any::<u64>()) {
        let n = g.arity();
        prop_assume!(n * h <= 9);
        let inst = RfsInstance::generate(n, h, &g, seed, None).unwrap();
        let mut handle = OracleHandle::new(&inst);
        let solved = solve_basis(&mut handle).unwrap();
        prop_assert_eq!(solved.answer, inst.answer().unwrap());
        prop_assert_eq!(solved.queries, (n as u64).pow(h as u32));
    }

    #[test]
    fn kickback_simulation_is_exact(g in nonconstant_fn(3), seed in any::<u64>()) {
        let n = g.arity();
        let h = if n <= 2 { 2 } else { 1 };
        let circuit = build_circuit(n, h, &g, Mode::Kickback, DEFAULT_QUBIT_CAP).unwrap();
        let inst = RfsInstance::generate(n, h, &g, seed, None).unwrap();
        let r = run(&circuit, &inst).unwrap();
        prop_assert!(r.prob_correct >= 1.0 - 1e-9);
        prop_assert!(r.ancilla_residual <= 1e-9);
        prop_assert_eq!(r.oracle_queries, 1u64 << h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mu_invariant_under_symmetries(
        g in nonconstant_fn(3),
        t_raw in any::<u32>(),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let n = g.arity();
        let t = t_raw & ((1 << n) - 1);
        let base = mu(&g);
        let perm: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
        prop_assert!((mu(&g.permute_inputs(&perm)) - base).abs() <= 1e-9);
        prop_assert!((mu(&g.complement()) - base).abs() <= 1e-9);
        prop_assert!((mu(&g.translate(t)) - base).abs() <= 1e-9);
    }

    #[test]
    fn product_floor_sandwich(g in nonconstant_fn(3), seed in any::<u64>()) {
        let product = mu_product_lower(&g, seed, 3, 30).unwrap();
        prop_assert!(product.floor <= mu(&g) + 1e-9);
        prop_assert!(product.floor <= 0.75 + 1e-9);
        let (floor, _) = eval_product_floor(&g, &product.d0, &product.d1).unwrap();
        prop_assert!((floor - product.floor).abs() <= 1e-12);
    }

    #[test]
    fn distribution_json_round_trip(weights in prop::collection::vec(0.01f64..1.0, 1..8)) {
        let d = Distribution::from_weights(3, weights.iter().enumerate().map(|(s, &w)| (s as u32, w))).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        let back: Distribution = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn two_hundred_seeds_validate() {
    for spec in ["or:2", "gmod3:3", "and:3"] {
        let g: BooleanFunction = spec.parse().unwrap();
        for seed in 0..200 {
            let inst = RfsInstance::generate(g.arity(), 2, &g, seed, None).unwrap();
            assert!(
                inst.validate(1 << 20).unwrap().is_empty(),
                "{spec} seed {seed}"
            );
        }
    }
}

#[test]
fn parity_both_directions_exhaustive() {
    for n in 2..=3 {
        for k in 0..1u64 << (1 << n) {
            let g = BooleanFunction::from_fn(n, |s| (k >> s) & 1 == 1).unwrap();
            if g.is_constant() {
                continue;
            }
            assert_eq!(mu(&g) <= 1e-9, g.is_parity().is_some(), "{}", g.to_hex());
        }
    }
}

/// For `s0 != t1` and `s1 != t0`, a uniform `z` makes both
/// `s0 . z != t1 . z` and `s1 . z != t0 . z` with probability 1/2 when
/// `s0 ^ t1 == s1 ^ t0`, and 1/4 otherwise.
#[test]
fn double_miss_probability() {
    for n in 1..=4usize {
        let size = 1u32 << n;
        for s0 in 0..size {
            for t1 in (0..size).filter(|&t| t != s0) {
                for s1 in 0..size {
                    for t0 in (0..size).filter(|&t| t != s1) {
                        let misses = (0..size)
                            .filter(|&z| dot(s0, z) != dot(t1, z) && dot(s1, z) != dot(t0, z))
                            .count();
                        let want = if s0 ^ t1 == s1 ^ t0 {
                            size / 2
                        } else {
                            size / 4
                        };
                        assert_eq!(misses as u32, want, "n={n} {s0} {t1} {s1} {t0}");
                    }
                }
            }
        }
    }
}

#[test]
fn theta_products_respect_floor() {
    let g: BooleanFunction = "or:2".parse().unwrap();
    let product = mu_product_lower(&g, 0, 4, 30).unwrap();
    let mut bounds = Vec::new();
    for h in 1..=2 {
        let set = enumerate_inputs(2, h, &g, DEFAULT_INPUT_CAP).unwrap();
        let r = build_relation(&set, &product.d0, &product.d1).unwrap();
        let report = ambainis_bound(&set, &r).unwrap();
        assert!(report.max_theta_product <= (1.0 - product.floor).powi(h as i32) + 1e-9);
        assert!(report.bound >= 1.0);
        assert!(report.theta_x <= 1.0 && report.theta_y <= 1.0);
        bounds.push(report.bound);
    }
    assert!(bounds[1] >= bounds[0] * bounds[0] - 1e-6);
}
