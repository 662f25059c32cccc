// SPDX-License-Identifier: Apache-2.0

//! Classical baselines.

use serde::Serialize;

use crate::boolfn::{basis, ParityForm};
use crate::error::{Error, Result};
use crate::instance::OracleHandle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Solved {
    pub answer: bool,
    pub queries: u64,
}

/// Recover every secret bit by bit: since `s . e_i = s[i]`, the sub-answer
/// at child `e_i` is bit `i` of the node's secret. Uses exactly `n^h`
/// queries.
pub fn solve_basis(handle: &mut OracleHandle<'_>) -> Result<Solved> {
    let start = handle.queries();
    let mut prefix = Vec::with_capacity(handle.instance().height());
    let secret = recover_secret(handle, &mut prefix)?;
    let answer = handle.instance().function().evaluate(secret)?;
    Ok(Solved {
        answer,
        queries: handle.queries() - start,
    })
}

fn recover_secret(handle: &mut OracleHandle<'_>, prefix: &mut Vec<u32>) -> Result<u32> {
    let inst = handle.instance();
    let (n, h) = (inst.n(), inst.height());
    let mut secret = 0;
    for i in 1..=n {
        let e = basis(i, n);
        prefix.push(e);
        let bit = if prefix.len() == h {
            handle.query(prefix)?
        } else {
            let child = recover_secret(handle, prefix)?;
            inst.function().evaluate(child)?
        };
        prefix.pop();
        if bit {
            secret |= e;
        }
    }
    Ok(secret)
}

/// One-query solver for parity-type `g(s) = s.z xor c`: unrolling the
/// promise gives `answer = A(z, .., z) xor (h*c mod 2)`.
pub fn solve_onequery(handle: &mut OracleHandle<'_>, form: ParityForm) -> Result<Solved> {
    let inst = handle.instance();
    let g = inst.function();
    if form.z >> inst.n() != 0 {
        return Err(Error::InvalidShortcut(
            "mask wider than the function".into(),
        ));
    }
    if let Some(s) = g
        .domain()
        .find(|&s| g.evaluate(s).ok() != Some(form.eval(s)))
    {
        return Err(Error::InvalidShortcut(format!(
            "g({}) disagrees with the supplied form",
            crate::boolfn::format_bits(s, inst.n())
        )));
    }
    if form.z == 0 {
        return Ok(Solved {
            answer: form.c,
            queries: 0,
        });
    }
    let xs = vec![form.z; inst.height()];
    let bit = handle.query(&xs)?;
    let correction = form.c && inst.height() % 2 == 1;
    Ok(Solved {
        answer: bit ^ correction,
        queries: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::BooleanFunction;
    use crate::instance::RfsInstance;
    use std::collections::BTreeMap;

    #[test]
    fn basis_small_example() {
        let g: BooleanFunction = "or:2".parse().unwrap();
        let inst =
            RfsInstance::from_secrets(2, 1, &g, 0, BTreeMap::from([(vec![], 0b10)])).unwrap();
        let mut handle = OracleHandle::new(&inst);
        assert_eq!(
            solve_basis(&mut handle).unwrap(),
            Solved {
                answer: true,
                queries: 2
            }
        );
    }

    #[test]
    fn basis_query_counts() {
        for (n, h, want) in [(2, 2, 4), (3, 2, 9), (2, 3, 8)] {
            let g = BooleanFunction::builtin("or", n, None).unwrap();
            let inst = RfsInstance::generate(n, h, &g, 11, None).unwrap();
            let mut handle = OracleHandle::new(&inst);
            let out = solve_basis(&mut handle).unwrap();
            assert_eq!(out.queries, want);
            assert_eq!(out.answer, inst.answer().unwrap());
        }
    }

    #[test]
    fn onequery_parity() {
        for c in [false, true] {
            let form = ParityForm::new(0b11, c);
            let g = BooleanFunction::builtin("parity", 2, Some(form)).unwrap();
            for seed in 0..10 {
                let inst = RfsInstance::generate(2, 2, &g, seed, None).unwrap();
                let mut handle = OracleHandle::new(&inst);
                let out = solve_onequery(&mut handle, form).unwrap();
                assert_eq!(out.queries, 1);
                assert_eq!(handle.queries(), 1);
                assert_eq!(out.answer, inst.answer().unwrap());
                // h = 2 makes the correction vanish.
                assert_eq!(out.answer, inst.leaf(&[0b11, 0b11]).unwrap());
            }
        }
    }

    #[test]
    fn onequery_zero_mask() {
        // g constant 1 on its domain {01, 10}: s.00 xor 1.
        let g: BooleanFunction = "table:2:*11*".parse().unwrap();
        let zero_form = g.is_parity().unwrap();
        assert_eq!(zero_form, ParityForm::new(0, true));
        let inst =
            RfsInstance::from_secrets(2, 1, &g, 0, BTreeMap::from([(vec![], 0b01)])).unwrap();
        let mut handle = OracleHandle::new(&inst);
        let out = solve_onequery(&mut handle, zero_form).unwrap();
        assert_eq!(
            out,
            Solved {
                answer: true,
                queries: 0
            }
        );
    }

    #[test]
    fn onequery_rejects_wrong_form() {
        let g: BooleanFunction = "or:2".parse().unwrap();
        let inst = RfsInstance::generate(2, 1, &g, 0, None).unwrap();
        let mut handle = OracleHandle::new(&inst);
        assert!(matches!(
            solve_onequery(&mut handle, ParityForm::new(0b11, false)),
            Err(Error::InvalidShortcut(_))
        ));
        assert_eq!(handle.queries(), 0);
    }
}
