// SPDX-License-Identifier: Apache-2.0

//! The `rfs` command line, as a library call so tests can drive it without
//! spawning processes.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::adversary::{ambainis_bound, build_relation, enumerate_inputs, DEFAULT_INPUT_CAP};
use crate::boolfn::{format_bits, BooleanFunction};
use crate::classical::{solve_basis, solve_onequery};
use crate::error::{Error, Result};
use crate::instance::{OracleHandle, RfsInstance};
use crate::nonparity::{
    build_game, classify, dual_to_psi, mu_joint_exact, mu_product_lower, psi_report, scan,
    solve_game, to_csv, Dichotomy, DEFAULT_TOL, PRODUCT_ITERS,
};
use crate::quantum::{build_circuit, run, Mode, DEFAULT_QUBIT_CAP};

/// Largest arity accepted by `mu --exact`.
pub const MAX_EXACT_ARITY: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
    /// Files written by the command.
    pub artifacts: Vec<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "rfs", version, about = "Recursive Fourier Sampling laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a promise-satisfying instance as JSON.
    Gen {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Emit the lazy (seed-only) form instead of explicit secrets.
        #[arg(long)]
        lazy: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a classical solver against an instance.
    Solve {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, value_enum, default_value_t = Algo::Basis)]
        algo: Algo,
        /// Read the instance from a JSON file instead of generating it.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Simulate the recursive quantum algorithm exactly.
    Simulate {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value = "kickback")]
        mode: Mode,
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Print the gate list instead of running it.
        #[arg(long)]
        dump: bool,
        #[arg(long, default_value_t = DEFAULT_QUBIT_CAP)]
        qubit_cap: usize,
    },
    /// Value of the joint nonparity game.
    Mu {
        #[command(flatten)]
        f: FnArgs,
        /// Exact rational arithmetic; values print as `p/q`.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Trivial/nontrivial classification with bounds.
    Classify {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Also evaluate the lower-bound growth at this height.
        #[arg(long)]
        height: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Exhaustive scan over every total function on `n` inputs.
    Scan {
        #[arg(long)]
        n: usize,
        /// Product-search restarts per function; defaults to 20 for n <= 3
        /// and 0 (column left empty) above.
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive adversary bound.
    Adversary {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, default_value_t = 1)]
        height: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Threshold-of-parities witness from the optimal dual.
    Psi {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
struct FnArgs {
    /// Function spec such as `or:2`, `gmod3:4` or `table-hex:2:E`.
    #[arg(long = "fn")]
    spec: String,
    /// Arity for specs given without one (`--fn or --n 3`).
    #[arg(long)]
    n: Option<usize>,
}

impl FnArgs {
    fn function(&self) -> Result<BooleanFunction> {
        let g: BooleanFunction = match self.n {
            Some(n) if !self.spec.contains(':') => format!("{}:{n}", self.spec).parse()?,
            _ => self.spec.parse()?,
        };
        if let Some(n) = self.n {
            if n != g.arity() {
                return Err(Error::Arity {
                    expected: n,
                    got: g.arity(),
                });
            }
        }
        Ok(g)
    }
}

#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long = "fn")]
    spec: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    height: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Force the root answer (0 or 1).
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    answer: Option<u8>,
}

impl InstanceArgs {
    fn function(&self) -> Result<BooleanFunction> {
        let spec = self.spec.clone().ok_or_else(|| Error::Parse {
            token: "--fn".into(),
            reason: "a function spec or --instance is required".into(),
        })?;
        FnArgs { spec, n: self.n }.function()
    }

    fn generate(&self, lazy: bool) -> Result<RfsInstance> {
        let g = self.function()?;
        let answer = self.answer.map(|a| a == 1);
        if lazy {
            RfsInstance::generate_lazy(g.arity(), self.height, &g, self.seed, answer)
        } else {
            RfsInstance::generate(g.arity(), self.height, &g, self.seed, answer)
        }
    }

    fn load_or_generate(&self, file: &Option<PathBuf>) -> Result<RfsInstance> {
        match file {
            Some(path) => RfsInstance::from_json(&std::fs::read_to_string(path)?),
            None => self.generate(false),
        }
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    Basis,
    Onequery,
}

/// Run `rfs` with `args` (program name excluded).
pub fn execute<I, T>(args: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv =
        std::iter::once(std::ffi::OsString::from("rfs")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult {
                    exit_code: 2,
                    stderr: text,
                    ..Default::default()
                }
            } else {
                CommandResult {
                    stdout: text,
                    ..Default::default()
                }
            };
        }
    };
    let mut result = CommandResult::default();
    match dispatch(cli.command, &mut result) {
        Ok(stdout) => result.stdout = stdout,
        Err(e) => {
            result.exit_code = 1;
            result.stderr = format!("error: {e}\n");
        }
    }
    result
}

fn line(v: &Value) -> String {
    format!("{v}\n")
}

fn write_artifact(path: &PathBuf, body: &str, result: &mut CommandResult) -> Result<()> {
    std::fs::write(path, body)?;
    result.artifacts.push(path.clone());
    Ok(())
}

fn dispatch(command: Command, result: &mut CommandResult) -> Result<String> {
    match command {
        Command::Gen { inst, lazy, out } => {
            let instance = inst.generate(lazy)?;
            let doc = instance.to_json()? + "\n";
            match out {
                Some(path) => {
                    write_artifact(&path, &doc, result)?;
                    Ok(line(&json!({
                        "out": path.display().to_string(),
                        "answer": instance.answer()? as u8,
                    })))
                }
                None => Ok(doc),
            }
        }
        Command::Solve {
            inst,
            algo,
            instance,
        } => {
            let instance = inst.load_or_generate(&instance)?;
            let expected = instance.answer()?;
            let mut handle = OracleHandle::new(&instance);
            let solved = match algo {
                Algo::Basis => solve_basis(&mut handle)?,
                Algo::Onequery => {
                    let form = instance.function().is_parity().ok_or_else(|| {
                        Error::InvalidShortcut(format!("`{}` is not a parity", instance.function()))
                    })?;
                    solve_onequery(&mut handle, form)?
                }
            };
            Ok(line(&json!({
                "algo": format!("{algo:?}").to_lowercase(),
                "answer": solved.answer as u8,
                "expected": expected as u8,
                "correct": solved.answer == expected,
                "queries": solved.queries,
            })))
        }
        Command::Simulate {
            inst,
            mode,
            instance,
            dump,
            qubit_cap,
        } => {
            let instance = inst.load_or_generate(&instance)?;
            let circuit = build_circuit(
                instance.n(),
                instance.height(),
                instance.function(),
                mode,
                qubit_cap,
            )?;
            if dump {
                return Ok(circuit.dump());
            }
            let report = run(&circuit, &instance)?;
            let mut v = serde_json::to_value(&report)?;
            v["mode"] = serde_json::to_value(mode)?;
            v["n"] = json!(instance.n());
            v["h"] = json!(instance.height());
            Ok(line(&v))
        }
        Command::Mu { f, exact, tol } => {
            let g = f.function()?;
            let game = build_game(&g)?;
            let label_col = |i: usize| {
                let c = game.cols[i];
                format!(
                    "{}:{}:{}",
                    format_bits(c.z, g.arity()),
                    c.a as u8,
                    c.b as u8
                )
            };
            if exact {
                if g.arity() > MAX_EXACT_ARITY {
                    return Err(Error::TooLarge {
                        what: "exact-mode arity",
                        size: g.arity() as u128,
                        cap: MAX_EXACT_ARITY as u128,
                    });
                }
                let (value, sol) = mu_joint_exact(&g)?;
                let support = |probs: &[num_rational::BigRational],
                               label: &dyn Fn(usize) -> String| {
                    probs
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| !num_traits::Zero::is_zero(*p))
                        .map(|(i, p)| (label(i), p.to_string()))
                        .collect::<BTreeMap<_, _>>()
                };
                Ok(line(&json!({
                    "fn": g.spec(),
                    "mode": "exact",
                    "mu_joint": value.to_string(),
                    "gap": sol.gap.to_string(),
                    "rows": game.rows.len(),
                    "cols": game.cols.len(),
                    "row_strategy": support(&sol.row_strategy, &|i| game.row_label(i)),
                    "col_strategy": support(&sol.col_strategy, &label_col),
                })))
            } else {
                let sol = solve_game(&game, tol)?;
                let support = |probs: &[f64], label: &dyn Fn(usize) -> String| {
                    probs
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(i, &p)| (label(i), p))
                        .collect::<BTreeMap<_, _>>()
                };
                Ok(line(&json!({
                    "fn": g.spec(),
                    "mode": "float",
                    "mu_joint": sol.value,
                    "gap": sol.gap,
                    "rows": game.rows.len(),
                    "cols": game.cols.len(),
                    "row_strategy": support(&sol.row_strategy, &|i| game.row_label(i)),
                    "col_strategy": support(&sol.col_strategy, &label_col),
                })))
            }
        }
        Command::Classify {
            f,
            search,
            height,
            tol,
        } => {
            let g = f.function()?;
            let report = classify(&g, search.restarts, search.seed, tol)?;
            let mut v = serde_json::to_value(&report)?;
            if let (Some(h), Dichotomy::Nontrivial(nt)) = (height, &report.class) {
                v["height"] = json!(h);
                v["lower_bound"] = json!(nt.lower_bound_at(h));
                v["lower_bound_certified"] = json!(nt.certified_lower_bound_at(h));
            }
            Ok(line(&v))
        }
        Command::Scan {
            n,
            restarts,
            seed,
            tol,
            out,
        } => {
            let restarts = restarts.unwrap_or(if n <= 3 { 20 } else { 0 });
            let rows = scan(n, restarts, seed, tol)?;
            let csv = to_csv(&rows);
            match out {
                Some(path) => {
                    write_artifact(&path, &csv, result)?;
                    Ok(line(&json!({
                        "out": path.display().to_string(),
                        "rows": rows.len(),
                        "parity_rows": rows.iter().filter(|r| r.is_parity).count(),
                    })))
                }
                None => Ok(csv),
            }
        }
        Command::Adversary { f, height, search } => {
            let g = f.function()?;
            let product = mu_product_lower(&g, search.seed, search.restarts, PRODUCT_ITERS)?;
            let inputs = enumerate_inputs(g.arity(), height, &g, DEFAULT_INPUT_CAP)?;
            let relation = build_relation(&inputs, &product.d0, &product.d1)?;
            let report = ambainis_bound(&inputs, &relation)?;
            let mut v = serde_json::to_value(&report)?;
            v["fn"] = json!(g.spec());
            v["height"] = json!(height);
            v["mu_product"] = json!(product.floor);
            v["target"] = json!((1.0 - product.floor).powf(-(height as f64) / 2.0));
            v["theta_product_cap"] = json!((1.0 - product.floor).powi(height as i32));
            v["d0"] = serde_json::to_value(&product.d0)?;
            v["d1"] = serde_json::to_value(&product.d1)?;
            Ok(line(&v))
        }
        Command::Psi { f, tol } => {
            let g = f.function()?;
            let game = build_game(&g)?;
            let sol = solve_game(&game, tol)?;
            let psi = dual_to_psi(&game, &sol);
            let report = psi_report(&g, &psi);
            Ok(line(&json!({
                "fn": g.spec(),
                "psi": psi,
                "report": report,
            })))
        }
    }
}
