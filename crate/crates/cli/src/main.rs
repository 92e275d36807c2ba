use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fc_monodromy::classify::{classify, FinitenessHint};
use fc_monodromy::monodromy::params_json;
use fc_monodromy::numerics::{fc_contour, fc_series, FcParams, SeriesConfig, TorusQuadrature};
use fc_monodromy::special::{self, load_fixture};
use fc_monodromy::structure::{
    build_reducible_witness, conjugate_orbit_probe, enumerate_group, verify_system, CheckLine,
};
use fc_monodromy::{Error, MonodromySystem, ParameterSet};
use num_complex::Complex64;
use serde_json::{json, Value};

const BUDGET_ENV: &str = "FC_ENUM_BUDGET";
const DEFAULT_BUDGET: usize = 10_000;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNDEFINED: u8 = 3;

/// Exact monodromy of Lauricella's F_C system.
#[derive(Parser)]
#[command(name = "fcmono", version)]
struct Cli {
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Rational `a`, e.g. 1/2.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Rational `b`.
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    /// Comma-separated rationals `c_1,...,c_n`.
    #[arg(long, allow_hyphen_values = true)]
    c: String,
}

impl ParamArgs {
    fn parse(&self) -> Result<ParameterSet, Error> {
        ParameterSet::parse_list(&self.a, &self.b, &self.c)
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum GroupChoice {
    /// M_0, ..., M_n.
    Mon,
    /// The reflections R_I.
    Ref,
}

#[derive(Copy, Clone, ValueEnum)]
enum SpecialCheck {
    All,
    ChangeOfBasis,
    Segre,
    Moebius,
    Gamma2,
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum Method {
    Series,
    Contour,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Generators, intersection matrix and derived data.
    Generate(ParamArgs),
    /// Check the defining identities exactly.
    Verify(ParamArgs),
    /// Zariski-closure classification.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        /// Treat the monodromy group as infinite.
        #[arg(long)]
        assume_infinite: bool,
        /// Enumerate the group first and use a finite result.
        #[arg(long)]
        enumerate: bool,
        /// Element budget for --enumerate; defaults to $FC_ENUM_BUDGET or 10000.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Invariant subspaces for the reducible reflection-subgroup cases.
    Witness(ParamArgs),
    /// Breadth-first group enumeration and generator order probes.
    Enumerate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "mon")]
        group: GroupChoice,
        /// Defaults to $FC_ENUM_BUDGET or 10000.
        #[arg(long)]
        budget: Option<usize>,
        /// Also report the order of M_k for this k, up to the budget.
        #[arg(long)]
        probe: Option<usize>,
    },
    /// Integer models for a = b = 1/2, c = (1, ..., 1).
    Special {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "all")]
        check: SpecialCheck,
    },
    /// Evaluate F_C numerically.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated real arguments x_1,...,x_n.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value = "series")]
        method: Method,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 2000)]
        max_degree: usize,
        #[arg(long, default_value_t = 1e-15)]
        rel_tol: f64,
    },
}

struct Output {
    json: Value,
    code: u8,
}

fn passed(json: Value) -> Output {
    Output { json, code: 0 }
}

fn transcript(lines: &[CheckLine]) -> (Value, bool) {
    let ok = lines.iter().all(|l| l.passed);
    (Value::Array(lines.iter().map(CheckLine::to_json).collect()), ok)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidParameter(_) | Error::UnsupportedModel(_) | Error::DimensionMismatch(_) => {
            EXIT_USAGE
        }
        _ => EXIT_UNDEFINED,
    }
}

fn budget(explicit: Option<usize>) -> Result<usize, Error> {
    if let Some(b) = explicit {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{BUDGET_ENV}={v} is not a positive integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("'{t}' is not a real number"))))
        .collect()
}

fn run(command: &Command) -> Result<Output, Error> {
    match command {
        Command::Generate(p) => {
            let sys = MonodromySystem::new(&p.parse()?)?;
            let json = sys.to_json();
            match sys.h() {
                Ok(_) => Ok(passed(json)),
                Err(e) => {
                    eprintln!("{e}");
                    Ok(Output { json, code: EXIT_UNDEFINED })
                }
            }
        }
        Command::Verify(p) => {
            let params = p.parse()?;
            let sys = MonodromySystem::new(&params)?;
            let (checks, ok) = transcript(&verify_system(&sys)?);
            Ok(Output {
                json: json!({"params": params_json(&params), "checks": checks, "all_passed": ok}),
                code: if ok { 0 } else { EXIT_FAILED },
            })
        }
        Command::Classify { params, assume_infinite, enumerate, budget: b } => {
            let params = params.parse()?;
            let mut enumeration = None;
            let hint = if *enumerate {
                let sys = MonodromySystem::new(&params)?;
                let e = enumerate_group(&sys.generators, budget(*b)?)?;
                enumeration = Some(e.to_json());
                FinitenessHint::Enumeration(e)
            } else if *assume_infinite {
                FinitenessHint::InfiniteAssumed
            } else {
                FinitenessHint::None
            };
            let mut json = classify(&params, hint).to_json();
            if let Some(e) = enumeration {
                json["enumeration"] = e;
            }
            Ok(passed(json))
        }
        Command::Witness(p) => {
            let params = p.parse()?;
            let sys = MonodromySystem::new(&params)?;
            let w = build_reducible_witness(&sys)?;
            let lines = w.verify(&sys);
            let ok = lines.iter().all(|l| l.passed);
            let mut json = w.to_json(&lines);
            json["params"] = params_json(&params);
            Ok(Output { json, code: if ok { 0 } else { EXIT_FAILED } })
        }
        Command::Enumerate { params, group, budget: b, probe } => {
            let params = params.parse()?;
            let sys = MonodromySystem::new(&params)?;
            let budget = budget(*b)?;
            let (name, generators) = match group {
                GroupChoice::Mon => ("mon", sys.generators.clone()),
                GroupChoice::Ref => ("ref", sys.reflections().into_iter().map(|r| r.r).collect()),
            };
            let mut json = json!({
                "params": params_json(&params),
                "group": name,
                "budget": budget,
                "result": enumerate_group(&generators, budget)?.to_json(),
            });
            if let Some(k) = probe {
                json["probe"] = json!({"k": k, "result": conjugate_orbit_probe(&sys, *k, budget as u64)?.to_json()});
            }
            Ok(passed(json))
        }
        Command::Special { n, check } => run_special(*n, *check),
        Command::Eval { params, x, method, epsilon, points, max_degree, rel_tol } => {
            let exact = params.parse()?;
            let p = FcParams::from(&exact);
            let x = parse_reals(x)?;
            let mut json = json!({"params": params_json(&exact), "x": x});
            let mut values: Vec<Complex64> = Vec::new();
            if *method != Method::Contour {
                let cfg = SeriesConfig { max_total_degree: *max_degree, rel_tol: *rel_tol };
                let xs: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                let e = fc_series(&p, &xs, &cfg)?;
                values.push(e.value());
                json["series"] = json!({"re": e.re, "im": e.im, "error_estimate": e.error_estimate, "terms": e.size});
            }
            if *method != Method::Series {
                let quad = TorusQuadrature { epsilon: *epsilon, points_per_circle: *points };
                let e = fc_contour(&p, &x, &quad)?;
                values.push(e.value());
                json["contour"] = json!({"re": e.re, "im": e.im, "error_estimate": e.error_estimate, "points": e.size});
            }
            if let [s, c] = values[..] {
                json["difference"] = json!((s - c).norm());
            }
            Ok(passed(json))
        }
    }
}

/// `all` runs every check available for `n`; the projective checks need `n = 2`.
fn run_special(n: usize, check: SpecialCheck) -> Result<Output, Error> {
    let model = load_fixture(n)?;
    let selected: Vec<SpecialCheck> = match check {
        SpecialCheck::All if n == 2 => {
            vec![SpecialCheck::ChangeOfBasis, SpecialCheck::Segre, SpecialCheck::Moebius, SpecialCheck::Gamma2]
        }
        SpecialCheck::All => vec![SpecialCheck::ChangeOfBasis],
        other => vec![other],
    };
    let mut lines = Vec::new();
    let mut json = json!({"n": n});
    for c in selected {
        match c {
            SpecialCheck::ChangeOfBasis | SpecialCheck::All => lines.extend(special::verify_change_of_basis(&model)?),
            SpecialCheck::Segre => {
                if n != 2 {
                    return Err(Error::UnsupportedModel(n));
                }
                let q = special::segre_quadric(&model.h_prime)?;
                json["segre_quadric"] = json!(q.to_string());
                lines.push(CheckLine::new("Segre quadric vanishes", q.is_zero()));
            }
            SpecialCheck::Moebius => lines.extend(special::moebius_action_check(&model)?),
            SpecialCheck::Gamma2 => {
                let (g, actions) = special::gamma2_generator_check(&model)?;
                lines.extend(g);
                json["gamma2_actions"] = Value::Array(
                    actions
                        .iter()
                        .map(|(name, pair)| json!({"product": name, "action": pair.as_ref().map(|p| p.to_json())}))
                        .collect(),
                );
            }
        }
    }
    let (checks, ok) = transcript(&lines);
    json["checks"] = checks;
    json["all_passed"] = json!(ok);
    Ok(Output { json, code: if ok { 0 } else { EXIT_FAILED } })
}

fn emit(out: &Option<PathBuf>, json: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(json).expect("serializable") + "\n";
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(output) => {
            if let Err(e) = emit(&cli.out, &output.json) {
                eprintln!("cannot write output: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(output.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
