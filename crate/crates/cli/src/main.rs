use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use egn_bounds::enip::{standard_egn_spec, verify_spec, Projection};
use egn_bounds::geometry::{height, is_nontrivial, triple_of};
use egn_bounds::io::{load_enip_spec, load_state};
use egn_bounds::optimize::{optimize, BoundReport, LocalUnitaryParams, Objective, OptimizeConfig};
use egn_bounds::oracles::self_check;
use egn_bounds::separability::m_separable_region;
use egn_bounds::state::{correlation, ghz};
use egn_bounds::{limits, Error};

const SCHEMA: &str = "egn-bounds/1";

#[derive(Parser)]
#[command(name = "egn-bounds", version, about = "Entanglement lower bounds from EG_N projections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project a state onto EG_N states and print the surviving correlations.
    Project {
        #[arg(long)]
        state: PathBuf,
        /// Custom projection spec instead of the standard EG_N one.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Lower-bound the M-inseparability of a state.
    Bound {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        m: usize,
        /// Evaluate the identity frame only.
        #[arg(long)]
        no_optimize: bool,
        /// Grid points per angle in the symmetric scan.
        #[arg(long, default_value_t = 24)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// One rotation shared by every qubit (default).
        #[arg(long, conflicts_with = "per_qubit")]
        symmetric: bool,
        /// Refine with independent rotations per qubit.
        #[arg(long)]
        per_qubit: bool,
        /// Optimize the distance to the octahedron instead of |d1|+|d2|+|d3| for even N.
        #[arg(long)]
        even_distance: bool,
    },
    /// Check the commutation conditions of a projection spec.
    VerifyEnip {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Region of M-separable EG_N triples.
    Region {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Optimized GHZ_N triples as CSV.
    GhzTable {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        #[arg(long, default_value_t = 24)]
        grid: usize,
    },
    /// Compare every closed form against its brute-force oracle.
    SelfCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        quick: bool,
    },
}

enum Output {
    Json(Value),
    Csv(String),
}

/// A command result plus whether it counts as a domain failure.
struct Outcome {
    output: Output,
    failed: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Self { output: Output::Json(value), failed: false }
    }
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
fn round_number(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            n.as_f64().and_then(|x| serde_json::Number::from_f64(round_number(x))).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

fn with_schema(value: Value) -> Value {
    let mut map = match value {
        Value::Object(map) => map,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("schema".into(), Value::String(SCHEMA.into()));
    Value::Object(map)
}

fn triple_json(t: &egn_bounds::EgnTriple) -> Value {
    json!({"d1": t.d1, "d2": t.d2, "d3": t.d3})
}

fn project(state: PathBuf, spec: Option<PathBuf>) -> Result<Outcome, Error> {
    let rho = load_state(state)?;
    let n = rho.n_qubits();
    let standard = spec.is_none();
    let projection = match spec {
        Some(path) => Projection::new(load_enip_spec(path)?)?,
        None => standard_egn_spec(n)?,
    };
    let out = projection.group_average(&rho)?;
    let tensor: Vec<Value> = projection
        .surviving()
        .iter()
        .map(|alpha| Ok(json!({"alpha": alpha, "value": correlation(&out, alpha)?})))
        .collect::<Result<_, Error>>()?;
    let mut doc = json!({
        "n_qubits": n,
        "tensor": tensor,
        "min_eigenvalue": out.min_eigenvalue(),
    });
    if standard && n >= 2 {
        doc["triple"] = triple_json(&triple_of(&out)?);
    }
    Ok(Outcome::ok(doc))
}

#[allow(clippy::too_many_arguments)]
fn bound(
    state: PathBuf,
    m: usize,
    no_optimize: bool,
    grid: usize,
    seed: u64,
    per_qubit: bool,
    even_distance: bool,
) -> Result<Outcome, Error> {
    let rho = load_state(state)?;
    let n = rho.n_qubits();
    if n < 2 {
        return Err(Error::Argument("bounds need at least 2 qubits".into()));
    }
    if m < 2 || m > n {
        return Err(Error::Argument(format!("M = {m} is outside 2..={n}")));
    }
    let objective = if even_distance { Objective::EvenDistance } else { Objective::AbsSum };
    let report = if no_optimize {
        BoundReport::for_params(&rho, LocalUnitaryParams::identity(n), objective)?
    } else {
        let config = OptimizeConfig { grid, seed, per_qubit, objective, ..OptimizeConfig::default() };
        optimize(&rho, &config)?
    };
    let b = report.per_m[&m];
    let mut doc = json!({
        "n_qubits": n,
        "m": m,
        "triple": triple_json(&report.best_triple),
        "abs_sum": report.abs_sum,
        "height": height(&report.best_triple),
        "nontrivial": is_nontrivial(n, m),
        "robustness_lower_bound": b.robustness,
        "trace_distance_lower_bound": b.trace_distance,
        "optimized": !no_optimize,
        "params": {
            "symmetric": report.best_params.is_symmetric(),
            "angles": report.best_params.angles(),
        },
    });
    if n == 2 {
        doc["warning"] = json!("every two-qubit EG state is M-separable; the bound is always 0");
    }
    Ok(Outcome::ok(doc))
}

fn verify_enip(n: usize, spec: Option<PathBuf>) -> Result<Outcome, Error> {
    let report = match spec {
        Some(path) => {
            let spec = load_enip_spec(path)?;
            if spec.n_qubits != n {
                return Err(Error::Dimension { expected: n, found: spec.n_qubits });
            }
            verify_spec(&spec)?
        }
        None => standard_egn_spec(n)?.report().clone(),
    };
    let failed = !report.passed;
    Ok(Outcome { output: Output::Json(serde_json::to_value(report).map_err(Error::from)?), failed })
}

fn region(n: usize, m: usize) -> Result<Outcome, Error> {
    let label = m_separable_region(n, m)?;
    Ok(Outcome::ok(json!({"n_qubits": n, "m": m, "region": label.name()})))
}

fn ghz_table(n_min: usize, n_max: usize, grid: usize) -> Result<Outcome, Error> {
    if n_min < 2 || n_min > n_max {
        return Err(Error::Argument(format!("need 2 <= n-min <= n-max, got {n_min}..{n_max}")));
    }
    let mut csv = String::from("n,d1,d2,d3,abs_sum,theta,psi,phi\n");
    for n in n_min..=n_max {
        let report = optimize(&ghz(n)?, &OptimizeConfig { grid, ..OptimizeConfig::default() })?;
        let t = report.best_triple;
        let [theta, psi, phi] = report.best_params.angles_for(0);
        let fields: Vec<String> =
            [t.d1, t.d2, t.d3, report.abs_sum, theta, psi, phi].iter().map(|&x| round_number(x).to_string()).collect();
        csv.push_str(&format!("{n},{}\n", fields.join(",")));
    }
    Ok(Outcome { output: Output::Csv(csv), failed: false })
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Project { state, spec } => project(state, spec),
        Command::Bound { state, m, no_optimize, grid, seed, symmetric: _, per_qubit, even_distance } => {
            bound(state, m, no_optimize, grid, seed, per_qubit, even_distance)
        }
        Command::VerifyEnip { n, spec } => verify_enip(n, spec),
        Command::Region { n, m } => region(n, m),
        Command::GhzTable { n_min, n_max, grid } => ghz_table(n_min, n_max, grid),
        Command::SelfCheck { seed, quick } => {
            let report = self_check(seed, quick)?;
            let failed = !report.passed;
            Ok(Outcome { output: Output::Json(serde_json::to_value(report).map_err(Error::from)?), failed })
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn print_json(value: Value) {
    let doc = normalize(with_schema(value));
    emit(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON values always serialize")));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(raw) = std::env::var("EGN_MAX_QUBITS") {
        match raw.trim().parse::<usize>() {
            Ok(n) => limits::set_max_qubits(n),
            Err(_) => {
                eprintln!("error: EGN_MAX_QUBITS must be a positive integer, got {raw:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli.command) {
        Ok(Outcome { output, failed }) => {
            match output {
                Output::Json(v) => print_json(v),
                Output::Csv(s) => emit(&s),
            }
            if failed {
                eprintln!("error: check failed");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            print_json(json!({"error": e.to_string()}));
            ExitCode::from(1)
        }
    }
}
