//! `polyham`: check, convert, analyse and integrate polynomial Hamiltonian
//! systems.
//!
//! Exit codes: 0 success (or "is Hamiltonian"), 1 negative verdict or a
//! numerical failure, 2 usage, input or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyham_core::harness::DEFAULT_SEED;
use polyham_core::parse::default_var_names;
use polyham_core::stability::DEFAULT_RESTARTS;
use polyham_core::{
    bench_hessian, classify_equilibrium, emit_hamiltonian, emit_system, energy_drift,
    hamiltonian_definiteness, newton_refine, parse_hamiltonian_with_vars, parse_system_with_vars,
    simulate, Error, PolyHamiltonian, PolySystem, DEFAULT_TOL,
};
use serde::Serialize;
use serde_json::json;

const NEWTON_MAX_ITER: usize = 50;

#[derive(Parser)]
#[command(
    name = "polyham",
    version,
    about = "Polynomial Hamiltonian systems as cubical tensors"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Relative tolerance for symmetry, equilibrium and definiteness tests.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output file (text); `extract` and `build` also write `<out>.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized procedures.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a system is Hamiltonian (exit 0) or not (exit 1).
    Check { system: PathBuf },
    /// Extract the Hamiltonian of a Hamiltonian system.
    Extract { system: PathBuf },
    /// Build the vector field `J grad H` of a Hamiltonian.
    Build { hamiltonian: PathBuf },
    /// Classify equilibria of a Hamiltonian system.
    Stability {
        /// System or Hamiltonian file.
        input: PathBuf,
        /// Candidate equilibrium `c1,...,cn`; may be repeated.
        #[arg(long = "at", required = true, allow_hyphen_values = true)]
        at: Vec<String>,
        /// Newton-refine each point before classifying.
        #[arg(long)]
        refine: bool,
    },
    /// Integrate with the implicit midpoint rule and write CSV.
    Simulate {
        /// System or Hamiltonian file.
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        steps: usize,
        /// Hamiltonian file, or `auto` to extract it from the system.
        #[arg(long)]
        energy: Option<String>,
    },
    /// Time tensor-contraction Hessians against finite differences.
    Bench {
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotHamiltonian { .. }
            | Error::NoConvergence { .. }
            | Error::SingularJacobian
            | Error::NotAnEquilibrium { .. } => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: polyham_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn load_system(path: &Path) -> CliResult<(PolySystem, Vec<String>)> {
    let text = read_input(path)?;
    if is_json(&text) {
        let sys: PolySystem = in_file(path, serde_json::from_str(&text).map_err(Error::from))?;
        let names = default_var_names(sys.dim());
        Ok((sys, names))
    } else {
        in_file(path, parse_system_with_vars(&text))
    }
}

fn load_hamiltonian(path: &Path) -> CliResult<(PolyHamiltonian, Vec<String>)> {
    let text = read_input(path)?;
    if is_json(&text) {
        let h: PolyHamiltonian = in_file(path, serde_json::from_str(&text).map_err(Error::from))?;
        let names = default_var_names(h.dim());
        Ok((h, names))
    } else {
        in_file(path, parse_hamiltonian_with_vars(&text))
    }
}

fn looks_like_hamiltonian(text: &str) -> bool {
    if is_json(text) {
        return serde_json::from_str::<serde_json::Value>(text)
            .map(|v| v.get("degree").is_some())
            .unwrap_or(false);
    }
    text.lines().any(|l| {
        let l = l.split('#').next().unwrap_or("").trim_start();
        l.strip_prefix('H')
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
}

/// A file holding either a system or a Hamiltonian, as a Hamiltonian.
fn load_as_hamiltonian(path: &Path, tol: f64) -> CliResult<(PolyHamiltonian, Vec<String>)> {
    if looks_like_hamiltonian(&read_input(path)?) {
        load_hamiltonian(path)
    } else {
        let (sys, names) = load_system(path)?;
        Ok((in_file(path, sys.extract_hamiltonian(tol))?, names))
    }
}

fn parse_point(s: &str, dim: usize) -> CliResult<Vec<f64>> {
    let x = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("invalid coordinate `{c}` in `{s}`")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    if x.len() != dim {
        return Err(Failure::usage(format!(
            "point `{s}` has {} coordinates, the system has {dim}",
            x.len()
        )));
    }
    Ok(x)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

/// Write `text` to `--out` and `json` beside it, or print one of them.
fn emit_pair(g: &Global, text: &str, json: &str) -> CliResult<()> {
    match &g.out {
        Some(path) => {
            write_file(path, text)?;
            write_file(&path.with_extension("json"), json)
        }
        None => {
            print!("{}", if g.json { json } else { text });
            if g.json {
                println!();
            }
            Ok(())
        }
    }
}

fn report(g: &Global, json: &serde_json::Value, human: &str) -> CliResult<()> {
    let body = if g.json {
        to_json(json) + "\n"
    } else {
        human.to_string()
    };
    match &g.out {
        Some(path) => write_file(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn cmd_check(g: &Global, path: &Path) -> CliResult<u8> {
    let (sys, _) = load_system(path)?;
    let check = in_file(path, sys.is_hamiltonian(g.tol))?;
    let human = match &check.witness {
        None => format!("Hamiltonian (dim {}, degree {})\n", sys.dim(), sys.degree()),
        Some(w) => format!(
            "not Hamiltonian: A_{} fails at index {:?} (violation {:e})\n",
            w.order, w.index, w.violation
        ),
    };
    let json = json!({
        "file": path.display().to_string(),
        "dim": sys.dim(),
        "degree": sys.degree(),
        "hamiltonian": check.is_hamiltonian,
        "witness": check.witness,
    });
    report(g, &json, &human)?;
    Ok(if check.is_hamiltonian { 0 } else { 1 })
}

fn cmd_extract(g: &Global, path: &Path) -> CliResult<u8> {
    let (sys, names) = load_system(path)?;
    let h = in_file(path, sys.extract_hamiltonian(g.tol))?;
    let text = emit_hamiltonian(&h, &names)?;
    emit_pair(g, &text, &to_json(&h))?;
    Ok(0)
}

fn cmd_build(g: &Global, path: &Path) -> CliResult<u8> {
    let (h, names) = load_hamiltonian(path)?;
    let sys = in_file(path, h.build_system())?;
    let text = emit_system(&sys, &names)?;
    emit_pair(g, &text, &to_json(&sys))?;
    Ok(0)
}

fn cmd_stability(g: &Global, path: &Path, at: &[String], refine: bool) -> CliResult<u8> {
    let (h, _) = load_as_hamiltonian(path, g.tol)?;
    let sys = h.build_system()?;
    let mut points = Vec::new();
    let mut human = String::new();
    for spec in at {
        let start = parse_point(spec, h.dim())?;
        let x = if refine {
            match newton_refine(&sys, &start, NEWTON_MAX_ITER, g.tol) {
                Ok(x) => x,
                Err(e) => {
                    human.push_str(&format!("{spec}: refinement failed: {e}\n"));
                    points.push(json!({ "input": start, "error": e.to_string() }));
                    continue;
                }
            }
        } else {
            start.clone()
        };
        match classify_equilibrium(&h, &x, g.tol) {
            Ok(v) => {
                human.push_str(&format!(
                    "{:?}: {:?} ({:?}; Hessian eigenvalues {:?})\n",
                    v.point, v.classification, v.rationale, v.hessian_eigenvalues
                ));
                points.push(json!({ "input": start, "verdict": v }));
            }
            Err(e @ Error::NotAnEquilibrium { .. }) => {
                human.push_str(&format!("{spec}: {e}\n"));
                points.push(json!({ "input": start, "error": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let def = hamiltonian_definiteness(&h, DEFAULT_RESTARTS, g.tol)?;
    human.push_str(&format!(
        "H is {:?}{}\n",
        def.kind,
        if def.certified { "" } else { " (sampled)" }
    ));
    let json = json!({
        "file": path.display().to_string(),
        "points": points,
        "hamiltonian_definiteness": def,
    });
    report(g, &json, &human)?;
    Ok(0)
}

fn cmd_simulate(
    g: &Global,
    path: &Path,
    x0: &str,
    h: f64,
    steps: usize,
    energy: Option<&str>,
) -> CliResult<u8> {
    let (sys, own_h) = if looks_like_hamiltonian(&read_input(path)?) {
        let h = load_hamiltonian(path)?.0;
        (h.build_system()?, Some(h))
    } else {
        (load_system(path)?.0, None)
    };
    let x0 = parse_point(x0, sys.dim())?;
    let ham = match energy {
        None => None,
        Some("auto") => match own_h {
            Some(h) => Some(h),
            None => Some(in_file(path, sys.extract_hamiltonian(g.tol))?),
        },
        Some(file) => Some(load_hamiltonian(Path::new(file))?.0),
    };
    if let Some(ham) = &ham {
        if ham.dim() != sys.dim() {
            return Err(Failure::usage(format!(
                "energy function has dim {}, the system has {}",
                ham.dim(),
                sys.dim()
            )));
        }
    }
    let traj = simulate(&sys, &x0, h, steps)?;
    let csv = traj.to_csv(ham.as_ref())?;
    match &g.out {
        Some(out) => write_file(out, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(ham) = &ham {
        eprintln!("energy drift: {:e}", energy_drift(ham, &traj)?);
    }
    Ok(0)
}

fn cmd_bench(g: &Global, dim: usize, order: usize, trials: usize) -> CliResult<u8> {
    if trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let r = bench_hessian(dim, order, trials, g.seed)?;
    let human = format!(
        "dim {} order {} trials {} seed {}\n\
         {:<22}{:>14}\n{:<22}{:>14.3e}\n{:<22}{:>14.3e}\n{:<22}{:>14.1}\n{:<22}{:>14.2e}\n",
        r.dim,
        r.order,
        r.trials,
        r.seed,
        "path",
        "median (s)",
        "tensor contraction",
        r.tensor_median_s,
        "finite differences",
        r.fd_median_s,
        "speedup",
        r.speedup,
        "max relative diff",
        r.max_relative_difference,
    );
    report(
        g,
        &serde_json::to_value(&r).expect("report serializes"),
        &human,
    )?;
    Ok(0)
}

fn run(cli: Cli) -> CliResult<u8> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(Failure::usage(format!(
            "--tol must be positive, got {}",
            g.tol
        )));
    }
    match &cli.command {
        Command::Check { system } => cmd_check(g, system),
        Command::Extract { system } => cmd_extract(g, system),
        Command::Build { hamiltonian } => cmd_build(g, hamiltonian),
        Command::Stability { input, at, refine } => cmd_stability(g, input, at, *refine),
        Command::Simulate {
            input,
            x0,
            h,
            steps,
            energy,
        } => cmd_simulate(g, input, x0, *h, *steps, energy.as_deref()),
        Command::Bench { dim, order, trials } => cmd_bench(g, *dim, *order, *trials),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
