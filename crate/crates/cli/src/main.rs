//! `quadra`: quadrature rules with prescribed nodes from truncated moment
//! data.
//!
//! ```text
//! quadra solve <file|dir> [--allow-infinity] [--float] [--minimal] [--jobs N]
//! quadra tmp <file> [--next-odd R]
//! quadra verify <measure> <instance> [--tol T]
//! quadra gen [--atoms K --prescribe P --include-infinity --seed S --out DIR]
//! ```
//!
//! Reports are JSON on stdout. Exit codes: 0 a rule exists (or the classical
//! problem is solvable, or the moments match), 1 it does not, 2 invalid input
//! (message on stderr, nothing on stdout), 3 indeterminate.

mod format;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use quadra_core::prescribed::{search_minimal, solve};
use quadra_core::tmp::{flat_extension, solve_tmp};
use quadra_core::verify::{compare, moments_of, random_instance};
use quadra_core::{Comparison, Error, InstanceSpec, PrescribedProblem, Scalar, TmpVerdict, Tolerances};
use serde_json::{json, Value};

use format::{instance_json, load_instance, load_measure, measure_json, scalar_json, scalars_json};
use report::{EXIT_INDETERMINATE, EXIT_INVALID, EXIT_NEGATIVE, EXIT_OK};

#[derive(Parser, Debug)]
#[command(name = "quadra", version, about = "Quadrature rules with prescribed nodes from truncated moments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a quadrature rule containing the prescribed nodes exists
    /// and construct it. A directory argument solves every `*.json` in it.
    Solve(SolveArgs),
    /// Solve the classical truncated moment problem for the instance moments.
    Tmp(TmpArgs),
    /// Compare the moments of a measure (or a solve report) with an instance.
    Verify(VerifyArgs),
    /// Write random instances together with their generating measures.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
struct RootArgs {
    /// Relative imaginary part below which a root of `g` counts as real.
    #[arg(long, value_name = "T")]
    root_imag: Option<f64>,
    /// Relative gap below which two roots count as repeated.
    #[arg(long, value_name = "T")]
    root_separation: Option<f64>,
}

impl RootArgs {
    fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(t) = self.root_imag {
            tol.root_imag = t;
        }
        if let Some(t) = self.root_separation {
            tol.root_separation = t;
        }
        tol
    }
}

#[derive(Args, Debug, Clone)]
struct SolveArgs {
    /// Instance file, or a directory of instance files.
    path: PathBuf,
    /// Permit an atom at infinity (also enabled by the file's `allow_infinity`).
    #[arg(long)]
    allow_infinity: bool,
    /// Run the floating-point pipeline regardless of the file's mode.
    #[arg(long)]
    float: bool,
    /// Search for the fewest atoms instead of using `d2` from the file.
    #[arg(long)]
    minimal: bool,
    /// Worker threads for directory input.
    #[arg(long, default_value_t = 1, value_name = "N")]
    jobs: usize,
    #[command(flatten)]
    roots: RootArgs,
}

#[derive(Args, Debug)]
struct TmpArgs {
    file: PathBuf,
    /// Value of the next odd moment; produces the flat extension and its
    /// unique measure when the problem has infinitely many solutions.
    #[arg(long, value_name = "R")]
    next_odd: Option<String>,
    #[arg(long)]
    float: bool,
    #[command(flatten)]
    roots: RootArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    measure: PathBuf,
    instance: PathBuf,
    /// Relative tolerance for floating-point moments.
    #[arg(long, default_value_t = 1e-6, value_name = "T")]
    tol: f64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 4, value_name = "K")]
    atoms: usize,
    #[arg(long, default_value_t = 1, value_name = "P")]
    prescribe: usize,
    #[arg(long)]
    include_infinity: bool,
    #[arg(long, default_value_t = 0, value_name = "S")]
    seed: u64,
    /// Number of instances, with seeds S, S+1, ...
    #[arg(long, default_value_t = 1, value_name = "N")]
    count: u64,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    min_node: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    max_node: f64,
    /// Output directory. Without it a single instance is printed to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_name = "N")]
    jobs: usize,
}

/// A command's result: JSON for stdout and an exit code, or an input error.
type Outcome = Result<(Value, i32), String>;

fn solve_file(path: &Path, args: &SolveArgs) -> Outcome {
    let tol = args.roots.tolerances();
    let inst = load_instance(path, args.float)?;
    let allow = args.allow_infinity || inst.allow_infinity;
    let at = |e: Error| format!("{}: {e}", path.display());
    let (outcome, atoms) = if args.minimal {
        let (n, out) = search_minimal(&inst.moments, &inst.prescribed, allow, &tol).map_err(at)?;
        (out, Some(n))
    } else {
        let problem = match inst.d2 {
            Some(d2) => PrescribedProblem::new(inst.moments, inst.prescribed, d2, allow, &tol),
            None => PrescribedProblem::infer(inst.moments, inst.prescribed, allow, &tol),
        }
        .map_err(at)?;
        (solve(&problem, &tol).map_err(at)?, None)
    };
    Ok((
        report::solve_report(&outcome, atoms),
        report::solve_exit_code(&outcome.verdict),
    ))
}

/// Runs `work` on each item with up to `jobs` threads, keeping input order.
fn parallel_map<T: Sync, R: Send>(items: &[T], jobs: usize, work: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = work(&items[i]);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every item processed"))
        .collect()
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let entries = fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Batch output is an array of per-file results; the exit code is the
/// largest one seen.
fn cmd_solve(args: &SolveArgs) -> Outcome {
    if !args.path.is_dir() {
        return solve_file(&args.path, args);
    }
    let files = json_files(&args.path)?;
    let results = parallel_map(&files, args.jobs, |f| (f.clone(), solve_file(f, args)));
    let mut code = EXIT_OK;
    let entries = results
        .into_iter()
        .map(|(file, r)| {
            let name = file.display().to_string();
            match r {
                Ok((report, c)) => {
                    code = code.max(c);
                    json!({ "file": name, "exit_code": c, "report": report })
                }
                Err(e) => {
                    code = code.max(EXIT_INVALID);
                    json!({ "file": name, "exit_code": EXIT_INVALID, "error": e })
                }
            }
        })
        .collect();
    Ok((Value::Array(entries), code))
}

fn cmd_tmp(args: &TmpArgs) -> Outcome {
    let tol = args.roots.tolerances();
    let inst = load_instance(&args.file, args.float)?;
    let at = |e: Error| format!("{}: {e}", args.file.display());
    let gamma = inst.moments;
    let verdict = match solve_tmp(&gamma, &tol) {
        Ok(v) => v,
        Err(Error::Indeterminate(msg)) => {
            return Ok((json!({ "status": "Indeterminate", "message": msg }), EXIT_INDETERMINATE))
        }
        Err(e) => return Err(at(e)),
    };
    let mut out = report::tmp_report(&verdict);
    let code = report::tmp_exit_code(&verdict);
    if let (TmpVerdict::InfinitelyMany { .. }, Some(r)) = (&verdict, &args.next_odd) {
        let r = Scalar::parse_exact(r)
            .map_err(|e| format!("--next-odd: {e}"))?
            .to_mode(gamma.mode());
        let extended = flat_extension(&gamma, &r, &tol).map_err(at)?;
        let ext = match solve_tmp(&extended, &tol) {
            Ok(v) => {
                let mut v = report::tmp_report(&v);
                v["moments"] = scalars_json(extended.as_slice());
                v
            }
            Err(Error::Indeterminate(msg)) => {
                out["flat_extension"] = json!({ "status": "Indeterminate", "message": msg });
                return Ok((out, EXIT_INDETERMINATE));
            }
            Err(e) => return Err(at(e)),
        };
        out["flat_extension"] = ext;
    }
    Ok((out, code))
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let measure = load_measure(&args.measure)?;
    let inst = load_instance(&args.instance, false)?;
    let actual = moments_of(&measure, inst.moments.degree());
    let verdict = compare(&inst.moments, &actual, args.tol).map_err(|e| e.to_string())?;
    Ok(match verdict {
        Comparison::Match => (json!({ "status": "Match" }), EXIT_OK),
        Comparison::Mismatch { index, delta } => (
            json!({ "status": "Mismatch", "index": index, "delta": scalar_json(&delta) }),
            EXIT_NEGATIVE,
        ),
    })
}

/// The instance is written with `allow_infinity: false` even when the
/// measure has an infinity atom; solving it then needs `--allow-infinity`.
fn generate(args: &GenArgs, seed: u64) -> Result<(Value, Value), String> {
    let spec = InstanceSpec {
        atom_count: args.atoms,
        atom_range: (args.min_node, args.max_node),
        prescribe: args.prescribe,
        include_infinity: args.include_infinity,
        seed,
        ..InstanceSpec::default()
    };
    let (measure, gamma, problem) = random_instance(&spec).map_err(|e| e.to_string())?;
    Ok((
        instance_json(&gamma, problem.prescribed(), problem.d2(), false),
        measure_json(&measure),
    ))
}

fn write_json(path: &Path, value: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_gen(args: &GenArgs) -> Outcome {
    let seeds: Vec<u64> = (0..args.count).map(|i| args.seed.wrapping_add(i)).collect();
    let Some(dir) = &args.out else {
        if args.count != 1 {
            return Err("--count above 1 needs --out".into());
        }
        let (instance, measure) = generate(args, args.seed)?;
        return Ok((json!({ "instance": instance, "measure": measure }), EXIT_OK));
    };
    // Generate everything before touching the file system.
    let generated = parallel_map(&seeds, args.jobs, |&s| generate(args, s).map(|g| (s, g)));
    let generated = generated.into_iter().collect::<Result<Vec<_>, String>>()?;
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut written = Vec::new();
    for (seed, (instance, measure)) in generated {
        let ip = dir.join(format!("instance-{seed}.json"));
        let mp = dir.join(format!("measure-{seed}.json"));
        write_json(&ip, &instance)?;
        write_json(&mp, &measure)?;
        written.push(json!({ "seed": seed, "instance": ip, "measure": mp }));
    }
    Ok((Value::Array(written), EXIT_OK))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Tmp(a) => cmd_tmp(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok((value, code)) => {
            let text = serde_json::to_string_pretty(&value).expect("serializable");
            // A closed pipe on stdout is not worth a panic.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(code as u8)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
