//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{self, ExperimentConfig, SolverKind};
use crate::generator::{self, expected_rule_count, LinearModelParams, Seed};
use crate::model::{is_answer_set_general, AtomSet, Program};
use crate::report;
use crate::solver::{self, DEFAULT_BRUTE_FORCE_CAP};
use crate::text::{format_program, parse_atom_list, parse_program};
use crate::theory;
use crate::translate::{check_equivalence_modulo_aux, to_two_literal};

#[derive(Debug, Parser)]
#[command(name = "randlp", version, about = "Random negative two-literal logic programs")]
pub struct Cli {
    /// Worker threads for experiments (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a program from L(c1, c2).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate, count or check answer sets of a program file.
    Solve(SolveArgs),
    /// Print closed-form predictions.
    Theory {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Write the per-size curve as CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Rewrite a negative program into negative two-literal form.
    Translate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Brute-force check that the output is equivalent modulo auxiliary atoms.
        #[arg(long)]
        verify: bool,
    },
    /// Run a batch experiment and write CSV.
    Experiment {
        kind: ExperimentKind,
        #[command(flatten)]
        args: ExperimentArgs,
    },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct SolveMode {
    #[arg(long)]
    enumerate: bool,
    #[arg(long)]
    count: bool,
    /// Comma-separated atoms to test as a candidate answer set.
    #[arg(long, value_name = "ATOMS")]
    check: Option<String>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    mode: SolveMode,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Avg,
    Dist,
    Consistency,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Atom counts: `50`, `50,100,150` or `100:1000:100` (start:end:step).
    #[arg(long)]
    n: String,
    #[arg(long)]
    c1: String,
    #[arg(long)]
    c2: String,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Abort a row if any program has more answer sets than this.
    #[arg(long)]
    limit: Option<u64>,
    /// Count with the reduct-based brute-force scan (n <= 20).
    #[arg(long)]
    brute_force: bool,
    #[arg(long)]
    out: PathBuf,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse {what} list {s:?}")))
}

fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(s, "n"),
        [a, b, c] => {
            let bad = || Error::InvalidArgument(format!("cannot parse range {s:?}"));
            let start: usize = a.trim().parse().map_err(|_| bad())?;
            let end: usize = b.trim().parse().map_err(|_| bad())?;
            let step: usize = c.trim().parse().map_err(|_| bad())?;
            if step == 0 || end < start {
                return Err(bad());
            }
            Ok((start..=end).step_by(step).collect())
        }
        _ => Err(Error::InvalidArgument(format!("cannot parse n list {s:?}"))),
    }
}

fn read_program(path: &Path) -> Result<Program> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_program(&text)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn set_text(p: &Program, s: &AtomSet) -> String {
    let names: Vec<String> = s.iter().map(|a| p.atom_name(a)).collect();
    format!("{{{}}}", names.join(", "))
}

fn solve(args: &SolveArgs, out: &mut (dyn Write + Send)) -> Result<()> {
    let p = read_program(&args.input)?;
    if let Some(list) = &args.mode.check {
        let s = AtomSet::from_atoms(p.universe(), parse_atom_list(&p, list)?)?;
        let n2 = if p.is_n2() {
            solver::is_answer_set_n2(&p, &s)?.to_string()
        } else {
            "n/a".to_string()
        };
        writeln!(out, "candidate: {}", set_text(&p, &s))?;
        writeln!(out, "n2: {n2}")?;
        writeln!(out, "general: {}", is_answer_set_general(&p, &s)?)?;
        return Ok(());
    }
    let collection = if p.is_n2() {
        if args.mode.count && args.limit.is_none() {
            writeln!(out, "{}", solver::count_answer_sets(&p)?)?;
            return Ok(());
        }
        solver::enumerate_answer_sets(&p, args.limit)?
    } else {
        let mut c = solver::enumerate_brute_force_with_cap(&p, DEFAULT_BRUTE_FORCE_CAP)?;
        if let Some(l) = args.limit {
            if c.sets.len() > l {
                c.sets.truncate(l);
                c.truncated = true;
            }
        }
        c
    };
    if args.mode.count {
        writeln!(out, "{}", collection.count())?;
        return Ok(());
    }
    for s in &collection.sets {
        writeln!(out, "{}", set_text(&p, s))?;
    }
    writeln!(
        out,
        "answer sets: {}{}",
        collection.count(),
        if collection.truncated { " (truncated)" } else { "" }
    )?;
    Ok(())
}

fn theory_report(n: usize, c1: f64, c2: f64, gamma: f64, curve: Option<&Path>, out: &mut (dyn Write + Send)) -> Result<()> {
    let params = LinearModelParams::new(n, c1, c2)?;
    let tp = theory::theory_params(n, c1, c2)?;
    let total = theory::expected_total(n, c1, c2)?;
    let lines = [
        ("n", n.to_string()),
        ("c1", c1.to_string()),
        ("c2", c2.to_string()),
        ("expected_rule_count", expected_rule_count(&params).to_string()),
        ("alpha", tp.alpha.to_string()),
        ("x0", tp.x0.to_string()),
        ("sigma", tp.sigma.to_string()),
        ("c0", tp.c0.to_string()),
        ("delta", tp.delta.to_string()),
        ("phi_x0_direct", tp.phi_x0_direct.to_string()),
        ("phi_x0_asymptotic", tp.phi_x0_asymptotic.to_string()),
        ("expected_total", total.to_string()),
        ("limit_expected_total", tp.limit_expected_total.to_string()),
        ("consistency_full", theory::consistency_probability(total, 1.0)?.to_string()),
        ("gamma", gamma.to_string()),
        ("consistency_gamma", theory::consistency_probability(total, gamma)?.to_string()),
    ];
    for (k, v) in lines {
        writeln!(out, "{k} = {v}")?;
    }
    if let Some(path) = curve {
        write_file(path, &report::curve_csv(&theory::theory_curve(n, c1, c2)?))?;
    }
    Ok(())
}

fn experiment(kind: ExperimentKind, a: &ExperimentArgs, err: &mut (dyn Write + Send)) -> Result<()> {
    let cfg = ExperimentConfig {
        ns: parse_n_list(&a.n)?,
        c1s: parse_list(&a.c1, "c1")?,
        c2s: parse_list(&a.c2, "c2")?,
        trials: a.trials,
        seed: Seed(a.seed),
        gamma: a.gamma,
        solver_limit: a.limit,
        solver: if a.brute_force {
            SolverKind::BruteForce
        } else {
            SolverKind::Backtracking
        },
    };
    let mut meta = vec![
        ("experiment", format!("{kind:?}").to_lowercase()),
        ("seed", a.seed.to_string()),
        ("trials", a.trials.to_string()),
        (
            "seed_scheme",
            "trial i draws from ChaCha8 seeded with splitmix64(seed + (i+1)*0x9E3779B97F4A7C15)".into(),
        ),
    ];
    let csv = match kind {
        ExperimentKind::Avg => {
            let rows = experiments::run_avg_experiment_with_progress(&cfg, |r| {
                let _ = writeln!(
                    err,
                    "n={} c1={} c2={}: avg {} (stderr {}), theory {}",
                    r.n, r.c1, r.c2, r.avg_answer_sets, r.stderr, r.theory_finite_n
                );
            })?;
            let resamples: u64 = rows.iter().map(|r| r.resamples).sum();
            meta.push(("empty_resamples", resamples.to_string()));
            report::avg_csv(&rows)
        }
        ExperimentKind::Dist => {
            let d = experiments::run_dist_experiment(&cfg)?;
            let _ = writeln!(err, "n={} c1={} c2={}: difference rate {}", d.n, d.c1, d.c2, d.difference_rate);
            meta.push(("difference_rate", d.difference_rate.to_string()));
            meta.push(("empty_resamples", d.resamples.to_string()));
            report::dist_csv(&d)
        }
        ExperimentKind::Consistency => {
            let c = experiments::run_consistency_experiment_with_progress(&cfg, |r| {
                let _ = writeln!(
                    err,
                    "n={} c1={} c2={}: ratio {} (full {}, gamma {})",
                    r.n, r.c1, r.c2, r.empirical_ratio, r.pred_full, r.pred_gamma
                );
            })?;
            meta.push(("gamma", c.gamma.to_string()));
            report::consistency_csv(&c)
        }
    };
    write_file(&a.out, &csv)?;
    let meta_text: String = meta.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    let mut meta_path = a.out.clone().into_os_string();
    meta_path.push(".meta");
    write_file(Path::new(&meta_path), &meta_text)
}

fn execute(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    match &cli.command {
        Command::Gen { n, c1, c2, seed, out: path } => {
            let params = LinearModelParams::new(*n, *c1, *c2)?;
            let text = format_program(&generator::generate(&params, Seed(*seed))?);
            match path {
                Some(p) => write_file(p, &text),
                None => Ok(out.write_all(text.as_bytes())?),
            }
        }
        Command::Solve(args) => solve(args, out),
        Command::Theory { n, c1, c2, gamma, curve } => {
            theory_report(*n, *c1, *c2, *gamma, curve.as_deref(), out)
        }
        Command::Translate { input, out: path, verify } => {
            let p = read_program(input)?;
            let t = to_two_literal(&p)?;
            write_file(path, &format_program(&t.output))?;
            if *verify {
                let ok = check_equivalence_modulo_aux(&p, &t.output, &t.aux_set(), DEFAULT_BRUTE_FORCE_CAP)?;
                writeln!(out, "equivalent: {ok}")?;
                if !ok {
                    return Err(Error::InvalidArgument("translation is not equivalent".into()));
                }
            }
            Ok(())
        }
        Command::Experiment { kind, args } => experiment(*kind, args, err),
    }
}

fn run_with_threads(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<()> {
    #[cfg(feature = "parallel")]
    if let Some(t) = cli.threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        return pool.install(|| execute(cli, out, err));
    }
    execute(cli, out, err)
}

/// Parses `argv` (program name first) and runs it. Returns the exit code:
/// 0 on success, 1 on a domain error, 2 on a usage error.
pub fn cli_dispatch<I, T>(argv: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    match run_with_threads(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_lists() {
        assert_eq!(parse_n_list("50").unwrap(), vec![50]);
        assert_eq!(parse_n_list("50, 100").unwrap(), vec![50, 100]);
        assert_eq!(parse_n_list("100:300:100").unwrap(), vec![100, 200, 300]);
        assert!(parse_n_list("1:2").is_err());
        assert!(parse_n_list("5:1:1").is_err());
        assert!(parse_n_list("x").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(cli_dispatch(["randlp", "frobnicate"], &mut o, &mut e), 2);
        assert_eq!(cli_dispatch(["randlp", "gen", "--n", "5", "--bogus"], &mut o, &mut e), 2);
        assert!(!e.is_empty());
    }

    #[test]
    fn domain_errors_exit_one() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = cli_dispatch(
            ["randlp", "gen", "--n", "3", "--c1", "5", "--c2", "0", "--seed", "1"],
            &mut o,
            &mut e,
        );
        assert_eq!(code, 1);
        assert!(String::from_utf8(e).unwrap().contains("must exceed"));
    }

    #[test]
    fn theory_report_keys() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = cli_dispatch(
            ["randlp", "theory", "--n", "200", "--c1", "10", "--c2", "0"],
            &mut o,
            &mut e,
        );
        assert_eq!(code, 0);
        let text = String::from_utf8(o).unwrap();
        assert!(text.contains("alpha = 5.7289"));
        assert!(text.contains("x0 = 165.0894"));
    }
}
