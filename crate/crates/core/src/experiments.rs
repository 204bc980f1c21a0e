//! Batch experiments: average answer-set counts, size distributions and
//! consistency ratios for programs drawn from `L(c1, c2)`.
//!
//! Trial `i` of every batch draws its program from `seed.substream(i)`, so a
//! batch is a pure function of its configuration. Trials run in parallel
//! chunks (feature `parallel`) and are folded in trial order; all tallies are
//! integers, so the output does not depend on the thread count.

use crate::error::{invalid, Error, Result};
use crate::generator::{generate_with, LinearModelParams, Sampling, Seed};
use crate::model::Program;
use crate::solver::{self, DEFAULT_BRUTE_FORCE_CAP};
use crate::theory;

/// Which exact procedure counts answer sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Backtracking,
    /// Reduct-based scan of all subsets; only for small `n`.
    BruteForce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub c1s: Vec<f64>,
    pub c2s: Vec<f64>,
    pub trials: u64,
    pub seed: Seed,
    pub gamma: f64,
    /// Per-program cap on enumerated answer sets; hitting it is an error.
    pub solver_limit: Option<u64>,
    pub solver: SolverKind,
}

impl ExperimentConfig {
    pub fn new(n: usize, c1: f64, c2: f64, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            ns: vec![n],
            c1s: vec![c1],
            c2s: vec![c2],
            trials,
            seed: Seed(seed),
            gamma: 0.5,
            solver_limit: None,
            solver: SolverKind::Backtracking,
        }
    }

    /// Every `(n, c1, c2)` combination, `n` outermost.
    pub fn grid(&self) -> Result<Vec<LinearModelParams>> {
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.ns.is_empty() || self.c1s.is_empty() || self.c2s.is_empty() {
            return invalid("empty parameter list");
        }
        let mut out = Vec::new();
        for &n in &self.ns {
            for &c1 in &self.c1s {
                for &c2 in &self.c2s {
                    out.push(LinearModelParams::new(n, c1, c2)?);
                }
            }
        }
        Ok(out)
    }

    fn single(&self) -> Result<LinearModelParams> {
        let grid = self.grid()?;
        if grid.len() != 1 {
            return invalid("this experiment takes a single (n, c1, c2)");
        }
        Ok(grid[0])
    }
}

const CHUNK: u64 = 512;

/// Runs `trial(i)` for `i in 0..trials` and feeds the results to `sink` in
/// index order. The first failing trial (lowest index) aborts the run.
fn run_trials<T, F, S>(trials: u64, trial: F, mut sink: S) -> Result<()>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
    S: FnMut(T),
{
    let mut start = 0;
    while start < trials {
        let end = (start + CHUNK).min(trials);
        #[cfg(feature = "parallel")]
        let results: Vec<Result<T>> = {
            use rayon::prelude::*;
            (start..end).into_par_iter().map(&trial).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let results: Vec<Result<T>> = (start..end).map(&trial).collect();
        for r in results {
            sink(r?);
        }
        start = end;
    }
    Ok(())
}

struct TrialOutcome {
    /// `(size, count)` pairs for the answer sets found.
    sizes: Vec<(usize, u64)>,
    resamples: u64,
}

impl TrialOutcome {
    fn count(&self) -> u64 {
        self.sizes.iter().map(|&(_, c)| c).sum()
    }
}

fn trial_program(params: &LinearModelParams, seed: Seed, i: u64) -> Result<(Program, u64)> {
    let g = generate_with(params, seed.substream(i), Sampling::Auto)?;
    Ok((g.program, g.resamples))
}

fn solve_trial(params: &LinearModelParams, cfg: &ExperimentConfig, i: u64) -> Result<TrialOutcome> {
    let (program, resamples) = trial_program(params, cfg.seed, i)?;
    let wrap = |e: Error| Error::Trial {
        trial: i,
        message: e.to_string(),
    };
    let hist = match cfg.solver {
        SolverKind::Backtracking => {
            let (hist, truncated) = solver::size_histogram(&program, cfg.solver_limit).map_err(wrap)?;
            if truncated {
                return Err(Error::Trial {
                    trial: i,
                    message: format!("solver limit of {} answer sets reached", cfg.solver_limit.unwrap_or(0)),
                });
            }
            hist
        }
        SolverKind::BruteForce => {
            let c = solver::enumerate_brute_force_with_cap(&program, DEFAULT_BRUTE_FORCE_CAP).map_err(wrap)?;
            let mut hist = vec![0u64; program.universe() + 1];
            for (&k, &v) in &c.size_histogram {
                hist[k] = v;
            }
            hist
        }
    };
    Ok(TrialOutcome {
        sizes: hist
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .collect(),
        resamples,
    })
}

/// Mean and standard error from integer tallies.
fn mean_and_stderr(trials: u64, sum: u128, sum_sq: u128) -> (f64, f64) {
    let t = trials as f64;
    let mean = sum as f64 / t;
    if trials < 2 {
        return (mean, 0.0);
    }
    let numer = (trials as u128 * sum_sq).saturating_sub(sum * sum);
    let var = numer as f64 / (t * (t - 1.0));
    (mean, (var / t).sqrt())
}

/// One row of the average-count experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct AvgResult {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    pub trials: u64,
    pub avg_answer_sets: f64,
    /// Sample standard deviation of the per-program counts over `sqrt(trials)`.
    pub stderr: f64,
    pub theory_finite_n: f64,
    /// `None` when `c1 = 0` (no limit constant exists).
    pub theory_limit: Option<f64>,
    pub resamples: u64,
}

fn limit_or_none(c1: f64, c2: f64) -> Result<Option<f64>> {
    match theory::limit_expected_total(c1, c2) {
        Ok(v) => Ok(Some(v)),
        Err(Error::UnsupportedParameters(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_avg_row(params: &LinearModelParams, cfg: &ExperimentConfig) -> Result<AvgResult> {
    let (mut sum, mut sum_sq, mut resamples) = (0u128, 0u128, 0u64);
    run_trials(
        cfg.trials,
        |i| solve_trial(params, cfg, i),
        |o| {
            let c = o.count() as u128;
            sum += c;
            sum_sq += c * c;
            resamples += o.resamples;
        },
    )?;
    let (avg, stderr) = mean_and_stderr(cfg.trials, sum, sum_sq);
    Ok(AvgResult {
        n: params.n(),
        c1: params.c1(),
        c2: params.c2(),
        trials: cfg.trials,
        avg_answer_sets: avg,
        stderr,
        theory_finite_n: theory::expected_total(params.n(), params.c1(), params.c2())?,
        theory_limit: limit_or_none(params.c1(), params.c2())?,
        resamples,
    })
}

/// Average number of answer sets for every grid point, next to the finite-`n`
/// expectation and the large-`n` limit.
pub fn run_avg_experiment(cfg: &ExperimentConfig) -> Result<Vec<AvgResult>> {
    cfg.grid()?.iter().map(|p| run_avg_row(p, cfg)).collect()
}

/// Like [`run_avg_experiment`] but reports each finished row to `progress`.
pub fn run_avg_experiment_with_progress<P>(cfg: &ExperimentConfig, mut progress: P) -> Result<Vec<AvgResult>>
where
    P: FnMut(&AvgResult),
{
    let mut rows = Vec::new();
    for p in cfg.grid()? {
        let row = run_avg_row(&p, cfg)?;
        progress(&row);
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistRow {
    pub k: usize,
    pub empirical_avg: f64,
    pub model_e_nk: f64,
    pub chi_k: f64,
}

/// Per-size comparison of observed answer sets with `E[N_k]` and `chi(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistResult {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    pub trials: u64,
    /// Rows for `k = 0..=n`.
    pub rows: Vec<DistRow>,
    /// `difference_rate(chi, empirical)` over `k = 1..n-1`.
    pub difference_rate: f64,
    pub total_answer_sets: u64,
    pub resamples: u64,
}

pub fn run_dist_experiment(cfg: &ExperimentConfig) -> Result<DistResult> {
    let params = cfg.single()?;
    let (n, c1, c2) = (params.n(), params.c1(), params.c2());
    let tp = theory::theory_params(n, c1, c2)?;
    let mut totals = vec![0u64; n + 1];
    let mut resamples = 0;
    run_trials(
        cfg.trials,
        |i| solve_trial(&params, cfg, i),
        |o| {
            for &(k, c) in &o.sizes {
                totals[k] += c;
            }
            resamples += o.resamples;
        },
    )?;
    let t = cfg.trials as f64;
    let rows: Vec<DistRow> = (0..=n)
        .map(|k| {
            let model_e_nk = if k == 0 || k == n {
                0.0
            } else {
                theory::expected_count_size_k(n, k, c1, c2)?
            };
            Ok(DistRow {
                k,
                empirical_avg: totals[k] as f64 / t,
                model_e_nk,
                chi_k: theory::chi(k as f64, &tp),
            })
        })
        .collect::<Result<_>>()?;
    let inner = &rows[1..n];
    let f: Vec<f64> = inner.iter().map(|r| r.chi_k).collect();
    let g: Vec<f64> = inner.iter().map(|r| r.empirical_avg).collect();
    Ok(DistResult {
        n,
        c1,
        c2,
        trials: cfg.trials,
        difference_rate: difference_rate(&f, &g)?,
        rows,
        total_answer_sets: totals.iter().sum(),
        resamples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsRow {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    pub trials: u64,
    pub empirical_ratio: f64,
    /// `1 - exp(-E)`.
    pub pred_full: f64,
    /// `1 - exp(-gamma E)`.
    pub pred_gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsResult {
    pub gamma: f64,
    pub rows: Vec<ConsRow>,
}

fn run_consistency_row(params: &LinearModelParams, cfg: &ExperimentConfig) -> Result<ConsRow> {
    let mut consistent = 0u64;
    run_trials(
        cfg.trials,
        |i| {
            let (program, _) = trial_program(params, cfg.seed, i)?;
            solver::has_answer_set(&program).map_err(|e| Error::Trial {
                trial: i,
                message: e.to_string(),
            })
        },
        |found| consistent += found as u64,
    )?;
    let e = theory::expected_total(params.n(), params.c1(), params.c2())?;
    Ok(ConsRow {
        n: params.n(),
        c1: params.c1(),
        c2: params.c2(),
        trials: cfg.trials,
        empirical_ratio: consistent as f64 / cfg.trials as f64,
        pred_full: theory::consistency_probability(e, 1.0)?,
        pred_gamma: theory::consistency_probability(e, cfg.gamma)?,
    })
}

/// Fraction of programs with at least one answer set, with the two
/// closed-form estimates. Solving stops at the first answer set.
pub fn run_consistency_experiment(cfg: &ExperimentConfig) -> Result<ConsResult> {
    run_consistency_experiment_with_progress(cfg, |_| {})
}

pub fn run_consistency_experiment_with_progress<P>(cfg: &ExperimentConfig, mut progress: P) -> Result<ConsResult>
where
    P: FnMut(&ConsRow),
{
    theory::consistency_probability(0.0, cfg.gamma)?;
    let mut rows = Vec::new();
    for p in cfg.grid()? {
        let row = run_consistency_row(&p, cfg)?;
        progress(&row);
        rows.push(row);
    }
    Ok(ConsResult {
        gamma: cfg.gamma,
        rows,
    })
}

/// `sum (f - g)^2 / sum f^2`.
pub fn difference_rate(f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != g.len() {
        return invalid(format!("curves have different lengths ({} and {})", f.len(), g.len()));
    }
    let denom: f64 = f.iter().map(|x| x * x).sum();
    if !(denom > 0.0) {
        return invalid("reference curve is identically zero");
    }
    let numer: f64 = f.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(numer / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_rate_basics() {
        let f = [0.3, 1.2, 0.5];
        assert_eq!(difference_rate(&f, &f).unwrap(), 0.0);
        assert_eq!(difference_rate(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0);
        assert!(difference_rate(&[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(difference_rate(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn stderr_from_tallies() {
        // counts 1, 2, 3: mean 2, sample sd 1.
        let (m, se) = mean_and_stderr(3, 6, 14);
        assert_eq!(m, 2.0);
        assert!((se - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_stderr(1, 5, 25), (5.0, 0.0));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(10, 5.0, 0.0, 0, 1);
        assert!(run_avg_experiment(&cfg).is_err());
        cfg.trials = 1;
        cfg.ns = vec![4];
        assert!(run_avg_experiment(&cfg).is_err());
        cfg.ns = vec![10, 12];
        assert!(run_dist_experiment(&cfg).is_err());
    }

    #[test]
    fn single_trial_matches_solver() {
        let cfg = ExperimentConfig::new(30, 5.0, 0.0, 1, 77);
        let rows = run_avg_experiment(&cfg).unwrap();
        let (p, _) = trial_program(&LinearModelParams::new(30, 5.0, 0.0).unwrap(), Seed(77), 0).unwrap();
        assert_eq!(rows[0].avg_answer_sets, solver::count_answer_sets(&p).unwrap() as f64);
        assert_eq!(rows[0].stderr, 0.0);
    }

    #[test]
    fn solver_limit_aborts() {
        let mut cfg = ExperimentConfig::new(40, 5.0, 0.0, 50, 3);
        cfg.solver_limit = Some(1);
        match run_avg_experiment(&cfg) {
            Err(Error::Trial { message, .. }) => assert!(message.contains("limit")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dist_and_avg_agree() {
        let cfg = ExperimentConfig::new(30, 5.0, 0.0, 300, 12);
        let avg = run_avg_experiment(&cfg).unwrap();
        let dist = run_dist_experiment(&cfg).unwrap();
        let sum: f64 = dist.rows.iter().map(|r| r.empirical_avg).sum();
        assert!((sum - avg[0].avg_answer_sets).abs() < 1e-12);
        assert_eq!(dist.rows[0].empirical_avg, 0.0);
        assert_eq!(dist.rows[30].empirical_avg, 0.0);
        assert_eq!(dist.rows.len(), 31);
        assert_eq!(dist.total_answer_sets as f64 / 300.0, avg[0].avg_answer_sets);
    }
}
