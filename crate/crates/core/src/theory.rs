//! Closed-form predictions for random programs under `L(c1, c2)`.
//!
//! Everything that multiplies huge binomials by tiny probabilities is done in
//! log space; values are exponentiated only at the end.

use std::f64::consts::{E, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::generator::LinearModelParams;

const ALPHA_RESIDUAL: f64 = 1e-12;

/// Unique `alpha > 1` with `alpha ln(alpha) = c1`.
///
/// Bisection on `[1, max(e, c1 + 2)]` down to a bracket of width `1e-8`,
/// then Newton steps until the residual is at most `1e-12`.
pub fn solve_alpha(c1: f64) -> Result<f64> {
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::UnsupportedParameters(format!(
            "alpha is defined only for c1 > 0 (got {c1})"
        )));
    }
    let f = |a: f64| a * a.ln() - c1;
    let (mut lo, mut hi) = (1.0, E.max(c1 + 2.0));
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut alpha = 0.5 * (lo + hi);
    for _ in 0..50 {
        let r = f(alpha);
        if r.abs() <= ALPHA_RESIDUAL {
            break;
        }
        let next = alpha - r / (alpha.ln() + 1.0);
        if f(next).abs() >= r.abs() {
            break;
        }
        alpha = next;
    }
    Ok(alpha)
}

/// `ln C(n, k)` through log-gamma.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn model(n: usize, c1: f64, c2: f64) -> Result<LinearModelParams> {
    LinearModelParams::new(n, c1, c2)
}

fn check_size(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return invalid(format!("answer-set size k = {k} must satisfy 0 < k < {n}"));
    }
    Ok(())
}

/// `ln(1 - q^m)` computed without cancellation.
fn ln_one_minus_pow(ln_q: f64, m: f64) -> f64 {
    (-(m * ln_q).exp_m1()).ln()
}

fn log_pr(params: &LinearModelParams, k: usize) -> f64 {
    let n = params.n();
    let t = (n - k) as f64;
    let ln_q = (-params.p()).ln_1p();
    let ln_1md = (-params.d()).ln_1p();
    let pure = if t > 1.0 { t * (t - 1.0) * ln_q } else { 0.0 };
    pure + k as f64 * ln_one_minus_pow(ln_q, t) + t * ln_1md
}

/// `ln Pr(k)`, the log-probability that a fixed `k`-subset is an answer set.
pub fn log_prob_answer_set(n: usize, k: usize, c1: f64, c2: f64) -> Result<f64> {
    let params = model(n, c1, c2)?;
    check_size(n, k)?;
    Ok(log_pr(&params, k))
}

/// `Pr(k) = q^((n-k)(n-k-1)) (1 - q^(n-k))^k (1 - d)^(n-k)`.
pub fn prob_answer_set(n: usize, k: usize, c1: f64, c2: f64) -> Result<f64> {
    log_prob_answer_set(n, k, c1, c2).map(f64::exp)
}

/// `ln E[N_k] = ln C(n, k) + ln Pr(k)`.
pub fn log_expected_count_size_k(n: usize, k: usize, c1: f64, c2: f64) -> Result<f64> {
    let lp = log_prob_answer_set(n, k, c1, c2)?;
    Ok(ln_binomial(n, k) + lp)
}

/// Expected number of answer sets of size `k`.
pub fn expected_count_size_k(n: usize, k: usize, c1: f64, c2: f64) -> Result<f64> {
    log_expected_count_size_k(n, k, c1, c2).map(f64::exp)
}

/// Expected number of answer sets, `sum_{k=1}^{n-1} E[N_k]`, summed in
/// ascending order of magnitude.
pub fn expected_total(n: usize, c1: f64, c2: f64) -> Result<f64> {
    let params = model(n, c1, c2)?;
    if n < 2 {
        return invalid("expected total needs n >= 2");
    }
    let mut terms: Vec<f64> = (1..n)
        .map(|k| (ln_binomial(n, k) + log_pr(&params, k)).exp())
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum())
}

/// Large-`n` limit of the expected number of answer sets,
/// `alpha e^((c1 - c2) / alpha) / (alpha + c1)`.
pub fn limit_expected_total(c1: f64, c2: f64) -> Result<f64> {
    let alpha = solve_alpha(c1)?;
    Ok(alpha * ((c1 - c2) / alpha).exp() / (alpha + c1))
}

/// `ln phi(x)`, the Stirling-based continuous stand-in for `ln E[N_x]`.
pub fn log_phi(x: f64, n: usize, c1: f64, c2: f64) -> Result<f64> {
    let params = model(n, c1, c2)?;
    let nf = n as f64;
    if !(x > 0.0 && x < nf) {
        return invalid(format!("phi is defined for 0 < x < {n} (got {x})"));
    }
    let ln_q = (-params.p()).ln_1p();
    let ln_r = (-params.d()).ln_1p() - ln_q;
    let t = nf - x;
    let prefactor = 0.5 * (nf.ln() - (2.0 * PI).ln() - x.ln() - t.ln());
    let in_part = x * (nf.ln() + ln_one_minus_pow(ln_q, t) - x.ln());
    let out_part = t * (nf.ln() + ln_r + t * ln_q - t.ln());
    Ok(prefactor + in_part + out_part)
}

pub fn phi(x: f64, n: usize, c1: f64, c2: f64) -> Result<f64> {
    log_phi(x, n, c1, c2).map(f64::exp)
}

/// Derived constants of the Gaussian approximation for fixed `(n, c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    /// Peak location `(alpha - 1) n / alpha`.
    pub x0: f64,
    /// Width `sqrt((alpha - 1) n) / (alpha + c1)`.
    pub sigma: f64,
    pub c0: f64,
    /// `c0 sqrt(n ln n)`.
    pub delta: f64,
    /// `phi(x0)` evaluated directly.
    pub phi_x0_direct: f64,
    /// `alpha e^((c1 - c2)/alpha) / sqrt(2 pi (alpha - 1) n)`.
    pub phi_x0_asymptotic: f64,
    pub limit_expected_total: f64,
}

pub fn theory_params(n: usize, c1: f64, c2: f64) -> Result<TheoryParams> {
    model(n, c1, c2)?;
    if n < 2 {
        return invalid("theory parameters need n >= 2");
    }
    let alpha = solve_alpha(c1)?;
    let nf = n as f64;
    let x0 = (alpha - 1.0) * nf / alpha;
    let sigma = ((alpha - 1.0) * nf).sqrt() / (alpha + c1);
    let c0 = (2f64.sqrt() * (alpha + c1) / (alpha - 1.0).sqrt()).max(1.0 / c1.sqrt());
    let delta = c0 * (nf * nf.ln()).sqrt();
    let scale = alpha * ((c1 - c2) / alpha).exp();
    Ok(TheoryParams {
        n,
        c1,
        c2,
        alpha,
        x0,
        sigma,
        c0,
        delta,
        phi_x0_direct: phi(x0, n, c1, c2)?,
        phi_x0_asymptotic: scale / (2.0 * PI * (alpha - 1.0) * nf).sqrt(),
        limit_expected_total: scale / (alpha + c1),
    })
}

/// Gaussian approximation `phi(x0) exp(-(x - x0)^2 / (2 sigma^2))`.
pub fn chi(x: f64, tp: &TheoryParams) -> f64 {
    let z = (x - tp.x0) / tp.sigma;
    tp.phi_x0_direct * (-0.5 * z * z).exp()
}

/// Closed-form integral of [`chi`] over the real line.
pub fn chi_integral(tp: &TheoryParams) -> f64 {
    (2.0 * PI).sqrt() * tp.sigma * tp.phi_x0_direct
}

/// `1 - exp(-gamma E)`; `gamma = 1` is the independence estimate.
pub fn consistency_probability(expected_total: f64, gamma: f64) -> Result<f64> {
    if !(expected_total >= 0.0) {
        return invalid(format!("expected total must be non-negative (got {expected_total})"));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return invalid(format!("gamma must lie in (0, 1] (got {gamma})"));
    }
    Ok(-(-gamma * expected_total).exp_m1())
}

/// One row of the per-size theory curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub k: usize,
    pub pr: f64,
    pub expected: f64,
    pub phi: f64,
    pub chi: f64,
}

/// `Pr(k)`, `E[N_k]`, `phi(k)` and `chi(k)` for `k = 1..n-1`.
pub fn theory_curve(n: usize, c1: f64, c2: f64) -> Result<Vec<CurvePoint>> {
    let tp = theory_params(n, c1, c2)?;
    (1..n)
        .map(|k| {
            let lp = log_prob_answer_set(n, k, c1, c2)?;
            Ok(CurvePoint {
                k,
                pr: lp.exp(),
                expected: (ln_binomial(n, k) + lp).exp(),
                phi: phi(k as f64, n, c1, c2)?,
                chi: chi(k as f64, &tp),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn alpha_values() {
        assert!((solve_alpha(E).unwrap() - E).abs() < 1e-12);
        assert!((solve_alpha(5.0).unwrap() - 3.7687).abs() < 5e-5);
        assert!((solve_alpha(10.0).unwrap() - 5.7289).abs() < 5e-5);
        assert!(solve_alpha(0.0).is_err());
        assert!(solve_alpha(-1.0).is_err());
    }

    #[test]
    fn alpha_residual_and_monotonicity() {
        let mut prev = 1.0;
        for i in 1..=400 {
            let c1 = i as f64 * 0.05;
            let a = solve_alpha(c1).unwrap();
            assert!((a * a.ln() - c1).abs() <= 1e-12, "c1 = {c1}");
            assert!(a > prev);
            prev = a;
        }
    }

    #[test]
    fn pr_exponent_collapse_at_n_minus_one() {
        // k = n - 1: no pure rules inside T, so Pr = (1 - q)^(n-1) (1 - d).
        let (n, c1, c2) = (12, 3.0, 2.0);
        let p = c1 / n as f64;
        let d = c2 / n as f64;
        let want = p.powi(n as i32 - 1) * (1.0 - d);
        assert!(close(prob_answer_set(n, n - 1, c1, c2).unwrap(), want, 1e-12));
    }

    #[test]
    fn pr_rejects_trivial_sizes() {
        assert!(prob_answer_set(10, 0, 5.0, 0.0).is_err());
        assert!(prob_answer_set(10, 10, 5.0, 0.0).is_err());
        assert!(expected_count_size_k(10, 11, 5.0, 0.0).is_err());
    }

    #[test]
    fn two_atom_expectation() {
        assert!(close(expected_count_size_k(2, 1, 1.0, 0.0).unwrap(), 1.0, 1e-14));
        assert!(close(expected_total(2, 1.0, 0.0).unwrap(), 1.0, 1e-14));
    }

    #[test]
    fn expected_total_reference_values() {
        // Reference values from 40-digit arithmetic.
        assert!(close(expected_total(50, 5.0, 0.0).unwrap(), 1.658469837465068, 1e-11));
        assert!(close(expected_total(1000, 5.0, 0.0).unwrap(), 1.621541414980976, 1e-10));
        assert!(close(expected_total(200, 10.0, 4.0).unwrap(), 1.053435072469207, 1e-10));
    }

    #[test]
    fn limit_values() {
        assert!(close(limit_expected_total(5.0, 0.0).unwrap(), 1.619735897455763, 1e-12));
        assert!(close(limit_expected_total(E, E).unwrap(), 0.5, 1e-12));
        assert!(close(limit_expected_total(10.0, 20.0).unwrap(), 0.06357713346934511, 1e-11));
        let a = solve_alpha(5.0).unwrap();
        assert!(close(limit_expected_total(5.0, 0.0).unwrap(), a * a / (a + 5.0), 1e-12));
    }

    #[test]
    fn finite_n_approaches_limit() {
        let lim = limit_expected_total(5.0, 0.0).unwrap();
        let e500 = expected_total(500, 5.0, 0.0).unwrap();
        assert!((e500 - lim).abs() / lim < 0.01);
    }

    #[test]
    fn experiment_two_parameters() {
        let tp = theory_params(200, 10.0, 0.0).unwrap();
        assert!((tp.x0 - 165.0894).abs() < 5e-5);
        assert!((tp.sigma - 1.9552).abs() < 5e-5);
        assert!(close(tp.phi_x0_asymptotic, 0.4257554226800023, 1e-12));
        assert!(close(tp.phi_x0_direct, 0.4270122910655347, 1e-10));
        let a = tp.alpha;
        assert!(close(tp.phi_x0_asymptotic, a * a / (2.0 * PI * (a - 1.0) * 200.0).sqrt(), 1e-12));
        let tp20 = theory_params(200, 10.0, 20.0).unwrap();
        assert!(close(tp20.phi_x0_asymptotic, 0.01297220576746055, 1e-10));
        assert!(close(tp20.phi_x0_direct, 0.01078998283271793, 1e-9));
    }

    #[test]
    fn c0_positive_and_delta() {
        let tp = theory_params(100, 5.0, 0.0).unwrap();
        let a = tp.alpha;
        let want = (2f64.sqrt() * (a + 5.0) / (a - 1.0).sqrt()).max(1.0 / 5f64.sqrt());
        assert_eq!(tp.c0, want);
        assert!(tp.c0 > 0.0);
        assert!(close(tp.delta, want * (100f64 * 100f64.ln()).sqrt(), 1e-14));
    }

    #[test]
    fn chi_shape() {
        let tp = theory_params(300, 5.0, 1.0).unwrap();
        assert_eq!(chi(tp.x0, &tp), tp.phi_x0_direct);
        let half = (-0.5f64).exp();
        assert!(close(chi(tp.x0 + tp.sigma, &tp), tp.phi_x0_direct * half, 1e-12));
        assert!(close(chi(tp.x0 - tp.sigma, &tp), tp.phi_x0_direct * half, 1e-12));
    }

    #[test]
    fn chi_integral_tends_to_limit() {
        let lim = limit_expected_total(5.0, 0.0).unwrap();
        let gaps: Vec<f64> = [100, 1000, 10_000, 100_000]
            .iter()
            .map(|&n| (chi_integral(&theory_params(n, 5.0, 0.0).unwrap()) - lim).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] / lim < 1e-3);
    }

    #[test]
    fn phi_domain() {
        assert!(phi(0.0, 10, 5.0, 0.0).is_err());
        assert!(phi(10.0, 10, 5.0, 0.0).is_err());
        assert!(phi(4.5, 10, 5.0, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn stirling_ratio_at_peak() {
        let tp = theory_params(200, 10.0, 0.0).unwrap();
        let k = tp.x0.floor() as usize;
        let ratio = expected_count_size_k(200, k, 10.0, 0.0).unwrap() / phi(k as f64, 200, 10.0, 0.0).unwrap();
        assert!(ratio >= 2.0 * PI / (E * E) && ratio <= E / (2.0 * PI).sqrt(), "{ratio}");
    }

    #[test]
    fn consistency_cases() {
        assert_eq!(consistency_probability(0.0, 0.5).unwrap(), 0.0);
        assert_eq!(consistency_probability(1e6, 1.0).unwrap(), 1.0);
        assert!(close(consistency_probability(2.0, 1.0).unwrap(), 1.0 - (-2f64).exp(), 1e-15));
        assert!(consistency_probability(-1.0, 0.5).is_err());
        assert!(consistency_probability(1.0, 0.0).is_err());
        assert!(consistency_probability(1.0, 1.5).is_err());
    }

    #[test]
    fn c1_zero_is_unsupported() {
        assert!(matches!(
            limit_expected_total(0.0, 3.0),
            Err(Error::UnsupportedParameters(_))
        ));
        assert!(theory_params(10, 0.0, 3.0).is_err());
        assert_eq!(expected_total(10, 0.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn curve_rows() {
        let rows = theory_curve(30, 5.0, 0.0).unwrap();
        assert_eq!(rows.len(), 29);
        assert_eq!(rows[0].k, 1);
        let sum: f64 = rows.iter().map(|r| r.expected).sum();
        assert!(close(sum, expected_total(30, 5.0, 0.0).unwrap(), 1e-12));
    }
}
