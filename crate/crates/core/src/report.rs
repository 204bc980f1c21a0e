//! Fixed CSV schemas for experiment and theory output.
//!
//! Numbers use Rust's shortest round-trip decimal form; a missing value is an
//! empty field. Lines end in `\n`.

use std::fmt::Write as _;

use crate::experiments::{AvgResult, ConsResult, DistResult};
use crate::theory::CurvePoint;

pub const AVG_HEADER: &str = "n,c1,c2,trials,avg_answer_sets,stderr,theory_finite_n,theory_limit";
pub const DIST_HEADER: &str = "k,empirical_avg,model_E_Nk,chi_k";
pub const CONSISTENCY_HEADER: &str = "n,c1,c2,trials,empirical_ratio,pred_full,pred_gamma";
pub const CURVE_HEADER: &str = "k,Pr_k,E_Nk,phi_k,chi_k";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn avg_csv(rows: &[AvgResult]) -> String {
    let mut out = format!("{AVG_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.c1,
            r.c2,
            r.trials,
            r.avg_answer_sets,
            r.stderr,
            r.theory_finite_n,
            opt(r.theory_limit)
        );
    }
    out
}

pub fn dist_csv(d: &DistResult) -> String {
    let mut out = format!("{DIST_HEADER}\n");
    for r in &d.rows {
        let _ = writeln!(out, "{},{},{},{}", r.k, r.empirical_avg, r.model_e_nk, r.chi_k);
    }
    out
}

pub fn consistency_csv(c: &ConsResult) -> String {
    let mut out = format!("{CONSISTENCY_HEADER}\n");
    for r in &c.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n, r.c1, r.c2, r.trials, r.empirical_ratio, r.pred_full, r.pred_gamma
        );
    }
    out
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{}", p.k, p.pr, p.expected, p.phi, p.chi);
    }
    out
}
