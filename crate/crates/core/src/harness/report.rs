//! Experiment reports and convergence-rate fits.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{ChainletError, Result};

/// Errors at or below this are indistinguishable from roundoff.
pub const EXACT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: i32,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl LevelRow {
    pub fn new(level: i32, lhs: f64, rhs: f64) -> LevelRow {
        let abs_err = (lhs - rhs).abs();
        let rel_err = abs_err / rhs.abs().max(lhs.abs()).max(f64::MIN_POSITIVE);
        LevelRow { level, lhs, rhs, abs_err, rel_err: if abs_err == 0.0 { 0.0 } else { rel_err } }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rate", rename_all = "snake_case")]
pub enum Verdict {
    /// Every error is at roundoff level.
    Exact,
    Geometric(f64),
    NonConvergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    /// Least-squares slope of `−log₂(error)` against level.
    pub slope: f64,
    pub r2: f64,
    pub verdict: Verdict,
}

impl Rate {
    /// Whether the errors decay at least like `2^{-ρ ℓ}`. Exact sequences
    /// qualify for every `ρ`.
    pub fn at_least(&self, rho: f64) -> bool {
        match self.verdict {
            Verdict::Exact => true,
            Verdict::Geometric(r) => r >= rho,
            Verdict::NonConvergent => false,
        }
    }
}

/// Fits `error ≈ C 2^{-ρ ℓ}`; "geometric(ρ)" when `R² ≥ 0.9` and `ρ > 0`.
pub fn convergence_rate(values: &[(i32, f64)]) -> Result<Rate> {
    if values.len() < 3 {
        return Err(ChainletError::TooFewLevels(values.len()));
    }
    if values.iter().all(|&(_, e)| e.abs() <= EXACT_FLOOR) {
        return Ok(Rate { slope: 0.0, r2: 1.0, verdict: Verdict::Exact });
    }
    let m = values.len() as f64;
    let xs: Vec<f64> = values.iter().map(|&(l, _)| l as f64).collect();
    let ys: Vec<f64> = values.iter().map(|&(_, e)| -(e.abs().max(1e-16)).log2()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(ChainletError::Invalid("levels must differ".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 0.0 } else { (sxy * sxy) / (sxx * syy) };
    let verdict = if r2 >= 0.9 && slope > 0.0 { Verdict::Geometric(slope) } else { Verdict::NonConvergent };
    Ok(Rate { slope, r2, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub rows: Vec<LevelRow>,
    pub rate: Option<Rate>,
    /// Bound on the final-level absolute error.
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_secs: f64,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, rows: Vec<LevelRow>, tolerance: f64, started: Instant) -> Self {
        let errs: Vec<(i32, f64)> = rows.iter().map(|r| (r.level, r.abs_err)).collect();
        let rate = convergence_rate(&errs).ok();
        let pass = rows.last().is_some_and(|r| r.abs_err <= tolerance);
        ExperimentReport {
            name: name.into(),
            rows,
            rate,
            tolerance,
            pass,
            runtime_secs: started.elapsed().as_secs_f64(),
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn last(&self) -> Option<&LevelRow> {
        self.rows.last()
    }

    pub fn row(&self, level: i32) -> Option<&LevelRow> {
        self.rows.iter().find(|r| r.level == level)
    }

    /// Errors never grow from one level to the next, up to roundoff.
    pub fn errors_nonincreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].abs_err <= w[0].abs_err || w[1].abs_err <= EXACT_FLOOR)
    }

    /// CSV with columns `level, lhs, rhs, abs_err, rate`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["level", "lhs", "rhs", "abs_err", "rate"]).expect("in-memory write");
        let rate = match self.rate.map(|r| r.verdict) {
            Some(Verdict::Exact) => "exact".to_string(),
            Some(Verdict::Geometric(r)) => format!("{r}"),
            Some(Verdict::NonConvergent) => "none".to_string(),
            None => String::new(),
        };
        for r in &self.rows {
            w.write_record([r.level.to_string(), r.lhs.to_string(), r.rhs.to_string(), r.abs_err.to_string(), rate.clone()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_errors_give_rate_one() {
        let v: Vec<(i32, f64)> = (1..7).map(|l| (l, 2f64.powi(-l))).collect();
        let r = convergence_rate(&v).unwrap();
        assert!((r.slope - 1.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Geometric(r.slope));
    }

    #[test]
    fn quartering_errors_give_rate_two() {
        let v: Vec<(i32, f64)> = (1..7).map(|l| (l, 3.0 * 4f64.powi(-l))).collect();
        assert!((convergence_rate(&v).unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_errors_do_not_converge() {
        let v: Vec<(i32, f64)> = (1..7).map(|l| (l, 0.3)).collect();
        let r = convergence_rate(&v).unwrap();
        assert!(r.slope.abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::NonConvergent);
    }

    #[test]
    fn two_points_are_too_few() {
        assert_eq!(convergence_rate(&[(1, 0.1), (2, 0.05)]), Err(ChainletError::TooFewLevels(2)));
    }

    #[test]
    fn csv_has_the_stated_columns() {
        let rows = (1..4).map(|l| LevelRow::new(l, 1.0 + 2f64.powi(-l), 1.0)).collect();
        let rep = ExperimentReport::new("t", rows, 0.2, Instant::now());
        assert!(rep.pass);
        let csv = rep.to_csv();
        assert!(csv.starts_with("level,lhs,rhs,abs_err,rate\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
