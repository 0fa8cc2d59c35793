//! Lifespan sweeps over a list of amplitudes.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::ols;
use crate::error::{Error, Result};
use crate::model::{Lifespan, Scenario};
use crate::runner::{fmt_f64, run_scenario};
use crate::tolerances::LIFESPAN_MIN_POINTS;

/// Outcome of one amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct LifespanEntry {
    pub eps: f64,
    /// `Err` holds the run failure message.
    pub outcome: std::result::Result<Lifespan, String>,
    /// `sup |u|` over the sampled instants.
    pub sup_u: f64,
}

/// Least-squares line `log T = slope / eps + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifespanRegression {
    pub slope: f64,
    pub intercept: f64,
    pub correlation: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifespanSweep {
    pub entries: Vec<LifespanEntry>,
    /// `Err` explains why the regression was refused.
    pub regression: std::result::Result<LifespanRegression, String>,
}

impl LifespanSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,status,time,sup_u\n");
        for e in &self.entries {
            let (status, t) = match &e.outcome {
                Ok(Lifespan::BlowUp(t)) => ("blowup", fmt_f64(*t)),
                Ok(Lifespan::Survived(t)) => ("survived", fmt_f64(*t)),
                Err(_) => ("error", String::new()),
            };
            let _ = writeln!(out, "{},{status},{t},{}", fmt_f64(e.eps), fmt_f64(e.sup_u));
        }
        out
    }

    pub fn blowup_times(&self) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .filter_map(|e| match e.outcome {
                Ok(Lifespan::BlowUp(t)) => Some((e.eps, t)),
                _ => None,
            })
            .collect()
    }
}

/// Fits `log T` against `1 / eps` over the blow-up entries with `eps > 0`;
/// survivors and the zero amplitude are excluded.
pub fn lifespan_regression(entries: &[LifespanEntry]) -> Result<LifespanRegression> {
    let pts: Vec<(f64, f64)> = entries
        .iter()
        .filter(|e| e.eps > 0.0)
        .filter_map(|e| match e.outcome {
            Ok(Lifespan::BlowUp(t)) if t > 0.0 => Some((1.0 / e.eps, t.ln())),
            _ => None,
        })
        .collect();
    if pts.len() < LIFESPAN_MIN_POINTS {
        return Err(Error::FitRefused(format!(
            "{} blow-up points, need at least {LIFESPAN_MIN_POINTS}",
            pts.len()
        )));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let f = ols(&x, &y).ok_or_else(|| Error::FitRefused("degenerate amplitudes".into()))?;
    Ok(LifespanRegression {
        slope: f.slope,
        intercept: f.intercept,
        correlation: f.correlation,
        n_points: f.n,
    })
}

/// Runs the template at every amplitude (in parallel on the current rayon
/// pool) to blow-up or `t_max`. `eps_list` must be strictly decreasing.
/// Weighted sups, jets, snapshots and the monitor are switched off.
pub fn sweep_lifespan(template: &Scenario, eps_list: &[f64]) -> Result<LifespanSweep> {
    if eps_list.is_empty() {
        return Err(Error::Config("empty amplitude list".into()));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config("amplitudes must be strictly decreasing".into()));
    }
    let mut base = template.clone();
    base.diagnostics.weights.clear();
    base.diagnostics.jets = false;
    base.diagnostics.snapshots = false;
    base.diagnostics.plots = false;
    base.diagnostics.monitor_k = None;
    let entries: Vec<LifespanEntry> = eps_list
        .par_iter()
        .map(|&eps| {
            let s = base.with_amplitude(eps);
            match run_scenario(&s) {
                Ok(out) => LifespanEntry {
                    eps,
                    outcome: Ok(out.result.lifespan.expect("runs record a lifespan")),
                    sup_u: out.result.max_abs_u.iter().copied().fold(0.0, f64::max),
                },
                Err(e) => LifespanEntry {
                    eps,
                    outcome: Err(e.to_string()),
                    sup_u: f64::NAN,
                },
            }
        })
        .collect();
    let regression = lifespan_regression(&entries).map_err(|e| e.to_string());
    Ok(LifespanSweep { entries, regression })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioConfig;

    fn entry(eps: f64, l: Lifespan) -> LifespanEntry {
        LifespanEntry {
            eps,
            outcome: Ok(l),
            sup_u: 0.0,
        }
    }

    #[test]
    fn regression_excludes_survivors_and_zero() {
        let e = vec![
            entry(0.4, Lifespan::BlowUp((2.0f64 / 0.4).exp())),
            entry(0.2, Lifespan::BlowUp((2.0f64 / 0.2).exp())),
            entry(0.1, Lifespan::BlowUp((2.0f64 / 0.1).exp())),
            entry(0.05, Lifespan::Survived(100.0)),
            entry(0.0, Lifespan::Survived(100.0)),
        ];
        let r = lifespan_regression(&e).unwrap();
        assert_eq!(r.n_points, 3);
        assert!((r.slope - 2.0).abs() < 1e-12 && r.intercept.abs() < 1e-10);
        assert!((r.correlation - 1.0).abs() < 1e-12);
        assert!(matches!(lifespan_regression(&e[2..]), Err(Error::FitRefused(_))));
    }

    const SQUARE: &str = r#"
[system]
speeds = [1.0]

[nonlinearity]
quadratic = [{ i = 0, j = 0, k = 0, a = 0, b = 0, coeff = 1.0 }]

[data]
amplitude = 0.4
support_inner_radius = 1.5
profiles = [{ component = 0, slot = "phi", kind = "bump", inner = 2.0, outer = 3.0, peak = 2.0 }]

[grid]
mode = "radial"
dr = 0.02
t_max = 5.0

[diagnostics]
n_diag = 10
monitor = false
"#;

    #[test]
    fn sweep_orders_and_validates() {
        let s = ScenarioConfig::parse(SQUARE).unwrap().scenario().unwrap();
        assert!(sweep_lifespan(&s, &[0.1, 0.2]).is_err());
        assert!(sweep_lifespan(&s, &[]).is_err());
        let sw = sweep_lifespan(&s, &[0.8, 0.4, 0.0]).unwrap();
        let b = sw.blowup_times();
        assert_eq!(b.len(), 2, "{sw:?}");
        assert!(b[0].1 < b[1].1);
        assert_eq!(sw.entries[2].outcome, Ok(Lifespan::Survived(sw.entries[2].outcome.clone().unwrap().time())));
        assert_eq!(sw.entries[2].sup_u, 0.0);
        assert!(sw.regression.is_err());
        assert!(sw.to_csv().contains("survived"));
    }
}
