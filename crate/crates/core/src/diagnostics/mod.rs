//! Decay-rate fits, pointwise decay verdicts, lifespan sweeps and the
//! Klainerman–Sobolev spot-check.

pub mod ks;
pub mod lifespan;
pub mod plot;
pub mod pointwise;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::RunResult;
use crate::tolerances::ENERGY_FLOOR_REL;

pub use ks::{check_klainerman_sobolev, ks_family, KsRow, KsSample, KsTable};
pub use lifespan::{lifespan_regression, sweep_lifespan, LifespanEntry, LifespanRegression, LifespanSweep};
pub use pointwise::{check_pointwise_decay, fit_dplus_ray_exponent, std0_log_factor, PointwiseDecay, PointwiseKind, RayFit};

/// Ordinary least squares `y = slope x + intercept` with the coefficient
/// of determination clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Pearson correlation of `(x, y)`.
    pub correlation: f64,
    pub n: usize,
}

pub fn ols(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    let correlation = if syy == 0.0 { 0.0 } else { sxy / (sxx * syy).sqrt() };
    Some(LinearFit {
        slope,
        intercept,
        r2,
        correlation,
        n,
    })
}

/// A decay law fitted by OLS on log-transformed data: `ln E(t)` against
/// the model's regressor, with the rate read off the slope.
pub trait DecayModel: Send + Sync {
    fn name(&self) -> &'static str;
    /// Regressor `x(t)`.
    fn regressor(&self, t: f64) -> f64;
    /// Transformed response from `ln E` at time `t`.
    fn response(&self, t: f64, log_e: f64) -> f64 {
        let _ = t;
        log_e
    }
    /// Positive rate means decay.
    fn rate(&self, slope: f64) -> f64 {
        -slope
    }
    /// `E(t)` predicted by a fit, for overlays.
    fn predict(&self, fit: &LinearFit, t: f64) -> f64;
}

/// `E = A exp(-sigma t)`.
struct Exponential;

impl DecayModel for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }
    fn regressor(&self, t: f64) -> f64 {
        t
    }
    fn predict(&self, fit: &LinearFit, t: f64) -> f64 {
        (fit.intercept + fit.slope * t).exp()
    }
}

/// `E = A t^(-p)`.
struct Power;

impl DecayModel for Power {
    fn name(&self) -> &'static str {
        "power"
    }
    fn regressor(&self, t: f64) -> f64 {
        t.ln()
    }
    fn predict(&self, fit: &LinearFit, t: f64) -> f64 {
        (fit.intercept + fit.slope * t.ln()).exp()
    }
}

/// `E = A t^(-p) ln(2 + t)`.
struct PowerLog;

impl DecayModel for PowerLog {
    fn name(&self) -> &'static str {
        "power-log"
    }
    fn regressor(&self, t: f64) -> f64 {
        t.ln()
    }
    fn response(&self, t: f64, log_e: f64) -> f64 {
        log_e - (2.0 + t).ln().ln()
    }
    fn predict(&self, fit: &LinearFit, t: f64) -> f64 {
        (fit.intercept + fit.slope * t.ln()).exp() * (2.0 + t).ln()
    }
}

/// Named decay models; the default holds exponential, power and power-log.
pub struct DecayModelRegistry {
    models: Vec<Box<dyn DecayModel>>,
}

impl Default for DecayModelRegistry {
    fn default() -> Self {
        DecayModelRegistry {
            models: vec![Box::new(Exponential), Box::new(Power), Box::new(PowerLog)],
        }
    }
}

impl DecayModelRegistry {
    pub fn register(&mut self, m: Box<dyn DecayModel>) {
        self.models.push(m);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.models.iter().map(|m| m.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn DecayModel> {
        self.models
            .iter()
            .find(|m| m.name() == name)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "decay model",
                name: name.into(),
                known: self.names().join(", "),
            })
    }
}

/// A fitted decay law on `window`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub model: String,
    /// `sigma` for the exponential model, the exponent otherwise.
    pub rate: f64,
    pub goodness: f64,
    pub intercept: f64,
    pub n_points: usize,
    /// The series drops to zero at the window start (strong Huygens), so
    /// there is nothing to fit; `rate` is then infinite.
    pub degenerate: bool,
}

impl DecayFit {
    pub fn summary(&self) -> String {
        if self.degenerate {
            format!(
                "{} fit on [{}, {}]: degenerate (energy vanishes after exit)",
                self.model, self.window.0, self.window.1
            )
        } else {
            format!(
                "{} fit on [{:.3}, {:.3}]: rate {:.6e}, goodness {:.6}, {} points",
                self.model, self.window.0, self.window.1, self.rate, self.goodness, self.n_points
            )
        }
    }
}

/// Time after which the data's direct pulse has left `B_b`: the incoming
/// half reflects off the obstacle at `r = 1` and crosses `B_b` last.
pub fn exit_time(run: &RunResult, b: f64) -> f64 {
    let c_min = run.speeds.iter().copied().fold(f64::INFINITY, f64::min);
    (run.data_outer_radius - 1.0 + b - 1.0).max(0.0) / c_min
}

/// Fits `E_b(t)` on `window` (trimmed to start after [`exit_time`]) with
/// the named model. Samples at or below `ENERGY_FLOOR_REL * E(0)` are
/// dropped as underflow.
pub fn fit_local_energy_decay(run: &RunResult, b: f64, window: (f64, f64), model: &dyn DecayModel) -> Result<DecayFit> {
    if (run.local_radius - b).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "run recorded local energy for b = {}, asked for b = {b}",
            run.local_radius
        )));
    }
    let e0 = run.total_energy.first().copied().unwrap_or(0.0);
    if !(e0 > 0.0) || run.local_energy.iter().all(|&e| e == 0.0) {
        return Err(Error::FitRefused("zero data: no energy to fit".into()));
    }
    let t0 = window.0.max(exit_time(run, b));
    let t1 = window.1;
    if !(t1 > t0) {
        return Err(Error::EmptyWindow(format!("[{t0}, {t1}] after trimming")));
    }
    let inside: Vec<(f64, f64)> = run
        .times
        .iter()
        .zip(&run.local_energy)
        .filter(|(t, _)| **t >= t0 && **t <= t1)
        .map(|(t, e)| (*t, *e))
        .collect();
    if inside.is_empty() {
        return Err(Error::EmptyWindow(format!("no samples in [{t0}, {t1}]")));
    }
    let floor = ENERGY_FLOOR_REL * e0;
    if inside[0].1 <= floor {
        return Ok(DecayFit {
            window: (t0, t1),
            model: model.name().into(),
            rate: f64::INFINITY,
            goodness: 0.0,
            intercept: f64::NAN,
            n_points: 0,
            degenerate: true,
        });
    }
    let live: Vec<(f64, f64)> = inside.into_iter().filter(|(_, e)| *e > floor).collect();
    if live.len() < 3 {
        return Err(Error::EnergyUnderflow(format!(
            "only {} samples above {floor:e} in [{t0}, {t1}]",
            live.len()
        )));
    }
    let x: Vec<f64> = live.iter().map(|(t, _)| model.regressor(*t)).collect();
    let y: Vec<f64> = live.iter().map(|(t, e)| model.response(*t, e.ln())).collect();
    let fit = ols(&x, &y).ok_or_else(|| Error::EmptyWindow("degenerate regressor".into()))?;
    Ok(DecayFit {
        window: (t0, live.last().unwrap().0.min(t1)),
        model: model.name().into(),
        rate: model.rate(fit.slope),
        goodness: fit.r2,
        intercept: fit.intercept,
        n_points: fit.n,
        degenerate: false,
    })
}

/// CSV of the local energy with the fitted curve: `t, local_energy, fit`.
pub fn decay_fit_csv(run: &RunResult, fit: &DecayFit, model: &dyn DecayModel) -> String {
    let mut out = String::from("t,local_energy,fit\n");
    let lf = LinearFit {
        slope: -fit.rate,
        intercept: fit.intercept,
        r2: fit.goodness,
        correlation: 0.0,
        n: fit.n_points,
    };
    for (t, e) in run.times.iter().zip(&run.local_energy) {
        let f = if !fit.degenerate && *t >= fit.window.0 && *t <= fit.window.1 {
            crate::runner::fmt_f64(model.predict(&lf, *t))
        } else {
            String::new()
        };
        let _ = writeln!(out, "{},{},{f}", crate::runner::fmt_f64(*t), crate::runner::fmt_f64(*e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> RunResult {
        let times: Vec<f64> = (0..=400).map(|i| i as f64 * 0.5).collect();
        let local: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        RunResult {
            total_energy: vec![1.0; times.len()],
            local_energy: local,
            times,
            local_radius: 4.0,
            speeds: vec![1.0],
            data_outer_radius: 3.0,
            ..RunResult::default()
        }
    }

    #[test]
    fn ols_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = ols(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept - 1.0).abs() < 1e-15);
        assert_eq!(f.r2, 1.0);
        assert!(ols(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn models_recover_rates() {
        let reg = DecayModelRegistry::default();
        let run = synthetic(|t| 3.0 * (-0.2 * t).exp());
        let fit = fit_local_energy_decay(&run, 4.0, (10.0, 100.0), reg.get("exponential").unwrap()).unwrap();
        assert!((fit.rate - 0.2).abs() < 1e-10 && fit.goodness > 0.999999);
        assert_eq!(fit.window.0, 10.0);
        let run = synthetic(|t| 2.0 * t.max(1e-3).powf(-3.0));
        let fit = fit_local_energy_decay(&run, 4.0, (10.0, 100.0), reg.get("power").unwrap()).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-10);
        let run = synthetic(|t| t.max(1e-3).powf(-2.0) * (2.0 + t).ln());
        let fit = fit_local_energy_decay(&run, 4.0, (10.0, 100.0), reg.get("power-log").unwrap()).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-10);
        assert!(reg.get("nope").is_err());
    }

    #[test]
    fn window_is_trimmed_after_exit() {
        let run = synthetic(|t| (-t).exp());
        let m = DecayModelRegistry::default();
        let fit = fit_local_energy_decay(&run, 4.0, (0.0, 50.0), m.get("exponential").unwrap()).unwrap();
        // data outer radius 3, b = 4: exit at 3 - 1 + 4 - 1 = 5
        assert_eq!(fit.window.0, 5.0);
        assert!(matches!(
            fit_local_energy_decay(&run, 4.0, (300.0, 400.0), m.get("exponential").unwrap()),
            Err(Error::EmptyWindow(_))
        ));
    }

    #[test]
    fn refusals() {
        let m = DecayModelRegistry::default();
        let exp = m.get("exponential").unwrap();
        let zero = synthetic(|_| 0.0);
        assert!(matches!(fit_local_energy_decay(&zero, 4.0, (10.0, 100.0), exp), Err(Error::FitRefused(_))));
        // abrupt drop: Huygens, degenerate
        let huygens = synthetic(|t| if t < 6.0 { 1.0 } else { 0.0 });
        let fit = fit_local_energy_decay(&huygens, 4.0, (10.0, 100.0), exp).unwrap();
        assert!(fit.degenerate && fit.rate.is_infinite());
        // decays past the floor within two samples of the window start
        let fast = synthetic(|t| if t < 11.0 { (-t).exp() } else { 0.0 });
        assert!(matches!(fit_local_energy_decay(&fast, 4.0, (10.0, 100.0), exp), Err(Error::EnergyUnderflow(_))));
        assert!(fit_local_energy_decay(&fast, 2.0, (10.0, 100.0), exp).is_err());
    }

    proptest! {
        #[test]
        fn fit_invariant_under_amplitude(scale in 1e-6f64..1e6, sigma in 0.01f64..0.5) {
            let m = DecayModelRegistry::default();
            let exp = m.get("exponential").unwrap();
            let a = synthetic(|t| (-sigma * t).exp() * (1.0 + 0.1 * (t).sin()));
            let mut b = a.clone();
            b.local_energy.iter_mut().for_each(|e| *e *= scale);
            b.total_energy.iter_mut().for_each(|e| *e *= scale);
            let fa = fit_local_energy_decay(&a, 4.0, (10.0, 100.0), exp).unwrap();
            let fb = fit_local_energy_decay(&b, 4.0, (10.0, 100.0), exp).unwrap();
            prop_assert!((fa.rate - fb.rate).abs() < 1e-9 * (1.0 + fa.rate.abs()));
            prop_assert!((fa.goodness - fb.goodness).abs() < 1e-9);
        }
    }
}
