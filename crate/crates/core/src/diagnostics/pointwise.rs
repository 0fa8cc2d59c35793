//! Weighted pointwise quantities evaluated on recorded jets, their running
//! sups, and decay exponents along outgoing rays.

use std::fmt::Write as _;

use super::ols;
use crate::error::{Error, Result};
use crate::model::RunResult;
use crate::runner::fmt_f64;
use crate::tolerances::BOUNDED_GROWTH;
use crate::weights::bracket;

/// Which weighted quantity to track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseKind {
    /// `(1 + t + |x|) |u| / log(1 + (1 + c t + |x|) / (1 + |c t - |x||))`
    Std0,
    /// `<|x|> <c t - |x|> |du|`
    Std1,
    /// `<|x|> <t + |x|> |D_+ u| / log(2 + t + |x|)`
    Dplus,
}

impl PointwiseKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "std0" => Ok(PointwiseKind::Std0),
            "std1" => Ok(PointwiseKind::Std1),
            "dplus" => Ok(PointwiseKind::Dplus),
            other => Err(Error::UnknownName {
                kind: "pointwise quantity",
                name: other.into(),
                known: "std0, std1, dplus".into(),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PointwiseKind::Std0 => "std0",
            PointwiseKind::Std1 => "std1",
            PointwiseKind::Dplus => "dplus",
        }
    }
}

/// `log(1 + (1 + c t + r) / (1 + |c t - r|))`; equals `log 2` at `t = r = 0`.
pub fn std0_log_factor(c: f64, t: f64, r: f64) -> f64 {
    (1.0 + (1.0 + c * t + r) / (1.0 + (c * t - r).abs())).ln()
}

/// Running sup of one weighted quantity, divided by the amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseDecay {
    pub kind: PointwiseKind,
    pub component: usize,
    pub times: Vec<f64>,
    /// Sup over the samples of each frame.
    pub instant: Vec<f64>,
    pub running_sup: Vec<f64>,
    /// `sup(end) / sup(mid) - 1` with `mid` half the final time.
    pub growth: f64,
    pub bounded: bool,
}

impl PointwiseDecay {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,instant,running_sup\n");
        for i in 0..self.times.len() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_f64(self.times[i]),
                fmt_f64(self.instant[i]),
                fmt_f64(self.running_sup[i])
            );
        }
        out
    }
}

/// Evaluates `kind` on every recorded jet sample of `component` and
/// decides boundedness: the running sup may grow by less than
/// `BOUNDED_GROWTH` between half the final time and the final time. A
/// run that hit the blow-up gate is never bounded.
pub fn check_pointwise_decay(run: &RunResult, kind: PointwiseKind, component: usize) -> Result<PointwiseDecay> {
    if run.jets.is_empty() {
        return Err(Error::InsufficientHistory("run retains no jets".into()));
    }
    let c = *run
        .speeds
        .get(component)
        .ok_or_else(|| Error::Config(format!("no component {component}")))?;
    let eps = if run.amplitude != 0.0 { run.amplitude.abs() } else { 1.0 };
    let mut times = Vec::new();
    let mut instant = Vec::new();
    let mut running_sup = Vec::new();
    let mut sup = 0.0f64;
    for f in &run.jets {
        let col = &f.columns[component];
        let t = f.t;
        let mut best = 0.0f64;
        for m in 0..col.r.len() {
            let r = col.r[m];
            let v = match kind {
                PointwiseKind::Std0 => (1.0 + t + r) * col.u[m].abs() / std0_log_factor(c, t, r),
                PointwiseKind::Std1 => bracket(r) * bracket(c * t - r) * col.du[m],
                PointwiseKind::Dplus => bracket(r) * bracket(t + r) * col.dplus[m].abs() / (2.0 + t + r).ln(),
            } / eps;
            if v.is_nan() {
                best = f64::INFINITY;
            } else {
                best = best.max(v);
            }
        }
        sup = sup.max(best);
        times.push(t);
        instant.push(best);
        running_sup.push(sup);
    }
    let t_end = *times.last().unwrap();
    let mid = times.iter().rposition(|&t| t <= 0.5 * t_end).unwrap_or(0);
    let (s_mid, s_end) = (running_sup[mid], sup);
    let growth = if s_end == 0.0 {
        0.0
    } else if s_mid == 0.0 {
        f64::INFINITY
    } else {
        s_end / s_mid - 1.0
    };
    let bounded = growth < BOUNDED_GROWTH && !run.blowup_flag();
    Ok(PointwiseDecay {
        kind,
        component,
        times,
        instant,
        running_sup,
        growth,
        bounded,
    })
}

/// Decay exponent of `|D_+ u| / |du|` against `<t + r>` along one ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RayResult {
    pub r0: f64,
    pub exponent: f64,
    pub goodness: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayFit {
    pub rays: Vec<RayResult>,
    /// Largest (least negative) exponent over the rays.
    pub exponent: f64,
    /// Smallest goodness over the rays.
    pub goodness: f64,
}

/// Follows `n_rays` outgoing rays `r = r0 + c t` through the recorded jets
/// and fits `ln(|D_+ u| / |du|)` against `ln <t + r>` on frames with
/// `t >= t_start`. Rays pass through the nodes of the last frame where
/// `|U| |U'|` (`U = r u`) is largest, so both the profile and its slope are
/// resolved along the ray.
pub fn fit_dplus_ray_exponent(run: &RunResult, component: usize, n_rays: usize, t_start: f64) -> Result<RayFit> {
    let last = run
        .jets
        .last()
        .ok_or_else(|| Error::InsufficientHistory("run retains no jets".into()))?;
    let c = *run
        .speeds
        .get(component)
        .ok_or_else(|| Error::Config(format!("no component {component}")))?;
    let col = &last.columns[component];
    let n = col.r.len();
    if n < 3 {
        return Err(Error::RayExits("too few nodes".into()));
    }
    let big: Vec<f64> = col.r.iter().zip(&col.u).map(|(r, u)| r * u).collect();
    let mut score: Vec<(f64, usize)> = (1..n - 1)
        .map(|m| {
            let d = (big[m + 1] - big[m - 1]) / (col.r[m + 1] - col.r[m - 1]);
            ((big[m] * d).abs(), m)
        })
        .filter(|(s, _)| *s > 0.0)
        .collect();
    score.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let spacing = 0.25;
    let mut picks: Vec<f64> = Vec::new();
    for (_, m) in score {
        let r = col.r[m];
        if picks.iter().all(|p| (p - r).abs() >= spacing) {
            picks.push(r);
        }
        if picks.len() == n_rays {
            break;
        }
    }
    if picks.is_empty() {
        return Err(Error::FitRefused("zero field: no ray to follow".into()));
    }
    let mut rays = Vec::new();
    for rstar in picks {
        let r0 = rstar - c * last.t;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for f in run.jets.iter().filter(|f| f.t >= t_start) {
            let col = &f.columns[component];
            let r = r0 + c * f.t;
            let h = col.r[1] - col.r[0];
            let m = ((r - col.r[0]) / h).round();
            if m < 1.0 || m as usize + 1 >= col.r.len() {
                continue;
            }
            let m = m as usize;
            let (dp, du) = (col.dplus[m].abs(), col.du[m]);
            if dp > 0.0 && du > 0.0 {
                xs.push(bracket(f.t + col.r[m]).ln());
                ys.push((dp / du).ln());
            }
        }
        if xs.len() < 3 {
            return Err(Error::RayExits(format!("ray r0 = {r0}: {} usable frames", xs.len())));
        }
        let fit = ols(&xs, &ys).ok_or_else(|| Error::RayExits(format!("ray r0 = {r0}: degenerate")))?;
        rays.push(RayResult {
            r0,
            exponent: fit.slope,
            goodness: fit.r2,
            n_points: fit.n,
        });
    }
    let exponent = rays.iter().map(|r| r.exponent).fold(f64::NEG_INFINITY, f64::max);
    let goodness = rays.iter().map(|r| r.goodness).fold(f64::INFINITY, f64::min);
    Ok(RayFit {
        rays,
        exponent,
        goodness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JetColumn, JetFrame};

    /// Exact outgoing wave `u = p(r - t) / r`, c = 1, sampled like a run.
    fn outgoing(t_end: f64, amplitude: f64) -> RunResult {
        let p = |s: f64| if (0.0..1.0).contains(&s) { (std::f64::consts::PI * s).sin().powi(2) } else { 0.0 };
        let dp = |s: f64| {
            if (0.0..1.0).contains(&s) {
                std::f64::consts::PI * (2.0 * std::f64::consts::PI * s).sin()
            } else {
                0.0
            }
        };
        let mut jets = Vec::new();
        let mut t = 0.0;
        while t <= t_end + 1e-9 {
            let r: Vec<f64> = (0..=((t_end + 10.0) / 0.05) as usize).map(|m| 1.0 + m as f64 * 0.05).collect();
            let u = r.iter().map(|&x| amplitude * p(x - 2.0 - t) / x).collect();
            let ur: Vec<f64> = r
                .iter()
                .map(|&x| amplitude * (dp(x - 2.0 - t) / x - p(x - 2.0 - t) / (x * x)))
                .collect();
            let ut: Vec<f64> = r.iter().map(|&x| -amplitude * dp(x - 2.0 - t) / x).collect();
            let du = ut.iter().zip(&ur).map(|(a, b)| a.abs() + b.abs()).collect();
            let dplus = ut.iter().zip(&ur).map(|(a, b)| a + b).collect();
            jets.push(JetFrame {
                t,
                columns: vec![JetColumn { r, u, du, dplus }],
            });
            t += 1.0;
        }
        RunResult {
            jets,
            amplitude,
            speeds: vec![1.0],
            ..RunResult::default()
        }
    }

    #[test]
    fn log_factor_at_origin() {
        assert_eq!(std0_log_factor(1.0, 0.0, 0.0), 2f64.ln());
        assert_eq!(std0_log_factor(3.0, 0.0, 0.0), 2f64.ln());
    }

    #[test]
    fn zero_field_is_bounded() {
        let mut run = outgoing(20.0, 1.0);
        for f in &mut run.jets {
            for c in &mut f.columns {
                c.u.iter_mut().for_each(|v| *v = 0.0);
                c.du.iter_mut().for_each(|v| *v = 0.0);
                c.dplus.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        for k in [PointwiseKind::Std0, PointwiseKind::Std1, PointwiseKind::Dplus] {
            let d = check_pointwise_decay(&run, k, 0).unwrap();
            assert_eq!(d.growth, 0.0);
            assert!(d.bounded);
        }
        assert!(fit_dplus_ray_exponent(&run, 0, 2, 0.0).is_err());
    }

    #[test]
    fn outgoing_wave_is_bounded_and_amplitude_free() {
        let a = check_pointwise_decay(&outgoing(60.0, 1.0), PointwiseKind::Std1, 0).unwrap();
        let b = check_pointwise_decay(&outgoing(60.0, 1e-3), PointwiseKind::Std1, 0).unwrap();
        assert!(a.bounded, "growth {}", a.growth);
        for (x, y) in a.running_sup.iter().zip(&b.running_sup) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
        let s0 = check_pointwise_decay(&outgoing(60.0, 1.0), PointwiseKind::Std0, 0).unwrap();
        assert!(s0.bounded, "std0 growth {}", s0.growth);
    }

    #[test]
    fn blow_up_is_never_bounded() {
        let mut run = outgoing(20.0, 1.0);
        run.lifespan = Some(crate::model::Lifespan::BlowUp(20.0));
        assert!(!check_pointwise_decay(&run, PointwiseKind::Std1, 0).unwrap().bounded);
        // growing quantity
        let mut grow = outgoing(20.0, 1.0);
        for (i, f) in grow.jets.iter_mut().enumerate() {
            f.columns[0].du.iter_mut().for_each(|v| *v *= 1.0 + i as f64);
        }
        let d = check_pointwise_decay(&grow, PointwiseKind::Std1, 0).unwrap();
        assert!(!d.bounded && d.growth > 0.5);
    }

    #[test]
    fn outgoing_ray_exponent_is_minus_one() {
        let run = outgoing(80.0, 1.0);
        let fit = fit_dplus_ray_exponent(&run, 0, 2, 10.0).unwrap();
        assert_eq!(fit.rays.len(), 2);
        assert!(fit.exponent < -0.9 && fit.exponent > -1.1, "{fit:?}");
    }
}
