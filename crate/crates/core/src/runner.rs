//! Drives a scenario through its solver and collects the time series of a
//! [`RunResult`], plus the CSV / manifest writers used by the CLI.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::exterior::derivs::{lattice_jet, radial_jet};
use crate::exterior::{energies, SolverRegistry, StepOutcome};
use crate::model::{validate, Field, Geometry, JetColumn, JetFrame, Lifespan, RunResult, Scenario};
use crate::weights::{monitor_e, monitor_label, sample_directions, PointJet, RunningSup};

/// Version string written into manifests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Manifest / CSV format revision.
pub const FORMAT_VERSION: u32 = 1;

/// A finished run together with what the writers need.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: RunResult,
    pub solver: &'static str,
    pub steps: usize,
    /// Validation notes (inert terms, sponge layers, ...).
    pub notes: Vec<String>,
    /// `curr` levels at the sampled instants, when snapshots are enabled.
    pub snapshots: Vec<Field>,
}

/// Validates and runs a scenario with the default solver registry.
pub fn run_scenario(s: &Scenario) -> Result<RunOutput> {
    run_scenario_with(s, &SolverRegistry::default())
}

pub fn run_scenario_with(s: &Scenario, registry: &SolverRegistry) -> Result<RunOutput> {
    let notes = validate(s).into_result()?;
    let solver = registry.for_grid(&s.grid)?;
    let mut stepper = solver.build(&s.system, &s.data, &s.grid)?;
    let diag = &s.diagnostics;
    let speeds = s.system.speeds.clone();
    let t_max = s.grid.t_max();
    let dt = stepper.dt();

    let mut res = RunResult {
        local_radius: diag.local_radius,
        monitor_label: diag.monitor_k.map(monitor_label),
        weighted_sups: diag.weights.iter().map(|w| (w.label(), Vec::new())).collect(),
        amplitude: s.data.amplitude,
        speeds: speeds.clone(),
        data_outer_radius: s.data.max_support_radius(),
        ..RunResult::default()
    };
    let mut sups: Vec<RunningSup> = diag.weights.iter().cloned().map(RunningSup::new).collect();
    let mut snapshots = Vec::new();
    let mut steps = 0usize;
    let mut frame = 0usize;
    let lifespan;

    loop {
        if steps % diag.n_diag == 0 {
            let field = stepper.snapshot();
            record(&field, s, &mut res, &mut sups, frame)?;
            if diag.snapshots && frame % diag.jet_stride == 0 {
                snapshots.push(field);
            }
            frame += 1;
        }
        if stepper.time() >= t_max - 1e-9 * dt {
            lifespan = Lifespan::Survived(stepper.time());
            break;
        }
        let outcome = stepper.step()?;
        steps += 1;
        if outcome == StepOutcome::BlowUp {
            lifespan = Lifespan::BlowUp(stepper.time());
            break;
        }
    }
    res.lifespan = Some(lifespan);
    Ok(RunOutput {
        result: res,
        solver: solver.name(),
        steps,
        notes,
        snapshots,
    })
}

/// Sample sites of a field: every radial node along the sample directions,
/// or every interior lattice point.
fn jets_of(field: &Field, comp: usize) -> Result<Vec<PointJet>> {
    match field.geometry {
        Geometry::Radial { n, .. } => (0..n)
            .into_par_iter()
            .map(|m| -> Result<Vec<PointJet>> {
                sample_directions().iter().map(|&w| radial_jet(field, comp, m, w)).collect()
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().flatten().collect()),
        Geometry::Cartesian { n, .. } => (1..n - 1)
            .into_par_iter()
            .map(|i| -> Result<Vec<PointJet>> {
                let mut out = Vec::with_capacity((n - 2) * (n - 2));
                for j in 1..n - 1 {
                    for k in 1..n - 1 {
                        out.push(lattice_jet(field, comp, [i, j, k])?);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().flatten().collect()),
    }
}

fn record(field: &Field, s: &Scenario, res: &mut RunResult, sups: &mut [RunningSup], frame: usize) -> Result<()> {
    let diag = &s.diagnostics;
    let t = field.time;
    res.times.push(t);
    let (total, local) = energies(field, diag.local_radius);
    res.total_energy.push(total);
    res.local_energy.push(local);
    res.max_abs_u.push(field.max_abs());

    if !sups.is_empty() {
        // |u|_k summed over components, one sample per site
        let mut acc: Vec<(f64, f64)> = Vec::new();
        for comp in 0..field.n_components() {
            let jets = jets_of(field, comp)?;
            let vals: Vec<(f64, f64)> = jets
                .par_iter()
                .map(|j| (crate::model::profile::norm(j.x), j.norm(diag.norm_order)))
                .collect();
            if acc.is_empty() {
                acc = vals;
            } else {
                for (a, v) in acc.iter_mut().zip(vals) {
                    a.1 += v.1;
                }
            }
        }
        for (sup, (_, series)) in sups.iter_mut().zip(res.weighted_sups.iter_mut()) {
            series.push(sup.update(t, &acc, &s.system.speeds)?);
        }
    }
    if let Some(k) = diag.monitor_k {
        res.monitor_e.push(monitor_e(field, k, &s.system)?.iter().sum());
    }
    if diag.jets && frame % diag.jet_stride == 0 {
        res.jets.push(jet_frame(field)?);
    }
    Ok(())
}

/// Radial profile of every component at one instant: radial nodes, or the
/// lattice points on the positive first axis.
pub fn jet_frame(field: &Field) -> Result<JetFrame> {
    let mut columns = Vec::new();
    for comp in 0..field.n_components() {
        let c = field.speeds[comp];
        let jets: Vec<PointJet> = match field.geometry {
            Geometry::Radial { n, .. } => (0..n)
                .map(|m| radial_jet(field, comp, m, [1.0, 0.0, 0.0]))
                .collect::<Result<_>>()?,
            Geometry::Cartesian { half_width, dx, n } => {
                let mid = n / 2;
                (mid..n - 1)
                    .filter(|&i| -half_width + i as f64 * dx >= 0.0)
                    .map(|i| lattice_jet(field, comp, [i, mid, mid]))
                    .collect::<Result<_>>()?
            }
        };
        columns.push(JetColumn {
            r: jets.iter().map(|j| j.x[0]).collect(),
            u: jets.iter().map(|j| j.u).collect(),
            du: jets.iter().map(|j| j.d1.iter().map(|d| d.abs()).sum()).collect(),
            dplus: jets.iter().map(|j| j.dplus(c)).collect(),
        });
    }
    Ok(JetFrame { t: field.time, columns })
}

/// Shortest round-trip rendering; identical inputs give identical bytes.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// Time-series CSV: `t, total_energy, local_energy(b), <weights>, <monitor>, max_abs_u`.
pub fn timeseries_csv(r: &RunResult) -> String {
    let mut out = String::from("t,total_energy,");
    let _ = write!(out, "local_energy({})", r.local_radius);
    for (label, _) in &r.weighted_sups {
        let _ = write!(out, ",\"{label}\"");
    }
    if let Some(l) = &r.monitor_label {
        let _ = write!(out, ",{l}");
    }
    out.push_str(",max_abs_u\n");
    for i in 0..r.times.len() {
        out.push_str(&fmt_f64(r.times[i]));
        for v in [r.total_energy[i], r.local_energy[i]] {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        for (_, s) in &r.weighted_sups {
            out.push(',');
            out.push_str(&fmt_f64(s[i]));
        }
        if r.monitor_label.is_some() {
            out.push(',');
            out.push_str(&fmt_f64(r.monitor_e[i]));
        }
        out.push(',');
        out.push_str(&fmt_f64(r.max_abs_u[i]));
        out.push('\n');
    }
    out
}

/// Jet CSV: `t, component, r, u, du, dplus`.
pub fn jets_csv(r: &RunResult) -> String {
    let mut out = String::from("t,component,r,u,du,dplus\n");
    for f in &r.jets {
        for (c, col) in f.columns.iter().enumerate() {
            for m in 0..col.r.len() {
                let _ = writeln!(
                    out,
                    "{},{c},{},{},{},{}",
                    fmt_f64(f.t),
                    fmt_f64(col.r[m]),
                    fmt_f64(col.u[m]),
                    fmt_f64(col.du[m]),
                    fmt_f64(col.dplus[m])
                );
            }
        }
    }
    out
}

/// Snapshot CSV of the `curr` level: `component, index, value`.
pub fn snapshot_csv(f: &Field) -> String {
    let mut out = String::from("component,index,value\n");
    for (c, level) in f.curr.iter().enumerate() {
        for (i, v) in level.iter().enumerate() {
            let _ = writeln!(out, "{c},{i},{}", fmt_f64(*v));
        }
    }
    out
}

/// `manifest.json` contents.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub command: String,
    pub grid: String,
    pub solver: String,
    pub speeds: Vec<f64>,
    pub steps: usize,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    pub lifespan: Option<String>,
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).map_err(|e| crate::error::Error::Config(e.to_string()))?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}

pub fn lifespan_text(l: Option<Lifespan>) -> Option<String> {
    l.map(|l| match l {
        Lifespan::Survived(t) => format!("survived to t = {t}"),
        Lifespan::BlowUp(t) => format!("blow-up at t = {t}"),
    })
}

/// Writes the run's CSVs (and SVG plots when enabled) into `dir` and
/// returns the file names. Wall time is left to the manifest.
pub fn write_run_files(out: &RunOutput, s: &Scenario, dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        std::fs::write(dir.join(&name), text)?;
        files.push(name);
        Ok(())
    };
    put("timeseries.csv".into(), timeseries_csv(&out.result))?;
    if !out.result.jets.is_empty() {
        put("jets.csv".into(), jets_csv(&out.result))?;
    }
    for (i, f) in out.snapshots.iter().enumerate() {
        put(format!("snapshot_{i:04}.csv"), snapshot_csv(f))?;
    }
    if s.diagnostics.plots {
        let r = &out.result;
        let energy = vec![
            ("total".to_string(), r.times.iter().copied().zip(r.total_energy.iter().copied()).collect()),
            (
                format!("local({})", r.local_radius),
                r.times.iter().copied().zip(r.local_energy.iter().copied()).collect(),
            ),
        ];
        put("energy.svg".into(), crate::diagnostics::plot::line_plot_svg("energy", &energy, true))?;
        if !r.weighted_sups.is_empty() {
            let series: Vec<(String, Vec<(f64, f64)>)> = r
                .weighted_sups
                .iter()
                .map(|(l, v)| (l.clone(), r.times.iter().copied().zip(v.iter().copied()).collect()))
                .collect();
            put("weighted_sups.svg".into(), crate::diagnostics::plot::line_plot_svg("weighted sups", &series, false))?;
        }
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioConfig;

    const LINEAR: &str = r#"
[system]
speeds = [1.0]

[data]
amplitude = 0.5
support_inner_radius = 1.5
profiles = [{ component = 0, slot = "phi", kind = "bump", inner = 2.0, outer = 3.0, peak = 1.0 }]

[grid]
mode = "radial"
dr = 0.05
t_max = 12.0

[diagnostics]
n_diag = 4
local_radius = 4.0
weights = [{ kind = "W", nu = 1.0, kappa = 1.0 }]
jets = true
jet_stride = 2
"#;

    #[test]
    fn linear_run_series() {
        let s = ScenarioConfig::parse(LINEAR).unwrap().scenario().unwrap();
        let out = run_scenario(&s).unwrap();
        let r = &out.result;
        assert_eq!(out.solver, "radial");
        assert_eq!(r.lifespan, Some(Lifespan::Survived(r.times[r.times.len() - 1])));
        assert!(r.times.last().unwrap() >= &(12.0 - 1e-9));
        assert_eq!(r.times.len(), r.total_energy.len());
        assert_eq!(r.monitor_e.len(), r.times.len());
        assert_eq!(r.jets.len(), r.times.len().div_ceil(2));
        // weighted sups are running sups
        let w = &r.weighted_sups[0].1;
        assert!(w.windows(2).all(|p| p[1] >= p[0]));
        // the pulse leaves B_4 by t = 3 + 4 - 2 = 5 and never returns
        for (t, e) in r.times.iter().zip(&r.local_energy) {
            if *t > 5.5 {
                assert!(e.abs() < 1e-10 * r.total_energy[0], "t = {t}: {e}");
            }
        }
        let csv = timeseries_csv(r);
        assert!(csv.starts_with("t,total_energy,local_energy(4),\"W(1,1)\",e(1),max_abs_u\n"));
    }

    #[test]
    fn zero_amplitude_gives_zero_series() {
        let s = ScenarioConfig::parse(LINEAR).unwrap().scenario().unwrap().with_amplitude(0.0);
        let out = run_scenario(&s).unwrap();
        let r = &out.result;
        for v in r.total_energy.iter().chain(&r.local_energy).chain(&r.max_abs_u).chain(&r.monitor_e) {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn identical_runs_give_identical_csv() {
        let s = ScenarioConfig::parse(LINEAR).unwrap().scenario().unwrap();
        let a = timeseries_csv(&run_scenario(&s).unwrap().result);
        let b = timeseries_csv(&run_scenario(&s).unwrap().result);
        assert_eq!(a, b);
    }
}
