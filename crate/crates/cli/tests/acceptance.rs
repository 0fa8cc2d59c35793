//! Acceptance checks, one PASS/FAIL line per criterion with wall time
//! against its budget. Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nullwave_core::diagnostics::{
    check_pointwise_decay, exit_time, fit_dplus_ray_exponent, fit_local_energy_decay, sweep_lifespan, DecayModelRegistry,
    PointwiseKind,
};
use nullwave_core::exterior::{RadialStepper, Stepper};
use nullwave_core::freefield::RadialOracle;
use nullwave_core::model::{Lifespan, RadialGrid, Scenario};
use nullwave_core::nonlinearity::catalog::fixture_catalog;
use nullwave_core::nonlinearity::check_null_condition;
use nullwave_core::runner::run_scenario;
use nullwave_core::tolerances::*;
use nullwave_core::verify::{SuiteRegistry, VerifyOptions};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn scenario(toml: &str) -> Scenario {
    Scenario::from_toml(toml).expect("acceptance scenario parses")
}

fn catalog() -> Outcome {
    let cat = fixture_catalog();
    let wrong: Vec<&str> = cat
        .iter()
        .filter(|f| check_null_condition(&f.system).holds() != f.null)
        .map(|f| f.name.as_str())
        .collect();
    let msg = format!("{} fixtures, {} misclassified", cat.len(), wrong.len());
    if cat.len() >= 12 && wrong.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {wrong:?}"))
    }
}

fn suite(name: &str) -> Outcome {
    let reg = SuiteRegistry::default();
    let r = reg
        .get(name)
        .and_then(|s| s.run(&VerifyOptions::default()))
        .map_err(|e| e.to_string())?;
    let msg = r.lines.join(" | ");
    if r.passed {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn kirchhoff() -> Outcome {
    suite("kirchhoff")
}

const LINEAR_UNIT: &str = r#"
[system]
speeds = [1.0]

[data]
amplitude = 1.0
support_inner_radius = 1.5
profiles = [
  { component = 0, slot = "phi", kind = "bump", inner = 2.0, outer = 3.0 },
  { component = 0, slot = "psi", kind = "bump", inner = 2.2, outer = 2.8, peak = -0.5 },
]

[grid]
mode = "radial"
dr = 0.02
t_max = 5.0
"#;

fn images_and_energy() -> Outcome {
    let s = scenario(LINEAR_UNIT);
    let c = s.system.speeds[0];
    let comp = &s.data.components[0];
    let oracle = RadialOracle::new(
        1.0,
        c,
        s.data.amplitude,
        std::sync::Arc::new(comp.phi.clone()),
        std::sync::Arc::new(comp.psi.clone()),
    );
    // reflecting box [1, 6]: the images oracle holds until the first echo
    // from r = 6 returns to the probes, the energy for all time
    let (r_min, r_max, dr) = (1.0, 6.0, 0.02);
    let grid = RadialGrid {
        r_min,
        r_max,
        dr,
        dt: dr / c,
        t_max: 0.0,
        angular_mode: 0,
        sponge_width: None,
    };
    let mut st = RadialStepper::new(&s.system, &s.data, &grid).map_err(|e| e.to_string())?;
    let e0 = st.conserved_energy();
    let crossing = (r_max - r_min) / c;
    let steps = (200.0 * crossing / grid.dt).round() as usize;
    let mut worst_images = 0.0f64;
    let mut worst_drift = 0.0f64;
    for n in 0..steps {
        st.step().map_err(|e| e.to_string())?;
        let (t, u) = st.big_u(0);
        if t <= r_max - 3.0 - 0.5 {
            for (m, &r) in st.nodes().iter().enumerate() {
                if r <= r_max - (t + 0.5) {
                    worst_images = worst_images.max((u[m] - oracle.big_u(t, r)).abs());
                }
            }
        }
        if n % 50 == 0 {
            worst_drift = worst_drift.max(((st.conserved_energy() - e0) / e0).abs());
        }
    }
    worst_drift = worst_drift.max(((st.conserved_energy() - e0) / e0).abs());
    let msg = format!("images max |U - U_exact| {worst_images:.3e}; energy drift {worst_drift:.3e} over 200 crossings");
    if worst_images <= IMAGES_ABS && worst_drift <= ENERGY_DRIFT_REL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const DECAY_L1: &str = r#"
[system]
speeds = [0.2]

[data]
amplitude = 1.0
support_inner_radius = 1.5
profiles = [{ component = 0, slot = "phi", kind = "bump", inner = 2.0, outer = 3.0 }]

[grid]
mode = "radial"
dr = 0.02
t_max = 120.0
angular_mode = 1

[diagnostics]
n_diag = 25
local_radius = 4.0
"#;

fn local_decay() -> Outcome {
    let s = scenario(DECAY_L1);
    let out = run_scenario(&s).map_err(|e| e.to_string())?;
    let models = DecayModelRegistry::default();
    let exp = models.get("exponential").map_err(|e| e.to_string())?;
    let b = s.diagnostics.local_radius;
    let start = 10.0f64.max(exit_time(&out.result, b));
    let fit = fit_local_energy_decay(&out.result, b, (start, 120.0), exp).map_err(|e| e.to_string())?;
    let msg = fit.summary();
    if !fit.degenerate && fit.rate > 0.0 && fit.goodness >= LOCAL_DECAY_GOODNESS {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const LINEAR_LONG: &str = r#"
[system]
speeds = [1.0]

[data]
amplitude = 0.1
support_inner_radius = 1.5
profiles = [{ component = 0, slot = "phi", kind = "bump", inner = 2.0, outer = 3.0 }]

[grid]
mode = "radial"
dr = 0.02
t_max = 200.0

[diagnostics]
n_diag = 10
local_radius = 4.0
jets = true
jet_stride = 10
"#;

fn long_run() -> Result<nullwave_core::model::RunResult, String> {
    run_scenario(&scenario(LINEAR_LONG)).map(|o| o.result).map_err(|e| e.to_string())
}

fn pointwise() -> Outcome {
    let run = long_run()?;
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [PointwiseKind::Std1, PointwiseKind::Std0] {
        let d = check_pointwise_decay(&run, kind, 0).map_err(|e| e.to_string())?;
        ok &= d.bounded;
        parts.push(format!("{} growth {:.3e}", kind.name(), d.growth));
    }
    let msg = parts.join(", ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn dplus() -> Outcome {
    let run = long_run()?;
    let fit = fit_dplus_ray_exponent(&run, 0, 3, 20.0).map_err(|e| e.to_string())?;
    let msg = format!(
        "worst ray exponent {:.4} over {} rays (goodness >= {:.4})",
        fit.exponent,
        fit.rays.len(),
        fit.goodness
    );
    if fit.exponent <= DPLUS_EXPONENT_MAX {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn decomposition() -> Outcome {
    suite("decomposition")
}

fn identities() -> Outcome {
    let a = suite("commutators");
    let b = suite("nullform-identity");
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(format!("{x} | {y}")),
        (x, y) => Err(format!("{} | {}", x.unwrap_or_else(|e| e), y.unwrap_or_else(|e| e))),
    }
}

fn lifespan_template(nonlinearity: &str, t_max: f64) -> String {
    format!(
        r#"
[system]
speeds = [1.0]

[nonlinearity]
{nonlinearity}

[data]
amplitude = 0.1
support_inner_radius = 1.5
profiles = [{{ component = 0, slot = "phi", kind = "bump", inner = 2.0, outer = 3.0, peak = 2.0 }}]

[grid]
mode = "radial"
dr = 0.02
t_max = {t_max}

[diagnostics]
n_diag = 10
"#
    )
}

fn lifespan() -> Outcome {
    let eps = [0.4, 0.2, 0.1, 0.05];
    let bad = scenario(&lifespan_template(
        "quadratic = [{ i = 0, j = 0, k = 0, a = 0, b = 0, coeff = 1.0 }]",
        150.0,
    ));
    let good = scenario(&lifespan_template("null_terms = [{ kind = \"q0\", i = 0, j = 0, k = 0, coeff = 1.0 }]", 100.0));
    let (sb, sg) = rayon::join(|| sweep_lifespan(&bad, &eps), || sweep_lifespan(&good, &eps));
    let (sb, sg) = (sb.map_err(|e| e.to_string())?, sg.map_err(|e| e.to_string())?);

    let times = sb.blowup_times();
    let all_blew = times.len() == eps.len();
    let decreasing_t = times.windows(2).all(|w| w[1].1 > w[0].1);
    let corr = sb.regression.as_ref().map(|r| r.correlation).unwrap_or(f64::NAN);
    let survived = sg
        .entries
        .iter()
        .all(|e| matches!(e.outcome, Ok(Lifespan::Survived(t)) if t >= 100.0 - 1e-9) && e.sup_u <= NULL_SUP_FACTOR * e.eps);
    let t_list: Vec<String> = times.iter().map(|(_, t)| format!("{t:.2}")).collect();
    let sups: Vec<String> = sg.entries.iter().map(|e| format!("{:.2}", e.sup_u / e.eps)).collect();
    let msg = format!(
        "(d_t u)^2 T = [{}], corr {corr:.4}; Q0 survives to 100 with sup|u|/eps = [{}]",
        t_list.join(", "),
        sups.join(", ")
    );
    // T(eps) must shrink as eps grows; the list is in decreasing eps
    if all_blew && decreasing_t && corr >= LIFESPAN_CORRELATION && survived {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn klainerman_sobolev() -> Outcome {
    suite("klainerman-sobolev")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("run.toml");
    let text = LINEAR_LONG.replace("t_max = 200.0", "t_max = 30.0").replace(
        "jets = true",
        "jets = true\nsnapshots = true\nweights = [{ kind = \"W\", nu = 1.0, kappa = 1.0 }]",
    );
    std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
    let run = |name: &str, workers: &str| -> Result<std::path::PathBuf, String> {
        let out = dir.path().join(name);
        let st = Command::new(env!("CARGO_BIN_EXE_nullwave"))
            .args(["run", "--seed", "7", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env("NULLWAVE_WORKERS", workers)
            .output()
            .map_err(|e| e.to_string())?;
        if !st.status.success() {
            return Err(String::from_utf8_lossy(&st.stderr).into_owned());
        }
        Ok(out)
    };
    let a = run("a", "1")?;
    let b = run("b", "4")?;
    let csvs = csv_files(&a)?;
    if csvs.is_empty() {
        return Err("no CSV written".into());
    }
    for f in &csvs {
        let x = std::fs::read(a.join(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(f)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{f} differs between runs"));
        }
    }
    if csv_files(&b)? != csvs {
        return Err("file lists differ".into());
    }
    Ok(format!("{} CSV files identical across 1 and 4 workers", csvs.len()))
}

fn csv_files(dir: &Path) -> Result<Vec<String>, String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    v.sort();
    Ok(v)
}

fn main() {
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let criteria = [
        Criterion { id: 1, name: "null-condition catalog", budget: Duration::from_secs(1), check: catalog },
        Criterion { id: 2, name: "Kirchhoff oracle", budget: Duration::from_secs(30), check: kirchhoff },
        Criterion { id: 3, name: "radial solver vs images, energy", budget: Duration::from_secs(30), check: images_and_energy },
        Criterion { id: 4, name: "local energy decay", budget: Duration::from_secs(60), check: local_decay },
        Criterion { id: 5, name: "std1/std0 running sups", budget: Duration::from_secs(60), check: pointwise },
        Criterion { id: 6, name: "enhanced D+ decay", budget: Duration::from_secs(60), check: dplus },
        Criterion { id: 7, name: "decomposition identities", budget: Duration::from_secs(300), check: decomposition },
        Criterion { id: 8, name: "commutator and null-form identities", budget: Duration::from_secs(30), check: identities },
        Criterion { id: 9, name: "null vs non-null lifespan", budget: Duration::from_secs(600), check: lifespan },
        Criterion { id: 10, name: "Klainerman-Sobolev spot-check", budget: Duration::from_secs(10), check: klainerman_sobolev },
        Criterion { id: 11, name: "deterministic CSV output", budget: Duration::from_secs(60), check: determinism },
    ];
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_none_or(|k| k == c.id)) {
        let t0 = Instant::now();
        let outcome = (c.check)();
        let dt = t0.elapsed();
        let in_time = dt <= c.budget;
        let (ok, detail) = match outcome {
            Ok(m) => (in_time, m),
            Err(m) => (false, m),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} ({}): {detail} [{:.2} s / {} s budget{}]",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            dt.as_secs_f64(),
            c.budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
