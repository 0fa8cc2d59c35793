use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use nullwave_core::diagnostics::{
    decay_fit_csv, exit_time, fit_local_energy_decay, sweep_lifespan, DecayModelRegistry,
};
use nullwave_core::error::Error as CoreError;
use nullwave_core::exterior::SolverRegistry;
use nullwave_core::model::{validate, Scenario, ScenarioConfig};
use nullwave_core::nonlinearity::{check_components, split_quadratic, NullCheck};
use nullwave_core::runner::{lifespan_text, run_scenario, write_run_files, RunManifest, FORMAT_VERSION, TOOL_VERSION};
use nullwave_core::tolerances;
use nullwave_core::verify::{decomposition_settings, DecompositionStudy, SuiteRegistry, VerifyOptions};
use nullwave_core::weights::{data_norm_b, monitor_e, monitor_label};

const WORKERS_ENV: &str = "NULLWAVE_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "nullwave",
    version = TOOL_VERSION,
    about = "Exterior wave systems with null-form nonlinearities: runs, sweeps and verification suites",
    after_help = help_footer()
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; NULLWAVE_WORKERS takes precedence. Defaults to the
    /// available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for sampled probe sets.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the configured final time.
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Multiply the resolution (values below 1 coarsen).
    #[arg(long, global = true)]
    resolution_scale: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide the null condition for the configured quadratic part.
    CheckNull,
    /// Run a scenario and write time series, jets, snapshots and a manifest.
    Run,
    /// Run the scenario at each amplitude and regress log T against 1/eps.
    SweepLifespan {
        /// Strictly decreasing amplitudes.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
    },
    /// Check the homogeneous and inhomogeneous decomposition identities.
    VerifyDecomposition,
    /// Run one verification suite.
    Verify {
        /// decomposition, kirchhoff, commutators, nullform-identity or
        /// klainerman-sobolev.
        suite: String,
    },
    /// Run the scenario and fit a decay law to the local energy.
    FitLocalDecay {
        /// Fit window `start,end`.
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 120.0])]
        window: Vec<f64>,
        /// exponential, power or power-log.
        #[arg(long, default_value = "exponential")]
        model: String,
        /// Clip the window start to the time the data pulse leaves the ball.
        #[arg(long)]
        after_exit: bool,
    },
    /// Print the data norm B and the monitor at t = 0.
    Norms {
        /// Weight exponent.
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Derivative order (0 or 1).
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

fn help_footer() -> String {
    format!(
        "{}\nExit codes: 0 success, 1 negative verdict (null condition fails, \
         suite fails), 2 invalid input.",
        tolerances::describe()
    )
}

/// Failure that maps onto an exit code.
#[derive(Debug)]
struct Exit(u8, anyhow::Error);

fn invalid(e: impl Into<anyhow::Error>) -> Exit {
    Exit(2, e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers(&cli.common) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn worker_count(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v:?} is not a count"))?;
            Ok(Some(n))
        }
        Err(_) => Ok(flag),
    }
}

fn configure_workers(c: &Common) -> Result<()> {
    if let Some(n) = worker_count(c.workers)? {
        if n == 0 {
            bail!("worker count must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> std::result::Result<u8, Exit> {
    let c = &cli.common;
    match &cli.command {
        Command::CheckNull => cmd_check_null(c),
        Command::Run => cmd_run(c),
        Command::SweepLifespan { eps } => cmd_sweep(c, eps),
        Command::VerifyDecomposition => cmd_verify_decomposition(c),
        Command::Verify { suite } => cmd_verify(c, suite),
        Command::FitLocalDecay {
            window,
            model,
            after_exit,
        } => match window[..] {
            [a, b] if a < b => cmd_fit(c, (a, b), model, *after_exit),
            _ => Err(invalid(anyhow::anyhow!("--window needs `start,end` with start < end"))),
        },
        Command::Norms { rho, k } => cmd_norms(c, *rho, *k),
    }
}

fn config_path(c: &Common) -> std::result::Result<&Path, Exit> {
    c.config.as_deref().ok_or_else(|| invalid(anyhow::anyhow!("--config is required")))
}

fn out_dir(c: &Common, default: &str) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

/// Parses, applies the overrides and validates.
fn load_scenario(c: &Common) -> std::result::Result<(ScenarioConfig, Scenario), Exit> {
    let path = config_path(c)?;
    let cfg = ScenarioConfig::load(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(invalid)?;
    let mut s = cfg.scenario().map_err(invalid)?;
    if let Some(k) = c.resolution_scale {
        if !(k > 0.0) {
            return Err(invalid(anyhow::anyhow!("--resolution-scale must be positive")));
        }
        s = s.with_resolution_scale(k).map_err(invalid)?;
    }
    if let Some(t) = c.t_max {
        s = s.with_t_max(t).map_err(invalid)?;
    }
    for w in validate(&s).into_result().map_err(invalid)? {
        eprintln!("warning: {w}");
    }
    Ok((cfg, s))
}

fn write_text(dir: &Path, name: &str, text: &str) -> std::result::Result<(), Exit> {
    std::fs::create_dir_all(dir).map_err(invalid)?;
    std::fs::write(dir.join(name), text)
        .with_context(|| format!("writing {}", dir.join(name).display()))
        .map_err(invalid)
}

fn cmd_check_null(c: &Common) -> std::result::Result<u8, Exit> {
    let path = config_path(c)?;
    let cfg = ScenarioConfig::load(path).map_err(invalid)?;
    let sys = cfg.system().map_err(invalid)?;
    let checks = check_components(&sys);
    for (i, chk) in checks.iter().enumerate() {
        match chk {
            NullCheck::Holds => println!("component {i}: null condition holds"),
            NullCheck::Fails(w) => println!("component {i}: null condition FAILS {w}"),
        }
    }
    let split = split_quadratic(&sys);
    for comp in &split.components {
        let pairs: Vec<String> = comp
            .pairs
            .iter()
            .map(|p| {
                let b: Vec<String> = p.b.iter().map(|(a, b, v)| format!("Q{a}{b}:{v}")).collect();
                format!(
                    "({},{}) Q0:{} [{}] residual {:e}",
                    p.j,
                    p.k,
                    p.a,
                    b.join(" "),
                    p.residual_norm
                )
            })
            .collect();
        println!(
            "split {}: R_I {} terms, R_II {} terms; same-speed pairs: {}",
            comp.component,
            comp.r_i.iter().count(),
            comp.r_ii.iter().count(),
            if pairs.is_empty() { "none".to_string() } else { pairs.join("; ") }
        );
    }
    Ok(if checks.iter().all(NullCheck::holds) { 0 } else { 1 })
}

fn cmd_run(c: &Common) -> std::result::Result<u8, Exit> {
    let (cfg, s) = load_scenario(c)?;
    let dir = out_dir(c, "nullwave-out");
    let started = Instant::now();
    let out = run_scenario(&s).map_err(|e| match e {
        CoreError::Invalid(_) | CoreError::Config(_) => invalid(e),
        other => Exit(1, other.into()),
    })?;
    let files = write_run_files(&out, &s, &dir).map_err(invalid)?;
    let lifespan = lifespan_text(out.result.lifespan);
    let manifest = RunManifest {
        format_version: FORMAT_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        config_hash: cfg.hash(),
        command: "run".into(),
        grid: s.grid.summary(),
        solver: out.solver.to_string(),
        speeds: s.system.speeds.clone(),
        steps: out.steps,
        seed: c.seed,
        wall_time_s: started.elapsed().as_secs_f64(),
        lifespan: lifespan.clone(),
        notes: out.notes.clone(),
        files,
    };
    manifest.write(&dir).map_err(invalid)?;
    println!("{}", lifespan.unwrap_or_default());
    println!("outputs in {}", dir.display());
    Ok(0)
}

fn cmd_sweep(c: &Common, eps: &[f64]) -> std::result::Result<u8, Exit> {
    let (_, s) = load_scenario(c)?;
    let sweep = sweep_lifespan(&s, eps).map_err(invalid)?;
    let dir = out_dir(c, "nullwave-sweep");
    write_text(&dir, "lifespan.csv", &sweep.to_csv())?;
    for e in &sweep.entries {
        match &e.outcome {
            Ok(l) => println!("eps {}: {} (sup|u| {:e})", e.eps, lifespan_text(Some(*l)).unwrap_or_default(), e.sup_u),
            Err(m) => println!("eps {}: error: {m}", e.eps),
        }
    }
    match &sweep.regression {
        Ok(r) => println!(
            "log T = {:.6} / eps + {:.6}, correlation {:.6} over {} points",
            r.slope, r.intercept, r.correlation, r.n_points
        ),
        Err(m) => println!("regression refused: {m}"),
    }
    Ok(0)
}

fn verify_options(c: &Common) -> VerifyOptions {
    let d = VerifyOptions::default();
    VerifyOptions {
        seed: c.seed.unwrap_or(d.seed),
        resolution_scale: c.resolution_scale.unwrap_or(d.resolution_scale),
    }
}

fn cmd_verify_decomposition(c: &Common) -> std::result::Result<u8, Exit> {
    let settings = decomposition_settings(&verify_options(c));
    let study = DecompositionStudy::run(&settings).map_err(invalid)?;
    let dir = out_dir(c, "nullwave-verify");
    let names = ["homogeneous", "inhomogeneous"];
    for (name, pair) in names.iter().zip([&study.homogeneous, &study.inhomogeneous]) {
        write_text(&dir, &format!("decomposition_{name}.csv"), &pair[0].to_csv())?;
        write_text(&dir, &format!("decomposition_{name}_refined.csv"), &pair[1].to_csv())?;
    }
    for l in study.lines() {
        println!("{l}");
    }
    let passed = study.passed();
    println!("decomposition: {}", if passed { "PASS" } else { "FAIL" });
    Ok(if passed { 0 } else { 1 })
}

fn cmd_verify(c: &Common, suite: &str) -> std::result::Result<u8, Exit> {
    let registry = SuiteRegistry::default();
    let s = registry.get(suite).map_err(invalid)?;
    let report = s.run(&verify_options(c)).map_err(|e| Exit(1, e.into()))?;
    if let Some(dir) = &c.out {
        for a in &report.attachments {
            write_text(dir, &a.name, &a.csv)?;
        }
    }
    for l in &report.lines {
        println!("{l}");
    }
    println!("{}: {}", report.suite, if report.passed { "PASS" } else { "FAIL" });
    Ok(if report.passed { 0 } else { 1 })
}

fn cmd_fit(c: &Common, window: (f64, f64), model: &str, after_exit: bool) -> std::result::Result<u8, Exit> {
    let registry = DecayModelRegistry::default();
    let m = registry.get(model).map_err(invalid)?;
    let (_, s) = load_scenario(c)?;
    let out = run_scenario(&s).map_err(invalid)?;
    let b = out.result.local_radius;
    let mut w = window;
    if after_exit {
        w.0 = w.0.max(exit_time(&out.result, b));
    }
    let fit = fit_local_energy_decay(&out.result, b, w, m).map_err(|e| Exit(1, e.into()))?;
    println!("{}", fit.summary());
    if let Some(dir) = &c.out {
        write_text(dir, "decay_fit.csv", &decay_fit_csv(&out.result, &fit, m))?;
    }
    Ok(0)
}

fn cmd_norms(c: &Common, rho: f64, k: usize) -> std::result::Result<u8, Exit> {
    let (_, s) = load_scenario(c)?;
    let b = data_norm_b(rho, k, &s.data, &s.grid).map_err(invalid)?;
    println!("B_{{{rho},{k}}} = {b:e}");
    let registry = SolverRegistry::default();
    let solver = registry.for_grid(&s.grid).map_err(invalid)?;
    let field = solver.build(&s.system, &s.data, &s.grid).map_err(invalid)?.snapshot();
    let e = monitor_e(&field, k.min(1), &s.system).map_err(invalid)?;
    for (i, v) in e.iter().enumerate() {
        println!("{} component {i} at t = 0: {v:e}", monitor_label(k.min(1)));
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn help_lists_tolerances() {
        let help = Cli::command().render_long_help().to_string();
        assert!(help.contains("DECOMPOSITION_TOL"));
    }

    #[test]
    fn window_defaults() {
        let cli = Cli::try_parse_from(["nullwave", "fit-local-decay", "--config", "x.toml"]).unwrap();
        match cli.command {
            Command::FitLocalDecay { window, .. } => assert_eq!(window, vec![10.0, 120.0]),
            _ => unreachable!(),
        }
    }
}
