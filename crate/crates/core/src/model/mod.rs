//! Domain types: the wave system, scenario configuration, grids, data and
//! sampled fields.

pub mod config;
pub mod data;
pub mod field;
pub mod grid;
pub mod profile;
pub mod result;
pub mod system;

pub use config::{DiagnosticsSpec, Scenario, ScenarioConfig};
pub use data::{ComponentData, InitialData};
pub use field::{Field, Geometry};
pub use grid::{CartesianGrid, Grid, RadialGrid};
pub use profile::{Point, Profile, ProfileRegistry};
pub use result::{JetColumn, JetFrame, Lifespan, RunResult};
pub use system::{CubicTerm, Factor, NonlinearitySpec, NullKind, NullTerm, QuadTerm, WaveSystem};

/// Outcome of [`validate_scenario`]. `violations` make the scenario
/// unrunnable; `notes` are informational (inert terms, sponge layers).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> crate::error::Result<Vec<String>> {
        if self.violations.is_empty() {
            Ok(self.notes)
        } else {
            Err(crate::error::Error::Invalid(self.violations))
        }
    }
}

/// Largest supported monitor order `k` in `e_k`.
pub const MONITOR_MAX_K: usize = 1;

/// Checks every invariant a runnable scenario must satisfy.
pub fn validate_scenario(sys: &WaveSystem, data: &InitialData, grid: &Grid) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let v = &mut rep.violations;

    if sys.speeds.is_empty() {
        v.push("system needs at least one component".into());
    }
    for (i, &c) in sys.speeds.iter().enumerate() {
        if !(c.is_finite() && c > 0.0) {
            v.push(format!("speed c_{i} = {c} is not strictly positive"));
        }
    }
    if data.components.len() != sys.speeds.len() {
        v.push(format!(
            "data has {} components, system has {}",
            data.components.len(),
            sys.speeds.len()
        ));
    }
    v.extend(sys.nonlinearity.violations(&sys.speeds));
    if !(data.amplitude.is_finite() && data.amplitude >= 0.0) {
        v.push(format!("amplitude {} must be finite and non-negative", data.amplitude));
    }
    if !v.is_empty() {
        return rep;
    }

    let obstacle = grid.obstacle_radius();
    if !(data.support_inner_radius > obstacle) {
        v.push(format!(
            "support_inner_radius = {} does not clear the obstacle of radius {obstacle}",
            data.support_inner_radius
        ));
    }
    if !data.is_zero() && data.min_support_radius() < data.support_inner_radius - 1e-12 {
        v.push(format!(
            "a profile reaches |x| = {} inside support_inner_radius = {}",
            data.min_support_radius(),
            data.support_inner_radius
        ));
    }

    let c_max = sys.c_max();
    let (dt, t_max) = (grid.dt(), grid.t_max());
    if !(dt > 0.0 && t_max > 0.0) {
        v.push(format!("need dt > 0 and t_max > 0, got dt = {dt}, t_max = {t_max}"));
    }
    let reach = data.max_support_radius() + c_max * t_max;
    match grid.sponge_width() {
        Some(w) => rep.notes.push(format!(
            "absorbing sponge of width {w} enabled; decay measurements are perturbed near the outer edge"
        )),
        None => {
            if !data.is_zero() && grid.outer_extent() < reach {
                v.push(format!(
                    "outer boundary {} is reached by the data before t_max (needs >= {reach})",
                    grid.outer_extent()
                ));
            }
        }
    }

    match grid {
        Grid::Radial(g) => radial_checks(sys, data, g, &mut rep),
        Grid::Cartesian(g) => {
            let courant = c_max * g.dt / g.dx;
            if courant > 1.0 / 3f64.sqrt() + 1e-12 {
                rep.violations.push(format!(
                    "CFL violated: c_max dt / dx = {courant:.4} > 1/sqrt(3)"
                ));
            }
            if !(g.obstacle_radius > 0.0 && g.half_width > g.obstacle_radius) {
                rep.violations.push("obstacle must sit strictly inside the cube".into());
            }
        }
    }
    rep
}

fn radial_checks(sys: &WaveSystem, data: &InitialData, g: &RadialGrid, rep: &mut ValidationReport) {
    let v = &mut rep.violations;
    let c_max = sys.c_max();
    if g.r_min != 1.0 {
        v.push(format!("radial grid must start at the obstacle r = 1, got {}", g.r_min));
    }
    if ((g.dt - g.dr / c_max) / g.dt).abs() > 1e-12 {
        v.push(format!(
            "radial mode needs dt = dr / c_max = {}, got {}",
            g.dr / c_max,
            g.dt
        ));
    }
    if g.n_nodes() < 5 {
        v.push("radial grid has fewer than 5 nodes".into());
    }
    for (i, &c) in sys.speeds.iter().enumerate() {
        let ratio = c_max / c;
        if (ratio - ratio.round()).abs() > 1e-9 {
            v.push(format!(
                "c_max / c_{i} = {ratio} is not an integer; radial sub-stepping needs integer ratios"
            ));
        }
    }
    if !data.all_origin_radial() {
        v.push("radial mode needs profiles centered at the origin".into());
    }
    if g.angular_mode > 0 && !sys.is_linear() {
        v.push(format!(
            "angular channel l = {} supports linear runs only",
            g.angular_mode
        ));
    }

    let nl = &sys.nonlinearity;
    for t in &nl.null_terms {
        match (t.kind, t.a) {
            (NullKind::Qab, Some(0)) => v.push(format!(
                "Q_0{} in F_{} breaks radial symmetry",
                t.b.unwrap_or(0),
                t.i
            )),
            (NullKind::Qab, _) => rep.notes.push(format!(
                "Q_{}{} in F_{} vanishes on radial fields and is inert here",
                t.a.unwrap_or(0),
                t.b.unwrap_or(0),
                t.i
            )),
            _ => {}
        }
    }
    // Collect the quadratic coefficient matrix of every (i, j, k) triple and
    // require rotation invariance: no mixed time-space entries and a
    // symmetric spatial block proportional to the identity.
    let mut blocks: std::collections::BTreeMap<(usize, usize, usize), [[f64; 4]; 4]> =
        Default::default();
    for q in &nl.general_quadratic {
        blocks.entry((q.i, q.j, q.k)).or_insert([[0.0; 4]; 4])[q.a][q.b] += q.coeff;
    }
    for ((i, j, k), m) in blocks {
        let mixed = (1..4).any(|b| m[0][b] != 0.0 || m[b][0] != 0.0);
        let sym = |a: usize, b: usize| 0.5 * (m[a][b] + m[b][a]);
        let off = (1..4).any(|a| (a + 1..4).any(|b| sym(a, b) != 0.0));
        let diag_equal = sym(1, 1) == sym(2, 2) && sym(2, 2) == sym(3, 3);
        if mixed || off || !diag_equal {
            v.push(format!(
                "quadratic terms in F_{i} on (u_{j}, u_{k}) are not rotation invariant"
            ));
        }
    }
    for t in &nl.cubic_terms {
        if t.factors.iter().any(|f| f.is_spatial_derivative()) {
            v.push(format!(
                "cubic term in F_{} has a spatial-derivative factor; radial mode allows u and d_t u only",
                t.i
            ));
        }
    }
}

/// Convenience wrapper over [`validate_scenario`].
pub fn validate(s: &Scenario) -> ValidationReport {
    let mut rep = validate_scenario(&s.system, &s.data, &s.grid);
    if let Some(k) = s.diagnostics.monitor_k {
        if k > MONITOR_MAX_K {
            rep.violations.push(format!(
                "monitor e_k supports k <= {MONITOR_MAX_K}, got {k}"
            ));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn radial_data(inner: f64, outer: f64) -> InitialData {
        let mut d = InitialData::zero(1, inner - 0.1);
        d.amplitude = 0.1;
        d.components[0].phi.parts.push(Arc::new(profile::Bump {
            center: [0.0; 3],
            inner,
            outer,
            peak: 1.0,
        }));
        d
    }

    fn radial_grid(dt: f64) -> Grid {
        Grid::Radial(RadialGrid {
            r_min: 1.0,
            r_max: 20.0,
            dr: 0.05,
            dt,
            t_max: 10.0,
            angular_mode: 0,
            sponge_width: None,
        })
    }

    #[test]
    fn magic_step_radial_is_valid() {
        let sys = WaveSystem::linear(vec![1.0]);
        let rep = validate_scenario(&sys, &radial_data(2.0, 3.0), &radial_grid(0.05));
        assert!(rep.is_valid(), "{:?}", rep.violations);
        let rep = validate_scenario(&sys, &radial_data(2.0, 3.0), &radial_grid(0.04));
        assert!(!rep.is_valid());
    }

    #[test]
    fn cartesian_cfl_violation() {
        let sys = WaveSystem::linear(vec![1.0]);
        let grid = Grid::Cartesian(CartesianGrid {
            half_width: 14.0,
            dx: 0.1,
            obstacle_radius: 1.0,
            dt: 0.09,
            t_max: 10.0,
            sponge_width: None,
        });
        let rep = validate_scenario(&sys, &radial_data(2.0, 3.0), &grid);
        assert!(rep.violations.iter().any(|m| m.contains("CFL")), "{rep:?}");
    }

    #[test]
    fn support_inside_obstacle_rejected() {
        let sys = WaveSystem::linear(vec![1.0]);
        let mut data = radial_data(2.0, 3.0);
        data.support_inner_radius = 0.5;
        let rep = validate_scenario(&sys, &data, &radial_grid(0.05));
        assert!(rep.violations.iter().any(|m| m.contains("obstacle")));
    }

    #[test]
    fn padding_enforced_unless_sponge() {
        let sys = WaveSystem::linear(vec![1.0]);
        let mut g = radial_grid(0.05);
        g.set_t_max(30.0);
        assert!(!validate_scenario(&sys, &radial_data(2.0, 3.0), &g).is_valid());
        if let Grid::Radial(r) = &mut g {
            r.sponge_width = Some(3.0);
        }
        let rep = validate_scenario(&sys, &radial_data(2.0, 3.0), &g);
        assert!(rep.is_valid());
        assert_eq!(rep.notes.len(), 1);
    }

    #[test]
    fn radial_nonlinearity_compatibility() {
        let data = radial_data(2.0, 3.0);
        let grid = radial_grid(0.05);
        let inert = WaveSystem::new(
            vec![1.0],
            NonlinearitySpec {
                null_terms: vec![NullTerm::qab(0, 0, 0, 1, 2, 1.0)],
                ..Default::default()
            },
        );
        let rep = validate_scenario(&inert, &data, &grid);
        assert!(rep.is_valid() && rep.notes.iter().any(|n| n.contains("inert")));

        let d1sq = WaveSystem::new(
            vec![1.0],
            NonlinearitySpec {
                general_quadratic: vec![QuadTerm::new(0, 0, 0, 1, 1, 1.0)],
                ..Default::default()
            },
        );
        assert!(!validate_scenario(&d1sq, &data, &grid).is_valid());

        let grad_sq = WaveSystem::new(
            vec![1.0],
            NonlinearitySpec {
                general_quadratic: (1..4).map(|a| QuadTerm::new(0, 0, 0, a, a, 1.0)).collect(),
                ..Default::default()
            },
        );
        assert!(validate_scenario(&grad_sq, &data, &grid).is_valid());
    }

    #[test]
    fn non_integer_speed_ratio_rejected() {
        let sys = WaveSystem::linear(vec![1.0, 1.5]);
        let mut data = radial_data(2.0, 3.0);
        data.components.push(ComponentData::default());
        let grid = Grid::Radial(RadialGrid {
            r_min: 1.0,
            r_max: 30.0,
            dr: 0.05,
            dt: 0.05 / 1.5,
            t_max: 10.0,
            angular_mode: 0,
            sponge_width: None,
        });
        let rep = validate_scenario(&sys, &data, &grid);
        assert!(rep.violations.iter().any(|m| m.contains("integer")));
    }
}
