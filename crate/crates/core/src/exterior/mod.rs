//! Exterior solvers for `box_{c_i} u^i = F^i(u, du)` outside the obstacle,
//! with homogeneous Dirichlet data on its boundary.
//!
//! Solvers are strategies behind [`Solver`]; a [`SolverRegistry`] maps the
//! grid mode to one. Each produces a [`Stepper`] that advances one global
//! time step at a time and hands out immutable [`Field`] snapshots.

mod cartesian;
pub mod derivs;
mod energy;
mod radial;

pub use cartesian::CartesianStepper;
pub use energy::energies;
pub use radial::RadialStepper;

use crate::error::{Error, Result};
use crate::model::{Field, Grid, InitialData, WaveSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continue,
    /// `|u|` exceeded the blow-up gate or became non-finite.
    BlowUp,
}

pub trait Stepper: Send {
    /// Advances by one global step.
    fn step(&mut self) -> Result<StepOutcome>;

    /// Current global time.
    fn time(&self) -> f64;

    fn dt(&self) -> f64;

    /// Three-level snapshot centered at [`Stepper::time`].
    fn snapshot(&self) -> Field;

    /// The discrete energy the scheme conserves exactly in linear,
    /// undamped runs.
    fn conserved_energy(&self) -> f64;

    fn max_abs(&self) -> f64;
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;

    fn accepts(&self, grid: &Grid) -> bool;

    fn build(&self, sys: &WaveSystem, data: &InitialData, grid: &Grid) -> Result<Box<dyn Stepper>>;
}

struct RadialSolver;

impl Solver for RadialSolver {
    fn name(&self) -> &'static str {
        "radial"
    }

    fn accepts(&self, grid: &Grid) -> bool {
        matches!(grid, Grid::Radial(_))
    }

    fn build(&self, sys: &WaveSystem, data: &InitialData, grid: &Grid) -> Result<Box<dyn Stepper>> {
        match grid {
            Grid::Radial(g) => Ok(Box::new(RadialStepper::new(sys, data, g)?)),
            _ => Err(Error::Invalid(vec!["radial solver needs a radial grid".into()])),
        }
    }
}

struct CartesianSolver;

impl Solver for CartesianSolver {
    fn name(&self) -> &'static str {
        "cartesian3d"
    }

    fn accepts(&self, grid: &Grid) -> bool {
        matches!(grid, Grid::Cartesian(_))
    }

    fn build(&self, sys: &WaveSystem, data: &InitialData, grid: &Grid) -> Result<Box<dyn Stepper>> {
        match grid {
            Grid::Cartesian(g) => Ok(Box::new(CartesianStepper::new(sys, data, g)?)),
            _ => Err(Error::Invalid(vec!["cartesian3d solver needs a cartesian grid".into()])),
        }
    }
}

pub struct SolverRegistry {
    solvers: Vec<Box<dyn Solver>>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        SolverRegistry {
            solvers: vec![Box::new(RadialSolver), Box::new(CartesianSolver)],
        }
    }
}

impl SolverRegistry {
    pub fn register(&mut self, solver: Box<dyn Solver>) {
        self.solvers.push(solver);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn Solver> {
        self.solvers
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "solver",
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }

    /// The solver registered under the grid's mode name.
    pub fn for_grid(&self, grid: &Grid) -> Result<&dyn Solver> {
        let s = self.get(grid.mode())?;
        if !s.accepts(grid) {
            return Err(Error::Invalid(vec![format!("solver {} rejects this grid", s.name())]));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RadialGrid;

    #[test]
    fn registry_dispatches_on_mode() {
        let reg = SolverRegistry::default();
        assert_eq!(reg.names(), vec!["radial", "cartesian3d"]);
        let g = Grid::Radial(RadialGrid {
            r_min: 1.0,
            r_max: 5.0,
            dr: 0.1,
            dt: 0.1,
            t_max: 1.0,
            angular_mode: 0,
            sponge_width: None,
        });
        assert_eq!(reg.for_grid(&g).unwrap().name(), "radial");
        assert!(reg.get("spectral").is_err());
        let sys = WaveSystem::linear(vec![1.0]);
        let data = InitialData::zero(1, 1.5);
        let mut st = reg.for_grid(&g).unwrap().build(&sys, &data, &g).unwrap();
        assert_eq!(st.step().unwrap(), StepOutcome::Continue);
        assert!((st.time() - 0.1).abs() < 1e-15);
    }
}
