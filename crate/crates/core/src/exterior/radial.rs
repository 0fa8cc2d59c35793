//! Exact-CFL radial scheme for `U = r u` on `r_m = 1 + m dr`.
//!
//! Each component `j` advances with its own step `dt_j = dr / c_j`, so that
//! `c_j dt_j / dr = 1` and the homogeneous update
//! `U^{n+1}_m = U^n_{m+1} + U^n_{m-1} - U^{n-1}_m` reproduces d'Alembert
//! solutions exactly at the nodes. The global step is `dt = dr / c_max`
//! and every ratio `p_j = c_max / c_j` is an integer; component `j` moves
//! on global steps that are multiples of `p_j`. Between its own levels a
//! slow component is read through the quadratic interpolant of its three
//! stored levels `(tau - dt_j, tau, tau + dt_j)`.
//!
//! The source `r F(u, du)` is evaluated at the center level with a
//! predictor (backward-difference `d_t u`) and one corrector (centered
//! `d_t u` from the predicted level). Angular channels `l > 0` add the
//! potential `c^2 l (l + 1) / r^2`, treated with the energy-conserving
//! `theta = 1/4` average so the exact-CFL step stays stable.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{StepOutcome, Stepper};
use crate::error::{Error, Result};
use crate::freefield::RadialOracle;
use crate::model::{Field, Geometry, InitialData, Profile, RadialGrid, WaveSystem};
use crate::nonlinearity::{CompiledNonlinearity, Jet};
use crate::tolerances::BLOWUP_AMPLITUDE;

#[derive(Debug, Clone)]
struct Component {
    c: f64,
    /// Global steps per own step.
    p: usize,
    dt: f64,
    /// Own steps taken; the center level sits at `steps * dt`.
    steps: usize,
    before: Option<Vec<f64>>,
    prev: Vec<f64>,
    curr: Vec<f64>,
    next: Vec<f64>,
    /// Exact `U_t` at `t = 0`, used by the first predictor.
    ut0: Option<Vec<f64>>,
    /// Scheme-conserved energy between `curr` and `next`.
    energy: f64,
    /// `dt_j^2 V(r_m) / 4` per node (zero for `l = 0`).
    q: Vec<f64>,
    /// `sigma(r_m) dt_j / 2` per node.
    s: Vec<f64>,
}

impl Component {
    fn time(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// `(U, U_t)` at node `m` and time `t` within `[tau - dt_j, tau + dt_j]`.
    fn interp(&self, m: usize, t: f64) -> (f64, f64) {
        let th = (t - self.time()) / self.dt;
        let (a, b, c) = (self.prev[m], self.curr[m], self.next[m]);
        let u = a * th * (th - 1.0) * 0.5 + b * (1.0 - th * th) + c * th * (th + 1.0) * 0.5;
        let ut = (a * (th - 0.5) - 2.0 * th * b + c * (th + 0.5)) / self.dt;
        (u, ut)
    }
}

/// Radial stepper state; see the module docs for the scheme.
#[derive(Debug, Clone)]
pub struct RadialStepper {
    grid: RadialGrid,
    r: Vec<f64>,
    dt: f64,
    g: usize,
    comps: Vec<Component>,
    nl: CompiledNonlinearity,
    speeds: Vec<f64>,
}

/// Damping rate `sigma(r)`: zero inside, quadratic ramp across the sponge.
fn sponge_profile(grid: &RadialGrid, c_max: f64, r: f64) -> f64 {
    match grid.sponge_width {
        Some(w) if w > 0.0 => {
            let start = grid.r_max - w;
            if r <= start {
                0.0
            } else {
                let x = (r - start) / w;
                4.0 * c_max / w * x * x
            }
        }
        _ => 0.0,
    }
}

impl RadialStepper {
    pub fn new(sys: &WaveSystem, data: &InitialData, grid: &RadialGrid) -> Result<Self> {
        let n = grid.n_nodes();
        if n < 5 {
            return Err(Error::Invalid(vec!["radial grid has fewer than 5 nodes".into()]));
        }
        let r: Vec<f64> = (0..n).map(|m| grid.node(m)).collect();
        let c_max = sys.c_max();
        let dt = grid.dt;
        let eps = data.amplitude;
        let ell = grid.angular_mode as f64;
        let nl = CompiledNonlinearity::new(sys);
        let ncomp = sys.n_components();

        // Initial jets for the second-order start of nonlinear runs.
        let phis: Vec<Arc<dyn Profile>> = data.components.iter().map(|c| Arc::new(c.phi.clone()) as Arc<dyn Profile>).collect();
        let psis: Vec<Arc<dyn Profile>> = data.components.iter().map(|c| Arc::new(c.psi.clone()) as Arc<dyn Profile>).collect();
        let mut f0 = vec![vec![0.0; n]; ncomp];
        if !nl.is_empty() {
            let mut jet = Jet::zero(ncomp);
            let mut out = vec![0.0; ncomp];
            for m in 1..n - 1 {
                for k in 0..ncomp {
                    jet.u[k] = eps * phis[k].radial(r[m]);
                    jet.du[k] = [eps * psis[k].radial(r[m]), eps * phis[k].radial_derivative(r[m]), 0.0, 0.0];
                }
                nl.eval_into(&jet, &mut out);
                for k in 0..ncomp {
                    f0[k][m] = out[k];
                }
            }
        }

        let mut comps = Vec::with_capacity(ncomp);
        for j in 0..ncomp {
            let c = sys.speeds[j];
            let p = (c_max / c).round() as usize;
            let dtj = p as f64 * dt;
            let u0: Vec<f64> = r.iter().map(|&x| x * eps * phis[j].radial(x)).collect();
            let ut0: Vec<f64> = r.iter().map(|&x| x * eps * psis[j].radial(x)).collect();
            let q: Vec<f64> = r.iter().map(|&x| 0.25 * dtj * dtj * c * c * ell * (ell + 1.0) / (x * x)).collect();
            let s: Vec<f64> = r.iter().map(|&x| 0.5 * dtj * sponge_profile(grid, c_max, x)).collect();
            let mut prev = vec![0.0; n];
            if grid.angular_mode == 0 {
                let oracle = RadialOracle::new(grid.r_min, c, eps, phis[j].clone(), psis[j].clone());
                for m in 1..n - 1 {
                    prev[m] = oracle.big_u(-dtj, r[m]) + 0.5 * dtj * dtj * r[m] * f0[j][m];
                }
            } else {
                let dr = grid.dr;
                for m in 1..n - 1 {
                    let urr = (u0[m + 1] - 2.0 * u0[m] + u0[m - 1]) / (dr * dr);
                    let v = c * c * ell * (ell + 1.0) / (r[m] * r[m]);
                    prev[m] = u0[m] - dtj * ut0[m] + 0.5 * dtj * dtj * (c * c * urr - v * u0[m]);
                }
            }
            comps.push(Component {
                c,
                p,
                dt: dtj,
                steps: 0,
                before: None,
                prev,
                curr: u0,
                next: vec![0.0; n],
                ut0: Some(ut0),
                energy: 0.0,
                q,
                s,
            });
        }
        let mut st = RadialStepper {
            grid: grid.clone(),
            r,
            dt,
            g: 0,
            comps,
            nl,
            speeds: sys.speeds.clone(),
        };
        let all: Vec<usize> = (0..ncomp).collect();
        st.advance(&all);
        Ok(st)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        &self.r
    }

    /// `U = r u` of component `j` at its center level, with that level's time.
    pub fn big_u(&self, j: usize) -> (f64, &[f64]) {
        (self.comps[j].time(), &self.comps[j].curr)
    }

    /// `U` at the center level and the one after it.
    pub fn big_u_levels(&self, j: usize) -> (&[f64], &[f64]) {
        (&self.comps[j].curr, &self.comps[j].next)
    }

    /// Evaluates `r_m F(t_g)` for the components in `set`, reading the
    /// time derivative of updating components from `ut` (per component,
    /// `U_t` per node) and everything else from stored levels.
    fn sources(&self, set: &[usize], ut: &[Option<Vec<f64>>]) -> Vec<Vec<f64>> {
        let n = self.r.len();
        let ncomp = self.comps.len();
        let t = self.g as f64 * self.dt;
        let dr = self.grid.dr;
        let mut out = vec![vec![0.0; n]; ncomp];
        let mut jet = Jet::zero(ncomp);
        let mut f = vec![0.0; ncomp];
        // U and U_t of every component at time t on all nodes.
        let mut uu = vec![vec![0.0; n]; ncomp];
        let mut uut = vec![vec![0.0; n]; ncomp];
        for k in 0..ncomp {
            let comp = &self.comps[k];
            match &ut[k] {
                Some(v) => {
                    uu[k].copy_from_slice(&comp.curr);
                    uut[k].copy_from_slice(v);
                }
                None => {
                    for m in 0..n {
                        let (a, b) = comp.interp(m, t);
                        uu[k][m] = a;
                        uut[k][m] = b;
                    }
                }
            }
        }
        for m in 1..n - 1 {
            let rm = self.r[m];
            for k in 0..ncomp {
                let big = uu[k][m];
                let big_r = (uu[k][m + 1] - uu[k][m - 1]) / (2.0 * dr);
                jet.u[k] = big / rm;
                jet.du[k] = [uut[k][m] / rm, (big_r - big / rm) / rm, 0.0, 0.0];
            }
            self.nl.eval_into(&jet, &mut f);
            for &j in set {
                out[j][m] = rm * f[j];
            }
        }
        out
    }

    fn leapfrog(&mut self, j: usize, src: Option<&[f64]>) {
        let n = self.r.len();
        let comp = &mut self.comps[j];
        let dt2 = comp.dt * comp.dt;
        comp.next[0] = 0.0;
        comp.next[n - 1] = 0.0;
        for m in 1..n - 1 {
            let (q, s) = (comp.q[m], comp.s[m]);
            let mut v = comp.curr[m + 1] + comp.curr[m - 1] - (1.0 - s + q) * comp.prev[m] - 2.0 * q * comp.curr[m];
            if let Some(src) = src {
                v += dt2 * src[m];
            }
            comp.next[m] = v / (1.0 + s + q);
        }
    }

    /// Computes `next` for every component in `set` (their `prev` and
    /// `curr` are already in place).
    fn advance(&mut self, set: &[usize]) {
        let ncomp = self.comps.len();
        if self.nl.is_empty() {
            for &j in set {
                self.leapfrog(j, None);
            }
        } else {
            // predictor
            let mut ut: Vec<Option<Vec<f64>>> = vec![None; ncomp];
            for &j in set {
                let comp = &self.comps[j];
                let v = if let Some(u0) = &comp.ut0 {
                    u0.clone()
                } else if let Some(b) = &comp.before {
                    (0..self.r.len())
                        .map(|m| (3.0 * comp.curr[m] - 4.0 * comp.prev[m] + b[m]) / (2.0 * comp.dt))
                        .collect()
                } else {
                    (0..self.r.len()).map(|m| (comp.curr[m] - comp.prev[m]) / comp.dt).collect()
                };
                ut[j] = Some(v);
            }
            let src = self.sources(set, &ut);
            for &j in set {
                self.leapfrog(j, Some(&src[j]));
            }
            // corrector
            for &j in set {
                let comp = &self.comps[j];
                ut[j] = Some(
                    (0..self.r.len())
                        .map(|m| (comp.next[m] - comp.prev[m]) / (2.0 * comp.dt))
                        .collect(),
                );
            }
            let src = self.sources(set, &ut);
            for &j in set {
                self.leapfrog(j, Some(&src[j]));
            }
        }
        for &j in set {
            self.comps[j].ut0 = None;
            self.comps[j].energy = self.level_energy(j);
        }
    }

    fn level_energy(&self, j: usize) -> f64 {
        let comp = &self.comps[j];
        let n = self.r.len();
        let dr = self.grid.dr;
        let (a, b) = (&comp.curr, &comp.next);
        let mut e = 0.0;
        for m in 0..n {
            let dtu = (b[m] - a[m]) / comp.dt;
            let mut term = dtu * dtu;
            if m + 1 < n {
                term += comp.c * comp.c * (b[m + 1] - b[m]) * (a[m + 1] - a[m]) / (dr * dr);
            }
            let v4 = comp.q[m] / (comp.dt * comp.dt);
            term += v4 * (b[m] + a[m]) * (b[m] + a[m]);
            e += term;
        }
        2.0 * PI * dr * e
    }

    fn max_u(&self) -> f64 {
        let mut best = 0.0f64;
        for comp in &self.comps {
            for (m, &rm) in self.r.iter().enumerate() {
                let v = (comp.next[m] / rm).abs();
                if !v.is_finite() {
                    return f64::INFINITY;
                }
                best = best.max(v).max((comp.curr[m] / rm).abs());
            }
        }
        best
    }
}

impl Stepper for RadialStepper {
    fn step(&mut self) -> Result<StepOutcome> {
        self.g += 1;
        let mut set = Vec::new();
        for (j, comp) in self.comps.iter_mut().enumerate() {
            if self.g % comp.p == 0 {
                let old_prev = std::mem::take(&mut comp.prev);
                comp.before = Some(old_prev);
                comp.prev = std::mem::take(&mut comp.curr);
                comp.curr = std::mem::take(&mut comp.next);
                comp.next = vec![0.0; self.r.len()];
                comp.steps += 1;
                set.push(j);
            }
        }
        self.advance(&set);
        let m = self.max_u();
        if !m.is_finite() || m > BLOWUP_AMPLITUDE {
            return Ok(StepOutcome::BlowUp);
        }
        Ok(StepOutcome::Continue)
    }

    fn time(&self) -> f64 {
        self.g as f64 * self.dt
    }

    fn dt(&self) -> f64 {
        self.dt
    }

    fn snapshot(&self) -> Field {
        let t = self.time();
        let n = self.r.len();
        let mut prev = Vec::new();
        let mut curr = Vec::new();
        let mut next = Vec::new();
        for comp in &self.comps {
            let level = |s: f64| -> Vec<f64> {
                (0..n)
                    .map(|m| {
                        let (u, _) = comp.interp(m, s);
                        u / self.r[m]
                    })
                    .collect()
            };
            if comp.p == 1 {
                prev.push(comp.prev.iter().zip(&self.r).map(|(u, r)| u / r).collect());
                curr.push(comp.curr.iter().zip(&self.r).map(|(u, r)| u / r).collect());
                next.push(comp.next.iter().zip(&self.r).map(|(u, r)| u / r).collect());
            } else {
                prev.push(level(t - self.dt));
                curr.push(level(t));
                next.push(level(t + self.dt));
            }
        }
        Field {
            geometry: Geometry::Radial {
                r_min: self.grid.r_min,
                dr: self.grid.dr,
                n,
                angular_mode: self.grid.angular_mode,
            },
            time: t,
            dt: self.dt,
            speeds: self.speeds.clone(),
            prev,
            curr,
            next,
        }
    }

    fn conserved_energy(&self) -> f64 {
        self.comps.iter().map(|c| c.energy).sum()
    }

    fn max_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for comp in &self.comps {
            for (m, &rm) in self.r.iter().enumerate() {
                best = best.max((comp.curr[m] / rm).abs());
            }
        }
        best
    }
}
