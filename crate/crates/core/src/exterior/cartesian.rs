//! Second-order leapfrog on the 7-point Laplacian in a cube with a
//! staircase ball obstacle. Nodes inside the closed ball and on the cube
//! faces are held at zero; every other node is updated.

use rayon::prelude::*;

use super::{StepOutcome, Stepper};
use crate::error::{Error, Result};
use crate::model::{CartesianGrid, Field, Geometry, InitialData, Profile, WaveSystem};
use crate::nonlinearity::{CompiledNonlinearity, Jet};
use crate::tolerances::BLOWUP_AMPLITUDE;

#[derive(Debug, Clone)]
struct Levels {
    before: Option<Vec<f64>>,
    prev: Vec<f64>,
    curr: Vec<f64>,
    next: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CartesianStepper {
    grid: CartesianGrid,
    n: usize,
    dt: f64,
    g: usize,
    active: Vec<bool>,
    /// `sigma dt / 2` per node.
    damping: Vec<f64>,
    speeds: Vec<f64>,
    nl: CompiledNonlinearity,
    comps: Vec<Levels>,
    ut0: Option<Vec<Vec<f64>>>,
    energy: f64,
}

impl CartesianStepper {
    pub fn new(sys: &WaveSystem, data: &InitialData, grid: &CartesianGrid) -> Result<Self> {
        let n = grid.n_side();
        if n < 5 {
            return Err(Error::Invalid(vec!["cartesian grid has fewer than 5 nodes per side".into()]));
        }
        let len = n * n * n;
        let x = |i: usize| grid.coord(i);
        let mut active = vec![false; len];
        let mut damping = vec![0.0; len];
        let c_max = sys.c_max();
        let r2 = grid.obstacle_radius * grid.obstacle_radius;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let idx = (i * n + j) * n + k;
                    let face = i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
                    let rr = x(i) * x(i) + x(j) * x(j) + x(k) * x(k);
                    active[idx] = !face && rr > r2;
                    if let Some(w) = grid.sponge_width.filter(|w| *w > 0.0) {
                        let d = [i, j, k]
                            .iter()
                            .map(|&a| grid.half_width - x(a).abs())
                            .fold(f64::INFINITY, f64::min);
                        if d < w {
                            let q = (w - d) / w;
                            damping[idx] = 0.5 * grid.dt * 4.0 * c_max / w * q * q;
                        }
                    }
                }
            }
        }

        let eps = data.amplitude;
        let ncomp = sys.n_components();
        let point = |idx: usize| {
            let k = idx % n;
            let j = (idx / n) % n;
            let i = idx / (n * n);
            [x(i), x(j), x(k)]
        };
        let mut u0 = Vec::with_capacity(ncomp);
        let mut ut0 = Vec::with_capacity(ncomp);
        for comp in &data.components {
            let a: Vec<f64> = (0..len)
                .map(|idx| if active[idx] { eps * comp.phi.value(point(idx)) } else { 0.0 })
                .collect();
            let b: Vec<f64> = (0..len)
                .map(|idx| if active[idx] { eps * comp.psi.value(point(idx)) } else { 0.0 })
                .collect();
            u0.push(a);
            ut0.push(b);
        }
        let nl = CompiledNonlinearity::new(sys);
        let mut f0 = vec![vec![0.0; len]; ncomp];
        if !nl.is_empty() {
            let mut jet = Jet::zero(ncomp);
            let mut out = vec![0.0; ncomp];
            for idx in (0..len).filter(|&i| active[i]) {
                let p = point(idx);
                for (c, comp) in data.components.iter().enumerate() {
                    let gr = comp.phi.gradient(p);
                    jet.u[c] = u0[c][idx];
                    jet.du[c] = [ut0[c][idx], eps * gr[0], eps * gr[1], eps * gr[2]];
                }
                nl.eval_into(&jet, &mut out);
                for c in 0..ncomp {
                    f0[c][idx] = out[c];
                }
            }
        }

        let dt = grid.dt;
        let inv = 1.0 / (grid.dx * grid.dx);
        let mut comps = Vec::with_capacity(ncomp);
        for c in 0..ncomp {
            let c2 = sys.speeds[c] * sys.speeds[c];
            let u = &u0[c];
            let mut prev = vec![0.0; len];
            for idx in (0..len).filter(|&i| active[i]) {
                let lap = (u[idx + 1] + u[idx - 1] + u[idx + n] + u[idx - n] + u[idx + n * n] + u[idx - n * n]
                    - 6.0 * u[idx])
                    * inv;
                prev[idx] = u[idx] - dt * ut0[c][idx] + 0.5 * dt * dt * (c2 * lap + f0[c][idx]);
            }
            comps.push(Levels {
                before: None,
                prev,
                curr: u0[c].clone(),
                next: vec![0.0; len],
            });
        }
        let mut st = CartesianStepper {
            grid: grid.clone(),
            n,
            dt,
            g: 0,
            active,
            damping,
            speeds: sys.speeds.clone(),
            nl,
            comps,
            ut0: Some(ut0),
            energy: 0.0,
        };
        st.advance();
        Ok(st)
    }

    /// `dt^2 F` at every node (component-major), with `u_t` per component
    /// supplied in `ut`.
    fn sources(&self, ut: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = self.n;
        let ncomp = self.comps.len();
        let h2 = 0.5 / self.grid.dx;
        let dt2 = self.dt * self.dt;
        let slab = n * n;
        let mut flat = vec![0.0; slab * n * ncomp];
        flat.par_chunks_mut(slab * ncomp).enumerate().for_each(|(i, chunk)| {
            let mut jet = Jet::zero(ncomp);
            let mut out = vec![0.0; ncomp];
            for jk in 0..slab {
                let idx = i * slab + jk;
                if !self.active[idx] {
                    continue;
                }
                for c in 0..ncomp {
                    let u = &self.comps[c].curr;
                    jet.u[c] = u[idx];
                    jet.du[c] = [
                        ut[c][idx],
                        (u[idx + slab] - u[idx - slab]) * h2,
                        (u[idx + n] - u[idx - n]) * h2,
                        (u[idx + 1] - u[idx - 1]) * h2,
                    ];
                }
                self.nl.eval_into(&jet, &mut out);
                for c in 0..ncomp {
                    chunk[jk * ncomp + c] = dt2 * out[c];
                }
            }
        });
        let mut src = vec![vec![0.0; slab * n]; ncomp];
        for (idx, node) in flat.chunks(ncomp).enumerate() {
            for c in 0..ncomp {
                src[c][idx] = node[c];
            }
        }
        src
    }

    fn leapfrog(&mut self, c: usize, src: Option<&[f64]>) {
        let n = self.n;
        let slab = n * n;
        let lam2 = (self.speeds[c] * self.dt / self.grid.dx).powi(2);
        let active = &self.active;
        let damping = &self.damping;
        let lv = &mut self.comps[c];
        let (prev, curr) = (&lv.prev, &lv.curr);
        lv.next.par_chunks_mut(slab).enumerate().for_each(|(i, out)| {
            for jk in 0..slab {
                let idx = i * slab + jk;
                if !active[idx] {
                    out[jk] = 0.0;
                    continue;
                }
                let u = curr;
                let lap = u[idx + 1] + u[idx - 1] + u[idx + n] + u[idx - n] + u[idx + slab] + u[idx - slab]
                    - 6.0 * u[idx];
                let s = damping[idx];
                let mut v = 2.0 * u[idx] - (1.0 - s) * prev[idx] + lam2 * lap;
                if let Some(src) = src {
                    v += src[idx];
                }
                out[jk] = v / (1.0 + s);
            }
        });
    }

    fn advance(&mut self) {
        let ncomp = self.comps.len();
        if self.nl.is_empty() {
            for c in 0..ncomp {
                self.leapfrog(c, None);
            }
        } else {
            let ut: Vec<Vec<f64>> = match self.ut0.take() {
                Some(v) => v,
                None => self
                    .comps
                    .iter()
                    .map(|lv| {
                        let b = lv.before.as_ref().unwrap_or(&lv.prev);
                        let w = if lv.before.is_some() { 1.0 } else { 0.0 };
                        lv.curr
                            .iter()
                            .zip(&lv.prev)
                            .zip(b)
                            .map(|((&c, &p), &bb)| {
                                if w == 1.0 {
                                    (3.0 * c - 4.0 * p + bb) / (2.0 * self.dt)
                                } else {
                                    (c - p) / self.dt
                                }
                            })
                            .collect()
                    })
                    .collect(),
            };
            let src = self.sources(&ut);
            for c in 0..ncomp {
                self.leapfrog(c, Some(&src[c]));
            }
            let ut: Vec<Vec<f64>> = self
                .comps
                .iter()
                .map(|lv| lv.next.iter().zip(&lv.prev).map(|(a, b)| (a - b) / (2.0 * self.dt)).collect())
                .collect();
            let src = self.sources(&ut);
            for c in 0..ncomp {
                self.leapfrog(c, Some(&src[c]));
            }
        }
        self.ut0 = None;
        self.energy = self.level_energy();
    }

    /// `1/2 dx^3 sum [ ((u^{n+1} - u^n)/dt)^2 + c^2 D+u^{n+1} . D+u^n ]`
    /// over nodes and lattice edges, summed slab by slab in fixed order.
    fn level_energy(&self) -> f64 {
        let n = self.n;
        let slab = n * n;
        let dx = self.grid.dx;
        let mut total = 0.0;
        for (c, lv) in self.comps.iter().enumerate() {
            let c2 = self.speeds[c] * self.speeds[c] / (dx * dx);
            let (a, b) = (&lv.curr, &lv.next);
            let parts: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut e = 0.0;
                    for j in 0..n {
                        for k in 0..n {
                            let idx = i * slab + j * n + k;
                            let d = (b[idx] - a[idx]) / self.dt;
                            e += d * d;
                            for (step, ok) in [(slab, i + 1 < n), (n, j + 1 < n), (1, k + 1 < n)] {
                                if ok {
                                    e += c2 * (b[idx + step] - b[idx]) * (a[idx + step] - a[idx]);
                                }
                            }
                        }
                    }
                    e
                })
                .collect();
            total += parts.iter().sum::<f64>();
        }
        0.5 * dx * dx * dx * total
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }
}

impl Stepper for CartesianStepper {
    fn step(&mut self) -> Result<StepOutcome> {
        self.g += 1;
        for lv in &mut self.comps {
            let old = std::mem::take(&mut lv.prev);
            lv.before = Some(old);
            lv.prev = std::mem::take(&mut lv.curr);
            lv.curr = std::mem::take(&mut lv.next);
            lv.next = vec![0.0; lv.curr.len()];
        }
        self.advance();
        let mut m = 0.0f64;
        for lv in &self.comps {
            for &v in &lv.next {
                if !v.is_finite() {
                    return Ok(StepOutcome::BlowUp);
                }
                m = m.max(v.abs());
            }
        }
        if m > BLOWUP_AMPLITUDE {
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
        Field {
            geometry: Geometry::Cartesian {
                half_width: self.grid.half_width,
                dx: self.grid.dx,
                n: self.n,
            },
            time: self.time(),
            dt: self.dt,
            speeds: self.speeds.clone(),
            prev: self.comps.iter().map(|l| l.prev.clone()).collect(),
            curr: self.comps.iter().map(|l| l.curr.clone()).collect(),
            next: self.comps.iter().map(|l| l.next.clone()).collect(),
        }
    }

    fn conserved_energy(&self) -> f64 {
        self.energy
    }

    fn max_abs(&self) -> f64 {
        self.comps.iter().flat_map(|l| l.curr.iter()).fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::profile::{Bump, Superposition};
    use crate::model::{ComponentData, QuadTerm};
    use std::sync::Arc;

    fn setup(eps: f64, half: f64, dx: f64) -> (WaveSystem, InitialData, CartesianGrid) {
        let phi: Arc<dyn Profile> = Arc::new(Bump {
            center: [0.0; 3],
            inner: 1.5,
            outer: 2.5,
            peak: 1.0,
        });
        let data = InitialData {
            amplitude: eps,
            components: vec![ComponentData {
                phi: Superposition { parts: vec![phi] },
                psi: Superposition::default(),
            }],
            support_inner_radius: 1.5,
        };
        let grid = CartesianGrid {
            half_width: half,
            dx,
            obstacle_radius: 1.0,
            dt: 0.5 * dx,
            t_max: 1.0,
            sponge_width: None,
        };
        (WaveSystem::linear(vec![1.0]), data, grid)
    }

    #[test]
    fn leapfrog_energy_is_conserved() {
        let (sys, data, grid) = setup(1.0, 4.0, 0.2);
        let mut st = CartesianStepper::new(&sys, &data, &grid).unwrap();
        let e0 = st.conserved_energy();
        assert!(e0 > 0.0);
        for _ in 0..60 {
            st.step().unwrap();
        }
        assert!(((st.conserved_energy() - e0) / e0).abs() < 1e-11);
    }

    #[test]
    fn obstacle_and_faces_stay_zero() {
        let (sys, data, grid) = setup(1.0, 4.0, 0.25);
        let mut st = CartesianStepper::new(&sys, &data, &grid).unwrap();
        for _ in 0..20 {
            st.step().unwrap();
        }
        let f = st.snapshot();
        let n = st.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = [grid.coord(i), grid.coord(j), grid.coord(k)];
                    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                    if r <= 1.0 || i == 0 || k == n - 1 {
                        assert_eq!(f.curr[0][(i * n + j) * n + k], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn runs_are_deterministic_under_threads() {
        let (mut sys, data, grid) = setup(0.5, 3.0, 0.25);
        sys.nonlinearity.general_quadratic = vec![QuadTerm::new(0, 0, 0, 0, 0, 1.0)];
        let run = || {
            let mut st = CartesianStepper::new(&sys, &data, &grid).unwrap();
            for _ in 0..10 {
                st.step().unwrap();
            }
            (st.snapshot().curr, st.conserved_energy())
        };
        let a = run();
        let b = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(run);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }
}
