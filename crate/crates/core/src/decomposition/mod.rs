//! Cut-off representation of exterior solutions through free-space ones.
//!
//! With `psi_a` the radial ramp from 0 at `|x| = a` to 1 at `|x| = a + 1`,
//! the exterior solution `K[v0; c]` of the homogeneous problem splits as
//!
//! ```text
//! K = psi_1 K0[psi_2 v0] + K1 + K2 + K3 + K4
//! K1 = (1 - psi_2) L[g1],          g1 = [psi_1, -c^2 Delta] K0[psi_2 v0]
//! K2 = -L0[[psi_2, -c^2 Delta] L[g1]]
//! K3 = (1 - psi_3) K[(1 - psi_2) v0]
//! K4 = -L0[[psi_3, -c^2 Delta] K[(1 - psi_2) v0]]
//! ```
//!
//! and the inhomogeneous `L[f; c]` the same way with `L0[psi_2 f]` in place
//! of `K0[psi_2 v0]`. The assemblers below evaluate every piece with the
//! free-space solvers (Kirchhoff, Duhamel), the images oracles and
//! full-history radial grid solves, then report the residual of the
//! identity at a probe set.

mod cutoff;
mod grid;

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use cutoff::{commutator_cutoff, on_axis, CutProfile, CutSource, CutoffSpec, OracleCommutator};
pub use grid::GridSolve;

use crate::error::{Error, Result};
use crate::exterior::derivs::lattice_jet;
use crate::freefield::{
    k0_solve, l0_solve, RadialDuhamel, RadialOracle, SampledSource, Source, SphereQuadrature, N_DUHAMEL,
};
use crate::model::profile::norm;
use crate::model::{Field, InitialData, Point, Profile};

/// Probe lattice spacing in `r` (and in `c t`); every supported `dr`
/// divides it, so probes are grid nodes at every resolution.
const PROBE_STEP: f64 = 0.04;

#[derive(Debug, Clone)]
pub struct DecompositionSettings {
    pub dr: f64,
    pub t_max: f64,
    pub r_probe_max: f64,
    pub n_probes: usize,
    pub seed: u64,
    pub component: usize,
    pub quad: SphereQuadrature,
    pub n_duhamel: usize,
}

impl Default for DecompositionSettings {
    fn default() -> Self {
        DecompositionSettings {
            dr: 0.01,
            t_max: 5.0,
            r_probe_max: 5.0,
            n_probes: 24,
            seed: 1,
            component: 0,
            quad: SphereQuadrature::default(),
            n_duhamel: N_DUHAMEL,
        }
    }
}

impl DecompositionSettings {
    /// Halves `dr` and doubles both quadratures.
    pub fn refined(&self) -> Self {
        DecompositionSettings {
            dr: 0.5 * self.dr,
            quad: self.quad.doubled(),
            n_duhamel: 2 * self.n_duhamel,
            ..self.clone()
        }
    }

    fn check(&self) -> Result<()> {
        let k = PROBE_STEP / self.dr;
        if !(self.dr > 0.0) || (k - k.round()).abs() > 1e-9 {
            return Err(Error::Config(format!("dr = {} must divide {PROBE_STEP}", self.dr)));
        }
        if !(self.t_max > 0.0 && self.r_probe_max > 1.0 && self.n_probes > 0) {
            return Err(Error::Config("decomposition needs t_max > 0, r_probe_max > 1, probes > 0".into()));
        }
        Ok(())
    }

    /// Probe points `(n, r)`: time level and node radius, on the coarse
    /// probe lattice and reproducible from the seed.
    fn probes(&self, c: f64) -> Vec<(usize, f64)> {
        let dt = self.dr / c;
        let per = (PROBE_STEP / self.dr).round() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let nt = (self.t_max * c / PROBE_STEP).floor() as usize;
        let nr = ((self.r_probe_max - 1.0) / PROBE_STEP).floor() as usize;
        (0..self.n_probes)
            .map(|_| {
                let it = rng.gen_range(nt / 10 + 1..=nt.max(nt / 10 + 1));
                let ir = rng.gen_range(0..=nr);
                let n = it * per;
                debug_assert!((n as f64 * dt - it as f64 * PROBE_STEP / c).abs() < 1e-9);
                (n, 1.0 + ir as f64 * PROBE_STEP)
            })
            .collect()
    }
}

/// One probe of an assembled identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub t: f64,
    pub r: f64,
    /// The exterior solution from its oracle.
    pub lhs: f64,
    /// `psi_1 K0[psi_2 v0]` or `psi_1 L0[psi_2 f]`.
    pub main: f64,
    pub pieces: [f64; 4],
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub kind: &'static str,
    pub dr: f64,
    pub rows: Vec<ProbeRow>,
    pub max_residual: f64,
    /// `max |lhs|` over the probes.
    pub scale: f64,
}

impl DecompositionReport {
    fn new(kind: &'static str, dr: f64, rows: Vec<ProbeRow>) -> Self {
        let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        let scale = rows.iter().map(|r| r.lhs.abs()).fold(0.0, f64::max);
        DecompositionReport {
            kind,
            dr,
            rows,
            max_residual,
            scale,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("probe,t,r,lhs,main,piece1,piece2,piece3,piece4,residual\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(
                s,
                "{i},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.t, r.r, r.lhs, r.main, r.pieces[0], r.pieces[1], r.pieces[2], r.pieces[3], r.residual
            );
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Samples `[psi_a, -c^2 Delta] u` of a grid solution on `[a, a + 1]`
/// (plus a two-node margin of zeros) for `n = 0..=n_max`.
fn sample_commutator(cut: CutoffSpec, g: &GridSolve, n_max: usize) -> Result<SampledSource> {
    let lo = g
        .index_of(cut.a)
        .ok_or_else(|| Error::ProbeOutside(format!("cutoff edge {} is not a grid node", cut.a)))?;
    let hi = g
        .index_of(cut.a + 1.0)
        .ok_or_else(|| Error::ProbeOutside(format!("cutoff edge {} is not a grid node", cut.a + 1.0)))?;
    let (m0, m1) = (lo.saturating_sub(2).max(1), (hi + 2).min(g.n_nodes() - 2));
    let values: Vec<Vec<f64>> = (0..=n_max)
        .map(|n| {
            (m0..=m1)
                .map(|m| cut.commutator_radial(g.c, g.node(m), g.u(n, m), g.u_r(n, m)))
                .collect()
        })
        .collect();
    Ok(SampledSource::new(0.0, g.dt, g.node(m0), g.dr, values))
}

fn outer_radius(s: &DecompositionSettings, c: f64, t: f64) -> f64 {
    s.r_probe_max.max(4.0) + 2.0 * c * t + 2.0
}

/// Residual of the homogeneous identity for component `s.component` of
/// origin-radial data supported outside the unit ball.
pub fn assemble_homogeneous_decomposition(data: &InitialData, c: f64, s: &DecompositionSettings) -> Result<DecompositionReport> {
    s.check()?;
    let comp = data
        .components
        .get(s.component)
        .ok_or_else(|| Error::Config(format!("no component {}", s.component)))?;
    if !data.all_origin_radial() {
        return Err(Error::Config("the decomposition needs origin-centered radial data".into()));
    }
    if !data.is_zero() && data.min_support_radius() <= 1.0 {
        return Err(Error::Config("data must vanish near the obstacle".into()));
    }
    let eps = data.amplitude;
    let phi: Arc<dyn Profile> = Arc::new(comp.phi.clone());
    let psi: Arc<dyn Profile> = Arc::new(comp.psi.clone());
    let (psi1, psi2, psi3) = (CutoffSpec { a: 1.0 }, CutoffSpec { a: 2.0 }, CutoffSpec { a: 3.0 });
    let probes = s.probes(c);
    let n_max = probes.iter().map(|p| p.0).max().unwrap_or(0) + 2;
    let dt = s.dr / c;
    let r_end = outer_radius(s, c, n_max as f64 * dt);

    let phi_out = CutProfile::outer(phi.clone(), 2.0);
    let psi_out = CutProfile::outer(psi.clone(), 2.0);
    let free = RadialOracle::new(0.0, c, eps, Arc::new(phi_out.clone()), Arc::new(psi_out.clone()));
    let g1 = OracleCommutator {
        oracle: free,
        cut: psi1,
        t_max: (n_max + 1) as f64 * dt,
    };
    let ext_g1 = GridSolve::run(1.0, r_end, s.dr, c, n_max, None, Some(&g1));
    let g2 = sample_commutator(psi2, &ext_g1, n_max)?;

    let inner = RadialOracle::new(
        1.0,
        c,
        eps,
        Arc::new(CutProfile::inner(phi.clone(), 2.0)),
        Arc::new(CutProfile::inner(psi.clone(), 2.0)),
    );
    let inner_grid = GridSolve::run(1.0, r_end, s.dr, c, n_max, Some(&inner), None);
    let g4 = sample_commutator(psi3, &inner_grid, n_max)?;
    let full = RadialOracle::new(1.0, c, eps, phi, psi);

    let rows = probes
        .par_iter()
        .map(|&(n, r)| -> Result<ProbeRow> {
            let t = n as f64 * dt;
            let x = on_axis(r);
            let m = ext_g1.index_of(r).ok_or_else(|| Error::ProbeOutside(format!("r = {r}")))?;
            let w1 = psi1.value(r);
            let main = if w1 == 0.0 {
                0.0
            } else {
                w1 * eps * k0_solve(&phi_out, &psi_out, c, t, x, &s.quad)
            };
            let k1 = (1.0 - psi2.value(r)) * ext_g1.u(n, m);
            let k2 = -l0_solve(&g2, c, t, x, &s.quad, s.n_duhamel);
            let k3 = (1.0 - psi3.value(r)) * inner.u(t, r);
            let k4 = -l0_solve(&g4, c, t, x, &s.quad, s.n_duhamel);
            let lhs = full.u(t, r);
            let pieces = [k1, k2, k3, k4];
            let residual = (lhs - main - pieces.iter().sum::<f64>()).abs();
            Ok(ProbeRow {
                t,
                r,
                lhs,
                main,
                pieces,
                residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionReport::new("homogeneous", s.dr, rows))
}

/// Residual of the inhomogeneous identity for an origin-centered radial
/// source that vanishes near the obstacle.
pub fn assemble_inhomogeneous_decomposition(f: Arc<dyn Source>, c: f64, s: &DecompositionSettings) -> Result<DecompositionReport> {
    s.check()?;
    if f.center() != [0.0; 3] {
        return Err(Error::Config("the decomposition needs an origin-centered source".into()));
    }
    if f.space_support().0 <= 1.0 && f.space_support().1 > f.space_support().0 {
        return Err(Error::Config("the source must vanish near the obstacle".into()));
    }
    let (psi1, psi2, psi3) = (CutoffSpec { a: 1.0 }, CutoffSpec { a: 2.0 }, CutoffSpec { a: 3.0 });
    let probes = s.probes(c);
    let n_max = probes.iter().map(|p| p.0).max().unwrap_or(0) + 2;
    let dt = s.dr / c;
    let r_end = outer_radius(s, c, n_max as f64 * dt);

    let f_out = CutSource {
        base: f.clone(),
        cut: psi2,
        inner: false,
    };
    let f_in = CutSource {
        base: f.clone(),
        cut: psi2,
        inner: true,
    };
    let free = GridSolve::run(0.0, r_end, s.dr, c, n_max, None, Some(&f_out));
    let h1 = sample_commutator(psi1, &free, n_max)?;
    let ext_h1 = GridSolve::run(1.0, r_end, s.dr, c, n_max, None, Some(&h1));
    let h2 = sample_commutator(psi2, &ext_h1, n_max)?;
    let ext_in = GridSolve::run(1.0, r_end, s.dr, c, n_max, None, Some(&f_in));
    let h4 = sample_commutator(psi3, &ext_in, n_max)?;

    let rows = probes
        .par_iter()
        .map(|&(n, r)| -> Result<ProbeRow> {
            let t = n as f64 * dt;
            let x = on_axis(r);
            let m = ext_h1.index_of(r).ok_or_else(|| Error::ProbeOutside(format!("r = {r}")))?;
            let w1 = psi1.value(r);
            let main = if w1 == 0.0 {
                0.0
            } else {
                w1 * l0_solve(&f_out, c, t, x, &s.quad, s.n_duhamel)
            };
            let l1 = (1.0 - psi2.value(r)) * ext_h1.u(n, m);
            let l2 = -l0_solve(&h2, c, t, x, &s.quad, s.n_duhamel);
            let w3 = 1.0 - psi3.value(r);
            let l3 = if w3 == 0.0 {
                0.0
            } else {
                w3 * RadialDuhamel::new(1.0, c, &f_in).u(t, r)
            };
            let l4 = -l0_solve(&h4, c, t, x, &s.quad, s.n_duhamel);
            let lhs = RadialDuhamel::new(1.0, c, f.as_ref()).u(t, r);
            let pieces = [l1, l2, l3, l4];
            let residual = (lhs - main - pieces.iter().sum::<f64>()).abs();
            Ok(ProbeRow {
                t,
                r,
                lhs,
                main,
                pieces,
                residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionReport::new("inhomogeneous", s.dr, rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DplusReport {
    pub max_residual: f64,
    /// Largest `|D- D+ U|` or `|r f|` seen, for relative statements.
    pub scale: f64,
    pub points: usize,
}

/// Checks `D- D+ U = r f` (`D+- = d_t +- c d_r`, `U = r u`) on a radial
/// grid solution along the rays `r = r0 + c (t0 - t)` through each
/// `(t0, r0)`. Derivatives are centered differences along the grid
/// diagonals, which are exactly the characteristic directions.
pub fn dplus_identity_check(
    c: f64,
    data: Option<&RadialOracle>,
    f: Option<&dyn Source>,
    rays: &[(f64, f64)],
    dr: f64,
    t_max: f64,
) -> Result<DplusReport> {
    let r_start = data.map_or(1.0, |o| o.r0);
    let dt = dr / c;
    let n_steps = (t_max / dt).round() as usize;
    let r_hi = rays.iter().map(|r| r.1).fold(r_start, f64::max);
    let r_end = r_hi + 2.0 * c * t_max + 2.0;
    let g = GridSolve::run(r_start, r_end, dr, c, n_steps, data, f);
    let big = |n: usize, m: usize| g.levels[n][m];
    let (mut worst, mut scale, mut points) = (0.0f64, 0.0f64, 0usize);
    for &(t0, r0) in rays {
        if !(0.0..=t_max).contains(&t0) || r0 < r_start || r0 > r_hi {
            return Err(Error::RayExits(format!("ray through (t, r) = ({t0}, {r0}) starts off the grid")));
        }
        let n0 = (t0 / dt).round() as usize;
        let m0 = g
            .index_of(r0)
            .ok_or_else(|| Error::RayExits(format!("r0 = {r0} is not a grid node")))?;
        for n in 2..=n_steps.saturating_sub(2) {
            let shift = m0 as i64 + n0 as i64 - n as i64;
            if shift < 2 || shift as usize + 2 >= g.n_nodes() {
                continue;
            }
            let m = shift as usize;
            let q = (big(n + 2, m) - big(n, m - 2) - big(n, m + 2) + big(n - 2, m)) / (4.0 * dt * dt);
            let rf = f.map_or(0.0, |f| g.node(m) * f.radial(n as f64 * dt, g.node(m)));
            worst = worst.max((q - rf).abs());
            scale = scale.max(q.abs()).max(rf.abs());
            points += 1;
        }
    }
    if points == 0 {
        return Err(Error::RayExits("no ray point has a full stencil on the grid".into()));
    }
    Ok(DplusReport {
        max_residual: worst,
        scale,
        points,
    })
}

/// The same identity on a Cartesian snapshot, where it carries the
/// angular term: `D- D+ (r u) = r f + (c^2 / r) sum Omega_ij^2 u`.
/// Jets come from the lattice differences, so the residual reflects the
/// scheme's truncation error.
pub fn dplus_identity_lattice(
    field: &Field,
    comp: usize,
    c: f64,
    f: &dyn Fn(f64, Point) -> f64,
    sites: &[[usize; 3]],
) -> Result<DplusReport> {
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for &site in sites {
        let jet = lattice_jet(field, comp, site)?;
        let r = norm(jet.x);
        if r == 0.0 {
            continue;
        }
        let w = [jet.x[0] / r, jet.x[1] / r, jet.x[2] / r];
        let mut ur = 0.0;
        let mut urr = 0.0;
        for i in 0..3 {
            ur += w[i] * jet.d1[i + 1];
            for j in 0..3 {
                urr += w[i] * w[j] * jet.d2[i + 1][j + 1];
            }
        }
        let lhs = r * jet.d2[0][0] - c * c * (r * urr + 2.0 * ur);
        let angular: f64 = (4..7).map(|a| jet.z2(a, a)).sum();
        let rhs = r * f(field.time, jet.x) + c * c / r * angular;
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs());
    }
    Ok(DplusReport {
        max_residual: worst,
        scale,
        points: sites.len(),
    })
}
