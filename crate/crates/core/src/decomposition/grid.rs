//! Full-history radial leapfrog on a `(t, r)` lattice with `c dt = dr`.
//!
//! With that step the characteristic diamond through `(t_n +- dt, r_m)`
//! and `(t_n, r_m +- dr)` gives the exact relation
//! `U^{n+1}_m + U^{n-1}_m - U^n_{m+1} - U^n_{m-1} = (1 / 2c) int_D r f`,
//! so the only error is the quadrature of the source over each diamond.

use crate::freefield::{gauss_legendre, RadialOracle, Source};

/// Gauss points per characteristic direction of a diamond.
const DIAMOND_POINTS: usize = 3;

/// Stores every level `U^n_m = r_m u(t_n, r_m)` of a radial solution on
/// `r_m = r_start + m dr`, `t_n = n dt`. `r_start = 0` is free space
/// (`U(0) = 0` is the regularity condition), `r_start = 1` the exterior
/// problem with Dirichlet data.
#[derive(Debug, Clone)]
pub struct GridSolve {
    pub r_start: f64,
    pub dr: f64,
    pub dt: f64,
    pub c: f64,
    pub levels: Vec<Vec<f64>>,
}

impl GridSolve {
    /// Solves with Cauchy data from `init` (or zero) and the source `src`,
    /// which must vanish for `t < 0`. The outer end is held at zero; keep
    /// it beyond the domain of dependence of the nodes you read.
    pub fn run(
        r_start: f64,
        r_end: f64,
        dr: f64,
        c: f64,
        n_steps: usize,
        init: Option<&RadialOracle>,
        src: Option<&dyn Source>,
    ) -> Self {
        let dt = dr / c;
        let m_len = ((r_end - r_start) / dr).round() as usize + 1;
        let r = |m: usize| r_start + m as f64 * dr;
        let (gx, gw) = gauss_legendre(DIAMOND_POINTS);
        let (ts, rs) = match src {
            Some(f) => (f.time_support(), f.space_support()),
            None => ((0.0, -1.0), (0.0, -1.0)),
        };
        // (1 / 2c) int_D r f, in characteristic coordinates p = rho + c tau,
        // q = rho - c tau over [-dr, dr]^2 (Jacobian 1 / 2c).
        let diamond = |n: usize, m: usize| -> f64 {
            let Some(f) = src else { return 0.0 };
            let (t, x) = (n as f64 * dt, r(m));
            if t + dt < ts.0 || t - dt > ts.1 || x + dr < rs.0 || x - dr > rs.1 {
                return 0.0;
            }
            let mut acc = 0.0;
            for (a, wa) in gx.iter().zip(&gw) {
                for (b, wb) in gx.iter().zip(&gw) {
                    let (p, q) = (a * dr, b * dr);
                    let rho = 0.5 * (p + q);
                    let tau = 0.5 * (p - q) / c;
                    let y = x + rho;
                    acc += wa * wb * y * f.radial(t + tau, y);
                }
            }
            acc * dr * dr / (4.0 * c * c)
        };
        let mut u0 = vec![0.0; m_len];
        let mut um = vec![0.0; m_len];
        if let Some(o) = init {
            for m in 1..m_len - 1 {
                u0[m] = o.big_u(0.0, r(m));
                um[m] = o.big_u(-dt, r(m));
            }
        }
        let mut levels = Vec::with_capacity(n_steps + 1);
        levels.push(u0);
        let mut prev = um;
        for n in 0..n_steps {
            let curr = &levels[n];
            let mut next = vec![0.0; m_len];
            for m in 1..m_len - 1 {
                next[m] = curr[m + 1] + curr[m - 1] - prev[m] + diamond(n, m);
            }
            prev = levels[n].clone();
            levels.push(next);
        }
        GridSolve {
            r_start,
            dr,
            dt,
            c,
            levels,
        }
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.levels[0].len()
    }

    pub fn node(&self, m: usize) -> f64 {
        self.r_start + m as f64 * self.dr
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    /// Index of the node at `r`, if `r` is (to rounding) a node.
    pub fn index_of(&self, r: f64) -> Option<usize> {
        let q = (r - self.r_start) / self.dr;
        let m = q.round();
        if (q - m).abs() > 1e-6 || m < 0.0 || m as usize >= self.n_nodes() {
            None
        } else {
            Some(m as usize)
        }
    }

    /// `u = U / r` at node `(n, m)`, `r > 0`.
    pub fn u(&self, n: usize, m: usize) -> f64 {
        self.levels[n][m] / self.node(m)
    }

    /// Centered `du/dr` at an interior node, fourth order where the
    /// stencil fits and second order next to the ends.
    pub fn u_r(&self, n: usize, m: usize) -> f64 {
        if m >= 2 && m + 2 < self.n_nodes() {
            (-self.u(n, m + 2) + 8.0 * self.u(n, m + 1) - 8.0 * self.u(n, m - 1) + self.u(n, m - 2)) / (12.0 * self.dr)
        } else {
            (self.u(n, m + 1) - self.u(n, m - 1)) / (2.0 * self.dr)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::profile::{Bump, Superposition};
    use crate::model::Profile;
    use std::sync::Arc;

    #[test]
    fn homogeneous_grid_is_exact() {
        let phi: Arc<dyn Profile> = Arc::new(Bump {
            center: [0.0; 3],
            inner: 2.0,
            outer: 3.0,
            peak: 1.0,
        });
        let o = RadialOracle::new(1.0, 2.0, 1.0, phi, Arc::new(Superposition::default()));
        let g = GridSolve::run(1.0, 10.0, 0.02, 2.0, 200, Some(&o), None);
        for n in [50, 200] {
            for m in (0..g.n_nodes()).step_by(13) {
                assert!((g.levels[n][m] - o.big_u(g.time(n), g.node(m))).abs() < 1e-12);
            }
        }
        assert_eq!(g.index_of(1.5), Some(25));
        assert_eq!(g.index_of(1.505), None);
    }

    #[test]
    fn diamond_rule_matches_duhamel() {
        use crate::freefield::{RadialDuhamel, SeparableSource};
        let f = SeparableSource::radial_bump(0.0, 1.0, 2.0, 3.0, 1.0);
        let exact = RadialDuhamel::new(1.0, 1.0, &f).big_u(1.6, 2.6);
        for dr in [0.04, 0.02] {
            let g = GridSolve::run(1.0, 6.0, dr, 1.0, (1.6 / dr).round() as usize, None, Some(&f));
            let m = g.index_of(2.6).unwrap();
            let err = (g.levels[g.n_levels() - 1][m] - exact).abs();
            assert!(err < 1e-9, "dr = {dr}: {err}");
        }
    }
}
