//! Exact radial solutions through `U = r u`.
//!
//! A radial solution of the 3D wave equation outside the ball of radius
//! `r0` with Dirichlet data (or in free space, `r0 = 0`) is `U / r` where
//! `U` solves the 1D wave equation on `[r0, inf)` with `U(r0) = 0`. Odd
//! reflection about `r0` turns that into a whole-line problem solved by
//! d'Alembert's formula (the method of images).

use std::sync::Arc;

use super::quadrature::integrate;
use super::Source;
use crate::model::Profile;

/// Widest Gauss panel used by the oracles' 1D integrals.
const PANEL: f64 = 0.05;

/// Images oracle for radial Cauchy data `(amplitude * phi, amplitude * psi)`.
#[derive(Debug, Clone)]
pub struct RadialOracle {
    pub r0: f64,
    pub c: f64,
    pub amplitude: f64,
    pub phi: Arc<dyn Profile>,
    pub psi: Arc<dyn Profile>,
    breaks: Vec<f64>,
}

impl RadialOracle {
    pub fn new(r0: f64, c: f64, amplitude: f64, phi: Arc<dyn Profile>, psi: Arc<dyn Profile>) -> Self {
        let mut breaks = phi.breakpoints();
        breaks.extend(psi.breakpoints());
        breaks.push(r0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        RadialOracle {
            r0,
            c,
            amplitude,
            phi,
            psi,
            breaks,
        }
    }

    /// `Phi(y) = y phi(y)`, extended oddly about `r0`.
    fn big_phi(&self, y: f64) -> f64 {
        if y >= self.r0 {
            y * self.phi.radial(y)
        } else {
            let z = 2.0 * self.r0 - y;
            -z * self.phi.radial(z)
        }
    }

    fn big_phi_prime(&self, y: f64) -> f64 {
        let z = if y >= self.r0 { y } else { 2.0 * self.r0 - y };
        self.phi.radial(z) + z * self.phi.radial_derivative(z)
    }

    fn big_psi(&self, y: f64) -> f64 {
        if y >= self.r0 {
            y * self.psi.radial(y)
        } else {
            let z = 2.0 * self.r0 - y;
            -z * self.psi.radial(z)
        }
    }

    /// `G(y) = int_{r0}^{y} Psi`, even about `r0`.
    fn big_g(&self, y: f64) -> f64 {
        let z = if y >= self.r0 { y } else { 2.0 * self.r0 - y };
        let (a, b) = self.psi.support();
        let lo = a.max(self.r0);
        let hi = z.min(b);
        if hi <= lo {
            return 0.0;
        }
        integrate(|s| s * self.psi.radial(s), lo, hi, &self.breaks, PANEL)
    }

    /// `U(t, r) = r u(t, r)`.
    pub fn big_u(&self, t: f64, r: f64) -> f64 {
        let ct = self.c * t;
        let a = 0.5 * (self.big_phi(r - ct) + self.big_phi(r + ct));
        let b = (self.big_g(r + ct) - self.big_g(r - ct)) / (2.0 * self.c);
        self.amplitude * (a + b)
    }

    /// `(U, U_t, U_r)`.
    pub fn big_u_jet(&self, t: f64, r: f64) -> (f64, f64, f64) {
        let c = self.c;
        let (m, p) = (r - c * t, r + c * t);
        let u = self.big_u(t, r);
        let ut = 0.5 * c * (self.big_phi_prime(p) - self.big_phi_prime(m)) + 0.5 * (self.big_psi(p) + self.big_psi(m));
        let ur = 0.5 * (self.big_phi_prime(m) + self.big_phi_prime(p)) + (self.big_psi(p) - self.big_psi(m)) / (2.0 * c);
        (u, self.amplitude * ut, self.amplitude * ur)
    }

    /// `u(t, r)`; at `r = 0` (free space only) the limit `U_r(t, 0)`.
    pub fn u(&self, t: f64, r: f64) -> f64 {
        if r == 0.0 {
            return self.big_u_jet(t, 0.0).2;
        }
        self.big_u(t, r) / r
    }

    /// `(u, u_t, u_r)` for `r > 0`.
    pub fn u_jet(&self, t: f64, r: f64) -> (f64, f64, f64) {
        let (u, ut, ur) = self.big_u_jet(t, r);
        (u / r, ut / r, ur / r - u / (r * r))
    }
}

/// Duhamel oracle for a radial source `f(t, |x|)` with zero data:
/// `U(t, r) = (1 / 2c) int_0^t int_{r - c(t-s)}^{r + c(t-s)} F(s, y) dy ds`,
/// `F = y f` extended oddly about `r0`.
pub struct RadialDuhamel<'a> {
    pub r0: f64,
    pub c: f64,
    pub source: &'a dyn Source,
    /// Gauss panels per unit time in `s`.
    pub panels_per_unit: f64,
}

impl<'a> RadialDuhamel<'a> {
    pub fn new(r0: f64, c: f64, source: &'a dyn Source) -> Self {
        RadialDuhamel {
            r0,
            c,
            source,
            panels_per_unit: 8.0,
        }
    }

    fn big_f(&self, s: f64, y: f64) -> f64 {
        if y >= self.r0 {
            y * self.source.radial(s, y)
        } else {
            let z = 2.0 * self.r0 - y;
            -z * self.source.radial(s, z)
        }
    }

    fn y_breaks(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.source.space_breaks();
        let mirrored: Vec<f64> = b.iter().map(|&p| 2.0 * self.r0 - p).collect();
        b.extend(mirrored);
        b.push(self.r0);
        b
    }

    pub fn big_u(&self, t: f64, r: f64) -> f64 {
        let (t0, t1) = self.source.time_support();
        let (lo, hi) = (t0.max(0.0), t1.min(t));
        if hi <= lo {
            return 0.0;
        }
        let ybreaks = self.y_breaks();
        let (a, b) = self.source.space_support();
        // The inner integral only sees the support and its mirror image.
        let (ya, yb) = ((2.0 * self.r0 - b).min(a), b.max(2.0 * self.r0 - a));
        let inner = |s: f64| {
            let h = self.c * (t - s);
            let (ylo, yhi) = ((r - h).max(ya), (r + h).min(yb));
            if yhi <= ylo {
                return 0.0;
            }
            integrate(|y| self.big_f(s, y), ylo, yhi, &ybreaks, PANEL)
        };
        // Breaks in s where the integration window crosses a y-break.
        let mut sbreaks = self.source.time_breaks();
        for &yb in &ybreaks {
            let d = (yb - r).abs() / self.c;
            sbreaks.push(t - d);
        }
        let panel = 1.0 / self.panels_per_unit;
        integrate(inner, lo, hi, &sbreaks, panel) / (2.0 * self.c)
    }

    pub fn u(&self, t: f64, r: f64) -> f64 {
        self.big_u(t, r) / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freefield::SeparableSource;
    use crate::model::profile::Bump;

    fn bump(inner: f64, outer: f64) -> Arc<dyn Profile> {
        Arc::new(Bump {
            center: [0.0; 3],
            inner,
            outer,
            peak: 1.0,
        })
    }

    #[test]
    fn initial_values_reproduced() {
        let o = RadialOracle::new(1.0, 2.0, 0.5, bump(2.0, 3.0), bump(2.2, 2.9));
        for r in [1.5, 2.3, 2.5, 2.95] {
            assert!((o.u(0.0, r) - 0.5 * bump(2.0, 3.0).radial(r)).abs() < 1e-15);
            let (_, ut, _) = o.u_jet(0.0, r);
            assert!((ut - 0.5 * bump(2.2, 2.9).radial(r)).abs() < 1e-14);
        }
    }

    #[test]
    fn dirichlet_at_obstacle() {
        let o = RadialOracle::new(1.0, 1.0, 1.0, bump(2.0, 3.0), bump(2.0, 3.0));
        for t in [0.5, 1.3, 2.0, 3.7] {
            assert!(o.big_u(t, 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn satisfies_wave_equation() {
        let o = RadialOracle::new(1.0, 1.5, 1.0, bump(2.0, 3.0), bump(2.1, 2.8));
        let h = 1e-3;
        for (t, r) in [(0.7, 2.6), (1.1, 1.9), (2.0, 4.5)] {
            let utt = (o.u(t + h, r) - 2.0 * o.u(t, r) + o.u(t - h, r)) / (h * h);
            let f = |r: f64| o.u(t, r);
            let urr = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            let ur = (f(r + h) - f(r - h)) / (2.0 * h);
            let res = utt - 2.25 * (urr + 2.0 * ur / r);
            assert!(res.abs() < 1e-4, "residual {res}");
        }
    }

    #[test]
    fn duhamel_matches_finite_difference_equation() {
        let src = SeparableSource::radial_bump(0.0, 1.0, 2.0, 3.0, 1.0);
        let d = RadialDuhamel::new(1.0, 1.0, &src);
        let h = 1e-2;
        let (t, r) = (1.2, 2.4);
        let f = |t: f64, r: f64| d.u(t, r);
        let utt = (f(t + h, r) - 2.0 * f(t, r) + f(t - h, r)) / (h * h);
        let urr = (f(t, r + h) - 2.0 * f(t, r) + f(t, r - h)) / (h * h);
        let ur = (f(t, r + h) - f(t, r - h)) / (2.0 * h);
        let res = utt - (urr + 2.0 * ur / r) - src.radial(t, r);
        assert!(res.abs() < 1e-3, "residual {res}");
    }
}
