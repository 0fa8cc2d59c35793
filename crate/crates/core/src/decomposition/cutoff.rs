//! Radial cutoffs `psi_a` and the commutator `[psi_a, -Delta]`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::freefield::{RadialOracle, Source};
use crate::model::profile::norm;
use crate::model::{Point, Profile};
use crate::weights::jet::PointJet;

/// `psi_a(x) = S(|x| - a)` with `S` the degree-9 smoothstep
/// `s^5 (126 - 420 s + 540 s^2 - 315 s^3 + 70 s^4)`: zero for `|x| <= a`,
/// one for `|x| >= a + 1`, and C^4 across both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub a: f64,
}

impl CutoffSpec {
    pub fn new(a: f64) -> Result<Self> {
        if !(a >= 1.0 && a.is_finite()) {
            return Err(Error::Config(format!("cutoff radius a = {a} must be >= 1")));
        }
        Ok(CutoffSpec { a })
    }

    /// `(S, S', S'')` at `r`.
    fn ramp(&self, r: f64) -> (f64, f64, f64) {
        let s = r - self.a;
        if s <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        if s >= 1.0 {
            return (1.0, 0.0, 0.0);
        }
        let v = s.powi(5) * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + s * 70.0))));
        let q = s * (1.0 - s);
        let d1 = 630.0 * q.powi(4);
        let d2 = 2520.0 * q.powi(3) * (1.0 - 2.0 * s);
        (v, d1, d2)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.ramp(r).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.ramp(r).1
    }

    pub fn second_derivative(&self, r: f64) -> f64 {
        self.ramp(r).2
    }

    /// `Delta psi_a` at radius `r > 0`.
    pub fn laplacian(&self, r: f64) -> f64 {
        let (_, d1, d2) = self.ramp(r);
        d2 + 2.0 * d1 / r
    }

    /// `[psi_a, -c^2 Delta] u` for a radial `u` given by `(u, u_r)` at `r`.
    pub fn commutator_radial(&self, c: f64, r: f64, u: f64, u_r: f64) -> f64 {
        let (_, d1, d2) = self.ramp(r);
        if d1 == 0.0 && d2 == 0.0 {
            return 0.0;
        }
        c * c * (u * (d2 + 2.0 * d1 / r) + 2.0 * u_r * d1)
    }
}

/// `[psi_a, -Delta] u = u Delta psi_a + 2 grad u . grad psi_a` at the jet's point.
pub fn commutator_cutoff(jet: &PointJet, a: f64) -> f64 {
    let cut = CutoffSpec { a };
    let r = norm(jet.x);
    let (_, d1, d2) = cut.ramp(r);
    if d1 == 0.0 && d2 == 0.0 {
        return 0.0;
    }
    let radial_grad = (jet.x[0] * jet.d1[1] + jet.x[1] * jet.d1[2] + jet.x[2] * jet.d1[3]) / r;
    jet.u * (d2 + 2.0 * d1 / r) + 2.0 * radial_grad * d1
}

/// `psi_a p` (outer part) or `(1 - psi_a) p` (inner part) of an
/// origin-centered profile.
#[derive(Debug, Clone)]
pub struct CutProfile {
    pub base: Arc<dyn Profile>,
    pub cut: CutoffSpec,
    pub inner: bool,
}

impl CutProfile {
    pub fn outer(base: Arc<dyn Profile>, a: f64) -> Self {
        CutProfile {
            base,
            cut: CutoffSpec { a },
            inner: false,
        }
    }

    pub fn inner(base: Arc<dyn Profile>, a: f64) -> Self {
        CutProfile {
            base,
            cut: CutoffSpec { a },
            inner: true,
        }
    }

    fn weight(&self, r: f64) -> (f64, f64) {
        let (v, d, _) = self.cut.ramp(r);
        if self.inner {
            (1.0 - v, -d)
        } else {
            (v, d)
        }
    }
}

impl Profile for CutProfile {
    fn as_dyn(&self) -> &dyn Profile {
        self
    }

    fn kind(&self) -> &'static str {
        "cut"
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        if self.inner {
            (lo, hi.min(self.cut.a + 1.0))
        } else {
            (lo.max(self.cut.a), hi)
        }
    }

    fn radial(&self, rho: f64) -> f64 {
        let (w, _) = self.weight(rho);
        if w == 0.0 {
            0.0
        } else {
            w * self.base.radial(rho)
        }
    }

    fn radial_derivative(&self, rho: f64) -> f64 {
        let (w, dw) = self.weight(rho);
        dw * self.base.radial(rho) + w * self.base.radial_derivative(rho)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.base.breakpoints();
        b.extend([self.cut.a, self.cut.a + 1.0]);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// `psi_a g` or `(1 - psi_a) g` of an origin-centered source.
#[derive(Clone)]
pub struct CutSource {
    pub base: Arc<dyn Source>,
    pub cut: CutoffSpec,
    pub inner: bool,
}

impl Source for CutSource {
    fn radial(&self, t: f64, rho: f64) -> f64 {
        let v = self.cut.value(rho);
        let w = if self.inner { 1.0 - v } else { v };
        if w == 0.0 {
            0.0
        } else {
            w * self.base.radial(t, rho)
        }
    }

    fn time_support(&self) -> (f64, f64) {
        self.base.time_support()
    }

    fn space_support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.space_support();
        if self.inner {
            (lo, hi.min(self.cut.a + 1.0))
        } else {
            (lo.max(self.cut.a), hi)
        }
    }

    fn time_breaks(&self) -> Vec<f64> {
        self.base.time_breaks()
    }

    fn space_breaks(&self) -> Vec<f64> {
        let mut b = self.base.space_breaks();
        b.extend([self.cut.a, self.cut.a + 1.0]);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// `[psi_a, -c^2 Delta] u` for the exact radial field `u` of an images
/// oracle, as a source on `a <= |x| <= a + 1`, `0 <= t <= t_max`.
pub struct OracleCommutator {
    pub oracle: RadialOracle,
    pub cut: CutoffSpec,
    pub t_max: f64,
}

impl Source for OracleCommutator {
    fn radial(&self, t: f64, rho: f64) -> f64 {
        if rho <= self.cut.a || rho >= self.cut.a + 1.0 || t < 0.0 {
            return 0.0;
        }
        let (u, _, ur) = self.oracle.u_jet(t, rho);
        self.cut.commutator_radial(self.oracle.c, rho, u, ur)
    }

    fn time_support(&self) -> (f64, f64) {
        (0.0, self.t_max)
    }

    fn space_support(&self) -> (f64, f64) {
        (self.cut.a, self.cut.a + 1.0)
    }
}

/// Point of radius `r` on the first axis.
pub fn on_axis(r: f64) -> Point {
    [r, 0.0, 0.0]
}
