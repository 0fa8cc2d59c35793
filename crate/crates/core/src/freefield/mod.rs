//! Free-space Cauchy solvers: Kirchhoff's spherical means for
//! `K0[w0, w1; c]`, Duhamel's principle for `L0[g; c]`, and exact radial
//! oracles used to validate both.
//!
//! Every profile is a sum of pieces that depend only on the distance to
//! their own center. For such a piece the spherical mean over
//! `|y - x| = R` is a one-dimensional integral in the polar cosine `mu`
//! measured from the axis `x - center`: the azimuthal integral is exact.
//! [`SphereQuadrature`] therefore drives the polar direction with
//! composite Gauss–Legendre panels split where the sphere crosses a
//! profile breakpoint. The full product rule (polar Gauss × azimuthal
//! trapezoid) is kept for non-symmetric integrands.

pub mod quadrature;
pub mod radial;
pub mod sampled;

use std::sync::Arc;

use crate::error::Result;
use crate::model::profile::{dist, norm, Bump};
use crate::model::{Point, Profile};
use crate::tolerances::{DUHAMEL_AGREE, DUHAMEL_MAX_DOUBLINGS};
use crate::weights::{bracket, phi_r, sample_directions};
pub use quadrature::{gauss_legendre, integrate};
pub use radial::{RadialDuhamel, RadialOracle};
pub use sampled::{SampledRadial, SampledSource};

/// A space-time source `g(t, x)` that, at each time, depends only on the
/// distance to a fixed center.
pub trait Source: Send + Sync {
    fn center(&self) -> Point {
        [0.0; 3]
    }

    /// `g(t, rho)`, `rho = |x - center|`.
    fn radial(&self, t: f64, rho: f64) -> f64;

    fn value(&self, t: f64, x: Point) -> f64 {
        self.radial(t, dist(x, self.center()))
    }

    /// Interval of `t` outside which `g` vanishes.
    fn time_support(&self) -> (f64, f64);

    /// Annulus in `rho` outside which `g` vanishes.
    fn space_support(&self) -> (f64, f64);

    fn time_breaks(&self) -> Vec<f64> {
        let (a, b) = self.time_support();
        vec![a, b]
    }

    fn space_breaks(&self) -> Vec<f64> {
        let (a, b) = self.space_support();
        vec![a, b]
    }
}

/// Time factor of a [`SeparableSource`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile {
    /// C-infinity bump on `[t0, t1]` with peak 1.
    Bump { t0: f64, t1: f64 },
    /// 1 on `[t0, t1]`, 0 elsewhere.
    Indicator { t0: f64, t1: f64 },
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Bump { t0, t1 } => {
                let s = (t - t0) / (t1 - t0);
                if s <= 0.0 || s >= 1.0 {
                    0.0
                } else {
                    (4.0 - 1.0 / (s * (1.0 - s))).exp()
                }
            }
            TimeProfile::Indicator { t0, t1 } => {
                if t >= t0 && t <= t1 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            TimeProfile::Bump { t0, t1 } | TimeProfile::Indicator { t0, t1 } => (t0, t1),
        }
    }
}

/// `g(t, x) = T(t) P(x)`.
#[derive(Debug, Clone)]
pub struct SeparableSource {
    pub time: TimeProfile,
    pub space: Arc<dyn Profile>,
}

impl SeparableSource {
    pub fn new(time: TimeProfile, space: Arc<dyn Profile>) -> Self {
        SeparableSource { time, space }
    }

    /// Bump in time on `[t0, t1]` times a radial bump on `a <= |x| <= b`.
    pub fn radial_bump(t0: f64, t1: f64, a: f64, b: f64, peak: f64) -> Self {
        SeparableSource {
            time: TimeProfile::Bump { t0, t1 },
            space: Arc::new(Bump {
                center: [0.0; 3],
                inner: a,
                outer: b,
                peak,
            }),
        }
    }
}

impl Source for SeparableSource {
    fn center(&self) -> Point {
        self.space.center()
    }

    fn radial(&self, t: f64, rho: f64) -> f64 {
        let tv = self.time.eval(t);
        if tv == 0.0 {
            return 0.0;
        }
        tv * self.space.radial(rho)
    }

    fn time_support(&self) -> (f64, f64) {
        self.time.support()
    }

    fn space_support(&self) -> (f64, f64) {
        self.space.support()
    }

    fn space_breaks(&self) -> Vec<f64> {
        self.space.breakpoints()
    }
}

/// Product rule on the unit sphere: `n_polar` Gauss–Legendre nodes in the
/// polar cosine per panel and `n_azimuth` equispaced azimuths.
///
/// A single-panel product rule integrates spherical harmonics exactly up
/// to degree `min(2 n_polar - 1, n_azimuth - 1)`; the defaults give
/// degree 31 in the polar direction and 31 in azimuth.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    pub n_polar: usize,
    pub n_azimuth: usize,
    /// Polar panels per breakpoint-free interval of the polar cosine.
    pub panels: usize,
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        SphereQuadrature::new(16, 32)
    }
}

impl SphereQuadrature {
    pub fn new(n_polar: usize, n_azimuth: usize) -> Self {
        let (x, w) = gauss_legendre(n_polar);
        SphereQuadrature {
            n_polar,
            n_azimuth,
            panels: 4,
            x,
            w,
        }
    }

    /// Same rule with twice the nodes in each direction.
    pub fn doubled(&self) -> Self {
        let mut q = SphereQuadrature::new(2 * self.n_polar, 2 * self.n_azimuth);
        q.panels = self.panels;
        q
    }

    /// Harmonic degree integrated exactly by the single-panel product rule.
    pub fn exact_degree(&self) -> usize {
        (2 * self.n_polar - 1).min(self.n_azimuth - 1)
    }

    /// Full product nodes `(omega, weight)`; the weights sum to `4 pi`.
    pub fn nodes(&self) -> Vec<(Point, f64)> {
        let dphi = 2.0 * std::f64::consts::PI / self.n_azimuth as f64;
        let mut out = Vec::with_capacity(self.n_polar * self.n_azimuth);
        for (&mu, &wm) in self.x.iter().zip(&self.w) {
            let s = (1.0 - mu * mu).max(0.0).sqrt();
            for k in 0..self.n_azimuth {
                let ph = k as f64 * dphi;
                out.push(([s * ph.cos(), s * ph.sin(), mu], wm * dphi));
            }
        }
        out
    }

    /// `int_{S^2} f dS` by the product rule.
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.nodes().into_iter().map(|(w, q)| q * f(w)).sum()
    }

    /// `(1/2) int_{-1}^{1} g(mu) dmu`, split at `breaks` and into
    /// [`SphereQuadrature::panels`] panels between them.
    pub fn mean_axial(&self, g: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
        let mut cuts = vec![-1.0];
        cuts.extend(breaks.iter().copied().filter(|&b| b > -1.0 && b < 1.0));
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for seg in cuts.windows(2) {
            let h = (seg[1] - seg[0]) / self.panels as f64;
            if h <= 0.0 {
                continue;
            }
            for p in 0..self.panels {
                let lo = seg[0] + p as f64 * h;
                let (mid, half) = (lo + 0.5 * h, 0.5 * h);
                let mut s = 0.0;
                for (&x, &w) in self.x.iter().zip(&self.w) {
                    s += w * g(mid + half * x);
                }
                total += half * s;
            }
        }
        0.5 * total
    }
}

/// Polar cosines at which the sphere `|y - x| = R` meets the spheres
/// `|y - center| = rho_b`, with `D = |x - center|`.
fn mu_breaks(d: f64, r: f64, rho_breaks: &[f64]) -> Vec<f64> {
    rho_breaks
        .iter()
        .map(|&b| (b * b - d * d - r * r) / (2.0 * r * d))
        .filter(|m| m.is_finite())
        .collect()
}

/// Spherical mean of a radial piece `f(|y - center|)` over `|y - x| = R`.
fn mean_of_piece(f: &dyn Fn(f64) -> f64, breaks: &[f64], d: f64, r: f64, quad: &SphereQuadrature) -> f64 {
    if r == 0.0 || d == 0.0 {
        return f(r.max(d));
    }
    let mb = mu_breaks(d, r, breaks);
    quad.mean_axial(|mu| f((d * d + r * r + 2.0 * r * d * mu).max(0.0).sqrt()), &mb)
}

/// Spherical mean of `grad p(y) . omega` for a radial piece `p`.
fn mean_of_radial_gradient(p: &dyn Profile, d: f64, r: f64, quad: &SphereQuadrature) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    if d == 0.0 {
        return p.radial_derivative(r);
    }
    let breaks = p.breakpoints();
    let mb = mu_breaks(d, r, &breaks);
    quad.mean_axial(
        |mu| {
            let rho = (d * d + r * r + 2.0 * r * d * mu).max(0.0).sqrt();
            if rho == 0.0 {
                return 0.0;
            }
            p.radial_derivative(rho) * (d * mu + r) / rho
        },
        &mb,
    )
}

/// `M_R[f](x)` for a profile sum.
pub fn spherical_mean(f: &dyn Profile, x: Point, r: f64, quad: &SphereQuadrature) -> f64 {
    let mut total = 0.0;
    f.for_each_part(&mut |p| {
        let (a, b) = p.support();
        let d = dist(x, p.center());
        if r + d < a || (d - r).abs() > b {
            return;
        }
        let breaks = p.breakpoints();
        total += mean_of_piece(&|rho| p.radial(rho), &breaks, d, r, quad);
    });
    total
}

/// `K0[w0, w1; c](t, x)`: the free-space solution of
/// `(d_t^2 - c^2 Lap) u = 0`, `u(0) = w0`, `d_t u(0) = w1`, by Kirchhoff's
/// formula `u = M[w0] + c t M[grad w0 . omega] + t M[w1]` with means over
/// `|y - x| = c t`.
pub fn k0_solve(w0: &dyn Profile, w1: &dyn Profile, c: f64, t: f64, x: Point, quad: &SphereQuadrature) -> f64 {
    let r = c * t;
    let mut total = 0.0;
    w0.for_each_part(&mut |p| {
        let (a, b) = p.support();
        let d = dist(x, p.center());
        if r + d < a || (d - r).abs() > b {
            return;
        }
        let breaks = p.breakpoints();
        total += mean_of_piece(&|rho| p.radial(rho), &breaks, d, r, quad);
        total += r * mean_of_radial_gradient(p, d, r, quad);
    });
    if t > 0.0 {
        total += t * spherical_mean(w1, x, r, quad);
    }
    total
}

/// Result of an adaptive Duhamel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuhamelReport {
    pub value: f64,
    pub converged: bool,
    pub doublings: u32,
}

/// `int_0^t (t - s) M_{c (t - s)}[g(s)](x) ds` with `n_duhamel` Gauss
/// points per unit time in `s` (8-point panels), restricted to the
/// `s`-interval where the sphere of influence meets the source support.
fn duhamel_once(g: &dyn Source, c: f64, t: f64, x: Point, quad: &SphereQuadrature, n_duhamel: usize) -> f64 {
    let (t0, t1) = g.time_support();
    let (a, b) = g.space_support();
    let d = dist(x, g.center());
    // radius R = c (t - s) must lie in [max(0, a - d, d - b), d + b]
    let r_lo = (a - d).max(d - b).max(0.0);
    let r_hi = d + b;
    let s_lo = t0.max(0.0).max(t - r_hi / c);
    let s_hi = t1.min(t).min(t - r_lo / c);
    if s_hi <= s_lo {
        return 0.0;
    }
    let breaks = g.space_breaks();
    let mut sbreaks = g.time_breaks();
    for &rb in &breaks {
        sbreaks.push(t - (rb - d).abs() / c);
        sbreaks.push(t - (rb + d) / c);
    }
    let panels_per_unit = (n_duhamel as f64 / 8.0).max(1.0);
    let (xs, ws) = gauss_legendre(8);
    let mut cuts = vec![s_lo];
    cuts.extend(sbreaks.into_iter().filter(|&s| s > s_lo && s < s_hi));
    cuts.push(s_hi);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        let n = ((seg[1] - seg[0]) * panels_per_unit).ceil().max(1.0) as usize;
        let h = (seg[1] - seg[0]) / n as f64;
        for p in 0..n {
            let mid = seg[0] + (p as f64 + 0.5) * h;
            let mut acc = 0.0;
            for (&xi, &wi) in xs.iter().zip(&ws) {
                let s = mid + 0.5 * h * xi;
                let r = c * (t - s);
                let m = mean_of_piece(&|rho| g.radial(s, rho), &breaks, d, r, quad);
                acc += wi * (t - s) * m;
            }
            total += 0.5 * h * acc;
        }
    }
    total
}

/// `L0[g; c](t, x)` with adaptive doubling of the Duhamel nodes until two
/// successive values agree to [`DUHAMEL_AGREE`] (relative to `max(1, |L0|)`).
pub fn l0_solve_report(g: &dyn Source, c: f64, t: f64, x: Point, quad: &SphereQuadrature, n_duhamel: usize) -> DuhamelReport {
    let mut n = n_duhamel.max(8);
    let mut prev = duhamel_once(g, c, t, x, quad, n);
    for k in 1..=DUHAMEL_MAX_DOUBLINGS {
        n *= 2;
        let next = duhamel_once(g, c, t, x, quad, n);
        if (next - prev).abs() <= DUHAMEL_AGREE * next.abs().max(1.0) {
            return DuhamelReport {
                value: next,
                converged: true,
                doublings: k,
            };
        }
        prev = next;
    }
    DuhamelReport {
        value: prev,
        converged: false,
        doublings: DUHAMEL_MAX_DOUBLINGS,
    }
}

/// `L0[g; c](t, x)`; see [`l0_solve_report`].
pub fn l0_solve(g: &dyn Source, c: f64, t: f64, x: Point, quad: &SphereQuadrature, n_duhamel: usize) -> f64 {
    l0_solve_report(g, c, t, x, quad, n_duhamel).value
}

/// Default Duhamel nodes per unit time.
pub const N_DUHAMEL: usize = 64;

/// Empirical constant of the free-space decay estimate with `m = 0`:
/// `sup <t + |x|> Phi_{rho - 1}(c t, x) |K0| / B_{rho + 1, 0}` over `samples`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeDecay {
    pub constant: f64,
    pub lhs_sup: f64,
    pub b_norm: f64,
}

/// Samples `B_{rho,0}[w0, w1] = sup <|y|>^rho (|w0| + |grad w0| + |w1|)`
/// densely along each piece's support in the standard sample directions.
pub fn data_norm_b0(w0: &dyn Profile, w1: &dyn Profile, rho: f64) -> f64 {
    let mut pts: Vec<Point> = Vec::new();
    let mut add = |p: &dyn Profile| {
        let (a, b) = p.support();
        let c = p.center();
        let n = 400;
        for k in 0..=n {
            let s = a + (b - a) * k as f64 / n as f64;
            for w in sample_directions() {
                for sign in [1.0, -1.0] {
                    pts.push([c[0] + sign * s * w[0], c[1] + sign * s * w[1], c[2] + sign * s * w[2]]);
                }
            }
        }
    };
    w0.for_each_part(&mut add);
    w1.for_each_part(&mut add);
    pts.iter()
        .map(|&y| {
            let g = w0.gradient(y);
            let s = w0.value(y).abs() + g[0].abs() + g[1].abs() + g[2].abs() + w1.value(y).abs();
            bracket(norm(y)).powf(rho) * s
        })
        .fold(0.0, f64::max)
}

pub fn measure_free_decay(
    w0: &dyn Profile,
    w1: &dyn Profile,
    c: f64,
    rho: f64,
    samples: &[(f64, Point)],
    quad: &SphereQuadrature,
) -> Result<FreeDecay> {
    let b_norm = data_norm_b0(w0, w1, rho + 1.0);
    if b_norm == 0.0 {
        return Ok(FreeDecay {
            constant: 0.0,
            lhs_sup: 0.0,
            b_norm,
        });
    }
    let lhs_sup = samples
        .iter()
        .map(|&(t, x)| {
            let r = norm(x);
            bracket(t + r) * phi_r(rho - 1.0, c * t, r) * k0_solve(w0, w1, c, t, x, quad).abs()
        })
        .fold(0.0, f64::max);
    Ok(FreeDecay {
        constant: lhs_sup / b_norm,
        lhs_sup,
        b_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::profile::{PolyShell, Superposition};

    fn bump(center: Point, inner: f64, outer: f64, peak: f64) -> Arc<dyn Profile> {
        Arc::new(Bump {
            center,
            inner,
            outer,
            peak,
        })
    }

    fn zero() -> Superposition {
        Superposition::default()
    }

    #[test]
    fn product_weights_and_exactness() {
        let q = SphereQuadrature::default();
        let total: f64 = q.nodes().iter().map(|n| n.1).sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        // int x^2 y^4 z^6 dS over S^2 = 4 pi * 1!!3!!5!! / 13!! with odd double factorials
        let exact = 4.0 * std::f64::consts::PI * (1.0 * 3.0 * 15.0) / (3.0 * 5.0 * 7.0 * 9.0 * 11.0 * 13.0);
        let v = q.integrate(|w| w[0].powi(2) * w[1].powi(4) * w[2].powi(6));
        assert!((v - exact).abs() < 1e-14, "{v} vs {exact}");
        assert_eq!(q.exact_degree(), 31);
    }

    #[test]
    fn zero_data_and_huygens() {
        let q = SphereQuadrature::default();
        let z = zero();
        assert_eq!(k0_solve(&z, &z, 1.0, 3.0, [1.0, 2.0, 0.0], &q), 0.0);
        // w1 supported in |y| <= 1.5 (shell 0.5..1.5)
        let w1 = bump([0.0; 3], 0.5, 1.5, 1.0);
        for (t, x) in [(5.0, [1.0, 0.0, 0.0]), (0.5, [4.0, 0.0, 0.0])] {
            assert_eq!(k0_solve(&z, w1.as_ref(), 1.0, t, x, &q), 0.0);
        }
    }

    #[test]
    fn kirchhoff_matches_radial_oracle() {
        let q = SphereQuadrature::default();
        let w0 = bump([0.0; 3], 1.5, 3.0, 1.0);
        let w1 = bump([0.0; 3], 2.0, 2.8, -0.7);
        let c = 1.3;
        let oracle = RadialOracle::new(0.0, c, 1.0, w0.clone(), w1.clone());
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..40 {
            let t = 0.1 + 0.13 * k as f64;
            let r = 0.3 + 0.11 * k as f64;
            let w = sample_directions()[k % 3];
            let x = [r * w[0], r * w[1], r * w[2]];
            let v = k0_solve(w0.as_ref(), w1.as_ref(), c, t, x, &q);
            let o = oracle.u(t, r);
            worst = worst.max((v - o).abs());
            scale = scale.max(o.abs());
        }
        assert!(worst / scale < 1e-6, "relative error {}", worst / scale);
    }

    #[test]
    fn off_center_parts_are_handled() {
        // a shifted smooth shell: compare against a fine product rule
        let g = Bump {
            center: [0.5, -0.3, 0.2],
            inner: 0.2,
            outer: 1.4,
            peak: 1.0,
        };
        let x = [0.9, 0.4, -0.1];
        let r = 0.8;
        let axial = spherical_mean(&g, x, r, &SphereQuadrature::default());
        let product = SphereQuadrature::new(96, 192)
            .integrate(|w| g.value([x[0] + r * w[0], x[1] + r * w[1], x[2] + r * w[2]]))
            / (4.0 * std::f64::consts::PI);
        let finer = spherical_mean(&g, x, r, &SphereQuadrature::default().doubled());
        assert!((axial - product).abs() < 1e-8, "{axial} vs {product}");
        assert!((finer - product).abs() < 1e-11, "{finer} vs {product}");
    }

    #[test]
    fn linearity() {
        let q = SphereQuadrature::default();
        let w0 = bump([0.0; 3], 1.5, 3.0, 1.0);
        let w1 = PolyShell {
            center: [0.0; 3],
            inner: 1.0,
            outer: 2.0,
            power: 3,
            peak: 1.0,
        };
        let w0s = bump([0.0; 3], 1.5, 3.0, 2.5);
        let w1s = PolyShell { peak: 2.5, ..w1.clone() };
        let x = [1.0, 1.0, 0.5];
        let a = k0_solve(w0.as_ref(), &w1, 1.0, 1.7, x, &q);
        let b = k0_solve(w0s.as_ref(), &w1s, 1.0, 1.7, x, &q);
        assert!((b - 2.5 * a).abs() < 1e-14 * b.abs().max(1.0));
    }

    #[test]
    fn duhamel_of_constant_source_inside_ball() {
        // g = 1 on |y| <= 5 for s in [0, 10]; at the center the mean is 1
        // while c t < 5.
        let src = SeparableSource::new(
            TimeProfile::Indicator { t0: 0.0, t1: 10.0 },
            Arc::new(PolyShell {
                center: [0.0; 3],
                inner: -100.0,
                outer: 5.0,
                power: 0,
                peak: 1.0,
            }),
        );
        let q = SphereQuadrature::default();
        let t = 2.0;
        let v = l0_solve(&src, 1.0, t, [0.0; 3], &q, N_DUHAMEL);
        assert!((v - 0.5 * t * t).abs() < 1e-12, "{v}");
        let zero_src = SeparableSource::radial_bump(0.0, 1.0, 2.0, 3.0, 0.0);
        assert_eq!(l0_solve(&zero_src, 1.0, 2.0, [2.5, 0.0, 0.0], &q, N_DUHAMEL), 0.0);
    }

    #[test]
    fn duhamel_matches_radial_reduction() {
        let src = SeparableSource::radial_bump(0.0, 1.5, 1.5, 3.0, 1.0);
        let oracle = RadialDuhamel::new(0.0, 1.0, &src);
        let q = SphereQuadrature::default();
        for (t, r) in [(1.0, 2.0), (2.5, 1.2), (3.0, 4.0), (4.2, 0.7)] {
            let rep = l0_solve_report(&src, 1.0, t, [0.0, r, 0.0], &q, N_DUHAMEL);
            let o = oracle.u(t, r);
            assert!(rep.converged);
            assert!((rep.value - o).abs() < 1e-7, "t={t} r={r}: {} vs {o}", rep.value);
        }
    }

    #[test]
    fn duhamel_vanishes_after_source_passes() {
        let src = SeparableSource::radial_bump(0.0, 1.0, 1.0, 2.0, 1.0);
        let q = SphereQuadrature::default();
        // t > s0 + (|x| + b) / c
        let x = [1.5, 0.0, 0.0];
        assert_eq!(l0_solve(&src, 1.0, 1.0 + 3.5 + 0.1, x, &q, N_DUHAMEL), 0.0);
    }

    #[test]
    fn free_decay_constant_is_scale_invariant() {
        let q = SphereQuadrature::default();
        let z = zero();
        let w1 = bump([0.0; 3], 1.0, 2.0, 1.0);
        let w1s = bump([0.0; 3], 1.0, 2.0, 2.0);
        let samples: Vec<(f64, Point)> = (0..20)
            .map(|k| {
                let t = 5.0 * k as f64;
                (t, [t + 1.5, 0.0, 0.0])
            })
            .collect();
        let a = measure_free_decay(&z, w1.as_ref(), 1.0, 2.0, &samples, &q).unwrap();
        let b = measure_free_decay(&z, w1s.as_ref(), 1.0, 2.0, &samples, &q).unwrap();
        assert!(a.constant > 0.0);
        assert!((a.constant - b.constant).abs() < 1e-12 * a.constant);
        assert_eq!(measure_free_decay(&z, &z, 1.0, 2.0, &samples, &q).unwrap().constant, 0.0);
    }
}
