//! Analytic initial-data profiles.
//!
//! Every profile is a function on R^3 that is symmetric about a center
//! point: it depends only on `rho = |x - center|` and vanishes outside an
//! annulus `inner <= rho <= outer`. Solvers that exploit the symmetry
//! (radial schemes, axis-aligned spherical means) go through
//! [`Profile::radial`], everything else through [`Profile::value`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};

pub type Point = [f64; 3];

/// Radial description of a profile about its center.
pub trait Profile: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;

    fn center(&self) -> Point {
        [0.0; 3]
    }

    /// Support annulus `(inner, outer)` in `rho = |x - center|`.
    fn support(&self) -> (f64, f64);

    /// Value as a function of `rho`.
    fn radial(&self, rho: f64) -> f64;

    /// d/d rho of [`Profile::radial`].
    fn radial_derivative(&self, rho: f64) -> f64;

    /// Points in `rho` where the profile (or a derivative) is not smooth.
    /// Quadratures split panels there.
    fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.support();
        vec![a, b]
    }

    fn value(&self, x: Point) -> f64 {
        self.radial(dist(x, self.center()))
    }

    fn gradient(&self, x: Point) -> Point {
        let c = self.center();
        let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
        let rho = norm(d);
        if rho == 0.0 {
            return [0.0; 3];
        }
        let g = self.radial_derivative(rho) / rho;
        [g * d[0], g * d[1], g * d[2]]
    }

    /// True when the center is the origin, i.e. the profile is radial in
    /// the physical sense.
    fn is_origin_radial(&self) -> bool {
        self.center() == [0.0; 3]
    }

    /// Visits the single-center pieces of the profile (itself, unless it
    /// is a sum).
    fn for_each_part(&self, f: &mut dyn FnMut(&dyn Profile)) {
        f(self.as_dyn())
    }

    fn as_dyn(&self) -> &dyn Profile;
}

pub fn norm(x: Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub fn dist(x: Point, y: Point) -> f64 {
    norm([x[0] - y[0], x[1] - y[1], x[2] - y[2]])
}

/// C-infinity shell bump `peak * e^4 * exp(-1 / (s (1 - s)))`,
/// `s = (rho - inner) / (outer - inner)`; the peak value at `s = 1/2` is `peak`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
    pub peak: f64,
}

impl Profile for Bump {
    fn as_dyn(&self) -> &dyn Profile {
        self
    }

    fn kind(&self) -> &'static str {
        "bump"
    }

    fn center(&self) -> Point {
        self.center
    }

    fn support(&self) -> (f64, f64) {
        (self.inner, self.outer)
    }

    fn radial(&self, rho: f64) -> f64 {
        let w = self.outer - self.inner;
        let s = (rho - self.inner) / w;
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        self.peak * (4.0 - 1.0 / (s * (1.0 - s))).exp()
    }

    fn radial_derivative(&self, rho: f64) -> f64 {
        let w = self.outer - self.inner;
        let s = (rho - self.inner) / w;
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let q = s * (1.0 - s);
        // d/ds (-1/q) = (1 - 2s) / q^2
        self.radial(rho) * (1.0 - 2.0 * s) / (q * q) / w
    }
}

/// Gaussian in `rho` centered at `mean`, truncated to `|rho - mean| <= cut`.
/// `mean = 0` with a shifted `center` gives a truncated 3D Gaussian blob.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianShell {
    pub center: Point,
    pub mean: f64,
    pub sigma: f64,
    pub cut: f64,
    pub peak: f64,
}

impl Profile for GaussianShell {
    fn as_dyn(&self) -> &dyn Profile {
        self
    }

    fn kind(&self) -> &'static str {
        "gaussian"
    }

    fn center(&self) -> Point {
        self.center
    }

    fn support(&self) -> (f64, f64) {
        ((self.mean - self.cut).max(0.0), self.mean + self.cut)
    }

    fn radial(&self, rho: f64) -> f64 {
        let d = rho - self.mean;
        if d.abs() > self.cut {
            return 0.0;
        }
        self.peak * (-0.5 * d * d / (self.sigma * self.sigma)).exp()
    }

    fn radial_derivative(&self, rho: f64) -> f64 {
        let d = rho - self.mean;
        if d.abs() > self.cut {
            return 0.0;
        }
        -d / (self.sigma * self.sigma) * self.radial(rho)
    }
}

/// Polynomial shell `peak * (4 (rho^2 - a^2)(b^2 - rho^2) / (b^2 - a^2)^2)^power`.
/// A polynomial in `rho^2` on its support, so spherical means of it are
/// polynomials in the polar cosine and panel Gauss rules are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyShell {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
    pub power: u32,
    pub peak: f64,
}

impl PolyShell {
    fn base(&self, rho: f64) -> f64 {
        let (a2, b2) = (self.inner * self.inner, self.outer * self.outer);
        let s = rho * rho;
        4.0 * (s - a2) * (b2 - s) / ((b2 - a2) * (b2 - a2))
    }
}

impl Profile for PolyShell {
    fn as_dyn(&self) -> &dyn Profile {
        self
    }

    fn kind(&self) -> &'static str {
        "polyshell"
    }

    fn center(&self) -> Point {
        self.center
    }

    fn support(&self) -> (f64, f64) {
        (self.inner, self.outer)
    }

    fn radial(&self, rho: f64) -> f64 {
        if rho <= self.inner || rho >= self.outer {
            return 0.0;
        }
        self.peak * self.base(rho).powi(self.power as i32)
    }

    fn radial_derivative(&self, rho: f64) -> f64 {
        if rho <= self.inner || rho >= self.outer || self.power == 0 {
            return 0.0;
        }
        let (a2, b2) = (self.inner * self.inner, self.outer * self.outer);
        let s = rho * rho;
        let dbase = 4.0 * ((b2 - s) - (s - a2)) * 2.0 * rho / ((b2 - a2) * (b2 - a2));
        self.peak * self.power as f64 * self.base(rho).powi(self.power as i32 - 1) * dbase
    }
}

/// `scale * inner(rho)`; used for cut-off products and amplitude scaling.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub inner: Arc<dyn Profile>,
    pub scale: f64,
}

impl Profile for Scaled {
    fn as_dyn(&self) -> &dyn Profile {
        self
    }

    fn kind(&self) -> &'static str {
        "scaled"
    }
    fn center(&self) -> Point {
        self.inner.center()
    }
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }
    fn radial(&self, rho: f64) -> f64 {
        self.scale * self.inner.radial(rho)
    }
    fn radial_derivative(&self, rho: f64) -> f64 {
        self.scale * self.inner.radial_derivative(rho)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

/// Velocity profile that makes `(phi, psi)` a purely outgoing radial wave
/// of speed `c`: `psi = -c (phi / r + phi')`, so `d_t (r u) = -c d_r (r u)`.
#[derive(Debug, Clone)]
pub struct OutgoingVelocity {
    pub displacement: Arc<dyn Profile>,
    pub speed: f64,
}

impl Profile for OutgoingVelocity {
    fn as_dyn(&self) -> &dyn Profile {
        self
    }

    fn kind(&self) -> &'static str {
        "outgoing"
    }
    fn center(&self) -> Point {
        self.displacement.center()
    }
    fn support(&self) -> (f64, f64) {
        self.displacement.support()
    }
    fn radial(&self, rho: f64) -> f64 {
        if rho == 0.0 {
            return 0.0;
        }
        -self.speed * (self.displacement.radial(rho) / rho + self.displacement.radial_derivative(rho))
    }
    fn radial_derivative(&self, rho: f64) -> f64 {
        // Centered difference; only used for gradients of velocity data.
        let h = 1e-6 * rho.max(1.0);
        (self.radial(rho + h) - self.radial(rho - h)) / (2.0 * h)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.displacement.breakpoints()
    }
}

/// Sum of profiles sharing a center.
#[derive(Debug, Clone, Default)]
pub struct Superposition {
    pub parts: Vec<Arc<dyn Profile>>,
}

impl Superposition {
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl Profile for Superposition {
    fn as_dyn(&self) -> &dyn Profile {
        self
    }

    fn kind(&self) -> &'static str {
        "sum"
    }
    fn center(&self) -> Point {
        self.parts.first().map(|p| p.center()).unwrap_or([0.0; 3])
    }
    fn support(&self) -> (f64, f64) {
        if self.parts.is_empty() {
            return (0.0, 0.0);
        }
        self.parts.iter().map(|p| p.support()).fold((f64::INFINITY, 0.0), |acc, s| {
            (acc.0.min(s.0), acc.1.max(s.1))
        })
    }
    fn radial(&self, rho: f64) -> f64 {
        self.parts.iter().map(|p| p.radial(rho)).sum()
    }
    fn radial_derivative(&self, rho: f64) -> f64 {
        self.parts.iter().map(|p| p.radial_derivative(rho)).sum()
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.parts.iter().flat_map(|p| p.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
    fn value(&self, x: Point) -> f64 {
        self.parts.iter().map(|p| p.value(x)).sum()
    }
    fn gradient(&self, x: Point) -> Point {
        self.parts.iter().fold([0.0; 3], |acc, p| {
            let g = p.gradient(x);
            [acc[0] + g[0], acc[1] + g[1], acc[2] + g[2]]
        })
    }
    fn is_origin_radial(&self) -> bool {
        self.parts.iter().all(|p| p.is_origin_radial())
    }
    fn for_each_part(&self, f: &mut dyn FnMut(&dyn Profile)) {
        for p in &self.parts {
            p.for_each_part(f);
        }
    }
}

/// Builds a profile from its config parameter table.
pub type ProfileBuilder = fn(&toml::Table) -> Result<Arc<dyn Profile>>;

/// Name -> builder map for profile kinds.
pub struct ProfileRegistry {
    builders: BTreeMap<&'static str, ProfileBuilder>,
}

impl Default for ProfileRegistry {
    fn default() -> Self {
        let mut reg = ProfileRegistry {
            builders: BTreeMap::new(),
        };
        reg.register("bump", build_bump);
        reg.register("gaussian", build_gaussian);
        reg.register("polyshell", build_polyshell);
        reg
    }
}

impl ProfileRegistry {
    pub fn register(&mut self, name: &'static str, builder: ProfileBuilder) {
        self.builders.insert(name, builder);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn build(&self, kind: &str, params: &toml::Table) -> Result<Arc<dyn Profile>> {
        let builder = self.builders.get(kind).ok_or_else(|| Error::UnknownName {
            kind: "profile",
            name: kind.to_string(),
            known: self.names().join(", "),
        })?;
        builder(params)
    }
}

fn params<T: for<'de> Deserialize<'de>>(kind: &str, table: &toml::Table) -> Result<T> {
    T::deserialize(toml::Value::Table(table.clone()))
        .map_err(|e| Error::Config(format!("profile `{kind}`: {e}")))
}

fn zero_center() -> Point {
    [0.0; 3]
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BumpParams {
    #[serde(default = "zero_center")]
    center: Point,
    inner: f64,
    outer: f64,
    #[serde(default = "one")]
    peak: f64,
}

fn build_bump(table: &toml::Table) -> Result<Arc<dyn Profile>> {
    let p: BumpParams = params("bump", table)?;
    if !(p.inner >= 0.0 && p.outer > p.inner) {
        return Err(Error::Config(format!(
            "bump needs 0 <= inner < outer, got [{}, {}]",
            p.inner, p.outer
        )));
    }
    Ok(Arc::new(Bump {
        center: p.center,
        inner: p.inner,
        outer: p.outer,
        peak: p.peak,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianParams {
    #[serde(default = "zero_center")]
    center: Point,
    #[serde(default)]
    mean: f64,
    sigma: f64,
    cut: f64,
    #[serde(default = "one")]
    peak: f64,
}

fn build_gaussian(table: &toml::Table) -> Result<Arc<dyn Profile>> {
    let p: GaussianParams = params("gaussian", table)?;
    if !(p.sigma > 0.0 && p.cut > 0.0) {
        return Err(Error::Config("gaussian needs sigma > 0 and cut > 0".into()));
    }
    Ok(Arc::new(GaussianShell {
        center: p.center,
        mean: p.mean,
        sigma: p.sigma,
        cut: p.cut,
        peak: p.peak,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyShellParams {
    #[serde(default = "zero_center")]
    center: Point,
    inner: f64,
    outer: f64,
    power: u32,
    #[serde(default = "one")]
    peak: f64,
}

fn build_polyshell(table: &toml::Table) -> Result<Arc<dyn Profile>> {
    let p: PolyShellParams = params("polyshell", table)?;
    if !(p.inner >= 0.0 && p.outer > p.inner) {
        return Err(Error::Config("polyshell needs 0 <= inner < outer".into()));
    }
    Ok(Arc::new(PolyShell {
        center: p.center,
        inner: p.inner,
        outer: p.outer,
        power: p.power,
        peak: p.peak,
    }))
}
