//! Named verification suites; each compares a discrete construction with
//! an independent oracle and reports pass / fail against the constants in
//! [`crate::tolerances`].

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{
    assemble_homogeneous_decomposition, assemble_inhomogeneous_decomposition, DecompositionReport, DecompositionSettings,
};
use crate::diagnostics::{check_klainerman_sobolev, ks_family};
use crate::error::{Error, Result};
use crate::exterior::derivs::Lattice;
use crate::freefield::{k0_solve, RadialOracle, SeparableSource, Source, SphereQuadrature};
use crate::model::profile::{Bump, Superposition};
use crate::model::{ComponentData, InitialData, Point, Profile};
use crate::nonlinearity::q0;
use crate::tolerances::*;

/// Knobs shared by every suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Multiplies the suite's resolution (values below 1 coarsen it).
    pub resolution_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            resolution_scale: 1.0,
        }
    }
}

/// Named CSV attachment of a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct Attachment {
    pub name: String,
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
    pub attachments: Vec<Attachment>,
}

pub trait VerifySuite: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport>;
}

pub struct SuiteRegistry {
    suites: Vec<Box<dyn VerifySuite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        SuiteRegistry {
            suites: vec![
                Box::new(DecompositionSuite),
                Box::new(KirchhoffSuite),
                Box::new(CommutatorSuite),
                Box::new(NullformSuite),
                Box::new(KlainermanSobolevSuite),
            ],
        }
    }
}

impl SuiteRegistry {
    pub fn register(&mut self, s: Box<dyn VerifySuite>) {
        self.suites.push(s);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn VerifySuite> {
        self.suites
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "verify suite",
                name: name.into(),
                known: self.names().join(", "),
            })
    }
}

fn bump(inner: f64, outer: f64, peak: f64) -> Arc<dyn Profile> {
    Arc::new(Bump {
        center: [0.0; 3],
        inner,
        outer,
        peak,
    })
}

/// Radial data straddling every cutoff ramp, used by the decomposition suite.
pub fn decomposition_sample_data() -> InitialData {
    InitialData {
        amplitude: 1.0,
        components: vec![ComponentData {
            phi: Superposition {
                parts: vec![bump(1.5, 3.5, 1.0)],
            },
            psi: Superposition {
                parts: vec![bump(2.0, 3.0, -0.5)],
            },
        }],
        support_inner_radius: 1.2,
    }
}

/// Source on `1.5 <= |x| <= 3.5`, `0 <= t <= 1.5`.
pub fn decomposition_sample_source() -> Arc<dyn Source> {
    Arc::new(SeparableSource::radial_bump(0.0, 1.5, 1.5, 3.5, 1.0))
}

/// Default decomposition settings with `dr` divided by `scale` and the
/// quadratures scaled with it.
pub fn decomposition_settings(opts: &VerifyOptions) -> DecompositionSettings {
    let base = DecompositionSettings {
        seed: opts.seed,
        ..DecompositionSettings::default()
    };
    let s = opts.resolution_scale;
    DecompositionSettings {
        dr: base.dr / s,
        quad: SphereQuadrature::new(
            ((base.quad.n_polar as f64 * s).round() as usize).max(2),
            ((base.quad.n_azimuth as f64 * s).round() as usize).max(4),
        ),
        n_duhamel: ((base.n_duhamel as f64 * s).round() as usize).max(4),
        ..base
    }
}

/// Both identities at `settings` and at the refined settings.
pub struct DecompositionStudy {
    pub homogeneous: [DecompositionReport; 2],
    pub inhomogeneous: [DecompositionReport; 2],
}

impl DecompositionStudy {
    pub fn run(settings: &DecompositionSettings) -> Result<Self> {
        let data = decomposition_sample_data();
        let f = decomposition_sample_source();
        let fine = settings.refined();
        Ok(DecompositionStudy {
            homogeneous: [
                assemble_homogeneous_decomposition(&data, 1.0, settings)?,
                assemble_homogeneous_decomposition(&data, 1.0, &fine)?,
            ],
            inhomogeneous: [
                assemble_inhomogeneous_decomposition(f.clone(), 1.0, settings)?,
                assemble_inhomogeneous_decomposition(f, 1.0, &fine)?,
            ],
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.homogeneous[0].max_residual.max(self.inhomogeneous[0].max_residual)
    }

    /// Both residuals within `DECOMPOSITION_FACTOR * DECOMPOSITION_TOL`
    /// and both shrinking under refinement at an observed order of at
    /// least `DECOMPOSITION_MIN_ORDER`.
    pub fn passed(&self) -> bool {
        let bound = DECOMPOSITION_FACTOR * DECOMPOSITION_TOL;
        [&self.homogeneous, &self.inhomogeneous].iter().all(|p| {
            p[0].max_residual <= bound && (p[0].max_residual / p[1].max_residual).log2() >= DECOMPOSITION_MIN_ORDER
        })
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (kind, p) in [("homogeneous", &self.homogeneous), ("inhomogeneous", &self.inhomogeneous)] {
            let order = (p[0].max_residual / p[1].max_residual).log2();
            out.push(format!(
                "{kind}: residual {:.3e} at dr = {}, {:.3e} at dr = {} (observed order {order:.2}); bound {:.3e}",
                p[0].max_residual,
                p[0].dr,
                p[1].max_residual,
                p[1].dr,
                DECOMPOSITION_FACTOR * DECOMPOSITION_TOL
            ));
        }
        out
    }
}

struct DecompositionSuite;

impl VerifySuite for DecompositionSuite {
    fn name(&self) -> &'static str {
        "decomposition"
    }

    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport> {
        let study = DecompositionStudy::run(&decomposition_settings(opts))?;
        Ok(SuiteReport {
            suite: self.name(),
            passed: study.passed(),
            lines: study.lines(),
            attachments: vec![
                Attachment {
                    name: "decomposition_homogeneous.csv".into(),
                    csv: study.homogeneous[0].to_csv(),
                },
                Attachment {
                    name: "decomposition_inhomogeneous.csv".into(),
                    csv: study.inhomogeneous[0].to_csv(),
                },
            ],
        })
    }
}

/// Relative sup error of Kirchhoff's formula against the radial oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirchhoffStudy {
    pub error: f64,
    pub error_doubled: f64,
    pub probes: usize,
}

impl KirchhoffStudy {
    /// Errors below this are at the rounding floor, where doubling the
    /// nodes cannot improve them further.
    pub const ROUNDOFF_FLOOR: f64 = 1e-13;

    pub fn run(seed: u64, quad: &SphereQuadrature, n_probes: usize) -> Self {
        let w0 = bump(1.5, 3.0, 1.0);
        let w1 = bump(2.0, 2.8, -0.7);
        let c = 1.3;
        let oracle = RadialOracle::new(0.0, c, 1.0, w0.clone(), w1.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probes: Vec<(f64, Point)> = (0..n_probes)
            .map(|_| {
                let t = rng.gen_range(0.05..4.0);
                let r = rng.gen_range(0.0..6.0);
                let mu: f64 = rng.gen_range(-1.0..1.0);
                let ph: f64 = rng.gen_range(0.0..2.0 * PI);
                let s = (1.0 - mu * mu).sqrt();
                (t, [r * s * ph.cos(), r * s * ph.sin(), r * mu])
            })
            .collect();
        let err = |q: &SphereQuadrature| {
            let (mut worst, mut scale) = (0.0f64, 0.0f64);
            for &(t, x) in &probes {
                let r = crate::model::profile::norm(x);
                let v = k0_solve(w0.as_ref(), w1.as_ref(), c, t, x, q);
                let o = oracle.u(t, r);
                worst = worst.max((v - o).abs());
                scale = scale.max(o.abs());
            }
            worst / scale
        };
        KirchhoffStudy {
            error: err(quad),
            error_doubled: err(&quad.doubled()),
            probes: n_probes,
        }
    }

    pub fn passed(&self) -> bool {
        self.error <= KIRCHHOFF_REL && (self.error_doubled < self.error || self.error < Self::ROUNDOFF_FLOOR)
    }
}

struct KirchhoffSuite;

impl VerifySuite for KirchhoffSuite {
    fn name(&self) -> &'static str {
        "kirchhoff"
    }

    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport> {
        let q = SphereQuadrature::default();
        let s = opts.resolution_scale;
        let quad = SphereQuadrature::new(
            ((q.n_polar as f64 * s).round() as usize).max(2),
            ((q.n_azimuth as f64 * s).round() as usize).max(4),
        );
        let k = KirchhoffStudy::run(opts.seed, &quad, 100);
        Ok(SuiteReport {
            suite: self.name(),
            passed: k.passed(),
            lines: vec![format!(
                "relative sup error {:.3e} ({} probes), {:.3e} with doubled nodes; bound {KIRCHHOFF_REL:e}",
                k.error, k.probes, k.error_doubled
            )],
            attachments: vec![],
        })
    }
}

/// Largest `|Z box_c u - box_c Z u|` over cubic polynomial fields and the
/// six spatial fields, on lattice points two cells from the faces.
pub fn commutator_residual(c: f64) -> f64 {
    let lat = Lattice {
        half_width: 1.5,
        dx: 0.25,
        n: 13,
    };
    let dt = 0.1;
    let fields: [fn(f64, Point) -> f64; 3] = [
        |t, x| x[0] * x[0] * x[1] - 2.0 * x[2].powi(3) + t * x[0] * x[2] + t * t * t,
        |t, x| 3.0 * x[0] * x[1] * x[2] + (1.0 + t) * x[1] * x[1] - x[0],
        |t, x| (x[0] - x[1]).powi(3) + t * t * x[2] + 0.5 * x[2] * x[2] * x[0],
    ];
    let boxc = |levels: &[Vec<f64>; 3]| -> Vec<f64> {
        let lap = lat.laplacian(&levels[1]);
        (0..lat.len())
            .map(|i| (levels[2][i] - 2.0 * levels[1][i] + levels[0][i]) / (dt * dt) - c * c * lap[i])
            .collect()
    };
    let z = |u: &[f64], k: usize| if k < 3 { lat.derivative(u, k) } else { lat.rotation(u, k - 3) };
    let mut worst = 0.0f64;
    for f in fields {
        let levels = [-dt, 0.0, dt].map(|t| lat.sample(|x| f(t, x)));
        let bu = boxc(&levels);
        for k in 0..6 {
            let zl = [z(&levels[0], k), z(&levels[1], k), z(&levels[2], k)];
            let lhs = z(&bu, k);
            let rhs = boxc(&zl);
            for i in 2..lat.n - 2 {
                for j in 2..lat.n - 2 {
                    for l in 2..lat.n - 2 {
                        let idx = lat.index(i, j, l);
                        worst = worst.max((lhs[idx] - rhs[idx]).abs());
                    }
                }
            }
        }
    }
    worst
}

struct CommutatorSuite;

impl VerifySuite for CommutatorSuite {
    fn name(&self) -> &'static str {
        "commutators"
    }

    fn run(&self, _opts: &VerifyOptions) -> Result<SuiteReport> {
        let worst = [0.5, 1.0, 2.0].iter().map(|&c| commutator_residual(c)).fold(0.0, f64::max);
        Ok(SuiteReport {
            suite: self.name(),
            passed: worst <= COMMUTATOR_ABS,
            lines: vec![format!("max |[Z, box_c] u| = {worst:.3e}; bound {COMMUTATOR_ABS:e}")],
            attachments: vec![],
        })
    }
}

/// Residual of `Q0(u, v; c) = (D+u D-v + D-u D+v) / 2 - (c^2 / r^2) sum Omega u Omega v`
/// with the left side from Cartesian centered differences and the right
/// side from differences along rays and along rotation orbits, both with
/// step `h`. Each side is a second-order approximation of the same value.
pub fn nullform_identity_residual(h: f64, c: f64, seed: u64, n_points: usize) -> f64 {
    let u = |t: f64, x: Point| (t - 0.5 * x[0] + 0.3 * x[1]).sin() + 0.2 * x[2] * (0.4 * t + 0.1 * x[0] * x[1]).cos();
    let v = |t: f64, x: Point| (-0.05 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp() * (0.9 * t + 0.2 * x[2]).cos();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..n_points {
        let t: f64 = rng.gen_range(0.0..3.0);
        let r: f64 = rng.gen_range(1.5..5.0);
        let mu: f64 = rng.gen_range(-0.9..0.9);
        let ph: f64 = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - mu * mu).sqrt();
        let om = [s * ph.cos(), s * ph.sin(), mu];
        let x = [r * om[0], r * om[1], r * om[2]];
        let shift = |x: Point, d: Point, a: f64| [x[0] + a * d[0], x[1] + a * d[1], x[2] + a * d[2]];
        let grad = |f: &dyn Fn(f64, Point) -> f64| -> [f64; 4] {
            let mut g = [(f(t + h, x) - f(t - h, x)) / (2.0 * h), 0.0, 0.0, 0.0];
            for k in 0..3 {
                let mut e = [0.0; 3];
                e[k] = 1.0;
                g[k + 1] = (f(t, shift(x, e, h)) - f(t, shift(x, e, -h))) / (2.0 * h);
            }
            g
        };
        let lhs = q0(&grad(&u), &grad(&v), c);
        let dt = |f: &dyn Fn(f64, Point) -> f64| (f(t + h, x) - f(t - h, x)) / (2.0 * h);
        let dr = |f: &dyn Fn(f64, Point) -> f64| (f(t, shift(x, om, h)) - f(t, shift(x, om, -h))) / (2.0 * h);
        let rot = |f: &dyn Fn(f64, Point) -> f64, i: usize, j: usize| {
            let th = h / r;
            let turn = |a: f64| {
                let mut y = x;
                y[i] = x[i] * a.cos() - x[j] * a.sin();
                y[j] = x[i] * a.sin() + x[j] * a.cos();
                y
            };
            (f(t, turn(th)) - f(t, turn(-th))) / (2.0 * th)
        };
        let (ut, ur, vt, vr) = (dt(&u), dr(&u), dt(&v), dr(&v));
        let (up, um, vp, vm) = (ut + c * ur, ut - c * ur, vt + c * vr, vt - c * vr);
        let mut ang = 0.0;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            ang += rot(&u, i, j) * rot(&v, i, j);
        }
        let rhs = 0.5 * (up * vm + um * vp) - c * c * ang / (r * r);
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

/// Residuals at `h, h/2, h/4` and the smaller of the two observed orders.
pub fn nullform_order_study(seed: u64, scale: f64) -> ([f64; 3], f64) {
    let h = 0.04 / scale;
    let res = [h, h / 2.0, h / 4.0].map(|h| nullform_identity_residual(h, 1.3, seed, 200));
    let order = (res[0] / res[1]).log2().min((res[1] / res[2]).log2());
    (res, order)
}

struct NullformSuite;

impl VerifySuite for NullformSuite {
    fn name(&self) -> &'static str {
        "nullform-identity"
    }

    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport> {
        let (res, order) = nullform_order_study(opts.seed, opts.resolution_scale);
        Ok(SuiteReport {
            suite: self.name(),
            passed: order >= NULLFORM_MIN_ORDER,
            lines: vec![format!(
                "Q0 radial/tangential residuals {:.3e}, {:.3e}, {:.3e} under halving; order {order:.3} (need >= {NULLFORM_MIN_ORDER})",
                res[0], res[1], res[2]
            )],
            attachments: vec![],
        })
    }
}

struct KlainermanSobolevSuite;

impl VerifySuite for KlainermanSobolevSuite {
    fn name(&self) -> &'static str {
        "klainerman-sobolev"
    }

    fn run(&self, _opts: &VerifyOptions) -> Result<SuiteReport> {
        let t = check_klainerman_sobolev(&ks_family());
        Ok(SuiteReport {
            suite: self.name(),
            passed: t.bounded,
            lines: vec![format!(
                "max ratio {:.4e} over {} samples (bound {KS_RATIO_BOUND}); max scale defect {:.3e} (bound {KS_SCALE_REL:e})",
                t.max_ratio,
                t.rows.len(),
                t.max_scale_defect
            )],
            attachments: vec![Attachment {
                name: "klainerman_sobolev.csv".into(),
                csv: t.to_csv(),
            }],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_all_suites() {
        let r = SuiteRegistry::default();
        assert_eq!(
            r.names(),
            vec!["decomposition", "kirchhoff", "commutators", "nullform-identity", "klainerman-sobolev"]
        );
        assert!(matches!(r.get("nope"), Err(Error::UnknownName { .. })));
    }

    #[test]
    fn commutators_vanish() {
        assert!(commutator_residual(1.0) <= COMMUTATOR_ABS);
    }

    #[test]
    fn nullform_identity_is_second_order() {
        let (res, order) = nullform_order_study(3, 1.0);
        assert!(res[2] < res[0]);
        assert!(order >= NULLFORM_MIN_ORDER, "{res:?} {order}");
    }

    #[test]
    fn kirchhoff_default_passes() {
        let k = KirchhoffStudy::run(1, &SphereQuadrature::default(), 30);
        assert!(k.passed(), "{k:?}");
    }
}
