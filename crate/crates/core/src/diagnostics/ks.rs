//! Empirical constant of the weighted Sobolev inequality
//! `sup <|x|> |phi| <= C sum_{|alpha| <= 2} ||Z^alpha phi||_{L^2}` over
//! a family of truncated Gaussians vanishing near the obstacle, with
//! `Z` running over `d_1, d_2, d_3, Omega_12, Omega_13, Omega_23`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::decomposition::CutoffSpec;
use crate::freefield::{gauss_legendre, SphereQuadrature};
use crate::model::profile::{dist, norm};
use crate::model::Point;
use crate::runner::fmt_f64;
use crate::tolerances::{KS_RATIO_BOUND, KS_SCALE_REL};
use crate::weights::{bracket, PointJet};

/// Radius below which every sample vanishes identically.
const INNER_CUT: f64 = 1.1;
/// Gaussians are cut off at `TAIL_WIDTHS + 1` widths from the center.
const TAIL_WIDTHS: f64 = 3.0;
const RHO_PANELS: usize = 16;
const RHO_POINTS: usize = 8;

/// `amplitude exp(-|x - center|^2 / width^2)`, cut to vanish on
/// `|x| <= 1.1` and outside `|x - center| >= 4 width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsSample {
    pub center: Point,
    pub width: f64,
    pub amplitude: f64,
}

impl KsSample {
    pub fn value(&self, x: Point) -> f64 {
        let s = dist(x, self.center) / self.width;
        let outer = 1.0 - CutoffSpec { a: TAIL_WIDTHS }.value(s);
        let inner = CutoffSpec { a: INNER_CUT }.value(norm(x));
        if outer == 0.0 || inner == 0.0 {
            return 0.0;
        }
        self.amplitude * (-s * s).exp() * outer * inner
    }

    pub fn scaled(&self, k: f64) -> Self {
        KsSample {
            amplitude: self.amplitude * k,
            ..*self
        }
    }

    pub fn label(&self) -> String {
        let [a, b, c] = self.center;
        format!("gauss(center=({a},{b},{c}),width={})", self.width)
    }
}

/// The ten-member test family: centers from radius 2.5 to 40 along
/// assorted directions, widths from 0.3 to 4.
pub fn ks_family() -> Vec<KsSample> {
    let d = |r: f64, v: Point| {
        let n = norm(v);
        [r * v[0] / n, r * v[1] / n, r * v[2] / n]
    };
    let spec: [(f64, Point, f64); 10] = [
        (2.5, [1.0, 0.0, 0.0], 0.3),
        (3.0, [0.0, 0.0, 1.0], 0.5),
        (3.0, [1.0, 1.0, 0.0], 1.0),
        (5.0, [1.0, 1.0, 1.0], 0.5),
        (5.0, [0.0, 1.0, -1.0], 1.5),
        (8.0, [1.0, -2.0, 0.5], 0.7),
        (8.0, [0.0, 0.0, -1.0], 2.0),
        (12.0, [3.0, 1.0, 2.0], 1.0),
        (20.0, [-1.0, 0.0, 1.0], 2.5),
        (40.0, [1.0, 2.0, 3.0], 4.0),
    ];
    spec.iter()
        .map(|&(r, v, w)| KsSample {
            center: d(r, v),
            width: w,
            amplitude: 1.0,
        })
        .collect()
}

/// Both sides for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct KsRow {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `None` for `0 / 0`.
    pub ratio: Option<f64>,
    /// `|ratio(10 phi) / ratio(phi) - 1|`.
    pub scale_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsTable {
    pub rows: Vec<KsRow>,
    pub max_ratio: f64,
    pub max_scale_defect: f64,
    /// Every ratio at or below `KS_RATIO_BOUND` and every scale defect at
    /// or below `KS_SCALE_REL`.
    pub bounded: bool,
}

impl KsTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample,lhs,rhs,ratio,scale_defect\n");
        for r in &self.rows {
            let ratio = r.ratio.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(
                out,
                "\"{}\",{},{},{ratio},{}",
                r.label,
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                fmt_f64(r.scale_defect)
            );
        }
        out
    }
}

/// Quadrature nodes `(x, weight)` covering the support of `s`: Gauss
/// panels in `rho = |x - center|` times the sphere rule.
fn nodes(s: &KsSample) -> Vec<(Point, f64)> {
    let rho_max = (TAIL_WIDTHS + 1.0) * s.width;
    let (gx, gw) = gauss_legendre(RHO_POINTS);
    let sphere = SphereQuadrature::new(24, 48).nodes();
    let h = rho_max / RHO_PANELS as f64;
    let mut out = Vec::with_capacity(RHO_PANELS * RHO_POINTS * sphere.len());
    for p in 0..RHO_PANELS {
        let a = p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            let rho = a + 0.5 * h * (x + 1.0);
            let wr = 0.5 * h * w * rho * rho;
            for (om, ws) in &sphere {
                let y = [
                    s.center[0] + rho * om[0],
                    s.center[1] + rho * om[1],
                    s.center[2] + rho * om[2],
                ];
                out.push((y, wr * ws));
            }
        }
    }
    out
}

/// `|Z^alpha phi|` for the 28 multi-indices `|alpha| <= 2`, in the order
/// identity, `Z_a` (`a = 1..6`), `Z_a Z_b` (`a <= b`).
fn z_values(jet: &PointJet) -> [f64; 28] {
    let mut v = [0.0; 28];
    v[0] = jet.u;
    let mut k = 1;
    for a in 1..7 {
        v[k] = jet.z1(a);
        k += 1;
    }
    for a in 1..7 {
        for b in a..7 {
            v[k] = jet.z2(a, b);
            k += 1;
        }
    }
    v
}

fn sides(s: &KsSample) -> (f64, f64) {
    let f = |x: Point| s.value(x);
    let h = 1e-3 * s.width;
    let pts = nodes(s);
    let sq = pts
        .par_iter()
        .map(|&(x, w)| {
            let jet = PointJet::from_spatial_fd(&f, x, h);
            let z = z_values(&jet);
            let mut acc = [0.0; 28];
            for i in 0..28 {
                acc[i] = w * z[i] * z[i];
            }
            (acc, bracket(norm(x)) * jet.u.abs())
        })
        .collect::<Vec<_>>();
    let mut l2 = [0.0; 28];
    let mut lhs = 0.0f64;
    for (acc, v) in &sq {
        for i in 0..28 {
            l2[i] += acc[i];
        }
        lhs = lhs.max(*v);
    }
    // the sup is also sampled densely along the ray through the center
    let c = norm(s.center);
    let n = 4000;
    for i in 0..=n {
        let r = c - 4.0 * s.width + 8.0 * s.width * i as f64 / n as f64;
        if r <= 0.0 {
            continue;
        }
        let x = [s.center[0] * r / c, s.center[1] * r / c, s.center[2] * r / c];
        lhs = lhs.max(bracket(r) * f(x).abs());
    }
    (lhs, l2.iter().map(|v| v.sqrt()).sum())
}

fn ratio(lhs: f64, rhs: f64) -> Option<f64> {
    if lhs == 0.0 && rhs == 0.0 {
        None
    } else {
        Some(lhs / rhs)
    }
}

/// Ratio table over `samples`; `0 / 0` rows are kept but excluded from
/// the bound.
pub fn check_klainerman_sobolev(samples: &[KsSample]) -> KsTable {
    let rows: Vec<KsRow> = samples
        .iter()
        .map(|s| {
            let (lhs, rhs) = sides(s);
            let (l10, r10) = sides(&s.scaled(10.0));
            let q = ratio(lhs, rhs);
            let scale_defect = match (q, ratio(l10, r10)) {
                (Some(a), Some(b)) if a != 0.0 => (b / a - 1.0).abs(),
                (Some(a), Some(b)) => (b - a).abs(),
                _ => 0.0,
            };
            KsRow {
                label: s.label(),
                lhs,
                rhs,
                ratio: q,
                scale_defect,
            }
        })
        .collect();
    let max_ratio = rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    let max_scale_defect = rows.iter().map(|r| r.scale_defect).fold(0.0, f64::max);
    KsTable {
        bounded: max_ratio <= KS_RATIO_BOUND && max_scale_defect <= KS_SCALE_REL,
        rows,
        max_ratio,
        max_scale_defect,
    }
}
