//! Weight functions, weighted sup norms, the data norm `B` and the
//! monitor `e_k`.

pub mod jet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::derivs::{lattice_jet, radial_jet};
use crate::model::profile::norm;
use crate::model::{Field, Geometry, Grid, InitialData, Point, Profile, WaveSystem};
pub use jet::{sample_directions, PointJet};

/// `<y> = sqrt(1 + y^2)`.
pub fn bracket(y: f64) -> f64 {
    (1.0 + y * y).sqrt()
}

/// `Phi_nu(t, x)` with `r = |x|`.
pub fn phi_r(nu: f64, t: f64, r: f64) -> f64 {
    if nu < 0.0 {
        bracket(t + r).powf(nu)
    } else if nu == 0.0 {
        1.0 / (2.0 + bracket(t + r) / bracket(t - r)).ln()
    } else {
        bracket(t - r).powf(nu)
    }
}

pub fn phi(nu: f64, t: f64, x: Point) -> f64 {
    phi_r(nu, t, norm(x))
}

fn min_bracket(t: f64, r: f64, speeds: &[f64], exclude: Option<f64>) -> Option<f64> {
    std::iter::once(0.0)
        .chain(speeds.iter().copied())
        .filter(|&c| exclude != Some(c))
        .map(|c| bracket(c * t - r))
        .reduce(f64::min)
}

/// `W_{nu,kappa}(t, x) = <t+|x|>^nu (min_{0<=j<=N} <c_j t - |x|>)^kappa`, `c_0 = 0`.
pub fn weight_w(nu: f64, kappa: f64, t: f64, x: Point, speeds: &[f64]) -> f64 {
    weight_w_r(nu, kappa, t, norm(x), speeds)
}

pub fn weight_w_r(nu: f64, kappa: f64, t: f64, r: f64, speeds: &[f64]) -> f64 {
    let m = min_bracket(t, r, speeds, None).unwrap_or(1.0);
    bracket(t + r).powf(nu) * m.powf(kappa)
}

/// `W^(c)_{nu,kappa}`: the minimum skips every `c_j = c` (but keeps `c_0 = 0`).
/// Fails when every system speed equals `c`.
pub fn weight_wc(nu: f64, kappa: f64, t: f64, x: Point, speeds: &[f64], c: f64) -> Result<f64> {
    weight_wc_r(nu, kappa, t, norm(x), speeds, c)
}

pub fn weight_wc_r(nu: f64, kappa: f64, t: f64, r: f64, speeds: &[f64], c: f64) -> Result<f64> {
    if speeds.iter().all(|&s| s == c) {
        return Err(Error::EmptyExclusion(c));
    }
    let m = min_bracket(t, r, speeds, Some(c)).unwrap_or(1.0);
    Ok(bracket(t + r).powf(nu) * m.powf(kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Phi,
    W,
    Wc,
}

/// One weight `z(s, x)` of a weighted sup norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub nu: f64,
    pub kappa: f64,
    /// For `Wc` the excluded speed; for `Phi` the time scaling
    /// (`Phi_nu(c t, x)`; 0 means unscaled).
    pub c: f64,
}

impl WeightSpec {
    pub fn phi(nu: f64) -> Self {
        WeightSpec {
            kind: WeightKind::Phi,
            nu,
            kappa: 0.0,
            c: 0.0,
        }
    }

    pub fn w(nu: f64, kappa: f64) -> Self {
        WeightSpec {
            kind: WeightKind::W,
            nu,
            kappa,
            c: 0.0,
        }
    }

    pub fn wc(nu: f64, kappa: f64, c: f64) -> Self {
        WeightSpec {
            kind: WeightKind::Wc,
            nu,
            kappa,
            c,
        }
    }

    /// CSV column label.
    pub fn label(&self) -> String {
        match self.kind {
            WeightKind::Phi => format!("phi({})", self.nu),
            WeightKind::W => format!("W({},{})", self.nu, self.kappa),
            WeightKind::Wc => format!("Wc({},{},{})", self.nu, self.kappa, self.c),
        }
    }

    pub fn eval_r(&self, t: f64, r: f64, speeds: &[f64]) -> Result<f64> {
        match self.kind {
            WeightKind::Phi => {
                let s = if self.c > 0.0 { self.c * t } else { t };
                Ok(phi_r(self.nu, s, r))
            }
            WeightKind::W => Ok(weight_w_r(self.nu, self.kappa, t, r, speeds)),
            WeightKind::Wc => weight_wc_r(self.nu, self.kappa, t, r, speeds, self.c),
        }
    }

    /// Checks the spec against a speed list once, so per-sample
    /// evaluation cannot fail later.
    pub fn check(&self, speeds: &[f64]) -> Result<()> {
        if speeds.is_empty() {
            return Err(Error::Config("weight needs a non-empty speed list".into()));
        }
        self.eval_r(0.0, 0.0, speeds).map(|_| ())
    }
}

/// Running `sup <|x|> z(s, x) |g(s, x)|` over sampled instants; the
/// discrete `M_k(z)` / `N_k(z)` surrogate.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningSup {
    pub spec: WeightSpec,
    pub value: f64,
}

impl RunningSup {
    pub fn new(spec: WeightSpec) -> Self {
        RunningSup { spec, value: 0.0 }
    }

    /// Folds in the samples `(r, |g|_k)` of one instant `t`.
    pub fn update(&mut self, t: f64, samples: &[(f64, f64)], speeds: &[f64]) -> Result<f64> {
        for &(r, g) in samples {
            let v = bracket(r) * self.spec.eval_r(t, r, speeds)? * g;
            if v > self.value {
                self.value = v;
            }
        }
        Ok(self.value)
    }
}

/// `sup_{(s, x), s <= t} <|x|> z(s, x) |g|` over samples `(s, |x|, |g|_k)`.
pub fn weighted_sup_norm(samples: &[(f64, f64, f64)], spec: &WeightSpec, speeds: &[f64], t: f64) -> Result<f64> {
    let mut best = 0.0f64;
    for &(s, r, g) in samples.iter().filter(|s| s.0 <= t) {
        best = best.max(bracket(r) * spec.eval_r(s, r, speeds)? * g);
    }
    Ok(best)
}

/// Points at which data norms are sampled: radial nodes along the sample
/// directions, or lattice points in the shell that can carry data.
fn data_sample_points(data: &InitialData, grid: &Grid) -> (Vec<Point>, f64) {
    let lo = data.min_support_radius();
    let hi = data.max_support_radius();
    match grid {
        Grid::Radial(g) => {
            let mut pts = Vec::new();
            for m in 0..g.n_nodes() {
                let r = g.node(m);
                if r < lo - g.dr || r > hi + g.dr {
                    continue;
                }
                for w in sample_directions() {
                    pts.push([r * w[0], r * w[1], r * w[2]]);
                }
            }
            (pts, g.dr)
        }
        Grid::Cartesian(g) => {
            let n = g.n_side();
            let mut pts = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let p = [g.coord(i), g.coord(j), g.coord(k)];
                        let r = norm(p);
                        if r >= lo - g.dx && r <= hi + g.dx {
                            pts.push(p);
                        }
                    }
                }
            }
            (pts, g.dx)
        }
    }
}

/// `B_{rho,k}[phi, psi] = sup_y <|y|>^rho (|phi|_k + |grad phi|_k + |psi|_k)`,
/// summed over components, with `|.|_k` from centered differences at the
/// grid spacing. Supports `k <= 1`.
pub fn data_norm_b(rho: f64, k: usize, data: &InitialData, grid: &Grid) -> Result<f64> {
    if k > 1 {
        return Err(Error::StencilRange(format!("B norm supports k <= 1, got {k}")));
    }
    if data.is_zero() {
        return Ok(0.0);
    }
    let (pts, h) = data_sample_points(data, grid);
    let eps = data.amplitude;
    let best = pts
        .par_iter()
        .map(|&y| {
            let mut s = 0.0;
            for comp in &data.components {
                let fphi = |p: Point| comp.phi.value(p);
                let fpsi = |p: Point| comp.psi.value(p);
                let jp = PointJet::from_spatial_fd(&fphi, y, h);
                let jq = PointJet::from_spatial_fd(&fpsi, y, h);
                s += jp.norm_spatial(k) + jp.norm_gradient(k, false) + jq.norm_spatial(k);
            }
            bracket(norm(y)).powf(rho) * eps * s
        })
        .collect::<Vec<f64>>();
    Ok(best.into_iter().fold(0.0, f64::max))
}

/// Monitor `e_{k,i}` per component at the field's instant, as a sup over
/// the samples. `k <= 1`: the `|u|_{k+1}` term needs two derivatives.
pub fn monitor_e(field: &Field, k: usize, sys: &WaveSystem) -> Result<Vec<f64>> {
    if k > crate::model::MONITOR_MAX_K {
        return Err(Error::InsufficientHistory(format!(
            "e_k needs {} derivatives; three time levels support k <= {}",
            k + 1,
            crate::model::MONITOR_MAX_K
        )));
    }
    let t = field.time;
    let term = |jet: &PointJet, c: f64| {
        let r = norm(jet.x);
        let mut v = bracket(t + r) * phi_r(0.0, c * t, r) * jet.norm(k + 1)
            + bracket(r) * bracket(c * t - r) * jet.norm_gradient(k, true);
        if k >= 1 {
            v += bracket(r) * bracket(t + r) / (2.0 + t + r).ln() * jet.dplus(c).abs();
        }
        v
    };
    (0..field.n_components())
        .map(|i| {
            let c = sys.speeds[i];
            match field.geometry {
                Geometry::Radial { n, .. } => {
                    let vals = (0..n)
                        .into_par_iter()
                        .map(|m| -> Result<f64> {
                            let mut best = 0.0f64;
                            for w in sample_directions() {
                                best = best.max(term(&radial_jet(field, i, m, w)?, c));
                            }
                            Ok(best)
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    Ok(vals.into_iter().fold(0.0, f64::max))
                }
                Geometry::Cartesian { n, .. } => {
                    let vals = (1..n - 1)
                        .into_par_iter()
                        .map(|a| -> Result<f64> {
                            let mut best = 0.0f64;
                            for b in 1..n - 1 {
                                for cidx in 1..n - 1 {
                                    best = best.max(term(&lattice_jet(field, i, [a, b, cidx])?, c));
                                }
                            }
                            Ok(best)
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    Ok(vals.into_iter().fold(0.0, f64::max))
                }
            }
        })
        .collect()
}

/// Column label of the monitor.
pub fn monitor_label(k: usize) -> String {
    format!("e({k})")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(-1.0, 0.0, [0.0; 3]), 1.0);
        for t in [0.0, 3.0, 50.0] {
            assert!((phi(0.0, t, [0.0; 3]) - 1.0 / 3f64.ln()).abs() < 1e-15);
        }
        assert_eq!(phi(2.0, 5.0, [3.0, 4.0, 0.0]), 1.0);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight_w(1.0, 1.0, 0.0, [0.0; 3], &[1.0]), 1.0);
        let v = weight_w(1.0, 1.0, 10.0, [10.0, 0.0, 0.0], &[1.0]);
        assert!((v - bracket(20.0)).abs() < 1e-12);
        let v = weight_wc(0.0, 1.0, 10.0, [10.0, 0.0, 0.0], &[1.0, 2.0], 1.0).unwrap();
        assert!((v - bracket(10.0)).abs() < 1e-12);
        assert!(matches!(
            weight_wc(0.0, 1.0, 1.0, [1.0, 0.0, 0.0], &[1.0, 1.0], 1.0),
            Err(Error::EmptyExclusion(_))
        ));
    }

    #[test]
    fn labels() {
        assert_eq!(WeightSpec::phi(0.0).label(), "phi(0)");
        assert_eq!(WeightSpec::w(1.0, 0.5).label(), "W(1,0.5)");
        assert_eq!(WeightSpec::wc(1.0, 1.0, 2.0).label(), "Wc(1,1,2)");
    }

    #[test]
    fn running_sup_examples() {
        let mut s = RunningSup::new(WeightSpec::w(1.0, 1.0));
        assert_eq!(s.update(0.0, &[(0.0, 0.0)], &[1.0]).unwrap(), 0.0);
        assert_eq!(s.update(0.0, &[(0.0, 1.0)], &[1.0]).unwrap(), 1.0);
        assert_eq!(s.update(1.0, &[(0.5, 0.0)], &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn weighted_sup_matches_exhaustive_scan() {
        let spec = WeightSpec::w(1.0, 1.0);
        let speeds = [1.0, 2.0];
        let mut samples = Vec::new();
        for si in 0..20 {
            let s = si as f64 * 0.5;
            for ri in 0..100 {
                let r = 1.0 + ri as f64 * 0.1;
                let g = (-(r - 2.0 - s) * (r - 2.0 - s)).exp() / r;
                samples.push((s, r, g));
            }
        }
        let mut brute = 0.0f64;
        for &(s, r, g) in &samples {
            if s <= 5.0 {
                brute = brute.max(bracket(r) * weight_w_r(1.0, 1.0, s, r, &speeds) * g);
            }
        }
        assert_eq!(weighted_sup_norm(&samples, &spec, &speeds, 5.0).unwrap(), brute);
        // running sup is monotone in t
        let mut last = 0.0;
        for t in [0.0, 1.0, 2.5, 5.0, 9.5] {
            let v = weighted_sup_norm(&samples, &spec, &speeds, t).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    proptest! {
        /// W_{rho,kappa} <= W_{nu,kappa} <= W^(c)_{nu,kappa} for nu >= rho.
        #[test]
        fn weight_ordering(
            t in 0.0f64..200.0, r in 0.0f64..300.0,
            rho in -2.0f64..2.0, dnu in 0.0f64..2.0, kappa in 0.0f64..2.0,
            speeds in proptest::collection::vec(0.1f64..4.0, 2..4),
        ) {
            let nu = rho + dnu;
            let c = speeds[0];
            prop_assume!(speeds.iter().any(|&s| s != c));
            let a = weight_w_r(rho, kappa, t, r, &speeds);
            let b = weight_w_r(nu, kappa, t, r, &speeds);
            let z = weight_wc_r(nu, kappa, t, r, &speeds, c).unwrap();
            prop_assert!(a <= b * (1.0 + 1e-12));
            prop_assert!(b <= z * (1.0 + 1e-12));
        }

        /// Phi_0(ct, x)^{-1} <= C_mu <t+r>^mu <ct-r>^{-mu}; the empirical
        /// constant stays below the bound computed for this mu.
        #[test]
        fn phi0_bound(t in 0.0f64..500.0, r in 0.0f64..800.0, c in 0.2f64..3.0, mu in 0.1f64..1.0) {
            let lhs = 1.0 / phi_r(0.0, c * t, r);
            let ratio = bracket(c * t + r) / bracket(c * t - r);
            let rhs = ratio.powf(mu);
            // log(2 + y) <= C_mu y^mu on y >= 1 with C_mu = sup log(2+y)/y^mu;
            // log(2+y) <= log 3 + (y-1)/3 <= (log 3 + 1/(e mu)) y^mu.
            let c_mu = 3f64.ln() + 1.0 / (std::f64::consts::E * mu);
            let growth = bracket(t + r) / bracket(c * t + r);
            let scale = growth.max(1.0 / growth).powf(mu);
            prop_assert!(lhs <= c_mu * rhs * scale * (1.0 + 1e-12));
        }

        /// For c_j != c_k: <c_j t - r>^{-1} <c_k t - r>^{-1}
        ///   <= C <t+r>^{-1} min(<c_j t - r>, <c_k t - r>)^{-1}
        /// with C depending only on the speeds.
        #[test]
        fn cross_speed_bracket(t in 0.0f64..1000.0, r in 0.0f64..3000.0, cj in 0.1f64..3.0, gap in 0.05f64..2.0) {
            let ck = cj + gap;
            let (bj, bk) = (bracket(cj * t - r), bracket(ck * t - r));
            let lhs = 1.0 / (bj * bk);
            // The larger bracket is at least kappa <t+r> / 2 with
            // kappa = min(1, gap) / (2 (1 + 2 c_k)).
            let c_const = 4.0 * (1.0 + 2.0 * ck) / gap.min(1.0);
            let rhs = c_const / (bracket(t + r) * bj.min(bk));
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "lhs {} rhs {}", lhs, rhs);
        }
    }
}
