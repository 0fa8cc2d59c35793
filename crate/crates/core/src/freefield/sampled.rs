//! Radial functions and space-time sources known only on a uniform grid,
//! interpolated by four-point (cubic) Lagrange stencils.

use super::Source;
use crate::model::Profile;

/// Weights of the cubic Lagrange interpolant through nodes -1, 0, 1, 2 at
/// offset `s` in `[0, 1]`, and of its derivative.
fn lagrange4(s: f64) -> ([f64; 4], [f64; 4]) {
    let w = [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ];
    let d = [
        -(3.0 * s * s - 6.0 * s + 2.0) / 6.0,
        (3.0 * s * s - 4.0 * s - 1.0) / 2.0,
        -(3.0 * s * s - 2.0 * s - 2.0) / 2.0,
        (3.0 * s * s - 1.0) / 6.0,
    ];
    (w, d)
}

/// Stencil base index and offset for coordinate `x` on nodes `x0 + i h`,
/// `i < n`; `None` outside `[x0, x0 + (n-1) h]`.
fn locate(x: f64, x0: f64, h: f64, n: usize) -> Option<(usize, f64)> {
    let q = (x - x0) / h;
    if !(q >= 0.0 && q <= (n - 1) as f64) || n < 4 {
        return None;
    }
    let i = (q.floor() as usize).clamp(1, n - 3);
    Some((i - 1, q - i as f64))
}

/// `f(r)` sampled at `r_start + m h`; zero outside the sampled range.
#[derive(Debug, Clone)]
pub struct SampledRadial {
    pub r_start: f64,
    pub h: f64,
    pub values: Vec<f64>,
    /// Support hint `(inner, outer)`; the function is taken as zero outside.
    pub support: (f64, f64),
}

impl SampledRadial {
    pub fn new(r_start: f64, h: f64, values: Vec<f64>) -> Self {
        let nz: Vec<usize> = (0..values.len()).filter(|&m| values[m] != 0.0).collect();
        let support = match (nz.first(), nz.last()) {
            (Some(&a), Some(&b)) => (
                r_start + a.saturating_sub(1) as f64 * h,
                r_start + (b + 1).min(values.len() - 1) as f64 * h,
            ),
            _ => (r_start, r_start),
        };
        SampledRadial {
            r_start,
            h,
            values,
            support,
        }
    }
}

impl Profile for SampledRadial {
    fn as_dyn(&self) -> &dyn Profile {
        self
    }

    fn kind(&self) -> &'static str {
        "sampled"
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn radial(&self, rho: f64) -> f64 {
        if rho < self.support.0 || rho > self.support.1 {
            return 0.0;
        }
        match locate(rho, self.r_start, self.h, self.values.len()) {
            Some((i, s)) => {
                let (w, _) = lagrange4(s);
                (0..4).map(|k| w[k] * self.values[i + k]).sum()
            }
            None => 0.0,
        }
    }

    fn radial_derivative(&self, rho: f64) -> f64 {
        if rho < self.support.0 || rho > self.support.1 {
            return 0.0;
        }
        match locate(rho, self.r_start, self.h, self.values.len()) {
            Some((i, s)) => {
                let (_, d) = lagrange4(s);
                (0..4).map(|k| d[k] * self.values[i + k]).sum::<f64>() / self.h
            }
            None => 0.0,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.support.0, self.support.1]
    }
}

/// Radial source `f(t, r)` sampled on `t0 + n dt`, `r0 + m dr`, bicubic
/// in between and zero outside the sampled rectangle.
#[derive(Debug, Clone)]
pub struct SampledSource {
    pub t0: f64,
    pub dt: f64,
    pub r0: f64,
    pub dr: f64,
    /// `values[n][m]`.
    pub values: Vec<Vec<f64>>,
    pub space: (f64, f64),
    pub time: (f64, f64),
}

impl SampledSource {
    pub fn new(t0: f64, dt: f64, r0: f64, dr: f64, values: Vec<Vec<f64>>) -> Self {
        let nt = values.len();
        let nr = values.first().map_or(0, |v| v.len());
        let (mut mlo, mut mhi, mut nlo, mut nhi) = (usize::MAX, 0, usize::MAX, 0);
        for (n, row) in values.iter().enumerate() {
            for (m, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    mlo = mlo.min(m);
                    mhi = mhi.max(m);
                    nlo = nlo.min(n);
                    nhi = nhi.max(n);
                }
            }
        }
        let (space, time) = if mlo == usize::MAX {
            ((r0, r0), (t0, t0))
        } else {
            (
                (
                    r0 + mlo.saturating_sub(1) as f64 * dr,
                    r0 + (mhi + 1).min(nr - 1) as f64 * dr,
                ),
                (
                    t0 + nlo.saturating_sub(1) as f64 * dt,
                    t0 + (nhi + 1).min(nt - 1) as f64 * dt,
                ),
            )
        };
        SampledSource {
            t0,
            dt,
            r0,
            dr,
            values,
            space,
            time,
        }
    }
}

impl Source for SampledSource {
    fn radial(&self, t: f64, rho: f64) -> f64 {
        if rho < self.space.0 || rho > self.space.1 || t < self.time.0 || t > self.time.1 {
            return 0.0;
        }
        let nt = self.values.len();
        let nr = self.values[0].len();
        let (Some((i, s)), Some((j, q))) = (
            locate(t, self.t0, self.dt, nt),
            locate(rho, self.r0, self.dr, nr),
        ) else {
            return 0.0;
        };
        let (wt, _) = lagrange4(s);
        let (wr, _) = lagrange4(q);
        let mut v = 0.0;
        for a in 0..4 {
            let row = &self.values[i + a];
            let mut inner = 0.0;
            for b in 0..4 {
                inner += wr[b] * row[j + b];
            }
            v += wt[a] * inner;
        }
        v
    }

    fn time_support(&self) -> (f64, f64) {
        self.time
    }

    fn space_support(&self) -> (f64, f64) {
        self.space
    }
}
