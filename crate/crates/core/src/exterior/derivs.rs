//! Discrete vector fields on sampled fields: `Z_0..Z_6`, `D_+` and `D_-`
//! by centered differences (one-sided at radial grid ends), plus array
//! operators on Cartesian lattices used by the commutator checks.

use crate::error::{Error, Result};
use crate::model::profile::norm;
use crate::model::{Field, Geometry, Point};
use crate::weights::jet::{PointJet, ROTATIONS};

/// A first-order operator from the Klainerman family or a null-frame
/// derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorField {
    /// `Z_0 = d_t`, `Z_1..Z_3 = d_1..d_3`, `Z_4..Z_6 = Omega_12, Omega_13, Omega_23`.
    Z(usize),
    /// `d_t + c d_r`.
    DPlus(f64),
    /// `d_t - c d_r`.
    DMinus(f64),
}

/// Where a vector field is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    /// Radial node `m` along direction `omega` (unit vector).
    Radial { m: usize, omega: Point },
    /// Lattice index `(i, j, k)`.
    Lattice([usize; 3]),
}

fn time_diffs(field: &Field, comp: usize, idx: usize) -> (f64, f64, f64) {
    let (p, c, n) = (field.prev[comp][idx], field.curr[comp][idx], field.next[comp][idx]);
    let dt = field.dt;
    (c, (n - p) / (2.0 * dt), (n - 2.0 * c + p) / (dt * dt))
}

/// First and second `r`-derivatives of samples `g` at node `m` with spacing
/// `h`; second-order one-sided formulas at the ends.
fn radial_diffs(g: &dyn Fn(usize) -> f64, m: usize, n: usize, h: f64) -> (f64, f64) {
    if m == 0 {
        let (a, b, c, d) = (g(0), g(1), g(2), g(3));
        ((-3.0 * a + 4.0 * b - c) / (2.0 * h), (2.0 * a - 5.0 * b + 4.0 * c - d) / (h * h))
    } else if m == n - 1 {
        let (a, b, c, d) = (g(m), g(m - 1), g(m - 2), g(m - 3));
        ((3.0 * a - 4.0 * b + c) / (2.0 * h), (2.0 * a - 5.0 * b + 4.0 * c - d) / (h * h))
    } else {
        let (a, b, c) = (g(m - 1), g(m), g(m + 1));
        ((c - a) / (2.0 * h), (c - 2.0 * b + a) / (h * h))
    }
}

/// Jet of component `comp` at radial node `m`, direction `omega`.
pub fn radial_jet(field: &Field, comp: usize, m: usize, omega: Point) -> Result<PointJet> {
    let Geometry::Radial { r_min, dr, n, .. } = field.geometry else {
        return Err(Error::StencilRange("radial jet on a Cartesian field".into()));
    };
    if n < 4 || m >= n {
        return Err(Error::StencilRange(format!("node {m} of {n}")));
    }
    let r = r_min + m as f64 * dr;
    let (u, ut, utt) = time_diffs(field, comp, m);
    let curr = &field.curr[comp];
    let (ur, urr) = radial_diffs(&|k| curr[k], m, n, dr);
    let dt = field.dt;
    let (prev, next) = (&field.prev[comp], &field.next[comp]);
    let (utr, _) = radial_diffs(&|k| (next[k] - prev[k]) / (2.0 * dt), m, n, dr);
    Ok(PointJet::from_radial(r, omega, [u, ut, ur, utt, utr, urr]))
}

/// Jet of component `comp` at an interior lattice index.
pub fn lattice_jet(field: &Field, comp: usize, idx: [usize; 3]) -> Result<PointJet> {
    let Geometry::Cartesian { half_width, dx, n } = field.geometry else {
        return Err(Error::StencilRange("lattice jet on a radial field".into()));
    };
    if idx.iter().any(|&i| i == 0 || i + 1 >= n) {
        return Err(Error::StencilRange(format!("lattice index {idx:?} of {n}")));
    }
    let at = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let [i, j, k] = idx;
    let lin = at(i, j, k);
    let shift = |d: usize, s: isize| -> [usize; 3] {
        let mut p = idx;
        p[d] = (p[d] as isize + s) as usize;
        p
    };
    let flat = |p: [usize; 3]| at(p[0], p[1], p[2]);
    let (prev, curr, next) = (&field.prev[comp], &field.curr[comp], &field.next[comp]);
    let dt = field.dt;
    let (u, ut, utt) = time_diffs(field, comp, lin);
    let mut d1 = [ut, 0.0, 0.0, 0.0];
    let mut d2 = [[0.0; 4]; 4];
    d2[0][0] = utt;
    for d in 0..3 {
        let (p, m) = (flat(shift(d, 1)), flat(shift(d, -1)));
        d1[d + 1] = (curr[p] - curr[m]) / (2.0 * dx);
        d2[d + 1][d + 1] = (curr[p] - 2.0 * curr[lin] + curr[m]) / (dx * dx);
        let vt = ((next[p] - prev[p]) - (next[m] - prev[m])) / (4.0 * dt * dx);
        d2[0][d + 1] = vt;
        d2[d + 1][0] = vt;
        for e in d + 1..3 {
            let pp = flat({
                let mut q = shift(d, 1);
                q[e] += 1;
                q
            });
            let pm = flat({
                let mut q = shift(d, 1);
                q[e] -= 1;
                q
            });
            let mp = flat({
                let mut q = shift(d, -1);
                q[e] += 1;
                q
            });
            let mm = flat({
                let mut q = shift(d, -1);
                q[e] -= 1;
                q
            });
            let v = (curr[pp] - curr[pm] - curr[mp] + curr[mm]) / (4.0 * dx * dx);
            d2[d + 1][e + 1] = v;
            d2[e + 1][d + 1] = v;
        }
    }
    let x = [
        -half_width + i as f64 * dx,
        -half_width + j as f64 * dx,
        -half_width + k as f64 * dx,
    ];
    Ok(PointJet { x, u, d1, d2 })
}

/// Jet at a site of either geometry.
pub fn jet_at(field: &Field, comp: usize, site: Site) -> Result<PointJet> {
    match site {
        Site::Radial { m, omega } => radial_jet(field, comp, m, omega),
        Site::Lattice(idx) => lattice_jet(field, comp, idx),
    }
}

/// Applies `which` to component `comp` of `field` at `site`.
pub fn apply_vector_field(field: &Field, comp: usize, which: VectorField, site: Site) -> Result<f64> {
    let jet = jet_at(field, comp, site)?;
    Ok(match which {
        VectorField::Z(a) if a < 7 => jet.z1(a),
        VectorField::Z(a) => return Err(Error::StencilRange(format!("no vector field Z_{a}"))),
        VectorField::DPlus(c) => jet.dplus(c),
        VectorField::DMinus(c) => 2.0 * jet.d1[0] - jet.dplus(c),
    })
}

/// `d_r` of a jet (0 at the origin).
pub fn radial_derivative(jet: &PointJet) -> f64 {
    let r = norm(jet.x);
    if r == 0.0 {
        return 0.0;
    }
    (jet.x[0] * jet.d1[1] + jet.x[1] * jet.d1[2] + jet.x[2] * jet.d1[3]) / r
}

/// A scalar array on the lattice `x_i = -half_width + i dx`, `n` per side.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub half_width: f64,
    pub dx: f64,
    pub n: usize,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx
    }

    pub fn sample(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    out.push(f([self.coord(i), self.coord(j), self.coord(k)]));
                }
            }
        }
        out
    }

    fn apply(&self, u: &[f64], op: impl Fn(usize, usize, usize) -> f64) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; u.len()];
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                for k in 1..n - 1 {
                    out[self.index(i, j, k)] = op(i, j, k);
                }
            }
        }
        out
    }

    fn neighbor(&self, i: usize, j: usize, k: usize, axis: usize, s: isize) -> usize {
        let mut p = [i, j, k];
        p[axis] = (p[axis] as isize + s) as usize;
        self.index(p[0], p[1], p[2])
    }

    /// Centered `d_axis` (axis 0..3) on interior points; 0 on the faces.
    pub fn derivative(&self, u: &[f64], axis: usize) -> Vec<f64> {
        self.apply(u, |i, j, k| {
            (u[self.neighbor(i, j, k, axis, 1)] - u[self.neighbor(i, j, k, axis, -1)]) / (2.0 * self.dx)
        })
    }

    /// 7-point Laplacian on interior points; 0 on the faces.
    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let h2 = self.dx * self.dx;
        self.apply(u, |i, j, k| {
            let c = u[self.index(i, j, k)];
            let mut s = -6.0 * c;
            for axis in 0..3 {
                s += u[self.neighbor(i, j, k, axis, 1)] + u[self.neighbor(i, j, k, axis, -1)];
            }
            s / h2
        })
    }

    /// Discrete `Omega_ab = x_a D_b - x_b D_a` for rotation index `0..3`
    /// (`Omega_12`, `Omega_13`, `Omega_23`).
    pub fn rotation(&self, u: &[f64], rot: usize) -> Vec<f64> {
        let (a, b) = ROTATIONS[rot];
        let (a, b) = (a - 1, b - 1);
        self.apply(u, |i, j, k| {
            let x = [self.coord(i), self.coord(j), self.coord(k)];
            let d = |axis: usize| {
                (u[self.neighbor(i, j, k, axis, 1)] - u[self.neighbor(i, j, k, axis, -1)]) / (2.0 * self.dx)
            };
            x[a] * d(b) - x[b] * d(a)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice_field(f: impl Fn(f64, Point) -> f64, lat: &Lattice, t: f64, dt: f64) -> Field {
        Field {
            geometry: Geometry::Cartesian {
                half_width: lat.half_width,
                dx: lat.dx,
                n: lat.n,
            },
            time: t,
            dt,
            speeds: vec![1.0],
            prev: vec![lat.sample(|x| f(t - dt, x))],
            curr: vec![lat.sample(|x| f(t, x))],
            next: vec![lat.sample(|x| f(t + dt, x))],
        }
    }

    #[test]
    fn rotation_of_linear_field_is_exact() {
        let lat = Lattice {
            half_width: 1.0,
            dx: 0.25,
            n: 9,
        };
        let field = lattice_field(|_, x| x[1], &lat, 0.0, 0.1);
        let v = apply_vector_field(&field, 0, VectorField::Z(4), Site::Lattice([6, 3, 4])).unwrap();
        assert!((v - lat.coord(6)).abs() < 1e-15);
        assert!(matches!(
            apply_vector_field(&field, 0, VectorField::Z(1), Site::Lattice([0, 3, 4])),
            Err(Error::StencilRange(_))
        ));
    }

    #[test]
    fn dplus_of_outgoing_wave() {
        // u = p(r - ct) / r on a radial grid, D+ u = -c p / r^2
        let c = 1.0;
        let dr = 1e-3;
        let n = 4000;
        let p = |s: f64| (-(s - 2.0) * (s - 2.0)).exp();
        let t = 0.5;
        let col = |t: f64| (0..n).map(|m| {
            let r = 1.0 + m as f64 * dr;
            p(r - c * t) / r
        }).collect::<Vec<f64>>();
        let field = Field {
            geometry: Geometry::Radial {
                r_min: 1.0,
                dr,
                n,
                angular_mode: 0,
            },
            time: t,
            dt: dr / c,
            speeds: vec![c],
            prev: vec![col(t - dr)],
            curr: vec![col(t)],
            next: vec![col(t + dr)],
        };
        let m = 1500;
        let r = 1.0 + m as f64 * dr;
        let site = Site::Radial {
            m,
            omega: [0.0, 0.6, 0.8],
        };
        let v = apply_vector_field(&field, 0, VectorField::DPlus(c), site).unwrap();
        let want = -c * p(r - c * t) / (r * r);
        assert!((v - want).abs() < 1e-5, "{v} vs {want}");
        let dm = apply_vector_field(&field, 0, VectorField::DMinus(c), site).unwrap();
        let jet = radial_jet(&field, 0, m, [0.0, 0.6, 0.8]).unwrap();
        assert!((dm - (jet.d1[0] - c * radial_derivative(&jet))).abs() < 1e-12);
    }

    #[test]
    fn lattice_operators_on_polynomials() {
        let lat = Lattice {
            half_width: 1.0,
            dx: 0.5,
            n: 5,
        };
        let u = lat.sample(|x| x[0] * x[0] * x[1] + x[2]);
        let lap = lat.laplacian(&u);
        let d0 = lat.derivative(&u, 0);
        let idx = lat.index(3, 1, 2);
        let (x0, x1) = (lat.coord(3), lat.coord(1));
        assert!((lap[idx] - 2.0 * x1).abs() < 1e-12);
        assert!((d0[idx] - 2.0 * x0 * x1).abs() < 1e-12);
    }
}
