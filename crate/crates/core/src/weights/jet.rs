//! First and second space-time derivatives at a point, and the
//! vector-field sums `|v|_m` built from them.
//!
//! `Z = (d_t, d_1, d_2, d_3, Omega_12, Omega_13, Omega_23)` and
//! `Z^alpha = Z_0^{alpha_0} ... Z_6^{alpha_6}`, so in a second-order
//! product `Z_a Z_b` with `a <= b` the field `Z_b` acts first.

use crate::model::Point;

/// Index pairs `(i, j)` of `Omega_ij` in `Z_4, Z_5, Z_6`.
pub const ROTATIONS: [(usize, usize); 3] = [(1, 2), (1, 3), (2, 3)];

/// Value, gradient and Hessian of a function at `(t, x)`. Index 0 is
/// time, 1..=3 the Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointJet {
    pub x: Point,
    pub u: f64,
    pub d1: [f64; 4],
    pub d2: [[f64; 4]; 4],
}

impl PointJet {
    fn xc(&self, i: usize) -> f64 {
        self.x[i - 1]
    }

    /// `Z_a u`.
    pub fn z1(&self, a: usize) -> f64 {
        if a < 4 {
            return self.d1[a];
        }
        let (i, j) = ROTATIONS[a - 4];
        self.xc(i) * self.d1[j] - self.xc(j) * self.d1[i]
    }

    /// `Z_a (d_c u)` for a derivative index `c`.
    pub fn z1_of_derivative(&self, a: usize, c: usize) -> f64 {
        if a < 4 {
            return self.d2[a][c];
        }
        let (i, j) = ROTATIONS[a - 4];
        self.xc(i) * self.d2[j][c] - self.xc(j) * self.d2[i][c]
    }

    /// `Z_a Z_b u` for `a <= b`.
    pub fn z2(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a <= b);
        if b < 4 {
            return self.d2[a][b];
        }
        let (i, j) = ROTATIONS[b - 4];
        // Z_b u = x_i d_j u - x_j d_i u
        if a == 0 {
            return self.xc(i) * self.d2[0][j] - self.xc(j) * self.d2[0][i];
        }
        if a < 4 {
            let delta = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
            return delta(a, i) * self.d1[j] - delta(a, j) * self.d1[i]
                + self.xc(i) * self.d2[a][j]
                - self.xc(j) * self.d2[a][i];
        }
        // Omega_kl (x_i d_j u - x_j d_i u)
        let (k, l) = ROTATIONS[a - 4];
        let om_x = |p: usize| {
            // Omega_kl x_p = x_k delta_lp - x_l delta_kp
            let mut v = 0.0;
            if l == p {
                v += self.xc(k);
            }
            if k == p {
                v -= self.xc(l);
            }
            v
        };
        let om_d = |p: usize| self.xc(k) * self.d2[l][p] - self.xc(l) * self.d2[k][p];
        om_x(i) * self.d1[j] + self.xc(i) * om_d(j) - om_x(j) * self.d1[i] - self.xc(j) * om_d(i)
    }

    /// `|u|_m` for `m <= 2`, all seven fields.
    pub fn norm(&self, m: usize) -> f64 {
        self.norm_over(m, 0)
    }

    /// `|u|_m` over the spatial family (`d_1..d_3` and the rotations).
    pub fn norm_spatial(&self, m: usize) -> f64 {
        self.norm_over(m, 1)
    }

    fn norm_over(&self, m: usize, first: usize) -> f64 {
        assert!(m <= 2, "jets carry two derivatives");
        let mut s = self.u.abs();
        if m >= 1 {
            s += (first..7).map(|a| self.z1(a).abs()).sum::<f64>();
        }
        if m >= 2 {
            for a in first..7 {
                for b in a..7 {
                    s += self.z2(a, b).abs();
                }
            }
        }
        s
    }

    /// `|d u|_k = sum_c |d_c u|_k` for `k <= 1` (`c` over all four
    /// derivatives when `with_time`, else spatial only).
    pub fn norm_gradient(&self, k: usize, with_time: bool) -> f64 {
        assert!(k <= 1, "jets carry two derivatives");
        let first = if with_time { 0 } else { 1 };
        let mut s = 0.0;
        for c in first..4 {
            s += self.d1[c].abs();
            if k == 1 {
                s += (first..7).map(|a| self.z1_of_derivative(a, c).abs()).sum::<f64>();
            }
        }
        s
    }

    /// `(d_t + c d_r) u`.
    pub fn dplus(&self, c: f64) -> f64 {
        let r = crate::model::profile::norm(self.x);
        if r == 0.0 {
            return self.d1[0];
        }
        let dr = (self.x[0] * self.d1[1] + self.x[1] * self.d1[2] + self.x[2] * self.d1[3]) / r;
        self.d1[0] + c * dr
    }

    /// Jet of a function of `(t, r)` at `x = r omega` from its radial
    /// derivatives `(f, f_t, f_r, f_tt, f_tr, f_rr)`.
    pub fn from_radial(r: f64, omega: Point, f: [f64; 6]) -> Self {
        let [u, ft, fr, ftt, ftr, frr] = f;
        let x = [r * omega[0], r * omega[1], r * omega[2]];
        let mut d1 = [ft, 0.0, 0.0, 0.0];
        let mut d2 = [[0.0; 4]; 4];
        d2[0][0] = ftt;
        for i in 0..3 {
            d1[i + 1] = fr * omega[i];
            d2[0][i + 1] = ftr * omega[i];
            d2[i + 1][0] = ftr * omega[i];
            for j in 0..3 {
                let delta = if i == j { fr / r } else { 0.0 };
                d2[i + 1][j + 1] = (frr - fr / r) * omega[i] * omega[j] + delta;
            }
        }
        PointJet { x, u, d1, d2 }
    }

    /// Jet by centered differences of a time-independent function.
    pub fn from_spatial_fd(f: &dyn Fn(Point) -> f64, x: Point, h: f64) -> Self {
        let shift = |p: &mut Point, i: usize, s: f64| p[i] += s;
        let at = |moves: &[(usize, f64)]| {
            let mut p = x;
            for &(i, s) in moves {
                shift(&mut p, i, s);
            }
            f(p)
        };
        let u = f(x);
        let mut d1 = [0.0; 4];
        let mut d2 = [[0.0; 4]; 4];
        for i in 0..3 {
            let (fp, fm) = (at(&[(i, h)]), at(&[(i, -h)]));
            d1[i + 1] = (fp - fm) / (2.0 * h);
            d2[i + 1][i + 1] = (fp - 2.0 * u + fm) / (h * h);
            for j in i + 1..3 {
                let v = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)])
                    + at(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
                d2[i + 1][j + 1] = v;
                d2[j + 1][i + 1] = v;
            }
        }
        PointJet { x, u, d1, d2 }
    }
}

/// Directions on which radial jets are evaluated; the sup over the sphere
/// of the Cartesian sums is approximated by the max over these.
pub fn sample_directions() -> [Point; 3] {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let b = 1.0 / 3f64.sqrt();
    [[1.0, 0.0, 0.0], [a, a, 0.0], [b, b, b]]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f = x1^2 x2 + 3 x3 t + t^2, exact jet.
    fn poly_jet(t: f64, x: Point) -> PointJet {
        let [x1, x2, x3] = x;
        let u = x1 * x1 * x2 + 3.0 * x3 * t + t * t;
        let d1 = [3.0 * x3 + 2.0 * t, 2.0 * x1 * x2, x1 * x1, 3.0 * t];
        let mut d2 = [[0.0; 4]; 4];
        d2[0][0] = 2.0;
        d2[0][3] = 3.0;
        d2[3][0] = 3.0;
        d2[1][1] = 2.0 * x2;
        d2[1][2] = 2.0 * x1;
        d2[2][1] = 2.0 * x1;
        PointJet { x, u, d1, d2 }
    }

    #[test]
    fn rotation_of_linear_field() {
        // Omega_12 x2 = x1
        let jet = PointJet {
            x: [0.7, -0.3, 1.1],
            u: -0.3,
            d1: [0.0, 0.0, 1.0, 0.0],
            d2: [[0.0; 4]; 4],
        };
        assert_eq!(jet.z1(4), 0.7);
    }

    #[test]
    fn second_products_match_symbolic() {
        let (t, x) = (0.4, [0.5, -1.2, 2.0]);
        let j = poly_jet(t, x);
        let [x1, x2, x3] = x;
        // Omega_12 f = x1 * x1^2 - x2 * 2 x1 x2 = x1^3 - 2 x1 x2^2
        let om12 = x1.powi(3) - 2.0 * x1 * x2 * x2;
        assert!((j.z1(4) - om12).abs() < 1e-14);
        // d_1 Omega_12 f = 3 x1^2 - 2 x2^2
        assert!((j.z2(1, 4) - (3.0 * x1 * x1 - 2.0 * x2 * x2)).abs() < 1e-13);
        // Omega_12 Omega_12 f: Omega_12 (x1^3 - 2 x1 x2^2)
        //   = x1 * (-4 x1 x2) - x2 * (3 x1^2 - 2 x2^2)
        let want = -4.0 * x1 * x1 * x2 - x2 * (3.0 * x1 * x1 - 2.0 * x2 * x2);
        assert!((j.z2(4, 4) - want).abs() < 1e-13);
        // Omega_13 f = x1 * 3t - x3 * 2 x1 x2; Omega_12 of it:
        //   x1 * d2(...) - x2 * d1(...) = x1 * (-2 x1 x3) - x2 * (3t - 2 x2 x3)
        let want = x1 * (-2.0 * x1 * x3) - x2 * (3.0 * t - 2.0 * x2 * x3);
        assert!((j.z2(4, 5) - want).abs() < 1e-13);
    }

    #[test]
    fn radial_jets_vanish_under_rotations() {
        let j = PointJet::from_radial(2.0, sample_directions()[2], [0.3, 0.1, -0.7, 0.2, 0.5, 1.3]);
        for a in 4..7 {
            assert!(j.z1(a).abs() < 1e-15);
            for b in a..7 {
                assert!(j.z2(a, b).abs() < 1e-14);
            }
        }
        assert!(j.z1_of_derivative(4, 1).abs() > 0.0);
    }

    #[test]
    fn dplus_of_outgoing_profile() {
        // u = p(r - ct) / r, D+ u = -p / r^2
        let c = 2.0;
        let (r, t) = (3.0, 0.5);
        let p = |s: f64| (-(s - 1.0) * (s - 1.0)).exp();
        let dp = |s: f64| -2.0 * (s - 1.0) * p(s);
        let s = r - c * t;
        let ft = -c * dp(s) / r;
        let fr = dp(s) / r - p(s) / (r * r);
        let j = PointJet::from_radial(r, [0.0, 1.0, 0.0], [p(s) / r, ft, fr, 0.0, 0.0, 0.0]);
        assert!((j.dplus(c) + c * p(s) / (r * r)).abs() < 1e-14);
    }
}
