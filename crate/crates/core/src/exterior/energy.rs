use std::f64::consts::PI;

use crate::model::{Field, Geometry};

/// Physical energy `1/2 int (u_t^2 + c^2 |grad u|^2)` of a snapshot, over the
/// whole domain and over `{|x| <= b}`, with `u_t` from centered differences.
///
/// In radial geometry the integrals are written through `U = r u`:
/// `2 pi [ int_1^b (U_t^2 + c^2 U_r^2 + c^2 l(l+1) U^2 / r^2) dr - c^2 U(b)^2 / b ]`,
/// which needs no derivative of `u` at the obstacle.
pub fn energies(field: &Field, b: f64) -> (f64, f64) {
    match field.geometry {
        Geometry::Radial {
            r_min,
            dr,
            n,
            angular_mode,
        } => {
            let ell = angular_mode as f64;
            let mb = (((b - r_min) / dr).round().max(0.0) as usize).min(n - 1);
            let (mut total, mut local) = (0.0, 0.0);
            for (c, &speed) in field.speeds.iter().enumerate() {
                let c2 = speed * speed;
                let r = |m: usize| r_min + m as f64 * dr;
                let big = |m: usize| r(m) * field.curr[c][m];
                let dens = |m: usize| {
                    let ut = r(m) * (field.next[c][m] - field.prev[c][m]) / (2.0 * field.dt);
                    let ur = if m == 0 {
                        (-3.0 * big(0) + 4.0 * big(1) - big(2)) / (2.0 * dr)
                    } else if m == n - 1 {
                        (3.0 * big(m) - 4.0 * big(m - 1) + big(m - 2)) / (2.0 * dr)
                    } else {
                        (big(m + 1) - big(m - 1)) / (2.0 * dr)
                    };
                    ut * ut + c2 * ur * ur + c2 * ell * (ell + 1.0) * big(m) * big(m) / (r(m) * r(m))
                };
                let trap = |hi: usize| -> f64 {
                    if hi == 0 {
                        return 0.0;
                    }
                    let inner: f64 = (1..hi).map(dens).sum();
                    dr * (inner + 0.5 * (dens(0) + dens(hi)))
                };
                total += 2.0 * PI * (trap(n - 1) - c2 * big(n - 1).powi(2) / r(n - 1));
                local += 2.0 * PI * (trap(mb) - c2 * big(mb).powi(2) / r(mb));
            }
            (total, local)
        }
        Geometry::Cartesian { half_width, dx, n } => {
            let slab = n * n;
            let h2 = 0.5 / dx;
            let (mut total, mut local) = (0.0, 0.0);
            for (c, &speed) in field.speeds.iter().enumerate() {
                let c2 = speed * speed;
                let u = &field.curr[c];
                for i in 1..n - 1 {
                    let x = -half_width + i as f64 * dx;
                    for j in 1..n - 1 {
                        let y = -half_width + j as f64 * dx;
                        for k in 1..n - 1 {
                            let z = -half_width + k as f64 * dx;
                            let idx = i * slab + j * n + k;
                            let ut = (field.next[c][idx] - field.prev[c][idx]) / (2.0 * field.dt);
                            let gx = (u[idx + slab] - u[idx - slab]) * h2;
                            let gy = (u[idx + n] - u[idx - n]) * h2;
                            let gz = (u[idx + 1] - u[idx - 1]) * h2;
                            let e = ut * ut + c2 * (gx * gx + gy * gy + gz * gz);
                            total += e;
                            if x * x + y * y + z * z <= b * b {
                                local += e;
                            }
                        }
                    }
                }
            }
            let w = 0.5 * dx * dx * dx;
            (w * total, w * local)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_radial_profile_energy() {
        // u = (r - 1)(3 - r) on [1, 3], zero time derivative, c = 1:
        // U = r u, energy = 2 pi int (U_r^2) - boundary term (zero: U(3) = 0).
        let (r_min, dr, n) = (1.0, 0.001, 2001);
        let u: Vec<f64> = (0..n)
            .map(|m| {
                let r = r_min + m as f64 * dr;
                (r - 1.0) * (3.0 - r)
            })
            .collect();
        let f = Field {
            geometry: Geometry::Radial {
                r_min,
                dr,
                n,
                angular_mode: 0,
            },
            time: 0.0,
            dt: dr,
            speeds: vec![1.0],
            prev: vec![u.clone()],
            curr: vec![u.clone()],
            next: vec![u],
        };
        let (total, local) = energies(&f, 3.0);
        // 1/2 int 4 pi r^2 u_r^2 dr with u_r = 4 - 2r
        let exact = 2.0 * PI * 184.0 / 15.0;
        assert!((total - exact).abs() / exact < 1e-5, "{total} vs {exact}");
        assert!((local - total).abs() < 1e-12);
        let (_, half) = energies(&f, 2.0);
        // int_1^2 r^2 (4 - 2r)^2 dr = 32/15
        let exact_half = 2.0 * PI * 32.0 / 15.0;
        assert!((half - exact_half).abs() / exact_half < 1e-5, "{half} vs {exact_half}");
    }
}
