//! Exact decision of the null condition.
//!
//! For component `i` only components of the same speed survive the
//! restriction to `Lambda_i`. Substituting `d u_j = mu_j X` turns the
//! quadratic part into `sum_{j <= k} mu_j mu_k X^T M_jk X` with one 4x4
//! block per unordered pair, so the condition holds iff every block's form
//! vanishes on the cone `X0^2 = c^2 |X'|^2`. Reducing modulo that relation
//! leaves the unique representative
//!
//! ```text
//! sum_a 2 S_0a X0 Xa + sum_{a<=b} (S_ab (2 - delta_ab) + c^2 S_00 delta_ab) Xa Xb,
//! ```
//!
//! (`S` the symmetric part of `M`), and the form vanishes on the cone iff
//! all ten coefficients are zero. Everything runs in exact rationals built
//! from the binary values of the float coefficients.

use std::collections::BTreeMap;

use num::{BigRational, One, Signed, ToPrimitive, Zero};

use super::tensor::{rat, QuadTensor};
use crate::model::WaveSystem;

#[derive(Debug, Clone, PartialEq)]
pub struct NullWitness {
    pub component: usize,
    /// Unordered pair `(j, k)` whose block fails.
    pub pair: (usize, usize),
    /// Name of the first non-vanishing reduced coefficient, e.g. `X0*X0`.
    pub coefficient: String,
    /// The `u` slot. Unused by semilinear quadratic parts; equals `mu`.
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    /// The second-derivative slot. Unused by semilinear quadratic parts;
    /// equals `mu`.
    pub nu: Vec<f64>,
    pub x: [f64; 4],
    pub speed: f64,
    pub value: f64,
}

impl std::fmt::Display for NullWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "pair=({},{}) coeff={} X=({:e},{:e},{:e},{:e}) mu={:?} value={:e}",
            self.pair.0,
            self.pair.1,
            self.coefficient,
            self.x[0],
            self.x[1],
            self.x[2],
            self.x[3],
            self.mu,
            self.value
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NullCheck {
    Holds,
    Fails(NullWitness),
}

impl NullCheck {
    pub fn holds(&self) -> bool {
        matches!(self, NullCheck::Holds)
    }

    pub fn witness(&self) -> Option<&NullWitness> {
        match self {
            NullCheck::Holds => None,
            NullCheck::Fails(w) => Some(w),
        }
    }
}

type Block = [[BigRational; 4]; 4];

fn reduced_coefficients(m: &Block, c2: &BigRational) -> Vec<(String, BigRational)> {
    let mut out = Vec::with_capacity(10);
    let two = BigRational::from_integer(2.into());
    let half = BigRational::new(1.into(), 2.into());
    let s = |a: usize, b: usize| (&m[a][b] + &m[b][a]) * &half;
    for a in 1..4 {
        out.push((format!("X0*X{a}"), &two * s(0, a)));
    }
    for a in 1..4 {
        for b in a..4 {
            let v = if a == b {
                s(a, a) + c2 * s(0, 0)
            } else {
                &two * s(a, b)
            };
            out.push((format!("X{a}*X{b}"), v));
        }
    }
    out
}

/// Candidate cone points `(+-c, omega)`, `X = (c, 1, 0, 0)` first. The six
/// rational directions detect any nonzero reduced form.
fn cone_points(c: &BigRational) -> Vec<[BigRational; 4]> {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let dirs = [
        [r(1, 1), r(0, 1), r(0, 1)],
        [r(0, 1), r(1, 1), r(0, 1)],
        [r(0, 1), r(0, 1), r(1, 1)],
        [r(3, 5), r(4, 5), r(0, 1)],
        [r(3, 5), r(0, 1), r(4, 5)],
        [r(0, 1), r(3, 5), r(4, 5)],
    ];
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        for d in &dirs {
            let x0 = c * BigRational::from_integer(sign.into());
            out.push([x0, d[0].clone(), d[1].clone(), d[2].clone()]);
        }
    }
    out
}

fn form_value(t: &QuadTensor, mu: &[BigRational], x: &[BigRational; 4]) -> BigRational {
    let mut v = BigRational::zero();
    for (&(j, k, a, b), g) in t.iter() {
        if mu[j].is_zero() || mu[k].is_zero() {
            continue;
        }
        v += g * &mu[j] * &mu[k] * &x[a] * &x[b];
    }
    v
}

/// Verdict for one component.
pub fn check_component(sys: &WaveSystem, i: usize) -> NullCheck {
    let n = sys.n_components();
    let same = sys.same_speed(i);
    let tensor = QuadTensor::from_system(sys, i);
    let c = rat(sys.speeds[i]);
    let c2 = &c * &c;
    for (pj, &j) in same.iter().enumerate() {
        for &k in &same[pj..] {
            let block = tensor.pair_block(j, k);
            let Some((name, _)) = reduced_coefficients(&block, &c2)
                .into_iter()
                .find(|(_, v)| !v.is_zero())
            else {
                continue;
            };
            // Restrict to Lambda_i: foreign-speed components get mu = 0.
            let mut restricted = QuadTensor::default();
            for (&s, v) in tensor.iter() {
                if same.contains(&s.0) && same.contains(&s.1) {
                    restricted.add(s, v.clone());
                }
            }
            let unit = |idx: &[usize]| {
                let mut mu = vec![BigRational::zero(); n];
                for &q in idx {
                    mu[q] = BigRational::one();
                }
                mu
            };
            let mus = if j == k {
                vec![unit(&[j])]
            } else {
                vec![unit(&[j]), unit(&[k]), unit(&[j, k])]
            };
            for x in cone_points(&c) {
                for mu in &mus {
                    let v = form_value(&restricted, mu, &x);
                    if !v.is_zero() {
                        let muf: Vec<f64> = mu.iter().map(|m| m.to_f64().unwrap_or(0.0)).collect();
                        return NullCheck::Fails(NullWitness {
                            component: i,
                            pair: (j, k),
                            coefficient: name,
                            lambda: muf.clone(),
                            mu: muf.clone(),
                            nu: muf,
                            x: [0, 1, 2, 3].map(|a| x[a].to_f64().unwrap_or(f64::NAN)),
                            speed: sys.speeds[i],
                            value: v.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
            }
            unreachable!("nonzero reduced form must be exposed by a candidate cone point");
        }
    }
    NullCheck::Holds
}

/// Verdict per component, in order.
pub fn check_components(sys: &WaveSystem) -> Vec<NullCheck> {
    (0..sys.n_components()).map(|i| check_component(sys, i)).collect()
}

/// Decides the null condition exactly; returns the first witness found
/// (lowest component, then lowest pair, then first candidate cone point).
pub fn check_null_condition(sys: &WaveSystem) -> NullCheck {
    for i in 0..sys.n_components() {
        let r = check_component(sys, i);
        if !r.holds() {
            return r;
        }
    }
    NullCheck::Holds
}

/// Null-form content and residual of one same-speed pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub j: usize,
    pub k: usize,
    /// Coefficient of `Q0(u_j, u_k; c_i)`.
    pub a: f64,
    /// Coefficients of `Q_ab(u_j, u_k)`, `(a, b, B)`.
    pub b: Vec<(usize, usize, f64)>,
    /// Frobenius norm of `sym(M) - A eta`.
    pub residual_norm: f64,
    pub residual_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSplit {
    pub component: usize,
    /// Null part in the `(j <= k)` slots.
    pub null: QuadTensor,
    /// Pairs with `c_j != c_k`.
    pub r_i: QuadTensor,
    /// Pairs with `c_j = c_k != c_i`.
    pub r_ii: QuadTensor,
    /// Same-speed input minus the null part, entry by entry.
    pub residual: QuadTensor,
    pub pairs: Vec<PairReport>,
}

impl ComponentSplit {
    pub fn recompose(&self) -> QuadTensor {
        let mut t = self.null.clone();
        t.merge(&self.r_i);
        t.merge(&self.r_ii);
        t.merge(&self.residual);
        t
    }

    pub fn residual_zero(&self) -> bool {
        self.pairs.iter().all(|p| p.residual_zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSplit {
    pub components: Vec<ComponentSplit>,
}

impl QuadraticSplit {
    pub fn residual_zero(&self) -> bool {
        self.components.iter().all(|c| c.residual_zero())
    }
}

/// Splits every `F_i^(2)` into null part, cross-speed part `R_I`,
/// equal-foreign-speed part `R_II` and the non-null residual. The null part
/// of each same-speed pair is its orthogonal projection onto
/// `span{eta} + antisymmetric`, i.e. the least-squares `(A, B)` fit.
pub fn split_quadratic(sys: &WaveSystem) -> QuadraticSplit {
    let components = (0..sys.n_components())
        .map(|i| split_component(sys, i))
        .collect();
    QuadraticSplit { components }
}

fn split_component(sys: &WaveSystem, i: usize) -> ComponentSplit {
    let tensor = QuadTensor::from_system(sys, i);
    let sp = &sys.speeds;
    let c = rat(sp[i]);
    let c2 = &c * &c;
    let mut out = ComponentSplit {
        component: i,
        null: QuadTensor::default(),
        r_i: QuadTensor::default(),
        r_ii: QuadTensor::default(),
        residual: QuadTensor::default(),
        pairs: Vec::new(),
    };
    let mut same_pairs: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for (&(j, k, a, b), v) in tensor.iter() {
        if sp[j] != sp[k] {
            out.r_i.add((j, k, a, b), v.clone());
        } else if sp[j] != sp[i] {
            out.r_ii.add((j, k, a, b), v.clone());
        } else {
            out.residual.add((j, k, a, b), v.clone());
            same_pairs.insert((j.min(k), j.max(k)), ());
        }
    }
    let half = BigRational::new(1.into(), 2.into());
    let eta = |a: usize| {
        if a == 0 {
            BigRational::one()
        } else {
            -c2.clone()
        }
    };
    let eta_norm2 = BigRational::one() + BigRational::from_integer(3.into()) * &c2 * &c2;
    for &(j, k) in same_pairs.keys() {
        let m = out.residual.pair_block(j, k);
        let mut proj = BigRational::zero();
        for a in 0..4 {
            proj += &m[a][a] * eta(a);
        }
        let a_coef = proj / &eta_norm2;
        let mut null = QuadTensor::default();
        for a in 0..4 {
            null.add((j, k, a, a), &a_coef * eta(a));
        }
        let mut bs = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                let bab = (&m[a][b] - &m[b][a]) * &half;
                if !bab.is_zero() {
                    bs.push((a, b, bab.to_f64().unwrap_or(f64::NAN)));
                    null.add((j, k, a, b), bab.clone());
                    null.add((j, k, b, a), -bab);
                }
            }
        }
        let mut norm2 = 0.0;
        let mut zero = true;
        for a in 0..4 {
            for b in 0..4 {
                let mut r = (&m[a][b] + &m[b][a]) * &half;
                if a == b {
                    r -= &a_coef * eta(a);
                }
                if !r.is_zero() {
                    zero = false;
                    norm2 += r.abs().to_f64().unwrap_or(f64::INFINITY).powi(2);
                }
            }
        }
        for (s, v) in null.iter() {
            out.residual.add(*s, -v.clone());
        }
        out.null.merge(&null);
        out.pairs.push(PairReport {
            j,
            k,
            a: a_coef.to_f64().unwrap_or(f64::NAN),
            b: bs,
            residual_norm: norm2.sqrt(),
            residual_zero: zero,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NonlinearitySpec, NullTerm, QuadTerm};
    use proptest::prelude::*;

    fn quad(speeds: Vec<f64>, terms: Vec<QuadTerm>) -> WaveSystem {
        WaveSystem::new(
            speeds,
            NonlinearitySpec {
                general_quadratic: terms,
                ..Default::default()
            },
        )
    }

    fn nulls(speeds: Vec<f64>, terms: Vec<NullTerm>) -> WaveSystem {
        WaveSystem::new(
            speeds,
            NonlinearitySpec {
                null_terms: terms,
                ..Default::default()
            },
        )
    }

    #[test]
    fn q0_holds() {
        for c in [1.0, 0.3, 2.5] {
            assert!(check_null_condition(&nulls(vec![c], vec![NullTerm::q0(0, 0, 0, 1.0)])).holds());
        }
    }

    #[test]
    fn dt_squared_witness() {
        let c = 1.5;
        let r = check_null_condition(&quad(vec![c], vec![QuadTerm::new(0, 0, 0, 0, 0, 1.0)]));
        let w = r.witness().expect("fails");
        assert_eq!(w.x, [c, 1.0, 0.0, 0.0]);
        assert_eq!(w.mu, vec![1.0]);
        assert_eq!(w.lambda, vec![1.0]);
        assert_eq!(w.value, c * c);
    }

    #[test]
    fn cross_and_foreign_speed_terms_hold() {
        let r_i = quad(vec![1.0, 2.0], vec![QuadTerm::new(0, 0, 1, 0, 0, 1.0)]);
        assert!(check_null_condition(&r_i).holds());
        let r_ii = quad(vec![1.0, 2.0], vec![QuadTerm::new(0, 1, 1, 0, 0, 1.0)]);
        assert!(check_null_condition(&r_ii).holds());
        let s = split_quadratic(&r_i);
        assert_eq!(s.components[0].r_i.len(), 1);
        assert!(s.components[0].null.is_zero() && s.components[0].residual.is_zero());
        let s = split_quadratic(&r_ii);
        assert_eq!(s.components[0].r_ii.len(), 1);
    }

    #[test]
    fn written_out_q0_splits_to_a_equal_one() {
        let c = 2.0;
        let mut terms = vec![QuadTerm::new(0, 0, 0, 0, 0, 1.0)];
        for a in 1..4 {
            terms.push(QuadTerm::new(0, 0, 0, a, a, -c * c));
        }
        let sys = quad(vec![c], terms);
        let s = split_quadratic(&sys);
        assert_eq!(s.components[0].pairs[0].a, 1.0);
        assert!(s.residual_zero());
        assert!(s.components[0].residual.is_zero());
    }

    #[test]
    fn off_diagonal_pair_with_both_orders() {
        // Q0(u0, u1) written half in each order still satisfies the condition.
        let sys = quad(
            vec![1.0, 1.0],
            vec![
                QuadTerm::new(0, 0, 1, 0, 0, 0.5),
                QuadTerm::new(0, 1, 0, 0, 0, 0.5),
                QuadTerm::new(0, 0, 1, 1, 1, -1.0),
                QuadTerm::new(0, 0, 1, 2, 2, -1.0),
                QuadTerm::new(0, 1, 0, 3, 3, -1.0),
            ],
        );
        assert!(check_null_condition(&sys).holds());
        let s = split_quadratic(&sys);
        assert!(s.residual_zero());
        assert_eq!(s.components[0].recompose(), QuadTensor::from_system(&sys, 0));
    }

    #[test]
    fn mixed_pair_witness_uses_combined_mu() {
        // (d_t u0)(d_t u1): diagonal blocks vanish, so only mu = e0 + e1 exposes it.
        let sys = quad(vec![1.0, 1.0], vec![QuadTerm::new(0, 0, 1, 0, 0, 1.0)]);
        let w = check_null_condition(&sys).witness().cloned().unwrap();
        assert_eq!(w.pair, (0, 1));
        assert_eq!(w.mu, vec![1.0, 1.0]);
        assert_eq!(w.value, 1.0);
    }

    /// Least-squares oracle for (d_1 u)^2 via SVD over the basis
    /// {eta} + six antisymmetric matrices.
    #[test]
    fn d1_squared_residual_matches_linear_algebra_oracle() {
        use nalgebra::{DMatrix, DVector};
        for c in [1.0, 0.5, 3.0] {
            let sys = quad(vec![c], vec![QuadTerm::new(0, 0, 0, 1, 1, 1.0)]);
            let split = split_quadratic(&sys);
            let p = &split.components[0].pairs[0];

            let mut cols: Vec<DVector<f64>> = Vec::new();
            let mut eta = DVector::zeros(16);
            eta[0] = 1.0;
            for a in 1..4 {
                eta[a * 4 + a] = -c * c;
            }
            cols.push(eta);
            for a in 0..4 {
                for b in a + 1..4 {
                    let mut v = DVector::zeros(16);
                    v[a * 4 + b] = 1.0;
                    v[b * 4 + a] = -1.0;
                    cols.push(v);
                }
            }
            let basis = DMatrix::from_columns(&cols);
            let mut rhs = DVector::zeros(16);
            rhs[5] = 1.0;
            let sol = basis.clone().svd(true, true).solve(&rhs, 1e-14).unwrap();
            let resid = (&rhs - &basis * &sol).norm();
            assert!((sol[0] - p.a).abs() < 1e-12, "A: {} vs {}", sol[0], p.a);
            assert!((resid - p.residual_norm).abs() < 1e-12);
            assert!(!p.residual_zero);
            assert!((p.a + c * c / (1.0 + 3.0 * c.powi(4))).abs() < 1e-14);
        }
    }

    fn random_null_system(coeffs: &[(f64, usize, usize)], speeds: &[f64]) -> WaveSystem {
        let n = speeds.len();
        let mut terms = Vec::new();
        for (idx, &(w, a, b)) in coeffs.iter().enumerate() {
            let i = idx % n;
            let same: Vec<usize> = (0..n).filter(|&j| speeds[j] == speeds[i]).collect();
            let j = same[idx % same.len()];
            let k = same[(idx / 2) % same.len()];
            if idx % 2 == 0 {
                terms.push(NullTerm::q0(i, j, k, w));
            } else {
                let (a, b) = (a.min(b), a.max(b));
                if a != b {
                    terms.push(NullTerm::qab(i, j, k, a, b, w));
                }
            }
        }
        nulls(speeds.to_vec(), terms)
    }

    proptest! {
        #[test]
        fn null_form_systems_always_hold(
            coeffs in proptest::collection::vec((-10.0f64..10.0, 0usize..4, 0usize..4), 0..12),
            speed_idx in proptest::collection::vec(0usize..2, 1..4),
        ) {
            let speeds: Vec<f64> = speed_idx.iter().map(|&s| [1.0, 2.5][s]).collect();
            let sys = random_null_system(&coeffs, &speeds);
            prop_assert!(check_null_condition(&sys).holds());
            prop_assert!(split_quadratic(&sys).residual_zero());
        }

        #[test]
        fn verdict_invariant_under_scaling(
            coeffs in proptest::collection::vec((-10.0f64..10.0, 0usize..4, 0usize..4), 1..8),
            extra in proptest::option::of((0usize..4, 0usize..4, -5.0f64..5.0)),
            scale in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
        ) {
            let mut sys = random_null_system(&coeffs, &[1.3]);
            if let Some((a, b, w)) = extra {
                if w != 0.0 {
                    sys.nonlinearity.general_quadratic.push(QuadTerm::new(0, 0, 0, a, b, w));
                }
            }
            let mut scaled = sys.clone();
            for t in &mut scaled.nonlinearity.null_terms { t.coeff *= scale; }
            for t in &mut scaled.nonlinearity.general_quadratic { t.coeff *= scale; }
            prop_assert_eq!(check_null_condition(&sys).holds(), check_null_condition(&scaled).holds());
        }

        #[test]
        fn recomposition_is_exact(
            entries in proptest::collection::vec(
                (0usize..3, 0usize..3, 0usize..3, 0usize..4, 0usize..4, -4.0f64..4.0), 0..20),
        ) {
            let speeds = vec![1.0, 1.0, 2.0];
            let terms = entries.iter().map(|&(i, j, k, a, b, w)| QuadTerm::new(i, j, k, a, b, w)).collect();
            let sys = quad(speeds, terms);
            let split = split_quadratic(&sys);
            let checks = check_components(&sys);
            for (i, comp) in split.components.iter().enumerate() {
                prop_assert_eq!(comp.recompose(), QuadTensor::from_system(&sys, i));
                prop_assert_eq!(comp.residual_zero(), checks[i].holds());
            }
        }
    }
}
