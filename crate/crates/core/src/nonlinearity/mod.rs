//! Null forms, the exact null-condition checker and the speed-pattern
//! splitting of the quadratic part.

pub mod catalog;
mod check;
mod tensor;

pub use check::{check_components, check_null_condition, split_quadratic, ComponentSplit, NullCheck, NullWitness, PairReport, QuadraticSplit};
pub use tensor::{QuadTensor, Slot};

use crate::error::{Error, Result};
use crate::model::{Factor, NullKind, WaveSystem};

/// Space-time gradient `(d_t, d_1, d_2, d_3)`.
pub type Grad4 = [f64; 4];

/// `Q0(v, w; c) = v_t w_t - c^2 grad v . grad w`.
pub fn q0(v: &Grad4, w: &Grad4, c: f64) -> f64 {
    v[0] * w[0] - c * c * (v[1] * w[1] + v[2] * w[2] + v[3] * w[3])
}

/// `Q_ab(v, w) = d_a v d_b w - d_b v d_a w` for `0 <= a < b <= 3`.
pub fn qab(v: &Grad4, w: &Grad4, a: usize, b: usize) -> Result<f64> {
    if !(a < b && b <= 3) {
        return Err(Error::IndexOrder { a, b });
    }
    Ok(v[a] * w[b] - v[b] * w[a])
}

/// Values of `(u, du)` of every component at one space-time point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub u: Vec<f64>,
    pub du: Vec<Grad4>,
}

impl Jet {
    pub fn zero(n: usize) -> Self {
        Jet {
            u: vec![0.0; n],
            du: vec![[0.0; 4]; n],
        }
    }

    fn factor(&self, f: &Factor) -> f64 {
        match *f {
            Factor::U(j) => self.u[j],
            Factor::D { a, j } => self.du[j][a],
        }
    }
}

/// Flattened nonlinearity: every null form expanded into
/// `coeff (d_a u_j)(d_b u_k)` monomials, ready for pointwise evaluation
/// inside the steppers.
#[derive(Debug, Clone, Default)]
pub struct CompiledNonlinearity {
    quad: Vec<(usize, usize, usize, usize, usize, f64)>,
    cubic: Vec<(usize, f64, [Factor; 3])>,
    n: usize,
}

impl CompiledNonlinearity {
    pub fn new(sys: &WaveSystem) -> Self {
        let nl = &sys.nonlinearity;
        let mut quad = Vec::new();
        for t in &nl.null_terms {
            match t.kind {
                NullKind::Q0 => {
                    let c2 = sys.speeds[t.i] * sys.speeds[t.i];
                    quad.push((t.i, t.j, t.k, 0, 0, t.coeff));
                    for a in 1..4 {
                        quad.push((t.i, t.j, t.k, a, a, -c2 * t.coeff));
                    }
                }
                NullKind::Qab => {
                    let (a, b) = (t.a.unwrap_or(0), t.b.unwrap_or(0));
                    quad.push((t.i, t.j, t.k, a, b, t.coeff));
                    quad.push((t.i, t.j, t.k, b, a, -t.coeff));
                }
            }
        }
        for q in &nl.general_quadratic {
            quad.push((q.i, q.j, q.k, q.a, q.b, q.coeff));
        }
        let cubic = nl.cubic_terms.iter().map(|c| (c.i, c.coeff, c.factors)).collect();
        CompiledNonlinearity {
            quad,
            cubic,
            n: sys.n_components(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.quad.is_empty() && self.cubic.is_empty()
    }

    /// Writes `F(u, du)` into `out` (length N).
    pub fn eval_into(&self, jet: &Jet, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for &(i, j, k, a, b, c) in &self.quad {
            out[i] += c * jet.du[j][a] * jet.du[k][b];
        }
        for (i, c, f) in &self.cubic {
            out[*i] += c * jet.factor(&f[0]) * jet.factor(&f[1]) * jet.factor(&f[2]);
        }
    }

    pub fn eval(&self, jet: &Jet) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.eval_into(jet, &mut out);
        out
    }
}

/// `F_i(u, du) = F_i^(2)(du) + H_i(u, du)` for every component.
pub fn evaluate_nonlinearity(sys: &WaveSystem, jet: &Jet) -> Vec<f64> {
    CompiledNonlinearity::new(sys).eval(jet)
}
