use std::collections::BTreeMap;

use num::{BigRational, Signed, ToPrimitive, Zero};

use crate::model::{NullKind, WaveSystem};

/// `(j, k, a, b)` addresses the monomial `(d_a u_j)(d_b u_k)`.
pub type Slot = (usize, usize, usize, usize);

/// Exact rational coefficients of the quadratic part of one `F_i`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadTensor {
    entries: BTreeMap<Slot, BigRational>,
}

/// Exact rational value of a finite float.
///
/// # Panics
/// On non-finite input; validated specs never contain one.
pub fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| panic!("non-finite coefficient {x}"))
}

impl QuadTensor {
    /// Quadratic part of `F_i` with null forms expanded using `c_i`.
    pub fn from_system(sys: &WaveSystem, i: usize) -> Self {
        let mut t = QuadTensor::default();
        let nl = &sys.nonlinearity;
        let c = rat(sys.speeds[i]);
        let c2 = &c * &c;
        for n in nl.null_terms.iter().filter(|n| n.i == i) {
            let coeff = rat(n.coeff);
            match n.kind {
                NullKind::Q0 => {
                    t.add((n.j, n.k, 0, 0), coeff.clone());
                    for a in 1..4 {
                        t.add((n.j, n.k, a, a), -(&c2 * &coeff));
                    }
                }
                NullKind::Qab => {
                    let (a, b) = (n.a.unwrap_or(0), n.b.unwrap_or(0));
                    t.add((n.j, n.k, a, b), coeff.clone());
                    t.add((n.j, n.k, b, a), -coeff);
                }
            }
        }
        for q in nl.general_quadratic.iter().filter(|q| q.i == i) {
            t.add((q.j, q.k, q.a, q.b), rat(q.coeff));
        }
        t
    }

    pub fn add(&mut self, slot: Slot, value: BigRational) {
        if value.is_zero() {
            return;
        }
        let e = self.entries.entry(slot).or_insert_with(BigRational::zero);
        *e += value;
        if e.is_zero() {
            self.entries.remove(&slot);
        }
    }

    pub fn get(&self, slot: Slot) -> BigRational {
        self.entries.get(&slot).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Slot, &BigRational)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn merge(&mut self, other: &QuadTensor) {
        for (s, v) in other.iter() {
            self.add(*s, v.clone());
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(|v| v.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// Float view `(j, k, a, b, coeff)`.
    pub fn to_f64(&self) -> Vec<(usize, usize, usize, usize, f64)> {
        self.entries
            .iter()
            .map(|(&(j, k, a, b), v)| (j, k, a, b, v.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    /// The 4x4 block of the unordered pair `{j, k}` as a form in `X`:
    /// `G^{jk} + (G^{kj})^T` for `j < k`, `G^{jj}` on the diagonal.
    pub fn pair_block(&self, j: usize, k: usize) -> [[BigRational; 4]; 4] {
        let mut m: [[BigRational; 4]; 4] = Default::default();
        for (a, row) in m.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = self.get((j, k, a, b));
                if j != k {
                    *v += self.get((k, j, b, a));
                }
            }
        }
        m
    }
}
