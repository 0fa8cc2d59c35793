use serde::{Deserialize, Serialize};

/// `(d_t^2 - c_i^2 Lap) u_i = F_i(u, du)`, `i = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSystem {
    pub speeds: Vec<f64>,
    pub nonlinearity: NonlinearitySpec,
}

impl WaveSystem {
    pub fn new(speeds: Vec<f64>, nonlinearity: NonlinearitySpec) -> Self {
        WaveSystem {
            speeds,
            nonlinearity,
        }
    }

    pub fn linear(speeds: Vec<f64>) -> Self {
        Self::new(speeds, NonlinearitySpec::default())
    }

    pub fn n_components(&self) -> usize {
        self.speeds.len()
    }

    pub fn c_max(&self) -> f64 {
        self.speeds.iter().copied().fold(0.0, f64::max)
    }

    /// Components sharing the speed of component `i` (the support of `Lambda_i`).
    pub fn same_speed(&self, i: usize) -> Vec<usize> {
        (0..self.speeds.len())
            .filter(|&j| self.speeds[j] == self.speeds[i])
            .collect()
    }

    pub fn is_linear(&self) -> bool {
        self.nonlinearity.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullKind {
    Q0,
    Qab,
}

/// `coeff * Q0(u_j, u_k; c_i)` or `coeff * Q_ab(u_j, u_k)` in `F_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullTerm {
    pub kind: NullKind,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    pub coeff: f64,
}

impl NullTerm {
    pub fn q0(i: usize, j: usize, k: usize, coeff: f64) -> Self {
        NullTerm {
            kind: NullKind::Q0,
            i,
            j,
            k,
            a: None,
            b: None,
            coeff,
        }
    }

    pub fn qab(i: usize, j: usize, k: usize, a: usize, b: usize, coeff: f64) -> Self {
        NullTerm {
            kind: NullKind::Qab,
            i,
            j,
            k,
            a: Some(a),
            b: Some(b),
            coeff,
        }
    }
}

/// `coeff * (d_a u_j)(d_b u_k)` in `F_i`, no speed restriction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadTerm {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub a: usize,
    pub b: usize,
    pub coeff: f64,
}

impl QuadTerm {
    pub fn new(i: usize, j: usize, k: usize, a: usize, b: usize, coeff: f64) -> Self {
        QuadTerm {
            i,
            j,
            k,
            a,
            b,
            coeff,
        }
    }
}

/// One slot of a cubic monomial: `u_j` or `d_a u_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    U(usize),
    D { a: usize, j: usize },
}

impl Factor {
    /// Parses `u<j>` or `d<a>u<j>`.
    pub fn parse(s: &str) -> Option<Factor> {
        if let Some(rest) = s.strip_prefix('u') {
            return rest.parse().ok().map(Factor::U);
        }
        let rest = s.strip_prefix('d')?;
        let (a, j) = rest.split_once('u')?;
        Some(Factor::D {
            a: a.parse().ok()?,
            j: j.parse().ok()?,
        })
    }

    pub fn component(&self) -> usize {
        match *self {
            Factor::U(j) | Factor::D { j, .. } => j,
        }
    }

    pub fn is_spatial_derivative(&self) -> bool {
        matches!(self, Factor::D { a, .. } if *a >= 1)
    }
}

impl std::fmt::Display for Factor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Factor::U(j) => write!(f, "u{j}"),
            Factor::D { a, j } => write!(f, "d{a}u{j}"),
        }
    }
}

/// `coeff * f1 * f2 * f3` in `F_i`; the cubic remainder `H_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicTerm {
    pub i: usize,
    pub coeff: f64,
    pub factors: [Factor; 3],
}

/// Coefficient tensors of the semilinear nonlinearity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NonlinearitySpec {
    pub null_terms: Vec<NullTerm>,
    pub general_quadratic: Vec<QuadTerm>,
    pub cubic_terms: Vec<CubicTerm>,
}

impl NonlinearitySpec {
    pub fn is_empty(&self) -> bool {
        self.null_terms.is_empty() && self.general_quadratic.is_empty() && self.cubic_terms.is_empty()
    }

    /// Checks indices, finiteness and the speed constraint on null terms.
    pub fn violations(&self, speeds: &[f64]) -> Vec<String> {
        let n = speeds.len();
        let mut out = Vec::new();
        for t in &self.null_terms {
            if t.i >= n || t.j >= n || t.k >= n {
                out.push(format!("null term ({}, {}, {}) indexes past N = {n}", t.i, t.j, t.k));
                continue;
            }
            if !(speeds[t.j] == speeds[t.i] && speeds[t.k] == speeds[t.i]) {
                out.push(format!(
                    "null term in F_{} couples u_{} and u_{} whose speeds differ from c_{}",
                    t.i, t.j, t.k, t.i
                ));
            }
            match (t.kind, t.a, t.b) {
                (NullKind::Q0, None, None) => {}
                (NullKind::Q0, _, _) => out.push("Q0 term takes no (a, b)".into()),
                (NullKind::Qab, Some(a), Some(b)) if a < b && b <= 3 => {}
                (NullKind::Qab, a, b) => {
                    out.push(format!("Q_ab needs 0 <= a < b <= 3, got ({a:?}, {b:?})"))
                }
            }
            if !t.coeff.is_finite() {
                out.push("non-finite null-term coefficient".into());
            }
        }
        for t in &self.general_quadratic {
            if t.i >= n || t.j >= n || t.k >= n || t.a > 3 || t.b > 3 {
                out.push(format!(
                    "quadratic term (i={}, j={}, k={}, a={}, b={}) out of range",
                    t.i, t.j, t.k, t.a, t.b
                ));
            }
            if !t.coeff.is_finite() {
                out.push("non-finite quadratic coefficient".into());
            }
        }
        for t in &self.cubic_terms {
            if t.i >= n || t.factors.iter().any(|f| f.component() >= n) {
                out.push(format!("cubic term in F_{} indexes past N = {n}", t.i));
            }
            if t.factors.iter().any(|f| matches!(f, Factor::D { a, .. } if *a > 3)) {
                out.push("cubic derivative index above 3".into());
            }
            if !t.coeff.is_finite() {
                out.push("non-finite cubic coefficient".into());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_parse_roundtrip() {
        for s in ["u0", "u12", "d0u1", "d3u0"] {
            assert_eq!(Factor::parse(s).unwrap().to_string(), s);
        }
        assert!(Factor::parse("x1").is_none());
        assert!(Factor::parse("d1").is_none());
    }

    #[test]
    fn null_term_speed_constraint() {
        let spec = NonlinearitySpec {
            null_terms: vec![NullTerm::q0(0, 0, 1, 1.0)],
            ..Default::default()
        };
        assert!(spec.violations(&[1.0, 1.0]).is_empty());
        assert_eq!(spec.violations(&[1.0, 2.0]).len(), 1);
        let bad = NonlinearitySpec {
            null_terms: vec![NullTerm::qab(0, 0, 0, 2, 1, 1.0)],
            ..Default::default()
        };
        assert_eq!(bad.violations(&[1.0]).len(), 1);
    }
}
