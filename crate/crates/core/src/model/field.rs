/// Sampling geometry of a [`Field`].
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Nodes `r_m = r_min + m dr`, `m = 0..n`.
    Radial {
        r_min: f64,
        dr: f64,
        n: usize,
        angular_mode: u32,
    },
    /// Lattice `x_i = -half_width + i dx`, `n` points per side, index
    /// `(i * n + j) * n + k` for `(x, y, z)`.
    Cartesian { half_width: f64, dx: f64, n: usize },
}

impl Geometry {
    pub fn len(&self) -> usize {
        match *self {
            Geometry::Radial { n, .. } => n,
            Geometry::Cartesian { n, .. } => n * n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Immutable three-level snapshot of `u` taken between steps; `curr` sits
/// at `time`, `prev` and `next` one step `dt` either side.
#[derive(Debug, Clone)]
pub struct Field {
    pub geometry: Geometry,
    pub time: f64,
    pub dt: f64,
    pub speeds: Vec<f64>,
    pub prev: Vec<Vec<f64>>,
    pub curr: Vec<Vec<f64>>,
    pub next: Vec<Vec<f64>>,
}

impl Field {
    pub fn n_components(&self) -> usize {
        self.curr.len()
    }

    pub fn is_finite(&self) -> bool {
        self.curr.iter().flatten().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.curr.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}
