/// Radial grid on `[r_min, r_max]` with the magic time step `dt = dr / c_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub dr: f64,
    pub dt: f64,
    pub t_max: f64,
    /// Spherical-harmonic degree of the channel; 0 is the radially
    /// symmetric case.
    pub angular_mode: u32,
    pub sponge_width: Option<f64>,
}

impl RadialGrid {
    pub fn n_nodes(&self) -> usize {
        ((self.r_max - self.r_min) / self.dr).round() as usize + 1
    }

    pub fn node(&self, m: usize) -> f64 {
        self.r_min + m as f64 * self.dr
    }
}

/// Cube `[-half_width, half_width]^3` with a ball obstacle of `obstacle_radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    pub half_width: f64,
    pub dx: f64,
    pub obstacle_radius: f64,
    pub dt: f64,
    pub t_max: f64,
    pub sponge_width: Option<f64>,
}

impl CartesianGrid {
    pub fn n_side(&self) -> usize {
        (2.0 * self.half_width / self.dx).round() as usize + 1
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Radial(RadialGrid),
    Cartesian(CartesianGrid),
}

impl Grid {
    pub fn mode(&self) -> &'static str {
        match self {
            Grid::Radial(_) => "radial",
            Grid::Cartesian(_) => "cartesian3d",
        }
    }

    pub fn dt(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.dt,
            Grid::Cartesian(g) => g.dt,
        }
    }

    pub fn t_max(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.t_max,
            Grid::Cartesian(g) => g.t_max,
        }
    }

    pub fn set_t_max(&mut self, t: f64) {
        match self {
            Grid::Radial(g) => g.t_max = t,
            Grid::Cartesian(g) => g.t_max = t,
        }
    }

    pub fn obstacle_radius(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.r_min,
            Grid::Cartesian(g) => g.obstacle_radius,
        }
    }

    /// Outer extent of the computational domain measured from the origin.
    pub fn outer_extent(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.r_max,
            Grid::Cartesian(g) => g.half_width,
        }
    }

    pub fn sponge_width(&self) -> Option<f64> {
        match self {
            Grid::Radial(g) => g.sponge_width,
            Grid::Cartesian(g) => g.sponge_width,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            Grid::Radial(g) => format!(
                "radial r in [{}, {}], dr = {}, dt = {}, t_max = {}, l = {}",
                g.r_min, g.r_max, g.dr, g.dt, g.t_max, g.angular_mode
            ),
            Grid::Cartesian(g) => format!(
                "cartesian3d [-{w}, {w}]^3, dx = {}, dt = {}, obstacle radius {}, t_max = {}",
                g.dx,
                g.dt,
                g.obstacle_radius,
                g.t_max,
                w = g.half_width
            ),
        }
    }
}
