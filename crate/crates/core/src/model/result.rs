/// Outcome of a run with respect to the blow-up gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lifespan {
    Survived(f64),
    BlowUp(f64),
}

impl Lifespan {
    pub fn blew_up(&self) -> bool {
        matches!(self, Lifespan::BlowUp(_))
    }

    pub fn time(&self) -> f64 {
        match *self {
            Lifespan::Survived(t) | Lifespan::BlowUp(t) => t,
        }
    }
}

/// Radial samples of one component at one diagnostic instant.
#[derive(Debug, Clone, PartialEq)]
pub struct JetColumn {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    /// `sum_a |d_a u|` at direction `e_1`.
    pub du: Vec<f64>,
    /// `(d_t + c d_r) u`.
    pub dplus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JetFrame {
    pub t: f64,
    pub columns: Vec<JetColumn>,
}

/// Time series produced by a run.
#[derive(Debug, Clone, Default)]
pub struct RunResult {
    pub times: Vec<f64>,
    pub total_energy: Vec<f64>,
    pub local_radius: f64,
    pub local_energy: Vec<f64>,
    /// Running weighted sup norms, one series per configured weight, keyed
    /// by the CSV column label.
    pub weighted_sups: Vec<(String, Vec<f64>)>,
    pub monitor_label: Option<String>,
    pub monitor_e: Vec<f64>,
    pub max_abs_u: Vec<f64>,
    pub lifespan: Option<Lifespan>,
    pub jets: Vec<JetFrame>,
    pub amplitude: f64,
    pub speeds: Vec<f64>,
    pub data_outer_radius: f64,
}

impl RunResult {
    pub fn blowup_flag(&self) -> bool {
        self.lifespan.is_some_and(|l| l.blew_up())
    }
}
