//! Scenario configuration files.
//!
//! TOML with five tables; unknown keys are rejected everywhere except in
//! profile entries, whose extra keys are handed to the profile builder
//! (which rejects the ones it does not know).
//!
//! ```toml
//! [system]
//! speeds = [1.0]
//!
//! [nonlinearity]
//! null_terms = [{ kind = "q0", i = 0, j = 0, k = 0, coeff = 1.0 }]
//! quadratic = [{ i = 0, j = 0, k = 0, a = 0, b = 0, coeff = 1.0 }]
//! cubic = [{ i = 0, coeff = 1.0, factors = ["u0", "u0", "d0u0"] }]
//!
//! [data]
//! amplitude = 0.1
//! support_inner_radius = 1.5
//! profiles = [{ component = 0, slot = "phi", kind = "bump", inner = 2.0, outer = 3.0 }]
//!
//! [grid]
//! mode = "radial"      # or "cartesian3d"
//! dr = 0.02
//! t_max = 100.0
//!
//! [diagnostics]
//! n_diag = 10
//! local_radius = 4.0
//! weights = [{ kind = "W", nu = 1.0, kappa = 1.0 }]
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::data::{ComponentData, InitialData};
use super::grid::{CartesianGrid, Grid, RadialGrid};
use super::profile::{OutgoingVelocity, Profile, ProfileRegistry};
use super::system::{CubicTerm, Factor, NonlinearitySpec, NullTerm, QuadTerm, WaveSystem};
use crate::error::{Error, Result};
use crate::weights::{WeightKind, WeightSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: SystemSection,
    #[serde(default)]
    pub nonlinearity: NonlinearitySection,
    pub data: DataSection,
    pub grid: GridSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub speeds: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub null_terms: Vec<NullTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quadratic: Vec<QuadTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cubic: Vec<CubicEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubicEntry {
    pub i: usize,
    pub coeff: f64,
    pub factors: [String; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Phi,
    Psi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub component: usize,
    pub slot: Slot,
    pub kind: String,
    /// On a `phi` entry: also add the velocity that makes the radial wave
    /// purely outgoing.
    #[serde(default, skip_serializing_if = "is_false")]
    pub outgoing: bool,
    #[serde(flatten)]
    pub params: toml::Table,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub amplitude: f64,
    pub support_inner_radius: f64,
    #[serde(default)]
    pub profiles: Vec<ProfileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub mode: String,
    pub t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    pub angular_mode: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub courant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sponge_width: Option<f64>,
}

fn is_zero_u32(v: &u32) -> bool {
    *v == 0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub kind: String,
    pub nu: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_n_diag")]
    pub n_diag: usize,
    #[serde(default = "default_local_radius")]
    pub local_radius: f64,
    #[serde(default = "default_true")]
    pub monitor: bool,
    #[serde(default = "default_monitor_k")]
    pub monitor_k: usize,
    #[serde(default)]
    pub norm_order: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<WeightEntry>,
    #[serde(default)]
    pub jets: bool,
    #[serde(default = "default_stride")]
    pub jet_stride: usize,
    #[serde(default)]
    pub snapshots: bool,
    #[serde(default)]
    pub plots: bool,
}

fn default_n_diag() -> usize {
    10
}
fn default_local_radius() -> f64 {
    4.0
}
fn default_true() -> bool {
    true
}
fn default_monitor_k() -> usize {
    1
}
fn default_stride() -> usize {
    1
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection {
            n_diag: default_n_diag(),
            local_radius: default_local_radius(),
            monitor: true,
            monitor_k: default_monitor_k(),
            norm_order: 0,
            weights: Vec::new(),
            jets: false,
            jet_stride: 1,
            snapshots: false,
            plots: false,
        }
    }
}

/// Diagnostics settings resolved from [`DiagnosticsSection`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSpec {
    pub n_diag: usize,
    pub local_radius: f64,
    pub monitor_k: Option<usize>,
    pub norm_order: usize,
    pub weights: Vec<WeightSpec>,
    pub jets: bool,
    pub jet_stride: usize,
    pub snapshots: bool,
    pub plots: bool,
}

/// A parsed scenario; run [`super::validate_scenario`] before stepping it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub system: WaveSystem,
    pub data: InitialData,
    pub grid: Grid,
    pub diagnostics: DiagnosticsSpec,
    pub config: ScenarioConfig,
}

/// Extra margin added to automatically padded domains.
const PAD_MARGIN: f64 = 2.0;

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn emit(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// SHA-256 of the canonical (key-sorted JSON) form; independent of key
    /// order in the source file.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("json serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn nonlinearity(&self) -> Result<NonlinearitySpec> {
        let cubic_terms = self
            .nonlinearity
            .cubic
            .iter()
            .map(|c| {
                let mut factors = [Factor::U(0); 3];
                for (slot, s) in factors.iter_mut().zip(&c.factors) {
                    *slot = Factor::parse(s)
                        .ok_or_else(|| Error::Config(format!("bad cubic factor `{s}`")))?;
                }
                Ok(CubicTerm {
                    i: c.i,
                    coeff: c.coeff,
                    factors,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NonlinearitySpec {
            null_terms: self.nonlinearity.null_terms.clone(),
            general_quadratic: self.nonlinearity.quadratic.clone(),
            cubic_terms,
        })
    }

    pub fn system(&self) -> Result<WaveSystem> {
        Ok(WaveSystem::new(self.system.speeds.clone(), self.nonlinearity()?))
    }

    pub fn initial_data(&self, registry: &ProfileRegistry) -> Result<InitialData> {
        let n = self.system.speeds.len();
        let mut comps = vec![ComponentData::default(); n];
        for entry in &self.data.profiles {
            let comp = comps.get_mut(entry.component).ok_or_else(|| {
                Error::Config(format!("profile for component {} but N = {n}", entry.component))
            })?;
            let profile = registry.build(&entry.kind, &entry.params)?;
            match entry.slot {
                Slot::Phi => {
                    if entry.outgoing {
                        let c = self.system.speeds[entry.component];
                        comp.psi.parts.push(Arc::new(OutgoingVelocity {
                            displacement: profile.clone(),
                            speed: c,
                        }) as Arc<dyn Profile>);
                    }
                    comp.phi.parts.push(profile);
                }
                Slot::Psi => {
                    if entry.outgoing {
                        return Err(Error::Config("`outgoing` only applies to phi entries".into()));
                    }
                    comp.psi.parts.push(profile);
                }
            }
        }
        Ok(InitialData {
            amplitude: self.data.amplitude,
            components: comps,
            support_inner_radius: self.data.support_inner_radius,
        })
    }

    pub fn grid(&self, c_max: f64, data_outer: f64) -> Result<Grid> {
        let g = &self.grid;
        let pad = |t_max: f64| data_outer + c_max * t_max + PAD_MARGIN;
        match g.mode.as_str() {
            "radial" => {
                let dr = g.dr.ok_or_else(|| Error::Config("radial grid needs `dr`".into()))?;
                let r_min = 1.0;
                let r_max = match g.r_max {
                    Some(r) => r,
                    None => {
                        let want = pad(g.t_max).max(r_min + 4.0 * dr);
                        r_min + ((want - r_min) / dr).ceil() * dr
                    }
                };
                Ok(Grid::Radial(RadialGrid {
                    r_min,
                    r_max,
                    dr,
                    dt: g.dt.unwrap_or(dr / c_max),
                    t_max: g.t_max,
                    angular_mode: g.angular_mode,
                    sponge_width: g.sponge_width,
                }))
            }
            "cartesian3d" => {
                let dx = g.dx.ok_or_else(|| Error::Config("cartesian3d grid needs `dx`".into()))?;
                let half_width = match g.half_width {
                    Some(w) => w,
                    None => (pad(g.t_max) / dx).ceil() * dx,
                };
                let courant = g.courant.unwrap_or(0.5);
                Ok(Grid::Cartesian(CartesianGrid {
                    half_width,
                    dx,
                    obstacle_radius: g.obstacle_radius.unwrap_or(1.0),
                    dt: g.dt.unwrap_or(courant * dx / c_max),
                    t_max: g.t_max,
                    sponge_width: g.sponge_width,
                }))
            }
            other => Err(Error::UnknownName {
                kind: "grid mode",
                name: other.to_string(),
                known: "radial, cartesian3d".into(),
            }),
        }
    }

    pub fn diagnostics(&self) -> Result<DiagnosticsSpec> {
        let d = &self.diagnostics;
        let weights = d
            .weights
            .iter()
            .map(|w| {
                let kind = match w.kind.as_str() {
                    "phi" | "Phi" => WeightKind::Phi,
                    "W" => WeightKind::W,
                    "Wc" => WeightKind::Wc,
                    other => {
                        return Err(Error::UnknownName {
                            kind: "weight",
                            name: other.to_string(),
                            known: "phi, W, Wc".into(),
                        })
                    }
                };
                if kind == WeightKind::Wc && w.c.is_none() {
                    return Err(Error::Config("weight Wc needs `c`".into()));
                }
                Ok(WeightSpec {
                    kind,
                    nu: w.nu,
                    kappa: w.kappa,
                    c: w.c.unwrap_or(0.0),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if d.n_diag == 0 || d.jet_stride == 0 {
            return Err(Error::Config("n_diag and jet_stride must be positive".into()));
        }
        Ok(DiagnosticsSpec {
            n_diag: d.n_diag,
            local_radius: d.local_radius,
            monitor_k: d.monitor.then_some(d.monitor_k),
            norm_order: d.norm_order,
            weights,
            jets: d.jets,
            jet_stride: d.jet_stride,
            snapshots: d.snapshots,
            plots: d.plots,
        })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario_with(&ProfileRegistry::default())
    }

    pub fn scenario_with(&self, registry: &ProfileRegistry) -> Result<Scenario> {
        let system = self.system()?;
        let data = self.initial_data(registry)?;
        let c_max = system.c_max();
        if !(c_max > 0.0) {
            return Err(Error::Config("need at least one positive speed".into()));
        }
        let grid = self.grid(c_max, data.max_support_radius())?;
        Ok(Scenario {
            system,
            data,
            grid,
            diagnostics: self.diagnostics()?,
            config: self.clone(),
        })
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        ScenarioConfig::parse(text)?.scenario()
    }

    /// Same scenario with every data profile scaled by a new amplitude.
    pub fn with_amplitude(&self, eps: f64) -> Scenario {
        let mut s = self.clone();
        s.data = s.data.with_amplitude(eps);
        s.config.data.amplitude = eps;
        s
    }

    pub fn with_t_max(&self, t_max: f64) -> Result<Scenario> {
        let mut cfg = self.config.clone();
        cfg.grid.t_max = t_max;
        if self.config.grid.r_max.is_none() && self.config.grid.half_width.is_none() {
            return cfg.scenario();
        }
        let mut s = self.clone();
        s.grid.set_t_max(t_max);
        s.config = cfg;
        Ok(s)
    }

    /// Refines the spatial step by `1 / scale` (time step follows).
    pub fn with_resolution_scale(&self, scale: f64) -> Result<Scenario> {
        let mut cfg = self.config.clone();
        if let Some(dr) = cfg.grid.dr.as_mut() {
            *dr /= scale;
        }
        if let Some(dx) = cfg.grid.dx.as_mut() {
            *dx /= scale;
        }
        if let Some(dt) = cfg.grid.dt.as_mut() {
            *dt /= scale;
        }
        cfg.scenario()
    }
}
