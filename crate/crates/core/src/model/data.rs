use std::sync::Arc;

use super::profile::{norm, Profile, Superposition};

/// Displacement and velocity profiles of one component.
#[derive(Debug, Clone, Default)]
pub struct ComponentData {
    pub phi: Superposition,
    pub psi: Superposition,
}

/// `u(0) = eps phi`, `d_t u(0) = eps psi`.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub amplitude: f64,
    pub components: Vec<ComponentData>,
    pub support_inner_radius: f64,
}

impl InitialData {
    pub fn zero(n: usize, support_inner_radius: f64) -> Self {
        InitialData {
            amplitude: 0.0,
            components: vec![ComponentData::default(); n],
            support_inner_radius,
        }
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        InitialData {
            amplitude,
            ..self.clone()
        }
    }

    fn profiles(&self) -> impl Iterator<Item = &Arc<dyn Profile>> {
        self.components
            .iter()
            .flat_map(|c| c.phi.parts.iter().chain(c.psi.parts.iter()))
    }

    /// Smallest `|x|` over all profile supports.
    pub fn min_support_radius(&self) -> f64 {
        self.profiles()
            .map(|p| {
                let d = norm(p.center());
                let (a, b) = p.support();
                (a - d).max(d - b).max(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|x|` over all profile supports.
    pub fn max_support_radius(&self) -> f64 {
        self.profiles()
            .map(|p| norm(p.center()) + p.support().1)
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.profiles().next().is_none()
    }

    pub fn all_origin_radial(&self) -> bool {
        self.profiles().all(|p| p.is_origin_radial())
    }
}
