use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::grassland::grass_rate;
use super::ThresholdReport;

/// Critical values of `σ_G`, `σ_NS` and `τ` at which a stability threshold
/// crosses 1. `None` when the defining denominator is not positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    /// Below this value `σ_G` cannot prevent tree invasion of the grassland.
    pub sigma_g_star: Option<f64>,
    /// `σ_NS` at which `ρ_T^G = 1`.
    pub sigma_ns_star: Option<f64>,
    /// Fire period at which `ρ_T^G = 1`.
    pub tau_star: Option<f64>,
}

pub fn critical_values(rep: &ThresholdReport) -> CriticalValues {
    let p = &rep.params;
    let sigma_g_star = rep
        .g_int
        .filter(|&g| g > 0.0)
        .map(|g| (p.gamma_s - (p.mu_s + p.omega_s + p.mu_ns)) / g);
    let sigma_ns_star = rep
        .forest_eq
        .filter(|e| e.t_ns > 0.0)
        .map(|e| (p.gamma_g - p.mu_g + (1.0 - p.eta_g).ln() / p.tau) / e.t_ns);
    let tau_star = rep.r_t_g.filter(|&r| r > 1.0).map(|r| {
        let rate = if r.is_finite() {
            p.gamma_g * (1.0 - 1.0 / r)
        } else {
            p.gamma_g
        };
        -(1.0 - p.eta_g).ln() / rate
    });
    CriticalValues {
        sigma_g_star,
        sigma_ns_star,
        tau_star,
    }
}

fn no_boundary(p: &ModelParams) -> Error {
    Error::Undefined {
        quantity: "rho_G^0 boundary",
        reason: format!(
            "R_G^0 = {} <= 1, rho_G^0 < 1 for every eta_G and tau",
            p.gamma_g / p.mu_g
        ),
    }
}

/// Value of `η_G` at which `ρ_G^0 = 1`; grass persists under fire for
/// smaller `η_G`.
pub fn eta_g_boundary(p: &ModelParams) -> Result<f64> {
    let r = grass_rate(p);
    if r <= 0.0 {
        return Err(no_boundary(p));
    }
    Ok(-(-r * p.tau).exp_m1())
}

/// Fire period at which `ρ_G^0 = 1`; grass persists for longer periods.
pub fn tau_boundary(p: &ModelParams) -> Result<f64> {
    let r = grass_rate(p);
    if r <= 0.0 {
        return Err(no_boundary(p));
    }
    Ok(-(1.0 - p.eta_g).ln() / r)
}

/// Field data used to estimate `σ_NS` from the ratio `δ_G` of grass
/// production under and outside tree crowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaNsEstimation {
    pub delta_g: f64,
    pub gamma_g: f64,
    pub k_t: f64,
    /// Relative influence of an isolated tree compared to a closed stand,
    /// in `(0, 1)`.
    pub epsilon: f64,
    /// Woody cover at the tree carrying capacity.
    pub s: f64,
}

impl SigmaNsEstimation {
    /// Tree biomass under one crown, `ε K_T / S`.
    pub fn t_tilde(&self) -> f64 {
        self.epsilon * self.k_t / self.s
    }
}

pub fn estimate_sigma_ns(e: &SigmaNsEstimation) -> Result<f64> {
    if !(e.epsilon > 0.0 && e.epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon = {} outside (0, 1)",
            e.epsilon
        )));
    }
    if !(e.s > 0.0 && e.k_t > 0.0) {
        return Err(Error::Domain("S and K_T must be positive".into()));
    }
    Ok((1.0 - e.delta_g) * e.gamma_g / e.t_tilde())
}
