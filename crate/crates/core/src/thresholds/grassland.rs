use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Net per-capita grass growth rate without trees, `γ_G - μ_G`, which is
/// `μ_G (R_G^0 - 1)` when `μ_G > 0` and `γ_G` when `μ_G = 0`.
pub(crate) fn grass_rate(p: &ModelParams) -> f64 {
    if p.mu_g > 0.0 {
        p.mu_g * (p.gamma_g / p.mu_g - 1.0)
    } else {
        p.gamma_g
    }
}

/// `ρ_G^0`, the per-period growth factor of sparse grass under fire.
pub fn rho_g0(p: &ModelParams) -> f64 {
    (1.0 - p.eta_g) * (grass_rate(p) * p.tau).exp()
}

/// Checks the existence conditions of the grassland orbit.
pub(crate) fn require_grassland(p: &ModelParams) -> Result<()> {
    if p.mu_g > 0.0 && p.gamma_g / p.mu_g <= 1.0 {
        return Err(Error::Undefined {
            quantity: "grassland orbit",
            reason: format!("R_G^0 = {} <= 1", p.gamma_g / p.mu_g),
        });
    }
    let rho = rho_g0(p);
    if rho <= 1.0 {
        return Err(Error::Undefined {
            quantity: "grassland orbit",
            reason: format!("rho_G^0 = {rho} <= 1"),
        });
    }
    Ok(())
}

/// Carrying level of the fire-free grass logistic: `K_G (1 - 1/R_G^0)`,
/// or `K_G` when `μ_G = 0`.
fn effective_capacity(p: &ModelParams) -> f64 {
    if p.mu_g > 0.0 {
        p.k_g * (1.0 - p.mu_g / p.gamma_g)
    } else {
        p.k_g
    }
}

/// Evaluates the grassland periodic solution `G*(t)` in closed form.
///
/// The orbit is right-continuous: at `t = kτ` the post-fire value is
/// returned. Fails when the orbit does not exist.
pub fn grassland_orbit(p: &ModelParams, t: f64) -> Result<f64> {
    require_grassland(p)?;
    let rho = rho_g0(p);
    let r = grass_rate(p);
    let phase = t.rem_euclid(p.tau);
    // t - (n+1)τ with nτ <= t < (n+1)τ
    let shifted = phase - p.tau;
    let cap = effective_capacity(p);
    Ok(cap * (rho - 1.0) / ((rho - 1.0) + p.eta_g * (-r * shifted).exp()))
}

/// Pre-fire value `G*(τ⁻)`, the maximum of the orbit.
pub fn grassland_peak(p: &ModelParams) -> Result<f64> {
    require_grassland(p)?;
    let rho = rho_g0(p);
    Ok(effective_capacity(p) * (rho - 1.0) / ((rho - 1.0) + p.eta_g))
}

/// Post-fire value `G*(0⁺)`, the minimum of the orbit.
pub fn grassland_trough(p: &ModelParams) -> Result<f64> {
    grassland_orbit(p, 0.0)
}

/// Period average of `G*`: `(K_G / (γ_G τ)) ln ρ_G^0`.
pub fn grassland_mean(p: &ModelParams) -> Result<f64> {
    require_grassland(p)?;
    Ok(p.k_g / (p.gamma_g * p.tau) * ((1.0 - p.eta_g).ln() + (p.gamma_g - p.mu_g) * p.tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::region_preset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn region1() -> ModelParams {
        region_preset(1).unwrap().defaults
    }

    /// Composite Simpson rule over one period.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn peak_matches_closed_form() {
        let p = region1();
        let rho = 0.4 * 2.1f64.exp();
        let want = 1.25 * (rho - 1.0) / ((rho - 1.0) + 0.6);
        assert!((grassland_peak(&p).unwrap() - want).abs() < 1e-14);
        let just_before = grassland_orbit(&p, p.tau * (1.0 - 1e-13)).unwrap();
        assert!((just_before - want).abs() < 1e-10);
    }

    #[test]
    fn mean_matches_quadrature() {
        let p = region1();
        let quad = simpson(
            |t| grassland_orbit(&p, t).unwrap(),
            0.0,
            p.tau * (1.0 - 1e-15),
            20_000,
        ) / p.tau;
        let mean = grassland_mean(&p).unwrap();
        assert!((mean - quad).abs() < 1e-9, "{mean} vs {quad}");
        assert!((mean - 0.70459).abs() < 1e-5);

        let mut q = p;
        q.mu_g = 0.0;
        q.eta_g = 0.95;
        let quad = simpson(
            |t| grassland_orbit(&q, t).unwrap(),
            0.0,
            q.tau * (1.0 - 1e-15),
            20_000,
        ) / q.tau;
        assert!((grassland_mean(&q).unwrap() - quad).abs() < 1e-8);
    }

    #[test]
    fn orbit_is_periodic_and_consistent_with_fire() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [
            region1(),
            region_preset(2).unwrap().defaults,
            region_preset(3).unwrap().defaults,
        ] {
            for _ in 0..20 {
                let t = rng.gen_range(0.0..5.0 * p.tau);
                let a = grassland_orbit(&p, t).unwrap();
                let b = grassland_orbit(&p, t + p.tau).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
            let trough = grassland_trough(&p).unwrap();
            let peak = grassland_peak(&p).unwrap();
            assert!(((1.0 - p.eta_g) * peak - trough).abs() < 1e-12 * peak);
        }
    }

    #[test]
    fn missing_orbit_names_threshold() {
        let mut p = region1();
        p.mu_g = 0.7;
        match grassland_orbit(&p, 1.0) {
            Err(Error::Undefined { reason, .. }) => assert!(reason.contains("R_G^0")),
            other => panic!("{other:?}"),
        }
        p.mu_g = 0.5;
        match grassland_orbit(&p, 1.0) {
            Err(Error::Undefined { reason, .. }) => assert!(reason.contains("rho_G^0")),
            other => panic!("{other:?}"),
        }
    }

    /// Reference integration of `G' = γ(1 - G/K)G - μG` with the fire reset,
    /// classical RK4 written out independently of the crate integrator.
    #[test]
    fn orbit_matches_scalar_reference_integration() {
        let p = region1();
        let f = |g: f64| p.gamma_g * (1.0 - g / p.k_g) * g - p.mu_g * g;
        let m = 20_000;
        let h = p.tau / m as f64;
        let mut g = grassland_trough(&p).unwrap();
        for _ in 0..3 {
            for _ in 0..m {
                let k1 = f(g);
                let k2 = f(g + 0.5 * h * k1);
                let k3 = f(g + 0.5 * h * k2);
                let k4 = f(g + h * k3);
                g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            let peak = grassland_peak(&p).unwrap();
            assert!((g - peak).abs() < 1e-10 * peak);
            g *= 1.0 - p.eta_g;
        }
    }
}
