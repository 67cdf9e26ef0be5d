use std::fmt;

use crate::error::{Error, Result};
use crate::model::{ModelParams, VegState};

use super::{integrate_variational, Mat3, DEFAULT_STEPS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub steps_per_period: usize,
    /// Fixed-point iterations of the period map before Newton takes over.
    pub max_fixed_point: usize,
    pub max_newton: usize,
    /// Target `‖P(x) - x‖∞`.
    pub tol: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            steps_per_period: DEFAULT_STEPS,
            max_fixed_point: 400,
            max_newton: 40,
            tol: 1e-10,
        }
    }
}

/// Which periodic solution the shooting ended on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    /// All three compartments positive: a savanna orbit.
    Interior,
    Grassland,
    Forest,
    Desert,
}

impl fmt::Display for OrbitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitKind::Interior => "savanna",
            OrbitKind::Grassland => "grassland",
            OrbitKind::Forest => "forest",
            OrbitKind::Desert => "desert",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitLocation {
    /// Post-fire state at `t = 0⁺`.
    pub anchor: VegState,
    pub kind: OrbitKind,
    pub residual: f64,
    pub fixed_point_iterations: usize,
    pub newton_iterations: usize,
    /// Whether the existence condition for a positive periodic orbit held.
    pub existence_condition: bool,
}

fn kind_of(s: &VegState, p: &ModelParams) -> OrbitKind {
    let trees = s.t_s + s.t_ns > 1e-8 * p.k_t;
    let grass = s.g > 1e-8 * p.k_g;
    match (trees, grass) {
        (true, true) => OrbitKind::Interior,
        (false, true) => OrbitKind::Grassland,
        (true, false) => OrbitKind::Forest,
        (false, false) => OrbitKind::Desert,
    }
}

/// Finds a fixed point of the period map (flow over `τ`, then fire) from
/// `guess`: plain iteration first, then Newton steps with `M - I`.
///
/// Convergence to a boundary solution is reported through
/// [`OrbitLocation::kind`]; failing to reach the tolerance is an error.
pub fn locate_savanna_orbit(
    p: &ModelParams,
    guess: VegState,
    opts: &ShootingOptions,
) -> Result<OrbitLocation> {
    let existence_condition = crate::thresholds::compute_thresholds(p)?.savanna_existence_condition;
    let steps = opts.steps_per_period;
    let mut x = guess;
    let mut residual = f64::INFINITY;
    let mut fixed = 0;
    let mut last = f64::INFINITY;
    while fixed < opts.max_fixed_point {
        let next =
            crate::integrator::period_map(p, &x, steps, crate::integrator::Scheme::Reference);
        if !next.is_finite() {
            return Err(Error::Numerical("period map diverged".into()));
        }
        residual = (next - x).max_abs();
        x = next;
        fixed += 1;
        if residual < opts.tol {
            break;
        }
        // stalled: contraction too slow to finish within the budget
        if fixed > 20 && residual > 0.9 * last {
            break;
        }
        last = residual;
    }

    let mut newton = 0;
    while residual >= opts.tol && newton < opts.max_newton {
        let m = integrate_variational(p, &x, steps);
        let f = m.image - x;
        let a = m.matrix - Mat3::IDENTITY;
        let dx = a
            .solve(f.to_array())
            .ok_or_else(|| Error::Numerical("singular Newton matrix M - I".into()))?;
        x = x - VegState::from_array(dx);
        newton += 1;
        let image =
            crate::integrator::period_map(p, &x, steps, crate::integrator::Scheme::Reference);
        if !image.is_finite() {
            return Err(Error::Numerical("Newton iterate diverged".into()));
        }
        residual = (image - x).max_abs();
    }
    if residual >= opts.tol {
        return Err(Error::Numerical(format!(
            "period map residual {residual:e} above {:e} after {fixed} iterations and {newton} Newton steps",
            opts.tol
        )));
    }
    Ok(OrbitLocation {
        anchor: x,
        kind: kind_of(&x, p),
        residual,
        fixed_point_iterations: fixed,
        newton_iterations: newton,
        existence_condition,
    })
}
