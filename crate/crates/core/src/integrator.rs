//! Time stepping between fires and trajectory assembly across fire events.
//!
//! Two one-step methods are available. [`nsfd_step`] is the nonstandard
//! finite-difference scheme with semi-implicit linear terms and
//! exponential denominator functions; [`reference_step`] is classical RK4
//! and serves as the accuracy oracle.
//!
//! ```
//! use savanna::integrator::{simulate, Scheme};
//! use savanna::model::{region_preset, VegState};
//!
//! let p = region_preset(1).unwrap().defaults;
//! let traj = simulate(&p, VegState::new(5.0, 5.0, 1.0), 70.0, 0.01, Scheme::Nsfd).unwrap();
//! assert_eq!(traj.impulses.len(), 10);
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::model::{impulse_map, validate, vector_field, ModelParams, VegState};
use crate::thresholds::grass_rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Nsfd,
    Reference,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Nsfd => "nsfd",
            Scheme::Reference => "reference",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nsfd" => Ok(Scheme::Nsfd),
            "reference" => Ok(Scheme::Reference),
            other => Err(Error::Domain(format!(
                "unknown scheme `{other}` (expected nsfd or reference)"
            ))),
        }
    }
}

/// `(e^{x h} - 1) / x`, equal to `h` in the limit `x → 0`.
fn exp_denominator(x: f64, h: f64) -> f64 {
    if x == 0.0 {
        h
    } else {
        (x * h).exp_m1() / x
    }
}

/// Denominator functions of the NSFD scheme for a given step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenominatorFunctions {
    pub h: f64,
    /// `max(μ_NS, γ_S - (μ_S + ω_S))`.
    pub q: f64,
    /// Tree denominator `(e^{Qh} - 1)/Q`.
    pub phi: f64,
    /// Grass denominator `(e^{(γ_G - μ_G)h} - 1)/(γ_G - μ_G)`.
    pub phi_g: f64,
}

impl DenominatorFunctions {
    pub fn new(p: &ModelParams, h: f64) -> Self {
        let q = p.mu_ns.max(p.gamma_s - (p.mu_s + p.omega_s));
        Self {
            h,
            q,
            phi: exp_denominator(q, h),
            phi_g: exp_denominator(grass_rate(p), h),
        }
    }
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "step h = {h} must be positive and finite"
        )))
    }
}

/// One NSFD step with precomputed denominators.
///
/// Grass is updated first from `T_NS^k`, then `T_NS` from `T_S^k`, then
/// `T_S` from `T_NS^{k+1}` and `G^k`. Each update is linear in its unknown.
pub fn nsfd_step_with(s: &VegState, p: &ModelParams, d: &DenominatorFunctions) -> VegState {
    let g = s.g * (1.0 + d.phi_g * grass_rate(p))
        / (1.0 + d.phi_g * (p.gamma_g * s.g / p.k_g + p.sigma_ns * s.t_ns));

    let t_ns = (s.t_ns + d.phi * p.omega_s * s.t_s) / (1.0 + d.phi * p.mu_ns);

    let explicit = (p.gamma_s - (p.mu_s + p.omega_s)) * s.t_s + p.gamma_ns * t_ns
        - p.gamma_s / p.k_t * s.t_s * t_ns
        - p.gamma_ns / p.k_t * s.t_ns * t_ns;
    let implicit = p.gamma_s / p.k_t * s.t_s + p.gamma_ns / p.k_t * s.t_ns + p.sigma_g * s.g;
    let t_s = (s.t_s + d.phi * explicit) / (1.0 + d.phi * implicit);

    VegState::new(t_s, t_ns, g)
}

pub fn nsfd_step(s: &VegState, p: &ModelParams, h: f64) -> Result<VegState> {
    check_step(h)?;
    Ok(nsfd_step_with(s, p, &DenominatorFunctions::new(p, h)))
}

/// Fire event in the discrete scheme, the same map as [`impulse_map`].
pub fn nsfd_impulse(s: &VegState, p: &ModelParams) -> VegState {
    impulse_map(s, p)
}

/// One classical RK4 step of the flow.
pub fn reference_step(s: &VegState, p: &ModelParams, h: f64) -> VegState {
    let k1 = vector_field(s, p);
    let k2 = vector_field(&(*s + (0.5 * h) * k1), p);
    let k3 = vector_field(&(*s + (0.5 * h) * k2), p);
    let k4 = vector_field(&(*s + h * k3), p);
    *s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Steps per fire period and the effective step `τ/m` for a requested `h`.
pub fn snap_step(tau: f64, h: f64) -> (usize, f64) {
    let m = ((tau / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (m, tau / m as f64)
}

/// One scheme step that reuses denominators for the regular step size.
struct Stepper<'a> {
    p: &'a ModelParams,
    scheme: Scheme,
    h: f64,
    denom: DenominatorFunctions,
}

impl<'a> Stepper<'a> {
    fn new(p: &'a ModelParams, scheme: Scheme, h: f64) -> Self {
        Self {
            p,
            scheme,
            h,
            denom: DenominatorFunctions::new(p, h),
        }
    }

    fn step(&self, s: &VegState, h: f64) -> VegState {
        match self.scheme {
            Scheme::Reference => reference_step(s, self.p, h),
            Scheme::Nsfd if h == self.h => nsfd_step_with(s, self.p, &self.denom),
            Scheme::Nsfd => nsfd_step_with(s, self.p, &DenominatorFunctions::new(self.p, h)),
        }
    }
}

/// Flows one full period from `s` (a post-fire state) and returns the
/// state just before the next fire.
pub fn flow_period(p: &ModelParams, s: &VegState, steps: usize, scheme: Scheme) -> VegState {
    let h = p.tau / steps as f64;
    let stepper = Stepper::new(p, scheme, h);
    let mut x = *s;
    for _ in 0..steps {
        x = stepper.step(&x, h);
    }
    x
}

/// Period map: flow over one period followed by the fire.
pub fn period_map(p: &ModelParams, s: &VegState, steps: usize, scheme: Scheme) -> VegState {
    impulse_map(&flow_period(p, s, steps, scheme), p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpulseRecord {
    pub t: f64,
    pub before: VegState,
    pub after: VegState,
}

/// Simulated trajectory. Samples are right-continuous: the sample at a fire
/// time holds the post-fire state, the pre-fire state is in the matching
/// [`ImpulseRecord`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, VegState)>,
    pub impulses: Vec<ImpulseRecord>,
    pub h_requested: f64,
    pub h: f64,
    pub scheme: Scheme,
}

impl Trajectory {
    pub fn last(&self) -> VegState {
        self.samples
            .last()
            .expect("trajectory has an initial sample")
            .1
    }

    pub fn write_csv(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "t,T_S,T_NS,G,event")?;
        let row = |out: &mut dyn std::io::Write, t: f64, s: &VegState, ev: &str| {
            writeln!(
                out,
                "{},{},{},{},{ev}",
                csv_num(t),
                csv_num(s.t_s),
                csv_num(s.t_ns),
                csv_num(s.g)
            )
        };
        let mut fires = self.impulses.iter().peekable();
        for (t, s) in &self.samples {
            match fires.peek() {
                Some(rec) if rec.t == *t => {
                    row(out, rec.t, &rec.before, "pre_fire")?;
                    row(out, rec.t, &rec.after, "post_fire")?;
                    fires.next();
                }
                _ => row(out, *t, s, "")?,
            }
        }
        Ok(())
    }
}

/// Integrates flow and fires from `s0` at `t = 0` up to `horizon`.
///
/// The step is snapped to `τ/m` with `m = ceil(τ/h)` so every fire time
/// `kτ <= horizon` (`k >= 1`) falls on a grid node. A final shorter step
/// lands exactly on `horizon` when it is not a grid node.
pub fn simulate(
    p: &ModelParams,
    s0: VegState,
    horizon: f64,
    h: f64,
    scheme: Scheme,
) -> Result<Trajectory> {
    validate(p, None).into_result()?;
    check_step(h)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!(
            "horizon = {horizon} must be positive and finite"
        )));
    }
    if !s0.is_finite() {
        return Err(Error::NonFinite { t: 0.0 });
    }
    let (m, h_eff) = snap_step(p.tau, h);
    let stepper = Stepper::new(p, scheme, h_eff);
    let slack = 1e-9 * h_eff;
    let fires = ((horizon + slack) / p.tau).floor() as usize;

    let mut samples = Vec::with_capacity((horizon / h_eff).ceil() as usize + 2);
    let mut impulses = Vec::with_capacity(fires);
    samples.push((0.0, s0));
    let mut x = s0;
    'periods: for k in 0.. {
        let t0 = k as f64 * p.tau;
        for j in 1..=m {
            let t = if j == m {
                (k + 1) as f64 * p.tau
            } else {
                t0 + j as f64 * h_eff
            };
            let prev = t0 + (j - 1) as f64 * h_eff;
            if t > horizon + slack {
                if horizon - prev > slack {
                    x = stepper.step(&x, horizon - prev);
                    if !x.is_finite() {
                        return Err(Error::NonFinite { t: horizon });
                    }
                    samples.push((horizon, x));
                }
                break 'periods;
            }
            x = stepper.step(&x, h_eff);
            if !x.is_finite() {
                return Err(Error::NonFinite { t });
            }
            if j == m && k < fires {
                let after = nsfd_impulse(&x, p);
                impulses.push(ImpulseRecord {
                    t,
                    before: x,
                    after,
                });
                x = after;
            }
            samples.push((t, x));
            if (t - horizon).abs() <= slack {
                break 'periods;
            }
        }
    }
    Ok(Trajectory {
        samples,
        impulses,
        h_requested: h,
        h: h_eff,
        scheme,
    })
}
