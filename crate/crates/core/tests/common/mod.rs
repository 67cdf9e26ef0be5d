#![allow(dead_code)]

use rand::Rng;
use savanna::integrator::{nsfd_impulse, nsfd_step_with, snap_step, DenominatorFunctions};
use savanna::model::{region_preset, ModelParams, ParamName, VegState};

pub const OMEGA_STEPS: [f64; 5] = [0.001, 0.01, 0.1, 0.5, 1.0];

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Parameters drawn uniformly inside the ranges of region `id`. With
/// `competitive`, `sigma_NS` comes from a nonnegative range only.
pub fn random_params(rng: &mut impl Rng, id: u8, competitive: bool) -> ModelParams {
    let preset = region_preset(id).unwrap();
    let mut p = preset.defaults;
    for name in ParamName::ALL {
        let ranges: Vec<_> = preset
            .ranges_for(name)
            .filter(|r| !(competitive && name == ParamName::SigmaNs && r.min < 0.0))
            .copied()
            .collect();
        if ranges.is_empty() {
            continue;
        }
        let r = ranges[rng.gen_range(0..ranges.len())];
        let (lo, hi) = match name {
            ParamName::EtaG => (r.min, r.max.min(0.95)),
            ParamName::KG => (r.min.max(0.5), r.max),
            _ => (r.min, r.max),
        };
        p.set(name, uniform(rng, lo, hi)).unwrap();
    }
    p.fire.g0 = p.k_g / 2.0;
    p
}

/// A uniformly distributed state of the feasible region.
pub fn random_state(rng: &mut impl Rng, p: &ModelParams) -> VegState {
    let (mut a, mut b): (f64, f64) = (rng.gen(), rng.gen());
    if a + b > 1.0 {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    VegState::new(a * p.k_t, b * p.k_t, rng.gen::<f64>() * p.k_g)
}

/// A state with every compartment strictly positive.
pub fn random_interior_state(rng: &mut impl Rng, p: &ModelParams) -> VegState {
    loop {
        let s = random_state(rng, p);
        if s.t_s > 1e-3 * p.k_t && s.t_ns > 1e-3 * p.k_t && s.g > 1e-3 * p.k_g {
            return s;
        }
    }
}

/// First NSFD iterate outside the feasible region over `periods` fire
/// periods, as `(time, state)`.
pub fn first_omega_exit(
    p: &ModelParams,
    s0: VegState,
    h: f64,
    periods: usize,
) -> Option<(f64, VegState)> {
    let (m, h_eff) = snap_step(p.tau, h);
    let d = DenominatorFunctions::new(p, h_eff);
    let mut s = s0;
    for k in 0..periods {
        for i in 0..m {
            s = nsfd_step_with(&s, p, &d);
            if !s.in_omega(p, 0.0) {
                return Some(((k * m + i + 1) as f64 * h_eff, s));
            }
        }
        s = nsfd_impulse(&s, p);
        if !s.in_omega(p, 0.0) {
            return Some((((k + 1) * m) as f64 * h_eff, s));
        }
    }
    None
}

pub struct OmegaFailure {
    pub params: ModelParams,
    pub s0: VegState,
    pub h: f64,
    pub t: f64,
    pub state: VegState,
}

/// Outcome of the randomized feasible-region suite.
pub struct OmegaSuite {
    pub runs: usize,
    pub failures: Vec<OmegaFailure>,
}

/// `draws` random parameter sets with `sigma_NS >= 0` and random initial
/// states, each run at every step in [`OMEGA_STEPS`] for five fire periods.
pub fn omega_suite(rng: &mut impl Rng, draws: usize) -> OmegaSuite {
    let mut failures = Vec::new();
    let mut runs = 0;
    for i in 0..draws {
        let id = [2, 3][i % 2];
        let p = random_params(rng, id, true);
        let s0 = random_state(rng, &p);
        for h in OMEGA_STEPS {
            runs += 1;
            if let Some((t, state)) = first_omega_exit(&p, s0, h, 5) {
                failures.push(OmegaFailure {
                    params: p,
                    s0,
                    h,
                    t,
                    state,
                });
            }
        }
    }
    OmegaSuite { runs, failures }
}
