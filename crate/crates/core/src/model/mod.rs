//! State and parameter types, the continuous vector field between fires and
//! the fire impulse map.
//!
//! Between fire events the biomasses of sensitive trees `T_S`, non-sensitive
//! trees `T_NS` and grass `G` follow
//!
//! ```text
//! T_S'  = (γ_S T_S + γ_NS T_NS)(1 - (T_S + T_NS)/K_T) - T_S (μ_S + ω_S + σ_G G)
//! T_NS' = ω_S T_S - μ_NS T_NS
//! G'    = γ_G (1 - G/K_G) G - (σ_NS T_NS + μ_G) G
//! ```
//!
//! and at every fire time `t_k = k τ` the state is reset by
//! `T_S ← (1 - η_S w(G)) T_S`, `G ← (1 - η_G) G`, with `T_NS` unchanged.

mod params;
mod region;

use std::ops::{Add, Mul, Sub};

pub use params::{
    fire_intensity, validate, FireIntensity, Issue, ModelParams, ParamName, ValidationReport,
};
pub use region::{region_preset, ParamRange, RegionPreset};

/// Biomass triple `(T_S, T_NS, G)` in t/ha.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VegState {
    pub t_s: f64,
    pub t_ns: f64,
    pub g: f64,
}

impl VegState {
    pub const ZERO: VegState = VegState {
        t_s: 0.0,
        t_ns: 0.0,
        g: 0.0,
    };

    pub fn new(t_s: f64, t_ns: f64, g: f64) -> Self {
        Self { t_s, t_ns, g }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.t_s, self.t_ns, self.g]
    }

    pub fn is_finite(&self) -> bool {
        self.t_s.is_finite() && self.t_ns.is_finite() && self.g.is_finite()
    }

    pub fn max_abs(&self) -> f64 {
        self.t_s.abs().max(self.t_ns.abs()).max(self.g.abs())
    }

    pub fn norm(&self) -> f64 {
        (self.t_s * self.t_s + self.t_ns * self.t_ns + self.g * self.g).sqrt()
    }

    /// Membership in the feasible region `0 <= T_S + T_NS <= K_T`,
    /// `0 <= G <= K_G`, all components non-negative. `tol` is a relative
    /// slack on the upper bounds.
    pub fn in_omega(&self, p: &ModelParams, tol: f64) -> bool {
        self.t_s >= 0.0
            && self.t_ns >= 0.0
            && self.g >= 0.0
            && self.t_s + self.t_ns <= p.k_t * (1.0 + tol)
            && self.g <= p.k_g * (1.0 + tol)
    }
}

impl Add for VegState {
    type Output = VegState;
    fn add(self, o: VegState) -> VegState {
        VegState::new(self.t_s + o.t_s, self.t_ns + o.t_ns, self.g + o.g)
    }
}

impl Sub for VegState {
    type Output = VegState;
    fn sub(self, o: VegState) -> VegState {
        VegState::new(self.t_s - o.t_s, self.t_ns - o.t_ns, self.g - o.g)
    }
}

impl Mul<VegState> for f64 {
    type Output = VegState;
    fn mul(self, s: VegState) -> VegState {
        VegState::new(self * s.t_s, self * s.t_ns, self * s.g)
    }
}

/// Right-hand side of the flow between fires.
pub fn vector_field(s: &VegState, p: &ModelParams) -> VegState {
    let trees = s.t_s + s.t_ns;
    let d_ts = (p.gamma_s * s.t_s + p.gamma_ns * s.t_ns) * (1.0 - trees / p.k_t)
        - s.t_s * (p.mu_s + p.omega_s + p.sigma_g * s.g);
    let d_tns = p.omega_s * s.t_s - p.mu_ns * s.t_ns;
    let d_g = p.gamma_g * (1.0 - s.g / p.k_g) * s.g - (p.sigma_ns * s.t_ns + p.mu_g) * s.g;
    VegState::new(d_ts, d_tns, d_g)
}

/// State immediately after a fire, given the state just before it.
pub fn impulse_map(s: &VegState, p: &ModelParams) -> VegState {
    let w = p.fire.eval(s.g);
    VegState::new((1.0 - p.eta_s * w) * s.t_s, s.t_ns, (1.0 - p.eta_g) * s.g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn region1() -> ModelParams {
        region_preset(1).unwrap().defaults
    }

    #[test]
    fn desert_is_fixed() {
        for id in 1..=3 {
            let p = region_preset(id).unwrap().defaults;
            assert_eq!(vector_field(&VegState::ZERO, &p), VegState::ZERO);
        }
    }

    #[test]
    fn vector_field_matches_independent_expressions() {
        let p = region1();
        let s = VegState::new(1.0, 1.0, 1.0);
        let f = vector_field(&s, &p);
        // expanded by hand: (0.3 + 1)(1 - 2/30) - (0.2 + 0.1 + 0.59135)
        let d_ts = 1.3 * (28.0 / 30.0) - 0.89135;
        let d_tns = 0.1 - 0.15;
        let d_g = 0.6 * (1.0 - 1.0 / 2.5) - (-0.02225 + 0.3);
        assert!((f.t_s - d_ts).abs() < 1e-14);
        assert!((f.t_ns - d_tns).abs() < 1e-14);
        assert!((f.g - d_g).abs() < 1e-14);
    }

    #[test]
    fn impulse_examples() {
        let mut p = region1();
        let s = VegState::new(10.0, 5.0, p.fire.g0);
        p.eta_s = 0.0;
        p.eta_g = 0.0;
        assert_eq!(impulse_map(&s, &p), s);

        p.eta_s = 0.5;
        p.eta_g = 0.6;
        let out = impulse_map(&s, &p);
        assert!((out.t_s - 7.5).abs() < 1e-14);
        assert_eq!(out.t_ns, 5.0);
        assert!((out.g - 0.4 * p.fire.g0).abs() < 1e-14);

        let top = VegState::new(0.0, 0.0, p.k_g);
        let out = impulse_map(&top, &p);
        assert_eq!((out.t_s, out.t_ns), (0.0, 0.0));
        assert!((out.g - 0.4 * p.k_g).abs() < 1e-14);
    }

    fn omega_state(p: ModelParams) -> impl Strategy<Value = VegState> {
        (0.0..1.0f64, 0.0..1.0f64, 0.0..=1.0f64).prop_map(move |(a, b, c)| {
            let total = a * p.k_t;
            VegState::new(total * b, total * (1.0 - b), c * p.k_g)
        })
    }

    proptest! {
        #[test]
        fn fire_intensity_monotone_and_bounded(g0 in 0.01..20.0f64, alpha in 1u32..6,
                                               a in 0.0..50.0f64, d in 1e-6..10.0f64) {
            let fire = FireIntensity::new(g0, alpha);
            let (lo, hi) = (fire.eval(a), fire.eval(a + d));
            prop_assert!(lo < hi);
            prop_assert!((0.0..1.0).contains(&lo) && hi < 1.0);
        }

        #[test]
        fn impulse_never_increases(s in omega_state(region1()), eta_s in 0.0..=1.0f64, eta_g in 0.0..1.0f64) {
            let mut p = region1();
            p.eta_s = eta_s;
            p.eta_g = eta_g;
            let out = impulse_map(&s, &p);
            prop_assert!(out.t_s <= s.t_s && out.g <= s.g);
            prop_assert_eq!(out.t_ns, s.t_ns);
            prop_assert!(out.in_omega(&p, 0.0));
        }

        #[test]
        fn flow_points_inward_on_boundary(frac in 0.0..=1.0f64, g in 0.0..=1.0f64, region in 1u8..=3) {
            let p = region_preset(region).unwrap().defaults;
            // tree boundary T_S + T_NS = K_T
            let s = VegState::new(frac * p.k_t, (1.0 - frac) * p.k_t, g * p.k_g);
            let f = vector_field(&s, &p);
            prop_assert!(f.t_s + f.t_ns <= 1e-12);
            // grass boundary G = K_G
            let s = VegState::new(frac * p.k_t * 0.5, (1.0 - frac) * p.k_t * 0.5, p.k_g);
            let f = vector_field(&s, &p);
            if p.sigma_ns >= 0.0 {
                prop_assert!(f.g <= 0.0);
            } else {
                // facilitation: G may exceed K_G up to K_G (1 + |σ_NS| K_T / γ_G)
                let bound = p.k_g * (1.0 + p.sigma_ns.abs() * p.k_t / p.gamma_g);
                let s = VegState::new(s.t_s, s.t_ns, bound);
                prop_assert!(vector_field(&s, &p).g <= 0.0);
            }
        }
    }
}
