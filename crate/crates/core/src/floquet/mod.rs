//! Linearization along periodic orbits: Jacobians, monodromy matrices,
//! Floquet multipliers and periodic-orbit location by shooting.
//!
//! The monodromy matrix of a `τ`-periodic orbit with post-fire anchor `x₀`
//! is `M = J_fire(x(τ⁻)) Φ(τ)`, where `Φ` solves the variational equation
//! `Φ' = DF(x(t)) Φ`, `Φ(0) = I`. The orbit is locally asymptotically
//! stable when every multiplier (eigenvalue of `M`) lies inside the unit
//! circle.

mod linalg;
mod orbit;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::model::{impulse_map, vector_field, ModelParams, VegState};
use crate::thresholds::{compute_thresholds, grass_rate, grassland_trough};

pub use linalg::{eig3, eigen_residual, spectral_radius, Mat3};
pub use orbit::{locate_savanna_orbit, OrbitKind, OrbitLocation, ShootingOptions};

/// Default number of RK4 steps per period for variational integration.
pub const DEFAULT_STEPS: usize = 2048;

/// Jacobian `DF` of the flow.
pub fn jacobian(s: &VegState, p: &ModelParams) -> Mat3 {
    let (x, y, z) = (s.t_s, s.t_ns, s.g);
    let a1 = p.gamma_s * (1.0 - (2.0 * x + y) / p.k_t)
        - p.gamma_ns * y / p.k_t
        - p.sigma_g * z
        - p.mu_s
        - p.omega_s;
    let a2 = p.gamma_ns * (1.0 - (x + 2.0 * y) / p.k_t) - p.gamma_s * x / p.k_t;
    let a3 = p.gamma_g * (1.0 - 2.0 * z / p.k_g) - p.sigma_ns * y - p.mu_g;
    Mat3([
        [a1, a2, -p.sigma_g * x],
        [p.omega_s, -p.mu_ns, 0.0],
        [0.0, -p.sigma_ns * z, a3],
    ])
}

/// Linearization of the fire map at the pre-fire state `s`.
pub fn jump_jacobian(s: &VegState, p: &ModelParams) -> Mat3 {
    let w = p.fire.eval(s.g);
    let dw = p.fire.derivative(s.g);
    Mat3([
        [1.0 - p.eta_s * w, 0.0, -p.eta_s * dw * s.t_s],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0 - p.eta_g],
    ])
}

/// Result of integrating the variational equation over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    /// `J_fire · Φ(τ)`.
    pub matrix: Mat3,
    /// Fundamental matrix at `τ⁻`.
    pub phi: Mat3,
    /// Orbit state just before the fire.
    pub pre_fire: VegState,
    /// State after the fire, `P(anchor)`.
    pub image: VegState,
    /// `∫₀^τ tr DF(x(t)) dt`.
    pub trace_integral: f64,
}

#[derive(Clone, Copy)]
struct Augmented {
    x: VegState,
    phi: Mat3,
    tr: f64,
}

fn aug_rhs(a: &Augmented, p: &ModelParams) -> Augmented {
    let j = jacobian(&a.x, p);
    Augmented {
        x: vector_field(&a.x, p),
        phi: j * a.phi,
        tr: j.trace(),
    }
}

fn aug_axpy(a: &Augmented, k: f64, d: &Augmented) -> Augmented {
    Augmented {
        x: a.x + k * d.x,
        phi: a.phi + d.phi.scale(k),
        tr: a.tr + k * d.tr,
    }
}

/// Flow plus variational equation over one period with RK4, without the
/// feasibility check. The derivative of the discrete period map is exact.
pub(crate) fn integrate_variational(p: &ModelParams, anchor: &VegState, steps: usize) -> Monodromy {
    let h = p.tau / steps as f64;
    let mut a = Augmented {
        x: *anchor,
        phi: Mat3::IDENTITY,
        tr: 0.0,
    };
    for _ in 0..steps {
        let k1 = aug_rhs(&a, p);
        let k2 = aug_rhs(&aug_axpy(&a, 0.5 * h, &k1), p);
        let k3 = aug_rhs(&aug_axpy(&a, 0.5 * h, &k2), p);
        let k4 = aug_rhs(&aug_axpy(&a, h, &k3), p);
        let mut sum = aug_axpy(&k1, 2.0, &k2);
        sum = aug_axpy(&sum, 2.0, &k3);
        sum = aug_axpy(&sum, 1.0, &k4);
        a = aug_axpy(&a, h / 6.0, &sum);
    }
    Monodromy {
        matrix: jump_jacobian(&a.x, p) * a.phi,
        phi: a.phi,
        pre_fire: a.x,
        image: impulse_map(&a.x, p),
        trace_integral: a.tr,
    }
}

/// Upper bound on grass biomass, relaxed when trees facilitate grass.
fn grass_bound(p: &ModelParams) -> f64 {
    p.k_g * (1.0 + (-p.sigma_ns).max(0.0) * p.k_t / p.gamma_g)
}

fn check_feasible(s: &VegState, p: &ModelParams) -> Result<()> {
    let tol = 1e-6;
    let ok = s.is_finite()
        && s.t_s >= -tol
        && s.t_ns >= -tol
        && s.g >= -tol
        && s.t_s + s.t_ns <= p.k_t * (1.0 + tol)
        && s.g <= grass_bound(p) * (1.0 + tol);
    if ok {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "orbit leaves the feasible region at {s:?}"
        )))
    }
}

/// Monodromy matrix of the orbit through `anchor` (a post-fire state).
pub fn monodromy(p: &ModelParams, anchor: &VegState, steps: usize) -> Result<Monodromy> {
    if steps == 0 {
        return Err(Error::Domain("steps per period must be positive".into()));
    }
    check_feasible(anchor, p)?;
    let m = integrate_variational(p, anchor, steps);
    check_feasible(&m.pre_fire, p)?;
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitStability {
    Stable,
    Unstable,
}

impl std::fmt::Display for OrbitStability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OrbitStability::Stable => "stable",
            OrbitStability::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetReport {
    pub orbit_anchor: VegState,
    pub monodromy: Mat3,
    /// Sorted by decreasing modulus.
    pub multipliers: [Complex64; 3],
    pub rho_tg: f64,
    pub verdict: OrbitStability,
    /// Analytic grassland multipliers, when the grassland orbit exists.
    pub xi: Option<[Complex64; 3]>,
    /// `‖P(anchor) - anchor‖∞`.
    pub residual: f64,
    /// `|det Φ(τ) - exp(∫ tr DF)|`, relative.
    pub liouville_error: f64,
    /// `|det M - Π multipliers|`.
    pub det_error: f64,
    /// Largest eigen-residual `‖Mv - λv‖/‖v‖` over the multipliers.
    pub eigen_residual: f64,
}

pub const FLOQUET_CSV_HEADER: &str = "t_s,t_ns,g,m11,m12,m13,m21,m22,m23,m31,m32,m33,\
modulus1,modulus2,modulus3,rho_tg,verdict";

impl FloquetReport {
    pub fn csv_row(&self) -> String {
        let a = self.orbit_anchor;
        let mut fields: Vec<String> = vec![csv_num(a.t_s), csv_num(a.t_ns), csv_num(a.g)];
        fields.extend(self.monodromy.entries().iter().map(|&x| csv_num(x)));
        fields.extend(self.multipliers.iter().map(|z| csv_num(z.norm())));
        fields.push(csv_num(self.rho_tg));
        fields.push(self.verdict.to_string());
        fields.join(",")
    }
}

fn report_from(p: &ModelParams, anchor: &VegState, m: &Monodromy) -> FloquetReport {
    let multipliers = eig3(&m.matrix);
    let rho_tg = multipliers[0].norm();
    let liouville = m.trace_integral.exp();
    let prod = multipliers[0] * multipliers[1] * multipliers[2];
    FloquetReport {
        orbit_anchor: *anchor,
        monodromy: m.matrix,
        multipliers,
        rho_tg,
        verdict: if rho_tg < 1.0 {
            OrbitStability::Stable
        } else {
            OrbitStability::Unstable
        },
        xi: grassland_multipliers_analytic(p).ok(),
        residual: (m.image - *anchor).max_abs(),
        liouville_error: (m.phi.det() - liouville).abs() / liouville,
        det_error: (m.matrix.det() - prod.re).abs().max(prod.im.abs()),
        eigen_residual: multipliers
            .iter()
            .map(|&z| eigen_residual(&m.matrix, z))
            .fold(0.0, f64::max),
    }
}

/// Floquet analysis of the orbit anchored at `anchor`.
pub fn rho_tg(p: &ModelParams, anchor: &VegState, steps: usize) -> Result<FloquetReport> {
    let m = monodromy(p, anchor, steps)?;
    Ok(report_from(p, anchor, &m))
}

/// Analytic multipliers `(ξ1, ξ2, ξ3)` of the grassland orbit from the
/// closed-form thresholds.
pub fn grassland_multipliers_analytic(p: &ModelParams) -> Result<[Complex64; 3]> {
    let rep = compute_thresholds(p)?;
    let (Some(l1), Some(l2), Some(peak)) = (rep.lambda1, rep.lambda2, rep.g_peak) else {
        return Err(Error::Undefined {
            quantity: "grassland multipliers",
            reason: "the grassland orbit does not exist".into(),
        });
    };
    let survive = 1.0 - p.eta_s * p.fire.eval(peak);
    let xi3 = (-grass_rate(p) * p.tau).exp() / (1.0 - p.eta_g);
    Ok([survive * l1.exp(), l2.exp(), Complex64::new(xi3, 0.0)])
}

/// Comparison of the closed-form grassland stability threshold with the
/// numerical monodromy at the grassland orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct GrasslandAudit {
    pub rho_t_closed_form: f64,
    /// Largest modulus of the tree-block multipliers of the numerical `M`.
    pub tree_multiplier: f64,
    /// Numerical grass multiplier `M₃₃`.
    pub grass_multiplier: f64,
    pub xi3: f64,
    /// Whether both sides put the grassland on the same side of 1.
    pub agree: bool,
    pub report: FloquetReport,
}

pub fn audit_grassland(p: &ModelParams, steps: usize) -> Result<GrasslandAudit> {
    let rep = compute_thresholds(p)?;
    let rho_t_closed_form = rep.rho_t.ok_or(Error::Undefined {
        quantity: "rho_T",
        reason: "the grassland orbit does not exist".into(),
    })?;
    let anchor = VegState::new(0.0, 0.0, grassland_trough(p)?);
    let fl = rho_tg(p, &anchor, steps)?;
    let m = fl.monodromy.0;
    // multipliers of the upper-left tree block
    let (tr, det) = (m[0][0] + m[1][1], m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    let disc = tr * tr - 4.0 * det;
    let tree_multiplier = if disc >= 0.0 {
        (0.5 * (tr.abs() + disc.sqrt())).abs()
    } else {
        det.sqrt()
    };
    let xi3 = (-grass_rate(p) * p.tau).exp() / (1.0 - p.eta_g);
    Ok(GrasslandAudit {
        rho_t_closed_form,
        tree_multiplier,
        grass_multiplier: m[2][2],
        xi3,
        agree: (rho_t_closed_form > 1.0) == (tree_multiplier > 1.0),
        report: fl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::region_preset;
    use crate::model::ParamName;
    use crate::thresholds::forest_equilibrium;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn region(id: u8) -> ModelParams {
        region_preset(id).unwrap().defaults
    }

    fn random_state(rng: &mut ChaCha8Rng, p: &ModelParams) -> VegState {
        let total = rng.gen_range(0.0..p.k_t);
        let frac = rng.gen_range(0.0..1.0);
        VegState::new(
            total * frac,
            total * (1.0 - frac),
            rng.gen_range(0.0..p.k_g),
        )
    }

    #[test]
    fn jacobian_at_origin() {
        let p = region(2);
        let j = jacobian(&VegState::ZERO, &p);
        assert_eq!(j.0[0], [p.gamma_s - p.mu_s - p.omega_s, p.gamma_ns, 0.0]);
        assert_eq!(j.0[1], [p.omega_s, -p.mu_ns, 0.0]);
        assert_eq!(j.0[2], [0.0, 0.0, p.gamma_g - p.mu_g]);
    }

    #[test]
    fn jacobian_at_forest_column() {
        let p = region(3);
        let e = forest_equilibrium(&p).unwrap();
        let j = jacobian(&e, &p);
        assert_eq!(j.get(0, 2), -p.sigma_g * e.t_s);
        assert_eq!(j.get(1, 2), 0.0);
        assert!((j.get(2, 2) - (p.gamma_g - p.mu_g - p.sigma_ns * e.t_ns)).abs() < 1e-12);
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = region(rng.gen_range(1..=3));
            let s = random_state(&mut rng, &p);
            let j = jacobian(&s, &p);
            let jj = jump_jacobian(&s, &p);
            for col in 0..3 {
                let d = 1e-5 * (1.0 + s.to_array()[col].abs());
                let mut plus = s.to_array();
                let mut minus = s.to_array();
                plus[col] += d;
                minus[col] -= d;
                let (sp, sm) = (VegState::from_array(plus), VegState::from_array(minus));
                let fd = ((1.0 / (2.0 * d)) * (vector_field(&sp, &p) - vector_field(&sm, &p)))
                    .to_array();
                let fdj =
                    ((1.0 / (2.0 * d)) * (impulse_map(&sp, &p) - impulse_map(&sm, &p))).to_array();
                for row in 0..3 {
                    assert!((j.get(row, col) - fd[row]).abs() < 1e-6, "DF[{row}][{col}]");
                    assert!(
                        (jj.get(row, col) - fdj[row]).abs() < 1e-6,
                        "J[{row}][{col}]"
                    );
                }
            }
        }
    }

    #[test]
    fn jump_jacobian_special_cases() {
        let mut p = region(1);
        let s = VegState::new(3.0, 2.0, 1.0);
        p.eta_s = 0.0;
        p.eta_g = 0.0;
        assert_eq!(jump_jacobian(&s, &p), Mat3::IDENTITY);
        let p = region(1);
        let g = VegState::new(0.0, 0.0, 1.0);
        let w = p.fire.eval(1.0);
        assert_eq!(
            jump_jacobian(&g, &p),
            Mat3::diag(1.0 - p.eta_s * w, 1.0, 1.0 - p.eta_g)
        );
    }

    #[test]
    fn desert_monodromy_is_matrix_exponential() {
        let mut p = region(1);
        p.eta_s = 0.0;
        p.eta_g = 0.0;
        let m = monodromy(&p, &VegState::ZERO, DEFAULT_STEPS)
            .unwrap()
            .matrix;
        let grass = ((p.gamma_g - p.mu_g) * p.tau).exp();
        assert!((m.get(2, 2) - grass).abs() < 1e-9 * grass);
        // tree block: eigenvalues are exp(τ μ) for the eigenvalues μ of DF(0)
        let a = p.gamma_s - p.mu_s - p.omega_s;
        let (tr, det) = (a - p.mu_ns, -a * p.mu_ns - p.gamma_ns * p.omega_s);
        let disc = (tr * tr - 4.0 * det).sqrt();
        let top = (0.5 * (tr + disc) * p.tau).exp();
        let ev = eig3(&m);
        assert!(ev.iter().any(|z| (z.re - top).abs() < 1e-8 * top));
    }

    #[test]
    fn grassland_monodromy_matches_xi3() {
        for id in 1..=3 {
            let p = region(id);
            let audit = audit_grassland(&p, DEFAULT_STEPS).unwrap();
            assert!(audit.xi3 < 1.0);
            assert!(
                (audit.grass_multiplier - audit.xi3).abs() < 1e-6,
                "region {id}"
            );
            let m = audit.report.monodromy;
            assert!(m.get(0, 2).abs() < 1e-8 && m.get(1, 2) == 0.0);
            assert!(audit.report.liouville_error < 1e-6);
            assert!(audit.report.residual < 1e-8);
        }
    }

    #[test]
    fn report_invariants() {
        let p = region(2).with(ParamName::MuG, 0.2).unwrap();
        let fl = rho_tg(&p, &VegState::new(10.0, 10.0, 2.0), DEFAULT_STEPS).unwrap();
        assert_eq!(
            fl.rho_tg,
            fl.multipliers.iter().map(|z| z.norm()).fold(0.0, f64::max)
        );
        assert!(fl.det_error < 1e-8 * fl.monodromy.det().abs().max(1.0));
        assert!(fl.liouville_error < 1e-6);
        assert_eq!(
            fl.csv_row().split(',').count(),
            FLOQUET_CSV_HEADER.split(',').count()
        );
    }

    #[test]
    fn infeasible_anchor_rejected() {
        let p = region(1);
        assert!(monodromy(&p, &VegState::new(-1.0, 0.0, 1.0), 64).is_err());
        assert!(monodromy(&p, &VegState::new(1.0, 0.0, 1.0), 0).is_err());
    }
}
