//! Closed-form ecological thresholds, the forest equilibrium, the grassland
//! periodic solution and the qualitative classification built on them.
//!
//! ```
//! use savanna::model::region_preset;
//! use savanna::thresholds::compute_thresholds;
//!
//! let p = region_preset(1).unwrap().defaults;
//! let rep = compute_thresholds(&p).unwrap();
//! assert!((rep.r_t0 - 3.2222).abs() < 1e-3);
//! assert_eq!(rep.r_g0, Some(2.0));
//! ```

mod classify;
mod critical;
mod grassland;

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::{csv_num, csv_opt, human_num, human_opt};
use crate::model::{ModelParams, VegState};

pub use classify::{classify, Classification, Stability, Verdict, DEGENERATE_TOL};
pub use critical::{
    critical_values, estimate_sigma_ns, eta_g_boundary, tau_boundary, CriticalValues,
    SigmaNsEstimation,
};
pub(crate) use grassland::grass_rate;
pub use grassland::{grassland_mean, grassland_orbit, grassland_peak, grassland_trough, rho_g0};

/// Every threshold of one parameter set.
///
/// Quantities that only make sense when a boundary solution exists are
/// `None` otherwise: the grassland block (`g_int` through `rho_t`) needs the
/// grassland orbit, the forest block (`r_t_g`, `rho_t_g`) needs `E_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub params: ModelParams,
    pub r_t0: f64,
    /// `None` when `μ_G = 0`.
    pub r_g0: Option<f64>,
    pub rho_g0: f64,
    pub g_int: Option<f64>,
    /// `G*(τ⁻)`, the grass level met by each fire on the grassland orbit.
    pub g_peak: Option<f64>,
    pub r_g_t: Option<f64>,
    pub r: Option<f64>,
    pub a_coef: Option<f64>,
    pub b_coef: Option<f64>,
    /// Root of `λ² - 𝒜λ + ℬ` with the larger real part.
    pub lambda1: Option<Complex64>,
    pub lambda2: Option<Complex64>,
    pub complex_roots: bool,
    pub rho_t: Option<f64>,
    /// `+∞` when `μ_G + σ_NS T̄_NS <= 0`.
    pub r_t_g: Option<f64>,
    pub rho_t_g: Option<f64>,
    pub forest_eq: Option<VegState>,
    pub grassland_exists: bool,
    pub forest_exists: bool,
    pub savanna_existence_condition: bool,
    pub classification: Classification,
}

/// Forest equilibrium `(T̄_S, T̄_NS, 0)`, when `R_T^0 > 1`.
pub fn forest_equilibrium(p: &ModelParams) -> Option<VegState> {
    let r_t0 = r_t0(p);
    if r_t0 <= 1.0 {
        return None;
    }
    let t_s = p.k_t * p.mu_ns / (p.mu_ns + p.omega_s) * (1.0 - 1.0 / r_t0);
    Some(VegState::new(t_s, p.omega_s / p.mu_ns * t_s, 0.0))
}

fn r_t0(p: &ModelParams) -> f64 {
    (p.gamma_s * p.mu_ns + p.gamma_ns * p.omega_s) / (p.mu_ns * (p.mu_s + p.omega_s))
}

/// Roots of `λ² - a λ + b`, larger real part first.
pub fn quadratic_roots(a: f64, b: f64) -> (Complex64, Complex64) {
    let disc = a * a - 4.0 * b;
    if disc >= 0.0 {
        let q = 0.5 * (a + disc.sqrt().copysign(a));
        let (x, y) = if q == 0.0 { (0.0, 0.0) } else { (q, b / q) };
        (Complex64::new(x.max(y), 0.0), Complex64::new(x.min(y), 0.0))
    } else {
        let im = 0.5 * (-disc).sqrt();
        (Complex64::new(0.5 * a, im), Complex64::new(0.5 * a, -im))
    }
}

struct GrassBlock {
    g_int: f64,
    g_peak: f64,
    r_g_t: f64,
    r: f64,
    a: f64,
    b: f64,
    lambda1: Complex64,
    lambda2: Complex64,
    rho_t: f64,
}

fn grass_block(p: &ModelParams) -> Result<GrassBlock> {
    let g_int = grassland_mean(p)?;
    let g_peak = grassland_peak(p)?;
    // per-capita loss of sensitive trees on the grassland, averaged over a period
    let loss = p.mu_s + p.omega_s + p.sigma_g * g_int;
    let r_g_t = (p.gamma_s * p.mu_ns + p.omega_s * p.gamma_ns) / (p.mu_ns * loss);
    let r = p.gamma_s / (loss + p.mu_ns);
    let a = p.tau * (p.gamma_s - loss - p.mu_ns);
    let b = p.tau * p.tau * (p.mu_ns * loss - (p.gamma_s * p.mu_ns + p.omega_s * p.gamma_ns));
    let (lambda1, lambda2) = quadratic_roots(a, b);
    let survive = 1.0 - p.eta_s * p.fire.eval(g_peak);
    let rho_t = (survive * lambda1.re.exp()).max(lambda2.re.exp());
    Ok(GrassBlock {
        g_int,
        g_peak,
        r_g_t,
        r,
        a,
        b,
        lambda1,
        lambda2,
        rho_t,
    })
}

pub fn compute_thresholds(p: &ModelParams) -> Result<ThresholdReport> {
    if !(p.eta_g < 1.0) {
        return Err(Error::InvalidParams(format!(
            "eta_G = {} must be < 1",
            p.eta_g
        )));
    }
    crate::model::validate(p, None).into_result()?;

    let r_t0 = r_t0(p);
    let r_g0 = (p.mu_g > 0.0).then(|| p.gamma_g / p.mu_g);
    let rho_g0 = rho_g0(p);
    let grassland_exists = r_g0.is_none_or(|r| r > 1.0) && rho_g0 > 1.0;
    let gb = if grassland_exists {
        Some(grass_block(p)?)
    } else {
        None
    };

    let forest_eq = forest_equilibrium(p);
    let (r_t_g, rho_t_g) = match forest_eq {
        Some(e) => {
            let pressure = p.mu_g + p.sigma_ns * e.t_ns;
            let r_t_g = if pressure > 0.0 {
                p.gamma_g / pressure
            } else {
                f64::INFINITY
            };
            let rho = (1.0 - p.eta_g) * ((p.gamma_g - pressure) * p.tau).exp();
            (Some(r_t_g), Some(rho))
        }
        None => (None, None),
    };

    let mut rep = ThresholdReport {
        params: *p,
        r_t0,
        r_g0,
        rho_g0,
        g_int: gb.as_ref().map(|g| g.g_int),
        g_peak: gb.as_ref().map(|g| g.g_peak),
        r_g_t: gb.as_ref().map(|g| g.r_g_t),
        r: gb.as_ref().map(|g| g.r),
        a_coef: gb.as_ref().map(|g| g.a),
        b_coef: gb.as_ref().map(|g| g.b),
        lambda1: gb.as_ref().map(|g| g.lambda1),
        lambda2: gb.as_ref().map(|g| g.lambda2),
        complex_roots: gb.as_ref().is_some_and(|g| g.lambda1.im != 0.0),
        rho_t: gb.as_ref().map(|g| g.rho_t),
        r_t_g,
        rho_t_g,
        forest_eq,
        grassland_exists,
        forest_exists: forest_eq.is_some(),
        savanna_existence_condition: grassland_exists,
        classification: Classification {
            verdict: Verdict::Degenerate("unclassified"),
            grassland: Stability::Absent,
            forest: Stability::Absent,
        },
    };
    rep.classification = classify(&rep);
    Ok(rep)
}

/// Column order of [`ThresholdReport::csv_row`].
pub const THRESHOLD_CSV_HEADER: &str = "r_t0,r_g0,rho_g0,g_int,g_peak,r_g_t,r,a_coef,b_coef,\
lambda1_re,lambda1_im,lambda2_re,lambda2_im,complex_roots,rho_t,r_t_g,rho_t_g,t_s_bar,t_ns_bar,\
grassland_exists,forest_exists,savanna_existence_condition,verdict,grassland_stability,forest_stability";

impl ThresholdReport {
    /// One CSV row matching [`THRESHOLD_CSV_HEADER`]; undefined fields are
    /// empty.
    pub fn csv_row(&self) -> String {
        let fields = [
            csv_num(self.r_t0),
            csv_opt(self.r_g0),
            csv_num(self.rho_g0),
            csv_opt(self.g_int),
            csv_opt(self.g_peak),
            csv_opt(self.r_g_t),
            csv_opt(self.r),
            csv_opt(self.a_coef),
            csv_opt(self.b_coef),
            csv_opt(self.lambda1.map(|l| l.re)),
            csv_opt(self.lambda1.map(|l| l.im)),
            csv_opt(self.lambda2.map(|l| l.re)),
            csv_opt(self.lambda2.map(|l| l.im)),
            self.complex_roots.to_string(),
            csv_opt(self.rho_t),
            csv_opt(self.r_t_g),
            csv_opt(self.rho_t_g),
            csv_opt(self.forest_eq.map(|e| e.t_s)),
            csv_opt(self.forest_eq.map(|e| e.t_ns)),
            self.grassland_exists.to_string(),
            self.forest_exists.to_string(),
            self.savanna_existence_condition.to_string(),
            self.classification.verdict.to_string(),
            self.classification.grassland.to_string(),
            self.classification.forest.to_string(),
        ];
        fields.join(",")
    }

    /// Aligned `name = value` listing with 6 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = |z: Option<Complex64>| match z {
            Some(z) if z.im != 0.0 => format!(
                "{} {} {}i",
                human_num(z.re),
                if z.im < 0.0 { '-' } else { '+' },
                human_num(z.im.abs())
            ),
            Some(z) => human_num(z.re),
            None => "undefined".into(),
        };
        let rows: Vec<(&str, String)> = vec![
            ("R_T^0", human_num(self.r_t0)),
            (
                "R_G^0",
                self.r_g0
                    .map_or_else(|| "undefined (mu_G = 0)".into(), human_num),
            ),
            ("rho_G^0", human_num(self.rho_g0)),
            ("G_int", human_opt(self.g_int)),
            ("G*(tau-)", human_opt(self.g_peak)),
            ("R_G^T", human_opt(self.r_g_t)),
            ("R", human_opt(self.r)),
            ("A", human_opt(self.a_coef)),
            ("B", human_opt(self.b_coef)),
            ("lambda1", c(self.lambda1)),
            ("lambda2", c(self.lambda2)),
            ("rho_T", human_opt(self.rho_t)),
            ("R_T^G", human_opt(self.r_t_g)),
            ("rho_T^G", human_opt(self.rho_t_g)),
            ("T_S bar", human_opt(self.forest_eq.map(|e| e.t_s))),
            ("T_NS bar", human_opt(self.forest_eq.map(|e| e.t_ns))),
            ("grassland exists", self.grassland_exists.to_string()),
            ("forest exists", self.forest_exists.to_string()),
            (
                "savanna condition",
                self.savanna_existence_condition.to_string(),
            ),
            ("classification", self.classification.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<18} = {v}");
        }
        if self.complex_roots {
            out.push_str("# complex roots: rho_T uses exp(Re lambda)\n");
        }
        out
    }
}
