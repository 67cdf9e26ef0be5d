use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::region::RegionPreset;

/// Sigmoidal fire intensity `w(G) = G^α / (G^α + g0^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FireIntensity {
    /// Grass biomass at half saturation (t/ha).
    pub g0: f64,
    /// Positive integer exponent.
    pub alpha: u32,
}

impl FireIntensity {
    pub fn new(g0: f64, alpha: u32) -> Self {
        Self { g0, alpha }
    }

    /// Evaluates `w(g)`. Callers guarantee `g >= 0`; see [`fire_intensity`]
    /// for the checked version.
    pub fn eval(&self, g: f64) -> f64 {
        if g <= 0.0 {
            return 0.0;
        }
        // ratio form avoids overflow of g^alpha for large alpha
        let ratio = (self.g0 / g).powi(self.alpha as i32);
        1.0 / (1.0 + ratio)
    }

    /// `w'(g) = α g^(α-1) g0^α / (g^α + g0^α)^2`.
    pub fn derivative(&self, g: f64) -> f64 {
        if g <= 0.0 {
            return if self.alpha == 1 { 1.0 / self.g0 } else { 0.0 };
        }
        let w = self.eval(g);
        self.alpha as f64 * w * (1.0 - w) / g
    }
}

/// Checked fire intensity: rejects negative biomass.
pub fn fire_intensity(g: f64, fire: &FireIntensity) -> Result<f64> {
    if !(g >= 0.0) {
        return Err(Error::Domain(format!(
            "fire intensity needs non-negative grass biomass, got {g}"
        )));
    }
    Ok(fire.eval(g))
}

/// Names of every scalar parameter, spelled as in parameter files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamName {
    GammaS,
    GammaNs,
    GammaG,
    MuS,
    MuNs,
    MuG,
    OmegaS,
    SigmaG,
    SigmaNs,
    EtaS,
    EtaG,
    KT,
    KG,
    Tau,
    G0,
    Alpha,
}

impl ParamName {
    pub const ALL: [ParamName; 16] = [
        ParamName::GammaS,
        ParamName::GammaNs,
        ParamName::GammaG,
        ParamName::MuS,
        ParamName::MuNs,
        ParamName::MuG,
        ParamName::OmegaS,
        ParamName::SigmaG,
        ParamName::SigmaNs,
        ParamName::EtaS,
        ParamName::EtaG,
        ParamName::KT,
        ParamName::KG,
        ParamName::Tau,
        ParamName::G0,
        ParamName::Alpha,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::GammaS => "gamma_S",
            ParamName::GammaNs => "gamma_NS",
            ParamName::GammaG => "gamma_G",
            ParamName::MuS => "mu_S",
            ParamName::MuNs => "mu_NS",
            ParamName::MuG => "mu_G",
            ParamName::OmegaS => "omega_S",
            ParamName::SigmaG => "sigma_G",
            ParamName::SigmaNs => "sigma_NS",
            ParamName::EtaS => "eta_S",
            ParamName::EtaG => "eta_G",
            ParamName::KT => "K_T",
            ParamName::KG => "K_G",
            ParamName::Tau => "tau",
            ParamName::G0 => "g0",
            ParamName::Alpha => "alpha",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamName::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

/// Rates, capacities, competition and fire parameters of the model.
///
/// Rates are per year, biomasses in t/ha, competition terms in ha/t/yr.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma_s: f64,
    pub gamma_ns: f64,
    pub gamma_g: f64,
    pub mu_s: f64,
    pub mu_ns: f64,
    pub mu_g: f64,
    pub omega_s: f64,
    pub sigma_g: f64,
    /// Negative values encode facilitation of grass by mature trees.
    pub sigma_ns: f64,
    pub eta_s: f64,
    pub eta_g: f64,
    pub k_t: f64,
    pub k_g: f64,
    /// Fire return period (yr).
    pub tau: f64,
    pub fire: FireIntensity,
}

impl ModelParams {
    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::GammaS => self.gamma_s,
            ParamName::GammaNs => self.gamma_ns,
            ParamName::GammaG => self.gamma_g,
            ParamName::MuS => self.mu_s,
            ParamName::MuNs => self.mu_ns,
            ParamName::MuG => self.mu_g,
            ParamName::OmegaS => self.omega_s,
            ParamName::SigmaG => self.sigma_g,
            ParamName::SigmaNs => self.sigma_ns,
            ParamName::EtaS => self.eta_s,
            ParamName::EtaG => self.eta_g,
            ParamName::KT => self.k_t,
            ParamName::KG => self.k_g,
            ParamName::Tau => self.tau,
            ParamName::G0 => self.fire.g0,
            ParamName::Alpha => self.fire.alpha as f64,
        }
    }

    /// Sets one parameter. `alpha` must be a positive integer.
    pub fn set(&mut self, name: ParamName, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidParams(format!("{name} must be finite")));
        }
        let slot = match name {
            ParamName::GammaS => &mut self.gamma_s,
            ParamName::GammaNs => &mut self.gamma_ns,
            ParamName::GammaG => &mut self.gamma_g,
            ParamName::MuS => &mut self.mu_s,
            ParamName::MuNs => &mut self.mu_ns,
            ParamName::MuG => &mut self.mu_g,
            ParamName::OmegaS => &mut self.omega_s,
            ParamName::SigmaG => &mut self.sigma_g,
            ParamName::SigmaNs => &mut self.sigma_ns,
            ParamName::EtaS => &mut self.eta_s,
            ParamName::EtaG => &mut self.eta_g,
            ParamName::KT => &mut self.k_t,
            ParamName::KG => &mut self.k_g,
            ParamName::Tau => &mut self.tau,
            ParamName::G0 => &mut self.fire.g0,
            ParamName::Alpha => {
                if value < 1.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
                    return Err(Error::InvalidParams(format!(
                        "alpha must be a positive integer, got {value}"
                    )));
                }
                self.fire.alpha = value as u32;
                return Ok(());
            }
        };
        *slot = value;
        Ok(())
    }

    /// Copy with one parameter replaced.
    pub fn with(mut self, name: ParamName, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    /// Parses a `key = value` parameter file. All model keys are required
    /// except `g0` and `alpha`, which default to `K_G / 2` and `2`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let entries = parse_config(text)?;
        let mut seen = [false; 16];
        let mut p = ModelParams {
            gamma_s: 0.0,
            gamma_ns: 0.0,
            gamma_g: 0.0,
            mu_s: 0.0,
            mu_ns: 0.0,
            mu_g: 0.0,
            omega_s: 0.0,
            sigma_g: 0.0,
            sigma_ns: 0.0,
            eta_s: 0.0,
            eta_g: 0.0,
            k_t: 0.0,
            k_g: 0.0,
            tau: 0.0,
            fire: FireIntensity::new(f64::NAN, 2),
        };
        for (line, name, value) in entries {
            p.set(name, value).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            seen[name as usize] = true;
        }
        let missing: Vec<&str> = ParamName::ALL
            .iter()
            .filter(|n| !matches!(n, ParamName::G0 | ParamName::Alpha) && !seen[**n as usize])
            .map(|n| n.as_str())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: format!("missing keys: {}", missing.join(", ")),
            });
        }
        if !seen[ParamName::G0 as usize] {
            p.fire.g0 = p.k_g / 2.0;
        }
        Ok(p)
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_config_str(&mut self, text: &str) -> Result<()> {
        for (line, name, value) in parse_config(text)? {
            self.set(name, value).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Serializes every parameter in `key = value` form, round-trippable
    /// through [`ModelParams::from_config_str`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for name in ParamName::ALL {
            let v = self.get(name);
            if name == ParamName::Alpha {
                out.push_str(&format!("{name} = {}\n", v as u32));
            } else {
                out.push_str(&format!("{name} = {v:?}\n"));
            }
        }
        out
    }
}

fn parse_config(text: &str) -> Result<Vec<(usize, ParamName, f64)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let name: ParamName = key.trim().parse().map_err(|e: Error| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let value: f64 = value.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("`{}` is not a number", value.trim()),
        })?;
        out.push((line_no, name, value));
    }
    Ok(out)
}

/// One violated invariant or out-of-range warning.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub param: Option<ParamName>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    /// Converts the report into an error listing every violation.
    pub fn into_result(self) -> Result<()> {
        if self.errors.is_empty() {
            return Ok(());
        }
        let msgs: Vec<String> = self.errors.into_iter().map(|i| i.message).collect();
        Err(Error::InvalidParams(msgs.join("; ")))
    }
}

/// Lists every violated invariant of `p`. When `region` is given,
/// parameters outside its admissible ranges are reported as warnings.
pub fn validate(p: &ModelParams, region: Option<&RegionPreset>) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut err = |param: Option<ParamName>, message: String| {
        report.errors.push(Issue { param, message });
    };

    for name in ParamName::ALL {
        let v = p.get(name);
        if !v.is_finite() {
            err(Some(name), format!("{name} must be finite, got {v}"));
            continue;
        }
        let nonneg = !matches!(name, ParamName::SigmaNs);
        if nonneg && v < 0.0 {
            err(Some(name), format!("{name} must be >= 0, got {v}"));
        }
    }
    for (name, v) in [
        (ParamName::MuNs, p.mu_ns),
        (ParamName::OmegaS, p.omega_s),
        (ParamName::GammaG, p.gamma_g),
        (ParamName::KT, p.k_t),
        (ParamName::KG, p.k_g),
        (ParamName::Tau, p.tau),
        (ParamName::G0, p.fire.g0),
    ] {
        if v.is_finite() && v <= 0.0 {
            err(Some(name), format!("{name} must be > 0, got {v}"));
        }
    }
    if p.eta_s > 1.0 {
        err(
            Some(ParamName::EtaS),
            format!("eta_S must lie in [0, 1], got {}", p.eta_s),
        );
    }
    if p.eta_g >= 1.0 {
        err(
            Some(ParamName::EtaG),
            format!("eta_G must lie in [0, 1), got {}", p.eta_g),
        );
    }
    if p.fire.alpha == 0 {
        err(Some(ParamName::Alpha), "alpha must be >= 1".to_string());
    }

    if let Some(preset) = region {
        for name in ParamName::ALL {
            let v = p.get(name);
            let ranges: Vec<_> = preset.ranges_for(name).collect();
            if ranges.is_empty() || ranges.iter().any(|r| r.contains(v)) {
                continue;
            }
            let spans: Vec<String> = ranges
                .iter()
                .map(|r| format!("[{}, {}]", r.min, r.max))
                .collect();
            report.warnings.push(Issue {
                param: Some(name),
                message: format!(
                    "{name} = {v} lies outside the region {} range {}",
                    preset.id,
                    spans.join(" or ")
                ),
            });
        }
    }
    report
}
