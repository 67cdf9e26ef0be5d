//! Parameter presets for the three biomass-production regions: semi-arid
//! (1), mesic (2) and humid tropical (3).

use crate::error::{Error, Result};
use crate::model::params::{FireIntensity, ModelParams, ParamName};

/// Admissible interval for one parameter. A parameter may carry several
/// disjoint intervals (region 2 has a facilitation and a competition branch
/// for `sigma_NS`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub name: ParamName,
    pub min: f64,
    pub max: f64,
}

impl ParamRange {
    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPreset {
    pub id: u8,
    pub name: &'static str,
    pub defaults: ModelParams,
    pub ranges: Vec<ParamRange>,
    /// Provenance of defaults that the regional tables leave unspecified.
    pub notes: Vec<&'static str>,
}

impl RegionPreset {
    pub fn ranges_for(&self, name: ParamName) -> impl Iterator<Item = &ParamRange> + '_ {
        self.ranges.iter().filter(move |r| r.name == name)
    }

    /// First admissible interval for `name`, if any.
    pub fn range(&self, name: ParamName) -> Option<ParamRange> {
        self.ranges_for(name).next().copied()
    }
}

fn r(name: ParamName, min: f64, max: f64) -> ParamRange {
    ParamRange { name, min, max }
}

/// Ranges shared by all regions, taken from the literature survey table.
fn literature_ranges() -> Vec<ParamRange> {
    use ParamName::*;
    vec![
        r(MuS, 0.0, 0.3),
        r(MuG, 0.0, 0.6),
        r(EtaG, 0.1, 1.0),
        r(EtaS, 0.02, 0.66),
        r(OmegaS, 0.05, 0.2),
    ]
}

/// Returns the preset for region `id` (1, 2 or 3).
pub fn region_preset(id: u8) -> Result<RegionPreset> {
    use ParamName::*;
    let preset = match id {
        1 => {
            let k_g = 2.5;
            let defaults = ModelParams {
                gamma_s: 0.3,
                gamma_ns: 1.0,
                gamma_g: 0.6,
                mu_s: 0.2,
                mu_ns: 0.15,
                mu_g: 0.3,
                omega_s: 0.1,
                sigma_g: 0.59135,
                sigma_ns: -0.02225,
                eta_s: 0.5,
                eta_g: 0.6,
                k_t: 30.0,
                k_g,
                tau: 7.0,
                fire: FireIntensity::new(k_g / 2.0, 2),
            };
            let mut ranges = vec![
                r(Tau, 5.0, 10.0),
                r(KT, 30.0, 30.0),
                r(KG, 0.0, 5.0),
                r(GammaG, 0.4, 2.0),
                r(GammaS, 0.2, 0.8),
                r(GammaNs, 0.256, 1.2),
                r(MuNs, 0.1, 0.25),
                r(SigmaG, 0.1843, 0.9984),
                r(SigmaNs, -0.029, -0.0155),
            ];
            ranges.extend(literature_ranges());
            RegionPreset {
                id,
                name: "semi-arid",
                defaults,
                ranges,
                notes: vec![
                    "eta_G = 0.6 and mu_G = 0.3 are not in the regional table; taken from the region 1 discussion",
                    "sigma_G and sigma_NS default to the midpoints of their estimated ranges",
                    "tau range upper bound 10 yr reflects at most one fire every ten years",
                    "g0 = K_G / 2 and alpha = 2 are not reported; configurable",
                ],
            }
        }
        2 => {
            let k_g = 7.0;
            let defaults = ModelParams {
                gamma_s: 0.4,
                gamma_ns: 2.0,
                gamma_g: 2.8,
                mu_s: 0.1,
                mu_ns: 0.08,
                mu_g: 0.3,
                omega_s: 0.1,
                sigma_g: 0.93785,
                sigma_ns: 0.02675,
                eta_s: 0.5,
                eta_g: 0.6,
                k_t: 85.0,
                k_g,
                tau: 4.0,
                fire: FireIntensity::new(k_g / 2.0, 2),
            };
            let mut ranges = vec![
                r(Tau, 2.0, 5.0),
                r(KT, 80.0, 90.0),
                r(KG, 5.0, 10.0),
                r(GammaG, 2.0, 3.5),
                r(GammaS, 0.2, 1.0),
                r(GammaNs, 1.2, 2.5),
                r(MuNs, 0.07, 0.1),
                r(SigmaG, 0.2470, 1.6287),
                r(SigmaNs, 0.0123, 0.0412),
                r(SigmaNs, -0.0412, -0.0123),
            ];
            ranges.extend(literature_ranges());
            RegionPreset {
                id,
                name: "mesic",
                defaults,
                ranges,
                notes: vec![
                    "mu_G = 0.3 follows the regional table; the reported R_G^0 = 14 corresponds to mu_G = 0.2",
                    "tau = 4 yr (one fire every four or five years) is not in the regional table",
                    "sigma_G defaults to the midpoint of its range; sigma_NS to the midpoint of the competition branch",
                    "g0 = K_G / 2 and alpha = 2 are not reported; configurable",
                ],
            }
        }
        3 => {
            let k_g = 15.0;
            let defaults = ModelParams {
                gamma_s: 2.0,
                gamma_ns: 3.0,
                gamma_g: 4.2,
                mu_s: 0.1,
                mu_ns: 0.06,
                mu_g: 0.2,
                omega_s: 0.1,
                sigma_g: 0.93785,
                sigma_ns: 0.0761,
                eta_s: 0.5,
                eta_g: 0.6,
                k_t: 115.0,
                k_g,
                tau: 1.0,
                fire: FireIntensity::new(k_g / 2.0, 2),
            };
            let mut ranges = vec![
                r(Tau, 0.5, 3.0),
                r(KT, 110.0, 120.0),
                r(KG, 10.0, 20.0),
                r(GammaG, 3.5, 4.6),
                r(GammaS, 1.5, 2.7),
                r(GammaNs, 2.5, 4.5),
                r(MuNs, 0.02, 0.07),
                r(SigmaG, 0.2470, 1.6287),
                r(SigmaNs, 0.0609, 0.0913),
            ];
            ranges.extend(literature_ranges());
            RegionPreset {
                id,
                name: "humid",
                defaults,
                ranges,
                notes: vec![
                    "no sigma_G estimate exists for region 3; the region 2 range is reused",
                    "tau = 1 yr (one or two fires per year) is not in the regional table",
                    "sigma_NS defaults to the midpoint of its estimated range",
                    "g0 = K_G / 2 and alpha = 2 are not reported; configurable",
                ],
            }
        }
        other => return Err(Error::UnknownRegion(other)),
    };
    Ok(preset)
}
