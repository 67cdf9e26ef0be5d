use std::fmt;

use super::ThresholdReport;

/// Distance from 1 below which a deciding threshold is treated as sitting
/// on the bifurcation boundary.
pub const DEGENERATE_TOL: f64 = 1e-9;

/// Qualitative outcome for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// One of the eleven cases of the summary table (1..=11), used when
    /// both fire-free reproduction numbers exceed 1.
    Case(u8),
    DesertGas,
    ForestGas,
    GrasslandGas,
    /// A deciding threshold lies within [`DEGENERATE_TOL`] of 1.
    Degenerate(&'static str),
}

impl Verdict {
    /// Integer code used in grid scans: the case number, 12 to 14 for the
    /// global verdicts (desert, forest, grassland) and 0 for degenerate.
    pub fn code(self) -> u8 {
        match self {
            Verdict::Case(n) => n,
            Verdict::DesertGas => 12,
            Verdict::ForestGas => 13,
            Verdict::GrasslandGas => 14,
            Verdict::Degenerate(_) => 0,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Case(n) => write!(f, "case {n}"),
            Verdict::DesertGas => f.write_str("desert GAS"),
            Verdict::ForestGas => f.write_str("forest GAS"),
            Verdict::GrasslandGas => f.write_str("grassland GAS"),
            Verdict::Degenerate(name) => write!(f, "degenerate ({name} = 1)"),
        }
    }
}

/// Local stability of a boundary solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
    /// The solution does not exist for these parameters.
    Absent,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "LAS",
            Stability::Unstable => "unstable",
            Stability::Absent => "absent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Classification {
    pub verdict: Verdict,
    /// Grassland periodic solution `E_G`.
    pub grassland: Stability,
    /// Forest equilibrium `E_T`.
    pub forest: Stability,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (E_G {}, E_T {})",
            self.verdict, self.grassland, self.forest
        )
    }
}

/// `Err` with the threshold name when `x` is degenerate, otherwise
/// whether `x > 1`.
fn above(name: &'static str, x: f64) -> Result<bool, Verdict> {
    if (x - 1.0).abs() < DEGENERATE_TOL {
        Err(Verdict::Degenerate(name))
    } else {
        Ok(x > 1.0)
    }
}

fn grassland_stability(rep: &ThresholdReport) -> Stability {
    match (rep.grassland_exists, rep.r_g_t, rep.rho_t) {
        (false, _, _) => Stability::Absent,
        (true, Some(rgt), _) if rgt < 1.0 => Stability::Stable,
        (true, Some(_), Some(rho)) if rho < 1.0 => Stability::Stable,
        _ => Stability::Unstable,
    }
}

fn forest_stability(rep: &ThresholdReport) -> Stability {
    match (rep.forest_exists, rep.r_t_g, rep.rho_t_g) {
        (false, _, _) => Stability::Absent,
        (true, Some(rtg), _) if rtg <= 1.0 => Stability::Stable,
        (true, _, Some(rho)) if rho < 1.0 => Stability::Stable,
        _ => Stability::Unstable,
    }
}

/// Picks case `base`, `base + 1` or `base + 2` from `R_G^T` and `ρ_T`.
fn grass_block(rep: &ThresholdReport, base: u8) -> Result<u8, Verdict> {
    let rgt = rep.r_g_t.ok_or(Verdict::Degenerate("R_G^T"))?;
    if above("R_G^T", rgt)? {
        let rho = rep.rho_t.ok_or(Verdict::Degenerate("rho_T"))?;
        Ok(if above("rho_T", rho)? { base } else { base + 1 })
    } else {
        Ok(base + 2)
    }
}

fn verdict(rep: &ThresholdReport) -> Result<Verdict, Verdict> {
    let trees = above("R_T^0", rep.r_t0)?;
    // without natural grass mortality R_G^0 is infinite
    let grass = match rep.r_g0 {
        Some(r) => above("R_G^0", r)?,
        None => true,
    };
    if !grass {
        return Ok(if trees {
            Verdict::ForestGas
        } else {
            Verdict::DesertGas
        });
    }
    let grass_alive = above("rho_G^0", rep.rho_g0)?;
    match (trees, grass_alive) {
        (false, false) => Ok(Verdict::DesertGas),
        (false, true) => Ok(Verdict::GrasslandGas),
        (true, false) if rep.r_g0.is_none() => Ok(Verdict::ForestGas),
        (true, _) => table(rep, grass_alive),
    }
}

fn table(rep: &ThresholdReport, grass_alive: bool) -> Result<Verdict, Verdict> {
    let rtg = rep.r_t_g.ok_or(Verdict::Degenerate("R_T^G"))?;
    let invades = above("R_T^G", rtg)?;
    let case = match (invades, grass_alive) {
        (true, true) => {
            let rho = rep.rho_t_g.ok_or(Verdict::Degenerate("rho_T^G"))?;
            if above("rho_T^G", rho)? {
                grass_block(rep, 1)?
            } else {
                grass_block(rep, 4)?
            }
        }
        (true, false) => 7,
        (false, true) => grass_block(rep, 8)?,
        (false, false) => 11,
    };
    Ok(Verdict::Case(case))
}

/// Classifies a threshold report by the summary table when both fire-free
/// reproduction numbers exceed 1, and by the global-stability results
/// otherwise. Local verdicts for `E_G` and `E_T` are always attached.
pub fn classify(rep: &ThresholdReport) -> Classification {
    Classification {
        verdict: verdict(rep).unwrap_or_else(|d| d),
        grassland: grassland_stability(rep),
        forest: forest_stability(rep),
    }
}
