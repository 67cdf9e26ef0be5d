//! Two-parameter grid scans of thresholds, level curves at a given value
//! and classification maps.
//!
//! ```
//! use savanna::model::{region_preset, ParamName};
//! use savanna::sweep::{level_curve, scan, Axis, Quantity, ScanOptions};
//!
//! let base = region_preset(1).unwrap().defaults;
//! let gs = scan(
//!     &base,
//!     Axis::new(ParamName::SigmaG, 0.9, 1.0, 11),
//!     Axis::new(ParamName::Tau, 5.0, 10.0, 3),
//!     Quantity::parse("r_g_t").unwrap(),
//!     &ScanOptions::default(),
//! )
//! .unwrap();
//! let curve = level_curve(&gs, 1.0);
//! assert_eq!(curve.polylines.len(), 1);
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::floquet::{locate_savanna_orbit, rho_tg, OrbitKind, ShootingOptions, DEFAULT_STEPS};
use crate::format::csv_num;
use crate::model::{ModelParams, ParamName, VegState};
use crate::thresholds::{compute_thresholds, critical_values, ThresholdReport, Verdict};

/// Default grid resolution per axis.
pub const DEFAULT_RESOLUTION: usize = 101;
/// Default resolution for scans of the savanna spectral radius.
pub const DEFAULT_FLOQUET_RESOLUTION: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub name: ParamName,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(name: ParamName, min: f64, max: f64, n: usize) -> Self {
        Self { name, min, max, n }
    }

    /// Grid node `i`; the last node is exactly `max`.
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.name, self.min, self.max, self.n)
    }
}

impl FromStr for Axis {
    type Err = Error;
    /// Parses `name:min:max:n`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, n] = parts[..] else {
            return Err(Error::Domain(format!(
                "axis `{s}` is not of the form name:min:max:n"
            )));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("axis `{s}`: `{x}` is not a number")))
        };
        let n = n
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Domain(format!("axis `{s}`: `{n}` is not a count")))?;
        Ok(Axis::new(name.trim().parse()?, num(min)?, num(max)?, n))
    }
}

/// Scalar evaluated at every grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    RT0,
    RG0,
    RhoG0,
    GInt,
    GPeak,
    RGT,
    R,
    ACoef,
    BCoef,
    RhoT,
    RTG,
    RhoTG,
    TSBar,
    TNSBar,
    SigmaGStar,
    SigmaNsStar,
    TauStar,
    /// Spectral radius of the savanna orbit's monodromy matrix.
    RhoTg,
    /// Classification code, see [`Verdict::code`].
    Case,
}

impl Quantity {
    pub const ALL: [Quantity; 19] = [
        Quantity::RT0,
        Quantity::RG0,
        Quantity::RhoG0,
        Quantity::GInt,
        Quantity::GPeak,
        Quantity::RGT,
        Quantity::R,
        Quantity::ACoef,
        Quantity::BCoef,
        Quantity::RhoT,
        Quantity::RTG,
        Quantity::RhoTG,
        Quantity::TSBar,
        Quantity::TNSBar,
        Quantity::SigmaGStar,
        Quantity::SigmaNsStar,
        Quantity::TauStar,
        Quantity::RhoTg,
        Quantity::Case,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::RT0 => "r_t0",
            Quantity::RG0 => "r_g0",
            Quantity::RhoG0 => "rho_g0",
            Quantity::GInt => "g_int",
            Quantity::GPeak => "g_peak",
            Quantity::RGT => "r_g_t",
            Quantity::R => "r",
            Quantity::ACoef => "a_coef",
            Quantity::BCoef => "b_coef",
            Quantity::RhoT => "rho_t",
            Quantity::RTG => "r_t_g",
            Quantity::RhoTG => "rho_t_g",
            Quantity::TSBar => "t_s_bar",
            Quantity::TNSBar => "t_ns_bar",
            Quantity::SigmaGStar => "sigma_g_star",
            Quantity::SigmaNsStar => "sigma_ns_star",
            Quantity::TauStar => "tau_star",
            Quantity::RhoTg => "rho_tg",
            Quantity::Case => "case",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Quantity::ALL.iter().map(|q| q.as_str()).collect();
                Error::Domain(format!(
                    "unknown quantity `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }

    /// Reads the quantity off a threshold report. `None` for [`Quantity::RhoTg`].
    pub fn from_report(self, rep: &ThresholdReport) -> Option<f64> {
        match self {
            Quantity::RT0 => Some(rep.r_t0),
            Quantity::RG0 => rep.r_g0,
            Quantity::RhoG0 => Some(rep.rho_g0),
            Quantity::GInt => rep.g_int,
            Quantity::GPeak => rep.g_peak,
            Quantity::RGT => rep.r_g_t,
            Quantity::R => rep.r,
            Quantity::ACoef => rep.a_coef,
            Quantity::BCoef => rep.b_coef,
            Quantity::RhoT => rep.rho_t,
            Quantity::RTG => rep.r_t_g,
            Quantity::RhoTG => rep.rho_t_g,
            Quantity::TSBar => rep.forest_eq.map(|e| e.t_s),
            Quantity::TNSBar => rep.forest_eq.map(|e| e.t_ns),
            Quantity::SigmaGStar => critical_values(rep).sigma_g_star,
            Quantity::SigmaNsStar => critical_values(rep).sigma_ns_star,
            Quantity::TauStar => critical_values(rep).tau_star,
            Quantity::RhoTg => None,
            Quantity::Case => Some(f64::from(rep.classification.verdict.code())),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Evaluate cells on the rayon thread pool.
    pub parallel: bool,
    pub floquet_steps: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            parallel: true,
            floquet_steps: DEFAULT_STEPS,
        }
    }
}

/// Values of one quantity on an `n1 × n2` grid, stored row-major with
/// the first axis as row index. `None` marks undefined cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub axis1: Axis,
    pub axis2: Axis,
    pub base: ModelParams,
    pub quantity: Quantity,
    pub values: Vec<Option<f64>>,
}

impl GridScan {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.axis2.n + j]
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Long-format CSV `axis1,axis2,value,defined`; undefined cells have an
    /// empty value and `defined = false`.
    pub fn write_csv(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "axis1,axis2,value,defined")?;
        for i in 0..self.axis1.n {
            for j in 0..self.axis2.n {
                let (x, y) = (csv_num(self.axis1.value(i)), csv_num(self.axis2.value(j)));
                match self.get(i, j) {
                    Some(v) => writeln!(out, "{x},{y},{},true", csv_num(v))?,
                    None => writeln!(out, "{x},{y},,false")?,
                }
            }
        }
        Ok(())
    }
}

/// Text of a warning for scans expected to be slow, if any.
pub fn runtime_warning(quantity: Quantity, axis1: &Axis, axis2: &Axis) -> Option<String> {
    let cells = axis1.n * axis2.n;
    (quantity == Quantity::RhoTg && cells > DEFAULT_FLOQUET_RESOLUTION * DEFAULT_FLOQUET_RESOLUTION).then(|| {
        format!("rho_tg scan of {cells} cells locates a periodic orbit per cell and may take minutes")
    })
}

fn cell_params(
    base: &ModelParams,
    a1: &Axis,
    a2: &Axis,
    i: usize,
    j: usize,
) -> Result<ModelParams> {
    base.with(a1.name, a1.value(i))?.with(a2.name, a2.value(j))
}

fn savanna_radius(p: &ModelParams, steps: usize) -> Option<f64> {
    let rep = compute_thresholds(p).ok()?;
    let e = rep.forest_eq?;
    let g = rep.g_peak.unwrap_or(p.k_g);
    let guess = VegState::new(0.5 * e.t_s, 0.5 * e.t_ns, 0.5 * g);
    let opts = ShootingOptions {
        steps_per_period: steps,
        ..ShootingOptions::default()
    };
    let loc = locate_savanna_orbit(p, guess, &opts).ok()?;
    if loc.kind != OrbitKind::Interior {
        return None;
    }
    rho_tg(p, &loc.anchor, steps).ok().map(|r| r.rho_tg)
}

fn eval_cell(p: &ModelParams, q: Quantity, steps: usize) -> Option<f64> {
    match q {
        Quantity::RhoTg => savanna_radius(p, steps),
        _ => compute_thresholds(p)
            .ok()
            .and_then(|rep| q.from_report(&rep)),
    }
}

fn check_axis(base: &ModelParams, a: &Axis) -> Result<()> {
    if a.n < 2 {
        return Err(Error::Domain(format!(
            "axis {} needs at least 2 nodes",
            a.name
        )));
    }
    if !(a.min.is_finite() && a.max.is_finite()) {
        return Err(Error::Domain(format!(
            "axis {} has non-finite bounds",
            a.name
        )));
    }
    for v in [a.min, a.max] {
        let p = base.with(a.name, v)?;
        crate::model::validate(&p, None).into_result()?;
    }
    Ok(())
}

/// Evaluates `quantity` at every node of the `axis1 × axis2` grid.
///
/// Parallel and sequential evaluation give identical results.
pub fn scan(
    base: &ModelParams,
    axis1: Axis,
    axis2: Axis,
    quantity: Quantity,
    opts: &ScanOptions,
) -> Result<GridScan> {
    check_axis(base, &axis1)?;
    check_axis(base, &axis2)?;
    let cell = |k: usize| {
        let (i, j) = (k / axis2.n, k % axis2.n);
        cell_params(base, &axis1, &axis2, i, j)
            .ok()
            .and_then(|p| eval_cell(&p, quantity, opts.floquet_steps))
    };
    let n = axis1.n * axis2.n;
    let values: Vec<Option<f64>> = if opts.parallel {
        (0..n).into_par_iter().map(cell).collect()
    } else {
        (0..n).map(cell).collect()
    };
    if values.iter().all(Option::is_none) {
        return Err(Error::Undefined {
            quantity: "grid scan",
            reason: format!("{quantity} is undefined on every cell"),
        });
    }
    Ok(GridScan {
        axis1,
        axis2,
        base: *base,
        quantity,
        values,
    })
}

/// Grid of classification verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseGrid {
    pub axis1: Axis,
    pub axis2: Axis,
    pub verdicts: Vec<Option<Verdict>>,
}

impl CaseGrid {
    pub fn get(&self, i: usize, j: usize) -> Option<Verdict> {
        self.verdicts[i * self.axis2.n + j]
    }
}

pub fn classify_grid(
    base: &ModelParams,
    axis1: Axis,
    axis2: Axis,
    opts: &ScanOptions,
) -> Result<CaseGrid> {
    check_axis(base, &axis1)?;
    check_axis(base, &axis2)?;
    let cell = |k: usize| {
        let (i, j) = (k / axis2.n, k % axis2.n);
        let p = cell_params(base, &axis1, &axis2, i, j).ok()?;
        compute_thresholds(&p)
            .ok()
            .map(|r| r.classification.verdict)
    };
    let n = axis1.n * axis2.n;
    let verdicts = if opts.parallel {
        (0..n).into_par_iter().map(cell).collect()
    } else {
        (0..n).map(cell).collect()
    };
    Ok(CaseGrid {
        axis1,
        axis2,
        verdicts,
    })
}

/// Polylines where a scanned quantity equals `level`, in
/// `(axis1, axis2)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurve {
    pub level: f64,
    pub polylines: Vec<Vec<(f64, f64)>>,
}

impl LevelCurve {
    pub fn write_csv(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "curve_id,axis1,axis2")?;
        for (id, line) in self.polylines.iter().enumerate() {
            for (x, y) in line {
                writeln!(out, "{id},{},{}", csv_num(*x), csv_num(*y))?;
            }
        }
        Ok(())
    }
}

/// Grid edge: `(0, i, j)` joins nodes `(i, j)` and `(i + 1, j)`,
/// `(1, i, j)` joins `(i, j)` and `(i, j + 1)`.
type Edge = (u8, usize, usize);

/// Linear-interpolation parameter `t` in `[0, 1]` along the edge from value
/// `a` to value `b` where the interpolant equals `level`.
fn crossing(a: f64, b: f64, level: f64) -> f64 {
    ((level - a) / (b - a)).clamp(0.0, 1.0)
}

/// Marching-squares extraction of the `level` contour. Cells with an
/// undefined corner are skipped; ambiguous saddle cells are resolved by
/// the mean of the four corners.
pub fn level_curve(gs: &GridScan, level: f64) -> LevelCurve {
    let (n1, n2) = (gs.axis1.n, gs.axis2.n);
    let above = |v: f64| v > level;
    let mut points: BTreeMap<Edge, (f64, f64)> = BTreeMap::new();
    let mut segments: Vec<(Edge, Edge)> = Vec::new();

    let mut point = |e: Edge, va: f64, vb: f64| {
        points.entry(e).or_insert_with(|| {
            let (dir, i, j) = e;
            let t = crossing(va, vb, level);
            if dir == 0 {
                let (x0, x1) = (gs.axis1.value(i), gs.axis1.value(i + 1));
                (x0 + t * (x1 - x0), gs.axis2.value(j))
            } else {
                let (y0, y1) = (gs.axis2.value(j), gs.axis2.value(j + 1));
                (gs.axis1.value(i), y0 + t * (y1 - y0))
            }
        });
        e
    };

    for i in 0..n1.saturating_sub(1) {
        for j in 0..n2.saturating_sub(1) {
            let corners = [
                gs.get(i, j),
                gs.get(i + 1, j),
                gs.get(i + 1, j + 1),
                gs.get(i, j + 1),
            ];
            let [Some(v0), Some(v1), Some(v2), Some(v3)] = corners else {
                continue;
            };
            // edges in counter-clockwise order: bottom, right, top, left
            let edges: [(Edge, f64, f64); 4] = [
                ((0, i, j), v0, v1),
                ((1, i + 1, j), v1, v2),
                ((0, i, j + 1), v3, v2),
                ((1, i, j), v0, v3),
            ];
            let cut: Vec<usize> = (0..4)
                .filter(|&k| above(edges[k].1) != above(edges[k].2))
                .collect();
            let mut link = |a: usize, b: usize| {
                let ea = point(edges[a].0, edges[a].1, edges[a].2);
                let eb = point(edges[b].0, edges[b].1, edges[b].2);
                segments.push((ea, eb));
            };
            match cut.len() {
                2 => link(cut[0], cut[1]),
                4 => {
                    let centre_above = above(0.25 * (v0 + v1 + v2 + v3));
                    // corner 0 sits between the bottom and left edges
                    if above(v0) == centre_above {
                        link(0, 1);
                        link(2, 3);
                    } else {
                        link(0, 3);
                        link(1, 2);
                    }
                }
                _ => {}
            }
        }
    }

    LevelCurve {
        level,
        polylines: join_segments(&segments, &points),
    }
}

/// Chains segments sharing an edge into polylines: open chains first,
/// starting from their smallest end edge, then closed loops.
fn join_segments(
    segments: &[(Edge, Edge)],
    points: &BTreeMap<Edge, (f64, f64)>,
) -> Vec<Vec<(f64, f64)>> {
    let mut adjacent: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        adjacent.entry(*a).or_default().push(k);
        adjacent.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start: Edge, used: &mut Vec<bool>| {
        let mut line = vec![points[&start]];
        let mut at = start;
        while let Some(&k) = adjacent[&at].iter().find(|&&k| !used[k]) {
            used[k] = true;
            let (a, b) = segments[k];
            at = if a == at { b } else { a };
            line.push(points[&at]);
        }
        line
    };

    let ends: Vec<Edge> = adjacent
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    for e in ends {
        if adjacent[&e].iter().any(|&k| !used[k]) {
            lines.push(walk(e, &mut used));
        }
    }
    let starts: Vec<Edge> = adjacent.keys().copied().collect();
    for e in starts {
        if adjacent[&e].iter().any(|&k| !used[k]) {
            lines.push(walk(e, &mut used));
        }
    }
    lines
}
