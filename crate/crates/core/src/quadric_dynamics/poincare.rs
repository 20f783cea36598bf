//! Return maps of Darboux curves at a fixed level, and of leaves of
//! constant angle, to a curvature line of a quadric in the angular chart.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{Quadric, QuadricAxis, QuadricChart, QuadricKind};
use crate::error::{Error, Result};
use crate::flow::{integrate_flow, ConstantAngle, Crossing, CurveFlow, Darboux, DarbouxState, Event, IntegratorParams, Termination};

use super::{implicit_directions, rectified, regime_classify, RegimeLabel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "flow")]
pub enum PoincareFlow {
    /// Leaves making the constant angle `alpha` with P1.
    FAlpha { alpha: f64 },
    /// Darboux curves at `I = 1/lambda`; `mirror` starts with `v' -> -v'`.
    Darboux { lambda: f64, mirror: bool },
}

/// The chart line `axis = value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub axis: QuadricAxis,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionCrossing {
    pub iterate: usize,
    /// Lifted chart coordinate along the section.
    pub coordinate: f64,
    /// Arc length at the crossing.
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub flow: PoincareFlow,
    pub section: Section,
    pub start: DarbouxState,
    pub crossings: Vec<SectionCrossing>,
    /// Mean advance per return in the rectifying coordinate along the
    /// section, over its period, signed by the crossing direction.
    pub rotation_number: f64,
    /// The same from the raw chart coordinate.
    pub raw_rotation_number: f64,
    /// Distance (chart, modulo the period) of each return from the start.
    pub return_distances: Vec<f64>,
    /// First iterate returning within the periodicity tolerance.
    pub periodic_after: Option<usize>,
}

fn other(axis: QuadricAxis) -> QuadricAxis {
    match axis {
        QuadricAxis::U => QuadricAxis::V,
        QuadricAxis::V => QuadricAxis::U,
    }
}

fn coordinate(axis: QuadricAxis, u: f64, v: f64) -> f64 {
    match axis {
        QuadricAxis::U => u,
        QuadricAxis::V => v,
    }
}

/// Sections used for reproducible return maps: the `v` midline of the band
/// for `v`-bands, the `u` midline for `u`-bands, the line `u = (a + b)/2`
/// for leaves of constant angle.
pub fn default_section(quadric: &Quadric, flow: &PoincareFlow) -> Result<Section> {
    match *flow {
        PoincareFlow::FAlpha { .. } => {
            let (lo, hi) = quadric.u_band();
            Ok(Section { axis: QuadricAxis::U, value: quadric.axis_inverse(QuadricAxis::U, 0.5 * (lo + hi)) })
        }
        PoincareFlow::Darboux { lambda, .. } => {
            let regime = regime_classify(quadric, lambda)?;
            let (axis, range) = match regime.label {
                RegimeLabel::VBand => (QuadricAxis::V, regime.v_range),
                RegimeLabel::UBand => (QuadricAxis::U, regime.u_range),
                _ => {
                    return Err(Error::InvalidParameters(format!("no return section for {} ({})", regime.label, regime.case)))
                }
            };
            let (lo, hi) = range.expect("banded regimes have ranges");
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidParameters(format!("band ({lo}, {hi}) is unbounded")));
            }
            Ok(Section { axis, value: quadric.axis_inverse(axis, 0.5 * (lo + hi)) })
        }
    }
}

/// Integrates from `(section, start_along)` and records `n_iterates`
/// returns to the section in the direction of the first crossing.
pub fn poincare_map(
    quadric: &Quadric,
    flow: &PoincareFlow,
    section: &Section,
    start_along: f64,
    n_iterates: usize,
    params: &IntegratorParams,
) -> Result<PoincareReport> {
    if quadric.chart() != QuadricChart::Angular {
        return Err(Error::InvalidParameters("return maps need the angular chart".into()));
    }
    let along = other(section.axis);
    let period = quadric
        .axis_period(along)
        .ok_or_else(|| Error::InvalidParameters("the section does not close up".into()))?;
    let (u0, v0) = match section.axis {
        QuadricAxis::U => (section.value, start_along),
        QuadricAxis::V => (start_along, section.value),
    };
    let (alpha, curve_flow, lambda, circulates): (f64, &dyn CurveFlow, Option<f64>, bool) = match *flow {
        PoincareFlow::FAlpha { alpha } => {
            if quadric.kind() != QuadricKind::Ellipsoid {
                return Err(Error::InvalidParameters("leaves of constant angle: ellipsoid only".into()));
            }
            (alpha, &ConstantAngle, None, true)
        }
        PoincareFlow::Darboux { lambda, mirror } => {
            let dirs = implicit_directions(quadric, u0, v0, lambda)?;
            if !dirs.is_real() {
                return Err(Error::NeighborhoodExit(format!("start ({u0}, {v0}) is outside the band of lambda = {lambda}")));
            }
            let a = dirs.alphas[0];
            (if mirror { -a } else { a }, &Darboux, Some(lambda), false)
        }
    };
    let start = DarbouxState::new(u0, v0, alpha);
    let cross_sign = match section.axis {
        QuadricAxis::U => alpha.cos().signum(),
        QuadricAxis::V => alpha.sin().signum(),
    };
    let axis = section.axis;
    let value = section.value;
    // zeros exactly on the copies value + 4 pi k of the section line
    let event = Event::new("section", move |u, v, _| ((coordinate(axis, u, v) - value) / 4.0).sin())
        .with_crossing(Crossing::Any)
        .stop_after(if circulates { n_iterates } else { 2 * n_iterates + 1 });
    let traj = integrate_flow(quadric, curve_flow, start, params, &[], std::slice::from_ref(&event))?;

    let mut crossings = Vec::new();
    for hit in &traj.events {
        let t = coordinate(axis, hit.state.u, hit.state.v);
        let k = ((t - value) / (4.0 * PI)).round() as i64;
        let increasing = hit.rising ^ (k % 2 != 0);
        if increasing != (cross_sign > 0.0) {
            continue;
        }
        crossings.push(SectionCrossing {
            iterate: crossings.len() + 1,
            coordinate: coordinate(along, hit.state.u, hit.state.v),
            s: hit.s,
        });
        if crossings.len() == n_iterates {
            break;
        }
    }
    if crossings.len() < n_iterates {
        let err = match traj.termination {
            Termination::StepBudget | Termination::ArcLength => Error::Budget(format!(
                "{} of {n_iterates} returns within the budget ({})",
                crossings.len(),
                traj.termination
            )),
            _ => Error::NeighborhoodExit(format!("{} of {n_iterates} returns, then {}", crossings.len(), traj.termination)),
        };
        return Err(err);
    }

    let t0 = start_along;
    let last = crossings.last().expect("n_iterates > 0").coordinate;
    let n = n_iterates as f64;
    let circuit = rectified(quadric, along, lambda, 0.0, period)?;
    let advance = rectified(quadric, along, lambda, t0, last)?;
    let rotation_number = cross_sign * advance / (n * circuit);
    let raw_rotation_number = cross_sign * (last - t0) / (n * period);
    let return_distances: Vec<f64> = crossings
        .iter()
        .map(|c| {
            let d = (c.coordinate - t0).rem_euclid(period);
            d.min(period - d)
        })
        .collect();
    let periodic_after = return_distances.iter().position(|d| *d < 1e-6).map(|i| i + 1);
    Ok(PoincareReport {
        flow: *flow,
        section: *section,
        start,
        crossings,
        rotation_number,
        raw_rotation_number,
        return_distances,
        periodic_after,
    })
}

/// CSV `iterate,coordinate,s` of the returns.
pub fn write_crossings_csv(report: &PoincareReport, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "iterate,coordinate,s")?;
    for c in &report.crossings {
        writeln!(w, "{},{},{}", c.iterate, c.coordinate, c.s)?;
    }
    w.flush()?;
    Ok(())
}
