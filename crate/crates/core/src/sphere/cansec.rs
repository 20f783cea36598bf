//! The canonical section `sigma(s) = k_n(s) m(s) + n(s)` along a curve and
//! its Lorentz geometry: speed `|tau_g|`, geodesic curvature vector, and the
//! geodesic test for Darboux curves.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{chart_residual_at, probe, probe_step, CurveFlow, DarbouxState, FlowRegistry, Trajectory};
use crate::geometry::{FrameScalars, PrincipalSurface};
use crate::numeric::stencil5;

use super::{lift_normal, lift_point, LorentzVector};

const MAX_SAMPLES: usize = 400;
/// Samples with `|tau_g| < GAP |k1 - k2|` fall in a gap.
const GAP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CansecSample {
    pub s: f64,
    pub tau_g: f64,
    /// Lorentz speed `|sigma'|`.
    pub speed: f64,
    /// Component of `sigma_ss + sigma` (Lorentz arc length) along the lifted
    /// unit tangent.
    pub t_component: f64,
    /// `(k_n' + tau_g k_g) / tau_g^2` from the chart.
    pub predicted_t_component: f64,
    /// `L(sigma_ss + sigma)`.
    pub kg_form: f64,
    /// `max(|L(sigma, m')|, |L(sigma', m')|)`.
    pub contact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CansecReport {
    pub samples: Vec<CansecSample>,
    /// Arc-length intervals skipped because `tau_g` nearly vanishes.
    pub gaps: Vec<(f64, f64)>,
    pub speed_residual_max: f64,
    pub t_component_max: f64,
    pub kg_form_max: f64,
    pub contact_max: f64,
}

/// Section point with its arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub s: f64,
    pub sigma: LorentzVector,
}

fn section(surface: &dyn PrincipalSurface, u: f64, v: f64, alpha: f64, k: Option<f64>) -> Result<(LorentzVector, LorentzVector)> {
    let jet = surface.jet(u, v)?;
    let x = surface.position(u, v)?;
    let m = lift_point(&x);
    let n = lift_normal(&x, &surface.normal(u, v)?)?;
    let (s, c) = alpha.sin_cos();
    let kn = k.unwrap_or(jet.k1 * c * c + jet.k2 * s * s);
    Ok((kn * m + n, m))
}

/// Derivatives `(sigma, sigma', sigma'', m')` by arc-length probes.
fn jets(
    surface: &dyn PrincipalSurface,
    flow: &dyn CurveFlow,
    state: &DarbouxState,
    k: Option<f64>,
) -> Option<[LorentzVector; 4]> {
    let h = probe_step(surface, flow, state)?;
    let pts = probe(surface, flow, *state, h).ok()?;
    let mut sig = [[0.0; 5]; 5];
    let mut m = [[0.0; 5]; 5];
    for (i, p) in pts.iter().enumerate() {
        let (s, mm) = section(surface, p.u, p.v, p.alpha, k).ok()?;
        for c in 0..5 {
            sig[c][i] = s.0[c];
            m[c][i] = mm.0[c];
        }
    }
    let mut out = [LorentzVector::default(); 4];
    for c in 0..5 {
        let (d1, d2, _) = stencil5(sig[c], h);
        out[0].0[c] = sig[c][2];
        out[1].0[c] = d1;
        out[2].0[c] = d2;
        out[3].0[c] = stencil5(m[c], h).0;
    }
    Some(out)
}

fn analyze_at(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, s: f64, state: &DarbouxState) -> Option<CansecSample> {
    let jet = surface.jet(state.u, state.v).ok()?;
    let fs = FrameScalars::from_jet(&jet, state.alpha);
    if fs.tau_g.abs() < GAP * (jet.k1 - jet.k2).abs() {
        return None;
    }
    let [sigma, d1, d2, t] = jets(surface, flow, state, None)?;
    let speed = d1.space_norm();
    // reparametrize by Lorentz arc length
    let speed_s = d1.dot(&d2) / speed;
    let acc = (1.0 / (speed * speed)) * (d2 - (speed_s / speed) * d1);
    let kg = acc + sigma;
    let t_norm = t.space_norm();
    let residual = chart_residual_at(surface, flow, state)?;
    Some(CansecSample {
        s,
        tau_g: fs.tau_g,
        speed,
        t_component: kg.dot(&t) / t_norm,
        predicted_t_component: residual / (fs.tau_g * fs.tau_g),
        kg_form: kg.form(),
        contact: sigma.dot(&t).abs().max(d1.dot(&t).abs()),
    })
}

/// Lorentz analysis of the canonical section along a trajectory.
pub fn cansec_analyze(surface: &dyn PrincipalSurface, traj: &Trajectory) -> Result<CansecReport> {
    let reg = FlowRegistry::builtin();
    let flow = reg.get(&traj.flow)?;
    if traj.samples.len() < 2 {
        return Err(Error::SparseTrajectory(format!("{} samples", traj.samples.len())));
    }
    let stride = traj.samples.len().div_ceil(MAX_SAMPLES);
    let mut samples = Vec::new();
    let mut gaps: Vec<(f64, f64)> = Vec::new();
    let mut open_gap: Option<(f64, f64)> = None;
    for sample in traj.samples.iter().step_by(stride) {
        let state = DarbouxState::new(sample.state.u, sample.state.v, sample.alpha_lift);
        match analyze_at(surface, flow, sample.s, &state) {
            Some(r) => {
                gaps.extend(open_gap.take());
                samples.push(r);
            }
            None => {
                let g = open_gap.get_or_insert((sample.s, sample.s));
                g.1 = sample.s;
            }
        }
    }
    gaps.extend(open_gap);
    if samples.len() < 3 {
        return Err(Error::SparseTrajectory(format!("{} usable section samples", samples.len())));
    }
    let max = |f: fn(&CansecSample) -> f64| samples.iter().map(f).fold(0.0f64, f64::max);
    Ok(CansecReport {
        speed_residual_max: max(|c| (c.speed - c.tau_g.abs()).abs()),
        t_component_max: max(|c| c.t_component.abs()),
        kg_form_max: max(|c| c.kg_form.abs()),
        contact_max: max(|c| c.contact),
        samples,
        gaps,
    })
}

/// Lorentz speed of the section `k m + n` with constant `k` at a point of
/// the curve.
pub fn noncanonical_speed(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, state: &DarbouxState, k: f64) -> Option<f64> {
    jets(surface, flow, state, Some(k)).map(|j| j[1].space_norm())
}

/// The canonical section at every trajectory sample.
pub fn cansec_curve(surface: &dyn PrincipalSurface, traj: &Trajectory) -> Result<Vec<SectionPoint>> {
    traj.samples
        .iter()
        .map(|s| {
            section(surface, s.state.u, s.state.v, s.state.alpha, None).map(|(sigma, _)| SectionPoint { s: s.s, sigma })
        })
        .collect()
}

/// CSV of `s, x0..x4, L` for a section curve.
pub fn write_lorentz_csv(points: &[SectionPoint], path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "s,x0,x1,x2,x3,x4,lorentz")?;
    for p in points {
        let x = p.sigma.0;
        writeln!(w, "{},{},{},{},{},{},{}", p.s, x[0], x[1], x[2], x[3], x[4], p.sigma.form())?;
    }
    w.flush()?;
    Ok(())
}

