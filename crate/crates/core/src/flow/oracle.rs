//! Darboux-condition oracles evaluated on local arc-length probes around
//! trajectory samples.
//!
//! Each probe re-integrates the trajectory's own flow, reparametrized by
//! signed arc length, to offsets `-2h .. 2h` with fixed-step RK4, and
//! differentiates along it with five-point stencils. The chart oracle uses
//! the frame scalars; the ambient oracle only positions and normals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{FrameScalars, PrincipalSurface, Vec3};
use crate::numeric::stencil5;

use super::fields::{signed_speed, CurveFlow, FlowRegistry};
use super::ode::rk4;
use super::{DarbouxState, Trajectory};

const PROBE_STEP: f64 = 1e-2;
const MIN_PROBE_STEP: f64 = 2e-3;
const SUBSTEPS: usize = 8;
const MAX_PROBES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbePoint {
    pub u: f64,
    pub v: f64,
    pub alpha: f64,
}

/// Arc-length field of `flow`: `d(u, v, alpha)/ds` along the heading.
fn arclength_field(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, y: &[f64; 3]) -> Result<[f64; 3]> {
    let jet = surface.jet(y[0], y[1])?;
    jet.require_non_umbilic(y[0], y[1])?;
    let r = flow.rates(&jet, y[2])?;
    let w = signed_speed(&jet, y[2], &r);
    if w.abs() < 1e-14 {
        return Err(Error::PrincipalSingularity(w.abs()));
    }
    Ok([r[0] / w, r[1] / w, r[2] / w])
}

/// Points at signed arc length `-2h, -h, 0, h, 2h` from `state` along the
/// heading `alpha`.
pub fn probe(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, state: DarbouxState, h: f64) -> Result<[ProbePoint; 5]> {
    let f = |y: &[f64; 3]| arclength_field(surface, flow, y);
    let y0 = [state.u, state.v, state.alpha];
    let mut out = [ProbePoint { u: state.u, v: state.v, alpha: state.alpha }; 5];
    for (sign, slots) in [(1.0, [3usize, 4]), (-1.0, [1, 0])] {
        let mut y = y0;
        let dh = sign * h / SUBSTEPS as f64;
        for slot in slots {
            for _ in 0..SUBSTEPS {
                y = rk4(&f, &y, dh)?;
            }
            out[slot] = ProbePoint { u: y[0], v: y[1], alpha: y[2] };
        }
    }
    Ok(out)
}

fn speed(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, y: &[f64; 3]) -> Option<f64> {
    let jet = surface.jet(y[0], y[1]).ok()?;
    let r = flow.rates(&jet, y[2]).ok()?;
    Some(signed_speed(&jet, y[2], &r).abs())
}

/// Probe step adapted to the local turning rate and to the distance from
/// the nearest cusp (a zero of the flow's speed).
pub(crate) fn probe_step(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, state: &DarbouxState) -> Option<f64> {
    let y = [state.u, state.v, state.alpha];
    let d = arclength_field(surface, flow, &y).ok()?;
    let delta = 1e-6;
    let w0 = speed(surface, flow, &y)?;
    let w1 = speed(surface, flow, &[y[0] + delta * d[0], y[1] + delta * d[1], y[2] + delta * d[2]])?;
    let w_s = ((w1 - w0) / delta).abs();
    let h = PROBE_STEP.min(0.1 / d[2].abs().max(1e-300)).min(0.005 * w0 / w_s.max(1e-300));
    (h >= MIN_PROBE_STEP).then_some(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max: f64,
    pub rms: f64,
    /// Arc length of the worst sample.
    pub worst_s: f64,
    pub used: usize,
    pub skipped: usize,
}

fn collect(
    traj: &Trajectory,
    mut eval: impl FnMut(&DarbouxState) -> Option<f64>,
) -> Result<ResidualReport> {
    if traj.samples.len() < 2 {
        return Err(Error::SparseTrajectory(format!("{} samples", traj.samples.len())));
    }
    let stride = traj.samples.len().div_ceil(MAX_PROBES);
    let (mut max, mut sum, mut worst_s, mut used, mut skipped) = (0.0f64, 0.0, 0.0, 0usize, 0usize);
    for sample in traj.samples.iter().step_by(stride) {
        let state = DarbouxState::new(sample.state.u, sample.state.v, sample.alpha_lift);
        match eval(&state) {
            Some(r) => {
                used += 1;
                sum += r * r;
                if r.abs() > max {
                    max = r.abs();
                    worst_s = sample.s;
                }
            }
            None => skipped += 1,
        }
    }
    if used < 3 {
        return Err(Error::SparseTrajectory(format!("{used} usable probes, {skipped} skipped")));
    }
    Ok(ResidualReport { max, rms: (sum / used as f64).sqrt(), worst_s, used, skipped })
}

fn flow_of(traj: &Trajectory) -> Result<&'static dyn CurveFlow> {
    use std::sync::OnceLock;
    static FLOWS: OnceLock<FlowRegistry> = OnceLock::new();
    FLOWS.get_or_init(FlowRegistry::builtin).get(&traj.flow)
}

/// Chart residual `k_n' + tau_g k_g` at a point of a probed curve.
pub fn chart_residual_at(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, state: &DarbouxState) -> Option<f64> {
    let h = probe_step(surface, flow, state)?;
    let pts = probe(surface, flow, *state, h).ok()?;
    let mut kn = [0.0; 5];
    let mut alpha = [0.0; 5];
    for (i, p) in pts.iter().enumerate() {
        let jet = surface.jet(p.u, p.v).ok()?;
        let (s, c) = p.alpha.sin_cos();
        kn[i] = jet.k1 * c * c + jet.k2 * s * s;
        alpha[i] = p.alpha;
    }
    let jet = surface.jet(state.u, state.v).ok()?;
    let fs = FrameScalars::from_jet(&jet, state.alpha);
    let (s, c) = state.alpha.sin_cos();
    let k_g = stencil5(alpha, h).0 + fs.kg1 * c + fs.kg2 * s;
    Some(stencil5(kn, h).0 + fs.tau_g * k_g)
}

/// Ambient residual `<c',c'>[2<N',c''> + <N'',c'>] - 3<c',N'><c',c''>`.
pub fn ambient_residual_at(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, state: &DarbouxState) -> Option<f64> {
    let h = probe_step(surface, flow, state)?;
    let pts = probe(surface, flow, *state, h).ok()?;
    let mut x = [[0.0; 5]; 3];
    let mut n = [[0.0; 5]; 3];
    for (i, p) in pts.iter().enumerate() {
        let xp = surface.position(p.u, p.v).ok()?;
        let np = surface.normal(p.u, p.v).ok()?;
        for k in 0..3 {
            x[k][i] = xp[k];
            n[k][i] = np[k];
        }
    }
    let d = |a: [f64; 5]| stencil5(a, h);
    let (mut c1, mut c2, mut n1, mut n2) = (Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
    for k in 0..3 {
        let (a1, a2, _) = d(x[k]);
        let (b1, b2, _) = d(n[k]);
        c1[k] = a1;
        c2[k] = a2;
        n1[k] = b1;
        n2[k] = b2;
    }
    Some(c1.dot(&c1) * (2.0 * n1.dot(&c2) + n2.dot(&c1)) - 3.0 * c1.dot(&n1) * c1.dot(&c2))
}

/// Largest `|k_n' + tau_g k_g|` over the trajectory samples.
pub fn darboux_residual(surface: &dyn PrincipalSurface, traj: &Trajectory) -> Result<ResidualReport> {
    let flow = flow_of(traj)?;
    darboux_residual_with(surface, flow, traj)
}

pub fn darboux_residual_with(surface: &dyn PrincipalSurface, flow: &dyn CurveFlow, traj: &Trajectory) -> Result<ResidualReport> {
    collect(traj, |s| chart_residual_at(surface, flow, s))
}

/// Largest third-order sphere-contact residual over the trajectory samples.
pub fn osculating_contact_residual(surface: &dyn PrincipalSurface, traj: &Trajectory) -> Result<ResidualReport> {
    let flow = flow_of(traj)?;
    osculating_contact_residual_with(surface, flow, traj)
}

pub fn osculating_contact_residual_with(
    surface: &dyn PrincipalSurface,
    flow: &dyn CurveFlow,
    traj: &Trajectory,
) -> Result<ResidualReport> {
    collect(traj, |s| ambient_residual_at(surface, flow, s))
}
