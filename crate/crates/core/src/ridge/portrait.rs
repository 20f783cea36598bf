//! Darboux orbits near a ridge: the linearized field and a fan of
//! trajectories whose cusps and ridge crossings tell zigzag from
//! beak-to-beak.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{darboux_field_desingularized, integrate_flow, Crossing, Darboux, DarbouxState, Event, IntegratorParams, Termination, Trajectory};
use crate::geometry::{Foliation, PrincipalSurface};

use super::{ridge_function, Eigenvalue, RidgeKind, RidgeRecord};

/// Jacobian at the ridge equilibrium of the Darboux field scaled to
/// `sin(a) cos(a)` times arc length, and the eigenvalues of its block in
/// (normal coordinate, angle).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub jacobian: [[f64; 3]; 3],
    pub eigenvalues: [Eigenvalue; 2],
}

fn principal_angle(f: Foliation) -> f64 {
    match f {
        Foliation::P1 => 0.0,
        Foliation::P2 => FRAC_PI_2,
    }
}

/// Index of the chart coordinate transverse to the ridge.
fn normal_index(f: Foliation) -> usize {
    match f {
        Foliation::P1 => 0,
        Foliation::P2 => 1,
    }
}

pub fn linearization(surface: &dyn PrincipalSurface, record: &RidgeRecord) -> Result<Linearization> {
    let jet = surface.jet(record.u, record.v)?;
    let scale = 1.0 / (3.0 * (jet.k1 - jet.k2));
    let x0 = [record.u, record.v, principal_angle(record.foliation)];
    let field = |x: [f64; 3]| -> Result<[f64; 3]> {
        darboux_field_desingularized(surface, &DarbouxState::new(x[0], x[1], x[2])).map(|f| f.map(|c| c * scale))
    };
    let h = 1e-5;
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let (mut xp, mut xm) = (x0, x0);
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (field(xp)?, field(xm)?);
        for i in 0..3 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    let n = normal_index(record.foliation);
    let (a, b, c, d) = (jac[n][n], jac[n][2], jac[2][n], jac[2][2]);
    let half_trace = 0.5 * (a + d);
    let disc = half_trace * half_trace - (a * d - b * c);
    let eigenvalues = if disc >= 0.0 {
        let r = disc.sqrt();
        [Eigenvalue { re: half_trace + r, im: 0.0 }, Eigenvalue { re: half_trace - r, im: 0.0 }]
    } else {
        let r = (-disc).sqrt();
        [Eigenvalue { re: half_trace, im: r }, Eigenvalue { re: half_trace, im: -r }]
    };
    Ok(Linearization { jacobian: jac, eigenvalues })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitOptions {
    /// Radius of the neighborhood, in arc length.
    pub radius: f64,
    /// Arc-length budget per orbit, in units of `radius`.
    pub arc_budget: f64,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self { radius: 0.05, arc_budget: 8.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitRole {
    /// Starts tangent to the principal line off the ridge.
    Fan,
    /// Starts near the incoming separatrix; `eta > 0` above it.
    Separatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PortraitOrbit {
    pub role: OrbitRole,
    pub start: DarbouxState,
    /// Relative offset from the separatrix (fan orbits: signed offset from
    /// the ridge in units of the fan spacing).
    pub offset: f64,
    /// Cusps after the start: crossings of the principal angle.
    pub cusps: usize,
    /// `|angle from the principal direction|` at each ridge crossing.
    pub crossing_angles: Vec<f64>,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhasePortrait {
    pub record: RidgeRecord,
    pub linearization: Linearization,
    /// Kind read off the orbits; `Degenerate` when the evidence is mixed.
    pub detected: RidgeKind,
    pub orbits: Vec<PortraitOrbit>,
}

impl PhasePortrait {
    /// Smallest ridge-crossing angle of the separatrix family.
    pub fn min_crossing_angle(&self) -> Option<f64> {
        self.orbits
            .iter()
            .filter(|o| o.role == OrbitRole::Separatrix)
            .flat_map(|o| o.crossing_angles.iter().copied())
            .min_by(f64::total_cmp)
    }
}

/// Integrates a fan of Darboux orbits around a classified ridge.
pub fn ridge_phase_portrait(
    surface: &dyn PrincipalSurface,
    record: &RidgeRecord,
    n_orbits: usize,
    opts: &PortraitOptions,
) -> Result<PhasePortrait> {
    if record.kind == RidgeKind::Degenerate {
        return Err(Error::DegenerateRidge(record.sigma.abs()));
    }
    let lin = linearization(surface, record)?;
    let jet0 = surface.jet(record.u, record.v)?;
    let (se, sg) = (jet0.metric_e.sqrt(), jet0.metric_g.sqrt());
    let foliation = record.foliation;
    let n = normal_index(foliation);
    let a0 = principal_angle(foliation);
    let (u0, v0) = (record.u, record.v);
    // chart length of one unit of arc across the ridge
    let unit = match foliation {
        Foliation::P1 => 1.0 / se,
        Foliation::P2 => 1.0 / sg,
    };
    let delta = 0.25 * opts.radius;
    let radius = opts.radius;
    let leave = Event::new("leave", move |u, v, _| {
        radius * radius - ((u - u0) * se).powi(2) - ((v - v0) * sg).powi(2)
    })
    .with_crossing(Crossing::Falling)
    .stop_after(1);
    let params = IntegratorParams {
        max_arc_length: opts.arc_budget * opts.radius,
        max_step: opts.radius / 40.0,
        ..IntegratorParams::default()
    };

    let shifted = |offset: f64, angle: f64| {
        let mut x = [u0, v0];
        x[n] += offset * unit;
        DarbouxState::new(x[0], x[1], a0 + angle)
    };
    let run = |role: OrbitRole, offset: f64, start: DarbouxState| -> Result<PortraitOrbit> {
        if !surface.domain().contains(start.u, start.v) {
            return Err(Error::NeighborhoodExit(format!("start ({}, {}) outside the chart", start.u, start.v)));
        }
        let traj = integrate_flow(surface, &Darboux, start, &params, &[], std::slice::from_ref(&leave))?;
        if traj.termination == Termination::DomainExit {
            return Err(Error::NeighborhoodExit(format!("orbit from ({}, {}) left the chart", start.u, start.v)));
        }
        let (cusps, crossing_angles) = inspect(surface, &traj, foliation, a0);
        Ok(PortraitOrbit { role, start, offset, cusps, crossing_angles, trajectory: traj })
    };

    let half = n_orbits.div_ceil(2).max(1);
    let mut orbits = Vec::new();
    for k in 1..=half {
        let off = delta * k as f64 / half as f64;
        for side in [-1.0, 1.0] {
            orbits.push(run(OrbitRole::Fan, side * k as f64, shifted(side * off, 0.0))?);
        }
    }
    // orbits aimed at the ridge just above and below the incoming separatrix
    // of the saddle (or with the same slope when the ridge is a center)
    let slope = (lin.jacobian[2][n] / lin.jacobian[n][2]).abs().sqrt();
    for k in 0..half {
        let eta = 0.2 / 4f64.powi(k as i32);
        for sign in [1.0, -1.0] {
            let angle = slope * delta * unit * (1.0 + sign * eta);
            // heading across the ridge from the negative side
            let start = shifted(-delta, angle);
            orbits.push(run(OrbitRole::Separatrix, sign * eta, start)?);
        }
    }

    let fan: Vec<_> = orbits.iter().filter(|o| o.role == OrbitRole::Fan).collect();
    let zigzag_evidence = fan.iter().all(|o| o.cusps >= 2);
    let above: Vec<_> = orbits.iter().filter(|o| o.role == OrbitRole::Separatrix && o.offset > 0.0).collect();
    let below: Vec<_> = orbits.iter().filter(|o| o.role == OrbitRole::Separatrix && o.offset < 0.0).collect();
    let first_angles: Vec<f64> = above.iter().filter_map(|o| o.crossing_angles.first().copied()).collect();
    let shrinking = first_angles.len() == above.len()
        && first_angles.windows(2).all(|w| w[1] < w[0])
        && first_angles.last().is_some_and(|a| *a < 0.5 * slope * delta * unit);
    let beak_evidence = fan.iter().all(|o| o.cusps <= 1)
        && shrinking
        && below.iter().all(|o| o.crossing_angles.is_empty() && o.cusps == 1);
    let detected = match (zigzag_evidence, beak_evidence) {
        (true, false) => RidgeKind::Zigzag,
        (false, true) => RidgeKind::BeakToBeak,
        _ => RidgeKind::Degenerate,
    };
    Ok(PhasePortrait { record: record.clone(), linearization: lin, detected, orbits })
}

/// Cusps (sign changes of the angle from the principal direction, after the
/// start) and the angles at which the orbit crosses the ridge.
fn inspect(surface: &dyn PrincipalSurface, traj: &Trajectory, foliation: Foliation, a0: f64) -> (usize, Vec<f64>) {
    let mut cusps = 0;
    let mut crossings = Vec::new();
    let mut last_sign = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for s in &traj.samples {
        let off = (s.alpha_lift - a0).sin();
        if off != 0.0 {
            if last_sign != 0.0 && off.signum() != last_sign {
                cusps += 1;
            }
            last_sign = off.signum();
        }
        let Ok(jet) = surface.jet(s.state.u, s.state.v) else { continue };
        let f = ridge_function(&jet, foliation);
        if let Some((f0, off0)) = prev {
            if f0 != 0.0 && f.signum() != f0.signum() {
                let t = f0 / (f0 - f);
                crossings.push((off0 + t * (off - off0)).abs());
            }
        }
        prev = Some((f, off));
    }
    (cusps, crossings)
}
