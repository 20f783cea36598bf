//! Adaptive integration of a curve flow with monitors and section events.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{CurvatureJet, PrincipalSurface};

use super::fields::{signed_speed, ConstantAngle, CurveFlow, Darboux};
use super::ode::{attempt, step_factor, Dense, Tolerance};
use super::{wrap_angle, DarbouxState, EventHit, IntegratorParams, Sample, StepStats, Termination, Trajectory};

/// A scalar recorded at every accepted step.
pub trait Monitor: Send + Sync {
    fn name(&self) -> String;

    fn eval(&self, surface: &dyn PrincipalSurface, jet: &CurvatureJet, state: &DarbouxState) -> f64;
}

/// Normal curvature `k1 cos² a + k2 sin² a` in the current direction.
pub struct NormalCurvatureMonitor;

impl Monitor for NormalCurvatureMonitor {
    fn name(&self) -> String {
        "k_n".into()
    }

    fn eval(&self, _: &dyn PrincipalSurface, jet: &CurvatureJet, state: &DarbouxState) -> f64 {
        let (s, c) = state.alpha.sin_cos();
        jet.k1 * c * c + jet.k2 * s * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Any,
    Rising,
    Falling,
}

type EventFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Zero crossing of a function of `(u, v, alpha_lift)`.
#[derive(Clone)]
pub struct Event {
    pub name: String,
    g: EventFn,
    pub crossing: Crossing,
    /// Stop after this many hits.
    pub stop_after: Option<usize>,
}

impl std::fmt::Debug for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Event")
            .field("name", &self.name)
            .field("crossing", &self.crossing)
            .field("stop_after", &self.stop_after)
            .finish()
    }
}

impl Event {
    pub fn new(name: &str, g: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), g: Arc::new(g), crossing: Crossing::Any, stop_after: None }
    }

    /// `alpha = offset (mod period)`.
    pub fn angle(name: &str, offset: f64, period: f64) -> Self {
        Self::new(name, move |_, _, a| (PI * (a - offset) / period).sin())
    }

    /// Crossing of P1 or its reverse: `alpha = 0 (mod pi)`.
    pub fn principal_p1() -> Self {
        Self::angle("alpha=0", 0.0, PI)
    }

    /// `alpha = pi/2 (mod pi)`.
    pub fn principal_p2() -> Self {
        Self::angle("alpha=pi/2", 0.5 * PI, PI)
    }

    pub fn u_equals(name: &str, value: f64) -> Self {
        Self::new(name, move |u, _, _| u - value)
    }

    pub fn v_equals(name: &str, value: f64) -> Self {
        Self::new(name, move |_, v, _| v - value)
    }

    pub fn with_crossing(mut self, crossing: Crossing) -> Self {
        self.crossing = crossing;
        self
    }

    pub fn stop_after(mut self, hits: usize) -> Self {
        self.stop_after = Some(hits);
        self
    }

    fn value(&self, y: &[f64; 4]) -> f64 {
        (self.g)(y[0], y[1], y[2])
    }

    fn triggers(&self, g0: f64, g1: f64) -> bool {
        let rising = g0 < 0.0 && g1 >= 0.0;
        let falling = g0 > 0.0 && g1 <= 0.0;
        match self.crossing {
            Crossing::Any => rising || falling,
            Crossing::Rising => rising,
            Crossing::Falling => falling,
        }
    }
}

/// Bisection on the dense output to `1e-12` in the integration parameter.
fn locate(dense: &Dense<4>, f: impl Fn(&[f64; 4]) -> f64) -> f64 {
    let (mut a, mut b) = (dense.t0, dense.t1());
    let mut fa = f(&dense.eval(a));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 {
            break;
        }
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(&dense.eval(m));
        if (fm < 0.0) == (fa < 0.0) && fm != 0.0 {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    b
}

/// Darboux-condition defect `dk_n + tau_g (dalpha + (kg1 c + kg2 s) ds)`,
/// per unit arc length away from stationary points.
fn darboux_defect(jet: &CurvatureJet, alpha: f64, rates: &[f64; 3]) -> f64 {
    let (s, c) = alpha.sin_cos();
    let (kg1, kg2) = jet.geodesic_curvatures();
    let tau_g = (jet.k2 - jet.k1) * c * s;
    let w = signed_speed(jet, alpha, rates);
    let dkn = (jet.k1_u * c * c + jet.k2_u * s * s) * rates[0]
        + (jet.k1_v * c * c + jet.k2_v * s * s) * rates[1]
        + 2.0 * tau_g * rates[2];
    let d = dkn + tau_g * (rates[2] + (kg1 * c + kg2 * s) * w);
    if w.abs() > 1e-12 {
        d / w.abs()
    } else {
        d
    }
}

struct Driver<'a> {
    surface: &'a dyn PrincipalSurface,
    flow: &'a dyn CurveFlow,
    params: IntegratorParams,
    sign: f64,
}

impl Driver<'_> {
    fn rates(&self, jet: &CurvatureJet, alpha: f64) -> Result<[f64; 3]> {
        let r = self.flow.rates(jet, alpha)?;
        Ok([self.sign * r[0], self.sign * r[1], self.sign * r[2]])
    }

    fn field(&self, y: &[f64; 4]) -> Result<[f64; 4]> {
        let jet = self.surface.jet(y[0], y[1])?;
        jet.require_non_umbilic(y[0], y[1])?;
        let r = self.rates(&jet, y[2])?;
        let w = signed_speed(&jet, y[2], &r);
        Ok([r[0], r[1], r[2], w.abs()])
    }

    fn sample(&self, tau: f64, y: &[f64; 4], monitors: &[Box<dyn Monitor>]) -> Result<Sample> {
        let jet = self.surface.jet(y[0], y[1])?;
        let state = DarbouxState::new(y[0], y[1], wrap_angle(y[2]));
        let r = self.rates(&jet, y[2])?;
        let mut values = vec![jet.umbilic_gap(), darboux_defect(&jet, y[2], &r)];
        values.extend(monitors.iter().map(|m| m.eval(self.surface, &jet, &state)));
        let p = self.surface.position(y[0], y[1])?;
        Ok(Sample { s: y[3], tau, state, alpha_lift: y[2], position: [p.x, p.y, p.z], monitors: values })
    }

    fn near_umbilic(&self, y: &[f64; 4]) -> Result<bool> {
        let jet = self.surface.jet(y[0], y[1])?;
        let scale = jet.k1.abs().max(jet.k2.abs()).max(1e-300);
        Ok(jet.umbilic_gap() < self.params.umbilic_standoff * scale)
    }
}

fn termination_for(err: &Error) -> Option<Termination> {
    match err {
        Error::OutOfDomain { .. } | Error::ChartSingular { .. } => Some(Termination::DomainExit),
        Error::UmbilicProximity { .. } => Some(Termination::UmbilicProximity),
        Error::PrincipalSingularity(_) => Some(Termination::SingularLocus),
        _ => None,
    }
}

/// Integrates `flow` from `state0`, recording the built-in monitors
/// (`umbilic_gap`, `darboux_defect`), the extra `monitors`, and `events`.
pub fn integrate_flow(
    surface: &dyn PrincipalSurface,
    flow: &dyn CurveFlow,
    state0: DarbouxState,
    params: &IntegratorParams,
    monitors: &[Box<dyn Monitor>],
    events: &[Event],
) -> Result<Trajectory> {
    params.validate()?;
    let state0 = flow.prepare(state0);
    let jet0 = surface.jet(state0.u, state0.v)?;
    jet0.require_non_umbilic(state0.u, state0.v)?;
    let r0 = flow.rates(&jet0, state0.alpha)?;
    let w0 = signed_speed(&jet0, state0.alpha, &r0);
    let orientation = if w0 > 0.0 || (w0 == 0.0 && r0[2] >= 0.0) { 1.0 } else { -1.0 };
    let driver = Driver { surface, flow, params: *params, sign: orientation * params.direction };

    let mut names = vec!["umbilic_gap".to_string(), "darboux_defect".to_string()];
    names.extend(monitors.iter().map(|m| m.name()));
    let mut traj = Trajectory {
        surface: surface.name().to_string(),
        flow: flow.name().to_string(),
        orientation,
        params: *params,
        monitor_names: names,
        samples: Vec::new(),
        events: Vec::new(),
        termination: Termination::StepBudget,
        stats: StepStats::default(),
    };

    let mut y = [state0.u, state0.v, state0.alpha, 0.0];
    let mut t = 0.0;
    traj.samples.push(driver.sample(t, &y, monitors)?);
    let mut k = driver.field(&y)?;
    traj.stats.field_evaluations += 1;
    let tol = Tolerance { rel: params.rel_tol, abs: params.abs_tol };
    let mut hits = vec![0usize; events.len()];

    let rate = |k: &[f64; 4]| k[3].hypot(k[2]);
    if rate(&k) < 1e-13 {
        traj.termination = Termination::SingularLocus;
        return Ok(traj);
    }
    let mut h = 0.1 * params.max_step / rate(&k);

    loop {
        if traj.stats.accepted >= params.max_steps {
            traj.termination = Termination::StepBudget;
            break;
        }
        let cap = params.max_step / rate(&k).max(1e-300);
        h = h.min(cap);
        if h < params.min_step * t.abs().max(1.0) {
            traj.termination = Termination::StepCollapse;
            break;
        }
        let f = |y: &[f64; 4]| driver.field(y);
        let step = match attempt(&f, t, &y, &k, h, tol) {
            Ok(step) => step,
            Err(err) => {
                traj.stats.rejected += 1;
                traj.stats.field_evaluations += 6;
                let Some(reason) = termination_for(&err) else {
                    return Err(err);
                };
                h *= 0.25;
                if h < params.min_step * t.abs().max(1.0) {
                    traj.termination = reason;
                    break;
                }
                continue;
            }
        };
        traj.stats.field_evaluations += 6;
        let crosses_singular = flow.singular(0.0, f64::MIN_POSITIVE)
            && ((2.0 * y[2]).sin() > 0.0) != ((2.0 * step.y_new[2]).sin() > 0.0);
        if step.error > 1.0 || crosses_singular {
            traj.stats.rejected += 1;
            h *= if step.error > 1.0 { step_factor(step.error) } else { 0.5 };
            continue;
        }
        traj.stats.accepted += 1;

        // earliest terminal crossing inside the step
        let mut stop: Option<(f64, Termination)> = None;
        if step.y_new[3] >= params.max_arc_length {
            let tau = locate(&step.dense, |z| z[3] - params.max_arc_length);
            stop = Some((tau, Termination::ArcLength));
        }
        let mut found: Vec<(f64, usize, bool)> = Vec::new();
        for (i, ev) in events.iter().enumerate() {
            let (g0, g1) = (ev.value(&y), ev.value(&step.y_new));
            if ev.triggers(g0, g1) {
                let tau = locate(&step.dense, |z| ev.value(z));
                found.push((tau, i, g1 > g0));
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (tau, i, rising) in found {
            if stop.as_ref().is_some_and(|(ts, _)| *ts < tau) {
                break;
            }
            let z = step.dense.eval(tau);
            traj.events.push(EventHit {
                name: events[i].name.clone(),
                tau,
                s: z[3],
                state: DarbouxState::new(z[0], z[1], wrap_angle(z[2])),
                alpha_lift: z[2],
                rising,
            });
            hits[i] += 1;
            if events[i].stop_after.is_some_and(|n| hits[i] >= n) {
                stop = Some((tau, Termination::Event(events[i].name.clone())));
                break;
            }
        }
        if let Some((tau, reason)) = stop {
            let z = step.dense.eval(tau);
            traj.samples.push(driver.sample(tau, &z, monitors)?);
            traj.termination = reason;
            break;
        }

        t += h;
        y = step.y_new;
        k = step.k_new;
        traj.samples.push(driver.sample(t, &y, monitors)?);
        if surface.domain().margin(y[0], y[1]) < params.boundary_standoff {
            traj.termination = Termination::DomainExit;
            break;
        }
        if driver.near_umbilic(&y)? {
            traj.termination = Termination::UmbilicProximity;
            break;
        }
        if flow.singular(y[2], params.alpha_standoff) {
            traj.termination = Termination::SingularLocus;
            break;
        }
        h *= step_factor(step.error);
    }
    Ok(traj)
}

/// Darboux curve through `state0` on the desingularized field, with every
/// applicable first integral monitored.
pub fn integrate(surface: &dyn PrincipalSurface, state0: DarbouxState, params: &IntegratorParams) -> Result<Trajectory> {
    let monitors = crate::integrals::monitors_for(surface)?;
    integrate_flow(surface, &Darboux, state0, params, &monitors, &[])
}

/// Leaf of the constant-angle foliation at angle `sign * alpha0` from P1.
pub fn falpha_leaf(
    surface: &dyn PrincipalSurface,
    start: (f64, f64),
    alpha0: f64,
    sign: f64,
    params: &IntegratorParams,
    events: &[Event],
) -> Result<Trajectory> {
    let state = DarbouxState::new(start.0, start.1, sign.signum() * alpha0);
    integrate_flow(surface, &ConstantAngle, state, params, &[Box::new(NormalCurvatureMonitor)], events)
}

/// Independent trajectories on a pool of `jobs` threads; results keep the
/// order of `starts`.
pub fn integrate_batch(
    surface: &dyn PrincipalSurface,
    flow: &dyn CurveFlow,
    starts: &[DarbouxState],
    params: &IntegratorParams,
    jobs: usize,
) -> Result<Vec<Result<Trajectory>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        starts
            .par_iter()
            .map(|s| integrate_flow(surface, flow, *s, params, &[], &[]))
            .collect()
    }))
}
