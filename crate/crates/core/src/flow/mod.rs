//! Darboux curves and related curve families as flows on `(u, v, alpha)`,
//! the adaptive integrator, and the oracles that check the Darboux
//! condition independently of the field.

mod export;
mod fields;
mod integrability;
mod integrate;
pub mod ode;
mod oracle;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use export::{write_csv, write_metadata, TrajectoryMetadata};
pub use fields::{
    darboux_field_arclength, darboux_field_desingularized, signed_speed, ConstantAngle, CurvatureLine, CurveFlow,
    Darboux, DarbouxArcLength, FlowRegistry, Geodesic, Turning,
};
pub use integrability::plane_field_integrability;
pub use integrate::{
    falpha_leaf, integrate, integrate_batch, integrate_flow, Crossing, Event, Monitor, NormalCurvatureMonitor,
};
pub(crate) use oracle::probe_step;
pub use oracle::{
    ambient_residual_at, chart_residual_at, darboux_residual, darboux_residual_with, osculating_contact_residual,
    osculating_contact_residual_with, probe, ProbePoint, ResidualReport,
};

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_angle(alpha: f64) -> f64 {
    let r = alpha.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// A point of the unit tangent bundle: chart point and angle from P1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarbouxState {
    pub u: f64,
    pub v: f64,
    pub alpha: f64,
}

impl DarbouxState {
    pub fn new(u: f64, v: f64, alpha: f64) -> Self {
        Self { u, v, alpha }
    }

    /// Same state with the angle reduced into `(-pi, pi]`.
    pub fn canonical(self) -> Self {
        Self { alpha: wrap_angle(self.alpha), ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorParams {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_arc_length: f64,
    pub max_steps: usize,
    /// Distance in `|sin a cos a|` kept from the principal-direction locus by
    /// flows that are singular there.
    pub alpha_standoff: f64,
    /// Relative `|k1 - k2|` below which integration stops near an umbilic.
    pub umbilic_standoff: f64,
    /// Relative distance to a finite chart boundary at which integration
    /// stops with a domain exit.
    pub boundary_standoff: f64,
    /// Bound on the change of `(s, alpha)` over one step.
    pub max_step: f64,
    pub min_step: f64,
    /// Integrate forward (`1`) or backward (`-1`) along the orientation
    /// chosen at the start.
    pub direction: f64,
}

impl Default for IntegratorParams {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_arc_length: 10.0,
            max_steps: 200_000,
            alpha_standoff: 1e-4,
            umbilic_standoff: 1e-6,
            boundary_standoff: 1e-9,
            max_step: 0.05,
            min_step: 1e-14,
            direction: 1.0,
        }
    }
}

impl IntegratorParams {
    pub fn with_arc_length(mut self, arc: f64) -> Self {
        self.max_arc_length = arc;
        self
    }

    pub fn with_tolerances(mut self, rel: f64, abs: f64) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    pub fn reversed(mut self) -> Self {
        self.direction = -self.direction;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            self.rel_tol,
            self.abs_tol,
            self.max_arc_length,
            self.alpha_standoff,
            self.umbilic_standoff,
            self.boundary_standoff,
            self.max_step,
            self.min_step,
        ];
        if positive.iter().any(|x| !(*x > 0.0)) || self.max_steps == 0 || self.direction.abs() != 1.0 {
            return Err(crate::Error::InvalidParameters(format!("invalid integrator parameters {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ArcLength,
    DomainExit,
    SingularLocus,
    UmbilicProximity,
    StepBudget,
    StepCollapse,
    Event(String),
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::ArcLength => write!(f, "arc-length budget"),
            Termination::DomainExit => write!(f, "domain exit"),
            Termination::SingularLocus => write!(f, "singular locus"),
            Termination::UmbilicProximity => write!(f, "umbilic proximity"),
            Termination::StepBudget => write!(f, "step budget"),
            Termination::StepCollapse => write!(f, "step collapse"),
            Termination::Event(name) => write!(f, "event {name}"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sample {
    pub s: f64,
    /// Integration parameter.
    pub tau: f64,
    pub state: DarbouxState,
    /// Continuous lift of the angle.
    pub alpha_lift: f64,
    pub position: [f64; 3],
    pub monitors: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventHit {
    pub name: String,
    pub tau: f64,
    pub s: f64,
    pub state: DarbouxState,
    pub alpha_lift: f64,
    /// Sign of the event function's slope at the crossing.
    pub rising: bool,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub field_evaluations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub surface: String,
    pub flow: String,
    /// `+1` or `-1`: orientation of the integration parameter relative to
    /// the field.
    pub orientation: f64,
    pub params: IntegratorParams,
    pub monitor_names: Vec<String>,
    pub samples: Vec<Sample>,
    pub events: Vec<EventHit>,
    pub termination: Termination,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn arc_length(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.s)
    }

    pub fn monitor(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.monitor_names.iter().position(|n| n == name)?;
        Some(self.samples.iter().map(|s| s.monitors[i]).collect())
    }

    /// Largest relative deviation of a monitor from its initial value.
    pub fn relative_drift(&self, name: &str) -> Option<f64> {
        let values = self.monitor(name)?;
        let first = *values.first()?;
        let scale = first.abs().max(1e-300);
        Some(values.iter().map(|v| (v - first).abs() / scale).fold(0.0, f64::max))
    }

    pub fn events_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a EventHit> + 'a {
        self.events.iter().filter(move |e| e.name == name)
    }
}
