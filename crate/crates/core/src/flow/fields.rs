//! Curve flows on the unit-tangent reduction `(u, v, alpha)` and their
//! registry.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::{CurvatureJet, PrincipalSurface};

use super::DarbouxState;

/// Darboux field in arc length (singular where `sin(a) cos(a) = 0`).
pub fn darboux_field_arclength(surface: &dyn PrincipalSurface, state: &DarbouxState, standoff: f64) -> Result<[f64; 3]> {
    let jet = surface.jet(state.u, state.v)?;
    jet.require_non_umbilic(state.u, state.v)?;
    let (s, c) = state.alpha.sin_cos();
    if (s * c).abs() < standoff {
        return Err(Error::PrincipalSingularity((s * c).abs()));
    }
    let (se, sg) = (jet.metric_e.sqrt(), jet.metric_g.sqrt());
    let num = jet.k1_u * c * c * c / se + jet.k2_v * s * s * s / sg;
    Ok([c / se, s / sg, num / (3.0 * (jet.k1 - jet.k2) * s * c)])
}

/// Darboux field multiplied by `3 (k1 - k2) sin(a) cos(a)`; regular for every
/// angle, its orbits are those of the arc-length field.
pub fn darboux_field_desingularized(surface: &dyn PrincipalSurface, state: &DarbouxState) -> Result<[f64; 3]> {
    let jet = surface.jet(state.u, state.v)?;
    jet.require_non_umbilic(state.u, state.v)?;
    Ok(desingularized(&jet, state.alpha))
}

fn desingularized(jet: &CurvatureJet, alpha: f64) -> [f64; 3] {
    let (s, c) = alpha.sin_cos();
    let (se, sg) = (jet.metric_e.sqrt(), jet.metric_g.sqrt());
    let d = 3.0 * (jet.k1 - jet.k2) * s * c;
    [
        d * c / se,
        d * s / sg,
        jet.k1_u * c * c * c / se + jet.k2_v * s * s * s / sg,
    ]
}

/// A curve family on the surface, written as an autonomous field on
/// `(u, v, alpha)`.
pub trait CurveFlow: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// `(du, dv, dalpha)` per unit of the integration parameter. The chart
    /// velocity must be a multiple of `(cos a / sqrt(E), sin a / sqrt(G))`.
    fn rates(&self, jet: &CurvatureJet, alpha: f64) -> Result<[f64; 3]>;

    /// Adjusts the initial state (e.g. snapping to a principal direction).
    fn prepare(&self, state: DarbouxState) -> DarbouxState {
        state
    }

    /// Whether the flow has a singular locus the integrator must stop at.
    fn singular(&self, _alpha: f64, _standoff: f64) -> bool {
        false
    }

    fn is_darboux(&self) -> bool {
        false
    }
}

/// Signed arc-length speed of a chart velocity along the heading `alpha`.
pub fn signed_speed(jet: &CurvatureJet, alpha: f64, rates: &[f64; 3]) -> f64 {
    let (s, c) = alpha.sin_cos();
    rates[0] * jet.metric_e.sqrt() * c + rates[1] * jet.metric_g.sqrt() * s
}

pub struct Darboux;

impl CurveFlow for Darboux {
    fn name(&self) -> &'static str {
        "darboux"
    }

    fn summary(&self) -> &'static str {
        "Darboux curves, desingularized field (regular through principal directions)"
    }

    fn rates(&self, jet: &CurvatureJet, alpha: f64) -> Result<[f64; 3]> {
        Ok(desingularized(jet, alpha))
    }

    fn is_darboux(&self) -> bool {
        true
    }
}

pub struct DarbouxArcLength;

impl CurveFlow for DarbouxArcLength {
    fn name(&self) -> &'static str {
        "darboux-arclength"
    }

    fn summary(&self) -> &'static str {
        "Darboux curves in arc length; stops at the principal-direction singular locus"
    }

    fn rates(&self, jet: &CurvatureJet, alpha: f64) -> Result<[f64; 3]> {
        let (s, c) = alpha.sin_cos();
        if s * c == 0.0 {
            return Err(Error::PrincipalSingularity(0.0));
        }
        let d = desingularized(jet, alpha);
        let w = 3.0 * (jet.k1 - jet.k2) * s * c;
        Ok([d[0] / w, d[1] / w, d[2] / w])
    }

    fn singular(&self, alpha: f64, standoff: f64) -> bool {
        let (s, c) = alpha.sin_cos();
        (s * c).abs() < standoff
    }

    fn is_darboux(&self) -> bool {
        true
    }
}

pub struct Geodesic;

impl CurveFlow for Geodesic {
    fn name(&self) -> &'static str {
        "geodesic"
    }

    fn summary(&self) -> &'static str {
        "geodesics, dalpha/ds = -(kg1 cos a + kg2 sin a)"
    }

    fn rates(&self, jet: &CurvatureJet, alpha: f64) -> Result<[f64; 3]> {
        let (s, c) = alpha.sin_cos();
        let (kg1, kg2) = jet.geodesic_curvatures();
        Ok([c / jet.metric_e.sqrt(), s / jet.metric_g.sqrt(), -(kg1 * c + kg2 * s)])
    }
}

/// Leaves of the constant-angle foliation: the angle to P1 stays at its
/// initial value.
pub struct ConstantAngle;

impl CurveFlow for ConstantAngle {
    fn name(&self) -> &'static str {
        "falpha"
    }

    fn summary(&self) -> &'static str {
        "leaves making a constant angle with P1"
    }

    fn rates(&self, jet: &CurvatureJet, alpha: f64) -> Result<[f64; 3]> {
        let (s, c) = alpha.sin_cos();
        Ok([c / jet.metric_e.sqrt(), s / jet.metric_g.sqrt(), 0.0])
    }
}

/// Lines of curvature: the initial angle is snapped to the nearest
/// principal direction.
pub struct CurvatureLine;

impl CurveFlow for CurvatureLine {
    fn name(&self) -> &'static str {
        "curvature-line"
    }

    fn summary(&self) -> &'static str {
        "lines of curvature (initial angle snapped to a multiple of pi/2)"
    }

    fn rates(&self, jet: &CurvatureJet, alpha: f64) -> Result<[f64; 3]> {
        ConstantAngle.rates(jet, alpha)
    }

    fn prepare(&self, state: DarbouxState) -> DarbouxState {
        let snapped = (state.alpha / FRAC_PI_2).round() * FRAC_PI_2;
        DarbouxState::new(state.u, state.v, snapped)
    }
}

/// Curves turning at a constant rate relative to P1; never Darboux curves in
/// general, used as a control.
pub struct Turning {
    pub rate: f64,
}

impl CurveFlow for Turning {
    fn name(&self) -> &'static str {
        "turning"
    }

    fn summary(&self) -> &'static str {
        "curves whose angle to P1 grows at a constant rate (control family)"
    }

    fn rates(&self, jet: &CurvatureJet, alpha: f64) -> Result<[f64; 3]> {
        let (s, c) = alpha.sin_cos();
        Ok([c / jet.metric_e.sqrt(), s / jet.metric_g.sqrt(), self.rate])
    }
}

/// Named curve flows.
pub struct FlowRegistry {
    flows: BTreeMap<&'static str, Box<dyn CurveFlow>>,
}

impl Default for FlowRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl FlowRegistry {
    pub fn builtin() -> Self {
        let mut r = Self { flows: BTreeMap::new() };
        r.register(Box::new(Darboux));
        r.register(Box::new(DarbouxArcLength));
        r.register(Box::new(Geodesic));
        r.register(Box::new(ConstantAngle));
        r.register(Box::new(CurvatureLine));
        r.register(Box::new(Turning { rate: 0.5 }));
        r
    }

    pub fn register(&mut self, flow: Box<dyn CurveFlow>) {
        self.flows.insert(flow.name(), flow);
    }

    pub fn get(&self, name: &str) -> Result<&dyn CurveFlow> {
        self.flows.get(name).map(|f| f.as_ref()).ok_or_else(|| {
            let known: Vec<_> = self.flows.keys().copied().collect();
            Error::InvalidParameters(format!("unknown flow `{name}` (known: {})", known.join(", ")))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.flows.keys().copied()
    }

    pub fn flows(&self) -> impl Iterator<Item = &dyn CurveFlow> + '_ {
        self.flows.values().map(|f| f.as_ref())
    }
}
