//! Closed-form first integrals of Darboux curves for the catalog families,
//! the Clairaut integral of geodesics, and a conservation reporter.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{Cone, Cylinder, Quadric, Revolution};
use crate::error::{Error, Result};
use crate::flow::{DarbouxState, Monitor, Termination, Trajectory};
use crate::geometry::{CurvatureJet, Family, Interval, PrincipalSurface};
use crate::numeric::integrate as quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    /// The formula failed its consistency check on this surface; values are
    /// still reported.
    Unverified,
}

/// A conserved quantity bound to one surface.
pub trait FirstIntegral: Send + Sync {
    fn name(&self) -> &'static str;

    /// Applicability tag.
    fn family(&self) -> &'static str;

    /// Flow along which the quantity is constant.
    fn conserved_by(&self) -> &'static str {
        "darboux"
    }

    fn notes(&self) -> &'static str;

    fn status(&self) -> Status {
        Status::Verified
    }

    fn evaluate(&self, surface: &dyn PrincipalSurface, state: &DarbouxState) -> Result<f64>;
}

/// Creates a [`FirstIntegral`] for surfaces it applies to.
pub trait IntegralFactory: Send + Sync {
    fn name(&self) -> &'static str;

    fn applies(&self, surface: &dyn PrincipalSurface) -> bool;

    fn bind(&self, surface: &dyn PrincipalSurface) -> Result<Box<dyn FirstIntegral>>;
}

fn downcast<'a, T: 'static>(surface: &'a dyn PrincipalSurface, what: &str) -> Result<&'a T> {
    surface
        .as_any()
        .downcast_ref::<T>()
        .ok_or_else(|| Error::InvalidParameters(format!("{what} integral needs a catalog {what} surface")))
}

fn cos3(alpha: f64) -> f64 {
    alpha.cos().powi(3)
}

/// `cos² a / u + sin² a / v` in confocal coordinates.
pub fn quadric_integral(quadric: &Quadric, state: &DarbouxState) -> Result<f64> {
    let (u, v) = quadric.confocal(state.u, state.v);
    if u == 0.0 || v == 0.0 {
        return Err(Error::ChartSingular { u: state.u, v: state.v, reason: "confocal coordinate is zero".into() });
    }
    let (s, c) = state.alpha.sin_cos();
    Ok(c * c / u + s * s / v)
}

/// `h(u) (k1 - k2) cos³ a` with `h` the distance to the axis.
pub fn revolution_integral(surface: &Revolution, state: &DarbouxState) -> Result<f64> {
    let jet = surface.jet(state.u, state.v)?;
    Ok(surface.axis_distance(state.u) * (jet.k1 - jet.k2) * cos3(state.alpha))
}

/// `k_g(u) cos³ a`, `k_g` the geodesic curvature of the spherical directrix.
pub fn cone_integral(surface: &Cone, state: &DarbouxState) -> Result<f64> {
    surface.domain().check(state.u, state.v)?;
    Ok(surface.directrix_curvature(state.u)[0] * cos3(state.alpha))
}

/// `k(u) cos³ a`, `k` the curvature of the planar directrix.
pub fn cylinder_integral(surface: &Cylinder, state: &DarbouxState) -> Result<f64> {
    surface.domain().check(state.u, state.v)?;
    Ok(surface.directrix_curvature(state.u)[0] * cos3(state.alpha))
}

/// Clairaut's `h(u) sin a`, constant along geodesics of a revolution surface.
pub fn clairaut_geodesic_integral(surface: &Revolution, state: &DarbouxState) -> Result<f64> {
    surface.domain().check(state.u, state.v)?;
    Ok(surface.axis_distance(state.u) * state.alpha.sin())
}

struct QuadricIntegral;

impl FirstIntegral for QuadricIntegral {
    fn name(&self) -> &'static str {
        "quadric"
    }

    fn family(&self) -> &'static str {
        "quadric"
    }

    fn notes(&self) -> &'static str {
        "cos²a/u + sin²a/v in confocal coordinates; undefined where u or v vanishes"
    }

    fn evaluate(&self, surface: &dyn PrincipalSurface, state: &DarbouxState) -> Result<f64> {
        quadric_integral(downcast::<Quadric>(surface, "quadric")?, state)
    }
}

struct RevolutionIntegral;

impl FirstIntegral for RevolutionIntegral {
    fn name(&self) -> &'static str {
        "revolution"
    }

    fn family(&self) -> &'static str {
        "revolution"
    }

    fn notes(&self) -> &'static str {
        "h(u)(k1 - k2)cos³a with a measured from the meridian (P1)"
    }

    fn evaluate(&self, surface: &dyn PrincipalSurface, state: &DarbouxState) -> Result<f64> {
        revolution_integral(downcast::<Revolution>(surface, "revolution")?, state)
    }
}

struct ClairautIntegral;

impl FirstIntegral for ClairautIntegral {
    fn name(&self) -> &'static str {
        "clairaut"
    }

    fn family(&self) -> &'static str {
        "revolution"
    }

    fn conserved_by(&self) -> &'static str {
        "geodesic"
    }

    fn notes(&self) -> &'static str {
        "h(u)sin a; a geodesic integral, not conserved by Darboux curves"
    }

    fn evaluate(&self, surface: &dyn PrincipalSurface, state: &DarbouxState) -> Result<f64> {
        clairaut_geodesic_integral(downcast::<Revolution>(surface, "revolution")?, state)
    }
}

struct ConeIntegral {
    status: Status,
}

impl FirstIntegral for ConeIntegral {
    fn name(&self) -> &'static str {
        "cone"
    }

    fn family(&self) -> &'static str {
        "cone"
    }

    fn notes(&self) -> &'static str {
        "k_g(u)cos³a; the 1/v in k1 cancels from k1_u/(k1 - k2)"
    }

    fn status(&self) -> Status {
        self.status
    }

    fn evaluate(&self, surface: &dyn PrincipalSurface, state: &DarbouxState) -> Result<f64> {
        cone_integral(downcast::<Cone>(surface, "cone")?, state)
    }
}

struct CylinderIntegral;

impl FirstIntegral for CylinderIntegral {
    fn name(&self) -> &'static str {
        "cylinder"
    }

    fn family(&self) -> &'static str {
        "cylinder"
    }

    fn notes(&self) -> &'static str {
        "k(u)cos³a; identically zero over straight directrix segments"
    }

    fn evaluate(&self, surface: &dyn PrincipalSurface, state: &DarbouxState) -> Result<f64> {
        cylinder_integral(downcast::<Cylinder>(surface, "cylinder")?, state)
    }
}

/// Interior sample points of an interval.
fn interior(interval: &Interval, n: usize) -> Vec<f64> {
    let (lo, hi) = match (interval.lo.is_finite(), interval.hi.is_finite(), interval.period) {
        (true, true, _) => (interval.lo, interval.hi),
        (_, _, Some(p)) => (interval.midpoint() - 0.5 * p, interval.midpoint() + 0.5 * p),
        _ => (interval.midpoint() - 1.0, interval.midpoint() + 1.0),
    };
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64).collect()
}

fn canal_rate(jet: &CurvatureJet) -> f64 {
    jet.k1_u / (jet.k1 - jet.k2)
}

/// `A(u) cos³ a` with `A(u) = exp ∫ k1_u / (k1 - k2) du`, `A = 1` at the
/// midpoint of the `u`-range. Valid on charts where `k2` does not depend on
/// `v` and `k1_u / (k1 - k2)` depends on `u` only.
pub struct CanalIntegral {
    anchor: f64,
    v_ref: f64,
    nodes: Vec<f64>,
    /// `∫ from anchor to node`.
    log_a: Vec<f64>,
}

const CANAL_GATE: f64 = 1e-6;
const CANAL_NODES: usize = 128;

impl CanalIntegral {
    pub fn new(surface: &dyn PrincipalSurface) -> Result<Self> {
        let domain = surface.domain();
        let anchor = domain.u.midpoint();
        let v_ref = domain.v.midpoint();
        for u in interior(&domain.u, 7) {
            let reference = canal_rate(&surface.jet(u, v_ref)?);
            for v in interior(&domain.v, 7) {
                let jet = surface.jet(u, v)?;
                let scale = jet.k1.abs().max(jet.k2.abs()).max(1e-12);
                if jet.k2_v.abs() > CANAL_GATE * scale {
                    return Err(Error::NotCanal(format!("k2 varies along P2 at ({u}, {v}): {:e}", jet.k2_v)));
                }
                let rate = canal_rate(&jet);
                if (rate - reference).abs() > CANAL_GATE * reference.abs().max(1.0) {
                    return Err(Error::NotCanal(format!("k1_u/(k1 - k2) depends on v at ({u}, {v})")));
                }
            }
        }
        let half = match (domain.u.lo.is_finite() && domain.u.hi.is_finite(), domain.u.period) {
            (true, _) => 0.5 * (domain.u.hi - domain.u.lo),
            (false, Some(p)) => 0.5 * p,
            _ => 1.0,
        };
        let (lo, hi) = (anchor - half, anchor + half);
        let nodes: Vec<f64> = (0..=CANAL_NODES)
            .map(|i| lo + (hi - lo) * i as f64 / CANAL_NODES as f64)
            .filter(|u| domain.u.contains(*u))
            .collect();
        let mut out = Self { anchor, v_ref, nodes: Vec::new(), log_a: Vec::new() };
        // accumulate outward from the node nearest the anchor
        let mut log_a = vec![0.0; nodes.len()];
        if let Some(mid) = nodes.iter().position(|u| *u >= anchor) {
            log_a[mid] = out.integral(surface, anchor, nodes[mid])?;
            for i in mid + 1..nodes.len() {
                log_a[i] = log_a[i - 1] + out.integral(surface, nodes[i - 1], nodes[i])?;
            }
            for i in (0..mid).rev() {
                log_a[i] = log_a[i + 1] + out.integral(surface, nodes[i + 1], nodes[i])?;
            }
        }
        out.nodes = nodes;
        out.log_a = log_a;
        Ok(out)
    }

    fn integral(&self, surface: &dyn PrincipalSurface, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let v = self.v_ref;
        let q = quadrature(|u| surface.jet(u, v).map_or(f64::NAN, |j| canal_rate(&j)), a, b, 1e-13)?;
        if !q.value.is_finite() {
            return Err(Error::Divergent(format!("canal quadrature on [{a}, {b}]")));
        }
        Ok(q.value)
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// `A(u)`.
    pub fn factor(&self, surface: &dyn PrincipalSurface, u: f64) -> Result<f64> {
        let (start, base) = match self.nodes.iter().enumerate().min_by(|a, b| (a.1 - u).abs().total_cmp(&(b.1 - u).abs())) {
            Some((i, &node)) => (node, self.log_a[i]),
            None => (self.anchor, 0.0),
        };
        Ok((base + self.integral(surface, start, u)?).exp())
    }
}

impl FirstIntegral for CanalIntegral {
    fn name(&self) -> &'static str {
        "canal"
    }

    fn family(&self) -> &'static str {
        "canal"
    }

    fn notes(&self) -> &'static str {
        "A(u)cos³a with A(u) = exp of the integral of k1_u/(k1 - k2), A = 1 at the u-range midpoint"
    }

    fn evaluate(&self, surface: &dyn PrincipalSurface, state: &DarbouxState) -> Result<f64> {
        surface.domain().check(state.u, state.v)?;
        Ok(self.factor(surface, state.u)? * cos3(state.alpha))
    }
}

struct Fixed {
    name: &'static str,
    family: Family,
    make: fn(&dyn PrincipalSurface) -> Result<Box<dyn FirstIntegral>>,
}

impl IntegralFactory for Fixed {
    fn name(&self) -> &'static str {
        self.name
    }

    fn applies(&self, surface: &dyn PrincipalSurface) -> bool {
        surface.family() == self.family
    }

    fn bind(&self, surface: &dyn PrincipalSurface) -> Result<Box<dyn FirstIntegral>> {
        (self.make)(surface)
    }
}

struct CanalFactory;

impl IntegralFactory for CanalFactory {
    fn name(&self) -> &'static str {
        "canal"
    }

    fn applies(&self, surface: &dyn PrincipalSurface) -> bool {
        surface.family() != Family::Quadric
    }

    fn bind(&self, surface: &dyn PrincipalSurface) -> Result<Box<dyn FirstIntegral>> {
        Ok(Box::new(CanalIntegral::new(surface)?))
    }
}

/// Checks `d ln|k_g| / du = k1_u / (k1 - k2)` on a sample grid.
fn verify_cone(surface: &dyn PrincipalSurface) -> Result<Status> {
    let cone = downcast::<Cone>(surface, "cone")?;
    let domain = surface.domain();
    for u in interior(&Interval::periodic(0.0, std::f64::consts::TAU, std::f64::consts::TAU), 9) {
        let [kg, kg1, _] = cone.directrix_curvature(u);
        for v in interior(&domain.v, 5) {
            let rate = canal_rate(&surface.jet(u, v)?);
            if (kg1 / kg - rate).abs() > 1e-9 * rate.abs().max(1.0) {
                return Ok(Status::Unverified);
            }
        }
    }
    Ok(Status::Verified)
}

/// Named integral constructors.
pub struct IntegralRegistry {
    factories: BTreeMap<&'static str, Box<dyn IntegralFactory>>,
}

impl Default for IntegralRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl IntegralRegistry {
    pub fn builtin() -> Self {
        let mut r = Self { factories: BTreeMap::new() };
        r.register(Box::new(Fixed { name: "quadric", family: Family::Quadric, make: |_| Ok(Box::new(QuadricIntegral)) }));
        r.register(Box::new(Fixed {
            name: "revolution",
            family: Family::Revolution,
            make: |_| Ok(Box::new(RevolutionIntegral)),
        }));
        r.register(Box::new(Fixed {
            name: "clairaut",
            family: Family::Revolution,
            make: |_| Ok(Box::new(ClairautIntegral)),
        }));
        r.register(Box::new(Fixed {
            name: "cone",
            family: Family::Cone,
            make: |s| Ok(Box::new(ConeIntegral { status: verify_cone(s)? })),
        }));
        r.register(Box::new(Fixed {
            name: "cylinder",
            family: Family::Cylinder,
            make: |_| Ok(Box::new(CylinderIntegral)),
        }));
        r.register(Box::new(CanalFactory));
        r
    }

    pub fn register(&mut self, factory: Box<dyn IntegralFactory>) {
        self.factories.insert(factory.name(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn bind(&self, name: &str, surface: &dyn PrincipalSurface) -> Result<Box<dyn FirstIntegral>> {
        let f = self.factories.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::InvalidParameters(format!("unknown integral `{name}` (known: {})", known.join(", ")))
        })?;
        if !f.applies(surface) {
            return Err(Error::InvalidParameters(format!(
                "integral `{name}` does not apply to surface `{}`",
                surface.name()
            )));
        }
        f.bind(surface)
    }

    /// Every integral that applies to and binds on `surface`.
    pub fn applicable(&self, surface: &dyn PrincipalSurface) -> Vec<Box<dyn FirstIntegral>> {
        self.factories
            .values()
            .filter(|f| f.applies(surface))
            .filter_map(|f| f.bind(surface).ok())
            .collect()
    }
}

/// Adapts a [`FirstIntegral`] to the integrator's monitor interface.
pub struct IntegralMonitor(pub Box<dyn FirstIntegral>);

impl Monitor for IntegralMonitor {
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    fn eval(&self, surface: &dyn PrincipalSurface, _: &CurvatureJet, state: &DarbouxState) -> f64 {
        self.0.evaluate(surface, state).unwrap_or(f64::NAN)
    }
}

/// Monitors for every applicable built-in integral.
pub fn monitors_for(surface: &dyn PrincipalSurface) -> Result<Vec<Box<dyn Monitor>>> {
    Ok(IntegralRegistry::builtin()
        .applicable(surface)
        .into_iter()
        .map(|i| Box::new(IntegralMonitor(i)) as Box<dyn Monitor>)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftSample {
    pub s: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub integral: String,
    pub family: String,
    pub conserved_by: String,
    pub status: Status,
    pub max_rel_drift: f64,
    pub samples: Vec<DriftSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub flow: String,
    pub termination: Termination,
    /// The trajectory stopped before its arc-length budget.
    pub partial: bool,
    pub arc_length: f64,
    pub integrals: Vec<IntegralReport>,
}

impl ConservationReport {
    pub fn get(&self, name: &str) -> Option<&IntegralReport> {
        self.integrals.iter().find(|r| r.integral == name)
    }
}

/// Relative drift of each integral along the trajectory, normalized by
/// `max(|value at s = 0|, 1e-30)`.
pub fn conservation_report(
    surface: &dyn PrincipalSurface,
    traj: &Trajectory,
    integrals: &[Box<dyn FirstIntegral>],
) -> Result<ConservationReport> {
    if traj.samples.is_empty() {
        return Err(Error::Empty("trajectory has no samples".into()));
    }
    let mut reports = Vec::new();
    for integral in integrals {
        let mut samples = Vec::with_capacity(traj.samples.len());
        for s in &traj.samples {
            let state = DarbouxState::new(s.state.u, s.state.v, s.alpha_lift);
            samples.push(DriftSample { s: s.s, value: integral.evaluate(surface, &state)? });
        }
        let first = samples[0].value;
        let scale = first.abs().max(1e-30);
        let max_rel_drift = samples.iter().map(|d| (d.value - first).abs() / scale).fold(0.0, f64::max);
        reports.push(IntegralReport {
            integral: integral.name().to_string(),
            family: integral.family().to_string(),
            conserved_by: integral.conserved_by().to_string(),
            status: integral.status(),
            max_rel_drift,
            samples,
        });
    }
    Ok(ConservationReport {
        flow: traj.flow.clone(),
        termination: traj.termination.clone(),
        partial: !matches!(traj.termination, Termination::ArcLength | Termination::Event(_)),
        arc_length: traj.arc_length(),
        integrals: reports,
    })
}
