//! Analytic surfaces in principal charts and the registry that builds them
//! from JSON specs.

pub mod cone;
pub mod cylinder;
pub mod quadric;
pub mod revolution;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cone::{make_cone, Cone, ConeSpec};
pub use cylinder::{make_cylinder, Cylinder, CylinderSpec};
pub use quadric::{make_quadric, Quadric, QuadricAxis, QuadricChart, QuadricKind, QuadricSpec};
pub use revolution::{make_revolution, Profile, Revolution, RevolutionSpec};

use crate::error::{Error, Result};
use crate::geometry::PrincipalSurface;

/// Explicit chart ranges; omitted axes fall back to the constructor default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Ranges {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<(f64, f64)>,
}

/// JSON surface description: `{type, parameters, ranges, branch, chart}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub ranges: Ranges,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<QuadricChart>,
}

impl SurfaceSpec {
    pub fn new(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            parameters: BTreeMap::new(),
            ranges: Ranges::default(),
            branch: None,
            chart: None,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn with_chart(mut self, chart: QuadricChart) -> Self {
        self.chart = Some(chart);
        self
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for key in self.parameters.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::InvalidParameters(format!(
                    "unknown parameter `{key}` for surface type `{}` (expected one of {allowed:?})",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.parameters.get(key).copied().unwrap_or(default)
    }
}

/// Builds one kind of surface from a spec.
pub trait SurfaceFactory: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// A surface description with every parameter at its default value.
    fn example(&self) -> SurfaceSpec;

    fn build(&self, spec: &SurfaceSpec) -> Result<Arc<dyn PrincipalSurface>>;
}

struct QuadricFactory {
    kind: QuadricKind,
    defaults: [f64; 3],
}

impl SurfaceFactory for QuadricFactory {
    fn name(&self) -> &'static str {
        self.kind.name()
    }

    fn summary(&self) -> &'static str {
        match self.kind {
            QuadricKind::Ellipsoid => "triaxial ellipsoid x²/a + y²/b + z²/c = 1, a > b > c > 0",
            QuadricKind::OneSheet => "hyperboloid of one sheet, a > b > 0 > c",
            QuadricKind::TwoSheet => "hyperboloid of two sheets, a > 0 > b > c",
        }
    }

    fn example(&self) -> SurfaceSpec {
        let [a, b, c] = self.defaults;
        SurfaceSpec::new(self.name()).with("a", a).with("b", b).with("c", c)
    }

    fn build(&self, spec: &SurfaceSpec) -> Result<Arc<dyn PrincipalSurface>> {
        spec.reject_unknown(&["a", "b", "c"])?;
        let [a, b, c] = self.defaults;
        let mut q = QuadricSpec::new(spec.param("a", a), spec.param("b", b), spec.param("c", c))?;
        if q.kind != self.kind {
            return Err(Error::InvalidParameters(format!(
                "parameters describe a {}, not a {}",
                q.kind.name(),
                self.kind.name()
            )));
        }
        if let Some(branch) = spec.branch {
            q = q.with_branch(branch);
        }
        q = q.with_chart(spec.chart.unwrap_or_default());
        Ok(Arc::new(make_quadric(q)?))
    }
}

struct SineRevolutionFactory;

impl SurfaceFactory for SineRevolutionFactory {
    fn name(&self) -> &'static str {
        "revolution"
    }

    fn summary(&self) -> &'static str {
        "canal surface of spheres on the z-axis, r(u) = base + amplitude sin(frequency u)"
    }

    fn example(&self) -> SurfaceSpec {
        SurfaceSpec::new("revolution")
            .with("base", 2.0)
            .with("amplitude", 0.3)
            .with("frequency", 1.0)
    }

    fn build(&self, spec: &SurfaceSpec) -> Result<Arc<dyn PrincipalSurface>> {
        spec.reject_unknown(&["base", "amplitude", "frequency"])?;
        let profile = Profile::Sine {
            base: spec.param("base", 2.0),
            amplitude: spec.param("amplitude", 0.3),
            frequency: spec.param("frequency", 1.0),
        };
        let u_range = spec.ranges.u.unwrap_or((-2.0 * PI, 2.0 * PI));
        Ok(Arc::new(make_revolution(RevolutionSpec { profile, u_range })?))
    }
}

struct TorusFactory;

impl SurfaceFactory for TorusFactory {
    fn name(&self) -> &'static str {
        "torus"
    }

    fn summary(&self) -> &'static str {
        "outer half of a torus of revolution as a canal surface, r(u) = tube + sqrt(radius² + u²)"
    }

    fn example(&self) -> SurfaceSpec {
        SurfaceSpec::new("torus").with("tube", 1.0).with("radius", 3.0)
    }

    fn build(&self, spec: &SurfaceSpec) -> Result<Arc<dyn PrincipalSurface>> {
        spec.reject_unknown(&["tube", "radius"])?;
        let profile = Profile::TorusArc {
            tube: spec.param("tube", 1.0),
            radius: spec.param("radius", 3.0),
        };
        let u_range = spec.ranges.u.unwrap_or((-4.0, 4.0));
        Ok(Arc::new(make_revolution(RevolutionSpec { profile, u_range })?))
    }
}

struct ConeFactory;

impl SurfaceFactory for ConeFactory {
    fn name(&self) -> &'static str {
        "cone"
    }

    fn summary(&self) -> &'static str {
        "cone v gamma(u) over a spherical curve with polar angle beta0 + eps sin(m u)"
    }

    fn example(&self) -> SurfaceSpec {
        SurfaceSpec::new("cone").with("beta0", 1.0).with("eps", 0.0).with("m", 1.0)
    }

    fn build(&self, spec: &SurfaceSpec) -> Result<Arc<dyn PrincipalSurface>> {
        spec.reject_unknown(&["beta0", "eps", "m"])?;
        Ok(Arc::new(make_cone(ConeSpec {
            beta0: spec.param("beta0", 1.0),
            eps: spec.param("eps", 0.0),
            m: spec.param("m", 1.0),
            v_range: spec.ranges.v.unwrap_or((0.5, 5.0)),
        })?))
    }
}

struct CylinderFactory;

impl SurfaceFactory for CylinderFactory {
    fn name(&self) -> &'static str {
        "cylinder"
    }

    fn summary(&self) -> &'static str {
        "cylinder over the ellipse (semi_x cos u, semi_y sin u); equal semi-axes give a circle"
    }

    fn example(&self) -> SurfaceSpec {
        SurfaceSpec::new("cylinder").with("semi_x", 2.0).with("semi_y", 2.0)
    }

    fn build(&self, spec: &SurfaceSpec) -> Result<Arc<dyn PrincipalSurface>> {
        spec.reject_unknown(&["semi_x", "semi_y", "radius"])?;
        let r = spec.param("radius", 2.0);
        let semi_x = spec.param("semi_x", r);
        Ok(Arc::new(make_cylinder(CylinderSpec {
            semi_x,
            semi_y: spec.param("semi_y", semi_x),
            v_range: spec.ranges.v.unwrap_or((-5.0, 5.0)),
        })?))
    }
}

/// Named surface constructors.
pub struct SurfaceRegistry {
    factories: BTreeMap<&'static str, Box<dyn SurfaceFactory>>,
}

impl Default for SurfaceRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl SurfaceRegistry {
    pub fn empty() -> Self {
        Self { factories: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(QuadricFactory { kind: QuadricKind::Ellipsoid, defaults: [3.0, 2.0, 1.0] }));
        r.register(Box::new(QuadricFactory { kind: QuadricKind::OneSheet, defaults: [3.0, 2.0, -1.0] }));
        r.register(Box::new(QuadricFactory { kind: QuadricKind::TwoSheet, defaults: [3.0, -1.0, -2.0] }));
        r.register(Box::new(SineRevolutionFactory));
        r.register(Box::new(TorusFactory));
        r.register(Box::new(ConeFactory));
        r.register(Box::new(CylinderFactory));
        r
    }

    /// Adds a factory, replacing any previous one with the same name.
    pub fn register(&mut self, factory: Box<dyn SurfaceFactory>) {
        self.factories.insert(factory.name(), factory);
    }

    pub fn get(&self, name: &str) -> Option<&dyn SurfaceFactory> {
        self.factories.get(name).map(|f| f.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn factories(&self) -> impl Iterator<Item = &dyn SurfaceFactory> + '_ {
        self.factories.values().map(|f| f.as_ref())
    }

    pub fn build(&self, spec: &SurfaceSpec) -> Result<Arc<dyn PrincipalSurface>> {
        let factory = self.get(&spec.kind).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::InvalidParameters(format!(
                "unknown surface type `{}` (known: {})",
                spec.kind,
                known.join(", ")
            ))
        })?;
        factory.build(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_builds() {
        let reg = SurfaceRegistry::builtin();
        for f in reg.factories() {
            let s = f.build(&f.example()).unwrap();
            assert_eq!(s.name(), f.name());
        }
    }

    #[test]
    fn unknown_type_and_parameter_are_reported() {
        let reg = SurfaceRegistry::builtin();
        let err = reg.build(&SurfaceSpec::new("paraboloid")).unwrap_err();
        assert!(err.to_string().contains("paraboloid"));
        let err = reg.build(&SurfaceSpec::new("ellipsoid").with("d", 1.0)).unwrap_err();
        assert!(err.to_string().contains("`d`"));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = SurfaceSpec::new("ellipsoid").with("a", 3.0).with_chart(QuadricChart::Angular);
        let text = serde_json::to_string(&spec).unwrap();
        let back: SurfaceSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        let missing: std::result::Result<SurfaceSpec, _> = serde_json::from_str(r#"{"parameters":{}}"#);
        assert!(missing.unwrap_err().to_string().contains("type"));
    }
}
