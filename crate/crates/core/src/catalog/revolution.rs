//! Surfaces of revolution as envelopes of spheres centred on the z-axis.
//!
//! The sphere centred at `(0, 0, u)` with radius `r(u)` touches the envelope
//! along a circle of latitude; `v` is the longitude. With `sin(beta) = r'`
//! the contact point is `r cos(beta) (cos v, sin v, 0) + (0, 0, u - r r')`.

use std::any::Any;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartDomain, CurvatureJet, Family, Interval, PrincipalSurface, Vec3};
use crate::taylor::Taylor;

/// Radius profiles of the sphere family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum Profile {
    /// `r(u) = base + amplitude sin(frequency u)`
    Sine { base: f64, amplitude: f64, frequency: f64 },
    /// `r(u) = tube + sqrt(radius² + u²)`: the outer half of a torus with
    /// tube radius `tube` around a circle of radius `radius`.
    TorusArc { tube: f64, radius: f64 },
}

impl Profile {
    pub fn constant(r: f64) -> Self {
        Profile::Sine { base: r, amplitude: 0.0, frequency: 1.0 }
    }

    pub fn eval(&self, u: Taylor) -> Taylor {
        match *self {
            Profile::Sine { base, amplitude, frequency } => (u * frequency).sin() * amplitude + base,
            Profile::TorusArc { tube, radius } => (u * u + radius * radius).sqrt() + tube,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevolutionSpec {
    #[serde(flatten)]
    pub profile: Profile,
    pub u_range: (f64, f64),
}

/// Profile derivatives `[r, r', r'', r''', r'''']` at `u`.
fn profile_derivatives(profile: &Profile, u: f64) -> [f64; 5] {
    let r = profile.eval(Taylor::variable(u));
    [0, 1, 2, 3, 4].map(|k| r.derivative(k))
}

#[derive(Debug, Clone)]
pub struct Revolution {
    spec: RevolutionSpec,
    name: &'static str,
}

pub fn make_revolution(spec: RevolutionSpec) -> Result<Revolution> {
    let (lo, hi) = spec.u_range;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameters(format!("bad u-range ({lo}, {hi})")));
    }
    let surface = Revolution {
        spec,
        name: match spec.profile {
            Profile::Sine { .. } => "revolution",
            Profile::TorusArc { .. } => "torus",
        },
    };
    // regularity along a fine sample of the range, endpoints included
    for i in 0..=400 {
        let u = lo + (hi - lo) * i as f64 / 400.0;
        let [r, r1, r2, ..] = profile_derivatives(&spec.profile, u);
        if r <= 0.0 {
            return Err(Error::InvalidParameters(format!("r({u}) = {r} is not positive")));
        }
        if r1.abs() >= 1.0 {
            return Err(Error::InvalidParameters(format!(
                "|r'({u})| = {} violates envelope regularity",
                r1.abs()
            )));
        }
        let f = 1.0 - r1 * r1 - r * r2;
        if f.abs() < 1e-9 {
            return Err(Error::ChartSingular {
                u,
                v: 0.0,
                reason: "1 - r'² - r r'' vanishes".into(),
            });
        }
    }
    Ok(surface)
}

impl Revolution {
    pub fn spec(&self) -> &RevolutionSpec {
        &self.spec
    }

    pub fn radius_derivatives(&self, u: f64) -> [f64; 5] {
        profile_derivatives(&self.spec.profile, u)
    }

    /// Distance `h(u) = r sqrt(1 - r'²)` from the axis.
    pub fn axis_distance(&self, u: f64) -> f64 {
        let [r, r1, ..] = self.radius_derivatives(u);
        r * (1.0 - r1 * r1).sqrt()
    }

    /// `R(u) = r'''(1 - r'²) + 3 r' r''²`, the numerator of `-dk1/du`.
    pub fn ridge_function(&self, u: f64) -> f64 {
        let [_, r1, r2, r3, _] = self.radius_derivatives(u);
        r3 * (1.0 - r1 * r1) + 3.0 * r1 * r2 * r2
    }

    /// `1 - r'² - r r''`
    pub fn chart_factor(&self, u: f64) -> f64 {
        let [r, r1, r2, ..] = self.radius_derivatives(u);
        1.0 - r1 * r1 - r * r2
    }

    /// Meridian curvature `k(u) = -r''/(1 - r'² - r r'')` as a Taylor series.
    fn meridian_curvature(&self, u: f64) -> Taylor {
        let r = self.spec.profile.eval(Taylor::variable(u));
        let r1 = r.differentiate();
        let r2 = r1.differentiate();
        let f = 1.0 - r1 * r1 - r * r2;
        -r2 / f
    }

    fn check(&self, u: f64, v: f64) -> Result<()> {
        self.domain().check(u, v)
    }
}

impl PrincipalSurface for Revolution {
    fn name(&self) -> &str {
        self.name
    }

    fn family(&self) -> Family {
        Family::Revolution
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            u: Interval::open(self.spec.u_range.0, self.spec.u_range.1),
            v: Interval::periodic(f64::NEG_INFINITY, f64::INFINITY, TAU),
        }
    }

    fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        self.check(u, v)?;
        let [r, r1, ..] = self.radius_derivatives(u);
        let cb = (1.0 - r1 * r1).sqrt();
        let (sv, cv) = v.sin_cos();
        Ok(Vec3::new(r * cb * cv, r * cb * sv, u - r * r1))
    }

    fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        self.check(u, v)?;
        let [_, r1, ..] = self.radius_derivatives(u);
        let cb = (1.0 - r1 * r1).sqrt();
        let (sv, cv) = v.sin_cos();
        Ok(Vec3::new(-cb * cv, -cb * sv, r1))
    }

    fn jet(&self, u: f64, v: f64) -> Result<CurvatureJet> {
        self.check(u, v)?;
        let [r, r1, r2, ..] = self.radius_derivatives(u);
        let w = 1.0 - r1 * r1;
        let f = w - r * r2;
        let k = self.meridian_curvature(u);
        Ok(CurvatureJet {
            metric_e: f * f / w,
            metric_g: r * r * w,
            metric_e_v: 0.0,
            metric_g_u: 2.0 * r * r1 * f,
            k1: k.value(),
            k2: 1.0 / r,
            k1_u: k.derivative(1),
            k1_v: 0.0,
            k2_u: -r1 / (r * r),
            k2_v: 0.0,
            k1_uu: k.derivative(2),
            k2_vv: 0.0,
            k1_uv: 0.0,
            k2_uv: 0.0,
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
