//! Cones `X(u, v) = v gamma(u)` over a closed curve on the unit sphere.
//!
//! The directrix is `gamma(u) = (sin b cos u, sin b sin u, cos b)` with the
//! polar angle `b(u) = beta0 + eps sin(m u)`; `eps = 0` gives a cone of
//! revolution. The curvature of the `u`-lines is `k_g(u) / v` where `k_g` is
//! the geodesic curvature of the directrix on the sphere; rulings are flat.

use std::any::Any;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartDomain, CurvatureJet, Family, Interval, PrincipalSurface, Vec3};
use crate::taylor::{Taylor, TaylorVec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub beta0: f64,
    pub eps: f64,
    pub m: f64,
    /// Radial range `(v_min, v_max)`, `v_min > 0` keeps the apex out.
    pub v_range: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct Cone {
    spec: ConeSpec,
}

/// Directrix data: `gamma`, `|gamma'|` and the geodesic curvature series.
struct Directrix {
    gamma: [f64; 3],
    tangent: [f64; 3],
    speed: f64,
    kg: Taylor,
}

pub fn make_cone(spec: ConeSpec) -> Result<Cone> {
    let (lo, hi) = spec.v_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameters(format!(
            "cone radial range ({lo}, {hi}) must satisfy 0 < v_min < v_max"
        )));
    }
    let cone = Cone { spec };
    for i in 0..256 {
        let u = TAU * i as f64 / 256.0;
        let d = cone.directrix(u);
        let g = Vec3::from(d.gamma);
        if (g.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameters("directrix leaves the unit sphere".into()));
        }
        if d.speed < 1e-8 {
            return Err(Error::InvalidParameters("directrix is singular".into()));
        }
        if d.kg.value().abs() < 1e-9 {
            return Err(Error::InvalidParameters(format!(
                "directrix has a geodesic inflection near u = {u}; the cone is flat there"
            )));
        }
    }
    Ok(cone)
}

impl Cone {
    pub fn spec(&self) -> &ConeSpec {
        &self.spec
    }

    fn directrix(&self, u: f64) -> Directrix {
        let t = Taylor::variable(u);
        let b = (t * self.spec.m).sin() * self.spec.eps + self.spec.beta0;
        let (sb, cb) = b.sin_cos();
        let (su, cu) = t.sin_cos();
        let gamma = TaylorVec3([sb * cu, sb * su, cb]);
        let d1 = gamma.differentiate();
        let d2 = d1.differentiate();
        let speed = d1.dot(&d1).sqrt();
        let kg = d2.dot(&gamma.cross(&d1)) / speed.powi(3);
        Directrix {
            gamma: gamma.values(),
            tangent: d1.values(),
            speed: speed.value(),
            kg,
        }
    }

    /// Geodesic curvature of the directrix and its first two derivatives.
    pub fn directrix_curvature(&self, u: f64) -> [f64; 3] {
        let kg = self.directrix(u).kg;
        [kg.value(), kg.derivative(1), kg.derivative(2)]
    }

    fn check(&self, u: f64, v: f64) -> Result<()> {
        self.domain().check(u, v)
    }
}

impl PrincipalSurface for Cone {
    fn name(&self) -> &str {
        "cone"
    }

    fn family(&self) -> Family {
        Family::Cone
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            u: Interval::periodic(f64::NEG_INFINITY, f64::INFINITY, TAU),
            v: Interval::open(self.spec.v_range.0, self.spec.v_range.1),
        }
    }

    fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        self.check(u, v)?;
        Ok(Vec3::from(self.directrix(u).gamma) * v)
    }

    fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        self.check(u, v)?;
        let d = self.directrix(u);
        Ok(Vec3::from(d.gamma).cross(&Vec3::from(d.tangent)) / d.speed)
    }

    fn jet(&self, u: f64, v: f64) -> Result<CurvatureJet> {
        self.check(u, v)?;
        let d = self.directrix(u);
        let w2 = d.speed * d.speed;
        let (kg, kg1, kg2) = (d.kg.value(), d.kg.derivative(1), d.kg.derivative(2));
        Ok(CurvatureJet {
            metric_e: v * v * w2,
            metric_g: 1.0,
            metric_e_v: 2.0 * v * w2,
            metric_g_u: 0.0,
            k1: kg / v,
            k2: 0.0,
            k1_u: kg1 / v,
            k1_v: -kg / (v * v),
            k2_u: 0.0,
            k2_v: 0.0,
            k1_uu: kg2 / v,
            k2_vv: 0.0,
            k1_uv: -kg1 / (v * v),
            k2_uv: 0.0,
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
