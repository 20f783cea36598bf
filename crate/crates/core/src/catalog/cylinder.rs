//! General cylinders `X(u, v) = c(u) + v e_z` over the planar directrix
//! `c(u) = (A cos u, B sin u)`. `A = B` gives the circular cylinder.

use std::any::Any;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartDomain, CurvatureJet, Family, Interval, PrincipalSurface, Vec3};
use crate::taylor::Taylor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub semi_x: f64,
    pub semi_y: f64,
    pub v_range: (f64, f64),
}

impl CylinderSpec {
    pub fn circular(radius: f64, v_range: (f64, f64)) -> Self {
        Self { semi_x: radius, semi_y: radius, v_range }
    }
}

#[derive(Debug, Clone)]
pub struct Cylinder {
    spec: CylinderSpec,
}

pub fn make_cylinder(spec: CylinderSpec) -> Result<Cylinder> {
    if !(spec.semi_x > 0.0 && spec.semi_y > 0.0) {
        return Err(Error::InvalidParameters("cylinder semi-axes must be positive".into()));
    }
    let (lo, hi) = spec.v_range;
    if !(hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameters(format!("bad v-range ({lo}, {hi})")));
    }
    Ok(Cylinder { spec })
}

impl Cylinder {
    pub fn spec(&self) -> &CylinderSpec {
        &self.spec
    }

    /// `(c', |c'|, curvature series)` at `u`.
    fn directrix(&self, u: f64) -> ([f64; 2], f64, Taylor) {
        let t = Taylor::variable(u);
        let (s, c) = t.sin_cos();
        let x = c * self.spec.semi_x;
        let y = s * self.spec.semi_y;
        let (x1, y1) = (x.differentiate(), y.differentiate());
        let (x2, y2) = (x1.differentiate(), y1.differentiate());
        let speed = (x1 * x1 + y1 * y1).sqrt();
        let kappa = (x1 * y2 - y1 * x2) / speed.powi(3);
        ([x1.value(), y1.value()], speed.value(), kappa)
    }

    /// Directrix curvature and its first two derivatives.
    pub fn directrix_curvature(&self, u: f64) -> [f64; 3] {
        let k = self.directrix(u).2;
        [k.value(), k.derivative(1), k.derivative(2)]
    }

    fn check(&self, u: f64, v: f64) -> Result<()> {
        self.domain().check(u, v)
    }
}

impl PrincipalSurface for Cylinder {
    fn name(&self) -> &str {
        "cylinder"
    }

    fn family(&self) -> Family {
        Family::Cylinder
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            u: Interval::periodic(f64::NEG_INFINITY, f64::INFINITY, TAU),
            v: Interval::open(self.spec.v_range.0, self.spec.v_range.1),
        }
    }

    fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        self.check(u, v)?;
        let (s, c) = u.sin_cos();
        Ok(Vec3::new(self.spec.semi_x * c, self.spec.semi_y * s, v))
    }

    fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        self.check(u, v)?;
        let ([dx, dy], w, _) = self.directrix(u);
        Ok(Vec3::new(-dy / w, dx / w, 0.0))
    }

    fn jet(&self, u: f64, v: f64) -> Result<CurvatureJet> {
        self.check(u, v)?;
        let (_, w, k) = self.directrix(u);
        Ok(CurvatureJet {
            metric_e: w * w,
            metric_g: 1.0,
            metric_e_v: 0.0,
            metric_g_u: 0.0,
            k1: k.value(),
            k2: 0.0,
            k1_u: k.derivative(1),
            k1_v: 0.0,
            k2_u: 0.0,
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
