use std::any::Any;
use std::sync::Arc;

use super::{ChartDomain, CurvatureJet, Family, PrincipalSurface, Vec3};
use crate::error::Result;

/// Ambient dilation `x -> s x` of another surface, in the same chart.
/// Metric coefficients scale by `s^2`, curvatures by `1/s`.
#[derive(Debug, Clone)]
pub struct Dilated {
    inner: Arc<dyn PrincipalSurface>,
    factor: f64,
}

impl Dilated {
    pub fn new(inner: Arc<dyn PrincipalSurface>, factor: f64) -> Self {
        Self { inner, factor }
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

impl PrincipalSurface for Dilated {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn family(&self) -> Family {
        self.inner.family()
    }

    fn domain(&self) -> ChartDomain {
        self.inner.domain()
    }

    fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        Ok(self.inner.position(u, v)? * self.factor)
    }

    fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        self.inner.normal(u, v)
    }

    fn jet(&self, u: f64, v: f64) -> Result<CurvatureJet> {
        let j = self.inner.jet(u, v)?;
        let s = self.factor;
        let s2 = s * s;
        Ok(CurvatureJet {
            metric_e: j.metric_e * s2,
            metric_g: j.metric_g * s2,
            metric_e_v: j.metric_e_v * s2,
            metric_g_u: j.metric_g_u * s2,
            k1: j.k1 / s,
            k2: j.k2 / s,
            k1_u: j.k1_u / s,
            k1_v: j.k1_v / s,
            k2_u: j.k2_u / s,
            k2_v: j.k2_v / s,
            k1_uu: j.k1_uu / s,
            k2_vv: j.k2_vv / s,
            k1_uv: j.k1_uv / s,
            k2_uv: j.k2_uv / s,
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
