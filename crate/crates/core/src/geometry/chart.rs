use std::any::Any;
use std::fmt;
use std::sync::Arc;

use super::{ChartDomain, CurvatureJet, Family, PrincipalSurface, Vec3};
use crate::error::Result;
use crate::numeric;

type Scalar = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Vector = Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>;

/// User-supplied principal chart given by its fundamental-form coefficients.
///
/// Curvature partials are obtained by Richardson-extrapolated central
/// differences: step `1e-5 * span` for first derivatives and `1e-3 * span`
/// for second derivatives, where `span` is the coordinate range (capped at 1).
#[derive(Clone)]
pub struct FnChart {
    name: String,
    domain: ChartDomain,
    metric_e: Scalar,
    metric_g: Scalar,
    shape_e: Scalar,
    shape_g: Scalar,
    position: Vector,
    normal: Vector,
}

impl fmt::Debug for FnChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnChart")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl FnChart {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        domain: ChartDomain,
        metric_e: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        metric_g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        shape_e: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        shape_g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        position: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
        normal: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            metric_e: Arc::new(metric_e),
            metric_g: Arc::new(metric_g),
            shape_e: Arc::new(shape_e),
            shape_g: Arc::new(shape_g),
            position: Arc::new(position),
            normal: Arc::new(normal),
        }
    }

    fn k1(&self, u: f64, v: f64) -> f64 {
        (self.shape_e)(u, v) / (self.metric_e)(u, v)
    }

    fn k2(&self, u: f64, v: f64) -> f64 {
        (self.shape_g)(u, v) / (self.metric_g)(u, v)
    }
}

impl PrincipalSurface for FnChart {
    fn name(&self) -> &str {
        &self.name
    }

    fn family(&self) -> Family {
        Family::User
    }

    fn domain(&self) -> ChartDomain {
        self.domain
    }

    fn position(&self, u: f64, v: f64) -> Result<Vec3> {
        self.domain.check(u, v)?;
        Ok((self.position)(u, v))
    }

    fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        self.domain.check(u, v)?;
        Ok((self.normal)(u, v))
    }

    fn jet(&self, u: f64, v: f64) -> Result<CurvatureJet> {
        self.domain.check(u, v)?;
        let (su, sv) = (self.domain.u.span().min(1.0), self.domain.v.span().min(1.0));
        let (h1u, h1v) = (1e-5 * su, 1e-5 * sv);
        let (h2u, h2v) = (1e-3 * su, 1e-3 * sv);
        let k1_u_at = |v: f64| numeric::derivative(|t| self.k1(t, v), u, h1u);
        let k2_v_at = |u: f64| numeric::derivative(|t| self.k2(u, t), v, h1v);
        Ok(CurvatureJet {
            metric_e: (self.metric_e)(u, v),
            metric_g: (self.metric_g)(u, v),
            metric_e_v: numeric::derivative(|t| (self.metric_e)(u, t), v, h1v),
            metric_g_u: numeric::derivative(|t| (self.metric_g)(t, v), u, h1u),
            k1: self.k1(u, v),
            k2: self.k2(u, v),
            k1_u: k1_u_at(v),
            k1_v: numeric::derivative(|t| self.k1(u, t), v, h1v),
            k2_u: numeric::derivative(|t| self.k2(t, v), u, h1u),
            k2_v: k2_v_at(u),
            k1_uu: numeric::second_derivative(|t| self.k1(t, v), u, h2u),
            k2_vv: numeric::second_derivative(|t| self.k2(u, t), v, h2v),
            k1_uv: numeric::derivative(|t| numeric::derivative(|s| self.k1(s, t), u, h2u), v, h2v),
            k2_uv: numeric::derivative(|t| numeric::derivative(|s| self.k2(t, s), v, h2v), u, h2u),
        })
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
