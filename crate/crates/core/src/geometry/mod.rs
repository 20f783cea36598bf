//! Principal-chart surfaces and the scalar invariants built on them.
//!
//! Every surface is presented in curvature-line coordinates `(u, v)`. The
//! `u`-lines (`v = const`) form the foliation P1 with principal curvature
//! `k1`, the `v`-lines form P2 with `k2`. Angles along curves are measured
//! from P1.

mod chart;
mod dilate;

pub use chart::FnChart;
pub use dilate::Dilated;

use std::any::Any;
use std::fmt;

use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

pub type Vec3 = Vector3<f64>;

/// Surface families with closed-form first integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Quadric,
    Revolution,
    Cone,
    Cylinder,
    User,
}

/// The two principal foliations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Foliation {
    P1,
    P2,
}

/// One chart coordinate range. Infinite bounds are allowed; a period marks
/// coordinates that wrap around the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub period: Option<f64>,
}

impl Interval {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, period: None }
    }

    pub fn periodic(lo: f64, hi: f64, period: f64) -> Self {
        Self { lo, hi, period: Some(period) }
    }

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && x > self.lo && x < self.hi
    }

    /// Distance to the nearest finite end relative to the span; infinite when
    /// both ends are unbounded.
    pub fn margin(&self, x: f64) -> f64 {
        ((x - self.lo).min(self.hi - x)) / self.span()
    }

    /// Finite length, or 1 for unbounded ranges.
    pub fn span(&self) -> f64 {
        let s = self.hi - self.lo;
        if s.is_finite() {
            s
        } else {
            1.0
        }
    }

    pub fn midpoint(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartDomain {
    pub u: Interval,
    pub v: Interval,
}

impl ChartDomain {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u.contains(u) && self.v.contains(v)
    }

    pub fn margin(&self, u: f64, v: f64) -> f64 {
        self.u.margin(u).min(self.v.margin(v))
    }

    pub fn check(&self, u: f64, v: f64) -> Result<()> {
        if self.contains(u, v) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { u, v })
        }
    }
}

/// Metric and curvature data at a chart point, with the partial derivatives
/// the Darboux equations and ridge classification consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureJet {
    /// First fundamental form coefficient `E`.
    pub metric_e: f64,
    /// First fundamental form coefficient `G`.
    pub metric_g: f64,
    /// `dE/dv`
    pub metric_e_v: f64,
    /// `dG/du`
    pub metric_g_u: f64,
    pub k1: f64,
    pub k2: f64,
    pub k1_u: f64,
    pub k1_v: f64,
    pub k2_u: f64,
    pub k2_v: f64,
    pub k1_uu: f64,
    pub k2_vv: f64,
    pub k1_uv: f64,
    pub k2_uv: f64,
}

impl CurvatureJet {
    /// Second fundamental form coefficient `e = k1 E`.
    pub fn shape_e(&self) -> f64 {
        self.k1 * self.metric_e
    }

    /// Second fundamental form coefficient `g = k2 G`.
    pub fn shape_g(&self) -> f64 {
        self.k2 * self.metric_g
    }

    /// `X1(k1) = k1_u / sqrt(E)`
    pub fn x1_k1(&self) -> f64 {
        self.k1_u / self.metric_e.sqrt()
    }

    /// `X2(k2) = k2_v / sqrt(G)`
    pub fn x2_k2(&self) -> f64 {
        self.k2_v / self.metric_g.sqrt()
    }

    /// Geodesic curvatures of the coordinate curves.
    pub fn geodesic_curvatures(&self) -> (f64, f64) {
        let (e, g) = (self.metric_e, self.metric_g);
        let kg1 = -self.metric_e_v / (2.0 * e * g.sqrt());
        let kg2 = self.metric_g_u / (2.0 * g * e.sqrt());
        (kg1, kg2)
    }

    pub fn umbilic_gap(&self) -> f64 {
        (self.k1 - self.k2).abs()
    }

    /// Rejects points too close to an umbilic.
    pub fn require_non_umbilic(&self, u: f64, v: f64) -> Result<()> {
        let gap = self.umbilic_gap();
        let scale = self.k1.abs().max(self.k2.abs()).max(1.0);
        if gap < 1e-12 * scale || !gap.is_finite() {
            Err(Error::UmbilicProximity { u, v, gap })
        } else {
            Ok(())
        }
    }
}

/// A surface parametrized by a principal chart.
pub trait PrincipalSurface: Send + Sync + fmt::Debug {
    /// Registry name of the surface constructor.
    fn name(&self) -> &str;

    fn family(&self) -> Family;

    fn domain(&self) -> ChartDomain;

    /// Ambient embedding.
    fn position(&self, u: f64, v: f64) -> Result<Vec3>;

    /// Unit normal that orients `k1`, `k2`.
    fn normal(&self, u: f64, v: f64) -> Result<Vec3>;

    fn jet(&self, u: f64, v: f64) -> Result<CurvatureJet>;

    fn as_any(&self) -> &dyn Any;
}

/// Principal curvatures `k1 = e/E`, `k2 = g/G`.
pub fn principal_curvatures(surface: &dyn PrincipalSurface, u: f64, v: f64) -> Result<(f64, f64)> {
    let jet = surface.jet(u, v)?;
    jet.require_non_umbilic(u, v)?;
    Ok((jet.k1, jet.k2))
}

/// Darboux-frame scalars of a tangent direction at angle `alpha` from P1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameScalars {
    pub k1: f64,
    pub k2: f64,
    pub k_n: f64,
    pub tau_g: f64,
    pub kg1: f64,
    pub kg2: f64,
    pub mu: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl FrameScalars {
    pub fn from_jet(jet: &CurvatureJet, alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        let (kg1, kg2) = jet.geodesic_curvatures();
        let mu = 0.5 * (jet.k1 - jet.k2);
        let (theta1, theta2) = conformal_curvatures(jet);
        Self {
            k1: jet.k1,
            k2: jet.k2,
            k_n: jet.k1 * c * c + jet.k2 * s * s,
            tau_g: (jet.k2 - jet.k1) * c * s,
            kg1,
            kg2,
            mu,
            theta1,
            theta2,
        }
    }
}

pub fn frame_scalars(surface: &dyn PrincipalSurface, u: f64, v: f64, alpha: f64) -> Result<FrameScalars> {
    let jet = surface.jet(u, v)?;
    jet.require_non_umbilic(u, v)?;
    Ok(FrameScalars::from_jet(&jet, alpha))
}

/// Conformal principal curvatures `theta_i = X_i(k_i) / mu^2`.
///
/// The alternative normalization `4 X_i(k_i) / (k1 - k2)^2` is the same
/// number since `mu = (k1 - k2) / 2`.
pub fn conformal_curvatures(jet: &CurvatureJet) -> (f64, f64) {
    let mu = 0.5 * (jet.k1 - jet.k2);
    let mu2 = mu * mu;
    (jet.x1_k1() / mu2, jet.x2_k2() / mu2)
}

/// Codazzi equations in a principal chart.
pub fn codazzi_residuals(surface: &dyn PrincipalSurface, u: f64, v: f64) -> Result<(f64, f64)> {
    let j = surface.jet(u, v)?;
    let res1 = j.k1_v - j.metric_e_v / (2.0 * j.metric_e) * (j.k2 - j.k1);
    let res2 = j.k2_u - j.metric_g_u / (2.0 * j.metric_g) * (j.k1 - j.k2);
    Ok((res1, res2))
}

/// Relative Codazzi defect, used as a data-integrity gate on charts.
pub fn codazzi_gate(surface: &dyn PrincipalSurface, u: f64, v: f64, tol: f64) -> Result<f64> {
    let j = surface.jet(u, v)?;
    let (r1, r2) = codazzi_residuals(surface, u, v)?;
    let scale = (j.k1_v.abs() + j.k2_u.abs() + (j.k1 - j.k2).abs()).max(1e-300);
    let rel = r1.abs().max(r2.abs()) / scale;
    if rel > tol {
        return Err(Error::ChartSingular {
            u,
            v,
            reason: format!("Codazzi residual {rel:e} exceeds {tol:e}"),
        });
    }
    Ok(rel)
}

fn fd_step(interval: &Interval, scale: f64) -> f64 {
    scale * interval.span().min(1.0)
}

/// Maximum component residual of the bracket identity
/// `[xi1, xi2] = -(theta2 xi1 + theta1 xi2) / 2` with `xi_i = X_i / mu`.
/// The left side is built from finite differences of the field coefficients.
pub fn conformal_fields_bracket_check(surface: &dyn PrincipalSurface, u: f64, v: f64) -> Result<f64> {
    let jet = surface.jet(u, v)?;
    jet.require_non_umbilic(u, v)?;
    let dom = surface.domain();
    let f = |u: f64, v: f64| -> f64 {
        surface
            .jet(u, v)
            .map(|j| 2.0 / ((j.k1 - j.k2) * j.metric_e.sqrt()))
            .unwrap_or(f64::NAN)
    };
    let g = |u: f64, v: f64| -> f64 {
        surface
            .jet(u, v)
            .map(|j| 2.0 / ((j.k1 - j.k2) * j.metric_g.sqrt()))
            .unwrap_or(f64::NAN)
    };
    let hu = fd_step(&dom.u, 1e-3);
    let hv = fd_step(&dom.v, 1e-3);
    let f_v = numeric::derivative(|t| f(u, t), v, hv);
    let g_u = numeric::derivative(|t| g(t, v), u, hu);
    let (f0, g0) = (f(u, v), g(u, v));
    let (theta1, theta2) = conformal_curvatures(&jet);
    // [f d_u, g d_v] = f g_u d_v - g f_v d_u
    let lhs = (-g0 * f_v, f0 * g_u);
    let rhs = (-0.5 * theta2 * f0, -0.5 * theta1 * g0);
    let res = (lhs.0 - rhs.0).abs().max((lhs.1 - rhs.1).abs());
    if !res.is_finite() {
        return Err(Error::NeighborhoodExit(format!(
            "bracket stencil at ({u}, {v}) leaves the chart"
        )));
    }
    Ok(res)
}

/// Fundamental forms and principal curvatures computed from the embedding
/// alone, by finite differences of `position` and the declared normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedForms {
    pub metric: [f64; 3],
    pub shape: [f64; 3],
    /// Shape-operator eigenvalues; the first is the one whose eigenvector is
    /// closest to the `u` direction.
    pub curvatures: (f64, f64),
}

impl EmbeddedForms {
    /// Relative principal-chart defects `|F| / sqrt(EG)` and
    /// `|f| / max(|e|, |g|)`.
    pub fn chart_defects(&self) -> (f64, f64) {
        let [e, f, g] = self.metric;
        let [l, m, n] = self.shape;
        let df = f.abs() / (e * g).sqrt();
        let dm = m.abs() / l.abs().max(n.abs()).max(1e-300);
        (df, dm)
    }
}

pub fn embedded_forms(surface: &dyn PrincipalSurface, u: f64, v: f64) -> Result<EmbeddedForms> {
    let dom = surface.domain();
    let hu = fd_step(&dom.u, 1e-3);
    let hv = fd_step(&dom.v, 1e-3);
    let x = |du: f64, dv: f64| surface.position(u + du, v + dv);
    let d1 = |h: f64, axis: usize| -> Result<Vec3> {
        let (a, b) = if axis == 0 { (h, 0.0) } else { (0.0, h) };
        Ok((x(a, b)? - x(-a, -b)?) / (2.0 * h))
    };
    let d2 = |h: f64, axis: usize| -> Result<Vec3> {
        let (a, b) = if axis == 0 { (h, 0.0) } else { (0.0, h) };
        Ok((x(a, b)? - 2.0 * x(0.0, 0.0)? + x(-a, -b)?) / (h * h))
    };
    let mixed = |hu: f64, hv: f64| -> Result<Vec3> {
        Ok((x(hu, hv)? - x(hu, -hv)? - x(-hu, hv)? + x(-hu, -hv)?) / (4.0 * hu * hv))
    };
    let rich = |a: Vec3, b: Vec3| (4.0 * b - a) / 3.0;
    let xu = rich(d1(hu, 0)?, d1(0.5 * hu, 0)?);
    let xv = rich(d1(hv, 1)?, d1(0.5 * hv, 1)?);
    let xuu = rich(d2(hu, 0)?, d2(0.5 * hu, 0)?);
    let xvv = rich(d2(hv, 1)?, d2(0.5 * hv, 1)?);
    let xuv = rich(mixed(hu, hv)?, mixed(0.5 * hu, 0.5 * hv)?);
    let n = surface.normal(u, v)?;
    let (e, f, g) = (xu.dot(&xu), xu.dot(&xv), xv.dot(&xv));
    let (l, m, nn) = (xuu.dot(&n), xuv.dot(&n), xvv.dot(&n));
    let first = Matrix2::new(e, f, f, g);
    let second = Matrix2::new(l, m, m, nn);
    let inv = first.try_inverse().ok_or(Error::ChartSingular {
        u,
        v,
        reason: "degenerate first fundamental form".into(),
    })?;
    let w = inv * second;
    let tr = w.trace();
    let det = w.determinant();
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let (ka, kb) = (0.5 * tr + disc, 0.5 * tr - disc);
    // Rayleigh quotient along the u direction decides the labeling
    let along_u = l / e;
    let curvatures = if (ka - along_u).abs() <= (kb - along_u).abs() {
        (ka, kb)
    } else {
        (kb, ka)
    };
    Ok(EmbeddedForms {
        metric: [e, f, g],
        shape: [l, m, nn],
        curvatures,
    })
}

/// Normal curvature of the direction at angle `alpha` from P1, measured in
/// ambient space as `II(w, w) / I(w, w)` from finite-difference forms.
pub fn ambient_normal_curvature(surface: &dyn PrincipalSurface, u: f64, v: f64, alpha: f64) -> Result<f64> {
    let forms = embedded_forms(surface, u, v)?;
    let [e, f, g] = forms.metric;
    let [l, m, n] = forms.shape;
    let (s, c) = alpha.sin_cos();
    let (du, dv) = (c / e.sqrt(), s / g.sqrt());
    let two = l * du * du + 2.0 * m * du * dv + n * dv * dv;
    let one = e * du * du + 2.0 * f * du * dv + g * dv * dv;
    Ok(two / one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet() -> CurvatureJet {
        CurvatureJet {
            metric_e: 2.0,
            metric_g: 3.0,
            metric_e_v: 0.5,
            metric_g_u: -0.25,
            k1: 0.4,
            k2: 1.1,
            k1_u: 0.3,
            k1_v: 0.1,
            k2_u: 0.2,
            k2_v: -0.6,
            k1_uu: 1.0,
            k2_vv: 2.0,
            k1_uv: 0.0,
            k2_uv: 0.0,
        }
    }

    #[test]
    fn frame_scalars_at_principal_and_diagonal_angles() {
        let j = jet();
        let f0 = FrameScalars::from_jet(&j, 0.0);
        assert_eq!(f0.k_n, j.k1);
        assert_eq!(f0.tau_g, 0.0);
        let f90 = FrameScalars::from_jet(&j, std::f64::consts::FRAC_PI_2);
        assert!(f90.tau_g.abs() < 1e-16);
        let f45 = FrameScalars::from_jet(&j, std::f64::consts::FRAC_PI_4);
        assert!((f45.tau_g - 0.5 * (j.k2 - j.k1)).abs() < 1e-15);
    }

    #[test]
    fn umbilic_rejection() {
        let mut j = jet();
        j.k2 = j.k1;
        assert!(matches!(
            j.require_non_umbilic(0.0, 0.0),
            Err(Error::UmbilicProximity { .. })
        ));
    }

    #[test]
    fn theta_normalizations_agree() {
        let j = jet();
        let (t1, t2) = conformal_curvatures(&j);
        let d2 = (j.k1 - j.k2).powi(2);
        assert!((t1 - 4.0 * j.x1_k1() / d2).abs() < 1e-14);
        assert!((t2 - 4.0 * j.x2_k2() / d2).abs() < 1e-14);
    }

    #[test]
    fn periodic_intervals_contain_everything_finite() {
        let i = Interval::periodic(f64::NEG_INFINITY, f64::INFINITY, 1.0);
        assert!(i.contains(1e6));
        assert!(!i.contains(f64::NAN));
        assert_eq!(i.span(), 1.0);
    }
}
