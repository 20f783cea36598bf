//! Central quadrics in confocal principal coordinates.
//!
//! A point of the quadric `x²/a + y²/b + z²/c = 1` is addressed by the two
//! other confocal parameters `(u, v)` through it, with `u > v`. `k1 = s/u` and
//! `k2 = s/v` where `s = sqrt(abc/(uv))`.
//!
//! Two charts are offered. The confocal chart uses `(u, v)` directly and
//! covers one octant. The angular chart uniformizes each bounded band as
//! `u = m + h cos(phi)` and each half-line `v < p` as `v = p - psi²`; square
//! roots of the distances to band endpoints become signed trigonometric
//! factors, so the chart crosses the coordinate planes (where the ridges of
//! the quadric lie) and covers every octant.

use std::any::Any;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartDomain, CurvatureJet, Family, Interval, PrincipalSurface, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadricKind {
    Ellipsoid,
    OneSheet,
    TwoSheet,
}

impl QuadricKind {
    pub fn name(&self) -> &'static str {
        match self {
            QuadricKind::Ellipsoid => "ellipsoid",
            QuadricKind::OneSheet => "one-sheet",
            QuadricKind::TwoSheet => "two-sheet",
        }
    }

    /// Infers the kind from the sign pattern of the parameters.
    pub fn classify(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > b && b > c) {
            return Err(Error::InvalidParameters(format!(
                "quadric parameters must satisfy a > b > c, got ({a}, {b}, {c})"
            )));
        }
        if c > 0.0 {
            Ok(QuadricKind::Ellipsoid)
        } else if b > 0.0 && c < 0.0 {
            Ok(QuadricKind::OneSheet)
        } else if a > 0.0 && b < 0.0 {
            Ok(QuadricKind::TwoSheet)
        } else {
            Err(Error::InvalidParameters(format!(
                "({a}, {b}, {c}) is not a triaxial central quadric"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadricChart {
    #[default]
    Confocal,
    Angular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadricSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub kind: QuadricKind,
    /// Octant signs of `(x, y, z)`.
    pub branch: [f64; 3],
    pub chart: QuadricChart,
}

impl QuadricSpec {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Ok(Self {
            a,
            b,
            c,
            kind: QuadricKind::classify(a, b, c)?,
            branch: [1.0; 3],
            chart: QuadricChart::Confocal,
        })
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(a, b, c)?.expect(QuadricKind::Ellipsoid)
    }

    pub fn one_sheet(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(a, b, c)?.expect(QuadricKind::OneSheet)
    }

    pub fn two_sheet(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(a, b, c)?.expect(QuadricKind::TwoSheet)
    }

    fn expect(self, kind: QuadricKind) -> Result<Self> {
        if self.kind == kind {
            Ok(self)
        } else {
            Err(Error::InvalidParameters(format!(
                "({}, {}, {}) is a {} quadric, not {}",
                self.a,
                self.b,
                self.c,
                self.kind.name(),
                kind.name()
            )))
        }
    }

    pub fn with_chart(mut self, chart: QuadricChart) -> Self {
        self.chart = chart;
        self
    }

    pub fn with_branch(mut self, branch: [f64; 3]) -> Self {
        self.branch = branch;
        self
    }
}

/// One of the two chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadricAxis {
    U,
    V,
}

/// Reparametrization of one confocal coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
enum AxisMap {
    Identity { lo: f64, hi: f64 },
    /// `w = m + h cos t` on the band `(lo, hi)`.
    Cos { lo: f64, hi: f64 },
    /// `w = top - t²` on the half-line `(-inf, top)`.
    Square { top: f64 },
}

impl AxisMap {
    /// `(w, dw/dt, d²w/dt²)`
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            AxisMap::Identity { .. } => (t, 1.0, 0.0),
            AxisMap::Cos { lo, hi } => {
                let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                let (s, c) = t.sin_cos();
                (m + h * c, -h * s, -h * c)
            }
            AxisMap::Square { top } => (top - t * t, -2.0 * t, -2.0),
        }
    }

    fn endpoints(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            AxisMap::Identity { .. } => (None, None),
            AxisMap::Cos { lo, hi } => (Some(lo), Some(hi)),
            AxisMap::Square { top } => (None, Some(top)),
        }
    }

    /// `(dw/dt)² / prod over absorbed endpoints p of (w - p)`.
    fn fold(&self) -> f64 {
        match self {
            AxisMap::Identity { .. } => 1.0,
            AxisMap::Cos { .. } => -1.0,
            AxisMap::Square { .. } => -4.0,
        }
    }

    fn is_endpoint(&self, p: f64) -> bool {
        let (lo, hi) = self.endpoints();
        lo == Some(p) || hi == Some(p)
    }

    /// Signed square root of `|w - p|` for an absorbed endpoint `p`.
    fn signed_root(&self, t: f64, p: f64) -> f64 {
        match *self {
            AxisMap::Cos { lo, hi } => {
                let s = (hi - lo).sqrt();
                if p == lo {
                    s * (0.5 * t).cos()
                } else {
                    s * (0.5 * t).sin()
                }
            }
            AxisMap::Square { .. } => t,
            AxisMap::Identity { .. } => unreachable!("identity map has no absorbed endpoints"),
        }
    }

    fn interval(&self) -> Interval {
        match *self {
            AxisMap::Identity { lo, hi } => Interval::open(lo, hi),
            AxisMap::Cos { .. } => Interval::periodic(f64::NEG_INFINITY, f64::INFINITY, 4.0 * PI),
            AxisMap::Square { .. } => Interval::open(f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Principal-branch inverse: `t` in `[0, pi]` for bands, `t >= 0` for
    /// half-lines.
    fn inverse(&self, w: f64) -> f64 {
        match *self {
            AxisMap::Identity { .. } => w,
            AxisMap::Cos { lo, hi } => {
                let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                ((w - m) / h).clamp(-1.0, 1.0).acos()
            }
            AxisMap::Square { top } => (top - w).max(0.0).sqrt(),
        }
    }
}

/// A triaxial quadric in a principal chart.
#[derive(Debug, Clone)]
pub struct Quadric {
    spec: QuadricSpec,
    p: [f64; 3],
    u_band: (f64, f64),
    v_band: (f64, f64),
    u_map: AxisMap,
    v_map: AxisMap,
}

pub fn make_quadric(spec: QuadricSpec) -> Result<Quadric> {
    let kind = QuadricKind::classify(spec.a, spec.b, spec.c)?;
    if kind != spec.kind {
        return Err(Error::InvalidParameters(format!(
            "parameters ({}, {}, {}) describe a {}, requested {}",
            spec.a,
            spec.b,
            spec.c,
            kind.name(),
            spec.kind.name()
        )));
    }
    if spec.branch.iter().any(|s| s.abs() != 1.0) {
        return Err(Error::InvalidParameters("branch signs must be +1 or -1".into()));
    }
    let (a, b, c) = (spec.a, spec.b, spec.c);
    let (u_band, v_band) = match kind {
        QuadricKind::Ellipsoid => ((b, a), (c, b)),
        QuadricKind::OneSheet => ((b, a), (f64::NEG_INFINITY, c)),
        QuadricKind::TwoSheet => ((c, b), (f64::NEG_INFINITY, c)),
    };
    let (u_map, v_map) = match spec.chart {
        QuadricChart::Confocal => (
            AxisMap::Identity { lo: u_band.0, hi: u_band.1 },
            AxisMap::Identity { lo: v_band.0, hi: v_band.1 },
        ),
        QuadricChart::Angular => (
            AxisMap::Cos { lo: u_band.0, hi: u_band.1 },
            if v_band.0.is_finite() {
                AxisMap::Cos { lo: v_band.0, hi: v_band.1 }
            } else {
                AxisMap::Square { top: v_band.1 }
            },
        ),
    };
    Ok(Quadric {
        spec,
        p: [a, b, c],
        u_band,
        v_band,
        u_map,
        v_map,
    })
}

impl Quadric {
    pub fn spec(&self) -> &QuadricSpec {
        &self.spec
    }

    pub fn kind(&self) -> QuadricKind {
        self.spec.kind
    }

    pub fn params(&self) -> [f64; 3] {
        self.p
    }

    pub fn chart(&self) -> QuadricChart {
        self.spec.chart
    }

    /// Range of the confocal coordinate `u`.
    pub fn u_band(&self) -> (f64, f64) {
        self.u_band
    }

    /// Range of the confocal coordinate `v` (lower end may be infinite).
    pub fn v_band(&self) -> (f64, f64) {
        self.v_band
    }

    /// `H(x) = (x - a)(x - b)(x - c)`
    pub fn h_poly(&self, x: f64) -> f64 {
        let [a, b, c] = self.p;
        (x - a) * (x - b) * (x - c)
    }

    fn rest(&self, map: &AxisMap, w: f64) -> f64 {
        self.p
            .iter()
            .filter(|p| !map.is_endpoint(**p))
            .map(|p| w - p)
            .product()
    }

    /// Confocal parameters of a chart point.
    pub fn confocal(&self, s: f64, t: f64) -> (f64, f64) {
        (self.u_map.eval(s).0, self.v_map.eval(t).0)
    }

    /// Chart point with the given confocal parameters (principal branch).
    pub fn chart_point(&self, u: f64, v: f64) -> (f64, f64) {
        (self.u_map.inverse(u), self.v_map.inverse(v))
    }

    /// Chart coordinates of the band endpoints of `u` (resp. `v`): the chart
    /// lines on which the coordinate-plane ridges lie.
    pub fn boundary_lines(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let lines = |map: &AxisMap, band: (f64, f64)| -> Vec<(f64, f64)> {
            let mut out = Vec::new();
            if band.0.is_finite() {
                out.push((band.0, map.inverse(band.0)));
            }
            out.push((band.1, map.inverse(band.1)));
            out
        };
        (lines(&self.u_map, self.u_band), lines(&self.v_map, self.v_band))
    }

    fn axis_map(&self, axis: QuadricAxis) -> &AxisMap {
        match axis {
            QuadricAxis::U => &self.u_map,
            QuadricAxis::V => &self.v_map,
        }
    }

    /// Confocal value of one chart coordinate.
    pub fn axis_value(&self, axis: QuadricAxis, t: f64) -> f64 {
        self.axis_map(axis).eval(t).0
    }

    /// `dw/dt` of one chart coordinate.
    pub fn axis_slope(&self, axis: QuadricAxis, t: f64) -> f64 {
        self.axis_map(axis).eval(t).1
    }

    /// Chart coordinate (principal branch) of a confocal value.
    pub fn axis_inverse(&self, axis: QuadricAxis, w: f64) -> f64 {
        self.axis_map(axis).inverse(w)
    }

    /// `|dw/dt| / sqrt|H(w)|` as `m(t)` with `w = w(t)`; bounded at the band
    /// ends in the angular chart.
    pub fn axis_measure(&self, axis: QuadricAxis, t: f64) -> f64 {
        let map = self.axis_map(axis);
        let w = map.eval(t).0;
        match map {
            AxisMap::Identity { .. } => 1.0 / self.h_poly(w).abs().sqrt(),
            _ => (map.fold().abs() / self.rest(map, w).abs()).sqrt(),
        }
    }

    /// `sqrt|w(t) - p|`, signed smoothly through `p` when `p` is an end of
    /// the band absorbed by the chart.
    pub fn axis_signed_root(&self, axis: QuadricAxis, t: f64, p: f64) -> f64 {
        let map = self.axis_map(axis);
        self.root_factor(map, t, map.eval(t).0, p)
    }

    /// Period of the chart coordinate, when it closes up.
    pub fn axis_period(&self, axis: QuadricAxis) -> Option<f64> {
        self.axis_map(axis).interval().period
    }

    /// Umbilic points (none on the one-sheeted hyperboloid).
    pub fn umbilics(&self) -> Vec<Vec3> {
        let [a, b, c] = self.p;
        let pts = match self.kind() {
            QuadricKind::Ellipsoid => {
                let x = (a * (a - b) / (a - c)).sqrt();
                let z = (c * (b - c) / (a - c)).sqrt();
                [(x, 0.0, z), (x, 0.0, -z), (-x, 0.0, z), (-x, 0.0, -z)]
            }
            QuadricKind::TwoSheet => {
                let x = (a * (a - c) / (a - b)).sqrt();
                let y = (b * (b - c) / (b - a)).sqrt();
                [(x, y, 0.0), (x, -y, 0.0), (-x, y, 0.0), (-x, -y, 0.0)]
            }
            QuadricKind::OneSheet => return Vec::new(),
        };
        pts.iter().map(|&(x, y, z)| Vec3::new(x, y, z)).collect()
    }

    /// Confocal-chart jet (derivatives with respect to `u`, `v`).
    pub fn confocal_jet(&self, u: f64, v: f64) -> Result<CurvatureJet> {
        let id = AxisMap::Identity { lo: 0.0, hi: 0.0 };
        self.raw_jet(u, v, &id, u, &id, v)
    }

    fn raw_jet(&self, u: f64, v: f64, um: &AxisMap, s: f64, vm: &AxisMap, t: f64) -> Result<CurvatureJet> {
        let [a, b, c] = self.p;
        let r = a * b * c / (u * v);
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::ChartSingular {
                u,
                v,
                reason: "abc/(uv) is not positive".into(),
            });
        }
        let sq = r.sqrt();
        let (k1, k2) = (sq / u, sq / v);
        let (k1_u, k1_v) = (-1.5 * k1 / u, -0.5 * k1 / v);
        let (k2_u, k2_v) = (-0.5 * k2 / u, -1.5 * k2 / v);
        let (k1_uu, k2_vv) = (3.75 * k1 / (u * u), 3.75 * k2 / (v * v));
        let (k1_uv, k2_uv) = (0.75 * k1 / (u * v), 0.75 * k2 / (u * v));
        let (_, du, ddu) = um.eval(s);
        let (_, dv, ddv) = vm.eval(t);
        let eu = u * um.fold() / (4.0 * self.rest(um, u));
        let gv = v * vm.fold() / (4.0 * self.rest(vm, v));
        Ok(CurvatureJet {
            metric_e: (v - u) * eu,
            metric_g: (u - v) * gv,
            metric_e_v: eu * dv,
            metric_g_u: gv * du,
            k1,
            k2,
            k1_u: k1_u * du,
            k1_v: k1_v * dv,
            k2_u: k2_u * du,
            k2_v: k2_v * dv,
            k1_uu: k1_uu * du * du + k1_u * ddu,
            k2_vv: k2_vv * dv * dv + k2_v * ddv,
            k1_uv: k1_uv * du * dv,
            k2_uv: k2_uv * du * dv,
        })
    }

    fn root_factor(&self, map: &AxisMap, coord: f64, w: f64, p: f64) -> f64 {
        if map.is_endpoint(p) {
            map.signed_root(coord, p)
        } else {
            (w - p).abs().sqrt()
        }
    }

    fn check(&self, s: f64, t: f64) -> Result<(f64, f64)> {
        ChartDomain {
            u: self.u_map.interval(),
            v: self.v_map.interval(),
        }
        .check(s, t)?;
        Ok(self.confocal(s, t))
    }
}

impl PrincipalSurface for Quadric {
    fn name(&self) -> &str {
        self.kind().name()
    }

    fn family(&self) -> Family {
        Family::Quadric
    }

    fn domain(&self) -> ChartDomain {
        ChartDomain {
            u: self.u_map.interval(),
            v: self.v_map.interval(),
        }
    }

    fn position(&self, s: f64, t: f64) -> Result<Vec3> {
        let (u, v) = self.check(s, t)?;
        let mut x = [0.0; 3];
        for i in 0..3 {
            let pi = self.p[i];
            let denom: f64 = (0..3).filter(|&j| j != i).map(|j| pi - self.p[j]).product();
            let scale = (pi.abs() / denom.abs()).sqrt();
            x[i] = self.spec.branch[i]
                * scale
                * self.root_factor(&self.u_map, s, u, pi)
                * self.root_factor(&self.v_map, t, v, pi);
        }
        Ok(Vec3::new(x[0], x[1], x[2]))
    }

    fn normal(&self, s: f64, t: f64) -> Result<Vec3> {
        let x = self.position(s, t)?;
        let grad = Vec3::new(x[0] / self.p[0], x[1] / self.p[1], x[2] / self.p[2]);
        Ok(-grad.normalize())
    }

    fn jet(&self, s: f64, t: f64) -> Result<CurvatureJet> {
        let (u, v) = self.check(s, t)?;
        self.raw_jet(u, v, &self.u_map, s, &self.v_map, t)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
