//! Global structure of Darboux curves on triaxial quadrics: the level
//! equation `I = 1/lambda`, its regimes, rectifying coordinates, rotation
//! numbers, Poincare maps and circular sections.

mod circles;
mod poincare;
#[cfg(test)]
mod tests;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{Quadric, QuadricAxis, QuadricKind};
use crate::error::{Error, Result};
use crate::geometry::PrincipalSurface;
use crate::numeric::{integrate, integrate_sqrt_ends};

pub use circles::{boundary_lines_check, circular_sections_check, level_curve, BoundaryLineReport, CircleFit, CircularSectionsReport};
pub use poincare::{default_section, poincare_map, write_crossings_csv, PoincareFlow, PoincareReport, Section, SectionCrossing};

/// Target error of each rotation-length quadrature.
pub const QUAD_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeLabel {
    /// No real Darboux directions at this level.
    NonReal,
    /// `v` confined between an end of its band and `lambda`, `u` free.
    VBand,
    /// `u` confined between `lambda` and an end of its band, `v` free.
    UBand,
    /// The level of the circular sections.
    CircularSections,
    /// `lambda` at an end of a band: the admissible set degenerates.
    Boundary,
    /// Every direction field is regular and curves escape to infinity.
    Helices,
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeLabel::NonReal => "non-real",
            RegimeLabel::VBand => "v-band",
            RegimeLabel::UBand => "u-band",
            RegimeLabel::CircularSections => "circular-sections",
            RegimeLabel::Boundary => "boundary",
            RegimeLabel::Helices => "helices",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaRegime {
    pub kind: QuadricKind,
    pub lambda: f64,
    pub label: RegimeLabel,
    /// Case of the classification, e.g. `c < lambda < b`.
    pub case: String,
    /// Admissible confocal ranges; `None` when no curve is real.
    pub u_range: Option<(f64, f64)>,
    pub v_range: Option<(f64, f64)>,
    pub bounded: bool,
}

/// Maps `lambda` to its case in the classification of Darboux curves at the
/// level `I = 1/lambda`.
pub fn regime_classify(quadric: &Quadric, lambda: f64) -> Result<LambdaRegime> {
    if !lambda.is_finite() || lambda == 0.0 {
        return Err(Error::InvalidParameters(format!("lambda = {lambda}")));
    }
    let [a, b, c] = quadric.params();
    let (ub, vb) = (quadric.u_band(), quadric.v_band());
    let kind = quadric.kind();
    use RegimeLabel::*;
    let (label, case, u, v, bounded) = match kind {
        QuadricKind::Ellipsoid => {
            if lambda < c || lambda > a {
                (NonReal, "lambda outside [c, a]", None, None, true)
            } else if lambda == c {
                (Boundary, "lambda = c", Some(ub), Some((c, c)), true)
            } else if lambda == a {
                (Boundary, "lambda = a", Some((a, a)), Some(vb), true)
            } else if lambda < b {
                (VBand, "c < lambda < b", Some(ub), Some((c, lambda)), true)
            } else if lambda == b {
                (CircularSections, "lambda = b", Some(ub), Some(vb), true)
            } else {
                (UBand, "b < lambda < a", Some((lambda, a)), Some(vb), true)
            }
        }
        QuadricKind::TwoSheet => {
            if lambda < c {
                (VBand, "lambda < c", Some(ub), Some((f64::NEG_INFINITY, lambda)), false)
            } else if lambda == c {
                (CircularSections, "lambda = c", Some(ub), Some(vb), true)
            } else if lambda < b {
                (UBand, "c < lambda < b", Some((lambda, b)), Some(vb), false)
            } else if lambda == b {
                (Boundary, "lambda = b", Some((b, b)), Some(vb), false)
            } else {
                (NonReal, "lambda > b", None, None, true)
            }
        }
        QuadricKind::OneSheet => {
            if lambda < c {
                (VBand, "lambda < c", Some(ub), Some((lambda, c)), true)
            } else if lambda == c {
                (Boundary, "lambda = c", Some(ub), Some((c, c)), false)
            } else if lambda <= b {
                (NonReal, "c < lambda <= b", None, None, true)
            } else if lambda < a {
                (UBand, "b < lambda < a", Some((b, lambda)), Some(vb), false)
            } else if lambda == a {
                (Boundary, "lambda = a", Some((a, a)), Some(vb), false)
            } else {
                (Helices, "lambda > a", Some(ub), Some(vb), false)
            }
        }
    };
    Ok(LambdaRegime { kind, lambda, label, case: case.into(), u_range: u, v_range: v, bounded })
}

/// Real solutions of the level equation at a chart point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarbouxDirections {
    pub lambda: f64,
    /// Confocal coordinates of the point.
    pub confocal: (f64, f64),
    /// `cos² alpha` solving `cos² a / u + sin² a / v = 1/lambda`.
    pub cos2: f64,
    /// Angles from P1, `alpha` and `-alpha` with `alpha` in `(0, pi/2)`;
    /// empty when `cos2` is outside `[0, 1]`.
    pub alphas: Vec<f64>,
    /// Chart directions `[du : dv]` of unit length.
    pub chart: Vec<[f64; 2]>,
    /// The same directions in confocal coordinates.
    pub confocal_directions: Vec<[f64; 2]>,
    /// `k_n` along each direction.
    pub normal_curvatures: Vec<f64>,
    /// `sqrt(abc/(uv)) / lambda`.
    pub predicted_normal_curvature: f64,
}

impl DarbouxDirections {
    pub fn is_real(&self) -> bool {
        !self.alphas.is_empty()
    }
}

/// Solves `(v - lambda) H(u) v'² - (u - lambda) H(v) u'² = 0` at a chart
/// point.
pub fn implicit_directions(quadric: &Quadric, s: f64, t: f64, lambda: f64) -> Result<DarbouxDirections> {
    if !lambda.is_finite() || lambda == 0.0 {
        return Err(Error::InvalidParameters(format!("lambda = {lambda}")));
    }
    let (u, v) = quadric.confocal(s, t);
    let jet = quadric.jet(s, t)?;
    let [a, b, c] = quadric.params();
    let cos2 = u * (v - lambda) / (lambda * (v - u));
    let scale = 1e-12;
    if cos2.abs() < scale || (cos2 - 1.0).abs() < scale {
        return Err(Error::PrincipalSingularity(cos2));
    }
    let predicted = (a * b * c / (u * v)).sqrt() / lambda;
    let mut out = DarbouxDirections {
        lambda,
        confocal: (u, v),
        cos2,
        alphas: Vec::new(),
        chart: Vec::new(),
        confocal_directions: Vec::new(),
        normal_curvatures: Vec::new(),
        predicted_normal_curvature: predicted,
    };
    if !(0.0..=1.0).contains(&cos2) {
        return Ok(out);
    }
    let alpha = cos2.sqrt().acos();
    let (se, sg) = (jet.metric_e.sqrt(), jet.metric_g.sqrt());
    let du_ds = quadric.axis_slope(QuadricAxis::U, s);
    let dv_dt = quadric.axis_slope(QuadricAxis::V, t);
    for a in [alpha, -alpha] {
        let (sn, cs) = a.sin_cos();
        let d = [cs / se, sn / sg];
        let norm = d[0].hypot(d[1]);
        out.alphas.push(a);
        out.chart.push([d[0] / norm, d[1] / norm]);
        out.confocal_directions.push([d[0] * du_ds / norm, d[1] * dv_dt / norm]);
        out.normal_curvatures.push(jet.k1 * cs * cs + jet.k2 * sn * sn);
    }
    Ok(out)
}

/// A rectifying length `int sqrt(|w - lambda| / |H(w)|) dw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Length {
    /// `f64::INFINITY` when the integral diverges.
    pub value: f64,
    pub error: f64,
    pub range: (f64, f64),
}

impl Length {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationData {
    /// Length of the `u` side (`s1`, over the `v` band, for leaves of
    /// constant angle).
    pub l1: Length,
    /// Length of the `v` side (`s2`, over the `u` band, for leaves of
    /// constant angle).
    pub l2: Length,
    /// `l2 / l1`.
    pub rho: f64,
    /// Rotation number of the return map to the default section, when the
    /// regime has one.
    pub rotation_number: Option<f64>,
}

/// `sqrt(|w - lambda| / |H(w)|)` with the factor `w - lambda` cancelled
/// against a root of `H` equal to `lambda`.
fn level_density(params: [f64; 3], lambda: Option<f64>, w: f64) -> f64 {
    let mut num = 1.0;
    let mut den = 1.0;
    let mut cancelled = false;
    for p in params {
        if !cancelled && lambda == Some(p) {
            cancelled = true;
            continue;
        }
        den *= (w - p).abs();
    }
    if let (Some(l), false) = (lambda, cancelled) {
        num = (w - l).abs();
    }
    (num / den).sqrt()
}

fn length(params: [f64; 3], lambda: Option<f64>, weight: impl Fn(f64) -> f64, range: (f64, f64)) -> Result<Length> {
    let (lo, hi) = range;
    if !lo.is_finite() || !hi.is_finite() {
        // the density decays like 1/|w|: the tail diverges
        return Ok(Length { value: f64::INFINITY, error: 0.0, range });
    }
    let q = integrate_sqrt_ends(|w| weight(w) * level_density(params, lambda, w), lo, hi, QUAD_TOL)?;
    Ok(Length { value: q.value, error: q.error, range })
}

/// Rectifying lengths `L1`, `L2` of the level `lambda` over the regime's
/// ranges, and the rotation number of the bounded regimes.
pub fn sigma_lengths(quadric: &Quadric, lambda: f64) -> Result<RotationData> {
    let regime = regime_classify(quadric, lambda)?;
    let (Some(ur), Some(vr)) = (regime.u_range, regime.v_range) else {
        return Err(Error::InvalidParameters(format!("no real Darboux curves at lambda = {lambda} ({})", regime.case)));
    };
    if regime.label == RegimeLabel::Boundary {
        return Err(Error::InvalidParameters(format!("lambda = {lambda} is a band end ({})", regime.case)));
    }
    let p = quadric.params();
    let l1 = length(p, Some(lambda), |_| 1.0, ur)?;
    let l2 = length(p, Some(lambda), |_| 1.0, vr)?;
    let rotation_number = match regime.label {
        _ if !(l1.is_finite() && l2.is_finite()) => None,
        RegimeLabel::VBand | RegimeLabel::CircularSections => Some(l2.value / l1.value),
        RegimeLabel::UBand => Some(l1.value / l2.value),
        _ => None,
    };
    Ok(RotationData { l1, l2, rho: l2.value / l1.value, rotation_number })
}

/// `int sqrt(w / |H(w)|) dw` over the `u` band and over the `v` band of an
/// ellipsoid.
pub fn falpha_band_integrals(quadric: &Quadric) -> Result<(Length, Length)> {
    if quadric.kind() != QuadricKind::Ellipsoid {
        return Err(Error::InvalidParameters(format!("leaves of constant angle need an ellipsoid, got {}", quadric.kind().name())));
    }
    let p = quadric.params();
    let tu = length(p, None, f64::sqrt, quadric.u_band())?;
    let tv = length(p, None, f64::sqrt, quadric.v_band())?;
    Ok((tu, tv))
}

/// `s1 = 2 sin(a) int_c^b sqrt(w/|H|)`, `s2 = 2 cos(a) int_b^a sqrt(w/|H|)`,
/// `rho = s2 / s1`. Here `alpha` is the angle to P2: the leaf is the
/// `ConstantAngle` flow at `pi/2 - alpha`.
pub fn falpha_rotation(quadric: &Quadric, alpha: f64) -> Result<RotationData> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameters(format!("alpha = {alpha} outside (0, pi/2)")));
    }
    let (tu, tv) = falpha_band_integrals(quadric)?;
    let (sn, cs) = alpha.sin_cos();
    let l1 = Length { value: 2.0 * sn * tv.value, error: 2.0 * sn * tv.error, range: tv.range };
    let l2 = Length { value: 2.0 * cs * tu.value, error: 2.0 * cs * tu.error, range: tu.range };
    let rho = l2.value / l1.value;
    Ok(RotationData { l1, l2, rho, rotation_number: Some(rho) })
}

/// Rectifying density in a chart coordinate: `d sigma / dt` for the level
/// `lambda`, or `d tau / dt` (with `sqrt(w)` in place of `sqrt|w - lambda|`)
/// for leaves of constant angle.
pub fn chart_density(quadric: &Quadric, axis: QuadricAxis, lambda: Option<f64>, t: f64) -> f64 {
    let w = quadric.axis_value(axis, t);
    let m = quadric.axis_measure(axis, t);
    match lambda {
        Some(l) => m * (w - l).abs().sqrt(),
        None => m * w.abs().sqrt(),
    }
}

/// `int_{t0}^{t1}` of the chart density.
pub fn rectified(quadric: &Quadric, axis: QuadricAxis, lambda: Option<f64>, t0: f64, t1: f64) -> Result<f64> {
    Ok(integrate(|t| chart_density(quadric, axis, lambda, t), t0, t1, QUAD_TOL)?.value)
}
