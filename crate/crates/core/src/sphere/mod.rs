//! The Lorentz model of the space of oriented spheres: lifts of points,
//! tangent planes and spheres to `R^{4,1}`, the map `V(M)` from the unit
//! tangent bundle to spheres, and the canonical section along a curve.

mod cansec;
#[cfg(test)]
mod tests;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Foliation, PrincipalSurface, Vec3};
use crate::numeric::refine_root;

pub use cansec::{
    cansec_analyze, cansec_curve, noncanonical_speed, write_lorentz_csv, CansecReport, CansecSample, SectionPoint,
};

/// A vector of `R^{4,1}` with the form `-x0 y0 + x1 y1 + ... + x4 y4`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LorentzVector(pub [f64; 5]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Causal {
    SpaceLike,
    TimeLike,
    LightLike,
}

impl fmt::Display for Causal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Causal::SpaceLike => "space-like",
            Causal::TimeLike => "time-like",
            Causal::LightLike => "light-like",
        })
    }
}

impl LorentzVector {
    pub fn new(x: [f64; 5]) -> Self {
        Self(x)
    }

    /// Bilinear form.
    pub fn dot(&self, other: &Self) -> f64 {
        let (a, b) = (&self.0, &other.0);
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4]
    }

    /// Quadratic form.
    pub fn form(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm of the components.
    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Light-like when `|L(x)| < 1e-12 |x|^2`.
    pub fn classify(&self) -> Causal {
        let q = self.form();
        let scale = self.euclid_norm().powi(2);
        if q.abs() < 1e-12 * scale || scale == 0.0 {
            Causal::LightLike
        } else if q > 0.0 {
            Causal::SpaceLike
        } else {
            Causal::TimeLike
        }
    }

    /// Square root of the form of a space-like vector, 0 otherwise.
    pub fn space_norm(&self) -> f64 {
        self.form().max(0.0).sqrt()
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.map(f))
    }
}

impl Add for LorentzVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for LorentzVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for LorentzVector {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl Mul<LorentzVector> for f64 {
    type Output = LorentzVector;
    fn mul(self, v: LorentzVector) -> LorentzVector {
        v.map(|x| self * x)
    }
}

pub fn lorentz_form(x: &LorentzVector) -> f64 {
    x.form()
}

pub fn lorentz_dot(x: &LorentzVector, y: &LorentzVector) -> f64 {
    x.dot(y)
}

pub fn classify(x: &LorentzVector) -> Causal {
    x.classify()
}

/// Lift of an ambient point to the light cone.
pub fn lift_point(x: &Vec3) -> LorentzVector {
    let r2 = x.norm_squared();
    LorentzVector([(1.0 + r2) / 2.0, x[0], x[1], x[2], (r2 - 1.0) / 2.0])
}

/// `(<x, w>, w, <x, w>)`: derivative of the point lift along the velocity `w`.
pub fn lift_direction(x: &Vec3, w: &Vec3) -> LorentzVector {
    let p = x.dot(w);
    LorentzVector([p, w[0], w[1], w[2], p])
}

/// Lift of the tangent plane at `x` with unit normal `nu`.
pub fn lift_normal(x: &Vec3, nu: &Vec3) -> Result<LorentzVector> {
    if (nu.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameters(format!("normal of length {} is not unit", nu.norm())));
    }
    Ok(lift_direction(x, nu))
}

/// Point `(k, m, n)` of a sphere in contact with the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub k: f64,
    pub m: LorentzVector,
    pub n: LorentzVector,
}

/// A point of the de Sitter quadric `L = 1`, i.e. an oriented sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub sigma: LorentzVector,
    pub contact: Option<Contact>,
}

impl SpherePoint {
    pub fn new(sigma: LorentzVector) -> Result<Self> {
        let q = sigma.form();
        if (q - 1.0).abs() >= 1e-10 {
            return Err(Error::InvalidParameters(format!("L(sigma) = {q}, expected 1")));
        }
        Ok(Self { sigma, contact: None })
    }

    /// `sigma = k m + n`.
    pub fn from_contact(k: f64, m: LorentzVector, n: LorentzVector) -> Result<Self> {
        let scale = m.euclid_norm().powi(2).max(1.0);
        let (lm, ln, lmn) = (m.form(), n.form(), m.dot(&n));
        if lm.abs() > 1e-10 * scale || (ln - 1.0).abs() > 1e-10 * scale || lmn.abs() > 1e-10 * scale {
            return Err(Error::InvalidParameters(format!("not a contact pair: L(m) = {lm}, L(n) = {ln}, L(m, n) = {lmn}")));
        }
        let mut p = Self::new(k * m + n)?;
        p.contact = Some(Contact { k, m, n });
        Ok(p)
    }

    pub fn sphere(&self) -> Sphere {
        sphere_of(&self.sigma)
    }
}

/// Ambient sphere or plane of a point of `L = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Sphere {
    /// Oriented by the sign of `curvature = ±1/radius`.
    Round { center: [f64; 3], radius: f64, curvature: f64 },
    /// `<y, normal> = offset`.
    Plane { normal: [f64; 3], offset: f64 },
}

impl Sphere {
    /// Signed defect of an ambient point: 0 on the sphere.
    pub fn defect(&self, y: &Vec3) -> f64 {
        match *self {
            Sphere::Round { center, radius, .. } => (y - Vec3::from(center)).norm() - radius,
            Sphere::Plane { normal, offset } => y.dot(&Vec3::from(normal)) - offset,
        }
    }
}

/// Classical data of the sphere `{y : L(lift(y), sigma) = 0}`.
pub fn sphere_of(sigma: &LorentzVector) -> Sphere {
    let s = &sigma.0;
    let kappa = s[0] - s[4];
    let spatial = Vec3::new(s[1], s[2], s[3]);
    if kappa.abs() < 1e-14 * sigma.euclid_norm() {
        let nn = spatial.norm();
        return Sphere::Plane { normal: (spatial / nn).into(), offset: 0.5 * (s[0] + s[4]) / nn };
    }
    let center = spatial / kappa;
    Sphere::Round { center: center.into(), radius: 1.0 / kappa.abs(), curvature: kappa }
}

/// Lift of the sphere with the given center and signed curvature.
pub fn lift_sphere(center: &Vec3, curvature: f64) -> Result<LorentzVector> {
    if curvature == 0.0 || !curvature.is_finite() {
        return Err(Error::InvalidParameters(format!("sphere curvature {curvature}")));
    }
    let r2 = 1.0 / (curvature * curvature);
    let sum = curvature * (center.norm_squared() - r2);
    let c = curvature * center;
    Ok(LorentzVector([(sum + curvature) / 2.0, c[0], c[1], c[2], (sum - curvature) / 2.0]))
}

/// Lift of the plane `<y, normal> = offset` with unit `normal`.
pub fn lift_plane(normal: &Vec3, offset: f64) -> Result<LorentzVector> {
    lift_normal(&(offset * normal), normal)
}

/// `sigma(u, v, alpha) = k_n(alpha) m + n`.
pub fn vm_map(surface: &dyn PrincipalSurface, u: f64, v: f64, alpha: f64) -> Result<SpherePoint> {
    let jet = surface.jet(u, v)?;
    let x = surface.position(u, v)?;
    let nu = surface.normal(u, v)?;
    let (s, c) = alpha.sin_cos();
    let kn = jet.k1 * c * c + jet.k2 * s * s;
    SpherePoint::from_contact(kn, lift_point(&x), lift_normal(&x, &nu)?)
}

/// Osculating sphere of the principal direction: `sigma_i = k_i m + n`.
pub fn principal_sphere(surface: &dyn PrincipalSurface, u: f64, v: f64, foliation: Foliation) -> Result<SpherePoint> {
    let alpha = match foliation {
        Foliation::P1 => 0.0,
        Foliation::P2 => std::f64::consts::FRAC_PI_2,
    };
    vm_map(surface, u, v, alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

const RANK_THRESHOLD: f64 = 1e-8;
const JACOBIAN_STEP: f64 = 1e-5;

fn rank_of(columns: &[LorentzVector]) -> RankReport {
    let m = DMatrix::from_fn(5, columns.len(), |i, j| columns[j].0[i]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|s| **s > RANK_THRESHOLD * top).count();
    RankReport { rank, singular_values: sv }
}

fn central(f: impl Fn(f64) -> Result<LorentzVector>, x: f64, h: f64) -> Result<LorentzVector> {
    let ys = [f(x - 2.0 * h)?, f(x - h)?, f(x + h)?, f(x + 2.0 * h)?];
    Ok((1.0 / (12.0 * h)) * (ys[0] - 8.0 * ys[1] + 8.0 * ys[2] - ys[3]))
}

fn step_u(surface: &dyn PrincipalSurface, u: f64, v: f64) -> Result<(f64, f64)> {
    let jet = surface.jet(u, v)?;
    Ok((JACOBIAN_STEP / jet.metric_e.sqrt(), JACOBIAN_STEP / jet.metric_g.sqrt()))
}

/// Rank of `D sigma` in `(u, v, alpha)`.
pub fn vm_jacobian_rank(surface: &dyn PrincipalSurface, u: f64, v: f64, alpha: f64) -> Result<RankReport> {
    let (hu, hv) = step_u(surface, u, v)?;
    let sig = |u, v, a| vm_map(surface, u, v, a).map(|p| p.sigma);
    let cols = [
        central(|x| sig(x, v, alpha), u, hu)?,
        central(|x| sig(u, x, alpha), v, hv)?,
        central(|x| sig(u, v, x), alpha, JACOBIAN_STEP)?,
    ];
    Ok(rank_of(&cols))
}

/// Rank of the boundary map `(u, v) -> sigma_i(u, v)`.
pub fn boundary_jacobian_rank(surface: &dyn PrincipalSurface, u: f64, v: f64, foliation: Foliation) -> Result<RankReport> {
    let (hu, hv) = step_u(surface, u, v)?;
    let sig = |u, v| principal_sphere(surface, u, v, foliation).map(|p| p.sigma);
    let cols = [central(|x| sig(x, v), u, hu)?, central(|x| sig(u, x), v, hv)?];
    Ok(rank_of(&cols))
}

/// Angle between two spheres, `arccos L(s1, s2)`. Identical points give 0.
pub fn sphere_angle(s1: &SpherePoint, s2: &SpherePoint) -> Result<f64> {
    let diff = (s1.sigma - s2.sigma).euclid_norm();
    if diff <= 1e-12 * s1.sigma.euclid_norm().max(1.0) {
        return Ok(0.0);
    }
    let l = s1.sigma.dot(&s2.sigma);
    if l.abs() >= 1.0 - 1e-12 {
        return Err(Error::TangentSpheres(l));
    }
    Ok(l.acos())
}

/// Tangent directions at `(u, v)` of the intersection of the surface with
/// the sphere `k m + n`, as angles from P1 in `[0, pi)`. Found as the zeros
/// of `L(lift(X), sigma)` on a small geodesic-like circle of arc radius
/// `radius`.
pub fn section_directions(surface: &dyn PrincipalSurface, u: f64, v: f64, k: f64, radius: f64) -> Result<Vec<f64>> {
    let jet = surface.jet(u, v)?;
    let x = surface.position(u, v)?;
    let sigma = k * lift_point(&x) + lift_normal(&x, &surface.normal(u, v)?)?;
    let (se, sg) = (jet.metric_e.sqrt(), jet.metric_g.sqrt());
    let f = |t: f64| -> f64 {
        let (s, c) = t.sin_cos();
        match surface.position(u + radius * c / se, v + radius * s / sg) {
            Ok(y) => lift_point(&y).dot(&sigma) / (radius * radius),
            Err(_) => f64::NAN,
        }
    };
    let n = 720;
    let pi = std::f64::consts::PI;
    // opposite roots share a direction: average them
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut prev = (0.0, f(0.0));
    for i in 1..=n {
        let t = 2.0 * pi * i as f64 / n as f64;
        let ft = f(t);
        if prev.1.is_finite() && ft.is_finite() && prev.1.signum() != ft.signum() {
            let r = refine_root(f, prev.0, t, 1e-12)?.rem_euclid(pi);
            let near = clusters.iter_mut().find(|(c, k)| {
                let d = (c / *k as f64 - r).rem_euclid(pi);
                d.min(pi - d) < 1e-2
            });
            match near {
                Some((c, k)) => {
                    // keep the pair on the same branch of the period
                    let mean = *c / *k as f64;
                    *c += mean + wrap_half(r - mean, pi);
                    *k += 1;
                }
                None => clusters.push((r, 1)),
            }
        }
        prev = (t, ft);
    }
    let mut out: Vec<f64> = clusters.iter().map(|(c, k)| (c / *k as f64).rem_euclid(pi)).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn wrap_half(d: f64, period: f64) -> f64 {
    let r = d.rem_euclid(period);
    if r > period / 2.0 {
        r - period
    } else {
        r
    }
}
