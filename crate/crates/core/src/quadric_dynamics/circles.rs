//! Solutions of the level equation traced on the angular torus, the
//! circular sections at `lambda = b`, and the boundary levels of the
//! one-sheeted hyperboloid.

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::catalog::{Quadric, QuadricAxis, QuadricChart, QuadricKind};
use crate::error::{Error, Result};
use crate::flow::ode::rk4;
use crate::geometry::PrincipalSurface;

use super::implicit_directions;

const STEP: f64 = 2e-3;
const MAX_STEPS: usize = 40_000;
const PLANAR_TOL: f64 = 1e-8;
const CIRCLE_TOL: f64 = 1e-8;
const NORMAL_TOL: f64 = 1e-6;

/// Traces `G_u(s) ds = eps G_v(t) dt` as the Hamiltonian field
/// `(s', t') = (G_v(t), eps G_u(s))`, `G = m sqrt|w - lambda|` signed through
/// absorbed band ends. Smooth when `lambda` is an end of both bands, as for
/// `lambda = b` on the ellipsoid. Stops after one closed circuit.
pub fn level_curve(quadric: &Quadric, lambda: f64, start: (f64, f64), eps: f64) -> Result<Vec<(f64, f64)>> {
    if quadric.chart() != QuadricChart::Angular {
        return Err(Error::InvalidParameters("level curves need the angular chart".into()));
    }
    let field = |y: &[f64; 2]| -> Result<[f64; 2]> {
        let gu = quadric.axis_measure(QuadricAxis::U, y[0]) * quadric.axis_signed_root(QuadricAxis::U, y[0], lambda);
        let gv = quadric.axis_measure(QuadricAxis::V, y[1]) * quadric.axis_signed_root(QuadricAxis::V, y[1], lambda);
        Ok([gv, eps * gu])
    };
    let p0 = quadric.position(start.0, start.1)?;
    let mut y = [start.0, start.1];
    let mut out = vec![start];
    let mut far = 0.0f64;
    let mut prev = 0.0;
    for _ in 0..MAX_STEPS {
        y = rk4(&field, &y, STEP)?;
        out.push((y[0], y[1]));
        let d = (quadric.position(y[0], y[1])? - p0).norm();
        far = far.max(d);
        if far > 0.0 && d < 1e-2 * far && d > prev {
            // first local minimum of the distance once the curve has left
            out.pop();
            return Ok(out);
        }
        prev = d;
    }
    Err(Error::Budget(format!("level curve did not close in {MAX_STEPS} steps")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleFit {
    pub start: (f64, f64),
    pub eps: f64,
    pub points: usize,
    pub normal: [f64; 3],
    pub center: [f64; 3],
    pub radius: f64,
    /// Largest distance to the fitted plane.
    pub planarity: f64,
    /// Largest deviation of the distance to the center from the radius.
    pub circularity: f64,
    /// Sine of the angle to the nearer umbilic tangent plane normal.
    pub normal_misalignment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularSectionsReport {
    pub fits: Vec<CircleFit>,
    pub planarity_max: f64,
    pub circularity_max: f64,
    pub normal_misalignment_max: f64,
    pub passed: bool,
}

/// Normal, center, radius, planarity, circularity.
type Fit = (Vector3<f64>, Vector3<f64>, f64, f64, f64);

/// Least-squares plane and circle through 3D points.
fn fit_circle(points: &[Vector3<f64>]) -> Result<Fit> {
    let n = points.len();
    if n < 5 {
        return Err(Error::Empty(format!("{n} points")));
    }
    let mean = points.iter().sum::<Vector3<f64>>() / n as f64;
    let m = DMatrix::from_fn(n, 3, |i, j| points[i][j] - mean[j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Empty("svd".into()))?;
    let (imin, _) = svd.singular_values.argmin();
    let normal = Vector3::new(vt[(imin, 0)], vt[(imin, 1)], vt[(imin, 2)]).normalize();
    let e1 = (points[0] - mean - normal * normal.dot(&(points[0] - mean))).normalize();
    let e2 = normal.cross(&e1);
    let planarity = points.iter().map(|p| normal.dot(&(p - mean)).abs()).fold(0.0, f64::max);
    // x² + y² = 2 cx x + 2 cy y + d
    let a = DMatrix::from_fn(n, 3, |i, j| {
        let q = points[i] - mean;
        match j {
            0 => 2.0 * e1.dot(&q),
            1 => 2.0 * e2.dot(&q),
            _ => 1.0,
        }
    });
    let rhs = DVector::from_fn(n, |i, _| {
        let q = points[i] - mean;
        e1.dot(&q).powi(2) + e2.dot(&q).powi(2)
    });
    let sol = a.svd(true, true).solve(&rhs, 1e-14).map_err(|e| Error::Empty(e.into()))?;
    let center = mean + e1 * sol[0] + e2 * sol[1];
    let radius = (sol[2] + sol[0] * sol[0] + sol[1] * sol[1]).sqrt();
    let circularity = points
        .iter()
        .map(|p| {
            let q = p - center;
            (q - normal * normal.dot(&q)).norm() - radius
        })
        .fold(0.0f64, |m, d| m.max(d.abs()));
    Ok((normal, center, radius, planarity, circularity))
}

/// Integrates the level `lambda = b` on the ellipsoid from `starts`, both
/// families, and fits a plane and a circle to each solution.
pub fn circular_sections_check(quadric: &Quadric, starts: &[(f64, f64)]) -> Result<CircularSectionsReport> {
    if quadric.kind() != QuadricKind::Ellipsoid {
        return Err(Error::InvalidParameters("circular sections: ellipsoid only".into()));
    }
    let [a, b, c] = quadric.params();
    let x0 = (a * (a - b) / (a - c)).sqrt();
    let z0 = (c * (b - c) / (a - c)).sqrt();
    let umbilic_normals = [Vector3::new(x0 / a, 0.0, z0 / c).normalize(), Vector3::new(x0 / a, 0.0, -z0 / c).normalize()];
    let mut fits = Vec::new();
    for &start in starts {
        for eps in [1.0, -1.0] {
            let curve = level_curve(quadric, b, start, eps)?;
            let pts = curve.iter().map(|&(s, t)| quadric.position(s, t)).collect::<Result<Vec<_>>>()?;
            let (normal, center, radius, planarity, circularity) = fit_circle(&pts)?;
            let normal_misalignment = umbilic_normals.iter().map(|m| normal.cross(m).norm()).fold(f64::INFINITY, f64::min);
            fits.push(CircleFit {
                start,
                eps,
                points: pts.len(),
                normal: normal.into(),
                center: center.into(),
                radius,
                planarity,
                circularity,
                normal_misalignment,
            });
        }
    }
    let max = |f: fn(&CircleFit) -> f64| fits.iter().map(f).fold(0.0f64, f64::max);
    let (planarity_max, circularity_max, normal_misalignment_max) =
        (max(|f| f.planarity), max(|f| f.circularity), max(|f| f.normal_misalignment));
    Ok(CircularSectionsReport {
        passed: planarity_max < PLANAR_TOL && circularity_max < CIRCLE_TOL && normal_misalignment_max < NORMAL_TOL,
        fits,
        planarity_max,
        circularity_max,
        normal_misalignment_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLineReport {
    pub lambda: f64,
    /// Sampled points carrying real solutions.
    pub real_points: usize,
    pub sampled_points: usize,
    /// `|k_n|` along the solutions; zero on straight lines, NaN without
    /// real solutions.
    pub normal_curvature_min: f64,
    pub normal_curvature_max: f64,
    /// Largest angle between a solution and the nearer ruling.
    pub ruling_angle_max: f64,
    /// Whether the solutions have vanishing normal curvature to 1e-10.
    pub straight: bool,
}

/// Samples the level `lambda` (an end `c` or `a` of a band) on the
/// one-sheeted hyperboloid and measures how far its solutions are from the
/// rulings.
pub fn boundary_lines_check(quadric: &Quadric, lambda: f64) -> Result<BoundaryLineReport> {
    if quadric.kind() != QuadricKind::OneSheet {
        return Err(Error::InvalidParameters("boundary lines: one-sheeted hyperboloid only".into()));
    }
    let [a, _, c] = quadric.params();
    if lambda != a && lambda != c {
        return Err(Error::InvalidParameters(format!("lambda = {lambda} is not a boundary level")));
    }
    let (ulo, uhi) = quadric.u_band();
    let (vlo, vhi) = quadric.v_band();
    let vlo = if vlo.is_finite() { vlo } else { vhi - 10.0 * (a - c) };
    let n = 12;
    let (mut real, mut sampled) = (0, 0);
    let (mut kmin, mut kmax, mut angle_max) = (f64::INFINITY, 0.0f64, 0.0f64);
    for i in 1..n {
        for j in 1..n {
            let u = ulo + (uhi - ulo) * i as f64 / n as f64;
            let v = vlo + (vhi - vlo) * j as f64 / n as f64;
            let (s, t) = quadric.chart_point(u, v);
            let Ok(dirs) = implicit_directions(quadric, s, t, lambda) else { continue };
            sampled += 1;
            if !dirs.is_real() {
                continue;
            }
            real += 1;
            // rulings: cos² a / u + sin² a / v = 0
            let ruling = (u / (u - v)).sqrt().acos();
            for (alpha, k) in dirs.alphas.iter().zip(&dirs.normal_curvatures) {
                kmin = kmin.min(k.abs());
                kmax = kmax.max(k.abs());
                angle_max = angle_max.max((alpha.abs() - ruling).abs());
            }
        }
    }
    if real == 0 {
        kmin = f64::NAN;
        kmax = f64::NAN;
        angle_max = f64::NAN;
    }
    Ok(BoundaryLineReport {
        lambda,
        real_points: real,
        sampled_points: sampled,
        normal_curvature_min: kmin,
        normal_curvature_max: kmax,
        ruling_angle_max: angle_max,
        straight: real > 0 && kmax < 1e-10,
    })
}
