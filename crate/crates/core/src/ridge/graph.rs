//! The quartic graph normal form `z = h(x, y)` over the tangent plane in a
//! principal frame, its ridge criterion, and a fit of it from positions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Foliation, PrincipalSurface, Vec3};

/// Coefficients of
/// `h = k1 x²/2 + k2 y²/2 + a x³/6 + d x²y/2 + b xy²/2 + c y³/6
///    + A x⁴/24 + B x³y/6 + C x²y²/4 + D xy³/6 + E y⁴/24`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphJet {
    pub k1: f64,
    pub k2: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub A: f64,
    pub B: f64,
    pub C: f64,
    pub D: f64,
    pub E: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetClassification {
    pub is_ridge_p1: bool,
    pub sigma1: f64,
    pub is_ridge_p2: bool,
    pub sigma2: f64,
}

/// Ridge tests `a = 0`, `c = 0` (to `1e-12`) and the two sigmas.
pub fn jet_classify(jet: &GraphJet) -> Result<JetClassification> {
    jet_classify_with(jet, 1e-12)
}

pub fn jet_classify_with(jet: &GraphJet, tol: f64) -> Result<JetClassification> {
    let gap = jet.k1 - jet.k2;
    if gap.abs() < 1e-12 * jet.k1.abs().max(jet.k2.abs()).max(1.0) {
        return Err(Error::UmbilicProximity { u: 0.0, v: 0.0, gap: gap.abs() });
    }
    let k1_cubed = jet.k1.powi(3);
    let k2_cubed = jet.k2.powi(3);
    Ok(JetClassification {
        is_ridge_p1: jet.a.abs() <= tol,
        sigma1: (jet.A - 3.0 * k1_cubed) / gap + 2.0 * jet.d * jet.d / (gap * gap),
        is_ridge_p2: jet.c.abs() <= tol,
        sigma2: (jet.E - 3.0 * k2_cubed) / -gap + 2.0 * jet.b * jet.b / (gap * gap),
    })
}

/// `(A - 3k1³)(k2 - k1)` for P1, `(E - 3k2³)(k1 - k2)` for P2. With `d = 0`
/// (resp. `b = 0`) it is negative exactly at beak-to-beak ridges, the
/// opposite sign to `sigma`.
pub fn product_criterion(jet: &GraphJet, foliation: Foliation) -> f64 {
    match foliation {
        Foliation::P1 => (jet.A - 3.0 * jet.k1.powi(3)) * (jet.k2 - jet.k1),
        Foliation::P2 => (jet.E - 3.0 * jet.k2.powi(3)) * (jet.k1 - jet.k2),
    }
}

const FIT_DEGREE: usize = 8;
const FIT_HALF: i32 = 8;

fn tangent(surface: &dyn PrincipalSurface, u: f64, v: f64) -> Result<(Vec3, Vec3)> {
    let h = 1e-6;
    let xu = (surface.position(u + h, v)? - surface.position(u - h, v)?) / (2.0 * h);
    let xv = (surface.position(u, v + h)? - surface.position(u, v - h)?) / (2.0 * h);
    Ok((xu, xv))
}

/// Chart point whose tangent-plane projection is `(x, y)`.
fn lift(surface: &dyn PrincipalSurface, origin: Vec3, e: [Vec3; 2], start: (f64, f64), x: f64, y: f64) -> Result<Vec3> {
    let (mut u, mut v) = start;
    for _ in 0..50 {
        let p = surface.position(u, v)? - origin;
        let (rx, ry) = (p.dot(&e[0]) - x, p.dot(&e[1]) - y);
        if rx.abs().max(ry.abs()) < 1e-15 {
            return Ok(p);
        }
        let (xu, xv) = tangent(surface, u, v)?;
        let m = [[xu.dot(&e[0]), xv.dot(&e[0])], [xu.dot(&e[1]), xv.dot(&e[1])]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        u -= (m[1][1] * rx - m[0][1] * ry) / det;
        v -= (m[0][0] * ry - m[1][0] * rx) / det;
    }
    let p = surface.position(u, v)? - origin;
    if (p.dot(&e[0]) - x).abs().max((p.dot(&e[1]) - y).abs()) < 1e-12 {
        Ok(p)
    } else {
        Err(Error::Budget(format!("tangent-plane lift of ({x}, {y})")))
    }
}

/// Fits the graph normal form at `(u, v)` from positions and the normal:
/// least squares of a degree-8 polynomial in the principal frame.
pub fn graph_jet(surface: &dyn PrincipalSurface, u: f64, v: f64) -> Result<GraphJet> {
    let jet = surface.jet(u, v)?;
    jet.require_non_umbilic(u, v)?;
    let origin = surface.position(u, v)?;
    let n = surface.normal(u, v)?;
    let (xu, xv) = tangent(surface, u, v)?;
    let e = [xu.normalize(), xv.normalize()];
    let kmax = jet.k1.abs().max(jet.k2.abs());
    let rho = 0.05 * (1.0 / kmax.max(1e-300)).min(1.0);

    let monomials: Vec<(usize, usize)> =
        (0..=FIT_DEGREE).flat_map(|deg| (0..=deg).map(move |q| (deg - q, q))).collect();
    let side = (2 * FIT_HALF + 1) as usize;
    let mut design = DMatrix::zeros(side * side, monomials.len());
    let mut rhs = DVector::zeros(side * side);
    let mut row = 0;
    for i in -FIT_HALF..=FIT_HALF {
        for j in -FIT_HALF..=FIT_HALF {
            let (sx, sy) = (i as f64 / FIT_HALF as f64, j as f64 / FIT_HALF as f64);
            let (x, y) = (rho * sx, rho * sy);
            let start = (u + x / xu.norm(), v + y / xv.norm());
            let p = lift(surface, origin, e, start, x, y)?;
            for (col, &(a, b)) in monomials.iter().enumerate() {
                design[(row, col)] = sx.powi(a as i32) * sy.powi(b as i32);
            }
            rhs[row] = p.dot(&n);
            row += 1;
        }
    }
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::InvalidParameters(format!("graph fit: {e}")))?;
    let get = |a: usize, b: usize| {
        let col = monomials.iter().position(|m| *m == (a, b)).unwrap();
        coef[col] / rho.powi((a + b) as i32)
    };
    Ok(GraphJet {
        k1: 2.0 * get(2, 0),
        k2: 2.0 * get(0, 2),
        a: 6.0 * get(3, 0),
        d: 2.0 * get(2, 1),
        b: 2.0 * get(1, 2),
        c: 6.0 * get(0, 3),
        A: 24.0 * get(4, 0),
        B: 6.0 * get(3, 1),
        C: 4.0 * get(2, 2),
        D: 6.0 * get(1, 3),
        E: 24.0 * get(0, 4),
    })
}
