//! Integrability of the Darboux plane field in terms of the conformal
//! principal curvatures.

use crate::error::Result;
use crate::geometry::PrincipalSurface;

/// `(xi1(theta2) + theta1 theta2 / 6, xi2(theta1) - theta1 theta2 / 6)` with
/// `xi_i = X_i / mu`, evaluated from the curvature jet.
pub fn plane_field_integrability(surface: &dyn PrincipalSurface, u: f64, v: f64) -> Result<(f64, f64)> {
    let j = surface.jet(u, v)?;
    j.require_non_umbilic(u, v)?;
    let (e, g) = (j.metric_e, j.metric_g);
    let (se, sg) = (e.sqrt(), g.sqrt());
    let mu = 0.5 * (j.k1 - j.k2);
    let mu_u = 0.5 * (j.k1_u - j.k2_u);
    let mu_v = 0.5 * (j.k1_v - j.k2_v);
    let mu2 = mu * mu;
    let theta1 = j.k1_u / (se * mu2);
    let theta2 = j.k2_v / (sg * mu2);
    let theta1_v = j.k1_uv / (se * mu2) - j.k1_u * j.metric_e_v / (2.0 * e * se * mu2) - 2.0 * j.k1_u * mu_v / (se * mu2 * mu);
    let theta2_u = j.k2_uv / (sg * mu2) - j.k2_v * j.metric_g_u / (2.0 * g * sg * mu2) - 2.0 * j.k2_v * mu_u / (sg * mu2 * mu);
    let xi1_theta2 = theta2_u / (se * mu);
    let xi2_theta1 = theta1_v / (sg * mu);
    let p = theta1 * theta2 / 6.0;
    Ok((xi1_theta2 + p, xi2_theta1 - p))
}
