//! Small numerical kernels: Richardson differences, bracketed root refinement
//! and adaptive Gauss-Kronrod quadrature with endpoint substitution.

use crate::error::{Error, Result};

/// Central first derivative with one Richardson extrapolation step.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Central second derivative with one Richardson extrapolation step.
pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let f0 = f(x);
    let d = |h: f64| (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Five-point stencil derivatives from samples at offsets `-2h, -h, 0, h, 2h`.
/// Returns (first, second, third) derivative estimates.
pub fn stencil5(y: [f64; 5], h: f64) -> (f64, f64, f64) {
    let [ym2, ym1, y0, yp1, yp2] = y;
    let d1 = (ym2 - 8.0 * ym1 + 8.0 * yp1 - yp2) / (12.0 * h);
    let d2 = (-ym2 + 16.0 * ym1 - 30.0 * y0 + 16.0 * yp1 - yp2) / (12.0 * h * h);
    let d3 = (-ym2 + 2.0 * ym1 - 2.0 * yp1 + yp2) / (2.0 * h * h * h);
    (d1, d2, d3)
}

/// Refines a sign-changing bracket `[a, b]` of `f` with the Illinois variant
/// of regula falsi, falling back to bisection when progress stalls.
pub fn refine_root<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidParameters(format!(
            "no sign change on [{a}, {b}]"
        )));
    }
    let mut side = 0i8;
    for it in 0..200 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        // every fourth step is a plain bisection, which bounds the worst case
        if !c.is_finite() || it % 4 == 3 {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() < tol {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() < tol {
            return Ok(0.5 * (a + b));
        }
    }
    Err(Error::Budget("root refinement did not converge".into()))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Quadrature result with its accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

/// Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quad> {
    if a == b {
        return Ok(Quad { value: 0.0, error: 0.0 });
    }
    let mut stack = vec![(a, b, 0usize)];
    let mut value = 0.0;
    let mut error = 0.0;
    let span = (b - a).abs();
    let mut evals = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = kronrod15(&f, lo, hi);
        evals += 15;
        if !v.is_finite() {
            return Err(Error::Divergent(format!(
                "non-finite integrand on [{lo}, {hi}]"
            )));
        }
        let local_tol = tol * (hi - lo).abs() / span;
        if e <= local_tol.max(1e-15 * v.abs()) || depth >= 48 {
            value += v;
            error += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
        if evals > 4_000_000 {
            return Err(Error::Budget("quadrature evaluation budget".into()));
        }
    }
    Ok(Quad { value, error })
}

/// Integral over `(a, b)` of an integrand with at most inverse-square-root
/// singularities at the endpoints. Each half is mapped by
/// `x = endpoint ± t²`, which makes the transformed integrand bounded.
pub fn integrate_sqrt_ends<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quad> {
    let m = 0.5 * (a + b);
    let left = integrate(|t| 2.0 * t * f(a + t * t), 0.0, (m - a).sqrt(), 0.5 * tol)?;
    let right = integrate(|t| 2.0 * t * f(b - t * t), 0.0, (b - m).sqrt(), 0.5 * tol)?;
    Ok(Quad {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}
