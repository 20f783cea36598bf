//! Dormand-Prince 5(4) stepper with the standard continuous extension.
//! Fields are autonomous, so stage times are not needed.

use crate::error::Result;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

pub type Vector<const N: usize> = [f64; N];

fn axpy<const N: usize>(y: &Vector<N>, h: f64, terms: &[(f64, &Vector<N>)]) -> Vector<N> {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Result of one attempted step.
#[derive(Debug, Clone)]
pub struct Attempt<const N: usize> {
    pub y_new: Vector<N>,
    /// Derivative at the new point (first stage of the next step).
    pub k_new: Vector<N>,
    /// Scaled error norm; the step is acceptable when it is at most 1.
    pub error: f64,
    pub dense: Dense<N>,
}

/// Quartic interpolant over one accepted step.
#[derive(Debug, Clone)]
pub struct Dense<const N: usize> {
    pub t0: f64,
    pub h: f64,
    r: [Vector<N>; 5],
}

impl<const N: usize> Dense<N> {
    pub fn eval(&self, t: f64) -> Vector<N> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            let [r1, r2, r3, r4, r5] = &self.r;
            *o = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
        out
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Tolerance settings shared by the step attempts.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

/// Attempts a step of size `h` from `(t, y)` where `k1 = f(y)`.
pub fn attempt<const N: usize, F>(f: &F, t: f64, y: &Vector<N>, k1: &Vector<N>, h: f64, tol: Tolerance) -> Result<Attempt<N>>
where
    F: Fn(&Vector<N>) -> Result<Vector<N>>,
{
    let k2 = f(&axpy(y, h, &[(A21, k1)]))?;
    let k3 = f(&axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(&axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(&axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
    let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(&y_new)?;
    let err = axpy(&[0.0; N], h, &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
    let mut sum = 0.0;
    for i in 0..N {
        let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
        sum += (err[i] / sc).powi(2);
    }
    let error = (sum / N as f64).sqrt();
    let mut ydiff = [0.0; N];
    let mut bspl = [0.0; N];
    let mut r4 = [0.0; N];
    for i in 0..N {
        ydiff[i] = y_new[i] - y[i];
        bspl[i] = h * k1[i] - ydiff[i];
        r4[i] = ydiff[i] - h * k7[i] - bspl[i];
    }
    let r5 = axpy(&[0.0; N], h, &[(D1, k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)]);
    Ok(Attempt {
        y_new,
        k_new: k7,
        error,
        dense: Dense { t0: t, h, r: [*y, ydiff, bspl, r4, r5] },
    })
}

/// Step-size factor from an error norm (order-5 controller).
pub fn step_factor(error: f64) -> f64 {
    if error == 0.0 {
        return 5.0;
    }
    (0.9 * error.powf(-0.2)).clamp(0.2, 5.0)
}

/// Fixed-step classical RK4, used for short local probes.
pub fn rk4<const N: usize, F>(f: &F, y: &Vector<N>, h: f64) -> Result<Vector<N>>
where
    F: Fn(&Vector<N>) -> Result<Vector<N>>,
{
    let k1 = f(y)?;
    let k2 = f(&axpy(y, 0.5 * h, &[(1.0, &k1)]))?;
    let k3 = f(&axpy(y, 0.5 * h, &[(1.0, &k2)]))?;
    let k4 = f(&axpy(y, h, &[(1.0, &k3)]))?;
    Ok(axpy(y, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)]))
}
