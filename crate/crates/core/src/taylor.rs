//! Truncated univariate Taylor arithmetic.
//!
//! Curve-generated catalog surfaces (revolution, cone, cylinder) depend on a
//! single profile parameter. Evaluating their profile with [`Taylor`] numbers
//! yields exact derivatives up to fourth order, which the curvature jets and
//! ridge classification need.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of stored coefficients: value plus four derivatives.
pub const ORDER: usize = 5;

const FACTORIAL: [f64; ORDER] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Truncated power series `sum c[k] (x - x0)^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Taylor {
    c: [f64; ORDER],
}

impl Taylor {
    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = value;
        Self { c }
    }

    /// The independent variable expanded at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; ORDER];
        c[0] = x0;
        c[1] = 1.0;
        Self { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * FACTORIAL[k]
    }

    pub fn sqrt(self) -> Self {
        let mut r = [0.0; ORDER];
        r[0] = self.c[0].sqrt();
        for k in 1..ORDER {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= r[j] * r[k - j];
            }
            r[k] = acc / (2.0 * r[0]);
        }
        Self { c: r }
    }

    /// Simultaneous sine and cosine.
    pub fn sin_cos(self) -> (Self, Self) {
        let mut s = [0.0; ORDER];
        let mut c = [0.0; ORDER];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..ORDER {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                ds += w * c[k - j];
                dc -= w * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Self { c: s }, Self { c })
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    pub fn recip(self) -> Self {
        Taylor::constant(1.0) / self
    }

    pub fn powi(self, n: u32) -> Self {
        let mut out = Taylor::constant(1.0);
        for _ in 0..n {
            out = out * self;
        }
        out
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        Taylor { c }
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c) {
            *a -= b;
        }
        Taylor { c }
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        Taylor { c: self.c.map(|x| -x) }
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let mut c = [0.0; ORDER];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck += self.c[j] * rhs.c[k - j];
            }
        }
        Taylor { c }
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, rhs: Taylor) -> Taylor {
        let mut c = [0.0; ORDER];
        for k in 0..ORDER {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= rhs.c[j] * c[k - j];
            }
            c[k] = acc / rhs.c[0];
        }
        Taylor { c }
    }
}

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: f64) -> Taylor {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: f64) -> Taylor {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: f64) -> Taylor {
        Taylor { c: self.c.map(|x| x * rhs) }
    }
}

impl Div<f64> for Taylor {
    type Output = Taylor;
    fn div(self, rhs: f64) -> Taylor {
        Taylor { c: self.c.map(|x| x / rhs) }
    }
}

impl Add<Taylor> for f64 {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        rhs + self
    }
}

impl Sub<Taylor> for f64 {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        -rhs + self
    }
}

impl Mul<Taylor> for f64 {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        rhs * self
    }
}

/// Three-component vector of Taylor numbers, used for curve derivatives.
#[derive(Debug, Clone, Copy)]
pub struct TaylorVec3(pub [Taylor; 3]);

impl TaylorVec3 {
    pub fn dot(&self, o: &TaylorVec3) -> Taylor {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &TaylorVec3) -> TaylorVec3 {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        TaylorVec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    /// Termwise derivative with respect to the expansion variable.
    pub fn differentiate(&self) -> TaylorVec3 {
        TaylorVec3(self.0.map(|t| t.differentiate()))
    }

    pub fn values(&self) -> [f64; 3] {
        self.0.map(|t| t.value())
    }
}

impl Taylor {
    /// Series of the derivative; the top coefficient is lost.
    pub fn differentiate(&self) -> Taylor {
        let mut c = [0.0; ORDER];
        for k in 0..ORDER - 1 {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Taylor { c }
    }
}
