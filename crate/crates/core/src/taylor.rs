//! Truncated Taylor series for exact higher derivatives of the closed-form
//! profiles, plus a small scalar trait so the same formula serves both plain
//! evaluation and differentiation.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar operations shared by `f64` and [`Taylor`].
pub trait Real:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn value(&self) -> f64;
    /// A constant with the same shape as `self`.
    fn lift(&self, c: f64) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    fn exp(&self) -> Self;

    fn sin(&self) -> Self {
        self.sin_cos().0
    }

    fn recip(&self) -> Self {
        self.lift(1.0) / self.clone()
    }
}

impl Real for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
}

/// Normalised Taylor coefficients `c_k = f^(k)(x0) / k!`.
#[derive(Clone, Debug, PartialEq)]
pub struct Taylor {
    coeffs: Vec<f64>,
}

impl Taylor {
    /// The identity `x` expanded at `x0` up to `order`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = x0;
        if order > 0 {
            coeffs[1] = 1.0;
        }
        Taylor { coeffs }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Taylor { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `f^(j)(x0)`.
    pub fn derivative(&self, j: usize) -> f64 {
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        self.coeffs[j] * fact
    }

    /// All derivatives `f, f', ..., f^(order)`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order()).map(|j| self.derivative(j)).collect()
    }

    fn zip(self, rhs: Taylor, op: impl Fn(f64, f64) -> f64) -> Taylor {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "Taylor order mismatch");
        Taylor { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| op(*a, *b)).collect() }
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let n = self.coeffs.len();
        assert_eq!(n, rhs.coeffs.len(), "Taylor order mismatch");
        let coeffs = (0..n).map(|k| (0..=k).map(|i| self.coeffs[i] * rhs.coeffs[k - i]).sum()).collect();
        Taylor { coeffs }
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, rhs: Taylor) -> Taylor {
        let n = self.coeffs.len();
        assert_eq!(n, rhs.coeffs.len(), "Taylor order mismatch");
        let b0 = rhs.coeffs[0];
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|j| rhs.coeffs[j] * q[k - j]).sum();
            q[k] = (self.coeffs[k] - s) / b0;
        }
        Taylor { coeffs: q }
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(mut self) -> Taylor {
        self.coeffs.iter_mut().for_each(|c| *c = -*c);
        self
    }
}

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: f64) -> Taylor {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: f64) -> Taylor {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(mut self, rhs: f64) -> Taylor {
        self.coeffs.iter_mut().for_each(|c| *c *= rhs);
        self
    }
}

impl Real for Taylor {
    fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn lift(&self, c: f64) -> Self {
        Taylor::constant(c, self.order())
    }

    fn sin_cos(&self) -> (Self, Self) {
        let a = &self.coeffs;
        let n = a.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        (s[0], c[0]) = a[0].sin_cos();
        for k in 1..n {
            let (mut ds, mut dc) = (0.0, 0.0);
            for j in 1..=k {
                ds += j as f64 * a[j] * c[k - j];
                dc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = -dc / k as f64;
        }
        (Taylor { coeffs: s }, Taylor { coeffs: c })
    }

    fn exp(&self) -> Self {
        let a = &self.coeffs;
        let n = a.len();
        let mut e = vec![0.0; n];
        e[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Taylor { coeffs: e }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_derivatives_cycle() {
        let x0 = 0.7;
        let (s, c) = Taylor::variable(x0, 5).sin_cos();
        let ds = s.derivatives();
        let expect = [x0.sin(), x0.cos(), -x0.sin(), -x0.cos(), x0.sin(), x0.cos()];
        for (a, b) in ds.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((c.derivative(1) + x0.sin()).abs() < 1e-14);
    }

    #[test]
    fn exp_of_reciprocal() {
        // d/dx exp(-1/x) = exp(-1/x)/x^2
        let x0 = 0.4;
        let x = Taylor::variable(x0, 2);
        let e = (-x.recip()).exp();
        let v = (-1.0 / x0).exp();
        assert!((e.derivative(1) - v / (x0 * x0)).abs() < 1e-14);
        // second derivative: exp(-1/x) (1 - 2x) / x^4
        let d2 = v * (1.0 - 2.0 * x0) / x0.powi(4);
        assert!((e.derivative(2) - d2).abs() < 1e-12);
    }

    #[test]
    fn quotient_inverts_product() {
        let x = Taylor::variable(1.3, 6);
        let a = x.clone() * x.clone() + 2.0;
        let b = x.exp();
        let q = (a.clone() * b.clone()) / b;
        for (u, v) in q.coeffs().iter().zip(a.coeffs()) {
            assert!((u - v).abs() < 1e-13);
        }
    }
}
