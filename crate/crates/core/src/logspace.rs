//! Signed numbers stored as `sign * exp(ln_abs)`.
//!
//! The derivative-loss construction manipulates quantities such as
//! `exp(lambda^theta * s)` with `ln lambda` in the hundreds of millions, so
//! every comparison in that module goes through this type.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A real number `sign * exp(ln_abs)`; zero has sign 0.
#[derive(Clone, Copy, PartialEq)]
pub struct SignedLog {
    sign: i8,
    ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, ln_abs: f64::NEG_INFINITY };
    pub const ONE: SignedLog = SignedLog { sign: 1, ln_abs: 0.0 };

    /// `exp(x)` for any finite `x`.
    pub fn exp(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        SignedLog { sign: 1, ln_abs: x }
    }

    /// `sign * exp(ln_abs)`; a zero sign gives zero.
    pub fn from_parts(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog { sign: sign.signum(), ln_abs }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: if x > 0.0 { 1 } else { -1 }, ln_abs: x.abs().ln() }
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// `ln |x|`, `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        self.ln_abs
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(self) -> bool {
        self.sign > 0
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            SignedLog { sign: 1, ln_abs: self.ln_abs }
        }
    }

    /// Linear value; overflows to `±inf` and underflows to `±0`.
    pub fn to_f64(self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }

    /// Linear value when it is a normal finite float.
    pub fn to_f64_checked(self) -> Option<f64> {
        let x = self.to_f64();
        (x.is_finite() && (x == 0.0) == self.is_zero() && (x == 0.0 || x.is_normal())).then_some(x)
    }

    /// `x^p` for `x > 0` (and `0^p = 0` for `p > 0`).
    pub fn powf(self, p: f64) -> Self {
        match self.sign {
            0 => Self::ZERO,
            1 => SignedLog { sign: 1, ln_abs: self.ln_abs * p },
            _ => panic!("SignedLog::powf on a negative number"),
        }
    }

    pub fn scale(self, k: f64) -> Self {
        self * SignedLog::from_f64(k)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Default for SignedLog {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s > 0 { "" } else { "-" }, self.ln_abs),
        }
    }
}

impl fmt::Display for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for SignedLog {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SignedLog", 2)?;
        st.serialize_field("sign", &self.sign)?;
        st.serialize_field("ln_abs", &(!self.is_zero()).then_some(self.ln_abs))?;
        st.end()
    }
}

impl Neg for SignedLog {
    type Output = Self;
    fn neg(self) -> Self {
        SignedLog { sign: -self.sign, ln_abs: self.ln_abs }
    }
}

impl Mul for SignedLog {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        SignedLog { sign: self.sign * rhs.sign, ln_abs: self.ln_abs + rhs.ln_abs }
    }
}

impl Div for SignedLog {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "SignedLog division by zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        SignedLog { sign: self.sign * rhs.sign, ln_abs: self.ln_abs - rhs.ln_abs }
    }
}

impl Add for SignedLog {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_abs >= rhs.ln_abs { (self, rhs) } else { (rhs, self) };
        let d = small.ln_abs - big.ln_abs;
        if big.sign == small.sign {
            SignedLog { sign: big.sign, ln_abs: big.ln_abs + d.exp().ln_1p() }
        } else if d == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: big.sign, ln_abs: big.ln_abs + (-d.exp_m1()).ln() }
        }
    }
}

impl Sub for SignedLog {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl PartialOrd for SignedLog {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.ln_abs.partial_cmp(&other.ln_abs),
                _ => other.ln_abs.partial_cmp(&self.ln_abs),
            },
            ord => Some(ord),
        }
    }
}

impl std::iter::Sum for SignedLog {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum exp(x_i))`; `-inf` for an empty input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    if hi == f64::INFINITY {
        return hi;
    }
    hi + xs.iter().map(|x| (x - hi).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn arithmetic_matches_f64() {
        let xs = [-7.5, -1.0, -1e-3, 0.0, 2e-4, 1.0, 3.25, 1e10];
        for &a in &xs {
            for &b in &xs {
                let (la, lb) = (SignedLog::from_f64(a), SignedLog::from_f64(b));
                assert!(close((la + lb).to_f64(), a + b, 1e-13), "{a}+{b}");
                assert!(close((la - lb).to_f64(), a - b, 1e-13), "{a}-{b}");
                assert!(close((la * lb).to_f64(), a * b, 1e-14), "{a}*{b}");
                if b != 0.0 {
                    assert!(close((la / lb).to_f64(), a / b, 1e-14));
                }
                assert_eq!(la.partial_cmp(&lb), a.partial_cmp(&b), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn cancellation_is_exact_zero() {
        let x = SignedLog::exp(1234.5);
        assert!((x - x).is_zero());
    }

    #[test]
    fn huge_magnitudes_compare() {
        let a = SignedLog::exp(1e9);
        let b = SignedLog::exp(1e9 + 1.0);
        assert!(a < b);
        assert!(-a > -b);
        let s = a + b;
        assert!(close(s.ln_abs(), 1e9 + 1.0 + (-1.0f64).exp().ln_1p(), 1e-15));
    }

    #[test]
    fn lse() {
        assert!(close(log_sum_exp([0.0, 0.0]), 2f64.ln(), 1e-15));
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
        assert!(close(log_add_exp(1000.0, 1000.0), 1000.0 + 2f64.ln(), 1e-15));
    }
}
