//! The one-dimensional profiles the coefficient is assembled from, written
//! once over [`Real`] so that values and exact derivatives share a formula.

use std::f64::consts::PI;

use crate::taylor::Real;

/// Below this distance from the flat ends, the blender is treated as exactly
/// flat: `exp(-700)` is already below the smallest normal `f64`.
const FLAT_EDGE: f64 = 1.0 / 700.0;

/// `f(x) = -(1/64) sin⁴x - (1/4) sin 2x`, π-periodic with `f(πz) = 0`.
pub fn f<R: Real>(x: R) -> R {
    let s = x.sin();
    let s2 = s.clone() * s;
    let sin2x = (x * 2.0).sin();
    -(s2.clone() * s2) * (1.0 / 64.0) - sin2x * 0.25
}

/// An antiderivative of `f`, vanishing at `0`.
pub fn f_antiderivative(x: f64) -> f64 {
    -3.0 * x / 512.0 + (2.0 * x).sin() / 256.0 - (4.0 * x).sin() / 2048.0 + ((2.0 * x).cos() - 1.0) / 8.0
}

/// `B(y) = σ(y) / (σ(y) + σ(1-y))` with `σ(y) = exp(-1/y)` for `y > 0`.
/// Zero for `y <= 0`, one for `y >= 1`, strictly increasing in between.
pub fn blender<R: Real>(y: R) -> R {
    let v = y.value();
    if v <= FLAT_EDGE {
        return y.lift(0.0);
    }
    if v >= 1.0 - FLAT_EDGE {
        return y.lift(1.0);
    }
    let one_minus = y.lift(1.0) - y.clone();
    // B = 1 / (1 + exp(1/y - 1/(1-y)))
    let e = (y.recip() - one_minus.recip()).exp();
    (e + 1.0).recip()
}

/// The monotone junction `h = B`.
pub fn h<R: Real>(y: R) -> R {
    blender(y)
}

/// Entry junction on `[0, π]`: `g₁(y) = f(y - π) B(y/π)`.
pub fn g1<R: Real>(y: R) -> R {
    let b = blender(y.clone() * (1.0 / PI));
    f(y - PI) * b
}

/// Exit junction on `[0, π]`: `g₂(y) = f(y) (1 - B(y/π))`.
pub fn g2<R: Real>(y: R) -> R {
    let b = blender(y.clone() * (1.0 / PI));
    f(y.clone()) * (y.lift(1.0) - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taylor::Taylor;

    #[test]
    fn f_vanishes_on_multiples_of_pi() {
        for z in -3..=12 {
            assert!(f(PI * z as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn f_is_bounded_by_half() {
        let m = (0..100_000).map(|i| f(PI * i as f64 / 100_000.0).abs()).fold(0.0, f64::max);
        assert!(m <= 0.5 && m > 0.25);
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        let gl = crate::quadrature::GaussLegendre::new(16);
        for x in [0.3, 1.0, 2.5, 7.0] {
            let q = gl.integrate(|t| f(t), 0.0, x, 16);
            assert!((f_antiderivative(x) - q).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn blender_properties() {
        assert_eq!(blender(-1.0), 0.0);
        assert_eq!(blender(0.0), 0.0);
        assert_eq!(blender(1.0), 1.0);
        assert!((blender(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 1..1000 {
            let v = blender(i as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
        for y in [0.1, 0.37, 0.8] {
            assert!((blender(y) + blender(1.0 - y) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn junction_jets_match_f_at_the_inner_seams() {
        let order = 5;
        let g = g1(Taylor::variable(PI, order)).derivatives();
        let ff = f(Taylor::variable(0.0, order)).derivatives();
        assert_eq!(g, ff);
        let g = g2(Taylor::variable(0.0, order)).derivatives();
        assert_eq!(g, ff);
        let z = g1(Taylor::variable(0.0, order)).derivatives();
        assert!(z.iter().all(|v| *v == 0.0));
        let z = g2(Taylor::variable(PI, order)).derivatives();
        assert!(z.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn junctions_bounded_by_half() {
        for i in 0..=2000 {
            let y = PI * i as f64 / 2000.0;
            assert!(g1(y).abs() <= 0.5 && g2(y).abs() <= 0.5);
        }
    }
}
