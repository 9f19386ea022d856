use serde::Serialize;

/// Exact solution for `c ≡ 0`: `u = u0 - (e^{-2κt} - 1)/(2κ) u1`, `κ = δλ^{2σ}`.
/// Degenerates to free drift when `κ = 0`.
pub fn zero_speed_solution(delta: f64, sigma: f64, lambda: f64, u0: f64, u1: f64, t: f64) -> (f64, f64) {
    let kappa = delta * lambda.powf(2.0 * sigma);
    if kappa == 0.0 {
        return (u0 + u1 * t, u1);
    }
    let x = -2.0 * kappa * t;
    (u0 - x.exp_m1() / (2.0 * kappa) * u1, u1 * x.exp())
}

/// `γ(m, ε, λ, t) = m² + δ²λ^{4σ-2} - 16m²ε² sin⁴(mλt) - 8m²ε sin(2mλt)`.
pub fn block_gamma(m: f64, epsilon: f64, lambda: f64, delta: f64, sigma: f64, t: f64) -> f64 {
    let phase = m * lambda * t;
    let s = phase.sin();
    let s2 = s * s;
    m * m + delta * delta * lambda.powf(4.0 * sigma - 2.0)
        - 16.0 * m * m * epsilon * epsilon * s2 * s2
        - 8.0 * m * m * epsilon * (2.0 * phase).sin()
}

/// The explicit block solution `w = sin(mλt) e^{b(t)}` and its coefficient.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockSolution {
    pub w: f64,
    pub dw: f64,
    pub gamma: f64,
    /// `b(t) = (2mλε - δλ^{2σ})t - ε sin(2mλt)`.
    pub b: f64,
    /// `ln|w|`, finite even when `w` overflows.
    pub log_abs_w: f64,
    pub sign_w: i8,
    pub log_abs_dw: f64,
    pub sign_dw: i8,
}

pub fn counterexample_block_solution(m: f64, epsilon: f64, lambda: f64, delta: f64, sigma: f64, t: f64) -> BlockSolution {
    let omega = m * lambda;
    let damp = delta * lambda.powf(2.0 * sigma);
    let phase = omega * t;
    let (s, c) = phase.sin_cos();
    let (s2, c2) = (2.0 * phase).sin_cos();
    let b = (2.0 * omega * epsilon - damp) * t - epsilon * s2;
    let db = 2.0 * omega * epsilon - damp - 2.0 * omega * epsilon * c2;
    let amp = omega * c + db * s;
    let signed_log = |x: f64| -> (f64, i8) {
        if x == 0.0 {
            (f64::NEG_INFINITY, 0)
        } else {
            (x.abs().ln() + b, if x > 0.0 { 1 } else { -1 })
        }
    };
    let (log_abs_w, sign_w) = signed_log(s);
    let (log_abs_dw, sign_dw) = signed_log(amp);
    let eb = b.exp();
    BlockSolution {
        w: s * eb,
        dw: amp * eb,
        gamma: block_gamma(m, epsilon, lambda, delta, sigma, t),
        b,
        log_abs_w,
        sign_w,
        log_abs_dw,
        sign_dw,
    }
}
