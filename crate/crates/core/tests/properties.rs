use proptest::prelude::*;

use strongdamp::coefficients::{
    approximate_coefficient, estimate_glaeser, psi_smoother, psi_smoother_derivative, GlaeserEstimate, Scheme,
};
use strongdamp::counterexample::{check_conditions, select_sequences, CounterexampleParams, SequenceCondition};
use strongdamp::energy::{choose_constants, energy_gamma, optimal_r};
use strongdamp::spectral::{norm, NormSpec, SpectralOperator, SpectralVector};
use strongdamp::{integrate, integrate_with, Coefficient, IntegrationOptions, ModalProblem, Regularity};

fn family(which: u8, reg: Regularity) -> Coefficient {
    let c = match which {
        0 => Coefficient::power(1.0, 2.0, 1.0, reg),
        1 => Coefficient::power(0.5, 3.5, 1.0, reg),
        2 => Coefficient::sin_squared(1.0, 3.0, 1.0, reg),
        _ => Coefficient::constant(0.4, 1.0, reg),
    }
    .unwrap();
    if reg.k == 0 {
        let holder = [2.0, 1.75, 3.0, 0.0][which as usize];
        c.with_holder(holder).unwrap()
    } else {
        c
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coefficient_stays_in_range(which in 0u8..4, t in 0.0..1.0f64) {
        let c = family(which, Regularity::new(1, 1.0).unwrap());
        let v = c.value(t);
        prop_assert!(v >= 0.0 && v <= c.bound() * (1.0 + 1e-15));
    }

    #[test]
    fn antiderivative_matches_quadrature(which in 0u8..4, t in 0.01..1.0f64) {
        let c = family(which, Regularity::new(1, 1.0).unwrap());
        prop_assert_eq!(c.antiderivative(0.0), 0.0);
        let q = simpson(|s| c.value(s), 0.0, t, 2000);
        let a = c.antiderivative(t);
        prop_assert!((a - q).abs() <= 1e-10 * a.abs().max(1e-3), "{} vs {}", a, q);
        prop_assert!(c.antiderivative(t * 0.99) <= a);
    }

    #[test]
    fn approximation_inequalities(which in 0u8..4, k in 0u32..3, log_lambda in 1.0..4.0f64, t in 0.0..1.0f64) {
        let reg = Regularity::new(k, 1.0).unwrap();
        let c = family(which, reg);
        let approx = approximate_coefficient(&c, 10f64.powf(log_lambda)).unwrap();
        let acc = approx.accuracy();
        let cv = c.value(t);
        let err = (cv - approx.gamma(t)).abs();
        prop_assert!(err <= acc + 1e-12);
        prop_assert!(err * err <= cv * acc + 1e-12);
        if c.value(0.0) == 0.0 {
            prop_assert_eq!(approx.gamma(0.0), 0.0);
        }
        prop_assert!(approx.gamma(t) >= 0.0);
    }

    #[test]
    fn mollifier_accuracy(which in 0u8..3, log_lambda in 1.0..4.0f64, t in 0.0..1.0f64) {
        let c = family(which, Regularity::new(0, 1.0).unwrap());
        let approx = approximate_coefficient(&c, 10f64.powf(log_lambda)).unwrap();
        let Scheme::Mollified { epsilon: Some(eps), holder, .. } = approx.scheme() else {
            return Err(TestCaseError::fail("expected a mollified scheme"));
        };
        // α = 1: |ĉ - c| <= Hε and |ĉ'| <= H
        let m = approx.mollified(t).unwrap();
        prop_assert!((m - c.value(t)).abs() <= holder * eps + 1e-12);
        prop_assert!(approx.mollified_derivative(t).unwrap().abs() <= holder + 1e-9);
    }

    #[test]
    fn smoother_shape(log_eps in -8.0..0.0f64, x in 0.0..2.0f64) {
        let e = 10f64.powf(log_eps);
        let p = psi_smoother(e, x);
        prop_assert!(p >= 0.0 && p <= x);
        prop_assert!(x - p <= e * (1.0 + 1e-12));
        let d = psi_smoother_derivative(e, x);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn glaeser_constant_bounds_the_ratio(which in 0u8..3, t in 0.0..1.0f64) {
        let c = family(which, Regularity::new(1, 1.0).unwrap());
        let g = estimate_glaeser(&c, 4000).unwrap();
        let k = g.k_constant().unwrap();
        let d = c.derivatives(t, 1).unwrap();
        // grid estimate: allow the sup between nodes to exceed it slightly
        prop_assert!(d[1].abs() <= 1.01 * k * d[0].sqrt() + 1e-12);
    }

    #[test]
    fn glaeser_weight_integral_is_monotone(which in 0u8..3) {
        let c = family(which, Regularity::new(2, 1.0).unwrap());
        let g = estimate_glaeser(&c, 1000).unwrap();
        let GlaeserEstimate::Function { .. } = g else {
            return Err(TestCaseError::fail("expected a weight"));
        };
        prop_assert_eq!(g.big_phi(0.0), 0.0);
        let vals: Vec<f64> = (0..=100).map(|i| g.big_phi(i as f64 / 100.0)).collect();
        prop_assert!(vals.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn constants_respect_their_inequalities(delta in 0.05..4.0f64, mu in 0.01..10.0f64) {
        let (r, _) = optimal_r(delta, mu);
        prop_assert!(2.0 * r * mu <= delta * (1.0 + 1e-15));
        prop_assert!(16.0 * r * (delta * delta + mu) <= delta * (1.0 + 1e-15));
        prop_assert!(64.0 * r * r * mu <= 1.0 + 1e-15);
    }

    #[test]
    fn frequency_floor_holds(delta in 0.1..4.0f64, sigma in 0.26..0.5f64) {
        let reg = Regularity::new(1, 1.0).unwrap();
        let c = family(0, reg);
        let g = estimate_glaeser(&c, 2000).unwrap();
        let p = choose_constants(delta, sigma, &c, Some(&g)).unwrap();
        let gap = 2.0 * sigma - p.theta;
        prop_assert!(p.nu >= 1.0);
        prop_assert!(delta * p.nu.powf(gap) >= 4.0 * (1.0 - 1e-12));
        prop_assert!(delta * p.nu.powf(gap) >= 8.0 * g.k_constant().unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn energy_sandwich(
        delta in 0.0..3.0f64, sigma in 0.0..0.5f64, lambda in 0.0..1e4f64,
        gamma in 0.0..2.0f64, u in -10.0..10.0f64, du in -10.0..10.0f64,
    ) {
        let e = energy_gamma(delta, sigma, lambda, gamma, u, du);
        let k2 = delta * delta * lambda.powf(4.0 * sigma);
        let g = gamma * lambda * lambda * u * u;
        let lo = 0.5 * du * du + 0.5 * k2 * u * u + g;
        let hi = 1.5 * du * du + 1.5 * k2 * u * u + g;
        let tol = 1e-12 * hi.max(1.0);
        prop_assert!(lo <= e + tol && e <= hi + tol, "{} <= {} <= {}", lo, e, hi);
    }

    #[test]
    fn constant_speed_matches_exact_solution(
        lambda in 1.0..40.0f64, level in 0.1..1.0f64, delta in 0.05..1.0f64, sigma in 0.0..0.5f64,
        u0 in -1.0..1.0f64, u1 in -1.0..1.0f64,
    ) {
        let d = delta * lambda.powf(2.0 * sigma);
        let w2 = lambda * lambda * level;
        let disc = d * d - w2;
        prop_assume!(disc.abs() > 1e-2 * w2);
        let c = Coefficient::constant(level, 2.0, Regularity::new(1, 1.0).unwrap()).unwrap();
        let times: Vec<f64> = (0..=40).map(|i| 2.0 * i as f64 / 40.0).collect();
        let p = ModalProblem::new(lambda, delta, sigma, c, (u0, u1), (0.0, 2.0)).unwrap();
        let tol = 1e-10;
        let traj = integrate_with(&p, &IntegrationOptions::new(tol, 1e-12).times(times)).unwrap();
        for i in 0..traj.len() {
            let t = traj.times[i];
            // u = e^{-dt}(A f(t) + B g(t)) with f, g the two real fundamental solutions
            let (u, du) = if disc > 0.0 {
                let q = disc.sqrt();
                let (r1, r2) = (-d + q, -d - q);
                let b = (u1 - r1 * u0) / (r2 - r1);
                let a = u0 - b;
                (a * (r1 * t).exp() + b * (r2 * t).exp(), a * r1 * (r1 * t).exp() + b * r2 * (r2 * t).exp())
            } else {
                let w = (-disc).sqrt();
                let (s, co) = (w * t).sin_cos();
                let b = (u1 + d * u0) / w;
                let e = (-d * t).exp();
                (e * (u0 * co + b * s), e * ((-d * u0 + b * w) * co + (-d * b - u0 * w) * s))
            };
            let scale = u0.abs() + u1.abs() / lambda + 1e-3;
            prop_assert!((traj.u_value(i) - u).abs() <= 10.0 * tol * scale * lambda, "u at {}: {} vs {}", t, traj.u_value(i), u);
            prop_assert!((traj.du_value(i) - du).abs() <= 10.0 * tol * scale * lambda * lambda, "du at {}", t);
        }
    }

    #[test]
    fn damping_only_removes_energy(lambda in 1.0..100.0f64, level in 0.1..1.0f64, delta in 0.01..1.0f64, sigma in 0.0..0.5f64) {
        let c = Coefficient::constant(level, 1.0, Regularity::new(1, 1.0).unwrap()).unwrap();
        let p = ModalProblem::new(lambda, delta, sigma, c, (1.0, 0.5), (0.0, 1.0)).unwrap();
        let traj = integrate(&p, 1e-10, 1e-14).unwrap();
        let e: Vec<f64> =
            (0..traj.len()).map(|i| traj.du_value(i).powi(2) + lambda * lambda * level * traj.u_value(i).powi(2)).collect();
        let e0 = e[0];
        for w in e.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-7 * e0, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn forward_then_backward_returns(lambda in 1.0..50.0f64, delta in 0.01..0.5f64, sigma in 0.0..0.5f64, u0 in -1.0..1.0f64) {
        let c = Coefficient::sin_squared(1.0, 2.0, 1.0, Regularity::new(1, 1.0).unwrap()).unwrap();
        let tol = 1e-11;
        let fwd = ModalProblem::new(lambda, delta, sigma, c.clone(), (u0, 1.0), (0.0, 0.5)).unwrap();
        let a = integrate(&fwd, tol, 1e-14).unwrap();
        let last = a.len() - 1;
        let end = (a.u_value(last), a.du_value(last));
        let bwd = ModalProblem::new(lambda, delta, sigma, c, end, (0.0, 0.5)).unwrap().backward();
        let b = integrate(&bwd, tol, 1e-14).unwrap();
        let i0 = (0..b.len()).min_by(|&i, &j| b.times[i].total_cmp(&b.times[j])).unwrap();
        prop_assert_eq!(b.times[i0], 0.0);
        // backward integration amplifies by the damping factor it undoes
        let amp = (2.0 * delta * lambda.powf(2.0 * sigma) * 0.5).exp();
        let scale = 100.0 * tol * amp * (1.0 + lambda);
        prop_assert!((b.u_value(i0) - u0).abs() <= scale, "{} vs {}", b.u_value(i0), u0);
        prop_assert!((b.du_value(i0) - 1.0).abs() <= scale * lambda);
    }

    #[test]
    fn norm_inclusions_and_scales(
        u in prop::collection::vec(-5.0..5.0f64, 1..24),
        alpha in -1.0..2.0f64, order in 1.0..4.0f64, radius in 0.01..1.0f64,
    ) {
        let lambdas: Vec<f64> = (0..u.len()).map(|i| 0.5 + 2.0 * i as f64).collect();
        let op = SpectralOperator::new(lambdas).unwrap();
        let v = SpectralVector::from_linear(&u).unwrap();
        let ln = |spec: NormSpec| norm(&op, &v, &spec).unwrap().log_norm_sq;
        prop_assume!(u.iter().any(|x| *x != 0.0));
        let sob = ln(NormSpec::Sobolev { alpha });
        let gev = ln(NormSpec::Gevrey { alpha, order, radius });
        let ultra = ln(NormSpec::Ultradistribution { alpha, order, radius });
        prop_assert!(gev >= sob && sob >= ultra);
        let wider = ln(NormSpec::Gevrey { alpha, order, radius: 2.0 * radius });
        let narrower = ln(NormSpec::Ultradistribution { alpha, order, radius: 2.0 * radius });
        prop_assert!(wider >= gev && narrower <= ultra);
        let plain: f64 = u.iter().map(|x| x * x).sum();
        let l2 = norm(&op, &v, &NormSpec::Sobolev { alpha: 0.0 }).unwrap();
        prop_assert_eq!(l2.linear, Some(plain));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn selected_sequences_satisfy_conditions(
        delta in 0.5..2.0f64, k in 0u32..3, alpha in 0.25..=1.0f64, fraction in 0.0..0.9f64, n_max in 1usize..5,
    ) {
        let threshold = 1.0 / (2.0 + k as f64 + alpha);
        let params = CounterexampleParams { delta, sigma: fraction * threshold, k, alpha, n_max, ..Default::default() };
        let bundle = select_sequences(&params).unwrap();
        prop_assert_eq!(bundle.blocks.len(), n_max + 1);
        prop_assert!(check_conditions(&bundle).iter().all(|c| c.holds));
        let theta = bundle.theta;
        for (n, b) in bundle.blocks.iter().enumerate() {
            prop_assert!(b.theta_n < theta);
            prop_assert!((1.0..=1.5).contains(&b.level()));
            // s'_n - s_n = π/λ_n^θ is below the resolution of ln s_n once J_n is huge
            prop_assert!(b.log_t_prime < b.log_t && b.log_t < b.log_s && b.log_s <= b.log_s_prime);
            prop_assert!(b.periods.ln_plus(1.0) >= b.periods.ln);
            if let Some(next) = bundle.blocks.get(n + 1) {
                prop_assert!(next.log_s_prime < b.log_t_prime);
                prop_assert!(next.theta_n > b.theta_n);
            }
            // doubling λ_n keeps every condition
            let ctx = bundle.context(n);
            for cond in SequenceCondition::ALL.iter().filter(|c| c.applies(n)) {
                let (lhs, rhs) = cond.log_sides(&ctx, b.log_lambda + 2f64.ln());
                prop_assert!(lhs >= rhs, "{} fails after doubling λ_{}", cond.name(), n);
            }
        }
        prop_assert!(bundle.epsilon == 1.0 / 32.0);
    }
}
