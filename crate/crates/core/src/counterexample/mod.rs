//! The oscillating coefficient that defeats Gevrey well-posedness below the
//! threshold `σ < 1/(2+k+α)`, and the checks that back its claims.
//!
//! Eigenvalues grow so fast that almost every quantity is handled as a
//! logarithm; only the outermost block is ever sampled in physical time.

mod coefficient;
mod pathology;
mod regularity;
pub mod shapes;

use std::f64::consts::{LN_2, PI};
use std::io::Write;

use serde::{Deserialize, Serialize, Serializer};

use crate::coefficients::theta_exponent;
use crate::error::{invalid, Error, Result};
use crate::logspace::{log_add_exp, log_sum_exp, SignedLog};

pub use coefficient::{build_coefficient, write_coefficient_csv, BlockPiece, BlockShape, MatchedBlock, MaterializedProfile};
pub use pathology::{
    bundle_growth_exponent, pathology_demo, ModeIntegration, ModePathology, PathologyOptions, PathologyReport,
};
pub use regularity::{verify_regularity, BlockRegularity, BreakpointCheck, HolderPair, RegularityReport};

/// `ε` of the block solutions.
pub const EPSILON: f64 = 1.0 / 32.0;

/// Deepest supported construction.
pub const MAX_DEPTH: usize = 16;

/// How `θ_n ↑ θ` is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ThetaSchedule {
    /// `θ (1 - (n+2)^{-2})`.
    InverseSquare,
    /// `θ (1 - 1/(n+2))`.
    Harmonic,
    Explicit { values: Vec<f64> },
}

impl Default for ThetaSchedule {
    fn default() -> Self {
        ThetaSchedule::InverseSquare
    }
}

impl ThetaSchedule {
    pub fn value(&self, theta: f64, n: usize) -> f64 {
        let m = (n + 2) as f64;
        match self {
            ThetaSchedule::InverseSquare => theta * (1.0 - 1.0 / (m * m)),
            ThetaSchedule::Harmonic => theta * (1.0 - 1.0 / m),
            ThetaSchedule::Explicit { values } => values[n],
        }
    }

    fn validate(&self, theta: f64, n_max: usize) -> Result<()> {
        if let ThetaSchedule::Explicit { values } = self {
            if values.len() <= n_max {
                return Err(invalid("theta_sequence", format!("need {} values, got {}", n_max + 1, values.len())));
            }
            if values.iter().any(|t| !(*t > 0.0 && *t < theta)) || values.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(invalid("theta_sequence", format!("values must increase inside (0, {theta})")));
            }
        }
        Ok(())
    }
}

/// Candidate eigenvalues, scanned upward.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LambdaPool {
    /// `λ = 2^j`, `j = 0, 1, 2, ...`.
    PowersOfTwo,
    Explicit { values: Vec<f64> },
}

impl Default for LambdaPool {
    fn default() -> Self {
        LambdaPool::PowersOfTwo
    }
}

impl LambdaPool {
    fn log_lambda(&self, i: u64) -> Option<f64> {
        match self {
            LambdaPool::PowersOfTwo => (i < 1 << 62).then(|| i as f64 * LN_2),
            LambdaPool::Explicit { values } => values.get(i as usize).map(|v| v.ln()),
        }
    }

    fn validate(&self) -> Result<()> {
        if let LambdaPool::Explicit { values } = self {
            if values.iter().any(|v| !(v.is_finite() && *v >= 1.0)) || values.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(invalid("base_lambda_pool", "values must be finite, >= 1 and strictly increasing"));
            }
        }
        Ok(())
    }
}

fn one() -> f64 {
    1.0
}

fn default_depth() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleParams {
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub k: u32,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "default_depth")]
    pub n_max: usize,
    #[serde(default)]
    pub theta_sequence: ThetaSchedule,
    #[serde(default)]
    pub base_lambda_pool: LambdaPool,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        CounterexampleParams {
            delta: 1.0,
            sigma: 0.0,
            k: 0,
            alpha: 1.0,
            n_max: default_depth(),
            theta_sequence: ThetaSchedule::default(),
            base_lambda_pool: LambdaPool::default(),
        }
    }
}

impl CounterexampleParams {
    /// `θ = 2/(2+k+α)`, after checking every documented range.
    pub fn validate(&self) -> Result<f64> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(invalid("delta", format!("{} must be positive", self.delta)));
        }
        let theta = theta_exponent(self.k, self.alpha)?;
        let upper = theta / 2.0;
        if !(self.sigma >= 0.0 && self.sigma < upper) {
            return Err(Error::OutsideLossRegime { sigma: self.sigma, upper });
        }
        if self.n_max > MAX_DEPTH {
            return Err(invalid("n_max", format!("{} exceeds the supported depth {MAX_DEPTH}", self.n_max)));
        }
        self.theta_sequence.validate(theta, self.n_max)?;
        self.base_lambda_pool.validate()?;
        Ok(theta)
    }
}

/// The inductive requirements on the selected eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceCondition {
    /// `λ_n^{2(1-θ)} >= 2`
    AmplitudeFloor,
    /// `λ_n^{θ-2σ} >= 32δ`
    DampingGap,
    /// `λ_n^θ >= 5 λ_{n-1}^θ`
    FrequencyRatio,
    /// `2π^α λ_n^{2(1-θ)} >= 3 λ_{n-1}^{θα}`
    HolderGap,
    /// `πλ_n^θ >= 16λ_{n-1}^θ {(4δλ_n^{2σ} + λ_{n-1}² + 2) n + 3λ_n^{θ_n} + 4(1-θ) ln λ_n}`
    GrowthBudget,
}

impl SequenceCondition {
    pub const ALL: [SequenceCondition; 5] = [
        SequenceCondition::AmplitudeFloor,
        SequenceCondition::DampingGap,
        SequenceCondition::FrequencyRatio,
        SequenceCondition::HolderGap,
        SequenceCondition::GrowthBudget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SequenceCondition::AmplitudeFloor => "amplitude-floor",
            SequenceCondition::DampingGap => "damping-gap",
            SequenceCondition::FrequencyRatio => "frequency-ratio",
            SequenceCondition::HolderGap => "holder-gap",
            SequenceCondition::GrowthBudget => "growth-budget",
        }
    }

    /// Whether the condition is imposed at index `n`. The ratio condition is
    /// also imposed at `n = 0` against `λ_{-1} = 1`.
    pub fn applies(self, n: usize) -> bool {
        match self {
            SequenceCondition::AmplitudeFloor | SequenceCondition::DampingGap | SequenceCondition::FrequencyRatio => true,
            SequenceCondition::HolderGap | SequenceCondition::GrowthBudget => n >= 1,
        }
    }

    /// `(ln lhs, ln rhs)`.
    pub fn log_sides(self, ctx: &ConditionContext, log_lambda: f64) -> (f64, f64) {
        let ConditionContext { theta, theta_n, delta, sigma, alpha, n, log_prev } = *ctx;
        let l = log_lambda;
        match self {
            SequenceCondition::AmplitudeFloor => (2.0 * (1.0 - theta) * l, LN_2),
            SequenceCondition::DampingGap => ((theta - 2.0 * sigma) * l, (32.0 * delta).ln()),
            SequenceCondition::FrequencyRatio => (theta * l, 5f64.ln() + theta * log_prev),
            SequenceCondition::HolderGap => {
                (LN_2 + alpha * PI.ln() + 2.0 * (1.0 - theta) * l, 3f64.ln() + theta * alpha * log_prev)
            }
            SequenceCondition::GrowthBudget => {
                let nf = n as f64;
                let mut terms = vec![(3.0f64).ln() + theta_n * l];
                if n > 0 {
                    let ln_n = nf.ln();
                    terms.push((4.0 * delta).ln() + 2.0 * sigma * l + ln_n);
                    terms.push(2.0 * log_prev + ln_n);
                    terms.push(LN_2 + ln_n);
                }
                let log_term = 4.0 * (1.0 - theta) * l;
                if log_term > 0.0 {
                    terms.push(log_term.ln());
                }
                (PI.ln() + theta * l, 16f64.ln() + theta * log_prev + log_sum_exp(terms))
            }
        }
    }
}

/// Everything a sequence condition depends on besides `λ_n`.
#[derive(Clone, Copy, Debug)]
pub struct ConditionContext {
    pub theta: f64,
    pub theta_n: f64,
    pub delta: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub n: usize,
    pub log_prev: f64,
}

/// `J_n = ⌊2λ_n^θ/λ_{n-1}^θ⌋`, exact while it fits in the `f64` mantissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodCount {
    pub ln: f64,
    pub exact: Option<f64>,
}

impl PeriodCount {
    fn new(log_ratio: f64) -> Self {
        let ln_raw = LN_2 + log_ratio;
        if ln_raw < 36.0 {
            let j = (2.0 * log_ratio.exp()).floor();
            PeriodCount { ln: j.ln(), exact: Some(j) }
        } else {
            PeriodCount { ln: ln_raw, exact: None }
        }
    }

    /// `ln(J + a)` for small integers `a`.
    pub fn ln_plus(&self, a: f64) -> f64 {
        match self.exact {
            Some(j) => (j + a).ln(),
            None => self.ln + (a * (-self.ln).exp()).ln_1p(),
        }
    }
}

impl Serialize for PeriodCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LogLinear::new(self.ln).serialize(s)
    }
}

/// A positive quantity in log form plus its `f64` value when representable.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogLinear {
    pub log: f64,
    pub linear: Option<f64>,
}

impl LogLinear {
    pub fn new(log: f64) -> Self {
        let v = log.exp();
        LogLinear { log, linear: (v.is_finite() && v > 0.0).then_some(v) }
    }
}

/// One selected eigenvalue and the sequences attached to it.
#[derive(Clone, Debug)]
pub struct Block {
    pub n: usize,
    pub pool_index: u64,
    pub log_lambda: f64,
    pub theta_n: f64,
    /// `ln m_n`, `m_n = λ_n^{θ-1}`.
    pub log_m: f64,
    /// `ln M_n`, `M_n = m_n² + δ²λ_n^{4σ-2}`.
    pub log_big_m: f64,
    pub periods: PeriodCount,
    pub log_t: f64,
    pub log_s: f64,
    pub log_t_prime: f64,
    pub log_s_prime: f64,
    /// `ln a_n = ln m_n - ln(n+1) - θ ln λ_n - λ_n^{θ_n}`; astronomically negative.
    pub log_amplitude: SignedLog,
}

impl Block {
    /// `θ ln λ_n`, the log of the local frequency `λ_n^θ = m_nλ_n`.
    pub fn log_frequency(&self, theta: f64) -> f64 {
        theta * self.log_lambda
    }

    /// `λ_n` when it fits in an `f64`.
    pub fn lambda(&self) -> Option<f64> {
        LogLinear::new(self.log_lambda).linear
    }

    /// `M_n / m_n²`, which lies in `[1, 3/2]`.
    pub fn level(&self) -> f64 {
        (self.log_big_m - 2.0 * self.log_m).exp()
    }
}

#[derive(Serialize)]
struct BlockRecord {
    n: usize,
    pool_index: u64,
    lambda: LogLinear,
    theta_n: f64,
    m: LogLinear,
    big_m: LogLinear,
    periods: PeriodCount,
    t: LogLinear,
    s: LogLinear,
    t_prime: LogLinear,
    s_prime: LogLinear,
    amplitude_log: SignedLog,
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BlockRecord {
            n: self.n,
            pool_index: self.pool_index,
            lambda: LogLinear::new(self.log_lambda),
            theta_n: self.theta_n,
            m: LogLinear::new(self.log_m),
            big_m: LogLinear::new(self.log_big_m),
            periods: self.periods,
            t: LogLinear::new(self.log_t),
            s: LogLinear::new(self.log_s),
            t_prime: LogLinear::new(self.log_t_prime),
            s_prime: LogLinear::new(self.log_s_prime),
            amplitude_log: self.log_amplitude,
        }
        .serialize(s)
    }
}

/// Descriptions of the smooth junctions used between pieces.
#[derive(Clone, Debug, Serialize)]
pub struct JunctionDescriptors {
    pub blender: &'static str,
    pub g1: &'static str,
    pub g2: &'static str,
    pub h: &'static str,
}

impl Default for JunctionDescriptors {
    fn default() -> Self {
        JunctionDescriptors {
            blender: "B(y) = s(y) / (s(y) + s(1 - y)), s(y) = exp(-1/y) for y > 0, else 0",
            g1: "g1(y) = f(y - pi) B(y / pi) on [0, pi]",
            g2: "g2(y) = f(y) (1 - B(y / pi)) on [0, pi]",
            h: "h(y) = B(y)",
        }
    }
}

/// The selected subsequence with all derived sequences.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleBundle {
    pub params: CounterexampleParams,
    pub theta: f64,
    pub epsilon: f64,
    pub blocks: Vec<Block>,
    pub junctions: JunctionDescriptors,
}

impl CounterexampleBundle {
    pub fn n_max(&self) -> usize {
        self.blocks.len() - 1
    }

    /// `ln λ_{n-1}`, with `λ_{-1} = 1`.
    pub fn log_prev(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.blocks[n - 1].log_lambda
        }
    }

    pub fn context(&self, n: usize) -> ConditionContext {
        let p = &self.params;
        ConditionContext {
            theta: self.theta,
            theta_n: self.blocks[n].theta_n,
            delta: p.delta,
            sigma: p.sigma,
            alpha: p.alpha,
            n,
            log_prev: self.log_prev(n),
        }
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

/// Outcome of one sequence condition at one index.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub n: usize,
    pub condition: SequenceCondition,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub holds: bool,
}

/// Re-evaluates every applicable condition on the selected sequence.
pub fn check_conditions(bundle: &CounterexampleBundle) -> Vec<ConditionCheck> {
    let mut out = vec![];
    for b in &bundle.blocks {
        let ctx = bundle.context(b.n);
        for c in SequenceCondition::ALL {
            if c.applies(b.n) {
                let (log_lhs, log_rhs) = c.log_sides(&ctx, b.log_lambda);
                out.push(ConditionCheck { n: b.n, condition: c, log_lhs, log_rhs, holds: log_lhs >= log_rhs });
            }
        }
    }
    out
}

/// A spacing requirement between the time sequences, in log form.
#[derive(Clone, Debug, Serialize)]
pub struct GapCheck {
    pub n: usize,
    /// `"ordering"`, `"window"` (`s_n - t_n >= π/λ_{n-1}^θ`) or
    /// `"junction"` (`t'_n - s'_{n+1} >= 4π/(5λ_n^θ)`).
    pub name: &'static str,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub holds: bool,
}

/// Checks `s'_{n+1} < t'_n < t_n < s_n < s'_n` and both gap estimates.
pub fn check_gaps(bundle: &CounterexampleBundle) -> Vec<GapCheck> {
    let theta = bundle.theta;
    let mut out = vec![];
    let mut push = |n, name, log_lhs: f64, log_rhs: f64| {
        out.push(GapCheck { n, name, log_lhs, log_rhs, holds: log_lhs >= log_rhs });
    };
    for (n, b) in bundle.blocks.iter().enumerate() {
        let chain = [b.log_t_prime, b.log_t, b.log_s, b.log_s_prime];
        let ordered = chain.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let lf = theta * b.log_lambda;
        push(n, "ordering", ordered, 0.0);
        push(n, "window", b.periods.ln_plus(-4.0) - lf, -theta * bundle.log_prev(n));
        if let Some(next) = bundle.blocks.get(n + 1) {
            push(n, "ordering", b.log_t_prime - next.log_s_prime, 0.0);
            let dl = theta * (next.log_lambda - b.log_lambda);
            let q = (next.periods.ln_plus(1.0) - dl).exp();
            push(n, "junction", (3.0 - q).ln(), 0.8f64.ln());
        }
    }
    out
}

fn first_failure(ctx: &ConditionContext, log_lambda: f64) -> Option<SequenceCondition> {
    SequenceCondition::ALL.into_iter().filter(|c| c.applies(ctx.n)).find(|c| {
        let (l, r) = c.log_sides(ctx, log_lambda);
        l < r
    })
}

/// Inductively picks, for each `n <= n_max`, the smallest pool element above
/// `λ_{n-1}` that satisfies every applicable condition.
pub fn select_sequences(params: &CounterexampleParams) -> Result<CounterexampleBundle> {
    let theta = params.validate()?;
    let pool = &params.base_lambda_pool;
    let mut blocks: Vec<Block> = Vec::with_capacity(params.n_max + 1);
    let mut next_index = 0u64;
    for n in 0..=params.n_max {
        let log_prev = blocks.last().map_or(0.0, |b| b.log_lambda);
        let ctx = ConditionContext {
            theta,
            theta_n: params.theta_sequence.value(theta, n),
            delta: params.delta,
            sigma: params.sigma,
            alpha: params.alpha,
            n,
            log_prev,
        };
        let fails = |i: u64| -> Option<Option<SequenceCondition>> { pool.log_lambda(i).map(|l| first_failure(&ctx, l)) };
        let exhausted = |c: Option<SequenceCondition>| Error::PoolExhausted {
            n,
            condition: c.map_or("pool is empty", SequenceCondition::name),
        };
        // exponential probing followed by bisection on the pool index
        let mut bad: Option<u64> = None;
        let mut last_failure = None;
        let mut probe = next_index;
        let mut step = 1u64;
        let good = loop {
            match fails(probe) {
                None => return Err(exhausted(last_failure)),
                Some(None) => break probe,
                Some(Some(c)) => {
                    last_failure = Some(c);
                    bad = Some(probe);
                    let candidate = probe.checked_add(step).ok_or_else(|| exhausted(Some(c)))?;
                    probe = match pool.log_lambda(candidate) {
                        Some(_) => candidate,
                        None => match pool {
                            LambdaPool::Explicit { values } if probe + 1 < values.len() as u64 => values.len() as u64 - 1,
                            _ => return Err(exhausted(Some(c))),
                        },
                    };
                    step = step.saturating_mul(2);
                }
            }
        };
        let mut hi = good;
        if let Some(mut lo) = bad {
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if fails(mid) == Some(None) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        let log_lambda = pool.log_lambda(hi).expect("index inside pool");
        blocks.push(make_block(params, theta, ctx.theta_n, n, hi, log_lambda, log_prev));
        next_index = hi + 1;
    }
    Ok(CounterexampleBundle {
        params: params.clone(),
        theta,
        epsilon: EPSILON,
        blocks,
        junctions: JunctionDescriptors::default(),
    })
}

fn make_block(
    p: &CounterexampleParams,
    theta: f64,
    theta_n: f64,
    n: usize,
    pool_index: u64,
    log_lambda: f64,
    log_prev: f64,
) -> Block {
    let l = log_lambda;
    let log_m = (theta - 1.0) * l;
    let log_big_m = log_add_exp(2.0 * log_m, 2.0 * p.delta.ln() + (4.0 * p.sigma - 2.0) * l);
    let periods = PeriodCount::new(theta * (l - log_prev));
    let lf = theta * l;
    let small = log_m - ((n + 1) as f64).ln() - lf;
    let log_amplitude = SignedLog::from_f64(small) - SignedLog::exp(theta_n * l);
    Block {
        n,
        pool_index,
        log_lambda,
        theta_n,
        log_m,
        log_big_m,
        periods,
        log_t: (4.0 * PI).ln() - lf,
        log_s: PI.ln() + periods.ln - lf,
        log_t_prime: (3.0 * PI).ln() - lf,
        log_s_prime: PI.ln() + periods.ln_plus(1.0) - lf,
        log_amplitude,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_bundle() -> CounterexampleBundle {
        select_sequences(&CounterexampleParams::default()).unwrap()
    }

    #[test]
    fn selected_sequence_satisfies_every_condition() {
        let b = default_bundle();
        assert_eq!(b.blocks.len(), 7);
        assert!(check_conditions(&b).iter().all(|c| c.holds));
        assert_eq!(b.blocks[0].pool_index, 8);
        assert_eq!(b.blocks[0].periods.exact, Some(80.0));
        assert_eq!(b.epsilon, 1.0 / 32.0);
    }

    #[test]
    fn selection_is_minimal() {
        let b = default_bundle();
        for blk in &b.blocks {
            let ctx = b.context(blk.n);
            let below = (blk.pool_index - 1) as f64 * LN_2;
            let lower_bound = if blk.n == 0 { -1.0 } else { b.blocks[blk.n - 1].log_lambda };
            if below > lower_bound {
                assert!(first_failure(&ctx, below).is_some(), "n = {}", blk.n);
            }
        }
    }

    #[test]
    fn doubling_keeps_conditions() {
        let b = default_bundle();
        for blk in &b.blocks {
            let ctx = b.context(blk.n);
            assert!(first_failure(&ctx, blk.log_lambda + LN_2).is_none());
        }
    }

    #[test]
    fn threshold_sigma_is_rejected() {
        let p = CounterexampleParams { sigma: 1.0 / 3.0, ..Default::default() };
        assert!(matches!(select_sequences(&p), Err(Error::OutsideLossRegime { .. })));
    }

    #[test]
    fn short_explicit_pool_names_failing_condition() {
        let p = CounterexampleParams {
            n_max: 1,
            base_lambda_pool: LambdaPool::Explicit { values: vec![256.0, 1024.0, 4096.0] },
            ..Default::default()
        };
        match select_sequences(&p) {
            Err(Error::PoolExhausted { n: 1, condition }) => assert_eq!(condition, "growth-budget"),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn gaps_hold() {
        let b = default_bundle();
        let gaps = check_gaps(&b);
        assert_eq!(gaps.iter().filter(|g| g.name == "junction").count(), 6);
        assert!(gaps.iter().all(|g| g.holds), "{gaps:?}");
    }

    #[test]
    fn amplitude_log_is_exact_for_small_modes() {
        let b = default_bundle();
        let blk = &b.blocks[0];
        let l = blk.log_lambda;
        let expected = blk.log_m - l * b.theta - (blk.theta_n * l).exp();
        assert!((blk.log_amplitude.to_f64() - expected).abs() < 1e-12);
    }

    #[test]
    fn params_round_trip() {
        let p: CounterexampleParams = serde_json::from_str(r#"{"n_max": 4}"#).unwrap();
        assert_eq!(p.n_max, 4);
        assert_eq!(p.theta_sequence, ThetaSchedule::InverseSquare);
        assert!(serde_json::from_str::<CounterexampleParams>(r#"{"nmax": 4}"#).is_err());
    }
}
