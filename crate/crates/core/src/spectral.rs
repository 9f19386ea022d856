//! Multi-mode solutions over a diagonal operator and the norms of spectral data.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::Coefficient;
use crate::error::{invalid, Error, Result};
use crate::logspace::{log_sum_exp, SignedLog};
use crate::modal::{integrate_with, IntegrationOptions, ModalProblem};

/// Finite truncation of `A e_n = λ_n² e_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralOperator {
    lambdas: Vec<f64>,
}

impl SpectralOperator {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(invalid("eigen_lambdas", "entries must be finite and nonnegative"));
        }
        if lambdas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("eigen_lambdas", "entries must be strictly increasing"));
        }
        Ok(SpectralOperator { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// Components `u_n = ⟨u, e_n⟩`. Each entry is `m · exp(s)` with an `f64`
/// mantissa `m`, so modes far beyond `f64` range keep their magnitude while
/// ordinary values stay exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralVector {
    mantissas: Vec<f64>,
    log_scales: Vec<f64>,
}

impl SpectralVector {
    pub fn from_linear(components: &[f64]) -> Result<Self> {
        if let Some(i) = components.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(SpectralVector { mantissas: components.to_vec(), log_scales: vec![0.0; components.len()] })
    }

    pub fn from_logs(values: Vec<SignedLog>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| v.ln_abs().is_nan() || v.ln_abs() == f64::INFINITY) {
            return Err(Error::NonFinite { index: i });
        }
        let mut v = Self::zeros(values.len());
        for (i, x) in values.into_iter().enumerate() {
            v.set_log(i, x);
        }
        Ok(v)
    }

    /// Entries `m_n exp(s_n)`, as produced by rescaled integration.
    pub fn from_scaled(mantissas: Vec<f64>, log_scales: Vec<f64>) -> Result<Self> {
        if mantissas.len() != log_scales.len() {
            return Err(Error::DimensionMismatch { expected: mantissas.len(), found: log_scales.len() });
        }
        if let Some(i) = (0..mantissas.len()).position(|i| !(mantissas[i].is_finite() && log_scales[i].is_finite())) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(SpectralVector { mantissas, log_scales })
    }

    fn set_log(&mut self, i: usize, x: SignedLog) {
        match x.to_f64_checked() {
            Some(v) if v == 0.0 || v.is_normal() => {
                self.mantissas[i] = v;
                self.log_scales[i] = 0.0;
            }
            _ => {
                self.mantissas[i] = x.sign() as f64;
                self.log_scales[i] = x.ln_abs();
            }
        }
    }

    /// Both channels; the log channel must agree with the linear one to
    /// relative `1e-12` wherever an entry is given.
    pub fn with_channels(components: &[f64], logs: &[Option<SignedLog>]) -> Result<Self> {
        if components.len() != logs.len() {
            return Err(Error::DimensionMismatch { expected: components.len(), found: logs.len() });
        }
        let v = Self::from_linear(components)?;
        for (i, l) in logs.iter().enumerate() {
            if let Some(l) = l {
                let lin = v.log_component(i);
                let agree = (lin.is_zero() && l.is_zero())
                    || (lin.sign() == l.sign() && (lin.ln_abs() - l.ln_abs()).abs() <= 1e-12 * lin.ln_abs().abs().max(1.0));
                if !agree {
                    return Err(invalid("log_abs_u", format!("mode {i}: log channel disagrees with linear channel")));
                }
            }
        }
        Ok(v)
    }

    pub fn zeros(n: usize) -> Self {
        SpectralVector { mantissas: vec![0.0; n], log_scales: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.mantissas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mantissas.is_empty()
    }

    pub fn log_component(&self, i: usize) -> SignedLog {
        let m = SignedLog::from_f64(self.mantissas[i]);
        if m.is_zero() {
            m
        } else {
            SignedLog::from_parts(m.sign(), m.ln_abs() + self.log_scales[i])
        }
    }

    /// `u_n` as `f64`; overflows to `±inf` beyond range.
    pub fn component(&self, i: usize) -> f64 {
        if self.log_scales[i] == 0.0 {
            self.mantissas[i]
        } else {
            self.log_component(i).to_f64()
        }
    }

    pub fn logs(&self) -> Vec<SignedLog> {
        (0..self.len()).map(|i| self.log_component(i)).collect()
    }

    /// Linear components when every entry is representable.
    pub fn linear(&self) -> Option<Vec<f64>> {
        (0..self.len()).map(|i| Some(self.component(i)).filter(|x| x.is_finite())).collect()
    }

    /// The entry with the other modes zeroed.
    fn copy_entry(&mut self, other: &SpectralVector, i: usize) {
        self.mantissas[i] = other.mantissas[i];
        self.log_scales[i] = other.log_scales[i];
    }
}

/// One of the weighted `ℓ²` norms over the spectrum. `Sobolev` with negative
/// `alpha` is the distribution norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NormSpec {
    Sobolev { alpha: f64 },
    Gevrey { alpha: f64, order: f64, radius: f64 },
    Ultradistribution { alpha: f64, order: f64, radius: f64 },
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormSpec::Sobolev { alpha } if alpha.is_finite() => Ok(()),
            NormSpec::Sobolev { .. } => Err(invalid("alpha", "must be finite")),
            NormSpec::Gevrey { alpha, order, radius } | NormSpec::Ultradistribution { alpha, order, radius } => {
                if !alpha.is_finite() {
                    return Err(invalid("alpha", "must be finite"));
                }
                if !(order > 0.0 && order.is_finite()) {
                    return Err(invalid("order", format!("{order} must be positive")));
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(invalid("radius", format!("{radius} must be positive")));
                }
                Ok(())
            }
        }
    }

    pub fn space(&self) -> &'static str {
        match self {
            NormSpec::Sobolev { .. } => "sobolev",
            NormSpec::Gevrey { .. } => "gevrey",
            NormSpec::Ultradistribution { .. } => "ultradistribution",
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            NormSpec::Sobolev { alpha } | NormSpec::Gevrey { alpha, .. } | NormSpec::Ultradistribution { alpha, .. } => alpha,
        }
    }

    /// `ln` of the weight at `λ`: `4α ln(1+λ) ± 2ρλ^{1/s}`.
    pub fn log_weight(&self, lambda: f64) -> f64 {
        let base = 4.0 * self.alpha() * lambda.ln_1p();
        match *self {
            NormSpec::Sobolev { .. } => base,
            NormSpec::Gevrey { order, radius, .. } => base + 2.0 * radius * lambda.powf(1.0 / order),
            NormSpec::Ultradistribution { order, radius, .. } => base - 2.0 * radius * lambda.powf(1.0 / order),
        }
    }

    /// The weight itself, or `None` when it is not a finite positive `f64`.
    pub fn weight(&self, lambda: f64) -> Option<f64> {
        let sob = (1.0 + lambda).powf(4.0 * self.alpha());
        let w = match *self {
            NormSpec::Sobolev { .. } => sob,
            NormSpec::Gevrey { order, radius, .. } => sob * (2.0 * radius * lambda.powf(1.0 / order)).exp(),
            NormSpec::Ultradistribution { order, radius, .. } => sob * (-2.0 * radius * lambda.powf(1.0 / order)).exp(),
        };
        (w.is_finite() && w > 0.0).then_some(w)
    }
}

/// A squared norm with its log form and, when representable, its linear value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormValue {
    pub log_norm_sq: f64,
    pub linear: Option<f64>,
}

/// JSON record `{space, alpha, order, radius, log_norm_sq}`.
#[derive(Clone, Debug, Serialize)]
pub struct NormRecord {
    pub space: &'static str,
    pub alpha: f64,
    pub order: Option<f64>,
    pub radius: Option<f64>,
    pub log_norm_sq: Option<f64>,
    pub norm_sq: Option<f64>,
}

impl NormRecord {
    pub fn new(spec: &NormSpec, value: &NormValue) -> Self {
        let (order, radius) = match *spec {
            NormSpec::Sobolev { .. } => (None, None),
            NormSpec::Gevrey { order, radius, .. } | NormSpec::Ultradistribution { order, radius, .. } => {
                (Some(order), Some(radius))
            }
        };
        NormRecord {
            space: spec.space(),
            alpha: spec.alpha(),
            order,
            radius,
            log_norm_sq: value.log_norm_sq.is_finite().then_some(value.log_norm_sq),
            norm_sq: value.linear,
        }
    }
}

fn check_dims(op: &SpectralOperator, v: &SpectralVector) -> Result<()> {
    if op.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: op.len(), found: v.len() });
    }
    Ok(())
}

/// `Σ w(λ_n) u_n²` in log-sum-exp form; `log_norm_sq = -inf` for the zero vector.
pub fn norm(op: &SpectralOperator, v: &SpectralVector, spec: &NormSpec) -> Result<NormValue> {
    spec.validate()?;
    check_dims(op, v)?;
    let terms: Vec<f64> = op
        .lambdas
        .iter()
        .zip(v.logs())
        .filter(|(_, u)| !u.is_zero())
        .map(|(&l, u)| spec.log_weight(l) + 2.0 * u.ln_abs())
        .collect();
    let log_norm_sq = log_sum_exp(terms);
    Ok(NormValue { log_norm_sq, linear: norm_linear(op, v, spec) })
}

/// Direct summation, when every weight, component and partial sum is finite.
pub fn norm_linear(op: &SpectralOperator, v: &SpectralVector, spec: &NormSpec) -> Option<f64> {
    let mut acc = 0.0;
    for (i, &l) in op.lambdas.iter().enumerate() {
        let x = Some(v.component(i)).filter(|x| x.is_finite())?;
        acc += spec.weight(l)? * x * x;
    }
    acc.is_finite().then_some(acc)
}

/// Split at `ν`: modes with `λ_n < ν` go low, the rest high.
#[derive(Clone, Debug)]
pub struct FrequencySplit {
    pub low: SpectralVector,
    pub high: SpectralVector,
    pub low_modes: Vec<usize>,
    pub high_modes: Vec<usize>,
}

pub fn frequency_split(op: &SpectralOperator, v: &SpectralVector, nu: f64) -> Result<FrequencySplit> {
    if !(nu > 0.0) {
        return Err(invalid("nu", format!("{nu} must be positive")));
    }
    check_dims(op, v)?;
    let mut low = SpectralVector::zeros(v.len());
    let mut high = SpectralVector::zeros(v.len());
    let (mut low_modes, mut high_modes) = (vec![], vec![]);
    for (i, &l) in op.lambdas.iter().enumerate() {
        if l < nu {
            low.copy_entry(v, i);
            low_modes.push(i);
        } else {
            high.copy_entry(v, i);
            high_modes.push(i);
        }
    }
    Ok(FrequencySplit { low, high, low_modes, high_modes })
}

/// `(u(t), u'(t))` across all modes.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub u: SpectralVector,
    pub du: SpectralVector,
}

impl Snapshot {
    /// Writes `mode,lambda,u,du,log_abs_u,log_abs_du`.
    pub fn write_csv<W: Write>(&self, op: &SpectralOperator, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["mode", "lambda", "u", "du", "log_abs_u", "log_abs_du"])?;
        for (i, &l) in op.lambdas.iter().enumerate() {
            let (u, du) = (self.u.log_component(i), self.du.log_component(i));
            let lg = |x: SignedLog| (!x.is_zero()).then_some(x.ln_abs());
            wr.serialize((i, l, self.u.component(i), self.du.component(i), lg(u), lg(du)))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Integrates every mode on `[0, max(times)]` and assembles snapshots at
/// `times` (increasing, inside `[0, T]`). Modes run in parallel; the
/// result order follows the mode index.
pub fn solve_system(
    op: &SpectralOperator,
    coefficient: &Coefficient,
    delta: f64,
    sigma: f64,
    initial: (&SpectralVector, &SpectralVector),
    times: &[f64],
    opts: &IntegrationOptions,
) -> Result<Vec<Snapshot>> {
    check_dims(op, initial.0)?;
    check_dims(op, initial.1)?;
    let t_end = match times.last() {
        Some(&t) if t > 0.0 => t,
        _ => return Err(invalid("times", "need at least one positive output time")),
    };
    let u0 = initial.0.linear().ok_or_else(|| invalid("initial", "initial data must be representable"))?;
    let u1 = initial.1.linear().ok_or_else(|| invalid("initial", "initial data must be representable"))?;
    let opts = opts.clone().times(times.to_vec());
    let modes: Vec<_> = op
        .lambdas
        .par_iter()
        .enumerate()
        .map(|(n, &l)| {
            let wrap = |e: Error| Error::Mode { mode: n, source: Box::new(e) };
            let p = ModalProblem::new(l, delta, sigma, coefficient.clone(), (u0[n], u1[n]), (0.0, t_end)).map_err(wrap)?;
            integrate_with(&p, &opts).map_err(wrap)
        })
        .collect::<Result<_>>()?;
    times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let pick = |f: &dyn Fn(&crate::modal::ModalTrajectory) -> f64| modes.iter().map(f).collect::<Vec<f64>>();
            let scales = pick(&|m| m.log_scale[k]);
            Ok(Snapshot {
                t,
                u: SpectralVector::from_scaled(pick(&|m| m.u[k]), scales.clone())?,
                du: SpectralVector::from_scaled(pick(&|m| m.du[k]), scales)?,
            })
        })
        .collect()
}

/// `‖u‖²_{D(A^σ)} + ‖u'‖²` in log form.
pub fn phase_space_norm(op: &SpectralOperator, snapshot: &Snapshot, sigma: f64) -> Result<f64> {
    let a = norm(op, &snapshot.u, &NormSpec::Sobolev { alpha: sigma })?.log_norm_sq;
    let b = norm(op, &snapshot.du, &NormSpec::Sobolev { alpha: 0.0 })?.log_norm_sq;
    Ok(log_sum_exp([a, b]))
}

#[derive(Deserialize)]
struct Row {
    lambda: f64,
    u: f64,
    #[serde(default)]
    log_abs_u: Option<f64>,
    #[serde(default)]
    sign_u: Option<i8>,
}

/// Reads `lambda,u[,log_abs_u,sign_u]` rows. A nonempty log entry overrides
/// the linear one after a consistency check.
pub fn read_spectral_csv<R: Read>(r: R) -> Result<(SpectralOperator, SpectralVector)> {
    let mut rd = csv::Reader::from_reader(r);
    let mut lambdas = vec![];
    let mut lin = vec![];
    let mut logs = vec![];
    for row in rd.deserialize() {
        let row: Row = row?;
        lambdas.push(row.lambda);
        lin.push(row.u);
        logs.push(row.log_abs_u.map(|l| {
            let sign = row.sign_u.unwrap_or(if row.u < 0.0 { -1 } else { 1 });
            SignedLog::from_parts(sign, l)
        }));
    }
    let op = SpectralOperator::new(lambdas)?;
    let mut v = SpectralVector::zeros(lin.len());
    for (i, (x, l)) in lin.iter().zip(&logs).enumerate() {
        match l {
            Some(l) if l.to_f64_checked().is_none() => v.set_log(i, *l),
            _ => {
                let one = SpectralVector::with_channels(&[*x], &[*l]).map_err(|e| match e {
                    Error::NonFinite { .. } => Error::NonFinite { index: i },
                    e => e,
                })?;
                v.mantissas[i] = one.mantissas[0];
                v.log_scales[i] = one.log_scales[0];
            }
        }
    }
    Ok((op, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::closed_form::zero_speed_solution;

    #[test]
    fn single_mode_sobolev() {
        let op = SpectralOperator::new(vec![1.0]).unwrap();
        let v = SpectralVector::from_linear(&[1.0]).unwrap();
        let a = 0.7;
        let n = norm(&op, &v, &NormSpec::Sobolev { alpha: a }).unwrap();
        assert!((n.linear.unwrap() - 2f64.powf(4.0 * a)).abs() < 1e-15);
        assert!((n.log_norm_sq - 4.0 * a * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_vector() {
        let op = SpectralOperator::new(vec![0.0, 1.0, 5.0]).unwrap();
        let v = SpectralVector::zeros(3);
        for s in [
            NormSpec::Sobolev { alpha: 1.0 },
            NormSpec::Gevrey { alpha: 0.0, order: 2.0, radius: 1.0 },
            NormSpec::Ultradistribution { alpha: -1.0, order: 2.0, radius: 1.0 },
        ] {
            let n = norm(&op, &v, &s).unwrap();
            assert_eq!(n.log_norm_sq, f64::NEG_INFINITY);
            assert_eq!(n.linear, Some(0.0));
        }
    }

    #[test]
    fn small_radius_limit() {
        let op = SpectralOperator::new(vec![0.5, 2.0, 9.0]).unwrap();
        let v = SpectralVector::from_linear(&[1.0, -0.3, 0.2]).unwrap();
        let s = norm(&op, &v, &NormSpec::Sobolev { alpha: 0.4 }).unwrap().linear.unwrap();
        let g = norm(&op, &v, &NormSpec::Gevrey { alpha: 0.4, order: 1.5, radius: 1e-12 }).unwrap().linear.unwrap();
        assert!((g - s).abs() <= 1e-9 * s);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(SpectralVector::from_linear(&[1.0, f64::NAN]), Err(Error::NonFinite { index: 1 })));
        assert!(SpectralOperator::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn split_examples() {
        let op = SpectralOperator::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        let v = SpectralVector::from_linear(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let s = frequency_split(&op, &v, 3.0).unwrap();
        assert_eq!((s.low_modes, s.high_modes), (vec![0, 1], vec![2, 3]));
        assert!(frequency_split(&op, &v, 100.0).unwrap().high.logs().iter().all(|x| x.is_zero()));
        assert!(frequency_split(&op, &v, f64::MIN_POSITIVE).unwrap().low_modes.is_empty());
    }

    #[test]
    fn zero_speed_system_is_exact() {
        let op = SpectralOperator::new(vec![0.0, 1.0, 3.0]).unwrap();
        let c = Coefficient::zero(2.0).unwrap();
        let u0 = SpectralVector::from_linear(&[1.0, 0.5, -1.0]).unwrap();
        let u1 = SpectralVector::from_linear(&[0.2, -0.4, 1.0]).unwrap();
        let times = [0.5, 1.0, 2.0];
        let snaps = solve_system(&op, &c, 0.8, 0.4, (&u0, &u1), &times, &IntegrationOptions::new(1e-10, 1e-12)).unwrap();
        for s in &snaps {
            for n in 0..3 {
                let (u, du) = zero_speed_solution(0.8, 0.4, op.lambdas()[n], u0.component(n), u1.component(n), s.t);
                assert_eq!((s.u.component(n), s.du.component(n)), (u, du));
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let text = "lambda,u,log_abs_u,sign_u\n1,0.5,,\n2,0,2000,-1\n";
        let (op, v) = read_spectral_csv(text.as_bytes()).unwrap();
        assert_eq!(op.lambdas(), &[1.0, 2.0]);
        assert_eq!(v.component(0), 0.5);
        assert_eq!(v.log_component(1), SignedLog::from_parts(-1, 2000.0));
    }
}
