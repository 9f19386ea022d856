//! Each block of the coefficient is `c(t) = m_n² G(λ_n^θ t)` for a fixed
//! normalized shape `G`; only block 0 is ever sampled in physical time.

use std::f64::consts::PI;

use serde::Serialize;

use super::shapes::{blender, f, f_antiderivative, g1, g2, h};
use super::{CounterexampleBundle, EPSILON};
use crate::coefficients::{theta_exponent, Coefficient, Profile, Regularity};
use crate::error::{invalid, Result};
use crate::modal::block_gamma;
use crate::quadrature::GaussLegendre;
use crate::taylor::{Real, Taylor};

/// Oscillation periods kept when a block is sampled in compressed form.
pub const COMPRESSED_PERIODS: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockPiece {
    /// `M_{n+1} B(t/s'_{n+1})`, used only when the construction is truncated.
    Ramp,
    /// `ℓ_n` on `[s'_{n+1}, t'_n]`.
    Junction,
    /// `M_n + m_n² g₁` on `[t'_n, t_n]`.
    Entry,
    /// `M_n + m_n² f` on `[t_n, s_n]`.
    Oscillation,
    /// `M_n + m_n² g₂` on `[s_n, s'_n]`.
    Exit,
    /// `M_0` beyond `s'_0`.
    Plateau,
}

/// `G` in the local variable `x = λ_n^θ t`, where `c = m_n² G`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockShape {
    pub n: usize,
    /// `M_n / m_n²`.
    pub rho_hi: f64,
    /// `M_{n+1} / m_n²`; zero for the last block.
    pub rho_lo: f64,
    /// `λ_n^θ s'_{n+1}`; zero for the last block.
    pub x_a: f64,
    /// `J_n`, when representable.
    pub periods: Option<f64>,
    /// Whether `[0, x_a]` carries a ramp down to zero.
    pub ramp: bool,
}

impl BlockShape {
    pub fn new(bundle: &CounterexampleBundle, n: usize, ramp: bool) -> Self {
        let b = &bundle.blocks[n];
        let (rho_lo, x_a) = match bundle.blocks.get(n + 1) {
            Some(next) => {
                let dl = bundle.theta * (next.log_lambda - b.log_lambda);
                ((next.log_big_m - 2.0 * b.log_m).exp(), PI * (next.periods.ln_plus(1.0) - dl).exp())
            }
            None => (0.0, 0.0),
        };
        BlockShape { n, rho_hi: b.level(), rho_lo, x_a, periods: b.periods.exact, ramp: ramp && x_a > 0.0 }
    }

    /// Length of the oscillation piece, or its compressed stand-in.
    pub fn oscillation_length(&self, compressed: bool) -> f64 {
        match (compressed, self.periods) {
            (false, Some(j)) => PI * (j - 4.0),
            _ => PI * COMPRESSED_PERIODS,
        }
    }

    /// `(piece, start, end)` in `x`, in increasing order.
    pub fn pieces(&self, compressed: bool) -> Vec<(BlockPiece, f64, f64)> {
        let mut out = vec![];
        if self.ramp {
            out.push((BlockPiece::Ramp, 0.0, self.x_a));
        }
        let osc_end = 4.0 * PI + self.oscillation_length(compressed);
        out.push((BlockPiece::Junction, self.x_a, 3.0 * PI));
        out.push((BlockPiece::Entry, 3.0 * PI, 4.0 * PI));
        out.push((BlockPiece::Oscillation, 4.0 * PI, osc_end));
        out.push((BlockPiece::Exit, osc_end, osc_end + PI));
        out
    }

    /// `G` on `piece` at offset `local` from the piece start.
    pub fn eval<R: Real>(&self, piece: BlockPiece, local: R) -> R {
        match piece {
            BlockPiece::Ramp => blender(local * (1.0 / self.x_a)) * self.rho_lo,
            BlockPiece::Junction => {
                h(local * (1.0 / (3.0 * PI - self.x_a))) * (self.rho_hi - self.rho_lo) + self.rho_lo
            }
            BlockPiece::Entry => g1(local) + self.rho_hi,
            BlockPiece::Oscillation => f(local) + self.rho_hi,
            BlockPiece::Exit => g2(local) + self.rho_hi,
            BlockPiece::Plateau => local.lift(self.rho_hi),
        }
    }

    /// `[G, G', ..., G^(order)]` in `x`.
    pub fn jet(&self, piece: BlockPiece, local: f64, order: usize) -> Vec<f64> {
        self.eval(piece, Taylor::variable(local, order)).derivatives()
    }

    /// Locates `x` in the (possibly compressed) layout.
    pub fn locate(&self, x: f64, compressed: bool) -> (BlockPiece, f64) {
        let pieces = self.pieces(compressed);
        for &(p, a, b) in &pieces {
            if x < b {
                return (p, (x - a).max(0.0));
            }
        }
        let (_, _, end) = *pieces.last().unwrap();
        (BlockPiece::Plateau, x - end)
    }
}

/// Block 0 of the construction in physical time, with the inner blocks
/// replaced by a ramp down to `c(0) = 0`.
#[derive(Clone, Debug)]
pub struct MaterializedProfile {
    shape: BlockShape,
    m: f64,
    lambda: f64,
    delta: f64,
    sigma: f64,
    omega: f64,
    big_m: f64,
    /// `(piece, t_start, t_end, C(t_start))`.
    table: Vec<(BlockPiece, f64, f64, f64)>,
    holder: f64,
    regularity: Regularity,
}

impl MaterializedProfile {
    pub fn new(bundle: &CounterexampleBundle) -> Result<Self> {
        let b = &bundle.blocks[0];
        let lambda = b.lambda().ok_or_else(|| invalid("base_lambda_pool", "λ_0 is not representable"))?;
        if b.periods.exact.is_none() {
            return Err(invalid("base_lambda_pool", "J_0 is too large to sample block 0"));
        }
        let p = &bundle.params;
        let m = b.log_m.exp();
        let omega = m * lambda;
        let big_m = m * m + p.delta * p.delta * lambda.powf(4.0 * p.sigma - 2.0);
        let mut shape = BlockShape::new(bundle, 0, true);
        shape.rho_hi = big_m / (m * m);
        let mut prof = MaterializedProfile {
            shape,
            m,
            lambda,
            delta: p.delta,
            sigma: p.sigma,
            omega,
            big_m,
            table: vec![],
            holder: 0.0,
            regularity: Regularity::new(p.k, p.alpha)?,
        };
        let mut acc = 0.0;
        for (piece, xa, xb) in prof.shape.pieces(false) {
            let (ta, tb) = (xa / omega, xb / omega);
            prof.table.push((piece, ta, tb, acc));
            acc += prof.piece_integral(piece, ta, tb);
        }
        let end = prof.table.last().unwrap().2;
        prof.table.push((BlockPiece::Plateau, end, f64::INFINITY, acc));
        prof.holder = super::regularity::shape_holder(&prof.shape, p.k as usize, p.alpha, true);
        Ok(prof)
    }

    /// `s'_0`.
    pub fn block_end(&self) -> f64 {
        self.table.last().unwrap().1
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    /// `(piece, start, end)` in physical time.
    pub fn breakpoints(&self) -> Vec<(BlockPiece, f64, f64)> {
        self.table.iter().map(|&(p, a, b, _)| (p, a, b)).collect()
    }

    fn row(&self, t: f64) -> &(BlockPiece, f64, f64, f64) {
        self.table.iter().find(|r| t < r.2).unwrap_or_else(|| self.table.last().unwrap())
    }

    fn piece_value(&self, piece: BlockPiece, start: f64, t: f64) -> f64 {
        match piece {
            BlockPiece::Oscillation => block_gamma(self.m, EPSILON, self.lambda, self.delta, self.sigma, t),
            BlockPiece::Plateau => self.big_m,
            _ => self.m * self.m * self.shape.eval(piece, self.omega * (t - start)),
        }
    }

    fn piece_integral(&self, piece: BlockPiece, a: f64, b: f64) -> f64 {
        match piece {
            BlockPiece::Oscillation => {
                self.big_m * (b - a)
                    + self.m * self.m / self.omega * (f_antiderivative(self.omega * b) - f_antiderivative(self.omega * a))
            }
            BlockPiece::Plateau => self.big_m * (b - a),
            _ => {
                let start = self.table.iter().find(|r| r.0 == piece).map_or(a, |r| r.1);
                thread_local! {
                    static RULE: GaussLegendre = GaussLegendre::new(16);
                }
                RULE.with(|gl| gl.integrate(|t| self.piece_value(piece, start, t), a, b, 16))
            }
        }
    }
}

impl Profile for MaterializedProfile {
    fn family(&self) -> &'static str {
        "counterexample"
    }

    fn value(&self, t: f64) -> f64 {
        let &(piece, start, _, _) = self.row(t);
        self.piece_value(piece, start, t)
    }

    fn derivatives(&self, t: f64, order: usize) -> Option<Vec<f64>> {
        let &(piece, start, _, _) = self.row(t);
        let local = match piece {
            BlockPiece::Oscillation => self.omega * t - 4.0 * PI,
            _ => self.omega * (t - start),
        };
        let mut d = self.shape.jet(piece, local, order);
        let mut scale = self.m * self.m;
        for v in d.iter_mut() {
            *v *= scale;
            scale *= self.omega;
        }
        d[0] = self.value(t);
        Some(d)
    }

    fn antiderivative(&self, t: f64) -> f64 {
        let &(piece, start, _, acc) = self.row(t);
        acc + self.piece_integral(piece, start, t)
    }

    fn holder_constant(&self, k: u32, alpha: f64, _horizon: f64) -> Option<f64> {
        (k == self.regularity.k && alpha == self.regularity.alpha).then_some(self.holder)
    }
}

/// The sampled coefficient: block 0 on `[0, 2s'_0]` with `μ = 2m_0²`.
pub fn build_coefficient(bundle: &CounterexampleBundle) -> Result<Coefficient> {
    let prof = MaterializedProfile::new(bundle)?;
    let horizon = 2.0 * prof.block_end();
    let bound = 2.0 * prof.m * prof.m;
    let reg = prof.regularity;
    Coefficient::new(prof, horizon, reg, bound)
}

/// Writes `t,c,dc` on a uniform grid of `points` nodes over `[0, T]`.
pub fn write_coefficient_csv<W: std::io::Write>(c: &Coefficient, points: usize, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["t", "c", "dc"])?;
    for t in c.grid(points) {
        wr.serialize((t, c.value(t), c.derivative(t)))?;
    }
    wr.flush()?;
    Ok(())
}

/// A single oscillating block `γ(m, 1/32, λ, t)` with `m = λ^{θ-1}`, used
/// to probe one frequency at a time.
#[derive(Clone, Debug)]
pub struct MatchedBlock {
    pub m: f64,
    pub lambda: f64,
    pub delta: f64,
    pub sigma: f64,
}

impl MatchedBlock {
    pub fn new(k: u32, alpha: f64, lambda: f64, delta: f64, sigma: f64) -> Result<Self> {
        let theta = theta_exponent(k, alpha)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", format!("{lambda} must be positive")));
        }
        Ok(MatchedBlock { m: lambda.powf(theta - 1.0), lambda, delta, sigma })
    }

    fn big_m(&self) -> f64 {
        self.m * self.m + self.delta * self.delta * self.lambda.powf(4.0 * self.sigma - 2.0)
    }

    pub fn coefficient(self, horizon: f64, regularity: Regularity) -> Result<Coefficient> {
        let bound = self.big_m() + 0.5 * self.m * self.m;
        Coefficient::new(self, horizon, regularity, bound)
    }
}

impl Profile for MatchedBlock {
    fn family(&self) -> &'static str {
        "matched-block"
    }

    fn value(&self, t: f64) -> f64 {
        block_gamma(self.m, EPSILON, self.lambda, self.delta, self.sigma, t)
    }

    fn derivatives(&self, t: f64, order: usize) -> Option<Vec<f64>> {
        let omega = self.m * self.lambda;
        let mut d = f(Taylor::variable(omega * t, order)).derivatives();
        let mut scale = self.m * self.m;
        for v in d.iter_mut() {
            *v *= scale;
            scale *= omega;
        }
        d[0] = self.value(t);
        Some(d)
    }

    fn antiderivative(&self, t: f64) -> f64 {
        let omega = self.m * self.lambda;
        self.big_m() * t + self.m * self.m / omega * f_antiderivative(omega * t)
    }
}
