//! Grid checks of the smoothness claims, carried out on the normalized block
//! shapes. Since `θ(2+k+α) = 2`, Hölder constants of `c^(k)` in `t` equal
//! those of `G^(k)` in the local variable.

use rayon::prelude::*;
use serde::Serialize;

use super::coefficient::{BlockPiece, BlockShape};
use super::shapes::h;
use super::CounterexampleBundle;
use crate::logspace::SignedLog;
use crate::taylor::Taylor;

/// Grid points per block.
pub const BLOCK_GRID: usize = 2000;

/// Relative tolerance for one-sided jet agreement.
pub const JET_TOLERANCE: f64 = 1e-8;

/// Allowed spread of per-block Hölder constants.
pub const HOLDER_SPREAD: f64 = 2.0;

fn grid(shape: &BlockShape, with_plateau: bool) -> Vec<(BlockPiece, f64, f64)> {
    let mut pieces = shape.pieces(true);
    if with_plateau {
        let end = pieces.last().unwrap().2;
        pieces.push((BlockPiece::Plateau, end, end + std::f64::consts::PI));
    }
    let total: f64 = pieces.iter().map(|p| p.2 - p.1).sum();
    let mut out = vec![];
    for (piece, a, b) in pieces {
        let count = ((BLOCK_GRID as f64 * (b - a) / total).ceil() as usize).max(2);
        for i in 0..count {
            let local = (b - a) * i as f64 / (count - 1) as f64;
            out.push((piece, a + local, local));
        }
    }
    out
}

fn holder_of(points: &[(f64, f64)], alpha: f64) -> f64 {
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let (xi, vi) = points[i];
            points[i + 1..]
                .iter()
                .filter(|(xj, _)| *xj > xi)
                .map(|(xj, vj)| (vj - vi).abs() / (xj - xi).powf(alpha))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Grid estimate of the `α`-Hölder constant of `G^(k)` over the compressed
/// block.
pub fn shape_holder(shape: &BlockShape, k: usize, alpha: f64, with_plateau: bool) -> f64 {
    let pts: Vec<(f64, f64)> = grid(shape, with_plateau)
        .into_iter()
        .map(|(piece, x, local)| (x, shape.jet(piece, local, k)[k]))
        .collect();
    holder_of(&pts, alpha)
}

/// Agreement of one derivative order across a breakpoint.
#[derive(Clone, Debug, Serialize)]
pub struct BreakpointCheck {
    pub n: usize,
    /// `"t-prime"`, `"t"`, `"s"` or `"s-prime"`.
    pub at: &'static str,
    pub order: usize,
    pub left: SignedLog,
    pub right: SignedLog,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockRegularity {
    pub n: usize,
    /// `Γ_j = sup |G^(j)|`, so `|c^(j)| <= Γ_j λ_n^{(2+j)θ-2}`.
    pub gamma: Vec<f64>,
    /// `ln(Γ_j λ_n^{(2+j)θ-2})`.
    pub log_derivative_bounds: Vec<f64>,
    pub holder: f64,
    /// Range of `c/m_n²` on `[t'_n, s'_n]`, required inside `[1/2, 2]`.
    pub core_range: (f64, f64),
    /// Range of `c/m_n²` on the junction `[s'_{n+1}, t'_n]`.
    pub junction_range: (f64, f64),
    /// `ln(M_{n+1}/m_n²)`, the junction's starting level.
    pub log_junction_start: f64,
    /// `ln(m_{n+1}²/m_n²)`, the lower bound it must respect.
    pub log_junction_floor: f64,
    pub junction_monotone: bool,
    pub level: f64,
    pub core_bounds_hold: bool,
    pub junction_bounds_hold: bool,
    pub level_in_range: bool,
    pub breakpoints: Vec<BreakpointCheck>,
}

/// `|c^(k)(s'_i) - c^(k)(s'_j)| <= |s'_i - s'_j|^α`.
#[derive(Clone, Debug, Serialize)]
pub struct HolderPair {
    pub i: usize,
    pub j: usize,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub blocks: Vec<BlockRegularity>,
    /// Seams `s'_n` between consecutive blocks, compared in `t`.
    pub seams: Vec<BreakpointCheck>,
    pub pairs: Vec<HolderPair>,
    pub holder_min: f64,
    pub holder_max: f64,
    pub holder_uniform: bool,
    /// `ln(2λ_{n_max}^{-2(1-θ)}) - ln sup_{[0, t_{n_max}]} c`.
    pub continuity_margin: f64,
}

impl RegularityReport {
    pub fn breakpoints_hold(&self) -> bool {
        self.blocks.iter().flat_map(|b| &b.breakpoints).chain(&self.seams).all(|c| c.holds)
    }

    pub fn bounds_hold(&self) -> bool {
        self.blocks.iter().all(|b| b.core_bounds_hold && b.junction_bounds_hold && b.level_in_range)
    }

    pub fn passed(&self) -> bool {
        self.breakpoints_hold()
            && self.bounds_hold()
            && self.holder_uniform
            && self.pairs.iter().all(|p| p.holds)
            && self.continuity_margin >= 0.0
    }
}

fn jets_agree(left: &[f64], right: &[f64], scale: &[f64], n: usize, at: &'static str) -> Vec<BreakpointCheck> {
    (0..left.len())
        .map(|j| {
            let (a, b) = (left[j], right[j]);
            let tol = JET_TOLERANCE * a.abs().max(b.abs()).max(scale[j]);
            BreakpointCheck {
                n,
                at,
                order: j,
                left: SignedLog::from_f64(a),
                right: SignedLog::from_f64(b),
                holds: (a - b).abs() <= tol,
            }
        })
        .collect()
}

fn block_regularity(bundle: &CounterexampleBundle, n: usize, j_max: usize, jet_order: usize) -> BlockRegularity {
    let p = &bundle.params;
    let k = p.k as usize;
    let shape = BlockShape::new(bundle, n, false);
    let order = j_max.max(k).max(jet_order);
    let pts = grid(&shape, false);
    let jets: Vec<Vec<f64>> = pts.par_iter().map(|&(piece, _, local)| shape.jet(piece, local, order)).collect();
    let gamma: Vec<f64> =
        (0..=j_max).map(|j| jets.iter().map(|d| d[j].abs()).fold(0.0, f64::max)).collect();
    let b = &bundle.blocks[n];
    let log_derivative_bounds = gamma
        .iter()
        .enumerate()
        .map(|(j, g)| g.ln() + ((2 + j) as f64 * bundle.theta - 2.0) * b.log_lambda)
        .collect();
    let holder_pts: Vec<(f64, f64)> = pts.iter().zip(&jets).map(|(pt, d)| (pt.1, d[k])).collect();
    let holder = holder_of(&holder_pts, p.alpha);

    let range = |want: &dyn Fn(BlockPiece) -> bool| {
        pts.iter().zip(&jets).filter(|(pt, _)| want(pt.0)).fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (_, d)| {
            (acc.0.min(d[0]), acc.1.max(d[0]))
        })
    };
    let core_range = range(&|pc| matches!(pc, BlockPiece::Entry | BlockPiece::Oscillation | BlockPiece::Exit));
    let junction_range = range(&|pc| pc == BlockPiece::Junction);
    let (log_junction_start, log_junction_floor) = match bundle.blocks.get(n + 1) {
        Some(next) => (next.log_big_m - 2.0 * b.log_m, 2.0 * (next.log_m - b.log_m)),
        None => (f64::NEG_INFINITY, f64::NEG_INFINITY),
    };
    let junction: Vec<f64> =
        pts.iter().zip(&jets).filter(|(pt, _)| pt.0 == BlockPiece::Junction).map(|(_, d)| d[0]).collect();
    let junction_monotone = junction.windows(2).all(|w| w[1] >= w[0]);
    let level = b.level();

    let pi = std::f64::consts::PI;
    let jet = |piece, local| shape.jet(piece, local, jet_order);
    let scale: Vec<f64> =
        (0..=jet_order).map(|j| jets.iter().map(|d| d[j].abs()).fold(0.0, f64::max)).collect();
    let mut breakpoints = vec![];
    breakpoints.extend(jets_agree(
        &jet(BlockPiece::Junction, 3.0 * pi - shape.x_a),
        &jet(BlockPiece::Entry, 0.0),
        &scale,
        n,
        "t-prime",
    ));
    breakpoints.extend(jets_agree(&jet(BlockPiece::Entry, pi), &jet(BlockPiece::Oscillation, 0.0), &scale, n, "t"));
    // s_n - t_n is a whole number of periods of f
    breakpoints.extend(jets_agree(&jet(BlockPiece::Oscillation, 0.0), &jet(BlockPiece::Exit, 0.0), &scale, n, "s"));
    let exit_end = jet(BlockPiece::Exit, pi);
    breakpoints.extend(jets_agree(&exit_end, &jet(BlockPiece::Plateau, 0.0), &scale, n, "s-prime"));

    BlockRegularity {
        n,
        gamma,
        log_derivative_bounds,
        holder,
        core_range,
        junction_range,
        log_junction_start,
        log_junction_floor,
        junction_monotone,
        level,
        core_bounds_hold: core_range.0 >= 0.5 && core_range.1 <= 2.0,
        junction_bounds_hold: junction_monotone
            && junction_range.0 >= 0.0
            && junction_range.1 <= 2.0
            && log_junction_start >= log_junction_floor,
        level_in_range: (1.0..=1.5).contains(&level),
        breakpoints,
    }
}

/// `c^(j)(s'_n)` from the left, where block `n` ends in its exit piece.
fn exit_seam_jet(bundle: &CounterexampleBundle, n: usize, order: usize) -> Vec<SignedLog> {
    let b = &bundle.blocks[n];
    let shape = BlockShape::new(bundle, n, false);
    let lf = bundle.theta * b.log_lambda;
    shape
        .jet(BlockPiece::Exit, std::f64::consts::PI, order)
        .into_iter()
        .enumerate()
        .map(|(j, g)| SignedLog::from_f64(g) * SignedLog::from_parts(1, 2.0 * b.log_m + j as f64 * lf))
        .collect()
}

/// `c^(j)(s'_n)` from the right, where block `n-1` starts its junction
/// `M_n + (M_{n-1} - M_n) h(·)`; kept in log form since `M_n/m_{n-1}²`
/// underflows.
fn junction_seam_jet(bundle: &CounterexampleBundle, n: usize, order: usize) -> Vec<SignedLog> {
    let owner = &bundle.blocks[n - 1];
    let shape = BlockShape::new(bundle, n - 1, false);
    let low = SignedLog::from_parts(1, bundle.blocks[n].log_big_m);
    let rise = SignedLog::from_parts(1, owner.log_big_m) - low;
    let width = 3.0 * std::f64::consts::PI - shape.x_a;
    let log_rate = bundle.theta * owner.log_lambda - width.ln();
    h(Taylor::variable(0.0, order))
        .derivatives()
        .into_iter()
        .enumerate()
        .map(|(j, d)| {
            let term = rise * SignedLog::from_f64(d) * SignedLog::from_parts(1, j as f64 * log_rate);
            if j == 0 {
                low + term
            } else {
                term
            }
        })
        .collect()
}

/// Checks derivative bounds, Hölder uniformity, junction smoothness and the
/// Hölder condition between the points `s'_n`, for orders up to `j_max`.
pub fn verify_regularity(bundle: &CounterexampleBundle, j_max: usize) -> RegularityReport {
    let p = &bundle.params;
    let k = p.k as usize;
    let jet_order = (k + 1).min(4);
    let blocks: Vec<BlockRegularity> =
        (0..bundle.blocks.len()).map(|n| block_regularity(bundle, n, j_max, jet_order)).collect();

    let mut seams = vec![];
    for n in 1..bundle.blocks.len() {
        let left = exit_seam_jet(bundle, n, jet_order);
        let right = junction_seam_jet(bundle, n, jet_order);
        for (j, (a, b)) in left.into_iter().zip(right).enumerate() {
            let holds = (a.is_zero() && b.is_zero())
                || (a.sign() == b.sign() && (a.ln_abs() - b.ln_abs()).abs() <= JET_TOLERANCE);
            seams.push(BreakpointCheck { n, at: "s-prime", order: j, left: a, right: b, holds });
        }
    }

    // c^(k)(s'_n) is M_n for k = 0 and zero otherwise
    let value_at = |n: usize| -> SignedLog {
        if k == 0 {
            SignedLog::from_parts(1, bundle.blocks[n].log_big_m)
        } else {
            SignedLog::ZERO
        }
    };
    let mut pairs = vec![];
    for i in 0..bundle.blocks.len() {
        for j in 0..i {
            let diff = (value_at(i) - value_at(j)).abs();
            let s_i = SignedLog::from_parts(1, bundle.blocks[i].log_s_prime);
            let s_j = SignedLog::from_parts(1, bundle.blocks[j].log_s_prime);
            let log_rhs = p.alpha * (s_j - s_i).abs().ln_abs();
            let log_lhs = diff.ln_abs();
            pairs.push(HolderPair { i, j, log_lhs, log_rhs, holds: log_lhs <= log_rhs });
        }
    }

    let holder_min = blocks.iter().map(|b| b.holder).fold(f64::INFINITY, f64::min);
    let holder_max = blocks.iter().map(|b| b.holder).fold(0.0, f64::max);

    let tail = BlockShape::new(bundle, bundle.n_max(), false);
    let sup_tail = grid(&tail, false)
        .into_iter()
        .filter(|pt| matches!(pt.0, BlockPiece::Junction | BlockPiece::Entry))
        .map(|(piece, _, local)| tail.eval(piece, local))
        .fold(0.0, f64::max);
    let continuity_margin = std::f64::consts::LN_2 - sup_tail.ln();

    RegularityReport {
        holder_uniform: holder_max <= HOLDER_SPREAD * holder_min,
        blocks,
        seams,
        pairs,
        holder_min,
        holder_max,
        continuity_margin,
    }
}
