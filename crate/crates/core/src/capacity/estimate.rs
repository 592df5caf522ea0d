use rayon::prelude::*;
use serde::Serialize;

use super::discretize::{cell_kernel, DiscretizedCompact};
use super::lp::{solve_packing, SimplexOptions};
use crate::error::{Error, Result};
use crate::geometry::{Ball, Point};

/// LP surrogate for the Riesz capacity `C_s(K)`.
#[derive(Clone, Debug, Serialize)]
pub struct CapacityEstimate {
    pub value: f64,
    pub order: f64,
    pub level: Option<u32>,
    pub cell: f64,
    /// Which way the discretization can push the value.
    pub bias: &'static str,
    pub diagnostics: LpDiagnostics,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LpDiagnostics {
    pub support_points: usize,
    pub constraint_points: usize,
    pub active_constraints: usize,
    pub pivots: usize,
    /// Optimal mass per support cell, in support order.
    pub masses: Vec<f64>,
    /// Largest discrete potential over the audit lattice (should be ≤ 1).
    pub audit_max_potential: f64,
    pub audit_violations: usize,
}

const BIAS_NOTE: &str = "constraints enforced only at sampled points (upward); support is an inner cell approximation (downward)";

/// Maximize `Σ m_i` subject to `Σ_i m_i·k(x_i, y_j) ≤ 1` at every constraint point.
pub fn capacity_lp<const D: usize>(k: &DiscretizedCompact<D>, s: f64) -> Result<CapacityEstimate> {
    capacity_lp_with(k, s, &SimplexOptions::default())
}

pub fn capacity_lp_with<const D: usize>(
    k: &DiscretizedCompact<D>,
    s: f64,
    opts: &SimplexOptions,
) -> Result<CapacityEstimate> {
    if !(s > 0.0 && s < D as f64) {
        return Err(Error::invalid("s", format!("0 < s < d = {D}")));
    }
    if k.is_empty() {
        return Ok(CapacityEstimate {
            value: 0.0,
            order: s,
            level: None,
            cell: k.cell,
            bias: BIAS_NOTE,
            diagnostics: LpDiagnostics::default(),
        });
    }
    let h = k.cell;
    let n = k.support.len();
    let rows: Vec<&Point<D>> = k.constraint_points().collect();
    let matrix: Vec<f64> = rows
        .par_iter()
        .flat_map_iter(|y| k.support.iter().map(move |x| cell_kernel(x, y, h, s)))
        .collect();
    let rhs = vec![1.0; rows.len()];
    let c = vec![1.0; n];
    let sol = solve_packing(&matrix, &rhs, &c, opts)?;

    let audit: Vec<f64> = k
        .audit
        .par_iter()
        .map(|y| {
            k.support
                .iter()
                .zip(&sol.x)
                .filter(|(_, m)| **m > 0.0)
                .map(|(x, m)| m * cell_kernel(x, y, h, s))
                .sum()
        })
        .collect();
    let audit_max = audit.iter().copied().fold(0.0, f64::max);
    let audit_violations = audit.iter().filter(|&&v| v > 1.0 + 1e-9).count();

    Ok(CapacityEstimate {
        value: sol.objective,
        order: s,
        level: None,
        cell: h,
        bias: BIAS_NOTE,
        diagnostics: LpDiagnostics {
            support_points: n,
            constraint_points: rows.len(),
            active_constraints: sol.slack.iter().filter(|&&v| v <= 1e-9).count(),
            pivots: sol.pivots,
            masses: sol.x,
            audit_max_potential: audit_max,
            audit_violations,
        },
    })
}

/// Capacity estimate of a closed ball at a refinement level.
pub fn ball_capacity<const D: usize>(ball: &Ball<D>, s: f64, level: u32) -> Result<CapacityEstimate> {
    let k = DiscretizedCompact::ball(ball.center, ball.radius, level, Default::default());
    let mut est = capacity_lp(&k, s)?;
    est.level = Some(level);
    Ok(est)
}

/// Aitken extrapolation of three successive refinement values; falls back to
/// the last value when the differences do not shrink geometrically.
pub fn richardson_extrapolate(v: [f64; 3]) -> f64 {
    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    let denom = d2 - d1;
    if denom.abs() < 1e-15 || d1 == 0.0 || d2 / d1 <= 0.0 || (d2 / d1).abs() >= 1.0 {
        return v[2];
    }
    v[2] - d2 * d2 / denom
}

/// `c·|E|^{s/d}`, the volume lower bound for `C_s(E)`.
pub fn lebesgue_lower_bound(area: f64, s: f64, d: usize, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::invalid("c", "c > 0"));
    }
    if !(area >= 0.0) {
        return Err(Error::invalid("area", "area ≥ 0"));
    }
    Ok(c * area.powf(s / d as f64))
}

/// Smallest ratio `estimate / |B|^{s/d}` over a panel of balls at one level.
pub fn calibrate_lebesgue_constant<const D: usize>(balls: &[Ball<D>], s: f64, level: u32) -> Result<f64> {
    let mut c = f64::INFINITY;
    for b in balls {
        let est = ball_capacity(b, s, level)?;
        let vol = crate::geometry::unit_ball_volume(D) * b.radius.powi(D as i32);
        c = c.min(est.value / vol.powf(s / D as f64));
    }
    Ok(c)
}

/// `Σ r_i^β` over a cover, an upper bound for the `β`-dimensional Hausdorff content.
pub fn hausdorff_content_upper<const D: usize>(cover: &[Ball<D>], beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::invalid("beta", "β > 0"));
    }
    Ok(cover.iter().map(|b| b.radius.powf(beta)).sum())
}
