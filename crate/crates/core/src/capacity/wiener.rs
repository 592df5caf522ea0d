use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::discretize::{CellGrid, DiscretizedCompact, LatticeSpec};
use super::estimate::capacity_lp;
use crate::error::{Error, Result};
use crate::geometry::{dyadic, Point};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrendParams {
    /// Fitted geometric ratio at or below which terms count as decaying.
    pub ratio_threshold: f64,
    /// Terms no smaller than this fraction of the tail maximum count as bounded below.
    pub floor_fraction: f64,
}

impl Default for TrendParams {
    fn default() -> Self {
        TrendParams {
            ratio_threshold: 0.8,
            floor_fraction: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WienerParams {
    /// Cells per annulus outer radius are `2^{level+1}`.
    pub level: u32,
    #[serde(skip)]
    pub lattice: LatticeSpec,
    pub trend: TrendParams,
}

impl Default for WienerParams {
    fn default() -> Self {
        WienerParams {
            level: 3,
            lattice: LatticeSpec::default(),
            trend: TrendParams::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendVerdict {
    BoundedTrend,
    DivergingTrend,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WienerEntry {
    pub n: u32,
    pub capacity: f64,
    pub term: f64,
    pub partial_sum: f64,
    pub support_cells: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WienerSeriesReport {
    pub order: f64,
    pub base: Vec<f64>,
    pub entries: Vec<WienerEntry>,
    pub verdict: TrendVerdict,
    /// Fitted ratio of successive terms over the tail, when defined.
    pub tail_ratio: Option<f64>,
    /// Largest term; the ceiling `C_s(A_n ∩ E) ≤ 2^{-sn}` predicts ≤ 1 up to slack.
    pub max_term: f64,
    pub params: WienerParams,
}

/// Per-annulus capacities of `A_n(b) ∩ E` and the partial sums of `Σ 2^{sn}·C_s(A_n(b) ∩ E)`.
pub fn wiener_partial_sums<const D: usize, F>(
    e: F,
    b: Point<D>,
    s: f64,
    n_range: std::ops::RangeInclusive<u32>,
    params: &WienerParams,
) -> Result<WienerSeriesReport>
where
    F: Fn(&Point<D>) -> bool + Sync,
{
    if !(s > 0.0 && s < D as f64) {
        return Err(Error::invalid("s", format!("0 < s < d = {D}")));
    }
    if *n_range.start() < 1 {
        return Err(Error::invalid("n_min", "annulus indices start at 1"));
    }
    let ns: Vec<u32> = n_range.collect();
    let caps: Vec<(f64, usize)> = ns
        .par_iter()
        .map(|&n| {
            let outer = dyadic(n);
            let inner = dyadic(n + 1);
            let slack = 1e-12 * outer;
            let shell = |p: &Point<D>| {
                let r = p.dist(&b);
                r >= inner - slack && r <= outer + slack && e(p)
            };
            let k = DiscretizedCompact::from_indicator(
                shell,
                Point(b.0.map(|c| c - outer)),
                Point(b.0.map(|c| c + outer)),
                CellGrid {
                    anchor: b,
                    cell: outer / (1u64 << (params.level + 1)) as f64,
                },
                params.lattice,
            );
            capacity_lp(&k, s).map(|est| (est.value, k.support.len()))
        })
        .collect::<Result<_>>()?;

    let mut partial = 0.0;
    let entries: Vec<WienerEntry> = ns
        .iter()
        .zip(caps)
        .map(|(&n, (capacity, cells))| {
            let term = (s * n as f64).exp2() * capacity;
            partial += term;
            WienerEntry {
                n,
                capacity,
                term,
                partial_sum: partial,
                support_cells: cells,
            }
        })
        .collect();
    let terms: Vec<f64> = entries.iter().map(|e| e.term).collect();
    let (verdict, tail_ratio) = classify_trend(&terms, &params.trend);
    Ok(WienerSeriesReport {
        order: s,
        base: b.0.to_vec(),
        max_term: terms.iter().copied().fold(0.0, f64::max),
        entries,
        verdict,
        tail_ratio,
        params: *params,
    })
}

/// Trend of a finite run of nonnegative series terms, judged on the last ⌈half⌉.
pub fn classify_trend(terms: &[f64], p: &TrendParams) -> (TrendVerdict, Option<f64>) {
    if terms.is_empty() {
        return (TrendVerdict::Inconclusive, None);
    }
    let tail = &terms[terms.len() / 2..];
    let last = *tail.last().unwrap();
    if last == 0.0 {
        // terms vanished: the computed part of E stays away from b
        return (TrendVerdict::BoundedTrend, Some(0.0));
    }
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .enumerate()
        .filter(|(_, t)| **t > 0.0)
        .map(|(i, t)| (i as f64, t.ln()))
        .collect();
    let ratio = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some((sxy / sxx).exp())
    } else {
        None
    };
    let max = tail.iter().copied().fold(0.0, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    match ratio {
        Some(r) if r <= p.ratio_threshold => (TrendVerdict::BoundedTrend, Some(r)),
        Some(r) if min >= p.floor_fraction * max => (TrendVerdict::DivergingTrend, Some(r)),
        r => (TrendVerdict::Inconclusive, r),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThinnessVerdict {
    ThinTrend,
    NotThinTrend,
    Inconclusive,
}

impl std::fmt::Display for ThinnessVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ThinnessVerdict::ThinTrend => "thin-trend",
            ThinnessVerdict::NotThinTrend => "not-thin-trend",
            ThinnessVerdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Thinness reading of a Wiener report. A finite computation only ever sees a
/// trend; the convergence of the infinite series is not decided here.
pub fn s_thin_verdict(report: &WienerSeriesReport) -> ThinnessVerdict {
    match report.verdict {
        TrendVerdict::BoundedTrend => ThinnessVerdict::ThinTrend,
        TrendVerdict::DivergingTrend => ThinnessVerdict::NotThinTrend,
        TrendVerdict::Inconclusive => ThinnessVerdict::Inconclusive,
    }
}

impl WienerSeriesReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "capacity", "term", "partial_sum"])?;
        for e in &self.entries {
            out.write_record([
                e.n.to_string(),
                format!("{:e}", e.capacity),
                format!("{:e}", e.term),
                format!("{:e}", e.partial_sum),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_rules() {
        let p = TrendParams::default();
        assert_eq!(classify_trend(&[1.0, 0.5, 0.0, 0.0], &p).0, TrendVerdict::BoundedTrend);
        let geo: Vec<f64> = (0..10).map(|k| 0.5f64.powi(k)).collect();
        assert_eq!(classify_trend(&geo, &p).0, TrendVerdict::BoundedTrend);
        assert_eq!(classify_trend(&[0.0, 0.0, 0.7, 0.7, 0.7, 0.7], &p).0, TrendVerdict::DivergingTrend);
        // slow decay: neither geometric enough nor flat enough
        let slow: Vec<f64> = (0..20).map(|k| 0.9f64.powi(k)).collect();
        assert_eq!(classify_trend(&slow, &p).0, TrendVerdict::Inconclusive);
    }
}
