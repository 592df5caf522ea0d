use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::annulus::dyadic;
use super::point::Point2;
use crate::error::{Error, Result};

/// How points of `𝔹(b, 2^{-n})` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Sampler {
    /// Square lattice with `per_radius` spacings per radius, shifted by an irrational offset.
    Grid { per_radius: u32 },
    /// Uniform samples in the disk from a seeded stream (reseeded per index).
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Sampler {
    /// Lattice spacing `2^{-(n+6)}` inside `𝔹(b, 2^{-n})`.
    fn default() -> Self {
        Sampler::Grid { per_radius: 64 }
    }
}

const JITTER: (f64, f64) = (0.414_213_562_373_095_1, 0.732_050_807_568_877_2);

impl Sampler {
    /// Sample points of the closed disk `𝔹(center, radius)`, in a fixed order.
    pub fn points(&self, center: Point2, radius: f64, stream: u64) -> Vec<Point2> {
        match *self {
            Sampler::Grid { per_radius } => {
                let h = radius / per_radius as f64;
                let m = per_radius as i64 + 1;
                let mut out = Vec::new();
                for j in -m..=m {
                    for i in -m..=m {
                        let p = Point2::new(
                            center.x() + (i as f64 + JITTER.0 - 0.5) * h,
                            center.y() + (j as f64 + JITTER.1 - 0.5) * h,
                        );
                        if p.dist(&center) <= radius {
                            out.push(p);
                        }
                    }
                }
                out
            }
            Sampler::MonteCarlo { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut out = Vec::with_capacity(samples);
                while out.len() < samples {
                    let x: f64 = rng.random::<f64>() * 2.0 - 1.0;
                    let y: f64 = rng.random::<f64>() * 2.0 - 1.0;
                    if x * x + y * y <= 1.0 {
                        out.push(Point2::new(center.x() + radius * x, center.y() + radius * y));
                    }
                }
                out
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityEntry {
    pub n: u32,
    pub radius: f64,
    /// Estimate of `L²(E ∩ 𝔹(b, 2^{-n})) / (π·4^{-n})`.
    pub fraction: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Sample points left out (indicator undefined there).
    pub excluded: usize,
    pub inconclusive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DyadicDensityProfile {
    pub base: [f64; 2],
    pub sampler: Sampler,
    pub entries: Vec<DensityEntry>,
}

impl DyadicDensityProfile {
    pub fn entry(&self, n: u32) -> Option<&DensityEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "radius", "fraction", "stderr", "samples"])?;
        for e in &self.entries {
            out.write_record([
                e.n.to_string(),
                format!("{:e}", e.radius),
                format!("{}", e.fraction),
                format!("{:e}", e.stderr),
                e.samples.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Area fraction of `{indicator}` inside each `𝔹(b, 2^{-n})`.
pub fn area_density_profile<F>(
    indicator: F,
    b: Point2,
    ns: std::ops::RangeInclusive<u32>,
    sampler: Sampler,
) -> Result<DyadicDensityProfile>
where
    F: Fn(&Point2) -> bool + Sync,
{
    partial_area_density_profile(|p| Some(indicator(p)), b, ns, sampler)
}

/// As [`area_density_profile`], for indicators that are undefined at some
/// points (`None`); those points are excluded from the counts.
pub fn partial_area_density_profile<F>(
    indicator: F,
    b: Point2,
    ns: std::ops::RangeInclusive<u32>,
    sampler: Sampler,
) -> Result<DyadicDensityProfile>
where
    F: Fn(&Point2) -> Option<bool> + Sync,
{
    match sampler {
        Sampler::Grid { per_radius } if per_radius == 0 => {
            return Err(Error::invalid("per_radius", "grid resolution ≥ 1"))
        }
        Sampler::MonteCarlo { samples, .. } if samples == 0 => {
            return Err(Error::invalid("samples", "sample count ≥ 1"))
        }
        _ => {}
    }
    let entries = ns
        .map(|n| {
            let radius = dyadic(n);
            let pts = sampler.points(b, radius, n as u64);
            let verdicts: Vec<Option<bool>> = pts.par_iter().map(&indicator).collect();
            let excluded = verdicts.iter().filter(|v| v.is_none()).count();
            let samples = verdicts.len() - excluded;
            let hits = verdicts.iter().filter(|v| **v == Some(true)).count();
            let (fraction, stderr) = if samples > 0 {
                let p = hits as f64 / samples as f64;
                (p, (p * (1.0 - p) / samples as f64).sqrt())
            } else {
                (f64::NAN, f64::NAN)
            };
            DensityEntry {
                n,
                radius,
                fraction,
                stderr,
                samples,
                excluded,
                inconclusive: samples == 0,
            }
        })
        .collect();
    Ok(DyadicDensityProfile {
        base: b.0,
        sampler,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_plane_and_half_plane() {
        let b = Point2::new(0.1, -0.2);
        let full = area_density_profile(|_| true, b, 1..=6, Sampler::default()).unwrap();
        assert!(full.entries.iter().all(|e| e.fraction == 1.0));
        let half = area_density_profile(|p| p.y() > b.y(), b, 1..=6, Sampler::default()).unwrap();
        for e in &half.entries {
            assert!((e.fraction - 0.5).abs() < 0.01, "{e:?}");
        }
    }

    #[test]
    fn nested_disk_fractions() {
        let b = Point2::new(0.0, 0.0);
        let k = 4;
        let ind = |p: &Point2| p.dist(&b) <= dyadic(k);
        for sampler in [Sampler::default(), Sampler::MonteCarlo { samples: 20_000, seed: 3 }] {
            let prof = area_density_profile(ind, b, 1..=8, sampler).unwrap();
            for e in &prof.entries {
                let expect = if e.n >= k { 1.0 } else { 4f64.powi(k as i32 - e.n as i32).recip() };
                let tol = (3.0 * e.stderr).max(2.0 / e.samples as f64).max(if matches!(sampler, Sampler::Grid { .. }) { 4e-3 } else { 0.0 });
                assert!((e.fraction - expect).abs() <= tol, "{sampler:?} {e:?}");
            }
        }
    }

    #[test]
    fn all_excluded_is_inconclusive() {
        let prof = partial_area_density_profile(|_| None, Point2::ORIGIN, 1..=2, Sampler::default()).unwrap();
        assert!(prof.entries.iter().all(|e| e.inconclusive));
    }

    #[test]
    fn grid_spacing_matches_default_resolution() {
        let pts = Sampler::default().points(Point2::ORIGIN, dyadic(3), 3);
        let expect = std::f64::consts::PI * 64.0 * 64.0;
        assert!((pts.len() as f64 - expect).abs() / expect < 0.01);
    }
}
