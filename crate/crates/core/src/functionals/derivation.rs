use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::functional::FunctionalHandle;
use super::rational::{DerivationValue, LipDomain, RationalFunction};
use crate::error::{Error, Result};
use crate::geometry::{
    annulus_index, dyadic, partial_area_density_profile, DyadicDensityProfile, Point2, Sampler, SwissCheese,
};
use crate::measures::ProductMeasure;
use crate::potentials::{h_tilde, riesz_potential};

/// Pole sum over the removed balls, `c_k = r_k^{1+α}/k²` (optionally times a phase).
#[derive(Clone, Debug, Serialize)]
pub struct CheeseFunction {
    pub f: RationalFunction,
    /// Bound for `Σ |c_k|/|b − w_k|²` over balls beyond the generated ones.
    pub tail_bound: f64,
    pub clearances: Vec<f64>,
}

impl CheeseFunction {
    pub fn derivation(&self, b: Complex64) -> Result<DerivationValue> {
        self.f.derivation_value(b, self.tail_bound)
    }

    pub fn lip_domain(&self, cheese: &SwissCheese) -> LipDomain {
        let half = cheese.square.half_width;
        let c = Complex64::new(cheese.square.center[0], cheese.square.center[1]);
        LipDomain {
            diam: 2.0 * 2f64.sqrt() * half,
            reach: 2f64.sqrt() * half + (c - self.f.poly_center).norm(),
            clearances: self.clearances.clone(),
        }
    }
}

/// `f = Σ_k e^{iθ_k} r_k^{1+α}/(k^p (z − w_k))` over the removed balls (`p = 2`, `θ = 0`
/// by default).
pub fn cheese_function(cheese: &SwissCheese, exponent: f64, phases: Option<&[f64]>) -> Result<CheeseFunction> {
    if !(exponent >= 2.0) {
        return Err(Error::invalid("exponent", "coefficient decay k^{-p} needs p ≥ 2"));
    }
    let alpha = cheese.alpha;
    let mut poles = Vec::with_capacity(cheese.removed.len());
    for (i, ball) in cheese.removed.iter().enumerate() {
        let k = (i + 1) as f64;
        let phase = phases.and_then(|p| p.get(i)).copied().unwrap_or(0.0);
        let c = Complex64::from_polar(ball.radius.powf(1.0 + alpha) / k.powf(exponent), phase);
        poles.push((ball.center.to_complex(), c));
    }
    let k_next = (cheese.removed.len() + 1) as f64;
    // a ball of annulus n has r^{1+α} ≤ s_n/4^n and |b − w| ≥ 2^{-(n+1)}
    let tail_bound = 4.0 * cheese.tail_bound / k_next.powf(exponent);
    Ok(CheeseFunction {
        f: RationalFunction {
            poles,
            poly: [Complex64::new(0.0, 0.0); 3],
            poly_center: cheese.base.to_complex(),
        },
        tail_bound,
        clearances: cheese.removed.iter().map(|b| b.radius).collect(),
    })
}

/// Stand-in for a representing measure of the derivation at `b`: atoms at
/// `((p_n, b), θ_n |p_n − b|^α/(p_n − b))`, `p_n` the point of ball `n` nearest
/// to `b`, `θ_n ∝ 2^{-n}` summing to 1, so that `L(μ)(z − b) = 1`.
pub fn surrogate_derivation_measure(cheese: &SwissCheese) -> Result<FunctionalHandle> {
    let b = cheese.base.to_complex();
    let mut atoms = Vec::with_capacity(cheese.removed.len());
    let weights: Vec<f64> = cheese
        .removed
        .iter()
        .map(|ball| {
            let n = annulus_index(&ball.center, &cheese.base).ok().flatten().unwrap_or(0);
            dyadic(n)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    for (ball, w) in cheese.removed.iter().zip(&weights) {
        let c = ball.center.to_complex();
        let dir = (c - b) / (c - b).norm();
        let p = c - dir * ball.radius;
        let d = p - b;
        atoms.push((p, b, (w / total) * d.norm().powf(cheese.alpha) / d));
    }
    FunctionalHandle::normalized_derivation(ProductMeasure::from_complex(atoms), cheese.alpha, b)
}

/// `E = E₁ ∩ E₂ ∩ E₃ ∩ U ∩ 𝔹(b, 1)` with
/// `E₁ = {|a − b| ∫ d|μ_♯|/|z − a| ≤ 1}`, `E₂ = {|a − b|^{1+α} H̃(μ)(a) ≤ δ}`,
/// `E₃ = {|a − b| H̃(|z − w|^α μ)(a) ≤ M}`.
#[derive(Clone, Debug, Serialize)]
pub struct GoodSet {
    #[serde(skip)]
    pub mu: ProductMeasure<2>,
    #[serde(skip)]
    weighted: ProductMeasure<2>,
    #[serde(skip)]
    marginal: crate::measures::DiscreteMeasure<2>,
    pub alpha: f64,
    pub base: [f64; 2],
    pub delta: f64,
    pub m: f64,
    /// `K = M + 2`.
    pub k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GoodSetMembership {
    pub e1: bool,
    pub e2: bool,
    pub e3: bool,
    pub in_u: bool,
    pub in_unit_ball: bool,
}

impl GoodSetMembership {
    pub fn all(&self) -> bool {
        self.e1 && self.e2 && self.e3 && self.in_u && self.in_unit_ball
    }
}

impl GoodSet {
    /// `δ = 1` and `M = 6‖μ‖` unless given.
    pub fn new(mu: &ProductMeasure<2>, alpha: f64, base: Point2, delta: Option<f64>, m: Option<f64>) -> Result<Self> {
        if mu.mass_on_vertical_slice(&base) > 0.0 {
            return Err(Error::invalid("mu", "no mass on the slice {b}×X (apply avoid_vertical_slice first)"));
        }
        let delta = delta.unwrap_or(1.0);
        let m = m.unwrap_or(6.0 * mu.total_variation());
        if !(delta > 0.0) {
            return Err(Error::invalid("delta", "δ > 0"));
        }
        if !(m > 0.0) {
            return Err(Error::invalid("M", "M > 0"));
        }
        let weighted = mu.weighted(|z, w| Complex64::new(z.dist(w).powf(alpha), 0.0));
        Ok(GoodSet {
            mu: mu.clone(),
            marginal: mu.marginal_first(true),
            weighted,
            alpha,
            base: base.0,
            delta,
            m,
            k: m + 2.0,
        })
    }

    pub fn membership(&self, cheese: &SwissCheese, a: &Point2) -> GoodSetMembership {
        let b = Point2::new(self.base[0], self.base[1]);
        let r = a.dist(&b);
        GoodSetMembership {
            e1: r * riesz_potential(&self.marginal, 1.0, a) <= 1.0,
            e2: r.powf(1.0 + self.alpha) * h_tilde(&self.mu, self.alpha, a) <= self.delta,
            e3: r * h_tilde(&self.weighted, self.alpha, a) <= self.m,
            in_u: cheese.in_u(a),
            in_unit_ball: r < 1.0,
        }
    }

    pub fn contains(&self, cheese: &SwissCheese, a: &Point2) -> bool {
        self.membership(cheese, a).all()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeviationSample {
    pub a: [f64; 2],
    pub shell: u32,
    pub dq: Complex64,
    pub deviation: f64,
    pub in_e: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShellStats {
    pub n: u32,
    pub points: usize,
    pub in_e: usize,
    pub sup_deviation: f64,
    pub mean_deviation: f64,
    /// `E ∩ A_n` had no sample points.
    pub empty: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivationReport {
    pub derivation: Complex64,
    pub tail_bound: f64,
    pub epsilon: f64,
    pub shells: Vec<ShellStats>,
    /// Density of `{a ∈ E : |dq(a) − ∂f| < ε}` in `𝔹(b, 2^{-n})`.
    pub good_profile: DyadicDensityProfile,
    /// `sup` deviation on the first nonempty shell over that on the last.
    pub decay_factor: Option<f64>,
    #[serde(skip)]
    pub samples: Vec<DeviationSample>,
}

impl DerivationReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["a_re", "a_im", "shell", "dq_re", "dq_im", "deviation", "in_E"])?;
        for s in &self.samples {
            out.write_record([
                format!("{}", s.a[0]),
                format!("{}", s.a[1]),
                s.shell.to_string(),
                format!("{}", s.dq.re),
                format!("{}", s.dq.im),
                format!("{}", s.deviation),
                (s.in_e as u8).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn shell(&self, n: u32) -> Option<&ShellStats> {
        self.shells.iter().find(|s| s.n == n)
    }
}

/// Deviations `|dq(a) − ∂f|` over sample points of each shell `A_n(b)`,
/// split by membership in `E`.
pub fn dq_convergence_experiment<E>(
    f: &RationalFunction,
    derivation: DerivationValue,
    b: Point2,
    in_e: E,
    shells: std::ops::RangeInclusive<u32>,
    sampler: Sampler,
    epsilon: f64,
) -> Result<DerivationReport>
where
    E: Fn(&Point2) -> bool + Sync,
{
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon", "ε > 0"));
    }
    let bc = b.to_complex();
    let df = derivation.value;
    let deviation = |a: &Point2| -> Option<(Complex64, f64)> {
        let dq = f.difference_quotient(a.to_complex(), bc).ok()?;
        Some((dq, (dq - df).norm()))
    };
    let mut samples = Vec::new();
    let mut stats = Vec::new();
    for n in shells.clone() {
        let pts: Vec<Point2> = sampler
            .points(b, dyadic(n), n as u64)
            .into_iter()
            .filter(|a| annulus_index(a, &b).ok().flatten() == Some(n))
            .collect();
        let rows: Vec<DeviationSample> = pts
            .par_iter()
            .map(|a| {
                let e = in_e(a);
                let (dq, dev) = deviation(a).unwrap_or((Complex64::new(f64::NAN, f64::NAN), f64::NAN));
                DeviationSample {
                    a: a.0,
                    shell: n,
                    dq,
                    deviation: dev,
                    in_e: e && dev.is_finite(),
                }
            })
            .collect();
        let in_set: Vec<f64> = rows.iter().filter(|r| r.in_e).map(|r| r.deviation).collect();
        stats.push(ShellStats {
            n,
            points: rows.len(),
            in_e: in_set.len(),
            sup_deviation: in_set.iter().copied().fold(0.0, f64::max),
            mean_deviation: if in_set.is_empty() { f64::NAN } else { in_set.iter().sum::<f64>() / in_set.len() as f64 },
            empty: in_set.is_empty(),
        });
        samples.extend(rows);
    }
    let good_profile = partial_area_density_profile(
        |a| Some(in_e(a) && deviation(a).is_some_and(|(_, d)| d < epsilon)),
        b,
        shells,
        sampler,
    )?;
    let nonempty: Vec<&ShellStats> = stats.iter().filter(|s| !s.empty).collect();
    let decay_factor = match (nonempty.first(), nonempty.last()) {
        (Some(first), Some(last)) if nonempty.len() >= 2 && last.sup_deviation > 0.0 => {
            Some(first.sup_deviation / last.sup_deviation)
        }
        _ => None,
    };
    Ok(DerivationReport {
        derivation: df,
        tail_bound: derivation.tail_bound,
        epsilon,
        shells: stats,
        good_profile,
        decay_factor,
        samples,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RayRecord {
    pub label: String,
    pub derivation: Complex64,
    /// `dq(a_m)` for `m = 1..=m_max`.
    pub quotients: Vec<Complex64>,
    pub max_abs: f64,
    /// `max_{m ≥ m_ref} |dq(a_m) − dq(a_{m_ref})| / |dq(a_{m_ref})|`.
    pub drift_after_ref: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayReport {
    pub direction: f64,
    pub clearance: f64,
    pub points: Vec<[f64; 2]>,
    pub m_ref: u32,
    pub functions: Vec<RayRecord>,
}

/// A panel of cheese functions: coefficient decays `k^{-p}`, `p ∈ {2, 2.5, 3}`,
/// with seeded unit phases, `count` in all.
pub fn function_panel(cheese: &SwissCheese, count: usize, seed: u64) -> Result<Vec<(String, CheeseFunction)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let p = [2.0, 2.5, 3.0][j % 3];
        let phases: Option<Vec<f64>> = if j == 0 {
            None
        } else {
            Some((0..cheese.removed.len()).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect())
        };
        let f = cheese_function(cheese, p, phases.as_deref())?;
        out.push((format!("f{j}_p{p}"), f));
    }
    Ok(out)
}

/// Difference quotients along `a_m = b + e^{iφ} 2^{-m}` with `φ` the clearest ray.
pub fn ray_experiment(
    cheese: &SwissCheese,
    panel: &[(String, CheeseFunction)],
    m_max: u32,
    m_ref: u32,
) -> Result<RayReport> {
    if m_ref == 0 || m_ref > m_max {
        return Err(Error::invalid("m_ref", "1 ≤ m_ref ≤ m_max"));
    }
    let (phi, clearance) = cheese.clear_ray_direction();
    let b = cheese.base.to_complex();
    let dir = Complex64::from_polar(1.0, phi);
    let points: Vec<Complex64> = (1..=m_max).map(|m| b + dir * dyadic(m)).collect();
    for p in &points {
        if !cheese.in_u(&Point2::from_complex(*p)) {
            return Err(Error::NotInDomain(*p));
        }
    }
    let mut functions = Vec::with_capacity(panel.len());
    for (label, cf) in panel {
        let quotients = points.iter().map(|a| cf.f.difference_quotient(*a, b)).collect::<Result<Vec<_>>>()?;
        let max_abs = quotients.iter().map(|q| q.norm()).fold(0.0, f64::max);
        let reference = quotients[m_ref as usize - 1];
        let drift_after_ref = quotients[m_ref as usize - 1..]
            .iter()
            .map(|q| (q - reference).norm() / reference.norm())
            .fold(0.0, f64::max);
        functions.push(RayRecord {
            label: label.clone(),
            derivation: cf.derivation(b)?.value,
            quotients,
            max_abs,
            drift_after_ref,
        });
    }
    Ok(RayReport {
        direction: phi,
        clearance,
        points: points.iter().map(|p| [p.re, p.im]).collect(),
        m_ref,
        functions,
    })
}

/// Test functions `g` with `g(b) = 0` and `‖g‖_α ≤ 1` by the analytic bounds:
/// the identity `z − b`, and seeded pole pairs outside the square, scaled down.
pub fn unit_probes(cheese: &SwissCheese, count: usize, seed: u64) -> Result<Vec<RationalFunction>> {
    let b = cheese.base.to_complex();
    let half = cheese.square.half_width;
    let center = Complex64::new(cheese.square.center[0], cheese.square.center[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let raw = if j == 0 {
            RationalFunction::polynomial(b, [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
        } else {
            let mut poles = Vec::new();
            for _ in 0..2 {
                let r = half * (1.5 + rng.random::<f64>());
                let w = center + Complex64::from_polar(r * 2f64.sqrt(), rng.random::<f64>() * std::f64::consts::TAU);
                let c = Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
                poles.push((w, c));
            }
            let mut f = RationalFunction::from_poles(poles);
            f.poly_center = b;
            f.poly[1] = Complex64::from_polar(rng.random::<f64>(), rng.random::<f64>() * std::f64::consts::TAU);
            f.poly[2] = Complex64::from_polar(rng.random::<f64>(), rng.random::<f64>() * std::f64::consts::TAU);
            f
        };
        let g = raw.vanishing_at(b)?;
        let clearances = g.poles.iter().map(|(w, _)| outside_square_distance(cheese, *w)).collect();
        let dom = LipDomain {
            diam: 2.0 * 2f64.sqrt() * half,
            reach: 2f64.sqrt() * half + (center - b).norm(),
            clearances,
        };
        let norm = g.lip_seminorm_probe(&[], cheese.alpha, &dom)?.upper + g.sup_bound(&dom);
        out.push(g.scaled(Complex64::new(1.0 / norm, 0.0)));
    }
    Ok(out)
}

fn outside_square_distance(cheese: &SwissCheese, w: Complex64) -> f64 {
    let dx = ((w.re - cheese.square.center[0]).abs() - cheese.square.half_width).max(0.0);
    let dy = ((w.im - cheese.square.center[1]).abs() - cheese.square.half_width).max(0.0);
    dx.hypot(dy)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundChainReport {
    pub points: usize,
    pub k: f64,
    /// `max |T̂(a) − 1| / (π|a − b|^{1−α})`.
    pub max_t_ratio: f64,
    /// `max |D_a(g)| / (K + π)`.
    pub max_d_ratio: f64,
    pub t_violations: usize,
    pub d_violations: usize,
    /// `max |R_a(1) − 1|`.
    pub max_mass_defect: f64,
}

/// Check `|T̂(a) − 1| ≤ π|a − b|^{1−α}` and `|D_a(g)| ≤ K + π` at the sample
/// points of `E ∩ A_n(b)`.
pub fn bound_chain(
    t1: &FunctionalHandle,
    good: &GoodSet,
    cheese: &SwissCheese,
    probes: &[RationalFunction],
    shells: std::ops::RangeInclusive<u32>,
    sampler: Sampler,
) -> Result<BoundChainReport> {
    let b = cheese.base;
    let bc = b.to_complex();
    let pi = std::f64::consts::PI;
    let mut pts = Vec::new();
    for n in shells {
        pts.extend(
            sampler
                .points(b, dyadic(n), n as u64)
                .into_iter()
                .filter(|a| annulus_index(a, &b).ok().flatten() == Some(n) && good.contains(cheese, a)),
        );
    }
    let rows: Vec<Result<(f64, f64, f64)>> = pts
        .par_iter()
        .map(|p| {
            let a = p.to_complex();
            let mut t_ratio: f64 = 0.0;
            let mut d_ratio: f64 = 0.0;
            let mut defect: f64 = 0.0;
            for g in probes {
                let r = super::pipeline::t_pipeline(t1, bc, |z| g.eval(z), a)?;
                t_ratio = t_ratio.max((r.t_hat - 1.0).norm() / (pi * (a - bc).norm().powf(1.0 - t1.alpha)));
                d_ratio = d_ratio.max(r.d_definition.norm() / (good.k + pi));
                defect = defect.max((r.r_mass - 1.0).norm());
            }
            Ok((t_ratio, d_ratio, defect))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BoundChainReport {
        points: rows.len(),
        k: good.k,
        max_t_ratio: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        max_d_ratio: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        t_violations: rows.iter().filter(|r| r.0 > 1.0).count(),
        d_violations: rows.iter().filter(|r| r.1 > 1.0).count(),
        max_mass_defect: rows.iter().map(|r| r.2).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CheeseParams;

    #[test]
    fn surrogate_is_normalized_and_off_the_slice() {
        let cheese = SwissCheese::generate(&CheeseParams::default()).unwrap();
        let h = surrogate_derivation_measure(&cheese).unwrap();
        let b = cheese.base.to_complex();
        assert!((h.apply(|z| Ok(z - b)).unwrap() - 1.0).norm() < 1e-12);
        assert_eq!(h.mu.mass_on_vertical_slice(&cheese.base), 0.0);
        assert!(!h.mu.has_diagonal_mass());
    }

    #[test]
    fn smooth_function_converges_everywhere() {
        let b = Point2::new(0.0, 0.0);
        let f = RationalFunction::from_poles(vec![(Complex64::new(3.0, 1.0), Complex64::new(1.0, -1.0))]);
        let d = f.derivation_value(b.to_complex(), 0.0).unwrap();
        let rep = dq_convergence_experiment(&f, d, b, |_| true, 2..=8, Sampler::Grid { per_radius: 16 }, 5e-2).unwrap();
        for w in rep.shells.windows(2) {
            assert!(w[1].sup_deviation < w[0].sup_deviation);
        }
        assert!(rep.good_profile.entries.iter().all(|e| e.fraction == 1.0));
    }
}
