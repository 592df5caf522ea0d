use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::annulus::dyadic;
use super::ball::Ball;
use super::point::{Point, Point2};
use crate::error::{Error, Result};

/// Axis-aligned open square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Square {
    pub center: [f64; 2],
    pub half_width: f64,
}

impl Square {
    /// Unit square centered at `b`.
    pub fn unit_around(b: Point2) -> Self {
        Square {
            center: b.0,
            half_width: 0.5,
        }
    }

    pub fn contains_open(&self, z: &Point2) -> bool {
        (z.x() - self.center[0]).abs() < self.half_width && (z.y() - self.center[1]).abs() < self.half_width
    }

    /// Distance from an interior point to the square's boundary.
    pub fn boundary_distance(&self, z: &Point2) -> f64 {
        let dx = (z.x() - self.center[0]).abs();
        let dy = (z.y() - self.center[1]).abs();
        self.half_width - dx.max(dy)
    }

    pub fn contains_ball(&self, ball: &Ball<2>) -> bool {
        let c = ball.center;
        (c.x() - self.center[0]).abs() + ball.radius < self.half_width
            && (c.y() - self.center[1]).abs() + ball.radius < self.half_width
    }
}

/// The summable sequence `s_n` controlling per-annulus radius budgets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BudgetRule {
    /// `s_n = scale · ratio^n`, `0 < ratio < 1`.
    Geometric { scale: f64, ratio: f64 },
    /// `s_n = scale · n^{-exponent}`, `exponent > 1`.
    PowerLaw { scale: f64, exponent: f64 },
}

impl Default for BudgetRule {
    fn default() -> Self {
        BudgetRule::Geometric {
            scale: 1.0,
            ratio: 0.5,
        }
    }
}

impl BudgetRule {
    pub fn value(&self, n: u32) -> f64 {
        match *self {
            BudgetRule::Geometric { scale, ratio } => scale * ratio.powi(n as i32),
            BudgetRule::PowerLaw { scale, exponent } => scale * (n as f64).powf(-exponent),
        }
    }

    /// Analytic bound for `Σ_{n > last} s_n`.
    pub fn tail_after(&self, last: u32) -> f64 {
        match *self {
            BudgetRule::Geometric { scale, ratio } => scale * ratio.powi(last as i32 + 1) / (1.0 - ratio),
            BudgetRule::PowerLaw { scale, exponent } => {
                scale * (last.max(1) as f64).powf(1.0 - exponent) / (exponent - 1.0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BudgetRule::Geometric { scale, ratio } => {
                if !(scale >= 0.0 && scale.is_finite()) {
                    return Err(Error::invalid("budget.scale", "scale ≥ 0"));
                }
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::invalid("budget.ratio", "0 < ratio < 1 so that Σ s_n < ∞"));
                }
            }
            BudgetRule::PowerLaw { scale, exponent } => {
                if !(scale >= 0.0 && scale.is_finite()) {
                    return Err(Error::invalid("budget.scale", "scale ≥ 0"));
                }
                if !(exponent > 1.0) {
                    return Err(Error::invalid("budget.exponent", "exponent > 1 so that Σ s_n < ∞"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheeseParams {
    pub alpha: f64,
    pub budget: BudgetRule,
    pub n_max: u32,
    pub balls_per_annulus: u32,
    pub seed: u64,
    pub base: [f64; 2],
    /// Defaults to the unit square centered at the base point.
    pub square: Option<Square>,
    /// Radii are shrunk by this factor below the largest admissible value.
    pub safety: f64,
}

impl Default for CheeseParams {
    fn default() -> Self {
        CheeseParams {
            alpha: 0.5,
            budget: BudgetRule::default(),
            n_max: 24,
            balls_per_annulus: 1,
            seed: 0,
            base: [0.0, 0.0],
            square: None,
            safety: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRecord {
    pub n: u32,
    /// `s_n / 4^n`.
    pub budget: f64,
    /// `Σ r^{1+α}` over removed balls meeting the closed annulus.
    pub used: f64,
    pub max_radius: f64,
    pub balls: Vec<usize>,
}

/// Classification of a point against a swiss cheese.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    InU,
    Complement,
    OnBallBoundary,
}

/// `U = interior(square) ∖ (∪ removed balls ∪ {b})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwissCheese {
    pub square: Square,
    pub base: Point2,
    pub alpha: f64,
    pub budget: BudgetRule,
    /// `s_1 … s_{N}`.
    pub budgets: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Analytic bound on `Σ_{n > N} s_n`.
    pub tail_bound: f64,
    /// Removed closed balls, listed annulus by annulus.
    pub removed: Vec<Ball<2>>,
    pub annuli: Vec<AnnulusRecord>,
}

impl SwissCheese {
    /// Seeded construction: `balls_per_annulus` balls on the mid-circle of each
    /// annulus `A_n(b)`, `n ≤ n_max`, at jittered angles, each as large as the
    /// budget `s_n/4^n` and the annulus geometry allow, times `safety`.
    pub fn generate(p: &CheeseParams) -> Result<Self> {
        if !(p.alpha > 0.0 && p.alpha < 1.0) {
            return Err(Error::invalid("alpha", "0<α<1"));
        }
        p.budget.validate()?;
        if p.n_max < 1 {
            return Err(Error::invalid("n_max", "n_max ≥ 1"));
        }
        if p.balls_per_annulus < 1 {
            return Err(Error::invalid("balls_per_annulus", "at least one ball per annulus"));
        }
        if !(p.safety > 0.0 && p.safety < 1.0) {
            return Err(Error::invalid("safety", "0 < safety < 1"));
        }
        let base = Point(p.base);
        let square = p.square.unwrap_or_else(|| Square::unit_around(base));
        if !square.contains_open(&base) {
            return Err(Error::invalid("square", "the base point must lie inside the square"));
        }

        let k = p.balls_per_annulus as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let mut removed = Vec::with_capacity(p.n_max as usize * k);
        let mut budgets = Vec::with_capacity(p.n_max as usize);
        for n in 1..=p.n_max {
            let s_n = p.budget.value(n);
            budgets.push(s_n);
            let share = s_n * dyadic(2 * n) / k as f64;
            if !(share > 0.0) {
                return Err(Error::InfeasiblePacking {
                    annulus: n,
                    reason: "zero budget cannot host a removed ball".into(),
                });
            }
            let r_budget = share.powf(1.0 / (1.0 + p.alpha));
            let mid = 0.75 * dyadic(n);
            let half_width = dyadic(n + 2);
            let r_geom = half_width.min(mid * (std::f64::consts::PI / (2.0 * k as f64)).sin());
            let r = p.safety * r_budget.min(r_geom);
            if !(r > 0.0) {
                return Err(Error::InfeasiblePacking {
                    annulus: n,
                    reason: format!("radius underflow (budget share {share:e})"),
                });
            }
            let theta0 = rng.random::<f64>() * std::f64::consts::TAU;
            for j in 0..k {
                let jitter = (rng.random::<f64>() - 0.5) * std::f64::consts::FRAC_PI_2 / k as f64;
                let theta = theta0 + std::f64::consts::TAU * j as f64 / k as f64 + jitter;
                let center = Point2::new(base.x() + mid * theta.cos(), base.y() + mid * theta.sin());
                let ball = Ball::closed(center, r);
                if !square.contains_ball(&ball) {
                    return Err(Error::InfeasiblePacking {
                        annulus: n,
                        reason: "removed ball does not fit inside the bounding square".into(),
                    });
                }
                removed.push(ball);
            }
        }
        let cheese = Self::assemble(square, base, p.alpha, p.budget, budgets, removed);
        cheese.validate()?;
        Ok(cheese)
    }

    fn assemble(
        square: Square,
        base: Point2,
        alpha: f64,
        budget: BudgetRule,
        budgets: Vec<f64>,
        removed: Vec<Ball<2>>,
    ) -> Self {
        let mut acc = 0.0;
        let partial_sums = budgets
            .iter()
            .map(|s| {
                acc += s;
                acc
            })
            .collect();
        let n_max = budgets.len() as u32;
        let annuli = (1..=n_max)
            .map(|n| {
                let balls: Vec<usize> = removed
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.meets_shell(&base, dyadic(n + 1), dyadic(n)))
                    .map(|(i, _)| i)
                    .collect();
                AnnulusRecord {
                    n,
                    budget: budgets[n as usize - 1] * dyadic(2 * n),
                    used: balls.iter().map(|&i| removed[i].radius.powf(1.0 + alpha)).sum(),
                    max_radius: balls.iter().map(|&i| removed[i].radius).fold(0.0, f64::max),
                    balls,
                }
            })
            .collect();
        SwissCheese {
            square,
            base,
            alpha,
            budget,
            budgets,
            partial_sums,
            tail_bound: budget.tail_after(n_max),
            removed,
            annuli,
        }
    }

    /// Re-check every structural invariant by direct computation.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.removed.iter().enumerate() {
            if !(a.radius > 0.0) || !a.closed {
                return Err(Error::Format(format!("ball {i} must be closed with positive radius")));
            }
            if !self.square.contains_ball(a) {
                return Err(Error::Format(format!("ball {i} leaves the bounding square")));
            }
            if a.contains(&self.base) {
                return Err(Error::Format(format!("ball {i} contains the base point")));
            }
            for (j, b) in self.removed.iter().enumerate().skip(i + 1) {
                if a.intersects(b) {
                    return Err(Error::Format(format!("balls {i} and {j} intersect")));
                }
            }
        }
        for rec in &self.annuli {
            if rec.used > rec.budget * (1.0 + 1e-12) {
                return Err(Error::InfeasiblePacking {
                    annulus: rec.n,
                    reason: format!("Σ r^(1+α) = {:e} exceeds s_n/4^n = {:e}", rec.used, rec.budget),
                });
            }
            if rec.balls.is_empty() {
                return Err(Error::InfeasiblePacking {
                    annulus: rec.n,
                    reason: "annulus holds no removed ball".into(),
                });
            }
        }
        Ok(())
    }

    pub fn n_max(&self) -> u32 {
        self.budgets.len() as u32
    }

    /// Exact classification against the square, the closed balls and `{b}`.
    pub fn contains(&self, z: &Point2) -> Membership {
        if *z == self.base || !self.square.contains_open(z) {
            return Membership::Complement;
        }
        for ball in &self.removed {
            let d = ball.center.dist(z);
            if d == ball.radius {
                return Membership::OnBallBoundary;
            }
            if d < ball.radius {
                return Membership::Complement;
            }
        }
        Membership::InU
    }

    pub fn in_u(&self, z: &Point2) -> bool {
        self.contains(z) == Membership::InU
    }

    /// `dist(z, ℂ∖U)` for `z ∈ U`.
    pub fn dist_to_complement(&self, z: &Point2) -> Result<f64> {
        if !self.in_u(z) {
            return Err(Error::NotInDomain(z.to_complex()));
        }
        let balls = self
            .removed
            .iter()
            .map(|b| b.surface_distance(z))
            .fold(f64::INFINITY, f64::min);
        Ok(self.square.boundary_distance(z).min(balls).min(z.dist(&self.base)))
    }

    /// Unit direction `e^{iφ}` whose ray from `b` keeps the largest relative
    /// clearance `(dist(c, ray) − r)/|c − b|` from every removed ball.
    pub fn clear_ray_direction(&self) -> (f64, f64) {
        let steps = 7200;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..steps {
            let phi = std::f64::consts::TAU * k as f64 / steps as f64;
            let (u, v) = (phi.cos(), phi.sin());
            let clearance = self
                .removed
                .iter()
                .map(|ball| {
                    let dx = ball.center.x() - self.base.x();
                    let dy = ball.center.y() - self.base.y();
                    let along = dx * u + dy * v;
                    let dist = if along <= 0.0 {
                        dx.hypot(dy)
                    } else {
                        (dx * v - dy * u).abs()
                    };
                    (dist - ball.radius) / dx.hypot(dy)
                })
                .fold(f64::INFINITY, f64::min);
            if clearance > best.0 {
                best = (clearance, phi);
            }
        }
        (best.1, best.0)
    }

    pub fn to_document(&self) -> CheeseDocument {
        CheeseDocument {
            format: CHEESE_FORMAT.to_string(),
            version: CHEESE_VERSION,
            square: self.square,
            base: self.base.0,
            alpha: self.alpha,
            budget_rule: self.budget,
            budgets: self.budgets.clone(),
            balls: self
                .removed
                .iter()
                .map(|b| [b.center.x(), b.center.y(), b.radius])
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CheeseDocument = serde_json::from_str(text)?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: CheeseDocument) -> Result<Self> {
        if doc.format != CHEESE_FORMAT || doc.version != CHEESE_VERSION {
            return Err(Error::Format(format!(
                "expected {CHEESE_FORMAT} v{CHEESE_VERSION}, found {} v{}",
                doc.format, doc.version
            )));
        }
        let removed = doc
            .balls
            .iter()
            .map(|b| Ball::closed(Point2::new(b[0], b[1]), b[2]))
            .collect();
        let cheese = Self::assemble(doc.square, Point(doc.base), doc.alpha, doc.budget_rule, doc.budgets, removed);
        cheese.validate()?;
        Ok(cheese)
    }
}

pub const CHEESE_FORMAT: &str = "potkit.swiss-cheese";
pub const CHEESE_VERSION: u32 = 1;

/// Versioned JSON form; coordinates are stored as exact binary64 values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheeseDocument {
    pub format: String,
    pub version: u32,
    pub square: Square,
    pub base: [f64; 2],
    pub alpha: f64,
    pub budget_rule: BudgetRule,
    pub budgets: Vec<f64>,
    /// `[center_x, center_y, radius]` per removed ball.
    pub balls: Vec<[f64; 3]>,
}

/// Area of `𝔹(c1, r1) ∩ 𝔹(c2, r2)`.
pub fn disk_intersection_area(c1: Point2, r1: f64, c2: Point2, r2: f64) -> f64 {
    let d = c1.dist(&c2);
    if d >= r1 + r2 {
        return 0.0;
    }
    let (small, large) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    if d <= large - small {
        return std::f64::consts::PI * small * small;
    }
    let a1 = r1 * r1 * ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0).acos();
    let a2 = r2 * r2 * ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0).acos();
    let k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).max(0.0).sqrt();
    a1 + a2 - 0.5 * k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_cheese() -> SwissCheese {
        SwissCheese::generate(&CheeseParams {
            n_max: 10,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn budget_inequality_per_annulus() {
        let c = default_cheese();
        assert_eq!(c.removed.len(), 10);
        for (n, ball) in (1..=10u32).zip(&c.removed) {
            let lhs = ball.radius.powf(1.5);
            let rhs = 0.5f64.powi(n as i32) / 4f64.powi(n as i32);
            assert!(lhs <= rhs, "n={n}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let p = CheeseParams {
            balls_per_annulus: 3,
            seed: 17,
            ..Default::default()
        };
        let a = SwissCheese::generate(&p).unwrap();
        let b = SwissCheese::generate(&p).unwrap();
        assert_eq!(a.removed, b.removed);
        let c = SwissCheese::generate(&CheeseParams { seed: 18, ..p }).unwrap();
        assert_ne!(a.removed, c.removed);
    }

    #[test]
    fn zero_budget_is_infeasible() {
        let p = CheeseParams {
            budget: BudgetRule::Geometric {
                scale: 0.0,
                ratio: 0.5,
            },
            ..Default::default()
        };
        assert!(matches!(
            SwissCheese::generate(&p),
            Err(Error::InfeasiblePacking { annulus: 1, .. })
        ));
    }

    #[test]
    fn alpha_out_of_range() {
        let p = CheeseParams {
            alpha: 1.0,
            ..Default::default()
        };
        let err = SwissCheese::generate(&p).unwrap_err();
        assert!(err.to_string().contains("0<α<1"));
    }

    #[test]
    fn membership() {
        let c = default_cheese();
        assert_eq!(c.contains(&c.base), Membership::Complement);
        assert_eq!(c.contains(&c.removed[3].center), Membership::Complement);
        assert_eq!(c.contains(&Point2::new(0.6, 0.0)), Membership::Complement);
        let (phi, _) = c.clear_ray_direction();
        let z = Point2::new(0.01 * phi.cos(), 0.01 * phi.sin());
        assert_eq!(c.contains(&z), Membership::InU);
        let b = c.removed[0];
        let on = Point2::new(b.center.x() + b.radius, b.center.y());
        // may be off by rounding; only assert it is not in U
        assert_ne!(c.contains(&on), Membership::InU);
    }

    #[test]
    fn dist_to_complement_is_min_of_parts() {
        // b off-center so the three candidates differ
        let square = Square {
            center: [0.0, 0.0],
            half_width: 1.0,
        };
        let cheese = SwissCheese::assemble(
            square,
            Point2::new(0.0, 0.0),
            0.5,
            BudgetRule::default(),
            vec![],
            vec![Ball::closed(Point2::new(0.4, 0.0), 0.1)],
        );
        let z = Point2::new(0.2, 0.0);
        // ball surface at 0.1, b at 0.2, edge at 0.8
        assert!((cheese.dist_to_complement(&z).unwrap() - 0.1).abs() < 1e-15);
        assert!(cheese.dist_to_complement(&Point2::new(0.4, 0.0)).is_err());
    }

    #[test]
    fn empty_square_corner_approach_constant() {
        // b at a corner of the square; sample the boundary densely as oracle.
        let square = Square {
            center: [0.5, 0.5],
            half_width: 0.5,
        };
        let cheese = SwissCheese::assemble(square, Point2::new(0.0, 0.0), 0.5, BudgetRule::default(), vec![], vec![]);
        for m in 2..12 {
            let t = 2f64.powi(-m);
            let z = Point2::new(t, t);
            let d = cheese.dist_to_complement(&z).unwrap();
            let mut brute = f64::INFINITY;
            for k in 0..=4096 {
                let u = k as f64 / 4096.0;
                for q in [
                    Point2::new(u, 0.0),
                    Point2::new(0.0, u),
                    Point2::new(u, 1.0),
                    Point2::new(1.0, u),
                ] {
                    brute = brute.min(q.dist(&z));
                }
            }
            assert!((d - brute).abs() < 1e-12, "{d} vs {brute}");
            // diagonal approach: dist / |z − b| = 1/√2
            assert!((d / z.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let c = SwissCheese::generate(&CheeseParams {
            balls_per_annulus: 2,
            seed: 5,
            ..Default::default()
        })
        .unwrap();
        let back = SwissCheese::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn lens_area() {
        let a = disk_intersection_area(Point2::new(0.0, 0.0), 1.0, Point2::new(1.0, 0.0), 1.0);
        let exact = 2.0 * std::f64::consts::FRAC_PI_3 - 3f64.sqrt() / 2.0;
        assert!((a - exact).abs() < 1e-14);
    }
}
