//! Riesz, double-layer and refined potentials, the Cauchy-transform kernels
//! `H` and `H̃`, and grid classification of exceptional sets.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    annulus_index, partial_area_density_profile, DyadicDensityProfile, Point, Point2, Sampler,
};
use crate::measures::{DiscreteMeasure, ProductMeasure};

/// `Σ |c_i| / |x_i − a|^s`, `+∞` when `a` is an atom.
pub fn riesz_potential<const D: usize>(mu: &DiscreteMeasure<D>, s: f64, a: &Point<D>) -> f64 {
    let mut total = 0.0;
    for (x, c) in &mu.atoms {
        let m = c.norm();
        if m == 0.0 {
            continue;
        }
        let r = x.dist(a);
        if r == 0.0 {
            return f64::INFINITY;
        }
        total += m / r.powf(s);
    }
    total
}

/// `Σ |c| |x − y|^u / (|x − a|^s |y − a|^t)`; `u = 0` is the double layer.
pub fn weighted_potential<const D: usize>(
    mu: &ProductMeasure<D>,
    s: f64,
    t: f64,
    u: f64,
    a: &Point<D>,
) -> f64 {
    let mut total = 0.0;
    for ((x, y), c) in &mu.atoms {
        let m = c.norm();
        if m == 0.0 {
            continue;
        }
        let rx = x.dist(a);
        let ry = y.dist(a);
        if rx == 0.0 || ry == 0.0 {
            return f64::INFINITY;
        }
        let num = if u == 0.0 { 1.0 } else { x.dist(y).powf(u) };
        total += m * num / (rx.powf(s) * ry.powf(t));
    }
    total
}

/// `H̃(μ)(a) = ∫ |z − w|^{1−α} / (|z − a||w − a|) d|μ|`.
pub fn h_tilde(mu: &ProductMeasure<2>, alpha: f64, a: &Point2) -> f64 {
    weighted_potential(mu, 1.0, 1.0, 1.0 - alpha, a)
}

/// `H(μ)(a) = (1/π) ∫ (z − w) / ((z − a)(w − a)|z − w|^α) dμ`.
pub fn h_kernel(mu: &ProductMeasure<2>, alpha: f64, a: &Point2) -> Result<Complex64> {
    let ac = a.to_complex();
    let mut total = Complex64::new(0.0, 0.0);
    for (index, ((z, w), c)) in mu.atoms.iter().enumerate() {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (z, w) = (z.to_complex(), w.to_complex());
        if z == ac || w == ac {
            return Err(Error::AtomCollision { index });
        }
        if z == w {
            return Err(Error::DiagonalMass { index });
        }
        let d = z - w;
        total += c * d / ((z - ac) * (w - ac) * d.norm().powf(alpha));
    }
    Ok(total / PI)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialKind {
    Single { s: f64 },
    Double { s: f64, t: f64 },
    Refined { s: f64, t: f64, u: f64 },
    HTilde { alpha: f64 },
    HKernel { alpha: f64 },
}

/// Which side of the threshold is called `E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// `E = {a : |a − b|^e · P(a) ≥ ε}`.
    Bad,
    /// `E = {a : |a − b|^e · P(a) < δ}`.
    Good,
}

impl PotentialKind {
    /// Power of `|a − b|` that makes the product dilation-invariant.
    pub fn exponent(&self) -> f64 {
        match *self {
            PotentialKind::Single { s } => s,
            PotentialKind::Double { s, t } => s + t,
            PotentialKind::Refined { s, t, u } => s + t - u,
            PotentialKind::HTilde { alpha } | PotentialKind::HKernel { alpha } => 1.0 + alpha,
        }
    }

    pub fn polarity(&self) -> Polarity {
        match self {
            PotentialKind::HTilde { .. } | PotentialKind::HKernel { .. } => Polarity::Good,
            _ => Polarity::Bad,
        }
    }

    pub fn is_product(&self) -> bool {
        !matches!(self, PotentialKind::Single { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    pub d: usize,
    pub base: [f64; 2],
    pub threshold: f64,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, base: Point2, threshold: f64) -> Self {
        PotentialSpec {
            kind,
            d: 2,
            base: base.0,
            threshold,
        }
    }

    pub fn base(&self) -> Point2 {
        Point(self.base)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d as f64;
        if self.d == 0 {
            return Err(Error::invalid("d", "d ≥ 1"));
        }
        if !(self.threshold > 0.0) || !self.threshold.is_finite() {
            return Err(Error::invalid("threshold", "threshold ε > 0"));
        }
        match self.kind {
            PotentialKind::Single { s } => {
                if !(s > 0.0 && s < d) {
                    return Err(Error::invalid("s", "single kind requires 0 < s < d"));
                }
            }
            PotentialKind::Double { s, t } => {
                if !(s > 0.0) {
                    return Err(Error::invalid("s", "double kind requires s > 0"));
                }
                if !(t > 0.0) {
                    return Err(Error::invalid("t", "double kind requires t > 0"));
                }
                if !(s + t < d) {
                    return Err(Error::invalid("s+t", "double kind requires s + t < d"));
                }
            }
            PotentialKind::Refined { s, t, u } => {
                if !(s > 0.0) {
                    return Err(Error::invalid("s", "refined kind requires s > 0"));
                }
                if !(t > 0.0) {
                    return Err(Error::invalid("t", "refined kind requires t > 0"));
                }
                if !(u > 0.0 && u <= 1f64.min(s).min(t)) {
                    return Err(Error::invalid("u", "refined kind requires u ≤ min{1,s,t}"));
                }
                if !(s + t - u < d) {
                    return Err(Error::invalid("s+t-u", "refined kind requires s + t − u < d"));
                }
            }
            PotentialKind::HTilde { alpha } | PotentialKind::HKernel { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::invalid("alpha", "0<α<1"));
                }
                if self.d != 2 {
                    return Err(Error::invalid("d", "h kinds require d = 2"));
                }
            }
        }
        Ok(())
    }
}

/// Measure fed to a potential: on the plane (single kind) or on its square.
#[derive(Clone, Debug)]
pub enum PotentialSource {
    Plane(DiscreteMeasure<2>),
    Product(ProductMeasure<2>),
}

impl PotentialSource {
    fn coordinates(&self) -> Vec<Point2> {
        match self {
            PotentialSource::Plane(m) => m.atoms.iter().map(|(p, _)| *p).collect(),
            PotentialSource::Product(m) => {
                m.atoms.iter().flat_map(|((z, w), _)| [*z, *w]).collect()
            }
        }
    }
}

/// `|a − b|^e · P(a)`, or `None` at an atom coordinate (undefined there).
pub fn normalized_potential(spec: &PotentialSpec, source: &PotentialSource, a: &Point2) -> Result<Option<f64>> {
    let b = spec.base();
    let scale = a.dist(&b).powf(spec.kind.exponent());
    let value = match (spec.kind, source) {
        (PotentialKind::Single { s }, PotentialSource::Plane(m)) => riesz_potential(m, s, a),
        (PotentialKind::Double { s, t }, PotentialSource::Product(m)) => weighted_potential(m, s, t, 0.0, a),
        (PotentialKind::Refined { s, t, u }, PotentialSource::Product(m)) => weighted_potential(m, s, t, u, a),
        (PotentialKind::HTilde { alpha }, PotentialSource::Product(m)) => h_tilde(m, alpha, a),
        (PotentialKind::HKernel { alpha }, PotentialSource::Product(m)) => match h_kernel(m, alpha, a) {
            Ok(v) => v.norm(),
            Err(Error::AtomCollision { .. }) => return Ok(None),
            Err(e) => return Err(e),
        },
        _ => {
            return Err(Error::invalid(
                "measure",
                "single kind takes a plane measure, other kinds a product measure",
            ))
        }
    };
    if value.is_infinite() {
        return Ok(None);
    }
    Ok(Some(scale * value))
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub satisfied: bool,
    pub detail: String,
}

/// Mass hypotheses required by the potential kind, checked on the given measure.
pub fn hypothesis_checks(spec: &PotentialSpec, source: &PotentialSource) -> Vec<HypothesisCheck> {
    let b = spec.base();
    let mut out = Vec::new();
    match (spec.kind, source) {
        (PotentialKind::Single { .. }, PotentialSource::Plane(m)) => {
            let at_b = m.mass_at(&b).norm();
            let on_b: f64 = m.atoms.iter().filter(|(p, _)| *p == b).map(|(_, c)| c.norm()).sum();
            out.push(HypothesisCheck {
                name: "no mass at b",
                satisfied: on_b == 0.0,
                detail: format!("|μ|({{b}}) = {on_b}, μ({{b}}) = {at_b}"),
            });
        }
        (kind, PotentialSource::Product(m)) => {
            let pair = m.mass_at_pair(&b);
            let strict_slices = match kind {
                PotentialKind::Double { .. } => true,
                PotentialKind::Refined { s, t, u } => u < 1f64.min(s).min(t),
                _ => false,
            };
            if strict_slices {
                let v = m.mass_on_vertical_slice(&b);
                let h = m.mass_on_horizontal_slice(&b);
                out.push(HypothesisCheck {
                    name: "no mass on slices through b",
                    satisfied: v == 0.0 && h == 0.0,
                    detail: format!("|μ|({{b}}×X) = {v}, |μ|(X×{{b}}) = {h}"),
                });
            }
            out.push(HypothesisCheck {
                name: "no mass at (b,b)",
                satisfied: pair == 0.0,
                detail: format!("|μ|({{(b,b)}}) = {pair}"),
            });
            if matches!(kind, PotentialKind::HTilde { .. } | PotentialKind::HKernel { .. }) {
                let diag = m.diagonal_atom();
                out.push(HypothesisCheck {
                    name: "no mass on the diagonal",
                    satisfied: diag.is_none(),
                    detail: match diag {
                        Some(i) => format!("atom {i} has z = w"),
                        None => "none".into(),
                    },
                });
            }
        }
        _ => out.push(HypothesisCheck {
            name: "measure matches kind",
            satisfied: false,
            detail: "single kind takes a plane measure, other kinds a product measure".into(),
        }),
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    InE,
    NotInE,
    Undefined,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassifiedPoint {
    pub a: [f64; 2],
    pub shell: u32,
    pub value: f64,
    pub class: PointClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalSetReport {
    pub spec: PotentialSpec,
    pub polarity: Polarity,
    pub sampler: Sampler,
    pub shells: (u32, u32),
    pub hypotheses: Vec<HypothesisCheck>,
    #[serde(skip)]
    pub points: Vec<ClassifiedPoint>,
    pub undefined_points: usize,
    pub profile: DyadicDensityProfile,
}

impl ExceptionalSetReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.satisfied)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["a_re", "a_im", "shell", "value", "in_E"])?;
        for p in &self.points {
            out.write_record([
                format!("{}", p.a[0]),
                format!("{}", p.a[1]),
                p.shell.to_string(),
                format!("{}", p.value),
                match p.class {
                    PointClass::InE => "1".into(),
                    PointClass::NotInE => "0".into(),
                    PointClass::Undefined => "undefined".into(),
                },
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn classify(polarity: Polarity, v: f64, threshold: f64) -> bool {
    match polarity {
        Polarity::Bad => v >= threshold,
        Polarity::Good => v < threshold,
    }
}

/// Classify sample points of the disks `𝔹(b, 2^{-n})`, `n ∈ shells`, and measure
/// the area density of `E` in each.
pub fn classify_exceptional_set(
    spec: &PotentialSpec,
    source: &PotentialSource,
    shells: std::ops::RangeInclusive<u32>,
    sampler: Sampler,
) -> Result<ExceptionalSetReport> {
    spec.validate()?;
    let b = spec.base();
    let polarity = spec.kind.polarity();
    let coords = source.coordinates();
    let eval = |a: &Point2| -> Option<f64> {
        if coords.iter().any(|c| c == a) {
            return None;
        }
        normalized_potential(spec, source, a).ok().flatten()
    };
    // surface a kind/measure mismatch before sampling
    normalized_potential(spec, source, &Point2::new(b.x() + 0.5, b.y() + 0.25))?;
    let profile = partial_area_density_profile(
        |a| eval(a).map(|v| classify(polarity, v, spec.threshold)),
        b,
        shells.clone(),
        sampler,
    )?;
    let points: Vec<ClassifiedPoint> = shells
        .clone()
        .flat_map(|n| {
            let pts = sampler.points(b, crate::geometry::dyadic(n), n as u64);
            pts.into_par_iter()
                .filter(|a| annulus_index(a, &b).ok().flatten() == Some(n) || n == 0)
                .map(|a| {
                    let v = eval(&a);
                    ClassifiedPoint {
                        a: a.0,
                        shell: n,
                        value: v.unwrap_or(f64::NAN),
                        class: match v {
                            None => PointClass::Undefined,
                            Some(v) if classify(polarity, v, spec.threshold) => PointClass::InE,
                            Some(_) => PointClass::NotInE,
                        },
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let undefined_points = points.iter().filter(|p| p.class == PointClass::Undefined).count();
    Ok(ExceptionalSetReport {
        spec: *spec,
        polarity,
        sampler,
        shells: (*shells.start(), *shells.end()),
        hypotheses: hypothesis_checks(spec, source),
        points,
        undefined_points,
        profile,
    })
}
