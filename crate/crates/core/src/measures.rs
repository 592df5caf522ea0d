//! Atomic complex measures on `ℝ^d` and on `ℝ^d × ℝ^d`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Point2};

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<const D: usize> {
    pub atoms: Vec<(Point<D>, Complex64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductMeasure<const D: usize> {
    pub atoms: Vec<((Point<D>, Point<D>), Complex64)>,
}

impl<const D: usize> Default for DiscreteMeasure<D> {
    fn default() -> Self {
        DiscreteMeasure { atoms: Vec::new() }
    }
}

impl<const D: usize> Default for ProductMeasure<D> {
    fn default() -> Self {
        ProductMeasure { atoms: Vec::new() }
    }
}

fn key<const D: usize>(p: &Point<D>) -> [u64; D] {
    // +0.0 and -0.0 are the same location
    p.0.map(|v| (v + 0.0).to_bits())
}

impl<const D: usize> DiscreteMeasure<D> {
    pub fn new(atoms: Vec<(Point<D>, Complex64)>) -> Self {
        DiscreteMeasure { atoms }
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|(_, c)| c.norm()).sum()
    }

    pub fn total_mass(&self) -> Complex64 {
        self.atoms.iter().map(|(_, c)| c).sum()
    }

    /// Merge atoms at identical locations and drop zero weights.
    /// First-occurrence order is kept.
    pub fn normalize(&self) -> Self {
        let mut order: Vec<[u64; D]> = Vec::new();
        let mut merged: std::collections::HashMap<[u64; D], (Point<D>, Complex64)> =
            std::collections::HashMap::new();
        for (p, c) in &self.atoms {
            let k = key(p);
            merged
                .entry(k)
                .and_modify(|e| e.1 += c)
                .or_insert_with(|| {
                    order.push(k);
                    (*p, *c)
                });
        }
        let atoms = order
            .into_iter()
            .map(|k| merged[&k])
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        DiscreteMeasure { atoms }
    }

    pub fn abs(&self) -> Self {
        DiscreteMeasure {
            atoms: self.atoms.iter().map(|(p, c)| (*p, Complex64::new(c.norm(), 0.0))).collect(),
        }
    }

    pub fn mass_at(&self, x: &Point<D>) -> Complex64 {
        self.atoms.iter().filter(|(p, _)| p == x).map(|(_, c)| c).sum()
    }

    pub fn integrate<F: Fn(&Point<D>) -> Complex64>(&self, f: F) -> Complex64 {
        self.atoms.iter().map(|(p, c)| c * f(p)).sum()
    }
}

impl<const D: usize> ProductMeasure<D> {
    pub fn new(atoms: Vec<((Point<D>, Point<D>), Complex64)>) -> Self {
        ProductMeasure { atoms }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|(_, c)| c.norm()).sum()
    }

    pub fn normalize(&self) -> Self {
        let mut order = Vec::new();
        let mut merged = std::collections::HashMap::new();
        for ((z, w), c) in &self.atoms {
            let k = (key(z), key(w));
            merged
                .entry(k)
                .and_modify(|e: &mut ((Point<D>, Point<D>), Complex64)| e.1 += c)
                .or_insert_with(|| {
                    order.push(k);
                    ((*z, *w), *c)
                });
        }
        let atoms = order
            .into_iter()
            .map(|k| merged[&k])
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        ProductMeasure { atoms }
    }

    /// `R_♯μ` for `R(z, w) = (w, z)`.
    pub fn swap_pushforward(&self) -> Self {
        ProductMeasure {
            atoms: self.atoms.iter().map(|((z, w), c)| ((*w, *z), *c)).collect(),
        }
    }

    /// First-coordinate marginal, of `|μ|` when `use_total_variation` is set.
    pub fn marginal_first(&self, use_total_variation: bool) -> DiscreteMeasure<D> {
        DiscreteMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|((z, _), c)| (*z, if use_total_variation { Complex64::new(c.norm(), 0.0) } else { *c }))
                .collect(),
        }
        .normalize()
    }

    pub fn marginal_second(&self, use_total_variation: bool) -> DiscreteMeasure<D> {
        self.swap_pushforward().marginal_first(use_total_variation)
    }

    pub fn restrict<P: Fn(&Point<D>, &Point<D>) -> bool>(&self, region: P) -> Self {
        ProductMeasure {
            atoms: self.atoms.iter().filter(|((z, w), _)| region(z, w)).copied().collect(),
        }
    }

    pub fn abs(&self) -> Self {
        ProductMeasure {
            atoms: self.atoms.iter().map(|(zw, c)| (*zw, Complex64::new(c.norm(), 0.0))).collect(),
        }
    }

    /// Multiply each weight by `f(z, w)`.
    pub fn weighted<F: Fn(&Point<D>, &Point<D>) -> Complex64>(&self, f: F) -> Self {
        ProductMeasure {
            atoms: self.atoms.iter().map(|((z, w), c)| ((*z, *w), c * f(z, w))).collect(),
        }
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        self.weighted(|_, _| k)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        ProductMeasure { atoms }
    }

    /// Index of the first atom with `z = w`.
    pub fn diagonal_atom(&self) -> Option<usize> {
        self.atoms.iter().position(|((z, w), c)| z == w && c.norm() > 0.0)
    }

    pub fn has_diagonal_mass(&self) -> bool {
        self.diagonal_atom().is_some()
    }

    pub fn mass_on_vertical_slice(&self, b: &Point<D>) -> f64 {
        self.atoms.iter().filter(|((z, _), _)| z == b).map(|(_, c)| c.norm()).fold(0.0, |s, m| s + m)
    }

    pub fn mass_on_horizontal_slice(&self, b: &Point<D>) -> f64 {
        self.atoms.iter().filter(|((_, w), _)| w == b).map(|(_, c)| c.norm()).fold(0.0, |s, m| s + m)
    }

    pub fn mass_at_pair(&self, b: &Point<D>) -> f64 {
        self.atoms.iter().filter(|((z, w), _)| z == b && w == b).map(|(_, c)| c.norm()).fold(0.0, |s, m| s + m)
    }

    /// `μ′ = μ₁ − R_♯μ₂` with `μ₂` the part of `μ` on `{b} × X`. The result has
    /// no mass on that slice and defines the same functional.
    pub fn avoid_vertical_slice(&self, b: &Point<D>) -> Result<Self> {
        if let Some(index) = self.diagonal_atom() {
            return Err(Error::DiagonalMass { index });
        }
        let mu1 = self.restrict(|z, _| z != b);
        let mu2 = self.restrict(|z, _| z == b);
        Ok(mu1.concat(&mu2.swap_pushforward().scaled(Complex64::new(-1.0, 0.0))))
    }
}

/// One `[z_re, z_im, w_re, w_im, c_re, c_im]` row per atom.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasureRows(pub Vec<[f64; 6]>);

impl From<&ProductMeasure<2>> for MeasureRows {
    fn from(m: &ProductMeasure<2>) -> Self {
        MeasureRows(
            m.atoms
                .iter()
                .map(|((z, w), c)| [z.x(), z.y(), w.x(), w.y(), c.re, c.im])
                .collect(),
        )
    }
}

impl From<MeasureRows> for ProductMeasure<2> {
    fn from(r: MeasureRows) -> Self {
        ProductMeasure {
            atoms: r
                .0
                .into_iter()
                .map(|[a, b, c, d, e, f]| ((Point2::new(a, b), Point2::new(c, d)), Complex64::new(e, f)))
                .collect(),
        }
    }
}

impl ProductMeasure<2> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&MeasureRows::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rows: MeasureRows = serde_json::from_str(s)?;
        Ok(rows.into())
    }

    /// Build from complex coordinates.
    pub fn from_complex(atoms: impl IntoIterator<Item = (Complex64, Complex64, Complex64)>) -> Self {
        ProductMeasure {
            atoms: atoms
                .into_iter()
                .map(|(z, w, c)| ((Point2::from_complex(z), Point2::from_complex(w)), c))
                .collect(),
        }
    }

    /// Atoms as `(z, w, c)` complex triples.
    pub fn complex_atoms(&self) -> impl Iterator<Item = (Complex64, Complex64, Complex64)> + '_ {
        self.atoms.iter().map(|((z, w), c)| (z.to_complex(), w.to_complex(), *c))
    }
}
