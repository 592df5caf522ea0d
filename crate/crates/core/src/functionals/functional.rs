use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::measures::{DiscreteMeasure, ProductMeasure};
use crate::potentials::h_kernel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// Normalized so that `L(μ)(z − b) = 1`.
    T1,
    Generic,
}

/// `L(μ)(f) = ∫ (f(z) − f(w))/|z − w|^α dμ(z, w)` for an atomic `μ`.
#[derive(Clone, Debug)]
pub struct FunctionalHandle {
    pub mu: ProductMeasure<2>,
    pub alpha: f64,
    pub role: Role,
}

/// `∫ f dλ` plus `L(ν)`: the two parts of `g·L(μ)`.
#[derive(Clone, Debug)]
pub struct ProductDecomposition {
    pub nu: ProductMeasure<2>,
    pub lambda: DiscreteMeasure<2>,
    /// `max |g(z) − g(w)|/|z − w|^α` over the atoms.
    pub max_ratio: f64,
}

impl FunctionalHandle {
    pub fn new(mu: ProductMeasure<2>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("alpha", "0<α<1"));
        }
        if let Some(index) = mu.diagonal_atom() {
            return Err(Error::DiagonalMass { index });
        }
        Ok(FunctionalHandle {
            mu,
            alpha,
            role: Role::Generic,
        })
    }

    /// Rescale so that `L(μ)(z − b) = 1`.
    pub fn normalized_derivation(mu: ProductMeasure<2>, alpha: f64, b: Complex64) -> Result<Self> {
        let h = Self::new(mu, alpha)?;
        let m = h.apply(|z| Ok(z - b))?;
        if m.norm() < 1e-300 || !m.is_finite() {
            return Err(Error::DegenerateNormalization);
        }
        Ok(FunctionalHandle {
            mu: h.mu.scaled(m.inv()),
            alpha,
            role: Role::T1,
        })
    }

    /// `‖L(μ)‖ ≤ ‖μ‖`.
    pub fn norm_bound(&self) -> f64 {
        self.mu.total_variation()
    }

    pub fn apply<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let mut total = Complex64::new(0.0, 0.0);
        for (index, (z, w, c)) in self.mu.complex_atoms().enumerate() {
            if z == w {
                return Err(Error::DiagonalMass { index });
            }
            total += c * (f(z)? - f(w)?) / (z - w).norm().powf(self.alpha);
        }
        Ok(total)
    }

    pub fn apply_rational(&self, f: &super::RationalFunction) -> Result<Complex64> {
        self.apply(|z| f.eval(z))
    }

    /// `ν = g(w)·μ` and `λ` the first marginal of `((g(z) − g(w))/|z − w|^α)·μ`,
    /// so that `⟨fg, L(μ)⟩ = L(ν)(f) + ∫ f dλ`.
    pub fn product_decompose<G>(&self, g: G) -> Result<ProductDecomposition>
    where
        G: Fn(Complex64) -> Result<Complex64>,
    {
        let mut nu = Vec::with_capacity(self.mu.len());
        let mut lambda = Vec::with_capacity(self.mu.len());
        let mut max_ratio: f64 = 0.0;
        for (z, w, c) in self.mu.complex_atoms() {
            let (gz, gw) = (g(z)?, g(w)?);
            let ratio = (gz - gw) / (z - w).norm().powf(self.alpha);
            max_ratio = max_ratio.max(ratio.norm());
            nu.push((z, w, c * gw));
            lambda.push((Point2::from_complex(z), c * ratio));
        }
        Ok(ProductDecomposition {
            nu: ProductMeasure::from_complex(nu),
            lambda: DiscreteMeasure::new(lambda),
            max_ratio,
        })
    }

    /// `T̂₁(a) = H(μ)(a)`.
    pub fn cauchy_transform(&self, a: Complex64) -> Result<Complex64> {
        h_kernel(&self.mu, self.alpha, &Point2::from_complex(a))
    }

    /// `(g·L)^(a) = ⟨g/(π(a − z)), L⟩` for `a` off the atoms.
    pub fn product_cauchy_transform<G>(&self, g: G, a: Complex64) -> Result<Complex64>
    where
        G: Fn(Complex64) -> Result<Complex64>,
    {
        self.apply(|z| {
            if z == a {
                return Err(Error::invalid("a", "a off the atoms"));
            }
            Ok(g(z)? / (PI * (a - z)))
        })
    }

    pub fn swapped(&self) -> Self {
        FunctionalHandle {
            mu: self.mu.swap_pushforward(),
            alpha: self.alpha,
            role: Role::Generic,
        }
    }
}

/// `λ̂(a) = ∫ dλ(z)/(π(a − z))`.
pub fn measure_cauchy_transform(lambda: &DiscreteMeasure<2>, a: Complex64) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (p, c) in &lambda.atoms {
        let z = p.to_complex();
        if z == a {
            return Err(Error::invalid("a", "a off the atoms"));
        }
        total += c / (a - z);
    }
    Ok(total / PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_atom_and_constants() {
        let (z0, w0) = (c(0.3, 0.1), c(-0.2, 0.4));
        let h = FunctionalHandle::new(ProductMeasure::from_complex([(z0, w0, c(1.0, 0.0))]), 0.5).unwrap();
        let f = |z: Complex64| Ok(z * z);
        let expect = (z0 * z0 - w0 * w0) / (z0 - w0).norm().sqrt();
        assert_eq!(h.apply(f).unwrap(), expect);
        assert_eq!(h.apply(|_| Ok(c(2.0, -1.0))).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn constant_g_split() {
        let mu = ProductMeasure::from_complex([(c(0.3, 0.1), c(-0.2, 0.4), c(1.0, 2.0))]);
        let h = FunctionalHandle::new(mu.clone(), 0.5).unwrap();
        let d = h.product_decompose(|_| Ok(c(1.0, 0.0))).unwrap();
        assert_eq!(d.nu, mu);
        assert!(d.lambda.atoms.iter().all(|(_, w)| *w == c(0.0, 0.0)));
        let d = h.product_decompose(|_| Ok(c(0.0, 3.0))).unwrap();
        assert_eq!(d.nu, mu.scaled(c(0.0, 3.0)));
    }

    #[test]
    fn diagonal_rejected() {
        let mu = ProductMeasure::from_complex([(c(0.3, 0.1), c(0.3, 0.1), c(1.0, 0.0))]);
        assert!(matches!(FunctionalHandle::new(mu, 0.5), Err(Error::DiagonalMass { index: 0 })));
    }

    #[test]
    fn normalization() {
        let b = c(0.0, 0.0);
        let mu = ProductMeasure::from_complex([(c(0.5, 0.0), b, c(3.0, 0.0))]);
        let h = FunctionalHandle::normalized_derivation(mu, 0.5, b).unwrap();
        assert!((h.apply(|z| Ok(z - b)).unwrap() - 1.0).norm() < 1e-15);
        let zero = ProductMeasure::from_complex([(c(0.5, 0.0), b, c(0.0, 0.0))]);
        assert!(matches!(
            FunctionalHandle::normalized_derivation(zero, 0.5, b),
            Err(Error::DegenerateNormalization)
        ));
    }
}
