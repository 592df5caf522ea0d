use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `Σ c_k / (z − w_k) + p₀ + p₁(z − z₀) + p₂(z − z₀)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    /// `(w_k, c_k)` pairs.
    pub poles: Vec<(Complex64, Complex64)>,
    pub poly: [Complex64; 3],
    pub poly_center: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivationValue {
    pub value: Complex64,
    /// Bound on the contribution of the omitted tail.
    pub tail_bound: f64,
}

/// Geometry used by [`RationalFunction::lip_seminorm_probe`]'s analytic bound.
#[derive(Clone, Debug)]
pub struct LipDomain {
    pub diam: f64,
    /// `max |z − z₀|` over the domain.
    pub reach: f64,
    /// `dist(w_k, U)` for each pole, same order as `poles`.
    pub clearances: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LipProbe {
    /// Largest sampled `|f(z) − f(w)| / |z − w|^α`.
    pub lower: f64,
    /// `Σ|c_k|·min(2/r_k^{1+α}, diam^{1−α}/r_k²) + (|p₁| + 2·reach·|p₂|)·diam^{1−α}`.
    pub upper: f64,
    pub pairs: usize,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction {
            poles: Vec::new(),
            poly: [ZERO; 3],
            poly_center: ZERO,
        }
    }

    pub fn from_poles(poles: Vec<(Complex64, Complex64)>) -> Self {
        RationalFunction { poles, ..Self::zero() }
    }

    /// `p₀ + p₁(z − z₀) + p₂(z − z₀)²`.
    pub fn polynomial(center: Complex64, coeffs: [Complex64; 3]) -> Self {
        RationalFunction {
            poles: Vec::new(),
            poly: coeffs,
            poly_center: center,
        }
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        RationalFunction {
            poles: self.poles.iter().map(|(w, c)| (*w, c * k)).collect(),
            poly: self.poly.map(|p| p * k),
            poly_center: self.poly_center,
        }
    }

    /// Same function minus its value at `b`, so that it vanishes there.
    pub fn vanishing_at(&self, b: Complex64) -> Result<Self> {
        let v = self.eval(b)?;
        let mut out = self.clone();
        out.poly[0] -= v;
        Ok(out)
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if self.poles.iter().any(|(w, _)| *w == z) {
            return Err(Error::PoleHit(z));
        }
        Ok(())
    }

    fn poly_eval(&self, z: Complex64) -> Complex64 {
        let u = z - self.poly_center;
        self.poly[0] + u * (self.poly[1] + u * self.poly[2])
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        let poles: Complex64 = self.poles.iter().map(|(w, c)| c / (z - w)).sum();
        Ok(poles + self.poly_eval(z))
    }

    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        let poles: Complex64 = self.poles.iter().map(|(w, c)| -c / ((z - w) * (z - w))).sum();
        Ok(poles + self.poly[1] + 2.0 * self.poly[2] * (z - self.poly_center))
    }

    /// `(f(z) − f(b))/(z − b)`, summed term by term in cancellation-free form.
    pub fn difference_quotient(&self, z: Complex64, b: Complex64) -> Result<Complex64> {
        if z == b {
            return Err(Error::invalid("z", "z ≠ b"));
        }
        self.check(z)?;
        self.check(b)?;
        let poles: Complex64 = self.poles.iter().map(|(w, c)| -c / ((z - w) * (b - w))).sum();
        let poly = self.poly[1] + self.poly[2] * ((z - self.poly_center) + (b - self.poly_center));
        Ok(poles + poly)
    }

    /// `f′(b)` with a caller-supplied bound on the omitted tail of the series.
    pub fn derivation_value(&self, b: Complex64, tail_bound: f64) -> Result<DerivationValue> {
        if !tail_bound.is_finite() || tail_bound < 0.0 {
            return Err(Error::DivergentTail);
        }
        Ok(DerivationValue {
            value: self.eval_derivative(b)?,
            tail_bound,
        })
    }

    /// Sampled lower bound and analytic upper bound for `‖f‖′`.
    pub fn lip_seminorm_probe(&self, pairs: &[(Complex64, Complex64)], alpha: f64, domain: &LipDomain) -> Result<LipProbe> {
        let mut lower: f64 = 0.0;
        for &(z, w) in pairs {
            if z == w {
                continue;
            }
            let r = (self.eval(z)? - self.eval(w)?).norm() / (z - w).norm().powf(alpha);
            lower = lower.max(r);
        }
        if domain.clearances.len() != self.poles.len() {
            return Err(Error::invalid("clearances", "one clearance per pole"));
        }
        let spread = domain.diam.powf(1.0 - alpha);
        let mut upper = 0.0;
        for ((_, c), r) in self.poles.iter().zip(&domain.clearances) {
            if !(*r > 0.0) {
                return Err(Error::invalid("clearances", "poles outside the closure of U"));
            }
            upper += c.norm() * (2.0 / r.powf(1.0 + alpha)).min(spread / (r * r));
        }
        upper += (self.poly[1].norm() + 2.0 * domain.reach * self.poly[2].norm()) * spread;
        Ok(LipProbe {
            lower,
            upper,
            pairs: pairs.len(),
        })
    }

    /// Upper bound for `sup |f|` on the domain.
    pub fn sup_bound(&self, domain: &LipDomain) -> f64 {
        let poles: f64 = self.poles.iter().zip(&domain.clearances).map(|((_, c), r)| c.norm() / r).sum();
        poles + self.poly[0].norm() + self.poly[1].norm() * domain.reach + self.poly[2].norm() * domain.reach * domain.reach
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_pole_values() {
        let f = RationalFunction::from_poles(vec![(c(1.0, 0.0), c(1.0, 0.0))]);
        assert_eq!(f.eval(c(0.0, 0.0)).unwrap(), c(-1.0, 0.0));
        assert_eq!(f.eval_derivative(c(0.0, 0.0)).unwrap(), c(-1.0, 0.0));
        assert!(matches!(f.eval(c(1.0, 0.0)), Err(Error::PoleHit(_))));
        assert_eq!(RationalFunction::zero().eval(c(0.3, 0.1)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn quotient_of_identity_is_one() {
        let b = c(0.2, -0.1);
        let f = RationalFunction::polynomial(b, [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        for z in [c(1.0, 2.0), c(-0.3, 0.0), c(1e-9, 1e-9)] {
            assert_eq!(f.difference_quotient(z, b).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn identity_probe_on_unit_square() {
        let f = RationalFunction::polynomial(c(0.0, 0.0), [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let pairs = [(c(0.0, 0.0), c(1.0, 1.0)), (c(0.0, 0.0), c(0.5, 0.0))];
        let dom = LipDomain { diam: 2f64.sqrt(), reach: 2f64.sqrt(), clearances: vec![] };
        let p = f.lip_seminorm_probe(&pairs, 0.5, &dom).unwrap();
        assert!((p.lower - 2f64.powf(0.25)).abs() < 1e-15);
        assert!(p.lower <= p.upper + 1e-15);
    }

    #[test]
    fn divergent_tail_is_an_error() {
        let f = RationalFunction::from_poles(vec![(c(1.0, 0.0), c(1.0, 0.0))]);
        assert!(matches!(f.derivation_value(c(0.0, 0.0), f64::INFINITY), Err(Error::DivergentTail)));
    }
}
