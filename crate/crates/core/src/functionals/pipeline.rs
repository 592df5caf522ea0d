use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::functional::FunctionalHandle;
use crate::error::{Error, Result};

/// Values of the distributions built from `T₁ = L(μ)` at one point `a`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PipelineReport {
    pub a: Complex64,
    pub b: Complex64,
    /// `T̂₁(a) = H(μ)(a)`.
    pub t1_hat: Complex64,
    /// `T̂(a) = 1 − π(a − b)² T̂₁(a)`.
    pub t_hat: Complex64,
    /// `R_a(1)`; equals 1 when `T₁(z − b) = 1`.
    pub r_mass: Complex64,
    pub r_g: Complex64,
    pub g_at_a: Complex64,
    /// `(g·T₁)^(a)`.
    pub g_t1_hat: Complex64,
    /// `(R_a(g) − T₀(g))/(a − b) − T₁(g)`.
    pub d_definition: Complex64,
    /// `−π(a − b)(g·T₁)^(a) + π(a − b) T̂₁(a) R_a(g)`.
    pub d_closed_form: Complex64,
    /// `(a − b)(g·T₁)^(a) + π(a − b) g(a) T̂₁(a)`, the form with `R_a(g)` replaced by `g(a)`.
    pub d_with_point_value: Complex64,
    pub relative_agreement: f64,
}

/// Evaluate `T̂₁`, `T̂`, `R_a` and `D_a(g)` at `a`, with `D_a(g)` by two routes.
pub fn t_pipeline<G>(t1: &FunctionalHandle, b: Complex64, g: G, a: Complex64) -> Result<PipelineReport>
where
    G: Fn(Complex64) -> Result<Complex64> + Copy,
{
    if a == b || t1.mu.complex_atoms().any(|(z, w, _)| z == a || w == a) {
        return Err(Error::invalid("a", "a ∉ X: off the atoms and a ≠ b"));
    }
    let gb = g(b)?;
    if gb.norm() > 1e-12 * (1.0 + g(a)?.norm()) {
        return Err(Error::invalid("g", "g(b) = 0"));
    }
    let ab = a - b;
    let t1_hat = t1.cauchy_transform(a)?;
    let t_hat = 1.0 - PI * ab * ab * t1_hat;
    if t_hat.norm() <= 1e-14 * (1.0 + (PI * ab * ab * t1_hat).norm()) {
        return Err(Error::EvaluationUndefined(a));
    }
    // ⟨f, T⟩ = −π T₁((z − b)² f), R_a(f) = ⟨f/(a − z), T⟩ / (π T̂(a))
    let r_a = |f: &dyn Fn(Complex64) -> Result<Complex64>| -> Result<Complex64> {
        let v = t1.apply(|z| Ok((z - b) * (z - b) * f(z)? / (a - z)))?;
        Ok(-v / t_hat)
    };
    let r_mass = r_a(&|_| Ok(Complex64::new(1.0, 0.0)))?;
    let r_g = r_a(&g)?;
    let t0_g = t1.apply(|z| Ok((z - b) * g(z)?))?;
    let t1_g = t1.apply(g)?;
    let g_t1_hat = t1.product_cauchy_transform(g, a)?;
    let d_definition = (r_g - t0_g) / ab - t1_g;
    let d_closed_form = -PI * ab * g_t1_hat + PI * ab * t1_hat * r_g;
    let g_at_a = g(a)?;
    let d_with_point_value = ab * g_t1_hat + PI * ab * g_at_a * t1_hat;
    let scale = d_definition.norm().max(d_closed_form.norm()).max(1e-300);
    Ok(PipelineReport {
        a,
        b,
        t1_hat,
        t_hat,
        r_mass,
        r_g,
        g_at_a,
        g_t1_hat,
        d_definition,
        d_closed_form,
        d_with_point_value,
        relative_agreement: (d_definition - d_closed_form).norm() / scale,
    })
}
