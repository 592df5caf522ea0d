use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::functionals::{t_pipeline, FunctionalHandle, PipelineReport, RationalFunction};
use crate::measures::ProductMeasure;

/// Relative discrepancies of the functional identities for one random triple.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub index: usize,
    /// `L(R_♯μ)(f) + L(μ)(f)`.
    pub swap: f64,
    /// `L(μ′)(f) − L(μ)(f)` after moving mass off `{b} × X`.
    pub avoid_slice: f64,
    /// `⟨fg, L⟩ − L(ν)(f) − ∫ f dλ`.
    pub product: f64,
    /// Two routes to `D_a(g)`.
    pub pipeline: f64,
    pub mass_defect: f64,
    pub report: PipelineReport,
}

impl IdentityCheck {
    pub fn worst(&self) -> f64 {
        self.swap.max(self.avoid_slice).max(self.product).max(self.pipeline)
    }
}

fn rel(x: Complex64, y: Complex64) -> f64 {
    let scale = x.norm().max(y.norm());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).norm() / scale
    }
}

fn unit_point(rng: &mut ChaCha8Rng, b: Complex64) -> Complex64 {
    b + Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

fn random_rational(rng: &mut ChaCha8Rng, b: Complex64) -> RationalFunction {
    let mut poles = Vec::new();
    for _ in 0..3 {
        let w = b + Complex64::from_polar(1.0 + rng.random::<f64>(), rng.random::<f64>() * std::f64::consts::TAU);
        let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        poles.push((w, c));
    }
    let mut f = RationalFunction::from_poles(poles);
    f.poly_center = b;
    for k in 0..3 {
        f.poly[k] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    }
    f
}

/// Seeded `(μ, g, a)` triples: `μ` with atoms in the unit square around `b`
/// (one on `{b} × X`), normalized so that `L(μ)(z − b) = 1`; `g(b) = 0`;
/// `a` off the atoms.
pub fn identity_checks(count: usize, atoms: usize, alpha: f64, b: Complex64, seed: u64) -> Result<Vec<IdentityCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let mut list = Vec::with_capacity(atoms + 1);
        for j in 0..atoms.max(1) {
            let z = if j == 0 { b } else { unit_point(&mut rng, b) };
            let w = unit_point(&mut rng, b);
            let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            list.push((z, w, c));
        }
        let mu = ProductMeasure::from_complex(list);
        let t1 = FunctionalHandle::normalized_derivation(mu, alpha, b)?;
        let f = random_rational(&mut rng, b);
        let g = random_rational(&mut rng, b).vanishing_at(b)?;
        let a = unit_point(&mut rng, b);

        let lf = t1.apply_rational(&f)?;
        let swap = rel(t1.swapped().apply_rational(&f)?, -lf);
        let moved = FunctionalHandle::new(t1.mu.avoid_vertical_slice(&crate::geometry::Point2::from_complex(b))?, alpha)?;
        let avoid_slice = rel(moved.apply_rational(&f)?, lf);
        let split = t1.product_decompose(|z| g.eval(z))?;
        let nu = FunctionalHandle::new(split.nu.clone(), alpha)?;
        let lhs = t1.apply(|z| Ok(f.eval(z)? * g.eval(z)?))?;
        let mut rhs = nu.apply_rational(&f)?;
        for (p, c) in &split.lambda.atoms {
            rhs += c * f.eval(p.to_complex())?;
        }
        let product = rel(lhs, rhs);
        let report = t_pipeline(&t1, b, |z| g.eval(z), a)?;
        out.push(IdentityCheck {
            index,
            swap,
            avoid_slice,
            product,
            pipeline: report.relative_agreement,
            mass_defect: (report.r_mass - 1.0).norm(),
            report,
        });
    }
    Ok(out)
}
