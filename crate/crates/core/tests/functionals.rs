use num_complex::Complex64;
use proptest::prelude::*;

use potkit::experiments::{CheeseConfig, ExperimentConfig, Scenario};
use potkit::functionals::{
    cheese_function, measure_cauchy_transform, surrogate_derivation_measure, t_pipeline, unit_probes, FunctionalHandle, GoodSet, LipDomain,
    RationalFunction,
};
use potkit::geometry::{Point2, SwissCheese};
use potkit::measures::{MeasureRows, ProductMeasure};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rows() -> impl Strategy<Value = Vec<[f64; 6]>> {
    prop::collection::vec(
        (-0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_map(|(a, b, c, d, e, f)| [a, b, c, d, e, f]),
        1..8,
    )
    .prop_filter("off the diagonal", |rows| rows.iter().all(|r| (r[0] - r[2]).hypot(r[1] - r[3]) > 1e-2))
}

fn pole_fn() -> RationalFunction {
    RationalFunction::from_poles(vec![(c(1.5, 0.5), c(1.0, -0.5)), (c(-1.2, -1.1), c(0.3, 0.2))])
}

fn default_cheese() -> SwissCheese {
    let cfg = ExperimentConfig::defaults(Scenario::DqTheorem);
    SwissCheese::generate(&CheeseConfig::default().params(cfg.seed()).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn product_rule_reassembles(rows in rows(), alpha in 0.1..0.9f64) {
        let h = FunctionalHandle::new(MeasureRows(rows).into(), alpha).unwrap();
        let f = pole_fn();
        let g = RationalFunction::polynomial(c(0.1, 0.0), [c(0.2, 0.1), c(1.0, 0.0), c(0.0, 0.5)]);
        let lhs = h.apply(|z| Ok(f.eval(z)? * g.eval(z)?)).unwrap();
        let d = h.product_decompose(|z| g.eval(z)).unwrap();
        let nu = FunctionalHandle::new(d.nu, alpha).unwrap().apply_rational(&f).unwrap();
        let lam = d.lambda.integrate(|p| f.eval(p.to_complex()).unwrap());
        prop_assert!((lhs - nu - lam).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn functional_is_bounded_by_the_norm(rows in rows(), alpha in 0.1..0.9f64) {
        let h = FunctionalHandle::new(MeasureRows(rows).into(), alpha).unwrap();
        let f = pole_fn();
        let domain = LipDomain { diam: 2f64.sqrt(), reach: 1.0, clearances: vec![0.9, 0.6] };
        let pairs: Vec<(Complex64, Complex64)> = h.mu.complex_atoms().map(|(z, w, _)| (z, w)).collect();
        let probe = f.lip_seminorm_probe(&pairs, alpha, &domain).unwrap();
        prop_assert!(probe.lower <= probe.upper);
        prop_assert!(h.apply_rational(&f).unwrap().norm() <= h.norm_bound() * probe.upper * (1.0 + 1e-12));
    }

    #[test]
    fn monomial_difference_quotient(zr in -1.0..1.0f64, zi in -1.0..1.0f64, br in -1.0..1.0f64, bi in -1.0..1.0f64) {
        let (z, b, z0) = (c(zr, zi), c(br, bi), c(0.3, -0.2));
        prop_assume!((z - b).norm() > 1e-6);
        let f = RationalFunction::polynomial(z0, [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let dq = f.difference_quotient(z, b).unwrap();
        prop_assert!((dq - ((z - z0) + (b - z0))).norm() <= 1e-13);
    }

    #[test]
    fn swap_changes_the_sign_of_h(rows in rows(), ar in 0.6..1.0f64) {
        let h = FunctionalHandle::new(MeasureRows(rows).into(), 0.5).unwrap();
        let a = c(ar, 0.7);
        let t = h.cauchy_transform(a).unwrap();
        prop_assert!((t + h.swapped().cauchy_transform(a).unwrap()).norm() <= 1e-12 * t.norm().max(1e-300));
    }
}

#[test]
fn pipeline_two_routes_agree() {
    let mu: ProductMeasure<2> = MeasureRows(vec![
        [0.1, 0.2, -0.3, 0.1, 1.0, 0.0],
        [0.0, -0.2, 0.25, 0.3, 0.4, -0.6],
        [-0.15, -0.1, 0.2, -0.35, 0.0, 0.8],
    ])
    .into();
    let b = c(0.05, 0.05);
    let t1 = FunctionalHandle::normalized_derivation(mu, 0.5, b).unwrap();
    assert!((t1.apply(|z| Ok(z - b)).unwrap() - 1.0).norm() < 1e-14);
    let g = pole_fn().vanishing_at(b).unwrap();
    let a = c(0.6, -0.45);
    let r = t_pipeline(&t1, b, |z| g.eval(z), a).unwrap();
    assert!((r.r_mass - 1.0).norm() < 1e-13);
    assert!((r.d_definition - r.d_closed_form).norm() <= 1e-12 * r.d_definition.norm().max(1.0));
    assert_eq!(r.t1_hat, t1.cauchy_transform(a).unwrap());
    // T̂(a) = ⟨1/(π(a − z)), T⟩ with ⟨f, T⟩ = −π T₁((z − b)² f)
    let direct = -t1.apply(|z| Ok((z - b) * (z - b) / (a - z))).unwrap();
    assert!((r.t_hat - direct).norm() < 1e-12 * direct.norm().max(1.0));
    // λ̂ from the decomposition matches the product transform minus L(ν) of the kernel
    let d = t1.product_decompose(|z| g.eval(z)).unwrap();
    let lam = measure_cauchy_transform(&d.lambda, a).unwrap();
    let nu = FunctionalHandle::new(d.nu, 0.5).unwrap().cauchy_transform(a).unwrap();
    let whole = t1.product_cauchy_transform(|z| g.eval(z), a).unwrap();
    assert!((whole - nu - lam).norm() <= 1e-12 * whole.norm().max(1.0));
}

#[test]
fn pipeline_rejects_bad_inputs() {
    let mu: ProductMeasure<2> = MeasureRows(vec![[0.1, 0.2, -0.3, 0.1, 1.0, 0.0]]).into();
    let b = c(0.0, 0.0);
    let t1 = FunctionalHandle::normalized_derivation(mu, 0.5, b).unwrap();
    let g = pole_fn();
    assert!(t_pipeline(&t1, b, |z| g.eval(z), c(0.7, 0.7)).is_err());
    let g = g.vanishing_at(b).unwrap();
    assert!(t_pipeline(&t1, b, |z| g.eval(z), c(0.1, 0.2)).is_err());
    assert!(t_pipeline(&t1, b, |z| g.eval(z), b).is_err());
    let msg = FunctionalHandle::new(t1.mu.clone(), 1.0).unwrap_err().to_string();
    assert!(msg.contains("0<α<1"), "{msg}");
}

#[test]
fn cheese_derivation_matches_quotients_near_the_base() {
    let cheese = default_cheese();
    let cf = cheese_function(&cheese, 2.0, None).unwrap();
    let b = cheese.base.to_complex();
    let d = cf.derivation(b).unwrap();
    assert!(d.tail_bound < 1e-6 * d.value.norm());
    let (phi, _) = cheese.clear_ray_direction();
    let a = b + Complex64::from_polar(2f64.powi(-12), phi);
    assert!(cheese.in_u(&Point2::from_complex(a)));
    let dq = cf.f.difference_quotient(a, b).unwrap();
    assert!((dq - d.value).norm() <= 1e-3 * d.value.norm(), "dq {dq} ∂f {}", d.value);
}

#[test]
fn surrogate_measure_is_normalized() {
    let cheese = default_cheese();
    let t1 = surrogate_derivation_measure(&cheese).unwrap();
    let b = cheese.base.to_complex();
    assert!((t1.apply(|z| Ok(z - b)).unwrap() - 1.0).norm() < 1e-12);
    let good = GoodSet::new(&t1.mu, cheese.alpha, cheese.base, Some(1.0), None).unwrap();
    assert!((good.k - good.m - 2.0).abs() < 1e-12);
    assert!(!good.contains(&cheese, &cheese.base));
}

#[test]
fn probes_have_unit_norm_and_vanish_at_the_base() {
    let cheese = default_cheese();
    let b = cheese.base.to_complex();
    let domain = LipDomain { diam: 2f64.sqrt(), reach: 2f64.sqrt(), clearances: vec![] };
    for g in unit_probes(&cheese, 6, 1).unwrap() {
        assert!(g.eval(b).unwrap().norm() < 1e-14);
        let d = LipDomain { clearances: g.poles.iter().map(|(w, _)| cheese.square.boundary_distance(&Point2::from_complex(*w)).abs()).collect(), ..domain.clone() };
        let probe = g.lip_seminorm_probe(&[(b, b + 0.3), (b - 0.2, b + c(0.0, 0.4))], cheese.alpha, &d).unwrap();
        assert!(probe.lower <= 1.0 + 1e-12, "{}", probe.lower);
    }
}
