use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use potkit::functionals::FunctionalHandle;
use potkit::geometry::Point2;
use potkit::measures::{DiscreteMeasure, MeasureRows, ProductMeasure};
use potkit::potentials::{
    classify_exceptional_set, h_kernel, h_tilde, normalized_potential, riesz_potential, weighted_potential, PointClass, PotentialKind,
    PotentialSource, PotentialSpec,
};
use potkit::geometry::Sampler;

fn plane(atoms: &[(f64, f64, f64)]) -> DiscreteMeasure<2> {
    DiscreteMeasure::new(atoms.iter().map(|&(x, y, m)| (Point2::new(x, y), Complex64::new(m, 0.0))).collect())
}

fn product_rows() -> impl Strategy<Value = Vec<[f64; 6]>> {
    prop::collection::vec(
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_map(|(a, b, c, d, e, f)| [a, b, c, d, e, f]),
        1..8,
    )
    .prop_filter("off the diagonal", |rows| rows.iter().all(|r| (r[0] - r[2]).hypot(r[1] - r[3]) > 1e-3))
}

fn far_from(rows: &[[f64; 6]], a: &Point2) -> bool {
    rows.iter().all(|r| Point2::new(r[0], r[1]).dist(a) > 1e-3 && Point2::new(r[2], r[3]).dist(a) > 1e-3)
}

proptest! {
    #[test]
    fn riesz_is_additive(m1 in 0.0..3.0f64, m2 in 0.0..3.0f64, x in 0.1..2.0f64, s in 0.1..1.9f64) {
        let a = Point2::new(-x, 0.3);
        let both = plane(&[(0.0, 0.0, m1), (0.5, 0.5, m2)]);
        let sum = riesz_potential(&plane(&[(0.0, 0.0, m1)]), s, &a) + riesz_potential(&plane(&[(0.5, 0.5, m2)]), s, &a);
        prop_assert!((riesz_potential(&both, s, &a) - sum).abs() <= 1e-12 * sum.max(1.0));
    }

    #[test]
    fn riesz_dilation(lambda in 0.1..10.0f64, s in 0.1..1.9f64, ax in -1.0..1.0f64, ay in -1.0..1.0f64) {
        let atoms = [(0.3, -0.2, 1.0), (-0.4, 0.1, 2.5)];
        let a = Point2::new(ax, ay);
        prop_assume!(atoms.iter().all(|&(x, y, _)| Point2::new(x, y).dist(&a) > 1e-3));
        let dilated: Vec<(f64, f64, f64)> = atoms.iter().map(|&(x, y, m)| (lambda * x, lambda * y, m)).collect();
        let base = riesz_potential(&plane(&atoms), s, &a);
        let scaled = riesz_potential(&plane(&dilated), s, &Point2::new(lambda * ax, lambda * ay));
        prop_assert!((scaled - lambda.powf(-s) * base).abs() <= 1e-10 * base);
    }

    #[test]
    fn h_is_the_functional_of_the_cauchy_kernel(rows in product_rows(), ax in -1.0..1.0f64, ay in -1.0..1.0f64, alpha in 0.05..0.95f64) {
        let a = Point2::new(ax, ay);
        prop_assume!(far_from(&rows, &a));
        let mu: ProductMeasure<2> = MeasureRows(rows).into();
        let h = h_kernel(&mu, alpha, &a).unwrap();
        // partial fractions: (z − w)/((z − a)(w − a)) = 1/(a − z) − 1/(a − w)
        let ac = a.to_complex();
        let oracle = FunctionalHandle::new(mu.clone(), alpha)
            .unwrap()
            .apply(|z| Ok(1.0 / (PI * (ac - z))))
            .unwrap();
        prop_assert!((h - oracle).norm() <= 1e-10 * oracle.norm().max(1.0));
        prop_assert!(h.norm() <= h_tilde(&mu, alpha, &a) / PI * (1.0 + 1e-12));
    }

    #[test]
    fn h_tilde_is_the_refined_potential(rows in product_rows(), ax in -1.0..1.0f64, alpha in 0.05..0.95f64) {
        let a = Point2::new(ax, 0.25);
        let mu: ProductMeasure<2> = MeasureRows(rows).into();
        prop_assert_eq!(h_tilde(&mu, alpha, &a), weighted_potential(&mu, 1.0, 1.0, 1.0 - alpha, &a));
    }
}

#[test]
fn weighted_potential_by_hand() {
    // x = (1, 0), y = (0, 2), a = 0: |x − a| = 1, |y − a| = 2, |x − y| = √5
    let mu: ProductMeasure<2> = MeasureRows(vec![[1.0, 0.0, 0.0, 2.0, 0.0, 3.0]]).into();
    let a = Point2::ORIGIN;
    assert!((weighted_potential(&mu, 1.0, 1.0, 0.0, &a) - 1.5).abs() < 1e-15);
    assert!((weighted_potential(&mu, 2.0, 1.0, 1.0, &a) - 3.0 * 5f64.sqrt() / 2.0).abs() < 1e-14);
    assert_eq!(weighted_potential(&mu, 1.0, 1.0, 0.0, &Point2::new(1.0, 0.0)), f64::INFINITY);
}

#[test]
fn h_kernel_at_an_atom_is_an_error() {
    let mu: ProductMeasure<2> = MeasureRows(vec![[1.0, 0.0, 0.0, 2.0, 1.0, 0.0]]).into();
    assert!(matches!(h_kernel(&mu, 0.5, &Point2::new(0.0, 2.0)), Err(potkit::Error::AtomCollision { index: 0 })));
}

#[test]
fn normalized_single_atom_closed_form() {
    let spec = PotentialSpec::new(PotentialKind::Single { s: 1.5 }, Point2::ORIGIN, 1.0);
    let src = PotentialSource::Plane(plane(&[(0.2, 0.0, 2.0)]));
    let a = Point2::new(0.0, 0.1);
    let v = normalized_potential(&spec, &src, &a).unwrap().unwrap();
    let oracle = 0.1f64.powf(1.5) * 2.0 / 0.05f64.sqrt().powf(1.5);
    assert!((v - oracle).abs() < 1e-13);
    assert_eq!(normalized_potential(&spec, &src, &Point2::new(0.2, 0.0)).unwrap(), None);
}

#[test]
fn single_atom_set_is_the_outside_of_an_apollonius_circle() {
    // |a| ≥ ε|a − p| with ε = 1/2 is the complement of the disk with
    // center −p/3 and radius 2|p|/3
    let p = Point2::new(0.0, -0.15);
    let spec = PotentialSpec::new(PotentialKind::Single { s: 1.0 }, Point2::ORIGIN, 0.5);
    let report = classify_exceptional_set(&spec, &PotentialSource::Plane(plane(&[(p.x(), p.y(), 1.0)])), 2..=6, Sampler::Grid { per_radius: 32 })
        .unwrap();
    let c = Point2::new(-p.x() / 3.0, -p.y() / 3.0);
    let r = 2.0 * p.norm() / 3.0;
    let mismatches = report
        .points
        .iter()
        .filter(|q| q.class != PointClass::Undefined)
        .filter(|q| (Point2::new(q.a[0], q.a[1]).dist(&c) >= r) != (q.class == PointClass::InE))
        .count();
    assert!(mismatches * 1000 <= report.points.len(), "{mismatches} of {}", report.points.len());
}

#[test]
fn exceptional_density_vanishes_at_the_base() {
    let spec = PotentialSpec::new(PotentialKind::Single { s: 1.0 }, Point2::ORIGIN, 0.5);
    let src = PotentialSource::Plane(plane(&[(0.1, 0.0, 1.0), (-0.12, 0.15, 1.0), (0.05, -0.3, 1.0)]));
    let report = classify_exceptional_set(&spec, &src, 3..=9, Sampler::Grid { per_radius: 32 }).unwrap();
    assert!(report.hypotheses_hold());
    let f: Vec<f64> = report.profile.entries.iter().map(|e| e.fraction).collect();
    assert!(f.windows(2).all(|w| w[1] <= w[0] + 1e-3), "{f:?}");
    assert!(report.profile.entry(8).unwrap().fraction < 0.05);
}

#[test]
fn spec_validation_names_the_rule() {
    let bad = PotentialSpec::new(PotentialKind::Refined { s: 0.5, t: 1.0, u: 0.8 }, Point2::ORIGIN, 1.0);
    let msg = bad.validate().unwrap_err().to_string();
    assert!(msg.contains("u ≤ min{1,s,t}"), "{msg}");
    let msg = PotentialSpec::new(PotentialKind::HTilde { alpha: 1.0 }, Point2::ORIGIN, 1.0).validate().unwrap_err().to_string();
    assert!(msg.contains("0<α<1"), "{msg}");
}
