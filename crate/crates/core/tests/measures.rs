use num_complex::Complex64;
use proptest::prelude::*;

use potkit::functionals::FunctionalHandle;
use potkit::geometry::Point2;
use potkit::measures::{MeasureRows, ProductMeasure};

fn coord() -> impl Strategy<Value = f64> {
    -1.0..1.0f64
}

fn atoms(max: usize) -> impl Strategy<Value = Vec<[f64; 6]>> {
    prop::collection::vec(
        (coord(), coord(), coord(), coord(), -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c, d, e, f)| [a, b, c, d, e, f]),
        1..max,
    )
    .prop_filter("off the diagonal", |rows| rows.iter().all(|r| (r[0] - r[2]).hypot(r[1] - r[3]) > 1e-3))
}

fn test_fn(z: Complex64) -> potkit::Result<Complex64> {
    Ok(z * z + Complex64::new(0.5, -0.25) * z + 1.0 / (z - Complex64::new(3.0, 2.0)))
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #[test]
    fn swap_is_an_involution(rows in atoms(12)) {
        let mu: ProductMeasure<2> = MeasureRows(rows).into();
        let back = mu.swap_pushforward().swap_pushforward();
        prop_assert_eq!(&back.atoms, &mu.atoms);
        prop_assert_eq!(mu.swap_pushforward().total_variation(), mu.total_variation());
    }

    #[test]
    fn swap_negates_the_functional(rows in atoms(12), alpha in 0.05..0.95f64) {
        let h = FunctionalHandle::new(MeasureRows(rows).into(), alpha).unwrap();
        let l = h.apply(test_fn).unwrap();
        let ls = h.swapped().apply(test_fn).unwrap();
        prop_assert!((l + ls).norm() <= 1e-12 * l.norm().max(1.0));
    }

    #[test]
    fn partition_reassembles(rows in atoms(12), cut in coord()) {
        let mu: ProductMeasure<2> = MeasureRows(rows).into();
        let left = mu.restrict(|z, _| z.x() < cut);
        let right = mu.restrict(|z, _| z.x() >= cut);
        prop_assert_eq!(left.len() + right.len(), mu.len());
        let tv = left.total_variation() + right.total_variation();
        prop_assert!((tv - mu.total_variation()).abs() <= 1e-12 * mu.total_variation().max(1.0));
        let whole = FunctionalHandle::new(mu, 0.5).unwrap().apply(test_fn).unwrap();
        let parts = FunctionalHandle::new(left.concat(&right), 0.5).unwrap().apply(test_fn).unwrap();
        prop_assert!(rel(whole, parts) <= 1e-12 || (whole - parts).norm() <= 1e-12);
    }

    #[test]
    fn avoiding_a_slice_keeps_the_functional(rows in atoms(8), pick in 0usize..8) {
        let mut rows = rows;
        let k = pick % rows.len();
        let b = Point2::new(rows[k][0], rows[k][1]);
        // put a second atom on the slice {b} × X
        let mut extra = rows[0];
        extra[0] = b.x();
        extra[1] = b.y();
        if (extra[2] - b.x()).hypot(extra[3] - b.y()) > 1e-3 {
            rows.push(extra);
        }
        let mu: ProductMeasure<2> = MeasureRows(rows).into();
        let moved = mu.avoid_vertical_slice(&b).unwrap();
        prop_assert_eq!(moved.mass_on_vertical_slice(&b), 0.0);
        prop_assert!((moved.total_variation() - mu.total_variation()).abs() <= 1e-12 * mu.total_variation());
        let l = FunctionalHandle::new(mu, 0.3).unwrap().apply(test_fn).unwrap();
        let lm = FunctionalHandle::new(moved, 0.3).unwrap().apply(test_fn).unwrap();
        prop_assert!((l - lm).norm() <= 1e-12 * l.norm().max(1.0));
    }

    #[test]
    fn normalize_merges_without_changing_the_functional(rows in atoms(6)) {
        let mu: ProductMeasure<2> = MeasureRows(rows).into();
        let doubled = mu.concat(&mu);
        let merged = doubled.normalize();
        prop_assert!(merged.len() <= mu.len());
        prop_assert!(merged.total_variation() <= doubled.total_variation() * (1.0 + 1e-12));
        let a = FunctionalHandle::new(doubled, 0.5).unwrap().apply(test_fn).unwrap();
        let b = FunctionalHandle::new(merged, 0.5).unwrap().apply(test_fn).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn marginals_carry_the_variation(rows in atoms(10)) {
        let mu: ProductMeasure<2> = MeasureRows(rows).into();
        let tv = mu.total_variation();
        prop_assert!((mu.marginal_first(true).total_variation() - tv).abs() <= 1e-12 * tv);
        prop_assert!((mu.marginal_second(true).total_variation() - tv).abs() <= 1e-12 * tv);
        prop_assert!(mu.marginal_first(false).total_variation() <= tv * (1.0 + 1e-12));
    }

    #[test]
    fn json_round_trip(rows in atoms(8)) {
        let mu: ProductMeasure<2> = MeasureRows(rows).into();
        let back = ProductMeasure::<2>::from_json(&mu.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.atoms, mu.atoms);
    }
}

#[test]
fn diagonal_mass_is_rejected() {
    let mu: ProductMeasure<2> = MeasureRows(vec![[0.2, 0.1, 0.2, 0.1, 1.0, 0.0]]).into();
    assert!(matches!(FunctionalHandle::new(mu.clone(), 0.5), Err(potkit::Error::DiagonalMass { index: 0 })));
    assert!(mu.avoid_vertical_slice(&Point2::new(0.2, 0.1)).is_err());
}

#[test]
fn slice_masses() {
    let b = Point2::new(0.0, 0.0);
    let mu: ProductMeasure<2> = MeasureRows(vec![
        [0.0, 0.0, 1.0, 0.0, 2.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 0.0, 3.0],
        [1.0, 0.0, 0.5, 0.0, 1.0, 0.0],
    ])
    .into();
    assert_eq!(mu.mass_on_vertical_slice(&b), 2.0);
    assert_eq!(mu.mass_on_horizontal_slice(&b), 3.0);
    assert_eq!(mu.mass_at_pair(&b), 0.0);
    let moved = mu.avoid_vertical_slice(&b).unwrap();
    assert_eq!(moved.mass_on_vertical_slice(&b), 0.0);
    assert_eq!(moved.mass_on_horizontal_slice(&b), 5.0);
}
