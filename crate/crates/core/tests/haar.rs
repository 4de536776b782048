use moser_core::lie::sampling::{random_elements, seeded};
use moser_core::lie::{haar_quadrature, GroupDescriptor, GroupKind};

#[test]
fn weights_are_normalized() {
    for g in [
        GroupDescriptor::torus(1),
        GroupDescriptor::torus(2),
        GroupDescriptor::su2(),
        GroupDescriptor::so3(),
        GroupDescriptor::product(vec![GroupKind::Su2, GroupKind::Torus(1)]),
    ] {
        for res in [1, 5, 16] {
            let q = haar_quadrature(&g, res).unwrap();
            assert!((q.total_weight() - 1.0).abs() <= 1e-12, "{} at {res}", g.name());
        }
    }
}

#[test]
fn invariance_defect_shrinks_with_resolution() {
    for g in [GroupDescriptor::torus(1), GroupDescriptor::su2(), GroupDescriptor::so3()] {
        let translators = random_elements(&g, &mut seeded(17), 4, 1.0);
        let defects: Vec<f64> = [1, 2, 3, 4, 8, 16, 32]
            .iter()
            .map(|&r| haar_quadrature(&g, r).unwrap().polynomial_invariance_defect(3, &translators))
            .collect();
        assert!(defects[0] > 1e-3, "{}: {defects:?}", g.name());
        for w in defects.windows(2) {
            assert!(w[1] <= w[0].max(1e-12), "{}: {defects:?}", g.name());
        }
        assert!(*defects.last().unwrap() <= 1e-12, "{}: {defects:?}", g.name());
    }
}

#[test]
fn quadratic_functions_are_invariant_at_moderate_resolution() {
    let g = GroupDescriptor::su2();
    let q = haar_quadrature(&g, 16).unwrap();
    let h = random_elements(&g, &mut seeded(3), 1, 1.0).remove(0);
    let d = q.invariance_defect(|x| x.matrix()[(0, 1)].norm_sqr(), &h);
    assert!(d <= 1e-13, "{d:e}");
}
