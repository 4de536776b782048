use std::sync::Arc;

use moser_core::cohomology::{cocycle_defect, random_polynomial_cochain, Cochain, HomFn, RepKind, Representation};
use moser_core::lie::sampling::{random_elements, random_tuples, seeded, SampleRng};
use moser_core::lie::{catalog_descriptors, AlgebraVector, GroupDescriptor, GroupElement, Splitting};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

/// A representation together with a sampler for its acting group.
struct Case {
    rep: Representation,
    sample: Box<dyn Fn(&mut SampleRng, usize) -> Vec<GroupElement>>,
}

fn one_parameter(g: &Arc<GroupDescriptor>) -> (Arc<GroupDescriptor>, HomFn) {
    let r = GroupDescriptor::translation(1);
    let b0 = AlgebraVector::basis(0, g);
    let phi: HomFn = Arc::new(move |h| b0.scaled(h.matrix()[(0, 1)].re).exp());
    (r, phi)
}

fn cases(g: &Arc<GroupDescriptor>) -> Vec<Case> {
    let (r, phi) = one_parameter(g);
    let splitting = Arc::new(Splitting::from_span(g, &g.algebra_basis()[..1], 1e-8).unwrap());
    let b0 = AlgebraVector::basis(0, g);
    let (g1, r1, r2) = (Arc::clone(g), Arc::clone(&r), Arc::clone(&r));
    let line = move |rng: &mut SampleRng, n: usize| -> Vec<GroupElement> {
        (0..n).map(|_| b0.scaled(rng.random_range(-2.0..2.0)).exp()).collect()
    };
    vec![
        Case {
            rep: Representation::adjoint(g),
            sample: Box::new(move |rng, n| random_elements(&g1, rng, n, 1.0)),
        },
        Case {
            rep: Representation::pullback_adjoint(&r, g, Arc::clone(&phi)),
            sample: Box::new(move |rng, n| random_elements(&r1, rng, n, 2.0)),
        },
        Case {
            rep: Representation::quotient_adjoint(Arc::clone(&splitting)),
            sample: Box::new(line),
        },
        Case {
            rep: Representation::pullback_quotient(&r, phi, splitting),
            sample: Box::new(move |rng, n| random_elements(&r2, rng, n, 2.0)),
        },
    ]
}

fn tuples(case: &Case, rng: &mut SampleRng, k: usize, count: usize) -> Vec<Vec<GroupElement>> {
    (0..count).map(|_| (case.sample)(rng, k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn coboundary_squares_to_zero(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        for g in catalog_descriptors() {
            for case in cases(&g) {
                for degree in [0, 1] {
                    let c = random_polynomial_cochain(&case.rep, degree, &mut rng);
                    let samples = tuples(&case, &mut rng, degree + 2, 50);
                    let defect = cocycle_defect(&c.coboundary(), &samples).unwrap();
                    prop_assert!(defect <= 1e-9, "{} {:?} degree {degree}: {defect:e}", g.name(), case.rep.kind());
                }
            }
        }
    }

    #[test]
    fn representation_axioms(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        for g in catalog_descriptors() {
            for case in cases(&g) {
                let pairs: Vec<_> = (0..25)
                    .map(|_| {
                        let p = (case.sample)(&mut rng, 2);
                        (p[0].clone(), p[1].clone())
                    })
                    .collect();
                let vectors: Vec<_> = (0..5)
                    .map(|_| DVector::from_fn(case.rep.space_dim(), |_, _| rng.random_range(-1.0..1.0)))
                    .collect();
                let defect = case.rep.axiom_defect(&pairs, &vectors).unwrap();
                prop_assert!(defect <= 1e-10, "{} {:?}: {defect:e}", g.name(), case.rep.kind());
            }
        }
    }

    #[test]
    fn pullback_commutes_with_coboundary(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        for g in catalog_descriptors() {
            let (r, phi) = one_parameter(&g);
            let c = random_polynomial_cochain(&Representation::adjoint(&g), 1, &mut rng);
            let lhs = c.coboundary().pullback(&r, Arc::clone(&phi));
            let rhs = c.pullback(&r, phi).coboundary();
            for pair in random_tuples(&r, &mut rng, 2, 20, 2.0) {
                let a = lhs.evaluate(&pair).unwrap();
                let b = rhs.evaluate(&pair).unwrap();
                prop_assert!((&a - &b).norm() <= 1e-10 * a.norm().max(1.0), "{}", g.name());
            }
        }
    }
}

#[test]
fn deterministic_evaluation() {
    let g = GroupDescriptor::su2();
    let c = random_polynomial_cochain(&Representation::adjoint(&g), 1, &mut seeded(1));
    let x = random_elements(&g, &mut seeded(2), 1, 1.0);
    assert_eq!(c.evaluate(&x).unwrap(), c.evaluate(&x).unwrap());
}

#[test]
fn every_kind_is_exercised() {
    let kinds: Vec<RepKind> = cases(&GroupDescriptor::so3()).iter().map(|c| c.rep.kind()).collect();
    assert_eq!(
        kinds,
        [RepKind::Adjoint, RepKind::PullbackAdjoint, RepKind::QuotientAdjoint, RepKind::PullbackQuotient]
    );
}

#[test]
fn zero_cochain_has_zero_defect() {
    let g = GroupDescriptor::so3();
    let c = Cochain::zero(1, Representation::adjoint(&g));
    let samples = random_tuples(&g, &mut seeded(0), 2, 20, 1.0);
    assert_eq!(cocycle_defect(&c, &samples).unwrap(), 0.0);
}

#[test]
fn log_is_not_a_cocycle_on_so3() {
    let g = GroupDescriptor::so3();
    let c = Cochain::new(1, Representation::adjoint(&g), |x| {
        let l = x[0].log_within(3.0)?;
        Ok(DVector::from_vec(vec![l.coords()[0], 0.0, 0.0]))
    });
    let mut rng = seeded(5);
    let samples: Vec<Vec<GroupElement>> = (0..50)
        .map(|_| {
            (0..2)
                .map(|_| {
                    let v = DVector::from_fn(3, |_, _| rng.random_range(-0.6..0.6));
                    AlgebraVector::from_coords(v, &g).exp()
                })
                .collect()
        })
        .collect();
    assert!(cocycle_defect(&c, &samples).unwrap() > 0.1);
}

#[test]
fn pullback_of_coboundary_is_coboundary_of_pullback_value() {
    let g = GroupDescriptor::su2();
    let (r, phi) = one_parameter(&g);
    let u = DVector::from_vec(vec![0.4, -1.0, 0.3]);
    let z = Cochain::constant(Representation::adjoint(&g), u.clone()).coboundary();
    let pulled = z.pullback(&r, Arc::clone(&phi));
    let direct = Cochain::constant(Representation::pullback_adjoint(&r, &g, phi), u).coboundary();
    for h in random_elements(&r, &mut seeded(9), 30, 3.0) {
        let a = pulled.evaluate(std::slice::from_ref(&h)).unwrap();
        let b = direct.evaluate(std::slice::from_ref(&h)).unwrap();
        assert!((a - b).norm() <= 1e-12);
    }
    let c = Cochain::constant(Representation::adjoint(&g), DVector::from_vec(vec![1.0, 2.0, 3.0]));
    let p = c.pullback(&GroupDescriptor::translation(1), one_parameter(&g).1);
    assert_eq!(p.evaluate(&[]).unwrap(), DVector::from_vec(vec![1.0, 2.0, 3.0]));
    assert_eq!(p.rep().kind(), RepKind::PullbackAdjoint);
}

#[test]
fn pushforward_keeps_cocycles_and_is_trivial_for_abelian_targets() {
    let g = GroupDescriptor::so3();
    let (r, phi) = one_parameter(&g);
    let rep = Representation::pullback_adjoint(&r, &g, phi);
    let u = DVector::from_vec(vec![0.2, 0.7, -0.5]);
    let cocycle = Cochain::constant(rep, u).coboundary();
    let k = AlgebraVector::from_slice(&[0.9, -0.4, 1.3], &g).exp();
    let pushed = cocycle.pushforward(&k).unwrap();
    let samples = random_tuples(&r, &mut seeded(4), 2, 50, 2.0);
    assert!(cocycle_defect(&pushed, &samples).unwrap() <= 1e-9);

    let t2 = GroupDescriptor::torus(2);
    let (r, phi) = one_parameter(&t2);
    let c = Cochain::new(1, Representation::pullback_adjoint(&r, &t2, phi), |h| {
        let t = h[0].matrix()[(0, 1)].re;
        Ok(DVector::from_vec(vec![t, t * t]))
    });
    let k = AlgebraVector::from_slice(&[0.3, 2.0], &t2).exp();
    let pushed = c.pushforward(&k).unwrap();
    for h in random_elements(&r, &mut seeded(1), 10, 2.0) {
        let a = pushed.evaluate(std::slice::from_ref(&h)).unwrap();
        let b = c.evaluate(std::slice::from_ref(&h)).unwrap();
        assert!((a - b).norm() <= 1e-14);
    }
}
