//! Built-in scenarios.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use moser_core::cohomology::{Cochain, HomFn, Representation};
use moser_core::homo::{
    AlgebraPath, CochainPath, HomDeformation, PipelineConfig, Verdict,
};
use moser_core::lie::linalg::{ci, from_real};
use moser_core::lie::{AlgebraVector, GroupDescriptor, GroupElement, HaarQuadrature, Mat};
use moser_core::subgroup::{HaarSystemFn, SubgroupDeformation};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    Homomorphism,
    Subgroup,
    WeakTriviality,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Homomorphism => "Homomorphism",
            ScenarioKind::Subgroup => "Subgroup",
            ScenarioKind::WeakTriviality => "WeakTriviality",
        })
    }
}

#[derive(Clone)]
pub enum Family {
    Homomorphism(HomDeformation),
    Subgroup(SubgroupDeformation),
    Weak {
        deformation: HomDeformation,
        z: CochainPath,
        u: AlgebraPath,
    },
}

#[derive(Clone)]
pub struct Scenario {
    pub id: &'static str,
    pub kind: ScenarioKind,
    pub expected: Verdict,
    pub exercises: &'static str,
    pub defaults: PipelineConfig,
    pub family: Family,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("expected", &self.expected)
            .finish()
    }
}

pub fn catalog() -> Vec<Scenario> {
    vec![
        constant_hom(),
        circle_in_su2_conjugated(),
        shear_line_r1_to_r2(),
        line_in_heisenberg_conjugated(),
        weak_trivial_inner(),
        so2_in_so3_tilt(),
        line_rotation_in_r2(),
        so2_isotopy_in_so3(),
        heisenberg_line_tilt(),
    ]
}

pub fn find(id: &str) -> Option<Scenario> {
    catalog().into_iter().find(|s| s.id == id)
}

/// Angle of a `Torus(1)` element.
pub fn angle(h: &GroupElement) -> f64 {
    let m = h.matrix();
    m[(1, 0)].re.atan2(m[(0, 0)].re)
}

pub fn circle_element(theta: f64) -> GroupElement {
    let t = GroupDescriptor::torus(1);
    AlgebraVector::from_slice(&[theta], &t).exp()
}

fn line_param(h: &GroupElement) -> f64 {
    h.matrix()[(0, 1)].re
}

/// `θ ↦ diag(e^{iθ}, e^{−iθ})`.
pub fn diagonal_circle() -> HomFn {
    let su2 = GroupDescriptor::su2();
    Arc::new(move |h| {
        let th = angle(h);
        let mut m = Mat::zeros(2, 2);
        m[(0, 0)] = ci(th).exp();
        m[(1, 1)] = ci(-th).exp();
        GroupElement::new_unchecked(m, &su2)
    })
}

/// `R(θ) ↦ diag(R(θ), 1)`, rotations about the z-axis.
pub fn z_rotation() -> HomFn {
    let so3 = GroupDescriptor::so3();
    Arc::new(move |h| {
        let mut m = Mat::identity(3, 3);
        m.view_mut((0, 0), (2, 2)).copy_from(h.matrix());
        GroupElement::new_unchecked(m, &so3)
    })
}

/// `t ↦ exp(t E₀₁)` in the Heisenberg group.
pub fn heisenberg_line() -> HomFn {
    let heis = GroupDescriptor::heisenberg3();
    Arc::new(move |h| AlgebraVector::from_slice(&[line_param(h), 0.0, 0.0], &heis).exp())
}

fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// `φ_ε = I_{exp(εξ)} ∘ φ` with its analytic ε-derivative `[ξ, φ_ε]`.
pub fn conjugated_family(
    source: &Arc<GroupDescriptor>,
    xi: AlgebraVector,
    phi: HomFn,
    eps_domain: (f64, f64),
) -> HomDeformation {
    let target = Arc::clone(xi.descriptor());
    let (xi2, phi2) = (xi.clone(), Arc::clone(&phi));
    let conj = move |xi: &AlgebraVector, phi: &HomFn, e: f64, h: &GroupElement| {
        let g = xi.scaled(e).exp();
        let ginv = xi.scaled(-e).exp();
        GroupElement::new_unchecked(g.matrix() * phi(h).matrix() * ginv.matrix(), xi.descriptor())
    };
    HomDeformation::new(source, &target, eps_domain, move |e, h| conj(&xi, &phi, e, h))
        .expect("domain contains 0")
        .with_derivative(move |e, h| commutator(xi2.matrix(), conj(&xi2, &phi2, e, h).matrix()))
}

fn constant_hom() -> Scenario {
    let t = GroupDescriptor::torus(1);
    let su2 = GroupDescriptor::su2();
    Scenario {
        id: "constant_hom",
        kind: ScenarioKind::Homomorphism,
        expected: Verdict::TriviallyCertified,
        exercises: "a constant family of homomorphisms is trivial",
        defaults: PipelineConfig::default(),
        family: Family::Homomorphism(
            HomDeformation::constant(&t, &su2, diagonal_circle()).expect("domain contains 0"),
        ),
    }
}

/// The conjugating direction of `circle_in_su2_conjugated`.
pub fn circle_xi() -> AlgebraVector {
    AlgebraVector::from_slice(&[1.2, 0.8, 0.0], &GroupDescriptor::su2())
}

fn circle_in_su2_conjugated() -> Scenario {
    let t = GroupDescriptor::torus(1);
    Scenario {
        id: "circle_in_su2_conjugated",
        kind: ScenarioKind::Homomorphism,
        expected: Verdict::TriviallyCertified,
        exercises: "homomorphisms from a compact group are stable; the Moser flow recovers the conjugation",
        defaults: PipelineConfig {
            quadrature_resolution: 64,
            ..PipelineConfig::default()
        },
        family: Family::Homomorphism(conjugated_family(
            &t,
            circle_xi(),
            diagonal_circle(),
            (-1.0, 1.0),
        )),
    }
}

fn shear_line_r1_to_r2() -> Scenario {
    let r1 = GroupDescriptor::translation(1);
    let r2 = GroupDescriptor::translation(2);
    let r2c = Arc::clone(&r2);
    let d = HomDeformation::new(&r1, &r2, (-1.0, 1.0), move |e, h| {
        let t = line_param(h);
        GroupElement::new_unchecked(from_real(3, 3, &[1., 0., t, 0., 1., e * t, 0., 0., 1.]), &r2c)
    })
    .expect("domain contains 0")
    .with_derivative(|_, h| from_real(3, 3, &[0., 0., 0., 0., 0., line_param(h), 0., 0., 0.]));
    Scenario {
        id: "shear_line_r1_to_r2",
        kind: ScenarioKind::Homomorphism,
        expected: Verdict::NotTransgressible,
        exercises: "a nonzero class in an abelian target cannot be transgressed",
        defaults: PipelineConfig::default(),
        family: Family::Homomorphism(d),
    }
}

fn line_in_heisenberg_conjugated() -> Scenario {
    let r1 = GroupDescriptor::translation(1);
    let heis = GroupDescriptor::heisenberg3();
    let y = AlgebraVector::from_slice(&[0.0, 1.0, 0.0], &heis);
    Scenario {
        id: "line_in_heisenberg_conjugated",
        kind: ScenarioKind::Homomorphism,
        expected: Verdict::TriviallyCertified,
        exercises: "an inner deformation from a non-compact source is certified by least squares",
        defaults: PipelineConfig::default(),
        family: Family::Homomorphism(conjugated_family(&r1, y, heisenberg_line(), (-1.0, 1.0))),
    }
}

/// The generator `w` of `weak_trivial_inner`.
pub fn weak_w() -> AlgebraVector {
    AlgebraVector::from_slice(&[0.3, -0.6, 0.4], &GroupDescriptor::su2())
}

/// `φ_ε = I_{exp(−εw)} ∘ φ` with candidate `Z = scale·δw`, `u = 0`.
pub fn weak_trivial_inner_scaled(scale: f64) -> Family {
    let t = GroupDescriptor::torus(1);
    let su2 = GroupDescriptor::su2();
    let w = weak_w();
    let deformation = conjugated_family(&t, w.scaled(-1.0), diagonal_circle(), (-1.0, 1.0));
    let rep = Representation::adjoint(&su2);
    let wc = w.coords() * scale;
    let z: CochainPath = Arc::new(move |_| Cochain::constant(rep.clone(), wc.clone()).coboundary());
    let u: AlgebraPath = Arc::new(move |_| AlgebraVector::zero(&su2));
    Family::Weak { deformation, z, u }
}

fn weak_trivial_inner() -> Scenario {
    Scenario {
        id: "weak_trivial_inner",
        kind: ScenarioKind::WeakTriviality,
        expected: Verdict::TriviallyCertified,
        exercises: "a pre-image in the cohomology of G yields an automorphism flow that trivializes the family",
        defaults: PipelineConfig::default(),
        family: weak_trivial_inner_scaled(1.0),
    }
}

/// `ι_ε = I_{exp(ε êx)} ∘ ι` for rotations about the z-axis.
pub fn tilt_family() -> SubgroupDeformation {
    let t = GroupDescriptor::torus(1);
    let so3 = GroupDescriptor::so3();
    let ex = AlgebraVector::basis(0, &so3);
    let d = conjugated_family(&t, ex, z_rotation(), (-1.0, 1.0));
    let (d1, d2) = (d.clone(), d);
    SubgroupDeformation::new(&t, &so3, (-1.0, 1.0), move |e, h| d1.evaluate(e, h))
        .expect("domain contains 0")
        .with_derivative(move |e, h| {
            d2.derivative(e, h, &Default::default())
        })
}

fn so2_in_so3_tilt() -> Scenario {
    Scenario {
        id: "so2_in_so3_tilt",
        kind: ScenarioKind::Subgroup,
        expected: Verdict::TriviallyCertified,
        exercises: "compact subgroups are stable; the subgroup Moser argument recovers the tilt",
        defaults: PipelineConfig {
            quadrature_resolution: 64,
            ..PipelineConfig::default()
        },
        family: Family::Subgroup(tilt_family()),
    }
}

fn line_rotation_in_r2() -> Scenario {
    let r1 = GroupDescriptor::translation(1);
    let r2 = GroupDescriptor::translation(2);
    let r2c = Arc::clone(&r2);
    let s = SubgroupDeformation::new(&r1, &r2, (-PI, PI), move |e, h| {
        let t = line_param(h);
        let m = from_real(3, 3, &[1., 0., t * e.cos(), 0., 1., t * e.sin(), 0., 0., 1.]);
        GroupElement::new_unchecked(m, &r2c)
    })
    .expect("domain contains 0")
    .with_derivative(|e, h| {
        let t = line_param(h);
        from_real(3, 3, &[0., 0., -t * e.sin(), 0., 0., t * e.cos(), 0., 0., 0.])
    });
    Scenario {
        id: "line_rotation_in_r2",
        kind: ScenarioKind::Subgroup,
        expected: Verdict::NotTransgressible,
        exercises: "rotating a line in the plane is a nontrivial subgroup deformation",
        defaults: PipelineConfig::default(),
        family: Family::Subgroup(s),
    }
}

/// `ψ_ε(θ) = θ + ε sin θ`, a diffeomorphism of the circle for `|ε| < 1`.
pub fn isotopy(eps: f64, theta: f64) -> f64 {
    theta + eps * theta.sin()
}

/// `ψ_ε⁻¹` by Newton iteration.
pub fn isotopy_inverse(eps: f64, phi: f64) -> f64 {
    let mut th = phi;
    for _ in 0..60 {
        let step = (isotopy(eps, th) - phi) / (1.0 + eps * th.cos());
        th -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    th
}

/// `ι_ε = I_{exp(ε êx)} ∘ ι ∘ ψ_ε` on `(S¹, m_ε)` with `m_ε` the pullback of
/// the rotation law by `ψ_ε`. The correcting flow is `F_ε = ψ_ε⁻¹`.
pub fn isotopy_family() -> SubgroupDeformation {
    let t = GroupDescriptor::torus(1);
    let so3 = GroupDescriptor::so3();
    let ex = AlgebraVector::basis(0, &so3);
    let ez = AlgebraVector::basis(2, &so3);
    let tilt = conjugated_family(&t, ex.clone(), z_rotation(), (-1.0, 1.0));
    let (t1, t2) = (tilt.clone(), tilt);
    let mult = |e: f64, a: &GroupElement, b: &GroupElement| {
        circle_element(isotopy_inverse(e, isotopy(e, angle(a)) + isotopy(e, angle(b))))
    };
    let haar: HaarSystemFn = Arc::new(|e: f64, q: &HaarQuadrature| {
        q.pushforward(|h| circle_element(isotopy_inverse(e, angle(h))))
    });
    SubgroupDeformation::new(&t, &so3, (-0.9, 0.9), move |e, h| {
        t1.evaluate(e, &circle_element(isotopy(e, angle(h))))
    })
    .expect("domain contains 0")
    .with_derivative(move |e, h| {
        let th = angle(h);
        let moved = circle_element(isotopy(e, th));
        let v = t2.evaluate(e, &moved);
        let g = ex.scaled(e).exp();
        let ginv = ex.scaled(-e).exp();
        commutator(ex.matrix(), v.matrix())
            + g.matrix() * ez.matrix() * ginv.matrix() * v.matrix() * Complex64::new(th.sin(), 0.0)
    })
    .with_multiplication(mult, Some(haar))
}

fn so2_isotopy_in_so3() -> Scenario {
    Scenario {
        id: "so2_isotopy_in_so3",
        kind: ScenarioKind::Subgroup,
        expected: Verdict::TriviallyCertified,
        exercises: "the correction flow handles a varying multiplication and its Haar system",
        defaults: PipelineConfig {
            quadrature_resolution: 64,
            ..PipelineConfig::default()
        },
        family: Family::Subgroup(isotopy_family()),
    }
}

/// `ι_ε(t) = I_{exp(εE₁₂)}(exp(e^{−ε} t E₀₁))`: a tilted and rescaled line.
pub fn heisenberg_tilt_family() -> SubgroupDeformation {
    let r1 = GroupDescriptor::translation(1);
    let heis = GroupDescriptor::heisenberg3();
    let y = AlgebraVector::from_slice(&[0.0, 1.0, 0.0], &heis);
    let x = AlgebraVector::from_slice(&[1.0, 0.0, 0.0], &heis);
    let eval = {
        let (y, x) = (y.clone(), x.clone());
        move |e: f64, h: &GroupElement| {
            let line = x.scaled((-e).exp() * line_param(h)).exp();
            GroupElement::new_unchecked(
                y.scaled(e).exp().matrix() * line.matrix() * y.scaled(-e).exp().matrix(),
                y.descriptor(),
            )
        }
    };
    let e2 = eval.clone();
    SubgroupDeformation::new(&r1, &heis, (-1.0, 1.0), eval)
        .expect("domain contains 0")
        .with_derivative(move |e, h| {
            let v = e2(e, h);
            let s_dot = -(-e).exp() * line_param(h);
            let g = y.scaled(e).exp();
            let ginv = y.scaled(-e).exp();
            commutator(y.matrix(), v.matrix())
                + g.matrix() * x.matrix() * ginv.matrix() * v.matrix() * Complex64::new(s_dot, 0.0)
        })
}

fn heisenberg_line_tilt() -> Scenario {
    Scenario {
        id: "heisenberg_line_tilt",
        kind: ScenarioKind::Subgroup,
        expected: Verdict::TriviallyCertified,
        exercises: "a non-compact subgroup deformation that is inner up to reparametrization",
        defaults: PipelineConfig::default(),
        family: Family::Subgroup(heisenberg_tilt_family()),
    }
}
