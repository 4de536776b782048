//! Differentiable group cochains `C^k(G, V)` and the coboundary
//!
//! ```text
//! δc(g₁,…,g_{k+1}) = ρ(g₁)c(g₂,…,g_{k+1})
//!                  + Σᵢ (−1)ⁱ c(g₁,…,gᵢg_{i+1},…,g_{k+1})
//!                  + (−1)^{k+1} c(g₁,…,g_k)
//! ```
//!
//! Cochains are evaluators, not tables; cocycle tests are max-defect
//! estimates over sample tuples.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{LabError, Result};
use crate::lie::sampling::SampleRng;
use crate::lie::{AlgebraVector, GroupDescriptor, GroupElement, Splitting};

/// A homomorphism `H → G` given as an evaluator.
pub type HomFn = Arc<dyn Fn(&GroupElement) -> GroupElement + Send + Sync>;
/// A group law on the acting group (defaults to the matrix product).
pub type GroupLaw = Arc<dyn Fn(&GroupElement, &GroupElement) -> GroupElement + Send + Sync>;
type ActionFn = Arc<dyn Fn(&GroupElement, &DVector<f64>) -> Result<DVector<f64>> + Send + Sync>;
type EvalFn = Arc<dyn Fn(&[GroupElement]) -> Result<DVector<f64>> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepKind {
    Adjoint,
    PullbackAdjoint,
    QuotientAdjoint,
    PullbackQuotient,
}

#[derive(Clone)]
pub struct Representation {
    group: Arc<GroupDescriptor>,
    algebra: Arc<GroupDescriptor>,
    basis_labels: Vec<String>,
    kind: RepKind,
    action: ActionFn,
    law: Option<GroupLaw>,
    hom: Option<HomFn>,
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Representation")
            .field("group", &self.group.name())
            .field("algebra", &self.algebra.name())
            .field("kind", &self.kind)
            .field("space_dim", &self.space_dim())
            .finish()
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl Representation {
    /// `Ad: G → GL(g)`.
    pub fn adjoint(group: &Arc<GroupDescriptor>) -> Self {
        let g = Arc::clone(group);
        Representation {
            group: Arc::clone(group),
            algebra: Arc::clone(group),
            basis_labels: labels("e", group.dim()),
            kind: RepKind::Adjoint,
            action: Arc::new(move |x, v| {
                Ok(x.adjoint(&AlgebraVector::from_coords(v.clone(), &g))?
                    .coords()
                    .clone())
            }),
            law: None,
            hom: None,
        }
    }

    /// `Ad ∘ φ: H → GL(g)`.
    pub fn pullback_adjoint(
        source: &Arc<GroupDescriptor>,
        target: &Arc<GroupDescriptor>,
        hom: HomFn,
    ) -> Self {
        let g = Arc::clone(target);
        let phi = Arc::clone(&hom);
        Representation {
            group: Arc::clone(source),
            algebra: Arc::clone(target),
            basis_labels: labels("e", target.dim()),
            kind: RepKind::PullbackAdjoint,
            action: Arc::new(move |h, v| {
                Ok(phi(h)
                    .adjoint(&AlgebraVector::from_coords(v.clone(), &g))?
                    .coords()
                    .clone())
            }),
            law: None,
            hom: Some(hom),
        }
    }

    /// The action of a subgroup `H ⊂ G` on `g/h`, realized on the
    /// orthogonal complement of `h`. Elements of `H` are `G`-matrices, so the
    /// acting descriptor is `G`; only samples from `H` are meaningful.
    pub fn quotient_adjoint(splitting: Arc<Splitting>) -> Self {
        let g = Arc::clone(splitting.descriptor());
        let s = Arc::clone(&splitting);
        Representation {
            group: Arc::clone(&g),
            algebra: Arc::clone(&g),
            basis_labels: labels("q", splitting.comp_dim()),
            kind: RepKind::QuotientAdjoint,
            action: Arc::new(move |h, v| {
                let lifted = AlgebraVector::from_matrix(s.lift(v), &g)?;
                Ok(s.project(h.adjoint(&lifted)?.matrix()))
            }),
            law: None,
            hom: None,
        }
    }

    /// `H` acting on `g/h̃` through `Ad ∘ φ`, where `h̃` is the algebra of
    /// `φ(H)`.
    pub fn pullback_quotient(
        source: &Arc<GroupDescriptor>,
        hom: HomFn,
        splitting: Arc<Splitting>,
    ) -> Self {
        let g = Arc::clone(splitting.descriptor());
        let s = Arc::clone(&splitting);
        let phi = Arc::clone(&hom);
        Representation {
            group: Arc::clone(source),
            algebra: Arc::clone(&g),
            basis_labels: labels("q", splitting.comp_dim()),
            kind: RepKind::PullbackQuotient,
            action: Arc::new(move |h, v| {
                let lifted = AlgebraVector::from_matrix(s.lift(v), &g)?;
                Ok(s.project(phi(h).adjoint(&lifted)?.matrix()))
            }),
            law: None,
            hom: Some(hom),
        }
    }

    /// Replaces the matrix product on the acting group by `law`.
    pub fn with_law(mut self, law: GroupLaw) -> Self {
        self.law = Some(law);
        self
    }

    pub fn group(&self) -> &Arc<GroupDescriptor> {
        &self.group
    }

    /// The group whose Lie algebra carries the representation space.
    pub fn algebra(&self) -> &Arc<GroupDescriptor> {
        &self.algebra
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn space_dim(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn hom(&self) -> Option<&HomFn> {
        self.hom.as_ref()
    }

    pub fn apply(&self, g: &GroupElement, v: &DVector<f64>) -> Result<DVector<f64>> {
        (self.action)(g, v)
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match &self.law {
            Some(law) => law(a, b),
            None => GroupElement::new_unchecked(a.matrix() * b.matrix(), &self.group),
        }
    }

    /// Matrix of `v ↦ ρ(g)v − v` in the space basis.
    pub fn coboundary_matrix(&self, g: &GroupElement) -> Result<DMatrix<f64>> {
        let n = self.space_dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            let col = self.apply(g, &e)? - &e;
            m.set_column(j, &col);
        }
        Ok(m)
    }

    /// Largest violation of `ρ(1)v = v` and `ρ(gh)v = ρ(g)ρ(h)v` over the
    /// supplied pairs and vectors.
    pub fn axiom_defect(
        &self,
        pairs: &[(GroupElement, GroupElement)],
        vectors: &[DVector<f64>],
    ) -> Result<f64> {
        let id = GroupElement::identity(&self.group);
        let mut worst: f64 = 0.0;
        for (i, (g, h)) in pairs.iter().enumerate() {
            let v = &vectors[i % vectors.len()];
            worst = worst.max((self.apply(&id, v)? - v).norm());
            let gh = self.multiply(g, h);
            let lhs = self.apply(&gh, v)?;
            let rhs = self.apply(g, &self.apply(h, v)?)?;
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    }
}

/// A degree-`k` cochain `G^k → V`.
#[derive(Clone)]
pub struct Cochain {
    degree: usize,
    rep: Representation,
    eval: EvalFn,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cochain")
            .field("degree", &self.degree)
            .field("rep", &self.rep)
            .finish()
    }
}

impl Cochain {
    pub fn new(
        degree: usize,
        rep: Representation,
        eval: impl Fn(&[GroupElement]) -> Result<DVector<f64>> + Send + Sync + 'static,
    ) -> Self {
        Cochain {
            degree,
            rep,
            eval: Arc::new(eval),
        }
    }

    /// The 0-cochain with value `v`.
    pub fn constant(rep: Representation, v: DVector<f64>) -> Self {
        Cochain::new(0, rep, move |_| Ok(v.clone()))
    }

    pub fn zero(degree: usize, rep: Representation) -> Self {
        let n = rep.space_dim();
        Cochain::new(degree, rep, move |_| Ok(DVector::zeros(n)))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn evaluate(&self, args: &[GroupElement]) -> Result<DVector<f64>> {
        if args.len() != self.degree {
            return Err(LabError::InvalidConfig(format!(
                "degree-{} cochain evaluated on {} arguments",
                self.degree,
                args.len()
            )));
        }
        (self.eval)(args)
    }

    /// Same values, different representation. Used when the caller knows
    /// the values are valued in a representation built elsewhere.
    pub fn with_rep(self, rep: Representation) -> Self {
        Cochain { rep, ..self }
    }

    /// `δ_ρ c`, evaluated lazily.
    pub fn coboundary(&self) -> Cochain {
        let k = self.degree;
        let inner = self.clone();
        let rep = self.rep.clone();
        Cochain::new(k + 1, self.rep.clone(), move |g| {
            let tail = &g[1..];
            let mut acc = rep.apply(&g[0], &inner.evaluate(tail)?)?;
            for i in 0..k {
                let mut args: Vec<GroupElement> = Vec::with_capacity(k);
                args.extend_from_slice(&g[..i]);
                args.push(rep.multiply(&g[i], &g[i + 1]));
                args.extend_from_slice(&g[i + 2..]);
                let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
                acc += inner.evaluate(&args)? * sign;
            }
            let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
            acc += inner.evaluate(&g[..k])? * sign;
            Ok(acc)
        })
    }

    /// `φ*c (h₁,…,h_k) = c(φ(h₁),…,φ(h_k))`, valued in `ρ ∘ φ`.
    pub fn pullback(&self, source: &Arc<GroupDescriptor>, hom: HomFn) -> Cochain {
        let base = self.rep.clone();
        let kind = match base.kind {
            RepKind::Adjoint | RepKind::PullbackAdjoint => RepKind::PullbackAdjoint,
            RepKind::QuotientAdjoint | RepKind::PullbackQuotient => RepKind::PullbackQuotient,
        };
        let composed: HomFn = match &base.hom {
            Some(inner) => {
                let (inner, outer) = (Arc::clone(inner), Arc::clone(&hom));
                Arc::new(move |h| inner(&outer(h)))
            }
            None => Arc::clone(&hom),
        };
        let phi = Arc::clone(&hom);
        let rep = Representation {
            group: Arc::clone(source),
            algebra: Arc::clone(&base.algebra),
            basis_labels: base.basis_labels.clone(),
            kind,
            action: Arc::new(move |h, v| base.apply(&phi(h), v)),
            law: None,
            hom: Some(composed),
        };
        let inner = self.clone();
        Cochain::new(self.degree, rep, move |h| {
            let mapped: Vec<GroupElement> = h.iter().map(|x| hom(x)).collect();
            inner.evaluate(&mapped)
        })
    }

    /// `g_*c = Ad_g ∘ c`, valued in the adjoint representation pulled back
    /// along `I_g ∘ φ`.
    pub fn pushforward(&self, g: &GroupElement) -> Result<Cochain> {
        let phi = match (self.rep.kind, &self.rep.hom) {
            (RepKind::PullbackAdjoint, Some(phi)) => Arc::clone(phi),
            _ => {
                return Err(LabError::InvalidConfig(
                    "pushforward needs a cochain valued in a pulled-back adjoint representation"
                        .into(),
                ))
            }
        };
        let target = Arc::clone(&self.rep.algebra);
        let g_inv = g.inverse()?;
        let (gc, gi) = (g.clone(), g_inv.clone());
        let conjugated: HomFn = Arc::new(move |h| gc.compose(&phi(h)).compose(&gi));
        let rep = Representation::pullback_adjoint(&self.rep.group, &target, conjugated);
        let inner = self.clone();
        let g = g.clone();
        Ok(Cochain::new(self.degree, rep, move |h| {
            let value = AlgebraVector::from_coords(inner.evaluate(h)?, &target);
            Ok(g.adjoint(&value)?.coords().clone())
        }))
    }
}

/// Max over `samples` of `‖δc(tuple)‖`. Each tuple has `degree + 1` entries.
pub fn cocycle_defect(c: &Cochain, samples: &[Vec<GroupElement>]) -> Result<f64> {
    let dc = c.coboundary();
    let mut worst: f64 = 0.0;
    for s in samples {
        worst = worst.max(dc.evaluate(s)?.norm());
    }
    Ok(worst)
}

/// A random degree-`k` cochain whose components are quadratic polynomials
/// in the real and imaginary parts of the entries of its arguments.
pub fn random_polynomial_cochain(rep: &Representation, degree: usize, rng: &mut SampleRng) -> Cochain {
    let dim = rep.space_dim();
    let n = rep.group().ambient_dim();
    let f = 2 * n * n * degree;
    let mut coeff = |rows, cols| DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
    let offset = coeff(dim, 1).column(0).into_owned();
    let lin = coeff(dim, f);
    let quad = coeff(dim, f);
    Cochain::new(degree, rep.clone(), move |args| {
        let x = DVector::from_iterator(
            f,
            args.iter()
                .flat_map(|g| g.matrix().iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>()),
        );
        Ok(&offset + &lin * &x + &quad * x.component_mul(&x))
    })
}

/// Max over `samples` of `‖a(tuple) − b(tuple)‖`.
pub fn cochain_distance(a: &Cochain, b: &Cochain, samples: &[Vec<GroupElement>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in samples {
        worst = worst.max((a.evaluate(s)? - b.evaluate(s)?).norm());
    }
    Ok(worst)
}
