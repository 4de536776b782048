//! Deformations of embedded subgroups `ι_ε: (H, m_ε) → G`.
//!
//! Only the normal part of the deformation cocycle matters: `X̄_λ` is `X_λ`
//! projected onto the orthogonal complement of `h_λ = dι_λ(h)`. Once `X̄`
//! is transgressed by `u`, the tangential remainder defines a correction
//! field `Y` on `H` whose flow `F_ε` reparametrizes the family so that
//! `ι_ε ∘ F_ε` is an honest deformation of homomorphisms transgressed by
//! the same `u`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::cohomology::{cocycle_defect, Cochain, GroupLaw, HomFn, Representation};
use crate::error::{LabError, Result};
use crate::flow::integrate;
use crate::homo::{
    close_certificate, least_squares_coords, mark_diverged, open_certificate, pipeline_samples,
    Differentiator, FamilyDerivFn, FamilyFn, PipelineConfig, Transgression, TransgressionMethod,
    TransgressionPath, TrivialityCertificate, Verdict,
};
use crate::lie::linalg::{c, frobenius_inner, frobenius_norm};
use crate::lie::{
    haar_quadrature, AlgebraVector, GroupDescriptor, GroupElement, HaarQuadrature, Mat, Splitting,
};

/// `(ε, h₁, h₂) ↦ m_ε(h₁, h₂)`.
pub type MultFn = Arc<dyn Fn(f64, &GroupElement, &GroupElement) -> GroupElement + Send + Sync>;
/// Maps the fixed Haar quadrature of `(H, m₀)` to one for `(H, m_ε)`.
pub type HaarSystemFn = Arc<dyn Fn(f64, &HaarQuadrature) -> HaarQuadrature + Send + Sync>;

/// Step of the fourth-order stencils taken along one-parameter subgroups.
const TANGENT_STEP: f64 = 1e-3;

fn stencil(f: impl Fn(f64) -> Mat) -> Mat {
    let s = TANGENT_STEP;
    (f(-2.0 * s) - f(-s) * c(8.0) + f(s) * c(8.0) - f(2.0 * s)) * c(1.0 / (12.0 * s))
}

#[derive(Clone)]
pub struct SubgroupDeformation {
    inner: Arc<GroupDescriptor>,
    target: Arc<GroupDescriptor>,
    iota: FamilyFn,
    mult: Option<MultFn>,
    d_eps_iota: Option<FamilyDerivFn>,
    haar_system: Option<HaarSystemFn>,
    eps_domain: (f64, f64),
}

impl fmt::Debug for SubgroupDeformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgroupDeformation")
            .field("inner", &self.inner.name())
            .field("target", &self.target.name())
            .field("varying_mult", &self.mult.is_some())
            .field("analytic", &self.d_eps_iota.is_some())
            .field("eps_domain", &self.eps_domain)
            .finish()
    }
}

impl SubgroupDeformation {
    pub fn new(
        inner: &Arc<GroupDescriptor>,
        target: &Arc<GroupDescriptor>,
        eps_domain: (f64, f64),
        iota: impl Fn(f64, &GroupElement) -> GroupElement + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(eps_domain.0 <= 0.0 && 0.0 <= eps_domain.1 && eps_domain.0 < eps_domain.1) {
            return Err(LabError::InvalidDeformation(format!(
                "eps domain [{}, {}] must contain 0",
                eps_domain.0, eps_domain.1
            )));
        }
        Ok(SubgroupDeformation {
            inner: Arc::clone(inner),
            target: Arc::clone(target),
            iota: Arc::new(iota),
            mult: None,
            d_eps_iota: None,
            haar_system: None,
            eps_domain,
        })
    }

    pub fn with_derivative(
        mut self,
        d: impl Fn(f64, &GroupElement) -> Mat + Send + Sync + 'static,
    ) -> Self {
        self.d_eps_iota = Some(Arc::new(d));
        self
    }

    pub fn without_derivative(mut self) -> Self {
        self.d_eps_iota = None;
        self
    }

    /// Replaces the constant multiplication by `m_ε`. `haar_system` supplies
    /// the normalized Haar measure of `(H, m_ε)` for compact `H`.
    pub fn with_multiplication(
        mut self,
        mult: impl Fn(f64, &GroupElement, &GroupElement) -> GroupElement + Send + Sync + 'static,
        haar_system: Option<HaarSystemFn>,
    ) -> Self {
        self.mult = Some(Arc::new(mult));
        self.haar_system = haar_system;
        self
    }

    pub fn inner(&self) -> &Arc<GroupDescriptor> {
        &self.inner
    }

    pub fn target(&self) -> &Arc<GroupDescriptor> {
        &self.target
    }

    pub fn eps_domain(&self) -> (f64, f64) {
        self.eps_domain
    }

    pub fn has_derivative(&self) -> bool {
        self.d_eps_iota.is_some()
    }

    pub fn has_varying_multiplication(&self) -> bool {
        self.mult.is_some()
    }

    pub fn evaluate(&self, eps: f64, h: &GroupElement) -> GroupElement {
        (self.iota)(eps, h)
    }

    pub fn iota_at(&self, eps: f64) -> HomFn {
        let f = Arc::clone(&self.iota);
        Arc::new(move |h| f(eps, h))
    }

    pub fn multiply(&self, eps: f64, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match &self.mult {
            Some(m) => m(eps, a, b),
            None => GroupElement::new_unchecked(a.matrix() * b.matrix(), &self.inner),
        }
    }

    /// `m_ε` as a group law for representations on `H`.
    pub fn law(&self, eps: f64) -> Option<GroupLaw> {
        self.mult.as_ref().map(|m| {
            let m = Arc::clone(m);
            Arc::new(move |a: &GroupElement, b: &GroupElement| m(eps, a, b)) as GroupLaw
        })
    }

    /// The Haar quadrature of `(H, m_ε)` derived from that of `(H, m₀)`.
    pub fn haar_at(&self, eps: f64, base: &HaarQuadrature) -> HaarQuadrature {
        match &self.haar_system {
            Some(f) => f(eps, base),
            None => base.clone(),
        }
    }

    pub fn derivative(&self, lambda: f64, h: &GroupElement, diff: &Differentiator) -> Mat {
        match &self.d_eps_iota {
            Some(d) => d(lambda, h),
            None => diff.derivative(self.eps_domain, lambda, |e| (self.iota)(e, h).into_matrix()),
        }
    }

    /// Max of the homomorphism defect of `ι_ε` on `(H, m_ε)`, the
    /// associativity defect of `m_ε` and the identity defects.
    pub fn structure_defect(&self, eps: f64, pairs: &[Vec<GroupElement>]) -> f64 {
        let id_h = GroupElement::identity(&self.inner);
        let id_g = GroupElement::identity(&self.target);
        let dist = |a: &GroupElement, b: &GroupElement| frobenius_norm(&(a.matrix() - b.matrix()));
        let mut worst = dist(&self.evaluate(eps, &id_h), &id_g);
        for (i, p) in pairs.iter().enumerate() {
            let (a, b) = (&p[0], &p[1]);
            let ab = self.multiply(eps, a, b);
            let lhs = self.evaluate(eps, &ab);
            let rhs = self.evaluate(eps, a).compose(&self.evaluate(eps, b));
            worst = worst.max(dist(&lhs, &rhs));
            worst = worst.max(dist(&self.multiply(eps, &id_h, a), a));
            let c3 = &pairs[(i + 1) % pairs.len()][0];
            let l = self.multiply(eps, &ab, c3);
            let r = self.multiply(eps, a, &self.multiply(eps, b, c3));
            worst = worst.max(dist(&l, &r));
        }
        worst
    }

    /// Tangent to `t ↦ m_ε(exp(tY), h)` at `t = 0`, i.e. `dR^ε_h(Y)`.
    pub fn right_translate(&self, eps: f64, h: &GroupElement, y: &DVector<f64>) -> Mat {
        let ymat = self.inner.matrix_from_coords(y);
        match &self.mult {
            None => &ymat * h.matrix(),
            Some(m) => {
                let norm = y.norm();
                if norm == 0.0 {
                    let n = self.inner.ambient_dim();
                    return Mat::zeros(n, n);
                }
                let unit = AlgebraVector::from_matrix(&ymat * c(1.0 / norm), &self.inner)
                    .expect("coordinates define an algebra element");
                stencil(|t| m(eps, &unit.scaled(t).exp(), h).into_matrix()) * c(norm)
            }
        }
    }
}

/// The splitting `g = h_λ ⊕ h_λ^⊥` together with `dι_λ`.
#[derive(Clone, Debug)]
pub struct QuotientFrame {
    pub eps: f64,
    pub splitting: Arc<Splitting>,
    /// `dι_λ(eᵢ)` as matrices in `g`.
    pub tangents: Vec<Mat>,
    /// `dι_λ` in coordinates, `dim g × dim h`.
    pub differential: DMatrix<f64>,
    /// `S_{ji} = ⟨sub_j, dι_λ(eᵢ)⟩`.
    pub sub_matrix: DMatrix<f64>,
    pub condition_number: f64,
}

impl QuotientFrame {
    pub fn project(&self, m: &Mat) -> DVector<f64> {
        self.splitting.project(m)
    }

    /// `y` with `dι_λ(y)` equal to the `h_λ`-component of `m`.
    pub fn tangential_preimage(&self, m: &Mat) -> Result<DVector<f64>> {
        let w = DVector::from_iterator(
            self.tangents.len(),
            self.splitting.sub_basis().iter().map(|q| frobenius_inner(q, m)),
        );
        self.sub_matrix
            .clone()
            .lu()
            .solve(&w)
            .ok_or(LabError::Singular)
    }
}

/// Computes `h_λ` from `dι_λ` and its orthogonal complement. With `prev`,
/// basis signs are chosen to agree with the previous frame.
pub fn subalgebra_basis(
    s: &SubgroupDeformation,
    lambda: f64,
    prev: Option<&QuotientFrame>,
) -> Result<QuotientFrame> {
    let k = s.inner.dim();
    let mut tangents = Vec::with_capacity(k);
    let mut differential = DMatrix::zeros(s.target.dim(), k);
    for i in 0..k {
        let e = AlgebraVector::basis(i, &s.inner);
        let d = stencil(|t| s.evaluate(lambda, &e.scaled(t).exp()).into_matrix());
        let v = AlgebraVector::from_matrix(d, &s.target)
            .map_err(|err| LabError::InvalidEmbedding(format!("dι(e{i}) is not in g: {err}")))?;
        differential.set_column(i, v.coords());
        tangents.push(v.matrix().clone());
    }
    let mut splitting = Splitting::from_span(&s.target, &tangents, 1e-8)?;
    if let Some(p) = prev {
        splitting.align_with(&p.splitting);
    }
    let sub_matrix = DMatrix::from_fn(k, k, |j, i| {
        frobenius_inner(&splitting.sub_basis()[j], &tangents[i])
    });
    let sv = sub_matrix.clone().svd(false, false).singular_values;
    let condition_number = sv.max() / sv.min();
    Ok(QuotientFrame {
        eps: lambda,
        splitting: Arc::new(splitting),
        tangents,
        differential,
        sub_matrix,
        condition_number,
    })
}

/// The full cocycle `X_λ(h) = ∂_ε ι_ε(h)·ι_λ(h)⁻¹` in `g`, valued in
/// `Ad ∘ ι_λ` with the group law `m_λ`.
pub fn full_cocycle(s: &SubgroupDeformation, lambda: f64, diff: &Differentiator) -> Cochain {
    let mut rep = Representation::pullback_adjoint(&s.inner, &s.target, s.iota_at(lambda));
    if let Some(law) = s.law(lambda) {
        rep = rep.with_law(law);
    }
    let (s, diff) = (s.clone(), *diff);
    Cochain::new(1, rep, move |h| {
        let p = s.evaluate(lambda, &h[0]);
        let v = s.derivative(lambda, &h[0], &diff);
        Ok(p.right_translate_to_identity(&v)?.coords().clone())
    })
}

/// `X̄_λ`, valued in `g/h_λ` realized on the complement.
pub fn subgroup_cocycle(
    s: &SubgroupDeformation,
    lambda: f64,
    diff: &Differentiator,
    frame: &QuotientFrame,
) -> Cochain {
    let mut rep =
        Representation::pullback_quotient(&s.inner, s.iota_at(lambda), Arc::clone(&frame.splitting));
    if let Some(law) = s.law(lambda) {
        rep = rep.with_law(law);
    }
    let full = full_cocycle(s, lambda, diff);
    let split = Arc::clone(&frame.splitting);
    let target = Arc::clone(&s.target);
    Cochain::new(1, rep, move |h| {
        let x = full.evaluate(h)?;
        Ok(split.project(&target.matrix_from_coords(&x)))
    })
}

pub fn verify_subgroup_cocycle(
    s: &SubgroupDeformation,
    lambda: f64,
    diff: &Differentiator,
    pairs: &[Vec<GroupElement>],
) -> Result<f64> {
    let frame = subalgebra_basis(s, lambda, None)?;
    cocycle_defect(&subgroup_cocycle(s, lambda, diff, &frame), pairs)
}

/// `max_h ‖X̄(h) − δ̄(ū)(h)‖` for `u ∈ g`.
pub fn quotient_residual(
    s: &SubgroupDeformation,
    lambda: f64,
    diff: &Differentiator,
    frame: &QuotientFrame,
    u: &AlgebraVector,
    samples: &[GroupElement],
) -> Result<f64> {
    let xbar = subgroup_cocycle(s, lambda, diff, frame);
    let ubar = frame.project(u.matrix());
    crate::homo::transgression_residual(&xbar, &ubar, samples)
}

/// `u = −∫ X_λ dh` over the Haar measure of `(H, m_λ)`, with the quotient
/// residual on `samples`.
pub fn transgress_subgroup_haar(
    s: &SubgroupDeformation,
    lambda: f64,
    diff: &Differentiator,
    frame: &QuotientFrame,
    base: &HaarQuadrature,
    samples: &[GroupElement],
) -> Result<Transgression> {
    if !s.inner.is_compact() {
        return Err(LabError::Unsupported(format!(
            "Haar transgression needs a compact subgroup, got {}",
            s.inner.name()
        )));
    }
    let q = s.haar_at(lambda, base);
    let x = full_cocycle(s, lambda, diff);
    let u = -q.integrate_vector(s.target.dim(), |h| x.evaluate(std::slice::from_ref(h)))?;
    let u = AlgebraVector::from_coords(u, &s.target);
    let residual = quotient_residual(s, lambda, diff, frame, &u, samples)?;
    Ok(Transgression {
        u,
        residual,
        rank_deficient: false,
    })
}

/// Least squares in complement coordinates; the solution is lifted into
/// the complement of `h_λ`.
pub fn transgress_subgroup_least_squares(
    s: &SubgroupDeformation,
    lambda: f64,
    diff: &Differentiator,
    frame: &QuotientFrame,
    samples: &[GroupElement],
) -> Result<Transgression> {
    let xbar = subgroup_cocycle(s, lambda, diff, frame);
    let (ubar, residual, rank_deficient) = least_squares_coords(&xbar, samples)?;
    let u = AlgebraVector::from_matrix(frame.splitting.lift(&ubar), &s.target)?;
    Ok(Transgression {
        u,
        residual,
        rank_deficient,
    })
}

/// `Y_λ(h)` in the inner algebra, and the complement norm of
/// `X_λ(h) − Ad_{ι_λ(h)}u + u`.
#[derive(Clone, Debug)]
pub struct CorrectionField {
    pub y: DVector<f64>,
    pub complement_residual: f64,
}

/// Solves `X_λ(h) − Ad_{ι_λ(h)}u + u = −dι_λ(Y_λ(h))`.
pub fn correction_field(
    s: &SubgroupDeformation,
    lambda: f64,
    diff: &Differentiator,
    frame: &QuotientFrame,
    u: &AlgebraVector,
    h: &GroupElement,
    tol: f64,
) -> Result<CorrectionField> {
    let p = s.evaluate(lambda, h);
    let x = p.right_translate_to_identity(&s.derivative(lambda, h, diff))?;
    let w = x.matrix() - p.adjoint(u)?.matrix() + u.matrix();
    let complement_residual = frame.project(&w).norm();
    if !(complement_residual <= tol) {
        return Err(LabError::InconsistentTransgression {
            residual: complement_residual,
        });
    }
    let y = -frame.tangential_preimage(&w)?;
    Ok(CorrectionField {
        y,
        complement_residual,
    })
}

/// The integral curve `F_ε(h₀)` of `ḣ = dR^ε_h(Y_ε(h))` on `grid`, with `u`
/// interpolated from `path`. The complement residual is only held to `tol`
/// on grid nodes; midpoint stages carry interpolation error in `u`.
pub fn correction_flow(
    s: &SubgroupDeformation,
    diff: &Differentiator,
    path: &TransgressionPath,
    h0: &GroupElement,
    grid: &[f64],
    tol: f64,
) -> Result<Vec<GroupElement>> {
    integrate(h0, grid, |eps, h| {
        let frame = subalgebra_basis(s, eps, None)?;
        let stage_tol = if grid.contains(&eps) { tol } else { f64::INFINITY };
        let cf = correction_field(s, eps, diff, &frame, &path.value_at(eps), h, stage_tol)?;
        Ok(s.right_translate(eps, h, &cf.y))
    })
}

/// `max ‖F(h₁h₂) − m_ε(F(h₁), F(h₂))‖_F` over `pairs`, `F` a map on `H`.
pub fn flow_isomorphism_defect(
    s: &SubgroupDeformation,
    eps: f64,
    flow: impl Fn(&GroupElement) -> Result<GroupElement>,
    pairs: &[Vec<GroupElement>],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in pairs {
        let lhs = flow(&s.multiply(0.0, &p[0], &p[1]))?;
        let rhs = s.multiply(eps, &flow(&p[0])?, &flow(&p[1])?);
        worst = worst.max(frobenius_norm(&(lhs.matrix() - rhs.matrix())));
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct SubgroupCertificate {
    pub certificate: TrivialityCertificate,
    /// Per-ε condition number of `dι_ε` onto `h_ε`.
    pub condition_numbers: Vec<f64>,
    /// Per-ε max complement residual of the correction field at the
    /// flowed sample points (NaN where not computed).
    pub complement_residual: Vec<f64>,
    pub sample_points: Vec<GroupElement>,
    /// `h_flow[k][i] = F_{ε_i}(sample_points[k])`; empty unless the H-flow ran.
    pub h_flow: Vec<Vec<GroupElement>>,
}

impl SubgroupCertificate {
    pub fn verdict(&self) -> Verdict {
        self.certificate.verdict
    }
}

pub fn certify_subgroup_trivial(
    s: &SubgroupDeformation,
    cfg: &PipelineConfig,
) -> Result<SubgroupCertificate> {
    cfg.validate()?;
    let grid = cfg.eps_grid();
    let n = grid.len();
    if grid[n - 1] > s.eps_domain.1 {
        return Err(LabError::InvalidConfig(format!(
            "eps_max {} outside the deformation domain [{}, {}]",
            cfg.eps_max, s.eps_domain.0, s.eps_domain.1
        )));
    }
    let tol = cfg.tolerances;
    let diff = cfg.differentiator;
    let (points, pairs) = pipeline_samples(&s.inner, cfg);

    let structure = grid
        .iter()
        .map(|&e| s.structure_defect(e, &pairs))
        .fold(0.0, f64::max);
    if !(structure <= tol.hom_tol) {
        return Err(LabError::InvalidDeformation(format!(
            "embedding family is not a homomorphism: defect {structure:e} > {:e}",
            tol.hom_tol
        )));
    }

    let quadrature = if s.inner.is_compact() {
        Some(haar_quadrature(&s.inner, cfg.quadrature_resolution)?)
    } else {
        None
    };
    let mut frames: Vec<QuotientFrame> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut cocycle = Vec::with_capacity(n);
    for &eps in &grid {
        let frame = subalgebra_basis(s, eps, frames.last())?;
        cocycle.push(cocycle_defect(&subgroup_cocycle(s, eps, &diff, &frame), &pairs)?);
        let t = match &quadrature {
            Some(q) => transgress_subgroup_haar(s, eps, &diff, &frame, q, &points)?,
            None => transgress_subgroup_least_squares(s, eps, &diff, &frame, &points)?,
        };
        values.push(t.u);
        residuals.push(t.residual);
        frames.push(frame);
    }
    let method = if quadrature.is_some() {
        TransgressionMethod::Haar
    } else {
        TransgressionMethod::LeastSquares
    };
    let transgression = TransgressionPath::new(grid.clone(), values, method, residuals)?;
    let mut out = SubgroupCertificate {
        certificate: open_certificate(grid.clone(), transgression, cocycle, structure, tol),
        condition_numbers: frames.iter().map(|f| f.condition_number).collect(),
        complement_residual: vec![f64::NAN; n],
        sample_points: points.clone(),
        h_flow: Vec::new(),
    };
    if out.certificate.certified_prefix < n {
        return Ok(out);
    }

    let mut h_flow = Vec::with_capacity(points.len());
    for h in &points {
        match correction_flow(s, &diff, &out.certificate.transgression, h, &grid, tol.transgression_tol) {
            Ok(path) => h_flow.push(path),
            Err(LabError::FlowDiverged { eps }) => {
                mark_diverged(&mut out.certificate, eps);
                return Ok(out);
            }
            Err(e) => return Err(e),
        }
    }
    for (i, frame) in frames.iter().enumerate() {
        let u = &out.certificate.transgression.values[i];
        let mut worst: f64 = 0.0;
        for path in &h_flow {
            let cf = correction_field(s, grid[i], &diff, frame, u, &path[i], tol.transgression_tol)?;
            worst = worst.max(cf.complement_residual);
        }
        out.complement_residual[i] = worst;
    }
    let base: Vec<GroupElement> = points.iter().map(|h| s.evaluate(0.0, h)).collect();
    close_certificate(
        &mut out.certificate,
        |i, k| s.evaluate(grid[i], &h_flow[k][i]),
        &base,
    )?;
    out.h_flow = h_flow;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::linalg::from_real;
    use crate::lie::sampling::{random_tuples, seeded};

    fn block(h: &GroupElement, so3: &Arc<GroupDescriptor>) -> GroupElement {
        let r = h.matrix();
        let mut m = Mat::identity(3, 3);
        m.view_mut((0, 0), (2, 2)).copy_from(r);
        GroupElement::new_unchecked(m, so3)
    }

    fn tilt() -> SubgroupDeformation {
        let t = GroupDescriptor::torus(1);
        let so3 = GroupDescriptor::so3();
        let ex = AlgebraVector::basis(0, &so3);
        let (g3, ex2) = (Arc::clone(&so3), ex.clone());
        SubgroupDeformation::new(&t, &so3, (-1.0, 1.0), move |e, h| {
            let g = ex.scaled(e).exp();
            g.compose(&block(h, &g3)).compose(&g.inverse().unwrap())
        })
        .unwrap()
        .with_derivative(move |e, h| {
            let g = ex2.scaled(e).exp();
            let v = g.compose(&block(h, &so3)).compose(&g.inverse().unwrap());
            ex2.matrix() * v.matrix() - v.matrix() * ex2.matrix()
        })
    }

    fn rotating_line() -> SubgroupDeformation {
        let r1 = GroupDescriptor::translation(1);
        let r2 = GroupDescriptor::translation(2);
        let r2c = Arc::clone(&r2);
        SubgroupDeformation::new(&r1, &r2, (-1.0, 1.0), move |e, h| {
            let t = h.matrix()[(0, 1)].re;
            let m = from_real(3, 3, &[1., 0., t * e.cos(), 0., 1., t * e.sin(), 0., 0., 1.]);
            GroupElement::new_unchecked(m, &r2c)
        })
        .unwrap()
    }

    #[test]
    fn z_axis_frame() {
        let frame = subalgebra_basis(&tilt(), 0.0, None).unwrap();
        let ez = GroupDescriptor::so3().algebra_basis()[2].clone();
        assert!(frame.project(&ez).norm() < 1e-12);
        assert!((frame.differential[(2, 0)] - 1.0).abs() < 1e-10);
        assert!((frame.condition_number - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_at_angle_frame() {
        let a = 0.7_f64;
        let frame = subalgebra_basis(&rotating_line(), a, None).unwrap();
        let col = frame.differential.column(0);
        assert!((col[0] - a.cos()).abs() < 1e-10 && (col[1] - a.sin()).abs() < 1e-10);
    }

    #[test]
    fn rotating_line_normal_component() {
        let s = rotating_line();
        let diff = Differentiator::default();
        let frame = subalgebra_basis(&s, 0.3, None).unwrap();
        let x = subgroup_cocycle(&s, 0.3, &diff, &frame);
        let h = AlgebraVector::from_slice(&[0.8], s.inner()).exp();
        assert!((x.evaluate(&[h]).unwrap()[0].abs() - 0.8).abs() < 1e-9);
    }

    #[test]
    fn tilt_pipeline_certifies() {
        let s = tilt();
        let cfg = PipelineConfig {
            quadrature_resolution: 64,
            ..PipelineConfig::default()
        };
        let cert = certify_subgroup_trivial(&s, &cfg).unwrap();
        assert_eq!(cert.verdict(), Verdict::TriviallyCertified);
        assert!(cert.certificate.max_conjugation_error() <= 1e-4);
        assert!(cert.certificate.transgression.max_residual() <= 1e-7);
    }

    #[test]
    fn rotating_line_is_not_transgressible() {
        let cert = certify_subgroup_trivial(&rotating_line(), &PipelineConfig::default()).unwrap();
        assert_eq!(cert.verdict(), Verdict::NotTransgressible);
        assert!(cert.certificate.transgression.residuals.iter().all(|r| *r >= 0.5));
        assert!(cert.certificate.conjugation_error.iter().all(|e| e.is_nan()));
    }

    #[test]
    fn tilt_quotient_cocycle() {
        let s = tilt();
        let mut rng = seeded(3);
        let pairs = random_tuples(s.inner(), &mut rng, 2, 20, 1.0);
        let fd = s.clone().without_derivative();
        assert!(verify_subgroup_cocycle(&s, 0.2, &Differentiator::default(), &pairs).unwrap() <= 1e-8);
        assert!(verify_subgroup_cocycle(&fd, 0.2, &Differentiator::default(), &pairs).unwrap() <= 1e-5);
    }
}
