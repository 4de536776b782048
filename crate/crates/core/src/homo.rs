//! Deformations of homomorphisms `φ_ε: H → G`.
//!
//! The pipeline is: deformation cocycle `X_λ(h) = ∂_ε φ_ε(h)·φ_λ(h)⁻¹`,
//! transgression `X_λ = δ_{φ_λ}(u_λ)` (Haar average when `H` is compact,
//! least squares otherwise), the Moser flow `ġ = −u·g` from the identity,
//! and finally the conjugation check `φ_ε ≈ I_{g_ε} ∘ φ₀`.
//!
//! Transgressions are always stored with `X = δ(u)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::cohomology::{cochain_distance, cocycle_defect, Cochain, HomFn, Representation};
use crate::error::{LabError, Result};
use crate::flow::{integrate, interpolate, linspace};
use crate::lie::linalg::{c, frobenius_norm, min_norm_solve};
use crate::lie::sampling::{random_elements, random_tuples, seeded, SampleRng};
use crate::lie::{
    haar_quadrature, AlgebraVector, GroupDescriptor, GroupElement, HaarQuadrature, Mat,
};

/// `(ε, h) ↦ φ_ε(h)`.
pub type FamilyFn = Arc<dyn Fn(f64, &GroupElement) -> GroupElement + Send + Sync>;
/// `(ε, h) ↦ ∂_ε φ_ε(h)` as an ambient matrix.
pub type FamilyDerivFn = Arc<dyn Fn(f64, &GroupElement) -> Mat + Send + Sync>;
/// `ε ↦ Z_ε`, a degree-1 cochain on `G`.
pub type CochainPath = Arc<dyn Fn(f64) -> Cochain + Send + Sync>;
/// `ε ↦ u_ε`.
pub type AlgebraPath = Arc<dyn Fn(f64) -> AlgebraVector + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub transgression_tol: f64,
    pub certificate_tol: f64,
    pub hom_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            transgression_tol: 1e-6,
            certificate_tol: 1e-4,
            hom_tol: 1e-8,
        }
    }
}

/// How `∂_ε` is taken when no analytic derivative is available.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Differentiator {
    pub fd_step: f64,
    pub richardson: bool,
}

impl Default for Differentiator {
    fn default() -> Self {
        Differentiator {
            fd_step: 1e-5,
            richardson: false,
        }
    }
}

impl Differentiator {
    /// Derivative at `x` of a matrix-valued curve defined on `domain`.
    /// Central when the stencil fits, second-order one-sided otherwise.
    pub fn derivative(&self, domain: (f64, f64), x: f64, f: impl Fn(f64) -> Mat) -> Mat {
        let once = |s: f64| -> Mat {
            if x - s >= domain.0 && x + s <= domain.1 {
                (f(x + s) - f(x - s)) * c(0.5 / s)
            } else {
                let s = if x + 2.0 * s <= domain.1 { s } else { -s };
                (f(x) * c(-3.0) + f(x + s) * c(4.0) - f(x + 2.0 * s)) * c(0.5 / s)
            }
        };
        let d = once(self.fd_step);
        if self.richardson {
            (once(0.5 * self.fd_step) * c(4.0) - d) * c(1.0 / 3.0)
        } else {
            d
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub eps_max: f64,
    pub eps_steps: usize,
    pub quadrature_resolution: usize,
    pub sample_count: usize,
    /// Coordinate radius of random samples on non-compact groups.
    pub sample_radius: f64,
    pub differentiator: Differentiator,
    /// RK4 steps used when evaluating an automorphism flow at one ε.
    pub flow_steps: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            eps_max: 0.5,
            eps_steps: 50,
            quadrature_resolution: 32,
            sample_count: 24,
            sample_radius: 1.0,
            differentiator: Differentiator::default(),
            flow_steps: 32,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        let bad = |m: &str| Err(LabError::InvalidConfig(m.into()));
        if !(self.eps_max > 0.0 && self.eps_max.is_finite()) {
            return bad("eps_max must be positive");
        }
        if self.eps_steps < 2 {
            return bad("eps_steps must be at least 2");
        }
        if self.quadrature_resolution == 0 || self.sample_count == 0 || self.flow_steps == 0 {
            return bad("resolution, sample_count and flow_steps must be positive");
        }
        if !(self.sample_radius > 0.0 && self.differentiator.fd_step > 0.0) {
            return bad("sample_radius and fd_step must be positive");
        }
        if !(t.transgression_tol > 0.0 && t.certificate_tol > 0.0 && t.hom_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }

    pub fn eps_grid(&self) -> Vec<f64> {
        linspace(0.0, self.eps_max, self.eps_steps)
    }

    pub fn rng(&self) -> SampleRng {
        seeded(self.seed)
    }
}

#[derive(Clone)]
pub struct HomDeformation {
    source: Arc<GroupDescriptor>,
    target: Arc<GroupDescriptor>,
    eval: FamilyFn,
    d_eps: Option<FamilyDerivFn>,
    eps_domain: (f64, f64),
}

impl fmt::Debug for HomDeformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomDeformation")
            .field("source", &self.source.name())
            .field("target", &self.target.name())
            .field("analytic", &self.d_eps.is_some())
            .field("eps_domain", &self.eps_domain)
            .finish()
    }
}

impl HomDeformation {
    pub fn new(
        source: &Arc<GroupDescriptor>,
        target: &Arc<GroupDescriptor>,
        eps_domain: (f64, f64),
        eval: impl Fn(f64, &GroupElement) -> GroupElement + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(eps_domain.0 <= 0.0 && 0.0 <= eps_domain.1 && eps_domain.0 < eps_domain.1) {
            return Err(LabError::InvalidDeformation(format!(
                "eps domain [{}, {}] must contain 0",
                eps_domain.0, eps_domain.1
            )));
        }
        Ok(HomDeformation {
            source: Arc::clone(source),
            target: Arc::clone(target),
            eval: Arc::new(eval),
            d_eps: None,
            eps_domain,
        })
    }

    pub fn with_derivative(
        mut self,
        d: impl Fn(f64, &GroupElement) -> Mat + Send + Sync + 'static,
    ) -> Self {
        self.d_eps = Some(Arc::new(d));
        self
    }

    /// Drops the analytic derivative, forcing finite differences.
    pub fn without_derivative(mut self) -> Self {
        self.d_eps = None;
        self
    }

    /// The constant deformation `φ_ε ≡ φ`.
    pub fn constant(
        source: &Arc<GroupDescriptor>,
        target: &Arc<GroupDescriptor>,
        phi: HomFn,
    ) -> Result<Self> {
        let n = target.ambient_dim();
        Ok(Self::new(source, target, (-1.0, 1.0), move |_, h| phi(h))?
            .with_derivative(move |_, _| Mat::zeros(n, n)))
    }

    pub fn source(&self) -> &Arc<GroupDescriptor> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GroupDescriptor> {
        &self.target
    }

    pub fn eps_domain(&self) -> (f64, f64) {
        self.eps_domain
    }

    pub fn has_derivative(&self) -> bool {
        self.d_eps.is_some()
    }

    pub fn evaluate(&self, eps: f64, h: &GroupElement) -> GroupElement {
        (self.eval)(eps, h)
    }

    /// `φ_ε` as a homomorphism evaluator.
    pub fn at(&self, eps: f64) -> HomFn {
        let f = Arc::clone(&self.eval);
        Arc::new(move |h| f(eps, h))
    }

    /// `∂_ε φ_ε(h)` at `ε = λ`.
    pub fn derivative(&self, lambda: f64, h: &GroupElement, diff: &Differentiator) -> Mat {
        match &self.d_eps {
            Some(d) => d(lambda, h),
            None => diff.derivative(self.eps_domain, lambda, |e| {
                (self.eval)(e, h).into_matrix()
            }),
        }
    }

    /// Max of `‖φ_ε(h₁h₂) − φ_ε(h₁)φ_ε(h₂)‖_F` and `‖φ_ε(1) − 1‖_F`.
    pub fn hom_defect(&self, eps: f64, pairs: &[Vec<GroupElement>]) -> f64 {
        let id = GroupElement::identity(&self.source);
        let one = (self.eval)(eps, &id);
        let mut worst = frobenius_norm(&(one.matrix() - GroupElement::identity(&self.target).matrix()));
        for p in pairs {
            let lhs = (self.eval)(eps, &p[0].compose(&p[1]));
            let rhs = (self.eval)(eps, &p[0]).compose(&(self.eval)(eps, &p[1]));
            worst = worst.max(frobenius_norm(&(lhs.matrix() - rhs.matrix())));
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransgressionMethod {
    Haar,
    LeastSquares,
    UserSupplied,
}

/// One solution of `X = δu` with its achieved residual.
#[derive(Clone, Debug)]
pub struct Transgression {
    pub u: AlgebraVector,
    pub residual: f64,
    pub rank_deficient: bool,
}

#[derive(Clone, Debug)]
pub struct TransgressionPath {
    pub eps_grid: Vec<f64>,
    pub values: Vec<AlgebraVector>,
    pub method: TransgressionMethod,
    pub residuals: Vec<f64>,
}

impl TransgressionPath {
    pub fn new(
        eps_grid: Vec<f64>,
        values: Vec<AlgebraVector>,
        method: TransgressionMethod,
        residuals: Vec<f64>,
    ) -> Result<Self> {
        if eps_grid.len() != values.len() || eps_grid.len() != residuals.len() {
            return Err(LabError::InvalidConfig(
                "transgression grid, values and residuals differ in length".into(),
            ));
        }
        if values.is_empty() {
            return Err(LabError::InvalidConfig("empty transgression path".into()));
        }
        if residuals.iter().any(|r| !(*r >= 0.0)) {
            return Err(LabError::InvalidConfig("negative or NaN residual".into()));
        }
        Ok(TransgressionPath {
            eps_grid,
            values,
            method,
            residuals,
        })
    }

    pub fn descriptor(&self) -> &Arc<GroupDescriptor> {
        self.values[0].descriptor()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// `u` at an arbitrary `ε` by cubic interpolation in coordinates.
    pub fn value_at(&self, eps: f64) -> AlgebraVector {
        let coords: Vec<DVector<f64>> = self.values.iter().map(|v| v.coords().clone()).collect();
        AlgebraVector::from_coords(interpolate(&self.eps_grid, &coords, eps), self.descriptor())
    }

    /// The same path with every value negated.
    pub fn negated(&self) -> Self {
        TransgressionPath {
            values: self.values.iter().map(|v| v.scaled(-1.0)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    TriviallyCertified,
    NotTransgressible,
    FlowDiverged,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::TriviallyCertified => "TriviallyCertified",
            Verdict::NotTransgressible => "NotTransgressible",
            Verdict::FlowDiverged => "FlowDiverged",
        })
    }
}

impl std::str::FromStr for Verdict {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "TriviallyCertified" => Ok(Verdict::TriviallyCertified),
            "NotTransgressible" => Ok(Verdict::NotTransgressible),
            "FlowDiverged" => Ok(Verdict::FlowDiverged),
            other => Err(LabError::InvalidConfig(format!("unknown verdict {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrivialityCertificate {
    pub verdict: Verdict,
    pub eps_grid: Vec<f64>,
    /// Empty unless the Moser flow was run.
    pub g_path: Vec<GroupElement>,
    /// NaN where not measured.
    pub conjugation_error: Vec<f64>,
    pub transgression: TransgressionPath,
    pub cocycle_defect: Vec<f64>,
    pub hom_defect: f64,
    pub tolerances: Tolerances,
    /// Number of leading grid nodes on which every check passed.
    pub certified_prefix: usize,
    pub failing_eps: Option<f64>,
    pub preimage_residual: Option<Vec<f64>>,
}

impl TrivialityCertificate {
    pub fn max_conjugation_error(&self) -> f64 {
        self.conjugation_error.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::TriviallyCertified
    }
}

/// `X_λ` as a degree-1 cochain valued in `Ad ∘ φ_λ`.
pub fn deformation_cocycle(d: &HomDeformation, lambda: f64, diff: &Differentiator) -> Cochain {
    let rep = Representation::pullback_adjoint(&d.source, &d.target, d.at(lambda));
    let d = d.clone();
    let diff = *diff;
    Cochain::new(1, rep, move |h| {
        let p = d.evaluate(lambda, &h[0]);
        let v = d.derivative(lambda, &h[0], &diff);
        Ok(p.right_translate_to_identity(&v)?.coords().clone())
    })
}

pub fn verify_deformation_cocycle(
    d: &HomDeformation,
    lambda: f64,
    diff: &Differentiator,
    pairs: &[Vec<GroupElement>],
) -> Result<f64> {
    cocycle_defect(&deformation_cocycle(d, lambda, diff), pairs)
}

/// `max_h ‖X(h) − δu(h)‖` over `samples`.
pub fn transgression_residual(x: &Cochain, u: &DVector<f64>, samples: &[GroupElement]) -> Result<f64> {
    let du = Cochain::constant(x.rep().clone(), u.clone()).coboundary();
    let tuples: Vec<Vec<GroupElement>> = samples.iter().map(|h| vec![h.clone()]).collect();
    cochain_distance(x, &du, &tuples)
}

/// `u = −∫_H X dh`, with the residual measured on `samples`.
pub fn transgress_haar_cochain(
    x: &Cochain,
    q: &HaarQuadrature,
    samples: &[GroupElement],
) -> Result<Transgression> {
    let n = x.rep().space_dim();
    let u = -q.integrate_vector(n, |h| x.evaluate(std::slice::from_ref(h)))?;
    let residual = transgression_residual(x, &u, samples)?;
    Ok(Transgression {
        u: AlgebraVector::from_coords(u, x.rep().algebra()),
        residual,
        rank_deficient: false,
    })
}

pub fn transgress_haar(
    d: &HomDeformation,
    lambda: f64,
    diff: &Differentiator,
    q: &HaarQuadrature,
    samples: &[GroupElement],
) -> Result<Transgression> {
    if !d.source.is_compact() {
        return Err(LabError::Unsupported(format!(
            "Haar transgression needs a compact source, got {}",
            d.source.name()
        )));
    }
    transgress_haar_cochain(&deformation_cocycle(d, lambda, diff), q, samples)
}

/// Minimum-norm least-squares solution of `(ρ(h) − 1)u = X(h)` stacked over
/// `samples`. The returned vector lives in the representation space.
pub fn least_squares_coords(
    x: &Cochain,
    samples: &[GroupElement],
) -> Result<(DVector<f64>, f64, bool)> {
    let n = x.rep().space_dim();
    let rows = n * samples.len();
    let mut a = DMatrix::zeros(rows, n);
    let mut b = DVector::zeros(rows);
    for (i, h) in samples.iter().enumerate() {
        a.view_mut((i * n, 0), (n, n))
            .copy_from(&x.rep().coboundary_matrix(h)?);
        b.rows_mut(i * n, n)
            .copy_from(&x.evaluate(std::slice::from_ref(h))?);
    }
    let (u, rank_deficient) = min_norm_solve(&a, &b);
    let residual = transgression_residual(x, &u, samples)?;
    Ok((u, residual, rank_deficient))
}

pub fn least_squares_fit(
    d: &HomDeformation,
    lambda: f64,
    diff: &Differentiator,
    samples: &[GroupElement],
) -> Result<Transgression> {
    let x = deformation_cocycle(d, lambda, diff);
    let (u, residual, rank_deficient) = least_squares_coords(&x, samples)?;
    Ok(Transgression {
        u: AlgebraVector::from_coords(u, &d.target),
        residual,
        rank_deficient,
    })
}

/// Like [`least_squares_fit`] but returns `None` when no 0-cochain reaches
/// `tol` on the samples.
pub fn transgress_least_squares(
    d: &HomDeformation,
    lambda: f64,
    diff: &Differentiator,
    samples: &[GroupElement],
    tol: f64,
) -> Result<Option<Transgression>> {
    if samples.len() * d.target.dim() < d.target.dim() || samples.is_empty() {
        return Err(LabError::InvalidConfig("least squares needs samples".into()));
    }
    let t = least_squares_fit(d, lambda, diff, samples)?;
    Ok((t.residual <= tol).then_some(t))
}

/// `u_λ = −ġ_λ g_λ⁻¹` from a path sampled on a uniform grid, with
/// fourth-order differences (one-sided near the ends).
pub fn path_velocity(eps_grid: &[f64], g_path: &[GroupElement], lambda: f64) -> Result<AlgebraVector> {
    let n = eps_grid.len();
    if n != g_path.len() || n < 5 {
        return Err(LabError::InvalidConfig(
            "path_velocity needs at least 5 grid nodes matching the path".into(),
        ));
    }
    let step = (eps_grid[n - 1] - eps_grid[0]) / (n - 1) as f64;
    let uniform = eps_grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs());
    if !uniform || step == 0.0 {
        return Err(LabError::InvalidConfig("path_velocity needs a uniform grid".into()));
    }
    let pos = (lambda - eps_grid[0]) / step;
    let i = pos.round();
    if (pos - i).abs() > 1e-6 || i < 0.0 || i as usize >= n {
        return Err(LabError::Domain(format!("λ = {lambda} is not a grid node")));
    }
    let i = i as usize;
    let m = |k: usize| g_path[k].matrix();
    let (idx, w): ([usize; 5], [f64; 5]) = if i >= 2 && i + 2 < n {
        ([i - 2, i - 1, i, i + 1, i + 2], [1.0, -8.0, 0.0, 8.0, -1.0])
    } else if i == 0 {
        ([0, 1, 2, 3, 4], [-25.0, 48.0, -36.0, 16.0, -3.0])
    } else if i == 1 {
        ([0, 1, 2, 3, 4], [-3.0, -10.0, 18.0, -6.0, 1.0])
    } else if i == n - 1 {
        ([n - 1, n - 2, n - 3, n - 4, n - 5], [25.0, -48.0, 36.0, -16.0, 3.0])
    } else {
        ([n - 1, n - 2, n - 3, n - 4, n - 5], [3.0, 10.0, -18.0, 6.0, -1.0])
    };
    let dim = g_path[0].descriptor().ambient_dim();
    let mut dg = Mat::zeros(dim, dim);
    for (k, wk) in idx.iter().zip(w) {
        dg += m(*k) * c(wk);
    }
    dg *= c(1.0 / (12.0 * step));
    Ok(g_path[i].right_translate_to_identity(&dg)?.scaled(-1.0))
}

/// Solves `ġ = −u_ε·g`, `g₀ = 1` on the transgression grid.
pub fn moser_reconstruct(t: &TransgressionPath) -> Result<Vec<GroupElement>> {
    moser_reconstruct_on(t, &t.eps_grid)
}

/// As [`moser_reconstruct`] but on an arbitrary grid starting at 0; `u` is
/// interpolated between transgression nodes.
pub fn moser_reconstruct_on(t: &TransgressionPath, grid: &[f64]) -> Result<Vec<GroupElement>> {
    let start = GroupElement::identity(t.descriptor());
    integrate(&start, grid, |eps, g| {
        Ok(t.value_at(eps).matrix() * c(-1.0) * g.matrix())
    })
}

/// `max_h ‖φ_ε(h) − g φ₀(h) g⁻¹‖_F`.
pub fn conjugation_error(
    phi_eps: &dyn Fn(&GroupElement) -> GroupElement,
    phi_0: &dyn Fn(&GroupElement) -> GroupElement,
    g: &GroupElement,
    samples: &[GroupElement],
) -> Result<f64> {
    let g_inv = g.inverse()?;
    let mut worst: f64 = 0.0;
    for h in samples {
        let lhs = phi_eps(h);
        let rhs = g.compose(&phi_0(h)).compose(&g_inv);
        worst = worst.max(frobenius_norm(&(lhs.matrix() - rhs.matrix())));
    }
    Ok(worst)
}

/// Leading grid nodes whose values are all `≤ tol`.
pub(crate) fn passing_prefix(values: &[f64], tol: f64) -> usize {
    values.iter().take_while(|v| **v <= tol).count()
}

/// Samples shared by the pipelines: verification points and pairs on the
/// source group.
pub(crate) fn pipeline_samples(
    source: &Arc<GroupDescriptor>,
    cfg: &PipelineConfig,
) -> (Vec<GroupElement>, Vec<Vec<GroupElement>>) {
    let mut rng = cfg.rng();
    let points = random_elements(source, &mut rng, cfg.sample_count, cfg.sample_radius);
    let pairs = random_tuples(source, &mut rng, 2, cfg.sample_count, cfg.sample_radius);
    (points, pairs)
}

pub fn certify_trivial(d: &HomDeformation, cfg: &PipelineConfig) -> Result<TrivialityCertificate> {
    cfg.validate()?;
    let grid = cfg.eps_grid();
    if grid[grid.len() - 1] > d.eps_domain.1 {
        return Err(LabError::InvalidConfig(format!(
            "eps_max {} outside the deformation domain [{}, {}]",
            cfg.eps_max, d.eps_domain.0, d.eps_domain.1
        )));
    }
    let tol = cfg.tolerances;
    let diff = cfg.differentiator;
    let (points, pairs) = pipeline_samples(&d.source, cfg);

    let hom_defect = grid
        .iter()
        .map(|&e| d.hom_defect(e, &pairs))
        .fold(0.0, f64::max);
    if !(hom_defect <= tol.hom_tol) {
        return Err(LabError::InvalidDeformation(format!(
            "family is not a homomorphism: defect {hom_defect:e} > {:e}",
            tol.hom_tol
        )));
    }

    let quadrature = if d.source.is_compact() {
        Some(haar_quadrature(&d.source, cfg.quadrature_resolution)?)
    } else {
        None
    };
    let method = if quadrature.is_some() {
        TransgressionMethod::Haar
    } else {
        TransgressionMethod::LeastSquares
    };

    let mut values = Vec::with_capacity(grid.len());
    let mut residuals = Vec::with_capacity(grid.len());
    let mut cocycle = Vec::with_capacity(grid.len());
    for &eps in &grid {
        let x = deformation_cocycle(d, eps, &diff);
        cocycle.push(cocycle_defect(&x, &pairs)?);
        let t = match &quadrature {
            Some(q) => transgress_haar_cochain(&x, q, &points)?,
            None => {
                let (u, residual, rank_deficient) = least_squares_coords(&x, &points)?;
                Transgression {
                    u: AlgebraVector::from_coords(u, &d.target),
                    residual,
                    rank_deficient,
                }
            }
        };
        values.push(t.u);
        residuals.push(t.residual);
    }
    let transgression = TransgressionPath::new(grid.clone(), values, method, residuals)?;
    let mut cert = open_certificate(grid, transgression, cocycle, hom_defect, tol);
    if cert.certified_prefix == cert.eps_grid.len() {
        let base: Vec<GroupElement> = points.iter().map(|h| d.evaluate(0.0, h)).collect();
        let grid = cert.eps_grid.clone();
        close_certificate(&mut cert, |i, k| d.evaluate(grid[i], &points[k]), &base)?;
    }
    Ok(cert)
}

/// A certificate carrying the residual gate only. Its verdict is
/// `NotTransgressible` until [`close_certificate`] runs; callers continue
/// only when `certified_prefix` covers the whole grid.
pub(crate) fn open_certificate(
    grid: Vec<f64>,
    transgression: TransgressionPath,
    cocycle_defect: Vec<f64>,
    hom_defect: f64,
    tol: Tolerances,
) -> TrivialityCertificate {
    let n = grid.len();
    let prefix = passing_prefix(&transgression.residuals, tol.transgression_tol);
    TrivialityCertificate {
        verdict: Verdict::NotTransgressible,
        failing_eps: (prefix < n).then(|| grid[prefix]),
        eps_grid: grid,
        g_path: Vec::new(),
        conjugation_error: vec![f64::NAN; n],
        transgression,
        cocycle_defect,
        hom_defect,
        tolerances: tol,
        certified_prefix: prefix,
        preimage_residual: None,
    }
}

pub(crate) fn mark_diverged(cert: &mut TrivialityCertificate, eps: f64) {
    cert.verdict = Verdict::FlowDiverged;
    cert.certified_prefix = cert.eps_grid.iter().take_while(|e| **e < eps).count();
    cert.failing_eps = Some(eps);
}

/// Runs the Moser flow and measures `‖image(i, k) − g_i base[k] g_i⁻¹‖`
/// for grid node `i` and sample `k`.
pub(crate) fn close_certificate(
    cert: &mut TrivialityCertificate,
    image: impl Fn(usize, usize) -> GroupElement,
    base: &[GroupElement],
) -> Result<()> {
    let g_path = match moser_reconstruct(&cert.transgression) {
        Ok(p) => p,
        Err(LabError::FlowDiverged { eps }) => {
            mark_diverged(cert, eps);
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    for (i, g) in g_path.iter().enumerate() {
        let g_inv = g.inverse()?;
        let mut worst: f64 = 0.0;
        for (k, b) in base.iter().enumerate() {
            let rhs = g.compose(b).compose(&g_inv);
            worst = worst.max(frobenius_norm(&(image(i, k).matrix() - rhs.matrix())));
        }
        cert.conjugation_error[i] = worst;
    }
    let n = cert.eps_grid.len();
    let prefix = passing_prefix(&cert.conjugation_error, cert.tolerances.certificate_tol);
    cert.certified_prefix = prefix;
    if prefix == n {
        cert.verdict = Verdict::TriviallyCertified;
        cert.failing_eps = None;
    } else {
        cert.verdict = Verdict::FlowDiverged;
        cert.failing_eps = Some(cert.eps_grid[prefix]);
    }
    cert.g_path = g_path;
    Ok(())
}

/// `F_ε(g)` for the flow of `ẋ = Z_ε(x)·x` from `x(0) = g`, with `steps`
/// RK4 steps.
pub fn automorphism_flow_eval(
    z: &CochainPath,
    g: &GroupElement,
    eps_target: f64,
    steps: usize,
) -> Result<GroupElement> {
    flow_between(z, g, 0.0, eps_target, steps)
}

/// `F_ε⁻¹(y)`, by integrating the same field from `ε` back to 0.
pub fn automorphism_flow_inverse(
    z: &CochainPath,
    y: &GroupElement,
    eps: f64,
    steps: usize,
) -> Result<GroupElement> {
    flow_between(z, y, eps, 0.0, steps)
}

fn flow_between(
    z: &CochainPath,
    start: &GroupElement,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<GroupElement> {
    if from == to {
        return Ok(start.clone());
    }
    let desc = Arc::clone(start.descriptor());
    let grid = linspace(from, to, steps.max(1));
    let path = integrate(start, &grid, |t, x| {
        let coords = z(t).evaluate(std::slice::from_ref(x))?;
        Ok(desc.matrix_from_coords(&coords) * x.matrix())
    })?;
    Ok(path.into_iter().last().expect("non-empty"))
}

/// `max_h ‖X_ε(h) − (φ_ε*Z_ε)(h) − δ_{φ_ε}(u_ε)(h)‖` on `samples`.
pub fn preimage_residual(
    d: &HomDeformation,
    eps: f64,
    diff: &Differentiator,
    z: &Cochain,
    u: &AlgebraVector,
    samples: &[GroupElement],
) -> Result<f64> {
    let x = deformation_cocycle(d, eps, diff);
    let pulled = z.pullback(&d.source, d.at(eps));
    let du = Cochain::constant(x.rep().clone(), u.coords().clone()).coboundary();
    let mut worst: f64 = 0.0;
    for h in samples {
        let arg = std::slice::from_ref(h);
        let r = x.evaluate(arg)? - pulled.evaluate(arg)? - du.evaluate(arg)?;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

/// `φ′_ε = F_ε⁻¹ ∘ φ_ε` for the automorphism flow of `z`.
pub fn corrected_family(d: &HomDeformation, z: &CochainPath, steps: usize) -> Result<HomDeformation> {
    let (d0, z) = (d.clone(), Arc::clone(z));
    // a failed backward flow leaves a NaN matrix, which fails every later check
    HomDeformation::new(&d.source, &d.target, d.eps_domain, move |eps, h| {
        let y = d0.evaluate(eps, h);
        automorphism_flow_inverse(&z, &y, eps, steps).unwrap_or_else(|_| {
            let n = y.descriptor().ambient_dim();
            GroupElement::new_unchecked(Mat::from_element(n, n, c(f64::NAN)), y.descriptor())
        })
    })
}

/// Verifies `X_ε = φ_ε*Z_ε + δ_{φ_ε}(u_ε)` on the grid, then certifies the
/// corrected family `F_ε⁻¹ ∘ φ_ε`.
pub fn certify_weakly_trivial(
    d: &HomDeformation,
    z: &CochainPath,
    u: &AlgebraPath,
    cfg: &PipelineConfig,
) -> Result<TrivialityCertificate> {
    cfg.validate()?;
    let (points, _) = pipeline_samples(&d.source, cfg);
    let mut residuals = Vec::new();
    for eps in cfg.eps_grid() {
        let r = preimage_residual(d, eps, &cfg.differentiator, &z(eps), &u(eps), &points)?;
        if !(r <= cfg.tolerances.transgression_tol) {
            return Err(LabError::RejectedPreimage { eps, residual: r });
        }
        residuals.push(r);
    }
    let corrected = corrected_family(d, z, cfg.flow_steps)?;
    let mut cert = certify_trivial(&corrected, cfg)?;
    cert.preimage_residual = Some(residuals);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::linalg::{ci, from_real};

    fn circle_to_su2() -> (Arc<GroupDescriptor>, Arc<GroupDescriptor>, HomFn) {
        let t = GroupDescriptor::torus(1);
        let su2 = GroupDescriptor::su2();
        let s = Arc::clone(&su2);
        let phi: HomFn = Arc::new(move |h| {
            let th = h.matrix()[(1, 0)].re.atan2(h.matrix()[(0, 0)].re);
            let mut m = Mat::zeros(2, 2);
            m[(0, 0)] = ci(th).exp();
            m[(1, 1)] = ci(-th).exp();
            GroupElement::new_unchecked(m, &s)
        });
        (t, su2, phi)
    }

    fn conjugated(xi: AlgebraVector) -> HomDeformation {
        let (t, su2, phi) = circle_to_su2();
        let p = Arc::clone(&phi);
        let x2 = xi.clone();
        HomDeformation::new(&t, &su2, (-1.0, 1.0), move |e, h| {
            let g = xi.scaled(e).exp();
            g.compose(&phi(h)).compose(&g.inverse().unwrap())
        })
        .unwrap()
        .with_derivative(move |e, h| {
            let g = x2.scaled(e).exp();
            let v = g.compose(&p(h)).compose(&g.inverse().unwrap());
            x2.matrix() * v.matrix() - v.matrix() * x2.matrix()
        })
    }

    #[test]
    fn constant_family_has_zero_cocycle_and_certifies() {
        let (t, su2, phi) = circle_to_su2();
        let d = HomDeformation::constant(&t, &su2, phi).unwrap();
        let x = deformation_cocycle(&d, 0.2, &Differentiator::default());
        let h = AlgebraVector::from_slice(&[0.7], &t).exp();
        assert_eq!(x.evaluate(&[h]).unwrap().norm(), 0.0);
        let cert = certify_trivial(&d, &PipelineConfig::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::TriviallyCertified);
        assert!(cert.max_conjugation_error() == 0.0);
        assert!(cert.g_path.iter().all(|g| g.distance(&GroupElement::identity(&su2)).unwrap() == 0.0));
    }

    #[test]
    fn inner_family_cocycle_matches_closed_form() {
        let su2 = GroupDescriptor::su2();
        let xi = AlgebraVector::from_slice(&[1.2, 0.8, 0.0], &su2);
        let d = conjugated(xi.clone()).without_derivative();
        let x = deformation_cocycle(&d, 0.0, &Differentiator::default());
        let h = AlgebraVector::from_slice(&[0.9], d.source()).exp();
        let ph = d.evaluate(0.0, &h);
        let expected = xi.sub(&ph.adjoint(&xi).unwrap());
        assert!((x.evaluate(&[h]).unwrap() - expected.coords()).norm() < 1e-9);
    }

    #[test]
    fn shear_cocycle_is_additive() {
        let r1 = GroupDescriptor::translation(1);
        let r2 = GroupDescriptor::translation(2);
        let r2c = Arc::clone(&r2);
        let d = HomDeformation::new(&r1, &r2, (-1.0, 1.0), move |e, h| {
            let t = h.matrix()[(0, 1)].re;
            GroupElement::new_unchecked(from_real(3, 3, &[1., 0., t, 0., 1., e * t, 0., 0., 1.]), &r2c)
        })
        .unwrap();
        let x = deformation_cocycle(&d, 0.3, &Differentiator::default());
        let h = AlgebraVector::from_slice(&[0.6], &r1).exp();
        assert!((x.evaluate(&[h]).unwrap() - DVector::from_vec(vec![0.0, 0.6])).norm() < 1e-9);
    }

    #[test]
    fn velocity_of_exponential_paths() {
        let so3 = GroupDescriptor::so3();
        let cvec = AlgebraVector::from_slice(&[0.2, -0.4, 0.9], &so3);
        let grid = linspace(0.0, 0.5, 50);
        let lin: Vec<_> = grid.iter().map(|&e| cvec.scaled(e).exp()).collect();
        let quad: Vec<_> = grid.iter().map(|&e| cvec.scaled(e * e).exp()).collect();
        for (k, &lam) in grid.iter().enumerate().step_by(7) {
            let v = path_velocity(&grid, &lin, lam).unwrap();
            assert!((v.coords() + cvec.coords()).norm() < 1e-8, "k={k}");
            let v = path_velocity(&grid, &quad, lam).unwrap();
            let err = (v.coords() + cvec.coords() * (2.0 * lam)).norm();
            assert!(err < 1e-7, "k={k} err={err:e}");
        }
        assert!(path_velocity(&grid, &lin, 0.0123).is_err());
    }

    #[test]
    fn moser_flow_of_constant_generator() {
        let su2 = GroupDescriptor::su2();
        let cvec = AlgebraVector::from_slice(&[0.5, -0.3, 0.8], &su2);
        let grid = linspace(0.0, 0.5, 100);
        let n = grid.len();
        let t = TransgressionPath::new(
            grid.clone(),
            vec![cvec.clone(); n],
            TransgressionMethod::UserSupplied,
            vec![0.0; n],
        )
        .unwrap();
        let path = moser_reconstruct(&t).unwrap();
        for (e, g) in grid.iter().zip(&path) {
            assert!(g.distance(&cvec.scaled(-e).exp()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn conjugated_circle_certifies() {
        let su2 = GroupDescriptor::su2();
        let d = conjugated(AlgebraVector::from_slice(&[1.2, 0.8, 0.0], &su2));
        let cfg = PipelineConfig {
            quadrature_resolution: 64,
            ..PipelineConfig::default()
        };
        let cert = certify_trivial(&d, &cfg).unwrap();
        assert_eq!(cert.verdict, Verdict::TriviallyCertified);
        assert!(cert.max_conjugation_error() <= 1e-4);
        assert!(cert.transgression.max_residual() <= 1e-8);
        // the wrong sign in the Moser ODE must be caught
        let flipped = moser_reconstruct(&cert.transgression.negated()).unwrap();
        let phi0 = d.at(0.0);
        let worst = grid_error(&d, &cert.eps_grid, &flipped, &phi0);
        assert!(worst > cfg.tolerances.certificate_tol);
    }

    fn grid_error(d: &HomDeformation, grid: &[f64], path: &[GroupElement], phi0: &HomFn) -> f64 {
        let (points, _) = pipeline_samples(d.source(), &PipelineConfig::default());
        grid.iter()
            .zip(path)
            .map(|(&e, g)| {
                let pe = d.at(e);
                conjugation_error(&|h| pe(h), &|h| phi0(h), g, &points).unwrap()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn coboundary_automorphism_flow_is_inner() {
        let su2 = GroupDescriptor::su2();
        let w = AlgebraVector::from_slice(&[0.3, -0.6, 0.4], &su2);
        let rep = Representation::adjoint(&su2);
        let wc = w.coords().clone();
        let z: CochainPath = Arc::new(move |_| Cochain::constant(rep.clone(), wc.clone()).coboundary());
        let g = AlgebraVector::from_slice(&[1.0, 0.2, -0.5], &su2).exp();
        let out = automorphism_flow_eval(&z, &g, 0.5, 64).unwrap();
        let exact = w.scaled(-0.5).exp().compose(&g).compose(&w.scaled(0.5).exp());
        let err = out.distance(&exact).unwrap();
        assert!(err < 1e-9, "{err:e}");
        let back = automorphism_flow_inverse(&z, &out, 0.5, 64).unwrap();
        assert!(back.distance(&g).unwrap() < 1e-9);
    }

    #[test]
    fn config_validation() {
        let mut cfg = PipelineConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.eps_steps = 1;
        assert!(cfg.validate().is_err());
        let cfg = PipelineConfig {
            tolerances: Tolerances {
                hom_tol: 0.0,
                ..Tolerances::default()
            },
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
