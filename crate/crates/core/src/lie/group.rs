//! The matrix-group catalog: descriptors, algebra bases, membership tests
//! and retractions.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::linalg::{
    c, ci, frobenius_inner, frobenius_norm, identity, imaginary_norm, polar_unitary, real_part,
    Mat,
};
use crate::error::{LabError, Result};

/// Elements whose membership residual exceeds this are rejected by
/// [`super::GroupElement::new`].
pub const GROUP_MEMBERSHIP_TOL: f64 = 1e-9;
/// Largest membership residual [`GroupDescriptor::project`] accepts.
pub const RETRACTION_BASIN: f64 = 0.5;
/// Relative projection residual allowed when re-expressing a matrix in the
/// algebra basis.
pub const ALGEBRA_TANGENCY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `n` commuting planar rotations, block-diagonal of size `2n`.
    Torus(usize),
    Su2,
    So3,
    So(usize),
    Gl(usize),
    /// Upper unitriangular 3×3 matrices.
    Heisenberg3,
    /// `R^n` realized as `[[I, t], [0, 1]]`.
    Translation(usize),
    /// Block-diagonal product of the factors.
    Product(Vec<GroupKind>),
}

impl GroupKind {
    pub fn ambient_dim(&self) -> usize {
        match self {
            GroupKind::Torus(n) => 2 * n,
            GroupKind::Su2 => 2,
            GroupKind::So3 => 3,
            GroupKind::So(n) | GroupKind::Gl(n) => *n,
            GroupKind::Heisenberg3 => 3,
            GroupKind::Translation(n) => n + 1,
            GroupKind::Product(factors) => factors.iter().map(GroupKind::ambient_dim).sum(),
        }
    }

    pub fn is_compact(&self) -> bool {
        match self {
            GroupKind::Torus(_) | GroupKind::Su2 | GroupKind::So3 | GroupKind::So(_) => true,
            GroupKind::Product(factors) => factors.iter().all(GroupKind::is_compact),
            _ => false,
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupKind::Torus(_) | GroupKind::Translation(_) => true,
            GroupKind::So(n) => *n <= 2,
            GroupKind::Gl(n) => *n <= 1,
            GroupKind::Product(factors) => factors.iter().all(GroupKind::is_abelian),
            _ => false,
        }
    }

    /// True when the realization consists of unitary matrices, so the
    /// inverse is the conjugate transpose.
    pub fn is_unitary(&self) -> bool {
        self.is_compact()
    }

    fn is_real(&self) -> bool {
        match self {
            GroupKind::Su2 => false,
            GroupKind::Product(factors) => factors.iter().all(GroupKind::is_real),
            _ => true,
        }
    }

    fn basis(&self) -> Vec<Mat> {
        let n = self.ambient_dim();
        let unit = |i: usize, j: usize| {
            let mut m = Mat::zeros(n, n);
            m[(i, j)] = c(1.0);
            m
        };
        match self {
            GroupKind::Torus(k) => (0..*k)
                .map(|b| unit(2 * b + 1, 2 * b) - unit(2 * b, 2 * b + 1))
                .collect(),
            GroupKind::Su2 => {
                let mut x = Mat::zeros(2, 2);
                x[(0, 1)] = ci(1.0);
                x[(1, 0)] = ci(1.0);
                let mut y = Mat::zeros(2, 2);
                y[(0, 1)] = c(1.0);
                y[(1, 0)] = c(-1.0);
                let mut z = Mat::zeros(2, 2);
                z[(0, 0)] = ci(1.0);
                z[(1, 1)] = ci(-1.0);
                vec![x, y, z]
            }
            GroupKind::So3 => vec![
                unit(2, 1) - unit(1, 2),
                unit(0, 2) - unit(2, 0),
                unit(1, 0) - unit(0, 1),
            ],
            GroupKind::So(k) => {
                let mut out = Vec::new();
                for i in 0..*k {
                    for j in (i + 1)..*k {
                        out.push(unit(j, i) - unit(i, j));
                    }
                }
                out
            }
            GroupKind::Gl(k) => {
                let mut out = Vec::new();
                for i in 0..*k {
                    for j in 0..*k {
                        out.push(unit(i, j));
                    }
                }
                out
            }
            GroupKind::Heisenberg3 => vec![unit(0, 1), unit(1, 2), unit(0, 2)],
            GroupKind::Translation(k) => (0..*k).map(|i| unit(i, *k)).collect(),
            GroupKind::Product(factors) => {
                let mut out = Vec::new();
                let mut offset = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    for b in f.basis() {
                        let mut m = Mat::zeros(n, n);
                        m.view_mut((offset, offset), (d, d)).copy_from(&b);
                        out.push(m);
                    }
                    offset += d;
                }
                out
            }
        }
    }

    fn membership_residual(&self, m: &Mat) -> f64 {
        let n = self.ambient_dim();
        if m.nrows() != n || m.ncols() != n {
            return f64::INFINITY;
        }
        let realness = if self.is_real() { imaginary_norm(m) } else { 0.0 };
        let structural = match self {
            GroupKind::Torus(k) => {
                let mut off = m.clone();
                let mut res = 0.0;
                for b in 0..*k {
                    let block = m.view((2 * b, 2 * b), (2, 2)).clone_owned();
                    res += orthogonal_residual(&block);
                    off.view_mut((2 * b, 2 * b), (2, 2)).fill(c(0.0));
                }
                res + frobenius_norm(&off)
            }
            GroupKind::Su2 | GroupKind::So3 | GroupKind::So(_) => orthogonal_residual(m),
            GroupKind::Gl(_) => {
                if real_part(m).map(|x| x.re).determinant().abs() < 1e-14 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            GroupKind::Heisenberg3 => frobenius_norm(&(m - heisenberg_pattern(m))),
            GroupKind::Translation(_) => frobenius_norm(&(m - translation_pattern(m))),
            GroupKind::Product(factors) => {
                let mut off = m.clone();
                let mut res = 0.0;
                let mut offset = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    res += f.membership_residual(&m.view((offset, offset), (d, d)).clone_owned());
                    off.view_mut((offset, offset), (d, d)).fill(c(0.0));
                    offset += d;
                }
                res + frobenius_norm(&off)
            }
        };
        realness + structural
    }

    fn retract(&self, m: &Mat) -> Result<Mat> {
        Ok(match self {
            GroupKind::Torus(k) => {
                let mut out = Mat::zeros(2 * k, 2 * k);
                for b in 0..*k {
                    let block = real_part(&m.view((2 * b, 2 * b), (2, 2)).clone_owned());
                    out.view_mut((2 * b, 2 * b), (2, 2))
                        .copy_from(&real_part(&polar_unitary(&block)?));
                }
                out
            }
            GroupKind::Su2 => {
                let u = polar_unitary(m)?;
                let det = u.determinant();
                let phase = num_complex::Complex64::from_polar(1.0, -det.arg() / 2.0);
                u * phase
            }
            GroupKind::So3 | GroupKind::So(_) => real_part(&polar_unitary(&real_part(m))?),
            GroupKind::Gl(_) => real_part(m),
            GroupKind::Heisenberg3 => heisenberg_pattern(m),
            GroupKind::Translation(_) => translation_pattern(m),
            GroupKind::Product(factors) => {
                let n = self.ambient_dim();
                let mut out = Mat::zeros(n, n);
                let mut offset = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    let block = f.retract(&m.view((offset, offset), (d, d)).clone_owned())?;
                    out.view_mut((offset, offset), (d, d)).copy_from(&block);
                    offset += d;
                }
                out
            }
        })
    }
}

fn orthogonal_residual(m: &Mat) -> f64 {
    let n = m.nrows();
    frobenius_norm(&(m.adjoint() * m - identity(n))) + (m.determinant() - c(1.0)).norm()
}

fn heisenberg_pattern(m: &Mat) -> Mat {
    let mut out = identity(3);
    out[(0, 1)] = c(m[(0, 1)].re);
    out[(1, 2)] = c(m[(1, 2)].re);
    out[(0, 2)] = c(m[(0, 2)].re);
    out
}

fn translation_pattern(m: &Mat) -> Mat {
    let n = m.nrows();
    let mut out = identity(n);
    for i in 0..n - 1 {
        out[(i, n - 1)] = c(m[(i, n - 1)].re);
    }
    out
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Torus(n) => write!(f, "Torus({n})"),
            GroupKind::Su2 => write!(f, "SU2"),
            GroupKind::So3 => write!(f, "SO3"),
            GroupKind::So(n) => write!(f, "SO({n})"),
            GroupKind::Gl(n) => write!(f, "GL({n},R)"),
            GroupKind::Heisenberg3 => write!(f, "Heisenberg3"),
            GroupKind::Translation(n) => write!(f, "TranslationGroup({n})"),
            GroupKind::Product(factors) => {
                write!(f, "ProductGroup(")?;
                for (i, k) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A concrete matrix Lie group together with a fixed basis of its algebra.
#[derive(Debug)]
pub struct GroupDescriptor {
    kind: GroupKind,
    ambient_dim: usize,
    basis: Vec<Mat>,
    gram_inv: DMatrix<f64>,
}

impl GroupDescriptor {
    pub fn new(kind: GroupKind) -> Result<Arc<Self>> {
        match &kind {
            GroupKind::Torus(0) | GroupKind::So(0) | GroupKind::Gl(0) | GroupKind::Translation(0) => {
                return Err(LabError::InvalidConfig(format!("{kind} has dimension zero")))
            }
            GroupKind::Product(f) if f.is_empty() => {
                return Err(LabError::InvalidConfig("empty product group".into()))
            }
            _ => {}
        }
        let basis = kind.basis();
        let dim = basis.len();
        let gram = DMatrix::from_fn(dim, dim, |i, j| frobenius_inner(&basis[i], &basis[j]));
        let gram_inv = gram
            .try_inverse()
            .ok_or_else(|| LabError::InvalidConfig(format!("{kind}: degenerate algebra basis")))?;
        Ok(Arc::new(GroupDescriptor {
            ambient_dim: kind.ambient_dim(),
            kind,
            basis,
            gram_inv,
        }))
    }

    pub fn torus(n: usize) -> Arc<Self> {
        Self::new(GroupKind::Torus(n)).expect("torus")
    }

    pub fn su2() -> Arc<Self> {
        Self::new(GroupKind::Su2).expect("su2")
    }

    pub fn so3() -> Arc<Self> {
        Self::new(GroupKind::So3).expect("so3")
    }

    pub fn so(n: usize) -> Arc<Self> {
        Self::new(GroupKind::So(n)).expect("so(n)")
    }

    pub fn gl(n: usize) -> Arc<Self> {
        Self::new(GroupKind::Gl(n)).expect("gl(n)")
    }

    pub fn heisenberg3() -> Arc<Self> {
        Self::new(GroupKind::Heisenberg3).expect("heisenberg")
    }

    pub fn translation(n: usize) -> Arc<Self> {
        Self::new(GroupKind::Translation(n)).expect("translation")
    }

    pub fn product(factors: Vec<GroupKind>) -> Arc<Self> {
        Self::new(GroupKind::Product(factors)).expect("product")
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the Lie algebra.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn algebra_basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn is_compact(&self) -> bool {
        self.kind.is_compact()
    }

    pub fn is_abelian(&self) -> bool {
        self.kind.is_abelian()
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    pub fn membership_residual(&self, m: &Mat) -> f64 {
        self.kind.membership_residual(m)
    }

    /// Coordinates of `m` in the algebra basis (orthogonal projection under
    /// the Frobenius inner product) and the norm of the rejected part.
    pub fn coordinates(&self, m: &Mat) -> (DVector<f64>, f64) {
        let rhs = DVector::from_iterator(
            self.dim(),
            self.basis.iter().map(|b| frobenius_inner(b, m)),
        );
        let coords = &self.gram_inv * rhs;
        let residual = frobenius_norm(&(m - self.matrix_from_coords(&coords)));
        (coords, residual)
    }

    pub fn matrix_from_coords(&self, coords: &DVector<f64>) -> Mat {
        let mut m = Mat::zeros(self.ambient_dim, self.ambient_dim);
        for (b, x) in self.basis.iter().zip(coords.iter()) {
            if *x != 0.0 {
                m += b * c(*x);
            }
        }
        m
    }

    /// Gram matrix of the algebra basis under the Frobenius inner product.
    pub fn gram(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            frobenius_inner(&self.basis[i], &self.basis[j])
        })
    }

    pub(crate) fn retract(&self, m: &Mat) -> Result<Mat> {
        let residual = self.membership_residual(m);
        if !(residual < RETRACTION_BASIN) {
            return Err(LabError::RetractionBasin { residual });
        }
        self.kind.retract(m)
    }
}

impl PartialEq for GroupDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

pub(crate) fn same_group(a: &Arc<GroupDescriptor>, b: &Arc<GroupDescriptor>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.kind == b.kind {
        Ok(())
    } else {
        Err(LabError::DescriptorMismatch {
            left: a.name(),
            right: b.name(),
        })
    }
}

/// One descriptor of each catalog family, used by the exhaustive suites.
pub fn catalog_descriptors() -> Vec<Arc<GroupDescriptor>> {
    vec![
        GroupDescriptor::torus(1),
        GroupDescriptor::torus(2),
        GroupDescriptor::su2(),
        GroupDescriptor::so3(),
        GroupDescriptor::so(4),
        GroupDescriptor::gl(2),
        GroupDescriptor::heisenberg3(),
        GroupDescriptor::translation(2),
        GroupDescriptor::product(vec![GroupKind::Su2, GroupKind::Torus(1)]),
    ]
}
