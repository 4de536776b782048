use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use super::group::{same_group, GroupDescriptor, ALGEBRA_TANGENCY_TOL, GROUP_MEMBERSHIP_TOL};
use super::linalg::{c, expm, frobenius_norm, identity, logm, Mat};
use crate::error::{LabError, Result};

/// Default radius of the neighbourhood of the identity on which [`GroupElement::log`]
/// is guaranteed to return the principal branch.
pub const LOG_RADIUS: f64 = 1.0;
pub const LOG_ROUNDTRIP_TOL: f64 = 1e-9;

#[derive(Clone)]
pub struct GroupElement {
    matrix: Mat,
    descriptor: Arc<GroupDescriptor>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement<{}>{}", self.descriptor.name(), self.matrix)
    }
}

impl GroupElement {
    /// Wraps `matrix` after checking the membership residual.
    pub fn new(matrix: Mat, descriptor: &Arc<GroupDescriptor>) -> Result<Self> {
        let residual = descriptor.membership_residual(&matrix);
        if residual > GROUP_MEMBERSHIP_TOL {
            return Err(LabError::NotInGroup { residual });
        }
        Ok(Self::new_unchecked(matrix, descriptor))
    }

    /// Wraps `matrix` without a membership check. Evaluators of analytic
    /// families use this on their hot path.
    pub fn new_unchecked(matrix: Mat, descriptor: &Arc<GroupDescriptor>) -> Self {
        GroupElement {
            matrix,
            descriptor: Arc::clone(descriptor),
        }
    }

    pub fn identity(descriptor: &Arc<GroupDescriptor>) -> Self {
        Self::new_unchecked(identity(descriptor.ambient_dim()), descriptor)
    }

    /// Nearest group element to `m` (polar retraction for orthogonal and
    /// unitary groups, structural projection otherwise).
    pub fn project(m: &Mat, descriptor: &Arc<GroupDescriptor>) -> Result<Self> {
        Ok(Self::new_unchecked(descriptor.retract(m)?, descriptor))
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    pub fn descriptor(&self) -> &Arc<GroupDescriptor> {
        &self.descriptor
    }

    pub fn membership_residual(&self) -> f64 {
        self.descriptor.membership_residual(&self.matrix)
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        same_group(&self.descriptor, &other.descriptor)?;
        Ok(self.compose(other))
    }

    /// Matrix product without the descriptor check.
    pub(crate) fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new_unchecked(&self.matrix * &other.matrix, &self.descriptor)
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let inv = if self.descriptor.kind().is_unitary() {
            self.matrix.adjoint()
        } else {
            self.matrix
                .clone()
                .try_inverse()
                .ok_or(LabError::Singular)?
        };
        Ok(GroupElement::new_unchecked(inv, &self.descriptor))
    }

    /// Frobenius distance `‖a − b‖_F`.
    pub fn distance(&self, other: &GroupElement) -> Result<f64> {
        same_group(&self.descriptor, &other.descriptor)?;
        Ok(frobenius_norm(&(&self.matrix - &other.matrix)))
    }

    /// Principal logarithm; fails outside `‖g − I‖_F < LOG_RADIUS`.
    pub fn log(&self) -> Result<AlgebraVector> {
        self.log_within(LOG_RADIUS)
    }

    pub fn log_within(&self, radius: f64) -> Result<AlgebraVector> {
        let n = self.descriptor.ambient_dim();
        let dist = frobenius_norm(&(&self.matrix - identity(n)));
        if !(dist < radius) {
            return Err(LabError::Domain(format!(
                "log: ‖g − I‖_F = {dist:.3} outside radius {radius}"
            )));
        }
        AlgebraVector::from_matrix(logm(&self.matrix)?, &self.descriptor)
    }

    /// `Ad_g v = g v g⁻¹`, re-expressed in the algebra basis.
    pub fn adjoint(&self, v: &AlgebraVector) -> Result<AlgebraVector> {
        same_group(&self.descriptor, &v.descriptor)?;
        let m = &self.matrix * &v.matrix * self.inverse()?.matrix;
        let (coords, residual) = self.descriptor.coordinates(&m);
        if residual > 1e-8 * frobenius_norm(&v.matrix).max(1.0) {
            return Err(LabError::NonInvariantBasis { residual });
        }
        Ok(AlgebraVector {
            matrix: m,
            coords,
            descriptor: Arc::clone(&self.descriptor),
        })
    }

    /// `dR_{p⁻¹}(V) = V·p⁻¹` for a tangent vector `V` at `p = self`.
    pub fn right_translate_to_identity(&self, tangent: &Mat) -> Result<AlgebraVector> {
        let m = tangent * self.inverse()?.matrix;
        AlgebraVector::from_matrix(m, &self.descriptor)
    }
}

/// An element of the Lie algebra, carried both as a matrix and as
/// coordinates in the descriptor's basis.
#[derive(Clone)]
pub struct AlgebraVector {
    matrix: Mat,
    coords: DVector<f64>,
    descriptor: Arc<GroupDescriptor>,
}

impl fmt::Debug for AlgebraVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AlgebraVector<{}>{:?}",
            self.descriptor.name(),
            self.coords.as_slice()
        )
    }
}

impl AlgebraVector {
    pub fn from_coords(coords: DVector<f64>, descriptor: &Arc<GroupDescriptor>) -> Self {
        assert_eq!(coords.len(), descriptor.dim(), "coordinate length");
        AlgebraVector {
            matrix: descriptor.matrix_from_coords(&coords),
            coords,
            descriptor: Arc::clone(descriptor),
        }
    }

    pub fn from_slice(coords: &[f64], descriptor: &Arc<GroupDescriptor>) -> Self {
        Self::from_coords(DVector::from_column_slice(coords), descriptor)
    }

    /// Projects `m` onto the algebra; fails with [`LabError::NotTangent`]
    /// when the rejected part is above [`ALGEBRA_TANGENCY_TOL`] (relative).
    pub fn from_matrix(m: Mat, descriptor: &Arc<GroupDescriptor>) -> Result<Self> {
        let (coords, residual) = descriptor.coordinates(&m);
        if residual > ALGEBRA_TANGENCY_TOL * frobenius_norm(&m).max(1.0) {
            return Err(LabError::NotTangent { residual });
        }
        Ok(AlgebraVector {
            matrix: m,
            coords,
            descriptor: Arc::clone(descriptor),
        })
    }

    pub fn zero(descriptor: &Arc<GroupDescriptor>) -> Self {
        Self::from_coords(DVector::zeros(descriptor.dim()), descriptor)
    }

    /// The `i`-th basis vector.
    pub fn basis(i: usize, descriptor: &Arc<GroupDescriptor>) -> Self {
        let mut v = DVector::zeros(descriptor.dim());
        v[i] = 1.0;
        Self::from_coords(v, descriptor)
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn descriptor(&self) -> &Arc<GroupDescriptor> {
        &self.descriptor
    }

    /// Euclidean norm of the coordinates.
    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        AlgebraVector {
            matrix: &self.matrix * c(s),
            coords: &self.coords * s,
            descriptor: Arc::clone(&self.descriptor),
        }
    }

    pub fn add(&self, other: &AlgebraVector) -> Self {
        Self::from_coords(&self.coords + &other.coords, &self.descriptor)
    }

    pub fn sub(&self, other: &AlgebraVector) -> Self {
        Self::from_coords(&self.coords - &other.coords, &self.descriptor)
    }

    pub fn exp(&self) -> GroupElement {
        GroupElement::new_unchecked(expm(&self.matrix), &self.descriptor)
    }
}
