//! Matrix Lie groups: the catalog, elements, algebra vectors, retractions and
//! Haar quadrature.

mod element;
mod group;
pub mod haar;
pub mod linalg;
pub mod sampling;
mod splitting;

pub use element::{AlgebraVector, GroupElement, LOG_RADIUS, LOG_ROUNDTRIP_TOL};
pub use group::{
    catalog_descriptors, GroupDescriptor, GroupKind, ALGEBRA_TANGENCY_TOL, GROUP_MEMBERSHIP_TOL,
    RETRACTION_BASIN,
};
pub use haar::{haar_quadrature, HaarQuadrature};
pub use linalg::Mat;
pub use splitting::Splitting;
