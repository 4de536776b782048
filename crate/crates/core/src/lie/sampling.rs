//! Deterministic pseudo-random samples of group and algebra elements.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::element::{AlgebraVector, GroupElement};
use super::group::GroupDescriptor;

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coordinate radius that covers a compact group (`π`) or the requested
/// radius for non-compact ones.
pub fn coordinate_radius(descriptor: &GroupDescriptor, radius: f64) -> f64 {
    if descriptor.is_compact() {
        PI
    } else {
        radius
    }
}

pub fn random_algebra(
    descriptor: &Arc<GroupDescriptor>,
    rng: &mut SampleRng,
    radius: f64,
) -> AlgebraVector {
    let coords = DVector::from_fn(descriptor.dim(), |_, _| rng.random_range(-radius..=radius));
    AlgebraVector::from_coords(coords, descriptor)
}

/// `exp` of a uniformly random coordinate vector in `[-r, r]^dim`, with
/// `r` from [`coordinate_radius`].
pub fn random_element(
    descriptor: &Arc<GroupDescriptor>,
    rng: &mut SampleRng,
    radius: f64,
) -> GroupElement {
    let r = coordinate_radius(descriptor, radius);
    random_algebra(descriptor, rng, r).exp()
}

pub fn random_elements(
    descriptor: &Arc<GroupDescriptor>,
    rng: &mut SampleRng,
    count: usize,
    radius: f64,
) -> Vec<GroupElement> {
    (0..count)
        .map(|_| random_element(descriptor, rng, radius))
        .collect()
}

/// Random `k`-tuples, the argument lists of degree-`k` cochains.
pub fn random_tuples(
    descriptor: &Arc<GroupDescriptor>,
    rng: &mut SampleRng,
    k: usize,
    count: usize,
    radius: f64,
) -> Vec<Vec<GroupElement>> {
    (0..count)
        .map(|_| random_elements(descriptor, rng, k, radius))
        .collect()
}
