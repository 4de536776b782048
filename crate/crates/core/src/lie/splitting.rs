//! Orthogonal splittings `g = h ⊕ h^⊥` under the Frobenius inner product.
//! The complement realizes the quotient `g/h`.

use std::sync::Arc;

use nalgebra::DVector;

use super::group::GroupDescriptor;
use super::linalg::{c, frobenius_inner, frobenius_norm, Mat};
use crate::error::{LabError, Result};

#[derive(Clone, Debug)]
pub struct Splitting {
    descriptor: Arc<GroupDescriptor>,
    sub: Vec<Mat>,
    comp: Vec<Mat>,
}

fn orthogonalize(v: &Mat, against: &[Mat]) -> Mat {
    let mut out = v.clone();
    // two passes of modified Gram–Schmidt
    for _ in 0..2 {
        for q in against {
            let p = frobenius_inner(q, &out);
            out -= q * c(p);
        }
    }
    out
}

impl Splitting {
    /// Orthonormalizes `span` (which must have full rank relative to
    /// `rank_tol`) and completes it with a pivoted Gram–Schmidt pass over the
    /// algebra basis.
    pub fn from_span(
        descriptor: &Arc<GroupDescriptor>,
        span: &[Mat],
        rank_tol: f64,
    ) -> Result<Self> {
        let mut sub: Vec<Mat> = Vec::with_capacity(span.len());
        for (i, v) in span.iter().enumerate() {
            let scale = frobenius_norm(v);
            let r = orthogonalize(v, &sub);
            let n = frobenius_norm(&r);
            if !(n > rank_tol * scale.max(1e-300)) || scale == 0.0 {
                return Err(LabError::InvalidEmbedding(format!(
                    "subalgebra spanning vector {i} is dependent (residual {n:e})"
                )));
            }
            sub.push(r * c(1.0 / n));
        }
        let comp_dim = descriptor
            .dim()
            .checked_sub(sub.len())
            .ok_or_else(|| LabError::InvalidEmbedding("subalgebra larger than algebra".into()))?;

        let candidates: Vec<Mat> = descriptor
            .algebra_basis()
            .iter()
            .map(|b| b * c(1.0 / frobenius_norm(b)))
            .collect();
        let mut comp: Vec<Mat> = Vec::with_capacity(comp_dim);
        for _ in 0..comp_dim {
            let mut all = sub.clone();
            all.extend(comp.iter().cloned());
            let best = candidates
                .iter()
                .map(|b| orthogonalize(b, &all))
                .map(|r| (frobenius_norm(&r), r))
                .fold(None::<(f64, Mat)>, |acc, (n, r)| match acc {
                    Some((bn, _)) if bn >= n => acc,
                    _ => Some((n, r)),
                })
                .expect("algebra basis is non-empty");
            let (n, r) = best;
            let r = orthogonalize(&(r * c(1.0 / n)), &all);
            let n = frobenius_norm(&r);
            comp.push(r * c(1.0 / n));
        }
        Ok(Splitting {
            descriptor: Arc::clone(descriptor),
            sub,
            comp,
        })
    }

    pub fn descriptor(&self) -> &Arc<GroupDescriptor> {
        &self.descriptor
    }

    pub fn sub_basis(&self) -> &[Mat] {
        &self.sub
    }

    pub fn comp_basis(&self) -> &[Mat] {
        &self.comp
    }

    pub fn comp_dim(&self) -> usize {
        self.comp.len()
    }

    /// Complement coordinates of an algebra matrix.
    pub fn project(&self, m: &Mat) -> DVector<f64> {
        DVector::from_iterator(self.comp.len(), self.comp.iter().map(|q| frobenius_inner(q, m)))
    }

    pub fn project_coords(&self, coords: &DVector<f64>) -> DVector<f64> {
        self.project(&self.descriptor.matrix_from_coords(coords))
    }

    /// The complement vector with the given coordinates.
    pub fn lift(&self, comp_coords: &DVector<f64>) -> Mat {
        let n = self.descriptor.ambient_dim();
        let mut m = Mat::zeros(n, n);
        for (q, x) in self.comp.iter().zip(comp_coords.iter()) {
            m += q * c(*x);
        }
        m
    }

    /// Orthogonal projection of `m` onto the subalgebra.
    pub fn sub_component(&self, m: &Mat) -> Mat {
        let n = self.descriptor.ambient_dim();
        let mut out = Mat::zeros(n, n);
        for q in &self.sub {
            out += q * c(frobenius_inner(q, m));
        }
        out
    }

    /// Flips signs so that every basis vector has non-negative inner product
    /// with its counterpart in `prev`.
    pub fn align_with(&mut self, prev: &Splitting) {
        for (q, p) in self.sub.iter_mut().zip(prev.sub.iter()) {
            if frobenius_inner(q, p) < 0.0 {
                *q = -q.clone();
            }
        }
        for (q, p) in self.comp.iter_mut().zip(prev.comp.iter()) {
            if frobenius_inner(q, p) < 0.0 {
                *q = -q.clone();
            }
        }
    }
}
