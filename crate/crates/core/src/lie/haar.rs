//! Normalized left-invariant Haar quadrature for the compact groups of the
//! catalog.
//!
//! * `Torus(n)` and `SO(2)`: uniform product grid, weight `1/N` per node.
//! * `SU2`: Gauss–Legendre in the hyperspherical angles `ψ, θ` and a uniform
//!   grid in `φ`, weighted by the density `sin²ψ · sinθ`, then renormalized
//!   so the weights sum to one.
//! * `SO3`: the `SU2` rule pushed through the double cover.
//! * products: tensor product of the factor rules.
//!
//! All sums run sequentially over the node list, so results are
//! bit-reproducible.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use super::element::GroupElement;
use super::group::{GroupDescriptor, GroupKind};
use super::linalg::{c, Mat};
use crate::error::{LabError, Result};

pub const DEFAULT_RESOLUTION: usize = 32;

#[derive(Clone, Debug)]
pub struct HaarQuadrature {
    nodes: Vec<GroupElement>,
    weights: Vec<f64>,
    resolution: usize,
}

impl HaarQuadrature {
    pub fn nodes(&self) -> &[GroupElement] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(&GroupElement) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(g, w)| w * f(g))
            .sum()
    }

    pub fn integrate_vector(
        &self,
        dim: usize,
        f: impl Fn(&GroupElement) -> Result<DVector<f64>>,
    ) -> Result<DVector<f64>> {
        let mut acc = DVector::zeros(dim);
        for (g, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(g)? * *w;
        }
        Ok(acc)
    }

    /// `|Σ wᵢ f(h'·nodeᵢ) − Σ wᵢ f(nodeᵢ)|`.
    pub fn invariance_defect(&self, f: impl Fn(&GroupElement) -> f64, translator: &GroupElement) -> f64 {
        let plain = self.integrate(&f);
        let moved = self.integrate(|g| f(&translator.compose(g)));
        (moved - plain).abs()
    }

    /// Largest [`invariance_defect`](Self::invariance_defect) over every
    /// monomial of degree `≤ degree` in the real and imaginary parts of the
    /// matrix entries, and over `translators`.
    pub fn polynomial_invariance_defect(&self, degree: usize, translators: &[GroupElement]) -> f64 {
        let Some(first) = self.nodes.first() else {
            return 0.0;
        };
        let complex = self.nodes.iter().any(|g| g.matrix().iter().any(|z| z.im != 0.0));
        let n = first.matrix().nrows();
        let fill = |m: &[Complex64], x: &mut Vec<f64>| {
            x.clear();
            x.push(1.0);
            x.extend(m.iter().map(|z| z.re));
            if complex {
                x.extend(m.iter().map(|z| z.im));
            }
        };
        let mut x = Vec::new();
        fill(first.matrix().as_slice(), &mut x);
        let count = monomial_count(x.len(), degree);
        let mut base = vec![0.0; count];
        for (g, w) in self.nodes.iter().zip(&self.weights) {
            fill(g.matrix().as_slice(), &mut x);
            add_monomials(&x, *w, degree, &mut base);
        }
        let mut worst: f64 = 0.0;
        let mut prod = vec![Complex64::new(0.0, 0.0); n * n];
        for t in translators {
            let tm = t.matrix();
            let mut acc = vec![0.0; count];
            for (g, w) in self.nodes.iter().zip(&self.weights) {
                let gm = g.matrix();
                // column-major, like the storage of `Mat`
                for j in 0..n {
                    for i in 0..n {
                        prod[i + j * n] = (0..n).map(|k| tm[(i, k)] * gm[(k, j)]).sum();
                    }
                }
                fill(&prod, &mut x);
                add_monomials(&x, *w, degree, &mut acc);
            }
            worst = acc.iter().zip(&base).fold(worst, |m, (a, b)| m.max((a - b).abs()));
        }
        worst
    }

    /// The same weights on the image nodes, i.e. the pushforward measure.
    pub fn pushforward(&self, map: impl Fn(&GroupElement) -> GroupElement) -> HaarQuadrature {
        HaarQuadrature {
            nodes: self.nodes.iter().map(map).collect(),
            weights: self.weights.clone(),
            resolution: self.resolution,
        }
    }
}

/// Number of non-decreasing index tuples of length `k` over `0..n`.
fn monomial_count(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n + i) / (i + 1))
}

/// Adds `w·x_{i₁}⋯x_{i_k}` for every non-decreasing index tuple, in
/// lexicographic order.
fn add_monomials(x: &[f64], w: f64, k: usize, acc: &mut [f64]) {
    fn rec(x: &[f64], lo: usize, left: usize, prod: f64, acc: &mut [f64], idx: &mut usize) {
        if left == 0 {
            acc[*idx] += prod;
            *idx += 1;
            return;
        }
        if left == 1 {
            let tail = &x[lo..];
            for (a, xi) in acc[*idx..*idx + tail.len()].iter_mut().zip(tail) {
                *a += prod * xi;
            }
            *idx += tail.len();
            return;
        }
        for i in lo..x.len() {
            rec(x, i, left - 1, prod * x[i], acc, idx);
        }
    }
    rec(x, 0, k, w, acc, &mut 0);
}

/// Gauss–Legendre nodes and weights on `[a, b]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[i] = mid - half * z;
        x[n - 1 - i] = mid + half * z;
        let wi = 2.0 * half / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn circle_rule(resolution: usize) -> Vec<(f64, f64)> {
    (0..resolution)
        .map(|j| (2.0 * PI * j as f64 / resolution as f64, 1.0 / resolution as f64))
        .collect()
}

fn rotation_block(t: f64) -> [f64; 4] {
    [t.cos(), -t.sin(), t.sin(), t.cos()]
}

/// Raw SU2 nodes as quaternions `(a, b, c, d)` with weights.
fn su2_rule(resolution: usize) -> Vec<([f64; 4], f64)> {
    let (psi, wpsi) = gauss_legendre(resolution, 0.0, PI);
    let (theta, wtheta) = gauss_legendre(resolution, 0.0, PI);
    let phis = circle_rule(resolution);
    let mut out = Vec::with_capacity(resolution.pow(3));
    for (p, wp) in psi.iter().zip(&wpsi) {
        for (t, wt) in theta.iter().zip(&wtheta) {
            for (f, wf) in &phis {
                let q = [
                    p.cos(),
                    p.sin() * t.cos(),
                    p.sin() * t.sin() * f.cos(),
                    p.sin() * t.sin() * f.sin(),
                ];
                out.push((q, wp * wt * wf * p.sin().powi(2) * t.sin()));
            }
        }
    }
    let total: f64 = out.iter().map(|(_, w)| w).sum();
    for (_, w) in out.iter_mut() {
        *w /= total;
    }
    out
}

fn su2_matrix(q: &[f64; 4]) -> Mat {
    let [a, b, cc, d] = *q;
    Mat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(a, b),
            Complex64::new(cc, d),
            Complex64::new(-cc, d),
            Complex64::new(a, -b),
        ],
    )
}

/// Rotation matrix of a unit quaternion (the double cover `SU2 → SO3`).
pub fn so3_from_quaternion(q: &[f64; 4]) -> Mat {
    let [w, x, y, z] = *q;
    let r = [
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - z * w),
        2.0 * (x * z + y * w),
        2.0 * (x * y + z * w),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - x * w),
        2.0 * (x * z - y * w),
        2.0 * (y * z + x * w),
        1.0 - 2.0 * (x * x + y * y),
    ];
    Mat::from_row_iterator(3, 3, r.iter().map(|v| c(*v)))
}

fn factor_rule(kind: &GroupKind, resolution: usize) -> Result<Vec<(Mat, f64)>> {
    match kind {
        GroupKind::Torus(n) => {
            let circle = circle_rule(resolution);
            let mut rule: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
            for _ in 0..*n {
                rule = rule
                    .into_iter()
                    .flat_map(|(angles, w)| {
                        circle.iter().map(move |(t, wt)| {
                            let mut a = angles.clone();
                            a.push(*t);
                            (a, w * wt)
                        })
                    })
                    .collect();
            }
            Ok(rule
                .into_iter()
                .map(|(angles, w)| {
                    let mut m = Mat::zeros(2 * n, 2 * n);
                    for (b, t) in angles.iter().enumerate() {
                        let r = rotation_block(*t);
                        m[(2 * b, 2 * b)] = c(r[0]);
                        m[(2 * b, 2 * b + 1)] = c(r[1]);
                        m[(2 * b + 1, 2 * b)] = c(r[2]);
                        m[(2 * b + 1, 2 * b + 1)] = c(r[3]);
                    }
                    (m, w)
                })
                .collect())
        }
        GroupKind::So(2) => Ok(circle_rule(resolution)
            .into_iter()
            .map(|(t, w)| {
                let r = rotation_block(t);
                (Mat::from_row_iterator(2, 2, r.iter().map(|v| c(*v))), w)
            })
            .collect()),
        GroupKind::Su2 => Ok(su2_rule(resolution)
            .into_iter()
            .map(|(q, w)| (su2_matrix(&q), w))
            .collect()),
        GroupKind::So3 => Ok(su2_rule(resolution)
            .into_iter()
            .map(|(q, w)| (so3_from_quaternion(&q), w))
            .collect()),
        GroupKind::Product(factors) => {
            let mut rule: Vec<(Vec<Mat>, f64)> = vec![(Vec::new(), 1.0)];
            for f in factors {
                let fr = factor_rule(f, resolution)?;
                rule = rule
                    .into_iter()
                    .flat_map(|(blocks, w)| {
                        fr.iter().map(move |(m, wf)| {
                            let mut b = blocks.clone();
                            b.push(m.clone());
                            (b, w * wf)
                        })
                    })
                    .collect();
            }
            let n = kind.ambient_dim();
            Ok(rule
                .into_iter()
                .map(|(blocks, w)| {
                    let mut m = Mat::zeros(n, n);
                    let mut offset = 0;
                    for b in blocks {
                        let d = b.nrows();
                        m.view_mut((offset, offset), (d, d)).copy_from(&b);
                        offset += d;
                    }
                    (m, w)
                })
                .collect())
        }
        other if other.is_compact() => Err(LabError::Unsupported(format!(
            "no Haar quadrature implemented for {other}"
        ))),
        other => Err(LabError::Unsupported(format!(
            "{other} is not compact; it has no normalized Haar measure"
        ))),
    }
}

pub fn haar_quadrature(
    descriptor: &Arc<GroupDescriptor>,
    resolution: usize,
) -> Result<HaarQuadrature> {
    if resolution == 0 {
        return Err(LabError::InvalidConfig("quadrature resolution must be positive".into()));
    }
    let rule = factor_rule(descriptor.kind(), resolution)?;
    let (nodes, weights) = rule
        .into_iter()
        .map(|(m, w)| (GroupElement::new_unchecked(m, descriptor), w))
        .unzip();
    Ok(HaarQuadrature {
        nodes,
        weights,
        resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5, -1.0, 1.0);
        let int = |p: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum::<f64>();
        assert!((int(0) - 2.0).abs() < 1e-14);
        assert!((int(8) - 2.0 / 9.0).abs() < 1e-14);
        assert!(int(9).abs() < 1e-14);
        let (x1, w1) = gauss_legendre(1, 0.0, 2.0);
        assert!((x1[0] - 1.0).abs() < 1e-15 && (w1[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn normalization() {
        for d in [
            GroupDescriptor::torus(1),
            GroupDescriptor::torus(2),
            GroupDescriptor::su2(),
            GroupDescriptor::so3(),
        ] {
            let q = haar_quadrature(&d, 8).unwrap();
            assert!((q.total_weight() - 1.0).abs() < 1e-12, "{}", d.name());
            assert!(q.weights().iter().all(|w| *w >= 0.0));
            assert!(q.integrate(|_| 1.0) - 1.0 < 1e-12);
        }
    }

    #[test]
    fn uniform_circle_kills_cosine() {
        let t = GroupDescriptor::torus(1);
        for n in [2, 3, 7, 32] {
            let q = haar_quadrature(&t, n).unwrap();
            assert!(q.integrate(|g| g.matrix()[(0, 0)].re).abs() < 1e-15);
        }
    }

    #[test]
    fn su2_peter_weyl_entry_vanishes() {
        let q = haar_quadrature(&GroupDescriptor::su2(), 16).unwrap();
        let re = q.integrate(|g| g.matrix()[(0, 0)].re);
        let im = q.integrate(|g| g.matrix()[(0, 0)].im);
        assert!(re.abs() < 1e-10 && im.abs() < 1e-10);
        // |g11|² integrates to 1/2 (dimension of the defining representation)
        let sq = q.integrate(|g| g.matrix()[(0, 0)].norm_sqr());
        assert!((sq - 0.5).abs() < 1e-12);
    }

    #[test]
    fn so3_nodes_are_rotations() {
        let d = GroupDescriptor::so3();
        let q = haar_quadrature(&d, 16).unwrap();
        assert!(q.nodes().iter().all(|g| g.membership_residual() < 1e-12));
        // ∫ tr(R) dR = 0 for the defining representation
        assert!(q.integrate(|g| g.matrix().trace().re).abs() < 1e-12);
    }

    #[test]
    fn non_compact_is_unsupported() {
        for d in [GroupDescriptor::heisenberg3(), GroupDescriptor::gl(2), GroupDescriptor::so(4)] {
            assert!(matches!(haar_quadrature(&d, 4), Err(LabError::Unsupported(_))));
        }
    }
}
