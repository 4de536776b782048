//! Time-dependent flows on matrix groups: classical RK4 with a retraction
//! after every step, and interpolation of grid data at RK4 stage times.

use nalgebra::DVector;

use crate::error::{LabError, Result};
use crate::lie::linalg::c;
use crate::lie::{GroupElement, Mat};

/// Integrates `ẋ = field(t, x)` along `grid` from `x(grid[0]) = start`.
///
/// The field is always evaluated at group points (stage points are
/// retracted first) and the state is retracted after every step. The grid
/// may be decreasing. Returns one element per grid node.
pub fn integrate<F>(start: &GroupElement, grid: &[f64], mut field: F) -> Result<Vec<GroupElement>>
where
    F: FnMut(f64, &GroupElement) -> Result<Mat>,
{
    let desc = start.descriptor().clone();
    let mut out = Vec::with_capacity(grid.len());
    out.push(start.clone());
    for w in grid.windows(2) {
        let (t, t1) = (w[0], w[1]);
        let h = t1 - t;
        let x = out.last().expect("non-empty").clone();
        let diverged = |_| LabError::FlowDiverged { eps: t1 };
        let stage = |m: Mat| GroupElement::project(&m, &desc).map_err(diverged);

        let k1 = field(t, &x)?;
        let x2 = stage(x.matrix() + &k1 * c(0.5 * h))?;
        let k2 = field(t + 0.5 * h, &x2)?;
        let x3 = stage(x.matrix() + &k2 * c(0.5 * h))?;
        let k3 = field(t + 0.5 * h, &x3)?;
        let x4 = stage(x.matrix() + &k3 * c(h))?;
        let k4 = field(t1, &x4)?;
        let incr = (k1 + (k2 + k3) * c(2.0) + k4) * c(h / 6.0);
        out.push(stage(x.matrix() + incr)?);
    }
    Ok(out)
}

/// `n + 1` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![a];
    }
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}

/// Cubic Lagrange interpolation through the four grid nodes nearest to `t`
/// (fewer when the grid is shorter). `grid` must be strictly monotone.
pub fn interpolate(grid: &[f64], values: &[DVector<f64>], t: f64) -> DVector<f64> {
    assert_eq!(grid.len(), values.len());
    assert!(!grid.is_empty());
    let n = grid.len();
    if n == 1 {
        return values[0].clone();
    }
    let increasing = grid[n - 1] > grid[0];
    // index of the last node not past t
    let pos = grid.partition_point(|&g| if increasing { g <= t } else { g >= t });
    let i = pos.saturating_sub(1).min(n - 2);
    let width = n.min(4);
    let lo = (i + 1).saturating_sub(width / 2).min(n - width);
    let idx = lo..lo + width;
    let mut acc = DVector::zeros(values[0].len());
    for j in idx.clone() {
        if grid[j] == t {
            return values[j].clone();
        }
        let mut l = 1.0;
        for m in idx.clone() {
            if m != j {
                l *= (t - grid[m]) / (grid[j] - grid[m]);
            }
        }
        acc += &values[j] * l;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{AlgebraVector, GroupDescriptor};

    #[test]
    fn linspace_endpoints_are_exact() {
        let g = linspace(0.0, 0.5, 50);
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[50], 0.5);
        assert_eq!(linspace(1.0, 2.0, 0), vec![1.0]);
    }

    #[test]
    fn interpolation_is_exact_on_cubics() {
        let grid = linspace(0.0, 1.0, 10);
        let f = |t: f64| 1.0 - 2.0 * t + 3.0 * t * t - 0.5 * t * t * t;
        let vals: Vec<_> = grid.iter().map(|&t| DVector::from_element(1, f(t))).collect();
        for t in [0.0, 0.013, 0.5, 0.55, 0.97, 1.0] {
            assert!((interpolate(&grid, &vals, t)[0] - f(t)).abs() < 1e-13);
        }
        let rev: Vec<f64> = grid.iter().rev().copied().collect();
        let rvals: Vec<_> = vals.iter().rev().cloned().collect();
        assert!((interpolate(&rev, &rvals, 0.37)[0] - f(0.37)).abs() < 1e-13);
    }

    #[test]
    fn constant_generator_flow_is_exponential() {
        let so3 = GroupDescriptor::so3();
        let a = AlgebraVector::from_slice(&[0.3, -0.7, 1.1], &so3);
        let grid = linspace(0.0, 0.5, 100);
        let path = integrate(&GroupElement::identity(&so3), &grid, |_, x| {
            Ok(a.matrix() * x.matrix())
        })
        .unwrap();
        let last = path.last().unwrap();
        let exact = a.scaled(0.5).exp();
        assert!(last.distance(&exact).unwrap() < 1e-10);
        assert!(last.membership_residual() < 1e-12);
    }

    #[test]
    fn backward_integration_inverts_forward() {
        let su2 = GroupDescriptor::su2();
        let a = AlgebraVector::from_slice(&[0.4, 0.1, -0.2], &su2);
        let b = AlgebraVector::from_slice(&[-0.3, 0.5, 0.2], &su2);
        let field = |t: f64, x: &GroupElement| Ok((a.matrix() + b.matrix() * c(t)) * x.matrix());
        let grid = linspace(0.0, 0.8, 64);
        let start = GroupElement::identity(&su2);
        let fwd = integrate(&start, &grid, field).unwrap();
        let rev: Vec<f64> = grid.iter().rev().copied().collect();
        let back = integrate(fwd.last().unwrap(), &rev, field).unwrap();
        assert!(back.last().unwrap().distance(&start).unwrap() < 1e-9);
    }

    #[test]
    fn leaving_the_basin_is_reported() {
        let so3 = GroupDescriptor::so3();
        let a = AlgebraVector::from_slice(&[10.0, 0.0, 0.0], &so3);
        let err = integrate(&GroupElement::identity(&so3), &[0.0, 3.0], |_, x| {
            Ok(a.matrix() * x.matrix())
        });
        assert!(matches!(err, Err(LabError::FlowDiverged { eps }) if eps == 3.0));
    }
}
