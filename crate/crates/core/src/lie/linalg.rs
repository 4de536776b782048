//! Dense complex matrix helpers shared by every group in the catalog.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Ambient matrix type. Real groups are stored with zero imaginary parts.
pub type Mat = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn ci(im: f64) -> Complex64 {
    Complex64::new(0.0, im)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Mat {
    Mat::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
}

/// Frobenius inner product `Re tr(a^H b)`.
pub fn frobenius_inner(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn frobenius_norm(a: &Mat) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn imaginary_norm(a: &Mat) -> f64 {
    a.iter().map(|x| x.im * x.im).sum::<f64>().sqrt()
}

pub fn real_part(a: &Mat) -> Mat {
    a.map(|x| c(x.re))
}

pub fn scale(a: &Mat, s: f64) -> Mat {
    a * c(s)
}

/// Matrix exponential (Padé scaling and squaring).
pub fn expm(a: &Mat) -> Mat {
    a.clone().exp()
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm(a: &Mat) -> Result<Mat> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| LabError::Domain("square root iteration hit a singular matrix".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| LabError::Domain("square root iteration hit a singular matrix".into()))?;
        let y_next = (&y + z_inv) * c(0.5);
        let z_next = (&z + y_inv) * c(0.5);
        let change = frobenius_norm(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if change <= 1e-15 * frobenius_norm(&y).max(1.0) {
            return Ok(y);
        }
    }
    Err(LabError::Domain(
        "square root iteration did not converge (eigenvalue on the negative real axis?)".into(),
    ))
}

/// Principal logarithm by inverse scaling and squaring followed by the
/// Mercator series of `log(I + E)` with `‖E‖_F ≤ 1/4`.
pub fn logm(a: &Mat) -> Result<Mat> {
    let n = a.nrows();
    let id = identity(n);
    let mut x = a.clone();
    let mut halvings = 0u32;
    while frobenius_norm(&(&x - &id)) > 0.25 {
        x = sqrtm(&x)?;
        halvings += 1;
        if halvings > 60 {
            return Err(LabError::Domain("logarithm did not reach the identity basin".into()));
        }
    }
    let e = &x - &id;
    let mut power = e.clone();
    let mut sum = e.clone();
    for k in 2..=80 {
        power = &power * &e;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let term = &power * c(sign / k as f64);
        let size = frobenius_norm(&term);
        sum += term;
        if size < 1e-18 {
            break;
        }
    }
    Ok(sum * c(2f64.powi(halvings as i32)))
}

/// Unitary polar factor `U V^H` of `m = U Σ V^H`.
pub fn polar_unitary(m: &Mat) -> Result<Mat> {
    let svd = m.clone().svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(LabError::Domain("SVD failed during polar decomposition".into())),
    };
    if svd.singular_values.iter().any(|s| *s <= 1e-12) {
        return Err(LabError::Singular);
    }
    Ok(u * v_t)
}

/// Minimum-norm least-squares solve of `a x ≈ b` through the SVD. Returns the
/// solution and whether any singular value fell below the relative cutoff.
pub fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, bool) {
    let cols = a.ncols();
    if a.nrows() == 0 || cols == 0 {
        return (DVector::zeros(cols), cols > 0);
    }
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = 1e-10 * sigma_max.max(1e-300);
    let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
    let rank_deficient = rank < cols;
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut x = DVector::zeros(cols);
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > cutoff {
            let coeff = u.column(k).dot(b) / s;
            x += v_t.row(k).transpose() * coeff;
        }
    }
    (x, rank_deficient)
}
