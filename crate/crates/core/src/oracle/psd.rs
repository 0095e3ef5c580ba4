use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::media::CorrelationModel;

pub const MAX_GRAM_POINTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub trace: f64,
    pub size: usize,
    pub tol: f64,
    pub pass: bool,
}

impl PsdReport {
    /// Smallest eigenvalue over the mean diagonal entry.
    pub fn normalized_min(&self) -> f64 {
        self.min_eigenvalue / (self.trace / self.size as f64)
    }
}

/// Eigenvalues of the Hermitian Gram matrix `G_ij = C(r_i, r_j)`; passes iff the smallest is
/// at least `-tol * trace / size`.
pub fn gram_psd_check<M: CorrelationModel<f64> + ?Sized>(
    model: &M,
    points: &[Vec3<f64>],
    tol: f64,
) -> Result<PsdReport> {
    let n = points.len();
    if n == 0 || n > MAX_GRAM_POINTS {
        return Err(Error::param(format!("Gram check takes 1..={MAX_GRAM_POINTS} points")));
    }
    let g = DMatrix::<Complex64>::from_fn(n, n, |i, j| model.correlate(points[i], points[j]));
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let trace = (0..n).map(|i| h[(i, i)].re).sum::<f64>();
    let eig = h.symmetric_eigenvalues();
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pass = min >= -tol * trace.abs() / n as f64;
    Ok(PsdReport { min_eigenvalue: min, max_eigenvalue: max, trace, size: n, tol, pass })
}
