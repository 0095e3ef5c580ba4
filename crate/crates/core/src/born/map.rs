//! Far-zone spectral density on an angular grid.

use rayon::prelude::*;

use super::{ntilde, IncidentPlaneWave};
use crate::error::{Error, Result};
use crate::geometry::{unit_from_spherical, Vec3};
use crate::media::MediumModel;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `S_i N~(K)` at unit radius.
    Absolute,
    /// Divided by the largest value on the grid.
    PeakNormalized,
    /// `N~(K) / N~(0)`: the angular factor multiplying the forward-scattered density.
    PositionDependent,
}

/// `values[i][j]` belongs to `(thetas[i], phis[j])`, angles in radians.
#[derive(Clone, Debug)]
pub struct SpectralMap<T> {
    pub thetas: Vec<T>,
    pub phis: Vec<T>,
    pub values: Vec<Vec<T>>,
    pub normalization: Normalization,
    pub k: T,
    pub s0: Vec3<T>,
    pub medium: String,
}

impl<T: Scalar> SpectralMap<T> {
    /// Grid point with the largest value, as `(theta, phi, value)`.
    pub fn peak(&self) -> (T, T, T) {
        let mut best = (self.thetas[0], self.phis[0], self.values[0][0]);
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v > best.2 {
                    best = (self.thetas[i], self.phis[j], *v);
                }
            }
        }
        best
    }

    /// `max_phi / min_phi` for each theta row.
    pub fn azimuthal_ratio(&self) -> Vec<T> {
        self.values
            .iter()
            .map(|row| {
                let hi = row.iter().fold(T::neg_infinity(), |m, v| m.max(*v));
                let lo = row.iter().fold(T::infinity(), |m, v| m.min(*v));
                hi / lo
            })
            .collect()
    }
}

fn check_grid<T: Scalar>(name: &str, g: &[T]) -> Result<()> {
    if g.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} grid is empty")));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name} grid has non-finite entries")));
    }
    if g.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(format!("{name} grid must be strictly increasing")));
    }
    Ok(())
}

/// Evaluates the scattered spectral density over `thetas x phis` (spherical angles of `s`
/// about the fixed lab z axis).
pub fn spectral_map<T: Scalar>(
    model: &MediumModel<T>,
    wave: &IncidentPlaneWave<T>,
    thetas: &[T],
    phis: &[T],
    normalization: Normalization,
) -> Result<SpectralMap<T>> {
    check_grid("theta", thetas)?;
    check_grid("phi", phis)?;
    if thetas[0] < T::zero() || thetas[thetas.len() - 1] > T::PI() {
        return Err(Error::InvalidGrid("theta must lie in [0, pi]".into()));
    }
    let mut values: Vec<Vec<T>> = thetas
        .par_iter()
        .map(|&th| {
            phis.iter()
                .map(|&ph| {
                    let k = wave.momentum(unit_from_spherical(th, ph));
                    ntilde(model, k).map(|n| n * wave.spectral_density)
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    let denom = match normalization {
        Normalization::Absolute => T::one(),
        Normalization::PeakNormalized => {
            let peak = values.iter().flatten().fold(T::zero(), |m, v| m.max(*v));
            if !(peak > T::zero()) {
                return Err(Error::ZeroDenominator);
            }
            peak
        }
        Normalization::PositionDependent => {
            let n0 = ntilde(model, Vec3::zero())? * wave.spectral_density;
            if !(n0 > T::zero()) {
                return Err(Error::ZeroDenominator);
            }
            n0
        }
    };
    if denom != T::one() {
        values.iter_mut().flatten().for_each(|v| *v = *v / denom);
    }
    Ok(SpectralMap {
        thetas: thetas.to_vec(),
        phis: phis.to_vec(),
        values,
        normalization,
        k: wave.geometry.k(),
        s0: wave.direction().vec(),
        medium: model.describe(),
    })
}
