//! Far-zone first-Born statistics for plane-wave illumination.
//!
//! Everything is expressed through the pair transform `C~(-K1, K2)`, where
//! `C~(k1, k2) = int int C(r1, r2) exp(-i(k1.r1 + k2.r2)) d^3r1 d^3r2` and
//! `K_j = k (s_j - s0)` are momentum transfers.

mod closed;
mod map;

pub use closed::{
    classic_sigma_sq, ctilde_cl_closed, ctilde_factored, ctilde_pt_closed, ctilde_pt_deterministic, pt_amplitude,
    pt_sigma_sq,
};
pub use map::{spectral_map, Normalization, SpectralMap};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{momentum_transfer, perpendicular, symmetric_pair, ScatteringGeometry, UnitDir, Vec3};
use crate::media::{geometric_mean, BochnerModel, MediumModel};
use crate::scalar::Scalar;

/// Monochromatic plane wave with position-independent spectral density.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidentPlaneWave<T> {
    pub spectral_density: T,
    pub geometry: ScatteringGeometry<T>,
}

impl<T: Scalar> IncidentPlaneWave<T> {
    pub fn new(spectral_density: T, geometry: ScatteringGeometry<T>) -> Result<Self> {
        if !(spectral_density >= T::zero()) || !spectral_density.is_finite() {
            return Err(Error::param("incident spectral density must be nonnegative"));
        }
        Ok(IncidentPlaneWave { spectral_density, geometry })
    }

    /// Unit-strength wave, `k` and `s0` as given.
    pub fn unit(k: T, s0: UnitDir<T>) -> Result<Self> {
        Self::new(T::one(), ScatteringGeometry::new(k, s0)?)
    }

    pub fn direction(&self) -> UnitDir<T> {
        self.geometry.s0()
    }

    pub fn momentum(&self, s: UnitDir<T>) -> Vec3<T> {
        momentum_transfer(&self.geometry, s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FarZonePoint<T> {
    r: T,
    s: UnitDir<T>,
}

impl<T: Scalar> FarZonePoint<T> {
    pub fn new(r: T, s: UnitDir<T>) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::param("far-zone radius must be positive"));
        }
        Ok(FarZonePoint { r, s })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn s(&self) -> UnitDir<T> {
        self.s
    }
}

fn ctilde_bochner<T: Scalar>(m: &BochnerModel<T>, k1: Vec3<T>, k2: Vec3<T>) -> Result<Complex<T>> {
    let grid = m.grid();
    let mut acc = Complex::new(T::zero(), T::zero());
    for (v, w) in grid.nodes.iter().zip(&grid.weights) {
        let (h1, h2) = match (m.kernel().fourier(k1, *v), m.kernel().fourier(k2, *v)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Unsupported(
                    "no analytic transform for sampled kernels; use the quadrature oracle".into(),
                ))
            }
        };
        acc = acc + h1.conj() * h2 * *w;
    }
    Ok(acc)
}

/// `C~(-K1, K2)` for any supported medium.
pub fn ctilde<T: Scalar>(model: &MediumModel<T>, k1: Vec3<T>, k2: Vec3<T>) -> Result<Complex<T>> {
    match model {
        MediumModel::PtSchell(m) => Ok(ctilde_pt_closed(m, k1, k2)),
        MediumModel::Classic(m) => Ok(ctilde_cl_closed(m, k1, k2)),
        MediumModel::Bochner(m) => ctilde_bochner(m, k1, k2),
    }
}

/// `N~(K) = C~(-K, K)`, real and nonnegative for every genuine correlation.
pub fn ntilde<T: Scalar>(model: &MediumModel<T>, k: Vec3<T>) -> Result<T> {
    Ok(ctilde(model, k, k)?.re)
}

/// Scattered cross-spectral density `W = (S_i / r^2) C~(-K1, K2)`.
pub fn ws_far<T: Scalar>(
    model: &MediumModel<T>,
    wave: &IncidentPlaneWave<T>,
    p1: &FarZonePoint<T>,
    p2: &FarZonePoint<T>,
) -> Result<Complex<T>> {
    if p1.r != p2.r {
        return Err(Error::MismatchedRadius(p1.r.to_f64_lossy(), p2.r.to_f64_lossy()));
    }
    ws_far_k(model, wave.spectral_density, p1.r, wave.momentum(p1.s), wave.momentum(p2.s))
}

/// Cross-spectral density for explicit momentum transfers, e.g. when the pair
/// originates from two different incident directions.
pub fn ws_far_k<T: Scalar>(
    model: &MediumModel<T>,
    spectral_density: T,
    r: T,
    k1: Vec3<T>,
    k2: Vec3<T>,
) -> Result<Complex<T>> {
    Ok(ctilde(model, k1, k2)? * (spectral_density / (r * r)))
}

/// Scattered spectral density `S = (S_i / r^2) N~(K)`.
pub fn spectral_density<T: Scalar>(
    model: &MediumModel<T>,
    wave: &IncidentPlaneWave<T>,
    p: &FarZonePoint<T>,
) -> Result<T> {
    let k = wave.momentum(p.s);
    Ok(ntilde(model, k)? * wave.spectral_density / (p.r * p.r))
}

/// Spectral degree of coherence between two far-zone directions.
pub fn mu_s<T: Scalar>(
    model: &MediumModel<T>,
    wave: &IncidentPlaneWave<T>,
    p1: &FarZonePoint<T>,
    p2: &FarZonePoint<T>,
) -> Result<Complex<T>> {
    if p1.r != p2.r {
        return Err(Error::MismatchedRadius(p1.r.to_f64_lossy(), p2.r.to_f64_lossy()));
    }
    mu_s_k(model, wave.momentum(p1.s), wave.momentum(p2.s))
}

/// `C~(-K1, K2) / sqrt(N~(K1) N~(K2))`.
pub fn mu_s_k<T: Scalar>(model: &MediumModel<T>, k1: Vec3<T>, k2: Vec3<T>) -> Result<Complex<T>> {
    let n1 = ntilde(model, k1)?;
    let n2 = if k1 == k2 { n1 } else { ntilde(model, k2)? };
    let floor = T::min_positive_value();
    if !(n1 > floor) || !(n2 > floor) {
        return Err(Error::ZeroDenominator);
    }
    Ok(ctilde(model, k1, k2)? / geometric_mean(n1, n2))
}

/// Degree of coherence at the mirror pair `(s, s - 2 n sin(theta))` whose members make the
/// angle `theta` with the incident direction. Depends only on `theta` for the shipped families.
pub fn mu_s_symmetric<T: Scalar>(model: &MediumModel<T>, wave: &IncidentPlaneWave<T>, theta: T) -> Result<Complex<T>> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::param("theta must lie in [0, pi]"));
    }
    let s0 = wave.direction();
    let n = perpendicular(s0);
    let (st, ct) = theta.sin_cos();
    let s = UnitDir::new(s0.vec() * ct + n.vec() * st)?;
    let (s1, s2) = match symmetric_pair(&wave.geometry, s) {
        Ok(pair) => pair,
        // theta = 0 or pi: both members coincide
        Err(Error::DegenerateDirection) => (s, s),
        Err(e) => return Err(e),
    };
    mu_s_k(model, wave.momentum(s1), wave.momentum(s2))
}
