//! Parameter sets of the published figures, in units where `a = 1`.

use std::fmt;
use std::str::FromStr;

use crate::born::IncidentPlaneWave;
use crate::error::{Error, Result};
use crate::geometry::{ScatteringGeometry, UnitDir, Vec3};
use crate::media::{ClassicQuadratic, MediumModel, PtSchellLinear};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig2e,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig2c,
        Figure::Fig2d,
        Figure::Fig2e,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig3c,
        Figure::Fig5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
            Figure::Fig2d => "fig2d",
            Figure::Fig2e => "fig2e",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig3c => "fig3c",
            Figure::Fig5 => "fig5",
        }
    }

    pub fn preset(self) -> FigurePreset {
        let fig2 = |g: [f64; 3]| FigurePreset::Spectrum(SpectrumPreset { ka: 1.0, d_over_a: 1.0, a_gamma: g });
        let fig3 = |d: f64| FigurePreset::Spectrum(SpectrumPreset { ka: 1.0, d_over_a: d, a_gamma: [1.0, 1.0, 1.0] });
        match self {
            Figure::Fig2a => fig2([0.0, 0.0, 0.0]),
            Figure::Fig2b => fig2([0.5, 0.0, 0.0]),
            Figure::Fig2c => fig2([1.0, 0.0, 0.0]),
            Figure::Fig2d => fig2([0.0, 0.5, 0.0]),
            Figure::Fig2e => fig2([0.0, 1.0, 0.0]),
            Figure::Fig3a => fig3(0.1),
            Figure::Fig3b => fig3(0.5),
            Figure::Fig3c => fig3(1.0),
            Figure::Fig5 => {
                FigurePreset::Coherence(CoherencePreset { ka: 1.0, alpha_over_k2: 2.0, d_over_a: vec![0.1, 1.0, 3.0] })
            }
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown figure '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FigurePreset {
    Spectrum(SpectrumPreset),
    Coherence(CoherencePreset),
}

/// PT spectral-density map, incident along `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumPreset {
    pub ka: f64,
    pub d_over_a: f64,
    pub a_gamma: [f64; 3],
}

impl SpectrumPreset {
    /// The whole phase is put on the realization amplitude; only `gamma` is observable.
    pub fn medium(&self) -> Result<MediumModel<f64>> {
        let m = PtSchellLinear::new(1.0, 1.0, self.d_over_a, Vec3::from_array(self.a_gamma), Vec3::zero())?;
        Ok(m.into())
    }

    pub fn wave(&self) -> Result<IncidentPlaneWave<f64>> {
        IncidentPlaneWave::new(1.0, ScatteringGeometry::new(self.ka, UnitDir::z())?)
    }
}

/// Symmetric-direction coherence curves for PT and classic media at several `d/a`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherencePreset {
    pub ka: f64,
    pub alpha_over_k2: f64,
    pub d_over_a: Vec<f64>,
}

impl CoherencePreset {
    pub fn pt_medium(&self, d_over_a: f64) -> Result<MediumModel<f64>> {
        Ok(PtSchellLinear::new(1.0, 1.0, d_over_a, Vec3::zero(), Vec3::zero())?.into())
    }

    pub fn classic_medium(&self, d_over_a: f64) -> Result<MediumModel<f64>> {
        let alpha = self.alpha_over_k2 * self.ka * self.ka;
        Ok(ClassicQuadratic::new(1.0, 1.0, d_over_a, alpha)?.into())
    }

    pub fn wave(&self) -> Result<IncidentPlaneWave<f64>> {
        IncidentPlaneWave::new(1.0, ScatteringGeometry::new(self.ka, UnitDir::z())?)
    }
}

/// Default map grid: `theta` in `0..=180` and `phi` in `0..360`, one-degree steps.
pub fn default_map_grid_deg() -> (Vec<f64>, Vec<f64>) {
    ((0..=180).map(f64::from).collect(), (0..360).map(f64::from).collect())
}

/// Default coherence scan: `theta` in `0..=90`, half-degree steps.
pub fn default_coherence_grid_deg() -> Vec<f64> {
    (0..=180).map(|i| 0.5 * f64::from(i)).collect()
}
