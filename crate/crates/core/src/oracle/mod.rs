//! Independent ground truth for the closed forms: direct quadrature of the pair transform,
//! Monte-Carlo synthesis of medium realizations, and a Gram-matrix genuineness check.
//!
//! Everything here is `f64`.

mod integrate;
mod psd;
mod sampler;

pub use integrate::{
    ctilde_bochner_quadrature, ctilde_quadrature, ctilde_quadrature_detailed, ctilde_separable, QuadratureEstimate,
    QuadratureRule, QuadratureSpec, SeparableCorrelation, MAX_GENERIC_EVALUATIONS, MAX_SEPARABLE_NODES,
};
pub use psd::{gram_psd_check, PsdReport, MAX_GRAM_POINTS};
pub use sampler::{
    classify_with_realizations, ensemble_estimate, estimate_correlation, estimate_correlation_batch,
    realization_evenness_check, sample_realization, sample_realization_indexed, symmetric_grid, write_realization_csv,
    EnsembleEstimate, EvennessReport, RealizationField,
};
