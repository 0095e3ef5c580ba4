//! Realizations `F(r) = sum_j sqrt(W_j) xi_j H(r, v_j)` with real standard-normal `xi_j`.
//!
//! Real deviates keep `<F F>` nonzero (the anti-strength) and make every realization of a PT
//! kernel PT-symmetric. Realization `i` draws from ChaCha stream `i` of the master seed, so a
//! field depends only on `(seed, index, model, grid)`.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::media::{classify_symmetry, BochnerModel, SymmetryKind, SymmetryReport};

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationField {
    pub points: Vec<Vec3<f64>>,
    pub values: Vec<Complex64>,
    pub seed: u64,
    pub index: u64,
}

fn deviates(seed: u64, index: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    StandardNormal.sample_iter(&mut rng).take(n).collect()
}

/// `sqrt(W_j) H(r, v_j)` for every point (rows) and node (columns).
fn basis(model: &BochnerModel<f64>, points: &[Vec3<f64>]) -> Vec<Vec<Complex64>> {
    let g = model.grid();
    points
        .par_iter()
        .map(|r| g.nodes.iter().zip(&g.weights).map(|(v, w)| model.kernel().eval(*r, *v) * w.sqrt()).collect())
        .collect()
}

fn synthesize(basis: &[Vec<Complex64>], xi: &[f64]) -> Vec<Complex64> {
    basis.iter().map(|row| row.iter().zip(xi).fold(Complex64::new(0.0, 0.0), |acc, (h, x)| acc + h * *x)).collect()
}

pub fn sample_realization_indexed(
    model: &BochnerModel<f64>,
    points: &[Vec3<f64>],
    seed: u64,
    index: u64,
) -> RealizationField {
    let b = basis(model, points);
    let xi = deviates(seed, index, model.grid().len());
    RealizationField { points: points.to_vec(), values: synthesize(&b, &xi), seed, index }
}

/// Realization 0 of the ensemble seeded by `seed`.
pub fn sample_realization(model: &BochnerModel<f64>, points: &[Vec3<f64>], seed: u64) -> RealizationField {
    sample_realization_indexed(model, points, seed, 0)
}

/// Centred cubic grid with `n` points per axis on `[-half_width, half_width]`, closed under
/// `r -> -r` bit for bit.
pub fn symmetric_grid(n: usize, half_width: f64) -> Result<Vec<Vec3<f64>>> {
    let rule = crate::quadrature::Rule::trapezoid(n, half_width)?;
    let mut out = Vec::with_capacity(n * n * n);
    for x in &rule.nodes {
        for y in &rule.nodes {
            for z in &rule.nodes {
                out.push(Vec3::new(*x, *y, *z));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleEstimate {
    pub mean: Complex64,
    /// `max(std Re, std Im) / sqrt(n)`, sample standard deviation with `n - 1`.
    pub stderr: f64,
    pub n: usize,
}

impl EnsembleEstimate {
    /// `|mean - target|` in units of the standard error.
    pub fn z_score(&self, target: Complex64) -> f64 {
        let d = (self.mean - target).norm();
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn summarize(samples: &[Complex64]) -> EnsembleEstimate {
    let n = samples.len();
    let nf = n as f64;
    let re: Vec<f64> = samples.iter().map(|c| c.re).collect();
    let im: Vec<f64> = samples.iter().map(|c| c.im).collect();
    let (mr, mi) = (pairwise_sum(&re) / nf, pairwise_sum(&im) / nf);
    let vr: Vec<f64> = re.iter().map(|x| (x - mr) * (x - mr)).collect();
    let vi: Vec<f64> = im.iter().map(|x| (x - mi) * (x - mi)).collect();
    let sr = (pairwise_sum(&vr) / (nf - 1.0)).sqrt();
    let si = (pairwise_sum(&vi) / (nf - 1.0)).sqrt();
    EnsembleEstimate { mean: Complex64::new(mr, mi), stderr: sr.max(si) / nf.sqrt(), n }
}

/// Ensemble statistics of `statistic(F(points))` over realizations `0..n`.
///
/// Returns one estimate per statistic output. Realizations are generated in parallel but
/// reduced in index order, so the result does not depend on the thread count.
pub fn ensemble_estimate<S>(
    model: &BochnerModel<f64>,
    points: &[Vec3<f64>],
    n: usize,
    seed: u64,
    statistic: S,
) -> Result<Vec<EnsembleEstimate>>
where
    S: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
{
    if n < 2 {
        return Err(Error::param("an ensemble needs at least 2 realizations"));
    }
    let b = basis(model, points);
    let per: Vec<Vec<Complex64>> = (0..n as u64)
        .into_par_iter()
        .map(|i| statistic(&synthesize(&b, &deviates(seed, i, model.grid().len()))))
        .collect();
    let width = per[0].len();
    if per.iter().any(|s| s.len() != width) {
        return Err(Error::param("statistic must return a fixed number of values"));
    }
    Ok((0..width).map(|k| summarize(&per.iter().map(|s| s[k]).collect::<Vec<_>>())).collect())
}

/// `<F*(r1) F(r2)>` over `n >= 100` realizations.
pub fn estimate_correlation(
    model: &BochnerModel<f64>,
    r1: Vec3<f64>,
    r2: Vec3<f64>,
    n: usize,
    seed: u64,
) -> Result<EnsembleEstimate> {
    Ok(estimate_correlation_batch(model, &[(r1, r2)], n, seed)?[0])
}

/// Correlation estimates for many pairs from one shared set of realizations.
pub fn estimate_correlation_batch(
    model: &BochnerModel<f64>,
    pairs: &[(Vec3<f64>, Vec3<f64>)],
    n: usize,
    seed: u64,
) -> Result<Vec<EnsembleEstimate>> {
    if n < 100 {
        return Err(Error::param("correlation estimates need at least 100 realizations"));
    }
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let points: Vec<Vec3<f64>> = pairs.iter().flat_map(|(a, b)| [*a, *b]).collect();
    ensemble_estimate(model, &points, n, seed, |f| f.chunks(2).map(|p| p[0].conj() * p[1]).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvennessReport {
    /// Largest `|F*(-r) - F(r)|` over all realizations and points.
    pub pt_violation: f64,
    /// Largest `|F(-r) - F(r)|`.
    pub even_violation: f64,
    /// Largest `|F(r)|`, for scale.
    pub max_abs: f64,
    pub realizations: usize,
}

impl EvennessReport {
    pub fn kind(&self, tol: f64) -> SymmetryKind {
        let t = tol * self.max_abs.max(f64::MIN_POSITIVE);
        match (self.even_violation <= t, self.pt_violation <= t) {
            (true, true) => SymmetryKind::Both,
            (true, false) => SymmetryKind::Classic,
            (false, true) => SymmetryKind::Pt,
            (false, false) => SymmetryKind::Neither,
        }
    }
}

/// Bit pattern with `-0.0` folded onto `0.0`.
fn bits(p: Vec3<f64>) -> [u64; 3] {
    p.to_array().map(|x| (x + 0.0).to_bits())
}

fn mirror_index(points: &[Vec3<f64>]) -> Result<Vec<usize>> {
    let mut sorted: Vec<(usize, [u64; 3])> = points.iter().enumerate().map(|(i, p)| (i, bits(*p))).collect();
    sorted.sort_by_key(|e| e.1);
    points
        .iter()
        .map(|p| {
            let key = bits(-*p);
            sorted
                .binary_search_by_key(&key, |e| e.1)
                .map(|k| sorted[k].0)
                .map_err(|_| Error::InvalidGrid("grid is not closed under r -> -r".into()))
        })
        .collect()
}

/// Per-realization parity violations over realizations `0..n`.
pub fn realization_evenness_check(
    model: &BochnerModel<f64>,
    grid: &[Vec3<f64>],
    n: usize,
    seed: u64,
) -> Result<EvennessReport> {
    if n == 0 || grid.is_empty() {
        return Err(Error::param("evenness check needs realizations and grid points"));
    }
    let mirror = mirror_index(grid)?;
    let b = basis(model, grid);
    let per: Vec<(f64, f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let f = synthesize(&b, &deviates(seed, i, model.grid().len()));
            let mut out = (0.0f64, 0.0f64, 0.0f64);
            for (k, m) in mirror.iter().enumerate() {
                out.0 = out.0.max((f[*m].conj() - f[k]).norm());
                out.1 = out.1.max((f[*m] - f[k]).norm());
                out.2 = out.2.max(f[k].norm());
            }
            out
        })
        .collect();
    let fold = |sel: fn(&(f64, f64, f64)) -> f64| per.iter().map(sel).fold(0.0, f64::max);
    Ok(EvennessReport {
        pt_violation: fold(|t| t.0),
        even_violation: fold(|t| t.1),
        max_abs: fold(|t| t.2),
        realizations: n,
    })
}

/// Correlation-level classification on mirror pairs of `grid`, plus the realization-level
/// verdict from `n` sampled fields.
pub fn classify_with_realizations(
    model: &BochnerModel<f64>,
    grid: &[Vec3<f64>],
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<SymmetryReport> {
    if grid.len() < 2 {
        return Err(Error::param("classification needs at least two grid points"));
    }
    let probes: Vec<(Vec3<f64>, Vec3<f64>)> = grid.iter().zip(grid.iter().rev()).map(|(a, b)| (*a, *b)).collect();
    let report = classify_symmetry(model, &probes, tol);
    let ev = realization_evenness_check(model, grid, n, seed)?;
    Ok(report.with_realization(ev.kind(tol)))
}

/// CSV with columns `x,y,z,re,im`, 17 significant digits.
pub fn write_realization_csv<W: Write>(field: &RealizationField, mut w: W) -> io::Result<()> {
    writeln!(w, "x,y,z,re,im")?;
    for (p, f) in field.points.iter().zip(&field.values) {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z, f.re, f.im)?;
    }
    Ok(())
}
