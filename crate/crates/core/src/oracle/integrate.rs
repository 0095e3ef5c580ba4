//! Direct quadrature of `C~(-K1, K2) = int int C(r1, r2) exp(i K1.r1 - i K2.r2) d^3r1 d^3r2`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::media::{BochnerModel, ClassicQuadratic, MediumModel, PtSchellLinear};
use crate::quadrature::Rule;

/// Hard cap on kernel evaluations for the non-separable route.
pub const MAX_GENERIC_EVALUATIONS: usize = 200_000_000;

/// Largest node count [`QuadratureSpec::for_separable`] picks; doubling stays within the
/// Gauss-Hermite table.
pub const MAX_SEPARABLE_NODES: usize = 256;

const CONVERGENCE_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Gauss-Hermite nodes matched to the Gaussian envelope; `extent` is unused.
    GaussHermite,
    /// Composite trapezoid over `[-extent, extent]` envelope widths.
    Trapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    /// Half-width of the integration box in units of the envelope width.
    pub extent: f64,
    pub rule: QuadratureRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes_per_axis: 48, extent: 8.0, rule: QuadratureRule::GaussHermite }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 8 {
            return Err(Error::param("quadrature needs at least 8 nodes per axis"));
        }
        if !(self.extent >= 5.0) || !self.extent.is_finite() {
            return Err(Error::param("quadrature extent must be at least 5 envelope widths"));
        }
        Ok(())
    }

    /// Default spec sized for `model`: chirped classic media need more nodes, generic Bochner
    /// media fewer, because they integrate in three dimensions.
    pub fn for_model(model: &MediumModel<f64>) -> Self {
        match model {
            MediumModel::PtSchell(m) => Self::for_separable(m),
            MediumModel::Classic(m) => Self::for_separable(m),
            MediumModel::Bochner(_) => QuadratureSpec { nodes_per_axis: 12, ..Self::default() },
        }
    }

    pub fn for_separable<S: SeparableCorrelation + ?Sized>(m: &S) -> Self {
        let c = m.chirp();
        let n = (48.0 + 12.0 * c * c).min(MAX_SEPARABLE_NODES as f64).ceil() as usize;
        QuadratureSpec { nodes_per_axis: n.div_ceil(8) * 8, ..Self::default() }
    }

    pub fn doubled(&self) -> Self {
        QuadratureSpec { nodes_per_axis: 2 * self.nodes_per_axis, ..*self }
    }

    fn rule(&self, sigma: f64) -> Result<Rule> {
        match self.rule {
            QuadratureRule::GaussHermite => Rule::gaussian_envelope(self.nodes_per_axis, sigma),
            QuadratureRule::Trapezoid => Rule::trapezoid(self.nodes_per_axis, self.extent * sigma),
        }
    }
}

/// Correlation that factors as `prefactor * prod_axis f_axis(x1, x2)`.
pub trait SeparableCorrelation: Sync {
    fn prefactor(&self) -> f64;
    /// Natural log of the axis factor; the real part is the log-magnitude.
    fn log_axis_factor(&self, axis: usize, x1: f64, x2: f64) -> Complex64;
    fn axis_factor(&self, axis: usize, x1: f64, x2: f64) -> Complex64 {
        self.log_axis_factor(axis, x1, x2).exp()
    }
    /// Gaussian widths of `|f_axis|` along `(x1 + x2)/sqrt 2` and `(x2 - x1)/sqrt 2`.
    fn envelope(&self) -> (f64, f64);
    /// Dimensionless strength of any quadratic phase across the envelope; drives node counts.
    fn chirp(&self) -> f64 {
        0.0
    }
}

fn cis(p: f64) -> Complex64 {
    let (s, c) = p.sin_cos();
    Complex64::new(c, s)
}

impl SeparableCorrelation for PtSchellLinear<f64> {
    fn prefactor(&self) -> f64 {
        self.i0() * self.i0()
    }

    fn log_axis_factor(&self, axis: usize, x1: f64, x2: f64) -> Complex64 {
        let a = self.a();
        let dx = x2 - x1;
        let mut expo = -(x1 * x1 + x2 * x2) / (2.0 * a * a);
        if let Some(d) = self.d() {
            expo -= dx * dx / (2.0 * d * d);
        }
        Complex64::new(expo, self.gamma().axis(axis) * dx)
    }

    fn envelope(&self) -> (f64, f64) {
        let a = self.a();
        let eta = match self.d() {
            Some(d) => (1.0 / (a * a) + 2.0 / (d * d)).powf(-0.5),
            None => a,
        };
        (a, eta)
    }
}

impl SeparableCorrelation for ClassicQuadratic<f64> {
    fn prefactor(&self) -> f64 {
        self.i0() * self.i0()
    }

    fn log_axis_factor(&self, _axis: usize, x1: f64, x2: f64) -> Complex64 {
        let (a, d) = (self.a(), self.d());
        let dx = x2 - x1;
        let expo = -(x1 * x1 + x2 * x2) / (2.0 * a * a) - dx * dx / (2.0 * d * d);
        Complex64::new(expo, self.alpha() * (x1 * x1 - x2 * x2))
    }

    fn envelope(&self) -> (f64, f64) {
        let (a, d) = (self.a(), self.d());
        (a, (1.0 / (a * a) + 2.0 / (d * d)).powf(-0.5))
    }

    fn chirp(&self) -> f64 {
        let (sx, se) = self.envelope();
        2.0 * self.alpha().abs() * sx * se
    }
}

/// `(value, int |integrand|)` for one axis.
///
/// Nodes are visited in mirror groups `{(xi, eta), (-xi, -eta)}` and `{(xi, -eta), (-xi, eta)}`
/// so that integrand symmetries under those reflections cancel exactly in floating point.
fn axis_integral<S: SeparableCorrelation + ?Sized>(
    m: &S,
    axis: usize,
    k1: f64,
    k2: f64,
    xi: &Rule,
    eta: &Rule,
) -> (Complex64, f64) {
    // value and magnitude of one integrand sample
    let f = |p: f64, q: f64| {
        let x1 = (p - q) * FRAC_1_SQRT_2;
        let x2 = (p + q) * FRAC_1_SQRT_2;
        let l = m.log_axis_factor(axis, x1, x2);
        let mag = l.re.exp();
        (cis(l.im + k1 * x1 - k2 * x2) * mag, mag)
    };
    let (nx, ne) = (xi.len(), eta.len());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for i in (nx / 2)..nx {
        let p = xi.nodes[i];
        for j in (ne / 2)..ne {
            let q = eta.nodes[j];
            let w = xi.weights[i] * eta.weights[j];
            let (group, mag) = match (p == 0.0, q == 0.0) {
                (true, true) => f(0.0, 0.0),
                (true, false) => pair(f(0.0, q), f(0.0, -q)),
                (false, true) => pair(f(p, 0.0), f(-p, 0.0)),
                (false, false) => {
                    let (a, b) = (f(p, q), f(-p, -q));
                    let (c, d) = (f(p, -q), f(-p, q));
                    ((a.0 + b.0) + (c.0 + d.0), (a.1 + b.1) + (c.1 + d.1))
                }
            };
            abs += w * mag;
            sum += group * w;
        }
    }
    (sum, abs)
}

fn pair(a: (Complex64, f64), b: (Complex64, f64)) -> (Complex64, f64) {
    (a.0 + b.0, a.1 + b.1)
}

fn separable_once<S: SeparableCorrelation + ?Sized>(
    m: &S,
    k1: Vec3<f64>,
    k2: Vec3<f64>,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let (sx, se) = m.envelope();
    let xi = spec.rule(sx)?;
    let eta = spec.rule(se)?;
    let mut value = Complex64::new(m.prefactor(), 0.0);
    let mut abs = m.prefactor();
    for ax in 0..3 {
        let (v, a) = axis_integral(m, ax, k1.axis(ax), k2.axis(ax), &xi, &eta);
        value *= v;
        abs *= a;
    }
    Ok((value, abs))
}

/// Result of a refined quadrature: the fine value plus what the refinement changed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureEstimate {
    pub value: Complex64,
    pub coarse: Complex64,
    /// `|fine - coarse| / |fine|`.
    pub rel_change: f64,
    /// `int |integrand|`, the scale of the unavoidable rounding error.
    pub abs_mass: f64,
}

fn refine(coarse: (Complex64, f64), fine: (Complex64, f64)) -> Result<QuadratureEstimate> {
    let diff = (fine.0 - coarse.0).norm();
    let scale = fine.0.norm();
    let rel_change = if scale > 0.0 { diff / scale } else { diff };
    let floor = 64.0 * f64::EPSILON * fine.1;
    if !(diff <= CONVERGENCE_TOL * scale + floor) {
        return Err(Error::NotConverged { rel_change });
    }
    Ok(QuadratureEstimate { value: fine.0, coarse: coarse.0, rel_change, abs_mass: fine.1 })
}

/// Separable quadrature at `spec` and at doubled node count.
pub fn ctilde_separable<S: SeparableCorrelation + ?Sized>(
    m: &S,
    k1: Vec3<f64>,
    k2: Vec3<f64>,
    spec: &QuadratureSpec,
) -> Result<QuadratureEstimate> {
    spec.validate()?;
    let coarse = separable_once(m, k1, k2, spec)?;
    let fine = separable_once(m, k1, k2, &spec.doubled())?;
    refine(coarse, fine)
}

/// `H^(K) = int H(r, v) exp(-i K.r) d^3r` on a tensor grid.
fn kernel_transform(m: &BochnerModel<f64>, v: Vec3<f64>, k: Vec3<f64>, rule: &Rule) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
        for (y, wy) in rule.nodes.iter().zip(&rule.weights) {
            for (z, wz) in rule.nodes.iter().zip(&rule.weights) {
                let r = Vec3::new(*x, *y, *z);
                acc += m.kernel().eval(r, v) * cis(-k.dot(r)) * (wx * wy * wz);
            }
        }
    }
    acc
}

fn bochner_once(
    m: &BochnerModel<f64>,
    k1: Vec3<f64>,
    k2: Vec3<f64>,
    spec: &QuadratureSpec,
    scale: f64,
) -> Result<(Complex64, f64)> {
    let n = spec.nodes_per_axis;
    let evals = n.saturating_mul(n).saturating_mul(n).saturating_mul(2 * m.grid().len());
    if evals > MAX_GENERIC_EVALUATIONS {
        return Err(Error::InvalidGrid(format!(
            "{evals} kernel evaluations exceed the cap of {MAX_GENERIC_EVALUATIONS}"
        )));
    }
    let rule = spec.rule(scale)?;
    let terms: Vec<Complex64> = m
        .grid()
        .nodes
        .par_iter()
        .zip(m.grid().weights.par_iter())
        .map(|(v, w)| {
            let h1 = kernel_transform(m, *v, k1, &rule);
            let h2 = if k1 == k2 { h1 } else { kernel_transform(m, *v, k2, &rule) };
            h1.conj() * h2 * *w
        })
        .collect();
    let abs = terms.iter().map(|t| t.norm()).sum();
    Ok((terms.into_iter().sum(), abs))
}

/// Generic route for Bochner media: `sum_j W_j conj(H^_j(K1)) H^_j(K2)` with each kernel
/// transform integrated numerically. `scale` sizes the grid; it defaults to the kernel's
/// own width and is required for sampled kernels.
pub fn ctilde_bochner_quadrature(
    m: &BochnerModel<f64>,
    k1: Vec3<f64>,
    k2: Vec3<f64>,
    spec: &QuadratureSpec,
    scale: Option<f64>,
) -> Result<QuadratureEstimate> {
    spec.validate()?;
    let scale = scale
        .or_else(|| m.kernel().length_scale())
        .ok_or_else(|| Error::Unsupported("sampled kernel needs an explicit length scale".into()))?;
    if !(scale > 0.0) {
        return Err(Error::param("length scale must be positive"));
    }
    let coarse = bochner_once(m, k1, k2, spec, scale)?;
    let fine = bochner_once(m, k1, k2, &spec.doubled(), scale)?;
    refine(coarse, fine)
}

pub fn ctilde_quadrature_detailed(
    model: &MediumModel<f64>,
    k1: Vec3<f64>,
    k2: Vec3<f64>,
    spec: &QuadratureSpec,
) -> Result<QuadratureEstimate> {
    match model {
        MediumModel::PtSchell(m) => ctilde_separable(m, k1, k2, spec),
        MediumModel::Classic(m) => ctilde_separable(m, k1, k2, spec),
        MediumModel::Bochner(m) => ctilde_bochner_quadrature(m, k1, k2, spec, None),
    }
}

/// Numerical `C~(-K1, K2)`; fails with `NotConverged` when node doubling moves the
/// result by more than `1e-4` relative.
pub fn ctilde_quadrature(
    model: &MediumModel<f64>,
    k1: Vec3<f64>,
    k2: Vec3<f64>,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    ctilde_quadrature_detailed(model, k1, k2, spec).map(|e| e.value)
}
