//! Bochner-representable correlations `C(r1, r2) = int p(v) H*(r1, v) H(r2, v) d^3v`.
//!
//! The v-integral is discretized once on construction; the same weighted node set feeds
//! the correlation sum here and the realization sampler in the oracle.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use super::{check_finite, check_positive, cis, ClassicQuadratic, CorrelationModel, Provenance, PtSchellLinear};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::quadrature::{normal_rule, Rule};
use crate::scalar::Scalar;

/// Default nodes per v-axis for Gaussian weights.
pub const DEFAULT_V_NODES: usize = 17;

/// Weight function `p(v) >= 0` tabulated on a centred cubic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedWeight<T> {
    /// Grid spans `[-half_extent, half_extent]` on each axis.
    pub half_extent: T,
    pub nodes_per_axis: usize,
    /// Row-major `(ix, iy, iz)`, `iz` fastest.
    pub values: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectralWeight<T> {
    /// `mass * N(center, std^2 I)`.
    Gaussian {
        mass: T,
        std: T,
        center: Vec3<T>,
    },
    Tabulated(TabulatedWeight<T>),
}

impl<T: Scalar> SpectralWeight<T> {
    /// Gaussian weight whose Fourier transform is `exp(-r_d^2/2d^2) exp(i beta . r_d)`.
    pub fn gaussian_for_correlation(d: T, beta: Vec3<T>) -> Self {
        let two_pi = T::of(2.0) * T::PI();
        SpectralWeight::Gaussian { mass: T::one(), std: T::one() / (two_pi * d), center: -(beta * (T::one() / two_pi)) }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SpectralWeight::Gaussian { mass, std, center } => {
                if !mass.is_finite() || !std.is_finite() {
                    return Err(Error::NonIntegrable);
                }
                if *mass < T::zero() || *std < T::zero() {
                    return Err(Error::param("Gaussian weight needs nonnegative mass and std"));
                }
                check_finite("weight center", *center)
            }
            SpectralWeight::Tabulated(t) => {
                let n = t.nodes_per_axis;
                if n < 2 || t.values.len() != n * n * n {
                    return Err(Error::param("tabulated weight needs n >= 2 and n^3 values"));
                }
                check_positive("half extent", t.half_extent)?;
                if t.values.iter().any(|p| p.is_nan() || *p < T::zero()) {
                    return Err(Error::param("tabulated weight must be nonnegative"));
                }
                let mass = t.values.iter().fold(T::zero(), |acc, p| acc + *p);
                if !mass.is_finite() {
                    return Err(Error::NonIntegrable);
                }
                Ok(())
            }
        }
    }

    /// Discretizes `p(v) d^3v` into weighted nodes with `n` nodes per axis (Gaussian only;
    /// tabulated weights use their own grid).
    fn discretize(&self, n: usize) -> Result<VGrid<T>> {
        match self {
            SpectralWeight::Gaussian { mass, std, center } => {
                let rules: Vec<Rule> = (0..3)
                    .map(|ax| normal_rule(n, center.axis(ax).to_f64_lossy(), std.to_f64_lossy()))
                    .collect::<Result<_>>()?;
                Ok(VGrid::tensor(&rules, |_| *mass))
            }
            SpectralWeight::Tabulated(t) => {
                let rule = Rule::trapezoid(t.nodes_per_axis, t.half_extent.to_f64_lossy())?;
                let rules = [rule.clone(), rule.clone(), rule];
                Ok(VGrid::tensor(&rules, |idx| t.values[idx]))
            }
        }
    }
}

/// Weighted v-nodes: `int p(v) f(v) d^3v ~ sum_j weights[j] f(nodes[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct VGrid<T> {
    pub nodes: Vec<Vec3<T>>,
    pub weights: Vec<T>,
}

impl<T: Scalar> VGrid<T> {
    fn tensor(rules: &[Rule], factor: impl Fn(usize) -> T) -> Self {
        let (nx, ny, nz) = (rules[0].len(), rules[1].len(), rules[2].len());
        let mut nodes = Vec::with_capacity(nx * ny * nz);
        let mut weights = Vec::with_capacity(nx * ny * nz);
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    let idx = (i * ny + j) * nz + k;
                    nodes.push(Vec3::new(T::of(rules[0].nodes[i]), T::of(rules[1].nodes[j]), T::of(rules[2].nodes[k])));
                    let w = rules[0].weights[i] * rules[1].weights[j] * rules[2].weights[k];
                    weights.push(T::of(w) * factor(idx));
                }
            }
        }
        VGrid { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gaussian amplitude profile `a(r) = I0 exp(-r^2/2w^2) exp(i l . r) exp(-i q r^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude<T> {
    pub i0: T,
    pub width: T,
    pub linear_phase: Vec3<T>,
    pub quadratic_phase: T,
}

impl<T: Scalar> Amplitude<T> {
    pub fn gaussian(i0: T, width: T) -> Self {
        Amplitude { i0, width, linear_phase: Vec3::zero(), quadratic_phase: T::zero() }
    }

    pub fn eval(&self, r: Vec3<T>) -> Complex<T> {
        let r2 = r.norm_sqr();
        let env = self.i0 * (-r2 / (T::of(2.0) * self.width * self.width)).exp();
        cis(self.linear_phase.dot(r) - self.quadratic_phase * r2) * env
    }

    /// `int a(r) exp(-i q . r) d^3r`.
    pub fn fourier(&self, q: Vec3<T>) -> Complex<T> {
        let c = Complex::new(T::one() / (T::of(2.0) * self.width * self.width), self.quadratic_phase);
        let s = q - self.linear_phase;
        let per_axis = (Complex::from(T::PI()) / c).sqrt();
        per_axis * per_axis * per_axis * (-(Complex::from(s.norm_sqr())) / (c * T::of(4.0))).exp() * self.i0
    }

    fn validate(&self) -> Result<()> {
        check_positive("amplitude I0", self.i0)?;
        check_positive("amplitude width", self.width)?;
        check_finite("linear phase", self.linear_phase)?;
        if !self.quadratic_phase.is_finite() {
            return Err(Error::param("quadratic phase must be finite"));
        }
        Ok(())
    }
}

/// Shared closure `(r, v) -> H(r, v)`.
pub type KernelFn<T> = Arc<dyn Fn(Vec3<T>, Vec3<T>) -> Complex<T> + Send + Sync>;

/// User-supplied kernel `H(r, v)`.
#[derive(Clone)]
pub struct SampledKernel<T> {
    pub label: String,
    pub func: KernelFn<T>,
}

impl<T> fmt::Debug for SampledKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledKernel").field("label", &self.label).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum BochnerKernel<T> {
    /// `H = a(r) exp(-2 pi i r . v)`.
    Schell(Amplitude<T>),
    /// `H = a(r) cos(2 pi r . v)`; even in `r` whenever `a` is.
    EvenCosine(Amplitude<T>),
    Sampled(SampledKernel<T>),
}

impl<T: Scalar> BochnerKernel<T> {
    pub fn eval(&self, r: Vec3<T>, v: Vec3<T>) -> Complex<T> {
        let two_pi = T::of(2.0) * T::PI();
        match self {
            BochnerKernel::Schell(a) => a.eval(r) * cis(-two_pi * r.dot(v)),
            BochnerKernel::EvenCosine(a) => a.eval(r) * (two_pi * r.dot(v)).cos(),
            BochnerKernel::Sampled(k) => (k.func)(r, v),
        }
    }

    /// `int H(r, v) exp(-i K . r) d^3r` for the analytic kernels.
    pub fn fourier(&self, k: Vec3<T>, v: Vec3<T>) -> Option<Complex<T>> {
        let tv = v * (T::of(2.0) * T::PI());
        match self {
            BochnerKernel::Schell(a) => Some(a.fourier(k + tv)),
            BochnerKernel::EvenCosine(a) => Some((a.fourier(k + tv) + a.fourier(k - tv)) * T::of(0.5)),
            BochnerKernel::Sampled(_) => None,
        }
    }

    /// Characteristic spatial extent, used to size quadrature grids.
    pub fn length_scale(&self) -> Option<T> {
        match self {
            BochnerKernel::Schell(a) | BochnerKernel::EvenCosine(a) => Some(a.width),
            BochnerKernel::Sampled(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryClass {
    Pt,
    Classic,
    Generic,
}

/// Bochner-constructed correlation with its discretized v-integral.
#[derive(Clone, Debug)]
pub struct BochnerModel<T> {
    weight: SpectralWeight<T>,
    kernel: BochnerKernel<T>,
    symmetry: SymmetryClass,
    grid: VGrid<T>,
}

impl<T: Scalar> BochnerModel<T> {
    /// `nodes_per_axis` applies to Gaussian weights; tabulated weights bring their own grid.
    pub fn new(
        weight: SpectralWeight<T>,
        kernel: BochnerKernel<T>,
        symmetry: SymmetryClass,
        nodes_per_axis: usize,
    ) -> Result<Self> {
        weight.validate()?;
        if let BochnerKernel::Schell(a) | BochnerKernel::EvenCosine(a) = &kernel {
            a.validate()?;
        }
        let grid = weight.discretize(nodes_per_axis)?;
        let model = BochnerModel { weight, kernel, symmetry, grid };
        if symmetry == SymmetryClass::Pt {
            model.check_pt_kernel()?;
        }
        Ok(model)
    }

    /// Kernel and weight reproducing a [`PtSchellLinear`] correlation.
    pub fn from_pt_schell(m: &PtSchellLinear<T>, nodes_per_axis: usize) -> Result<Self> {
        let amp = Amplitude { i0: m.i0(), width: m.a(), linear_phase: m.alpha(), quadratic_phase: T::zero() };
        let (weight, n) = match m.d() {
            Some(d) => (SpectralWeight::gaussian_for_correlation(d, m.beta()), nodes_per_axis),
            None => {
                let two_pi = T::of(2.0) * T::PI();
                let center = -(m.beta() * (T::one() / two_pi));
                (SpectralWeight::Gaussian { mass: T::one(), std: T::zero(), center }, 1)
            }
        };
        Self::new(weight, BochnerKernel::Schell(amp), SymmetryClass::Pt, n)
    }

    /// Kernel and weight reproducing a [`ClassicQuadratic`] correlation.
    pub fn from_classic_quadratic(m: &ClassicQuadratic<T>, nodes_per_axis: usize) -> Result<Self> {
        let amp = Amplitude { i0: m.i0(), width: m.a(), linear_phase: Vec3::zero(), quadratic_phase: m.alpha() };
        let weight = SpectralWeight::gaussian_for_correlation(m.d(), Vec3::zero());
        Self::new(weight, BochnerKernel::Schell(amp), SymmetryClass::Classic, nodes_per_axis)
    }

    /// Classic medium whose individual realizations are even: `H = a(r) cos(2 pi r . v)`.
    pub fn even_cosine(i0: T, a: T, d: T, quadratic_phase: T, nodes_per_axis: usize) -> Result<Self> {
        let amp = Amplitude { i0, width: a, linear_phase: Vec3::zero(), quadratic_phase };
        let weight = SpectralWeight::gaussian_for_correlation(d, Vec3::zero());
        Self::new(weight, BochnerKernel::EvenCosine(amp), SymmetryClass::Classic, nodes_per_axis)
    }

    fn check_pt_kernel(&self) -> Result<()> {
        let probes = [
            Vec3::new(T::of(0.3), T::of(-0.7), T::of(1.1)),
            Vec3::new(T::of(-1.4), T::of(0.2), T::of(0.5)),
            Vec3::new(T::of(0.9), T::of(0.9), T::of(-0.4)),
        ];
        let stride = (self.grid.len() / 7).max(1);
        for r in probes {
            for v in self.grid.nodes.iter().step_by(stride) {
                let h = self.kernel.eval(r, *v);
                let hm = self.kernel.eval(-r, *v).conj();
                if (h - hm).norm() > T::geom_tol() * (T::one() + h.norm()) {
                    return Err(Error::param("kernel is not PT-symmetric: H*(-r, v) != H(r, v)"));
                }
            }
        }
        Ok(())
    }

    pub fn weight(&self) -> &SpectralWeight<T> {
        &self.weight
    }

    pub fn kernel(&self) -> &BochnerKernel<T> {
        &self.kernel
    }

    pub fn symmetry(&self) -> SymmetryClass {
        self.symmetry
    }

    pub fn grid(&self) -> &VGrid<T> {
        &self.grid
    }
}

impl<T: Scalar> CorrelationModel<T> for BochnerModel<T> {
    fn correlate(&self, r1: Vec3<T>, r2: Vec3<T>) -> Complex<T> {
        self.grid.nodes.iter().zip(&self.grid.weights).fold(Complex::new(T::zero(), T::zero()), |acc, (v, w)| {
            acc + self.kernel.eval(r1, *v).conj() * self.kernel.eval(r2, *v) * *w
        })
    }

    fn provenance(&self) -> Provenance {
        Provenance::Quadrature
    }
}

/// `g(r_d) = int sqrt(p(v)) exp(-2 pi i v . r_d) d^3v`.
pub fn g_from_p<T: Scalar>(p: &SpectralWeight<T>, rd: Vec3<T>) -> Result<Complex<T>> {
    p.validate()?;
    let pi = T::PI();
    match p {
        SpectralWeight::Gaussian { mass, std, center } => {
            if !(*std > T::zero()) {
                return Err(Error::param("g is undefined for a point-mass weight"));
            }
            let s2 = *std * *std;
            let norm =
                mass.sqrt() * (T::of(2.0) * pi * s2).powf(T::of(-0.75)) * (T::of(4.0) * pi * s2).powf(T::of(1.5));
            let env = (-T::of(4.0) * pi * pi * s2 * rd.norm_sqr()).exp();
            Ok(cis(-T::of(2.0) * pi * center.dot(rd)) * (norm * env))
        }
        SpectralWeight::Tabulated(t) => tabulated_transform(t, rd, true),
    }
}

/// Fourier transform of `p`, i.e. the degree of correlation `mu(r_d)` it generates.
pub fn mu_from_p<T: Scalar>(p: &SpectralWeight<T>, rd: Vec3<T>) -> Result<Complex<T>> {
    p.validate()?;
    let pi = T::PI();
    match p {
        SpectralWeight::Gaussian { mass, std, center } => {
            let env = (-T::of(2.0) * pi * pi * *std * *std * rd.norm_sqr()).exp();
            Ok(cis(-T::of(2.0) * pi * center.dot(rd)) * (*mass * env))
        }
        SpectralWeight::Tabulated(t) => tabulated_transform(t, rd, false),
    }
}

fn tabulated_transform<T: Scalar>(t: &TabulatedWeight<T>, rd: Vec3<T>, sqrt_p: bool) -> Result<Complex<T>> {
    let rule = Rule::trapezoid(t.nodes_per_axis, t.half_extent.to_f64_lossy())?;
    let n = t.nodes_per_axis;
    let two_pi = T::of(2.0) * T::PI();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let p = t.values[(i * n + j) * n + k];
                let f = if sqrt_p { p.sqrt() } else { p };
                let w = T::of(rule.weights[i] * rule.weights[j] * rule.weights[k]);
                let v = Vec3::new(T::of(rule.nodes[i]), T::of(rule.nodes[j]), T::of(rule.nodes[k]));
                acc = acc + cis(-two_pi * v.dot(rd)) * (w * f);
            }
        }
    }
    Ok(acc)
}
