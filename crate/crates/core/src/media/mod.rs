//! Medium models and real-space correlation algebra.
//!
//! Correlations follow `C(r1, r2) = <F*(r1) F(r2)>`. The Schell families use
//! `a(r) ~ exp(-r^2 / 2a^2) exp(+i alpha . r)` and `mu(r_d) ~ exp(-r_d^2 / 2d^2) exp(+i beta . r_d)`
//! with `r_d = r2 - r1`, so a linear-phase model depends on `alpha` and `beta` only through
//! `gamma = alpha + beta`.

mod bochner;
mod symmetry;

pub use bochner::{
    g_from_p, mu_from_p, Amplitude, BochnerKernel, BochnerModel, KernelFn, SampledKernel, SpectralWeight,
    SymmetryClass, TabulatedWeight, VGrid, DEFAULT_V_NODES,
};
pub use symmetry::{classify_symmetry, SymmetryKind, SymmetryLevel, SymmetryReport, DEFAULT_SYMMETRY_TOL};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Scalar;

/// Local complex refractive index `nr + i ni`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefractiveIndexSample<T> {
    pub nr: T,
    pub ni: T,
    pub position: Vec3<T>,
}

/// `F = (k^2 / 4 pi^2)(n^2 - 1)`.
pub fn potential_from_index<T: Scalar>(k: T, n: &RefractiveIndexSample<T>) -> Complex<T> {
    let idx = Complex::new(n.nr, n.ni);
    let pref = k * k / (T::of(4.0) * T::PI() * T::PI());
    (idx * idx - T::one()) * pref
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    Ensemble,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationValue<T> {
    pub value: Complex<T>,
    pub provenance: Provenance,
    stderr: Option<T>,
}

impl<T: Scalar> CorrelationValue<T> {
    pub fn closed_form(value: Complex<T>) -> Self {
        CorrelationValue { value, provenance: Provenance::ClosedForm, stderr: None }
    }

    pub fn quadrature(value: Complex<T>) -> Self {
        CorrelationValue { value, provenance: Provenance::Quadrature, stderr: None }
    }

    pub fn ensemble(value: Complex<T>, stderr: T) -> Self {
        CorrelationValue { value, provenance: Provenance::Ensemble, stderr: Some(stderr) }
    }

    /// Only ensemble estimates carry a standard error.
    pub fn stderr(&self) -> Option<T> {
        self.stderr
    }
}

/// Anything that evaluates a two-point potential correlation `C(r1, r2)`.
pub trait CorrelationModel<T: Scalar>: Send + Sync {
    fn correlate(&self, r1: Vec3<T>, r2: Vec3<T>) -> Complex<T>;

    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
}

impl<T: Scalar, M: CorrelationModel<T> + ?Sized> CorrelationModel<T> for &M {
    fn correlate(&self, r1: Vec3<T>, r2: Vec3<T>) -> Complex<T> {
        (**self).correlate(r1, r2)
    }

    fn provenance(&self) -> Provenance {
        (**self).provenance()
    }
}

/// Adapts a plain function into a [`CorrelationModel`]; used for controls and ad-hoc kernels.
pub struct FnCorrelation<F>(pub F);

impl<T: Scalar, F> CorrelationModel<T> for FnCorrelation<F>
where
    F: Fn(Vec3<T>, Vec3<T>) -> Complex<T> + Send + Sync,
{
    fn correlate(&self, r1: Vec3<T>, r2: Vec3<T>) -> Complex<T> {
        (self.0)(r1, r2)
    }
}

fn check_positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive and finite")))
    }
}

fn check_finite<T: Scalar>(name: &str, v: Vec3<T>) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite")))
    }
}

#[inline]
pub(crate) fn cis<T: Scalar>(phase: T) -> Complex<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, s)
}

/// Gaussian Schell-model medium with linear realization and correlation phases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtSchellLinear<T> {
    i0: T,
    a: T,
    d: Option<T>,
    alpha: Vec3<T>,
    beta: Vec3<T>,
}

impl<T: Scalar> PtSchellLinear<T> {
    pub fn new(i0: T, a: T, d: T, alpha: Vec3<T>, beta: Vec3<T>) -> Result<Self> {
        check_positive("I0", i0)?;
        check_positive("a", a)?;
        check_positive("d", d)?;
        check_finite("alpha", alpha)?;
        check_finite("beta", beta)?;
        Ok(PtSchellLinear { i0, a, d: Some(d), alpha, beta })
    }

    /// Fully correlated limit `d -> infinity`.
    pub fn deterministic(i0: T, a: T, alpha: Vec3<T>, beta: Vec3<T>) -> Result<Self> {
        check_positive("I0", i0)?;
        check_positive("a", a)?;
        check_finite("alpha", alpha)?;
        check_finite("beta", beta)?;
        Ok(PtSchellLinear { i0, a, d: None, alpha, beta })
    }

    pub fn i0(&self) -> T {
        self.i0
    }

    pub fn a(&self) -> T {
        self.a
    }

    /// Correlation length; `None` for the deterministic limit.
    pub fn d(&self) -> Option<T> {
        self.d
    }

    pub fn is_deterministic(&self) -> bool {
        self.d.is_none()
    }

    pub fn alpha(&self) -> Vec3<T> {
        self.alpha
    }

    pub fn beta(&self) -> Vec3<T> {
        self.beta
    }

    pub fn gamma(&self) -> Vec3<T> {
        self.alpha + self.beta
    }

    /// Same model with the correlation phase removed from the realization phase (`gamma = 0`).
    pub fn without_phase(&self) -> Self {
        PtSchellLinear { alpha: Vec3::zero(), beta: Vec3::zero(), ..*self }
    }

    /// Realization amplitude `a(r)`.
    pub fn amplitude(&self, r: Vec3<T>) -> Complex<T> {
        let env = (-r.norm_sqr() / (T::of(2.0) * self.a * self.a)).exp();
        cis(self.alpha.dot(r)) * (self.i0 * env)
    }

    /// Degree of correlation `mu(r_d)`.
    pub fn mu(&self, rd: Vec3<T>) -> Complex<T> {
        let env = match self.d {
            Some(d) => (-rd.norm_sqr() / (T::of(2.0) * d * d)).exp(),
            None => T::one(),
        };
        cis(self.beta.dot(rd)) * env
    }
}

impl<T: Scalar> CorrelationModel<T> for PtSchellLinear<T> {
    fn correlate(&self, r1: Vec3<T>, r2: Vec3<T>) -> Complex<T> {
        let two = T::of(2.0);
        let rd = r2 - r1;
        let mut expo = -(r1.norm_sqr() + r2.norm_sqr()) / (two * self.a * self.a);
        if let Some(d) = self.d {
            expo = expo - rd.norm_sqr() / (two * d * d);
        }
        cis(self.gamma().dot(rd)) * (self.i0 * self.i0 * expo.exp())
    }
}

/// Gaussian Schell-model medium with a quadratic (chirped) realization phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicQuadratic<T> {
    i0: T,
    a: T,
    d: T,
    alpha: T,
}

impl<T: Scalar> ClassicQuadratic<T> {
    pub fn new(i0: T, a: T, d: T, alpha: T) -> Result<Self> {
        check_positive("I0", i0)?;
        check_positive("a", a)?;
        check_positive("d", d)?;
        if !alpha.is_finite() {
            return Err(Error::param("alpha must be finite"));
        }
        Ok(ClassicQuadratic { i0, a, d, alpha })
    }

    pub fn i0(&self) -> T {
        self.i0
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn d(&self) -> T {
        self.d
    }

    /// Chirp rate, inverse length squared.
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `a(r) = I0 exp(-r^2/2a^2) exp(-i alpha r^2)`.
    pub fn amplitude(&self, r: Vec3<T>) -> Complex<T> {
        let r2 = r.norm_sqr();
        cis(-self.alpha * r2) * (self.i0 * (-r2 / (T::of(2.0) * self.a * self.a)).exp())
    }

    pub fn mu(&self, rd: Vec3<T>) -> T {
        (-rd.norm_sqr() / (T::of(2.0) * self.d * self.d)).exp()
    }
}

impl<T: Scalar> CorrelationModel<T> for ClassicQuadratic<T> {
    fn correlate(&self, r1: Vec3<T>, r2: Vec3<T>) -> Complex<T> {
        let two = T::of(2.0);
        let (q1, q2) = (r1.norm_sqr(), r2.norm_sqr());
        let rd = r2 - r1;
        let expo = -(q1 + q2) / (two * self.a * self.a) - rd.norm_sqr() / (two * self.d * self.d);
        cis(self.alpha * (q1 - q2)) * (self.i0 * self.i0 * expo.exp())
    }
}

/// The medium families the far-zone module knows how to transform.
#[derive(Clone, Debug)]
pub enum MediumModel<T: Scalar> {
    PtSchell(PtSchellLinear<T>),
    Classic(ClassicQuadratic<T>),
    Bochner(BochnerModel<T>),
}

impl<T: Scalar> MediumModel<T> {
    pub fn describe(&self) -> String {
        match self {
            MediumModel::PtSchell(m) => {
                let g = m.gamma();
                match m.d() {
                    Some(d) => format!(
                        "pt_schell_linear(I0={}, a={}, d={}, gamma=({}, {}, {}))",
                        m.i0(),
                        m.a(),
                        d,
                        g.x,
                        g.y,
                        g.z
                    ),
                    None => format!(
                        "pt_schell_linear(I0={}, a={}, deterministic, gamma=({}, {}, {}))",
                        m.i0(),
                        m.a(),
                        g.x,
                        g.y,
                        g.z
                    ),
                }
            }
            MediumModel::Classic(m) => {
                format!("classic_quadratic(I0={}, a={}, d={}, alpha={})", m.i0(), m.a(), m.d(), m.alpha())
            }
            MediumModel::Bochner(b) => format!("bochner({:?}, {} v-nodes)", b.symmetry(), b.grid().len()),
        }
    }
}

impl<T: Scalar> From<PtSchellLinear<T>> for MediumModel<T> {
    fn from(m: PtSchellLinear<T>) -> Self {
        MediumModel::PtSchell(m)
    }
}

impl<T: Scalar> From<ClassicQuadratic<T>> for MediumModel<T> {
    fn from(m: ClassicQuadratic<T>) -> Self {
        MediumModel::Classic(m)
    }
}

impl<T: Scalar> From<BochnerModel<T>> for MediumModel<T> {
    fn from(m: BochnerModel<T>) -> Self {
        MediumModel::Bochner(m)
    }
}

impl<T: Scalar> CorrelationModel<T> for MediumModel<T> {
    fn correlate(&self, r1: Vec3<T>, r2: Vec3<T>) -> Complex<T> {
        match self {
            MediumModel::PtSchell(m) => m.correlate(r1, r2),
            MediumModel::Classic(m) => m.correlate(r1, r2),
            MediumModel::Bochner(m) => m.correlate(r1, r2),
        }
    }

    fn provenance(&self) -> Provenance {
        match self {
            MediumModel::Bochner(m) => m.provenance(),
            _ => Provenance::ClosedForm,
        }
    }
}

pub fn correlation<T: Scalar, M: CorrelationModel<T> + ?Sized>(
    model: &M,
    r1: Vec3<T>,
    r2: Vec3<T>,
) -> CorrelationValue<T> {
    let value = model.correlate(r1, r2);
    match model.provenance() {
        Provenance::Quadrature => CorrelationValue::quadrature(value),
        _ => CorrelationValue::closed_form(value),
    }
}

/// `I(r) = C(r, r)`.
pub fn strength<T: Scalar, M: CorrelationModel<T> + ?Sized>(model: &M, r: Vec3<T>) -> T {
    model.correlate(r, r).re
}

/// `N(r) = C(-r, r)`.
pub fn anti_strength<T: Scalar, M: CorrelationModel<T> + ?Sized>(model: &M, r: Vec3<T>) -> Complex<T> {
    model.correlate(-r, r)
}

fn strength_floor<T: Scalar>() -> T {
    T::min_positive_value().max(T::of(1e-300))
}

/// `sqrt(x y)` that tolerates products below the normal range.
pub(crate) fn geometric_mean<T: Scalar>(x: T, y: T) -> T {
    if x == y {
        return x;
    }
    let p = x * y;
    if p.is_normal() {
        p.sqrt()
    } else {
        x.sqrt() * y.sqrt()
    }
}

/// `mu = C(r1, r2) / sqrt(I(r1) I(r2))`.
pub fn degree_of_potential_correlation<T: Scalar, M: CorrelationModel<T> + ?Sized>(
    model: &M,
    r1: Vec3<T>,
    r2: Vec3<T>,
) -> Result<Complex<T>> {
    let i1 = strength(model, r1);
    let i2 = strength(model, r2);
    if !(i1.abs() >= strength_floor()) || !(i2.abs() >= strength_floor()) {
        return Err(Error::ZeroStrength);
    }
    Ok(model.correlate(r1, r2) / geometric_mean(i1, i2))
}
