//! Closed-form double Fourier transforms `C~(-K1, K2) = int int C(r1, r2) exp(i K1.r1 - i K2.r2)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::media::{ClassicQuadratic, PtSchellLinear};
use crate::scalar::Scalar;

fn two_pi_cubed<T: Scalar>() -> T {
    let tp = T::of(2.0) * T::PI();
    tp * tp * tp
}

/// `I0^2 (2 pi)^3 a^6 d^3 / (2a^2 + d^2)^{3/2}`.
pub fn pt_amplitude<T: Scalar>(m: &PtSchellLinear<T>) -> T {
    let a = m.a();
    let a2 = a * a;
    let a6 = a2 * a2 * a2;
    let base = m.i0() * m.i0() * two_pi_cubed::<T>() * a6;
    match m.d() {
        Some(d) => base * d * d * d / (T::of(2.0) * a2 + d * d).powf(T::of(1.5)),
        None => base,
    }
}

/// `sigma^2 = 2/d^2 + 1/a^2`, the width of the PT spectral density in `K`.
pub fn pt_sigma_sq<T: Scalar>(m: &PtSchellLinear<T>) -> T {
    let a = m.a();
    match m.d() {
        Some(d) => T::of(2.0) / (d * d) + T::one() / (a * a),
        None => T::one() / (a * a),
    }
}

fn pt_exponent<T: Scalar>(a: T, d: T, u1: Vec3<T>, u2: Vec3<T>) -> T {
    let (a2, d2) = (a * a, d * d);
    let two = T::of(2.0);
    (-(a2 + d2) * (u1.norm_sqr() + u2.norm_sqr()) / two + a2 * u1.dot(u2)) / (two + d2 / a2)
}

/// PT Schell model, real-valued for every `(K1, K2)`.
///
/// With `u_j = K_j - gamma`:
/// `A exp([-(a^2+d^2)(u1^2+u2^2)/2 + a^2 u1.u2] / (2 + d^2/a^2))`.
/// Models in the deterministic limit dispatch to [`ctilde_pt_deterministic`].
pub fn ctilde_pt_closed<T: Scalar>(m: &PtSchellLinear<T>, k1: Vec3<T>, k2: Vec3<T>) -> Complex<T> {
    let g = m.gamma();
    let (u1, u2) = (k1 - g, k2 - g);
    let value = match m.d() {
        Some(d) => pt_amplitude(m) * pt_exponent(m.a(), d, u1, u2).exp(),
        None => pt_amplitude(m) * deterministic_exponent(m.a(), u1, u2).exp(),
    };
    Complex::new(value, T::zero())
}

fn deterministic_exponent<T: Scalar>(a: T, u1: Vec3<T>, u2: Vec3<T>) -> T {
    -(a * a) / T::of(2.0) * (u1.norm_sqr() + u2.norm_sqr())
}

/// Fully correlated (`d -> infinity`) branch:
/// `I0^2 (2 pi)^3 a^6 exp(-(a^2/2)[(K1 - gamma)^2 + (K2 - gamma)^2])`.
pub fn ctilde_pt_deterministic<T: Scalar>(m: &PtSchellLinear<T>, k1: Vec3<T>, k2: Vec3<T>) -> Result<Complex<T>> {
    if !m.is_deterministic() {
        return Err(Error::param("model is not in the deterministic limit"));
    }
    Ok(ctilde_pt_closed(m, k1, k2))
}

/// Splits the PT transform into its `gamma = 0` part and the factor
/// `exp(gamma . (K1 + K2 - gamma) / sigma^2)` carrying the non-Hermitian phase.
pub fn ctilde_factored<T: Scalar>(m: &PtSchellLinear<T>, k1: Vec3<T>, k2: Vec3<T>) -> (Complex<T>, T) {
    let herm = ctilde_pt_closed(&m.without_phase(), k1, k2);
    let g = m.gamma();
    let factor = (g.dot(k1 + k2 - g) / pt_sigma_sq(m)).exp();
    (herm, factor)
}

/// `det` of the per-axis quadratic form of the classic model, `1/a^4 + 2/(a^2 d^2) + 4 alpha^2`.
fn classic_det<T: Scalar>(m: &ClassicQuadratic<T>) -> T {
    let (a2, d2) = (m.a() * m.a(), m.d() * m.d());
    T::one() / (a2 * a2) + T::of(2.0) / (a2 * d2) + T::of(4.0) * m.alpha() * m.alpha()
}

/// Classic quadratic-phase model:
/// `I0^2 (2 pi)^3 det^{-3/2} exp(-[p(K1^2+K2^2) + 2 i alpha (K1^2 - K2^2) - 2 K1.K2/d^2] / (2 det))`
/// with `p = 1/a^2 + 1/d^2`.
pub fn ctilde_cl_closed<T: Scalar>(m: &ClassicQuadratic<T>, k1: Vec3<T>, k2: Vec3<T>) -> Complex<T> {
    let two = T::of(2.0);
    let det = classic_det(m);
    let (a2, d2) = (m.a() * m.a(), m.d() * m.d());
    let p = T::one() / a2 + T::one() / d2;
    let (q1, q2) = (k1.norm_sqr(), k2.norm_sqr());
    let re = -(p * (q1 + q2) - two * k1.dot(k2) / d2) / (two * det);
    let im = -(two * m.alpha() * (q1 - q2)) / (two * det);
    let amp = m.i0() * m.i0() * two_pi_cubed::<T>() / det.powf(T::of(1.5));
    Complex::from_polar(amp * re.exp(), im)
}

/// Width of the classic spectral density: `4 alpha^2 a^2 + 2/d^2 + 1/a^2`.
pub fn classic_sigma_sq<T: Scalar>(m: &ClassicQuadratic<T>) -> T {
    m.a() * m.a() * classic_det(m)
}
