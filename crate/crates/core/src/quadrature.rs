//! One-dimensional quadrature rules shared by the Bochner discretization and the oracle.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest Gauss-Hermite order whose recurrence stays inside f64 range.
pub const MAX_HERMITE_NODES: usize = 512;

/// Gauss-Hermite rule for the weight `exp(-t^2)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `ln w_i`, finite even where `w_i` underflows.
    pub log_weights: Vec<f64>,
}

fn compute_gauss_hermite(n: usize) -> GaussHermite {
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let nf = n as f64;
    // Golub-Welsch seeds, polished by Newton on the orthonormal recurrence
    let jacobi =
        DMatrix::<f64>::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { (i.max(j) as f64 / 2.0).sqrt() } else { 0.0 });
    let mut seeds: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    seeds.sort_by(|a, b| b.total_cmp(a));
    let mut x = vec![0.0; n];
    let mut lw = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = seeds[i];
        let mut pp = 1.0;
        for it in 0..8 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            if it == 7 {
                break;
            }
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        if n % 2 == 1 && i == m - 1 {
            z = 0.0;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        let l = std::f64::consts::LN_2 - 2.0 * pp.abs().ln();
        lw[i] = l;
        lw[n - 1 - i] = l;
    }
    // ascending order
    x.reverse();
    lw.reverse();
    let weights = lw.iter().map(|l| l.exp()).collect();
    GaussHermite { nodes: x, weights, log_weights: lw }
}

/// Cached `n`-point Gauss-Hermite rule, nodes ascending and mirror-symmetric.
pub fn gauss_hermite(n: usize) -> Result<Arc<GaussHermite>> {
    if n == 0 || n > MAX_HERMITE_NODES {
        return Err(Error::param(format!("Gauss-Hermite order must be in 1..={MAX_HERMITE_NODES}")));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Ok(guard.entry(n).or_insert_with(|| Arc::new(compute_gauss_hermite(n))).clone())
}

/// Plain rule: `int f(x) dx ~ sum w_i f(x_i)`. Nodes are mirror-symmetric about zero.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss-Hermite nodes scaled for integrands with envelope `exp(-x^2 / 2 sigma^2)`;
    /// the weight function is folded into the weights.
    pub fn gaussian_envelope(n: usize, sigma: f64) -> Result<Rule> {
        let gh = gauss_hermite(n)?;
        let s = std::f64::consts::SQRT_2 * sigma;
        let nodes = gh.nodes.iter().map(|t| s * t).collect();
        let weights = gh.nodes.iter().zip(&gh.log_weights).map(|(t, lw)| s * (lw + t * t).exp()).collect();
        Ok(Rule { nodes, weights })
    }

    /// Composite trapezoid on `[-half_width, half_width]`.
    pub fn trapezoid(n: usize, half_width: f64) -> Result<Rule> {
        if n < 2 || !(half_width > 0.0) {
            return Err(Error::param("trapezoid rule needs n >= 2 and positive half width"));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        let nodes = (0..n)
            .map(|i| {
                // symmetric construction so that node[n-1-i] == -node[i] exactly
                let j = i as f64 - (n - 1) as f64 / 2.0;
                j * h
            })
            .collect();
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(Rule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Normal-distribution rule: `E[f(X)]`, `X ~ N(mean, std^2)`, weights summing to one.
pub fn normal_rule(n: usize, mean: f64, std: f64) -> Result<Rule> {
    let gh = gauss_hermite(n)?;
    let s = std::f64::consts::SQRT_2 * std;
    let norm = 1.0 / PI.sqrt();
    Ok(Rule {
        nodes: gh.nodes.iter().map(|t| mean + s * t).collect(),
        weights: gh.weights.iter().map(|w| w * norm).collect(),
    })
}
