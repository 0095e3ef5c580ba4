//! `spectrum`, `coherence` and `realize`.

use num_complex::Complex64;
use ptscatter::born::{mu_s_symmetric, ntilde, spectral_map};
use ptscatter::geometry::{momentum_transfer, perpendicular, symmetric_pair, unit_from_spherical};
use ptscatter::media::CorrelationModel;
use ptscatter::oracle::{
    ctilde_quadrature_detailed, ensemble_estimate, realization_evenness_check, sample_realization_indexed,
    symmetric_grid, write_realization_csv, QuadratureSpec,
};
use ptscatter::{ClassicQuadratic, Error, IncidentPlaneWave, MediumModel, PtSchellLinear, UnitDir, Vec3};
use serde_json::{json, Value};

use crate::config::{ConfigError, RunConfig};
use crate::output::{finite, gnuplot_coherence, gnuplot_map, OutDir};
use crate::{CliError, Status};

/// Oracle spot checks compare relative residuals against this.
const ORACLE_TOL: f64 = 1e-6;
const MAX_REALIZATION_FILES: usize = 10_000;

fn degrees(cfg_grid: &Option<crate::config::GridSpec>, what: &str, max: f64) -> Result<Vec<f64>, ConfigError> {
    let g = cfg_grid.as_ref().ok_or_else(|| ConfigError(format!("{what} is missing")))?;
    let v = g.values(what)?;
    if v[0] < 0.0 || v[v.len() - 1] > max {
        return Err(ConfigError(format!("{what}: values must lie in [0, {max}] degrees")));
    }
    Ok(v)
}

fn base_name(cfg: &RunConfig, fallback: &str) -> String {
    cfg.figure.clone().unwrap_or_else(|| fallback.to_string())
}

fn sidecar(cfg: &RunConfig, command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("resolved".into(), serde_json::to_value(cfg).expect("config serializes"));
    m
}

/// Up to `n` evenly strided indices into `0..len`, plus `extra`.
fn strided(len: usize, n: usize, extra: Option<usize>) -> Vec<usize> {
    let step = len.div_ceil(n.max(1)).max(1);
    let mut v: Vec<usize> = (0..len).step_by(step).collect();
    if let Some(e) = extra {
        if !v.contains(&e) {
            v.push(e);
        }
    }
    v
}

pub fn spectrum(cfg: &RunConfig, out: &mut OutDir) -> Result<Status, CliError> {
    let medium = cfg.medium()?;
    let wave = cfg.wave()?;
    let th = degrees(&cfg.scan.theta_deg, "scan.theta_deg", 180.0)?;
    let ph = degrees(&cfg.scan.phi_deg, "scan.phi_deg", 360.0)?;
    let t: Vec<f64> = th.iter().map(|x| x.to_radians()).collect();
    let p: Vec<f64> = ph.iter().map(|x| x.to_radians()).collect();
    let map = spectral_map(&medium, &wave, &t, &p, cfg.normalization.into())?;

    let name = base_name(cfg, "spectrum");
    let resolved = cfg.to_json();
    let rows: Vec<[f64; 3]> = th
        .iter()
        .enumerate()
        .flat_map(|(i, a)| ph.iter().enumerate().map(move |(j, b)| (i, j, *a, *b)))
        .map(|(i, j, a, b)| [a, b, map.values[i][j]])
        .collect();
    out.csv(&format!("{name}.csv"), &resolved, &["theta_deg", "phi_deg", "value"], rows.iter().map(|r| &r[..]))?;

    let (pt, pp, pv) = map.peak();
    let mut side = sidecar(cfg, "spectrum");
    side.insert("medium".into(), json!(medium.describe()));
    side.insert(
        "peak".into(),
        json!({ "theta_deg": pt.to_degrees(), "phi_deg": pp.to_degrees(), "value": finite(pv) }),
    );
    let mut status = Status::Pass;
    if cfg.oracle_on() {
        let flat_peak = th.iter().position(|x| x.to_radians() == pt).zip(ph.iter().position(|x| x.to_radians() == pp));
        let samples = if matches!(medium, MediumModel::Bochner(_)) { 8 } else { 64 };
        let idx = strided(th.len() * ph.len(), samples, flat_peak.map(|(i, j)| i * ph.len() + j));
        let spec = QuadratureSpec::for_model(&medium);
        let mut worst = 0.0f64;
        for k in &idx {
            let s = unit_from_spherical(t[k / ph.len()], p[k % ph.len()]);
            let kv = wave.momentum(s);
            let exact = ntilde(&medium, kv)?;
            let r = match ctilde_quadrature_detailed(&medium, kv, kv, &spec) {
                Ok(q) => (q.value.re - exact).abs() / exact.abs(),
                Err(Error::NotConverged { .. }) => f64::INFINITY,
                Err(e) => return Err(e.into()),
            };
            worst = worst.max(r);
        }
        let pass = worst <= ORACLE_TOL;
        if !pass {
            status = Status::Fail;
        }
        side.insert(
            "oracle".into(),
            json!({ "check": "spectral density vs quadrature", "points": idx.len(), "tolerance": ORACLE_TOL,
                    "max_rel_residual": finite(worst), "pass": pass }),
        );
    }
    side.insert("files".into(), json!([format!("{name}.csv")]));
    out.json(&format!("{name}.json"), &Value::Object(side))?;
    if cfg.gnuplot {
        out.text(&format!("{name}.gp"), &gnuplot_map(&format!("{name}.csv"), &name))?;
    }
    Ok(status)
}

/// Symmetric direction pair at polar angle `theta` from the incident direction, as used by
/// the coherence curves.
fn symmetric_momenta(wave: &IncidentPlaneWave, theta: f64) -> Result<(Vec3, Vec3), Error> {
    let s0 = wave.direction();
    let n = perpendicular(s0);
    let s = UnitDir::new(s0.vec() * theta.cos() + n.vec() * theta.sin())?;
    let (s1, s2) = match symmetric_pair(&wave.geometry, s) {
        Ok(p) => p,
        Err(Error::DegenerateDirection) => (s, s),
        Err(e) => return Err(e),
    };
    Ok((momentum_transfer(&wave.geometry, s1), momentum_transfer(&wave.geometry, s2)))
}

fn mu_by_quadrature(m: &MediumModel, k1: Vec3, k2: Vec3) -> Result<Complex64, Error> {
    let spec = QuadratureSpec::for_model(m);
    let c = ctilde_quadrature_detailed(m, k1, k2, &spec)?.value;
    let n1 = ctilde_quadrature_detailed(m, k1, k1, &spec)?.value.re;
    let n2 = ctilde_quadrature_detailed(m, k2, k2, &spec)?.value.re;
    Ok(c / (n1 * n2).sqrt())
}

pub fn coherence(cfg: &RunConfig, out: &mut OutDir) -> Result<Status, CliError> {
    let spec = cfg.coherence.as_ref().ok_or_else(|| ConfigError("config has no `coherence` block".into()))?;
    if spec.d_over_a.is_empty() {
        return Err(ConfigError("coherence.d_over_a is empty".into()).into());
    }
    if !spec.alpha_over_k2.is_finite() {
        return Err(ConfigError("coherence.alpha_over_k2 must be finite".into()).into());
    }
    let wave = cfg.wave()?;
    let th = degrees(&cfg.scan.theta_deg, "scan.theta_deg", 180.0)?;
    let alpha = spec.alpha_over_k2 * cfg.ka * cfg.ka;
    let mut media = Vec::new();
    for d in &spec.d_over_a {
        let wrap = |e: Error| ConfigError(format!("coherence.d_over_a = {d}: {e}"));
        let pt: MediumModel = PtSchellLinear::new(cfg.i0, 1.0, *d, Vec3::zero(), Vec3::zero()).map_err(wrap)?.into();
        let cl: MediumModel = ClassicQuadratic::new(cfg.i0, 1.0, *d, alpha).map_err(wrap)?.into();
        media.push((*d, pt, cl));
    }

    let mut rows = Vec::new();
    let mut max_im = 0.0f64;
    let mut ends = Vec::new();
    for (d, pt, cl) in &media {
        for x in &th {
            let a = mu_s_symmetric(pt, &wave, x.to_radians())?;
            let b = mu_s_symmetric(cl, &wave, x.to_radians())?;
            max_im = max_im.max(a.im.abs()).max(b.im.abs());
            rows.push([*d, *x, a.re, b.re]);
        }
        let last = rows[rows.len() - 1];
        ends.push(json!({ "d_over_a": d, "theta_deg": last[1], "mu_pt": last[2], "mu_cl": last[3] }));
    }

    let name = base_name(cfg, "coherence");
    let resolved = cfg.to_json();
    out.csv(
        &format!("{name}.csv"),
        &resolved,
        &["d_over_a", "theta_deg", "mu_pt", "mu_cl"],
        rows.iter().map(|r| &r[..]),
    )?;

    let mut side = sidecar(cfg, "coherence");
    side.insert("max_abs_imaginary_part".into(), json!(max_im));
    side.insert("last_row".into(), Value::Array(ends));
    let mut status = Status::Pass;
    if cfg.oracle_on() {
        let mut worst = 0.0f64;
        let mut count = 0;
        for (mi, (_, pt, cl)) in media.iter().enumerate() {
            for i in strided(th.len(), 8, Some(th.len() - 1)) {
                let (k1, k2) = symmetric_momenta(&wave, th[i].to_radians())?;
                let row = rows[mi * th.len() + i];
                for (m, v) in [(pt, row[2]), (cl, row[3])] {
                    let r = match mu_by_quadrature(m, k1, k2) {
                        Ok(q) => (q - v).norm(),
                        Err(Error::NotConverged { .. }) => f64::INFINITY,
                        Err(e) => return Err(e.into()),
                    };
                    worst = worst.max(r);
                    count += 1;
                }
            }
        }
        let pass = worst <= ORACLE_TOL;
        if !pass {
            status = Status::Fail;
        }
        side.insert(
            "oracle".into(),
            json!({ "check": "mu from quadrature C~ and N~", "points": count, "tolerance": ORACLE_TOL,
                    "max_abs_residual": finite(worst), "pass": pass }),
        );
    }
    side.insert("files".into(), json!([format!("{name}.csv")]));
    out.json(&format!("{name}.json"), &Value::Object(side))?;
    if cfg.gnuplot {
        out.text(&format!("{name}.gp"), &gnuplot_coherence(&format!("{name}.csv"), &name, &spec.d_over_a))?;
    }
    Ok(status)
}

pub fn realize(cfg: &RunConfig, out: &mut OutDir) -> Result<Status, CliError> {
    let rs = &cfg.realize;
    if rs.count > MAX_REALIZATION_FILES {
        return Err(ConfigError(format!("realize.count is limited to {MAX_REALIZATION_FILES}")).into());
    }
    if rs.ensemble < 2 {
        return Err(ConfigError("realize.ensemble must be at least 2".into()).into());
    }
    if rs.grid_points == 0 || rs.grid_points > 101 {
        return Err(ConfigError("realize.grid_points must lie in 1..=101".into()).into());
    }
    if !(rs.half_width.is_finite() && rs.half_width > 0.0) {
        return Err(ConfigError("realize.half_width must be finite and positive".into()).into());
    }
    if rs.points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(ConfigError("realize.points must be finite".into()).into());
    }
    let model = cfg.bochner(rs.v_nodes)?;
    let grid = symmetric_grid(rs.grid_points, rs.half_width)?;
    let resolved = cfg.to_json();

    let mut files = Vec::new();
    for i in 0..rs.count {
        let field = sample_realization_indexed(&model, &grid, cfg.seed, i as u64);
        let name = format!("realization_{i:04}.csv");
        let mut w = out.open(&name)?;
        std::io::Write::write_fmt(&mut w, format_args!("# resolved: {resolved}\n"))?;
        write_realization_csv(&field, &mut w)?;
        std::io::Write::flush(&mut w)?;
        files.push(name);
    }

    // realization statistics at each requested r: |F(r)|^2, |F(-r)|^2, F*(-r) F(r)
    let pts: Vec<Vec3> = rs.points.iter().flat_map(|p| [Vec3::from_array(*p), -Vec3::from_array(*p)]).collect();
    let est = if pts.is_empty() {
        Vec::new()
    } else {
        ensemble_estimate(&model, &pts, rs.ensemble, cfg.seed, |f| {
            f.chunks(2)
                .flat_map(|c| [Complex64::from(c[0].norm_sqr()), Complex64::from(c[1].norm_sqr()), c[1].conj() * c[0]])
                .collect()
        })?
    };
    let mut rows = Vec::new();
    for (j, p) in rs.points.iter().enumerate() {
        let r = Vec3::from_array(*p);
        let (ip, im, n) = (est[3 * j], est[3 * j + 1], est[3 * j + 2]);
        let mu = n.mean / (ip.mean.re * im.mean.re).sqrt();
        // first-order propagation of the three standard errors
        let rel = ((n.stderr / n.mean.norm()).powi(2)
            + 0.25 * (ip.stderr / ip.mean.re).powi(2)
            + 0.25 * (im.stderr / im.mean.re).powi(2))
        .sqrt();
        let i_model = model.correlate(r, r).re;
        let n_model = model.correlate(-r, r);
        let mu_model = n_model / (i_model * model.correlate(-r, -r).re).sqrt();
        rows.push([
            p[0],
            p[1],
            p[2],
            ip.mean.re,
            ip.stderr,
            i_model,
            n.mean.re,
            n.mean.im,
            n.stderr,
            n_model.re,
            n_model.im,
            mu.re,
            mu.im,
            mu.norm() * rel,
            mu_model.re,
            mu_model.im,
        ]);
    }
    out.csv(
        "ensemble_summary.csv",
        &resolved,
        &[
            "x",
            "y",
            "z",
            "i_est",
            "i_stderr",
            "i_model",
            "n_re",
            "n_im",
            "n_stderr",
            "n_model_re",
            "n_model_im",
            "mu_re",
            "mu_im",
            "mu_stderr",
            "mu_model_re",
            "mu_model_im",
        ],
        rows.iter().map(|r| &r[..]),
    )?;
    files.push("ensemble_summary.csv".into());

    let ev = realization_evenness_check(&model, &grid, rs.ensemble.min(200), cfg.seed)?;
    let mut side = sidecar(cfg, "realize");
    side.insert("medium".into(), json!(MediumModel::Bochner(model.clone()).describe()));
    side.insert("v_nodes".into(), json!(model.grid().len()));
    side.insert(
        "evenness".into(),
        json!({ "realizations": ev.realizations, "max_pt_violation": ev.pt_violation,
                "max_even_violation": ev.even_violation, "max_abs": ev.max_abs }),
    );
    side.insert("files".into(), json!(files));
    out.json("realize.json", &Value::Object(side))?;
    Ok(Status::Pass)
}
