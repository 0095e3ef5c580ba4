use std::sync::Arc;

use num_complex::Complex64;
use ptscatter::born::{ctilde, ctilde_cl_closed, ctilde_pt_closed, pt_amplitude};
use ptscatter::media::{
    anti_strength, strength, BochnerKernel, CorrelationModel, FnCorrelation, SampledKernel, SpectralWeight,
    SymmetryClass, SymmetryKind, SymmetryLevel,
};
use ptscatter::oracle::*;
use ptscatter::{BochnerModel, ClassicQuadratic, Error, MediumModel, PtSchellLinear, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt_model() -> PtSchellLinear {
    PtSchellLinear::new(1.0, 1.0, 1.0, Vec3::new(0.4, -0.3, 0.2), Vec3::new(0.1, 0.2, -0.5)).unwrap()
}

fn random_vec(r: &mut ChaCha8Rng, half: f64) -> Vec3 {
    Vec3::new(r.random_range(-half..half), r.random_range(-half..half), r.random_range(-half..half))
}

#[test]
fn quadrature_hits_the_peak_amplitude() {
    let m = PtSchellLinear::new(1.0, 1.0, 0.7, Vec3::zero(), Vec3::zero()).unwrap();
    let q = ctilde_separable(&m, Vec3::zero(), Vec3::zero(), &QuadratureSpec::default()).unwrap();
    let a = pt_amplitude(&m);
    assert!((q.value.re - a).abs() < 1e-8 * a);
    assert!(q.rel_change < 1e-8);
}

#[test]
fn quadrature_of_pt_is_real() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let m = MediumModel::from(pt_model());
    let spec = QuadratureSpec::for_model(&m);
    for _ in 0..50 {
        let (k1, k2) = (random_vec(&mut r, 2.3), random_vec(&mut r, 2.3));
        let v = ctilde_quadrature(&m, k1, k2, &spec).unwrap();
        assert!(v.im.abs() <= 1e-8 * v.norm());
    }
}

#[test]
fn quadrature_of_classic_swaps_to_conjugate() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let m = MediumModel::from(ClassicQuadratic::new(1.0, 1.0, 1.0, 2.0).unwrap());
    let spec = QuadratureSpec::for_model(&m);
    for _ in 0..20 {
        let (k1, k2) = (random_vec(&mut r, 1.7), random_vec(&mut r, 1.7));
        let a = ctilde_quadrature(&m, k1, k2, &spec).unwrap();
        let b = ctilde_quadrature(&m, k2, k1, &spec).unwrap();
        assert!((b - a.conj()).norm() <= 1e-8 * a.norm());
    }
}

#[test]
fn classic_quadrature_matches_closed_form_at_figure_parameters() {
    // ka = 1, alpha/k^2 = 2, d/a = 1
    let c = ClassicQuadratic::new(1.0, 1.0, 1.0, 2.0).unwrap();
    let m = MediumModel::from(c);
    let (k1, k2) = (Vec3::new(0.3, -0.4, 0.5), Vec3::new(-0.6, 0.1, 0.2));
    let q = ctilde_quadrature(&m, k1, k2, &QuadratureSpec::for_model(&m)).unwrap();
    let cf = ctilde_cl_closed(&c, k1, k2);
    assert!((q - cf).norm() < 1e-10 * cf.norm(), "{q} vs {cf}");
}

#[test]
fn trapezoid_rule_agrees() {
    let m = pt_model();
    let spec = QuadratureSpec { nodes_per_axis: 64, extent: 9.0, rule: QuadratureRule::Trapezoid };
    let (k1, k2) = (Vec3::new(0.5, 0.2, -1.0), Vec3::new(1.1, -0.3, 0.4));
    let q = ctilde_separable(&m, k1, k2, &spec).unwrap().value;
    let c = ctilde_pt_closed(&m, k1, k2);
    assert!((q - c).norm() < 1e-10 * c.norm());
}

#[test]
fn spec_is_validated() {
    let m = MediumModel::from(pt_model());
    let few = QuadratureSpec { nodes_per_axis: 4, ..QuadratureSpec::default() };
    assert!(matches!(ctilde_quadrature(&m, Vec3::zero(), Vec3::zero(), &few), Err(Error::InvalidParameter(_))));
    let short = QuadratureSpec { extent: 3.0, ..QuadratureSpec::default() };
    assert!(ctilde_quadrature(&m, Vec3::zero(), Vec3::zero(), &short).is_err());
}

#[test]
fn coarse_grids_report_non_convergence() {
    let m = MediumModel::from(ClassicQuadratic::new(1.0, 1.0, 3.0, 2.0).unwrap());
    let spec = QuadratureSpec { nodes_per_axis: 8, ..QuadratureSpec::default() };
    let r = ctilde_quadrature(&m, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), &spec);
    assert!(matches!(r, Err(Error::NotConverged { .. })), "{r:?}");
}

#[test]
fn generic_route_matches_analytic_kernel_transform() {
    let b = BochnerModel::from_pt_schell(&pt_model(), 3).unwrap();
    let spec = QuadratureSpec { nodes_per_axis: 16, ..QuadratureSpec::default() };
    let (k1, k2) = (Vec3::new(0.3, 0.0, -0.2), Vec3::new(-0.1, 0.4, 0.2));
    let q = ctilde_bochner_quadrature(&b, k1, k2, &spec, None).unwrap();
    let exact = ctilde(&MediumModel::from(b.clone()), k1, k2).unwrap();
    assert!((q.value - exact).norm() < 1e-10 * exact.norm(), "{} vs {exact}", q.value);
}

#[test]
fn generic_route_handles_sampled_kernels() {
    let amp = ptscatter::media::Amplitude::gaussian(1.0, 1.0);
    let kernel = SampledKernel {
        label: "schell".into(),
        func: Arc::new(move |r: Vec3, v: Vec3| {
            let p = -2.0 * std::f64::consts::PI * r.dot(v);
            amp.eval(r) * Complex64::new(p.cos(), p.sin())
        }),
    };
    let w = SpectralWeight::gaussian_for_correlation(1.0, Vec3::zero());
    let sampled = BochnerModel::new(w.clone(), BochnerKernel::Sampled(kernel), SymmetryClass::Generic, 3).unwrap();
    let analytic = BochnerModel::new(w, BochnerKernel::Schell(amp), SymmetryClass::Generic, 3).unwrap();
    let spec = QuadratureSpec { nodes_per_axis: 16, ..QuadratureSpec::default() };
    let k = Vec3::new(0.2, -0.3, 0.1);
    assert!(matches!(ctilde_bochner_quadrature(&sampled, k, k, &spec, None), Err(Error::Unsupported(_))));
    let q = ctilde_bochner_quadrature(&sampled, k, k, &spec, Some(1.0)).unwrap();
    let exact = ctilde(&MediumModel::from(analytic), k, k).unwrap();
    assert!((q.value - exact).norm() < 1e-10 * exact.norm());
    let huge = QuadratureSpec { nodes_per_axis: 400, ..QuadratureSpec::default() };
    assert!(matches!(ctilde_bochner_quadrature(&sampled, k, k, &huge, Some(1.0)), Err(Error::InvalidGrid(_))));
}

#[test]
fn pt_realizations_are_pt_symmetric_and_reproducible() {
    let b = BochnerModel::from_pt_schell(&pt_model(), 9).unwrap();
    let grid = symmetric_grid(7, 2.0).unwrap();
    let f = sample_realization(&b, &grid, 42);
    let again = sample_realization(&b, &grid, 42);
    assert_eq!(f, again);
    assert_ne!(f.values, sample_realization(&b, &grid, 43).values);
    assert_ne!(f.values, sample_realization_indexed(&b, &grid, 42, 1).values);
    let n = grid.len();
    for i in 0..n {
        // the grid is built so that point n-1-i is the mirror of point i
        assert_eq!(grid[n - 1 - i], -grid[i] + Vec3::zero());
        assert!((f.values[n - 1 - i].conj() - f.values[i]).norm() < 1e-12);
    }
    let report = realization_evenness_check(&b, &grid, 50, 9).unwrap();
    assert!(report.pt_violation < 1e-12);
    assert!(report.even_violation > 1e-3);
    assert_eq!(report.kind(1e-9), SymmetryKind::Pt);
}

#[test]
fn realizations_have_zero_mean() {
    let b = BochnerModel::from_pt_schell(&pt_model(), 7).unwrap();
    let pts = [Vec3::new(0.2, 0.1, -0.3), Vec3::zero(), Vec3::new(-0.7, 0.5, 0.4)];
    let est = ensemble_estimate(&b, &pts, 10_000, 5, |f| f.to_vec()).unwrap();
    for e in est {
        assert_eq!(e.n, 10_000);
        assert!(e.z_score(Complex64::new(0.0, 0.0)) < 5.0, "{e:?}");
    }
}

#[test]
fn ensemble_estimates_match_closed_forms() {
    let m = pt_model();
    let b = BochnerModel::from_pt_schell(&m, 9).unwrap();
    let r = Vec3::new(0.5, -0.3, -0.2);
    let r2 = Vec3::new(-0.1, 0.5, 0.0);
    let pairs = [(r, r), (-r, r), (r, r2)];
    let est = estimate_correlation_batch(&b, &pairs, 20_000, 77).unwrap();
    let i = strength(&m, r);
    assert!(est[0].mean.re > 0.0 && est[0].mean.im.abs() < 5.0 * est[0].stderr);
    assert!(est[0].z_score(Complex64::new(i, 0.0)) < 5.0);
    let n = anti_strength(&m, r);
    assert!(n.im.abs() > 0.05, "test needs a visible anti-strength phase");
    assert!(est[1].z_score(n) < 5.0, "{:?} vs {n}", est[1]);
    assert!(est[2].z_score(m.correlate(r, r2)) < 5.0);
    let single = estimate_correlation(&b, r, r2, 20_000, 77).unwrap();
    assert_eq!(single, est[2]);
    assert!(estimate_correlation(&b, r, r2, 50, 1).is_err());
}

#[test]
fn ensemble_is_independent_of_thread_count() {
    let b = BochnerModel::from_pt_schell(&pt_model(), 5).unwrap();
    let pair = [(Vec3::new(0.1, 0.2, 0.3), Vec3::new(-0.3, 0.0, 0.2))];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_correlation_batch(&b, &pair, 3000, 11).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn realization_level_versus_correlation_level_classic() {
    let grid = symmetric_grid(5, 1.5).unwrap();
    let c = ClassicQuadratic::new(1.0, 1.0, 0.8, 0.6).unwrap();
    let schell = BochnerModel::from_classic_quadratic(&c, 7).unwrap();
    let report = realization_evenness_check(&schell, &grid, 20, 3).unwrap();
    assert!(report.even_violation > 0.1 * report.max_abs, "{report:?}");
    let cls = classify_with_realizations(&schell, &grid, 20, 3, 1e-9).unwrap();
    assert!(cls.correlation.is_classic());
    assert_eq!(cls.level_of(SymmetryKind::Classic), Some(SymmetryLevel::Correlation));

    let even = BochnerModel::even_cosine(1.0, 1.0, 0.8, 0.6, 7).unwrap();
    let report = realization_evenness_check(&even, &grid, 20, 3).unwrap();
    assert!(report.even_violation < 1e-12);
    let cls = classify_with_realizations(&even, &grid, 20, 3, 1e-9).unwrap();
    assert_eq!(cls.level_of(SymmetryKind::Classic), Some(SymmetryLevel::Both));
    let r = Vec3::new(0.4, -0.2, 0.3);
    let est = estimate_correlation_batch(&even, &[(-r, r), (r, r)], 5000, 8).unwrap();
    let mu = est[0].mean / est[1].mean;
    assert!((mu - Complex64::new(1.0, 0.0)).norm() < 5.0 * est[0].stderr / est[1].mean.re, "{mu}");

    let pt = BochnerModel::from_pt_schell(&pt_model(), 5).unwrap();
    let cls = classify_with_realizations(&pt, &grid, 10, 3, 1e-9).unwrap();
    assert_eq!(cls.level_of(SymmetryKind::Pt), Some(SymmetryLevel::Both));
}

#[test]
fn asymmetric_grids_are_rejected() {
    let b = BochnerModel::from_pt_schell(&pt_model(), 3).unwrap();
    let grid = [Vec3::new(0.1, 0.0, 0.0), Vec3::new(0.2, 0.0, 0.0)];
    assert!(matches!(realization_evenness_check(&b, &grid, 3, 0), Err(Error::InvalidGrid(_))));
}

#[test]
fn realization_csv_layout() {
    let b = BochnerModel::from_pt_schell(&pt_model(), 3).unwrap();
    let grid = symmetric_grid(2, 1.0).unwrap();
    let f = sample_realization(&b, &grid, 1);
    let mut buf = Vec::new();
    write_realization_csv(&f, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,z,re,im");
    assert_eq!(lines.len(), 9);
    let cols: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(cols[0], -1.0);
    assert_eq!(Complex64::new(cols[3], cols[4]), f.values[0]);
}

fn random_points(seed: u64, n: usize) -> Vec<Vec3> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_vec(&mut r, 2.0)).collect()
}

#[test]
fn gram_matrices_are_psd_for_shipped_models() {
    let pts = random_points(3, 50);
    let models: Vec<MediumModel> = vec![
        pt_model().into(),
        ClassicQuadratic::new(1.0, 1.0, 0.5, 2.0).unwrap().into(),
        BochnerModel::even_cosine(1.0, 1.0, 0.5, 0.3, 5).unwrap().into(),
    ];
    for m in &models {
        let rep = gram_psd_check(m, &pts, 1e-10).unwrap();
        assert!(rep.pass, "{} {rep:?}", m.describe());
        assert_eq!(rep.size, 50);
    }
}

#[test]
fn non_psd_control_fails() {
    let bad = FnCorrelation(|a: Vec3, b: Vec3| Complex64::new((a - b).norm_sqr().exp(), 0.0));
    let rep = gram_psd_check(&bad, &random_points(4, 50), 1e-10).unwrap();
    assert!(!rep.pass);
    assert!(rep.normalized_min() < -1e-3);
    assert!(gram_psd_check(&bad, &random_points(5, 201), 1e-10).is_err());
}
