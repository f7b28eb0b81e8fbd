use std::f64::consts::PI;

use dtm_core::geometry::dist2;
use dtm_core::sampling::*;
use dtm_core::PointCloud;

#[test]
fn figure8_noise_mean_is_small() {
    let n = 10_000;
    let sigma = 0.45;
    let (noisy, clean) =
        sample_figure8_with_clean(&Figure8Spec::default(), n, &NoiseSpec::new(sigma, 2024))
            .unwrap();
    let axis_std = sigma / 2f64.sqrt();
    let mut mean = [0.0; 2];
    for (p, q) in noisy.points().zip(clean.points()) {
        mean[0] += (p[0] - q[0]) / n as f64;
        mean[1] += (p[1] - q[1]) / n as f64;
    }
    let norm = (mean[0] * mean[0] + mean[1] * mean[1]).sqrt();
    // |mean|^2 / (axis_std^2 / n) is chi-square with 2 degrees of freedom.
    assert!(norm <= 3.0 * axis_std / (n as f64).sqrt(), "{norm}");
}

#[test]
fn figure8_circle_frequency() {
    let spec = Figure8Spec::default();
    let n = 20_000;
    let p = sample_figure8(&spec, n, &NoiseSpec::new(0.0, 99)).unwrap();
    let [c1, _] = spec.centers();
    let left = p
        .points()
        .filter(|x| (dist2(x, &c1).sqrt() - spec.r1).abs() < 1e-9)
        .count() as f64
        / n as f64;
    let w = spec.left_weight();
    let sd = (w * (1.0 - w) / n as f64).sqrt();
    assert!((left - w).abs() <= 3.0 * sd, "{left} vs {w}");
}

#[test]
fn samples_are_deterministic_per_seed() {
    let spec = Figure8Spec::default();
    let a = sample_figure8(&spec, 500, &NoiseSpec::new(0.3, 5)).unwrap();
    let b = sample_figure8(&spec, 500, &NoiseSpec::new(0.3, 5)).unwrap();
    assert_eq!(a.as_flat(), b.as_flat());
}

#[test]
fn alpha_on_unit_circle() {
    let c = circle_points(1.0, 10_000).unwrap();
    let est = estimate_alpha(&c, 1).unwrap();
    assert!((0.25..=0.35).contains(&est.alpha), "{}", est.alpha);
    assert!((est.alpha - circle_alpha(1.0)).abs() <= 0.1 * circle_alpha(1.0));
    let nr = est.radii.len();
    for (pi, _) in est.probes.iter().enumerate() {
        for (ri, &r) in est.radii.iter().enumerate() {
            let exact = circle_ball_mass(1.0, r);
            let got = est.masses[pi * nr + ri];
            assert!(
                (got - exact).abs() <= 0.1 * exact,
                "r={r}: {got} vs {exact}"
            );
        }
    }
}

#[test]
fn alpha_scales_with_radius() {
    let c = circle_points(2.0, 10_000).unwrap();
    let est = estimate_alpha(&c, 1).unwrap();
    assert!((est.alpha - circle_alpha(2.0)).abs() <= 0.1 * circle_alpha(2.0));
}

#[test]
fn alpha_halves_on_two_disjoint_circles() {
    let one = circle_points(1.0, 10_000).unwrap();
    let mut coords = Vec::new();
    // Gap 0.5: large balls reach the other circle before mass/r drops below 1/(2 pi).
    for shift in [-1.25, 1.25] {
        for p in one.points() {
            coords.extend_from_slice(&[p[0] + shift, p[1]]);
        }
    }
    let two = PointCloud::from_flat(2, coords).unwrap();
    let a1 = estimate_alpha(&one, 1).unwrap().alpha;
    let a2 = estimate_alpha(&two, 1).unwrap().alpha;
    assert!((a2 / a1 - 0.5).abs() <= 0.05, "{a1} {a2}");
    assert!((a2 - 1.0 / (2.0 * PI)).abs() <= 0.1 / (2.0 * PI));
}

#[test]
fn covering_number_on_random_circle() {
    let c = sample_circle(1.0, 1000, &NoiseSpec::new(0.0, 8)).unwrap();
    let report = covering_report(&c, 0.1, circle_alpha(1.0), 1).unwrap();
    // A ball of radius 0.1 covers an arc of angle 4 asin(0.05).
    let lower = (2.0 * PI / (4.0 * 0.05f64.asin())).ceil() as usize;
    assert!(report.count >= lower - 1, "{}", report.count);
    assert!((report.count as f64) <= report.packing_bound, "{report:?}");
}

#[test]
fn covering_number_is_monotone() {
    let c = sample_figure8(&Figure8Spec::default(), 800, &NoiseSpec::new(0.1, 4)).unwrap();
    let mut prev = usize::MAX;
    for i in 1..=40 {
        let eps = 0.02 * i as f64;
        let n = covering_number(&c, eps).unwrap();
        assert!(n <= prev, "eps={eps}");
        prev = n;
    }
}

#[test]
fn discretization_converges_in_w2() {
    let fine = circle_discretization(1.0, 512).unwrap();
    let coarse = circle_discretization(1.0, 64).unwrap();
    let w = dtm_core::w2_exact(&coarse, &fine).unwrap().distance;
    let bound = circle_discretization_error(1.0, 64) + circle_discretization_error(1.0, 512);
    assert!(w <= bound + 1e-12, "{w} > {bound}");
}

#[test]
fn figure8_discretization_sits_on_curve() {
    let spec = Figure8Spec::default();
    let mu = figure8_discretization(&spec, 1000).unwrap();
    assert_eq!(mu.len(), 1000);
    assert!(mu.support().points().all(|p| spec.distance(p) < 1e-12));
}
