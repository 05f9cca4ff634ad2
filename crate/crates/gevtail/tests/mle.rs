use gevtail::{
    fit_mle, gev_negloglik, idealized_sample, order_sample, sample_gev, FitOptions, GevParams,
    Init, MleStatus, OrderedSample, RngSpec,
};

fn gev(mu: f64, sigma: f64, xi: f64) -> GevParams {
    GevParams::new(mu, sigma, xi).unwrap()
}

fn sample(raw: &[f64]) -> OrderedSample {
    order_sample(raw).unwrap()
}

#[test]
fn negloglik_unit_examples() {
    // Every point at z = 0 contributes ln(sigma) + 1 in both branches.
    let s = OrderedSample::from_descending(vec![0.0, 0.0, 0.0]).unwrap();
    assert_eq!(gev_negloglik(&gev(0.0, 1.0, 0.0), &s), 3.0);
    assert_eq!(gev_negloglik(&gev(0.0, 1.0, 1.0), &s), 3.0);
}

#[test]
fn negloglik_frozen_values() {
    let s = sample(&[2.0, 1.0, 0.5, -0.25]);
    let v1 = gev_negloglik(&gev(0.3, 1.2, 0.15), &s);
    assert!(
        (v1 - 5.797280228285495).abs() < 1e-12,
        "xi=0.15 nll: {v1}"
    );
    let v0 = gev_negloglik(&gev(0.3, 1.2, 0.0), &s);
    assert!(
        (v0 - 5.666093566372606).abs() < 1e-12,
        "gumbel nll: {v0}"
    );
}

#[test]
fn negloglik_is_infinite_outside_support() {
    let s = sample(&[1.0, 0.5, -1.5]);
    // xi = 1, mu = 0, sigma = 1: support is x > -1.
    assert_eq!(gev_negloglik(&gev(0.0, 1.0, 1.0), &s), f64::INFINITY);
    // xi = -1: support is x < 1, violated by x = 1 exactly (1 + xi z = 0).
    assert_eq!(gev_negloglik(&gev(0.0, 1.0, -1.0), &s), f64::INFINITY);
    // Shifting mu clears it.
    assert!(gev_negloglik(&gev(-3.0, 1.0, 1.0), &s).is_finite());
}

#[test]
fn negloglik_never_nan() {
    let s = sample(&[3.0, 1.0, -2.0]);
    for &mu in &[-1e300, 0.0, 1e300] {
        for &sigma in &[1e-300, 1.0, 1e300] {
            for &xi in &[-1e8, -1.0, 0.0, 1.0, 1e8] {
                let v = gev_negloglik(&gev(mu, sigma, xi), &s);
                assert!(!v.is_nan(), "nan at mu={mu}, sigma={sigma}, xi={xi}");
            }
        }
    }
}

#[test]
fn fit_requires_three_points() {
    let s = sample(&[1.0, 0.0]);
    assert!(fit_mle(&s, &FitOptions::default()).is_err());
}

#[test]
fn fit_recovers_gumbel() {
    let truth = gev(2.0, 1.5, 0.0);
    let s = order_sample(&sample_gev(&truth, 500, RngSpec::new(101, 0))).unwrap();
    let fit = fit_mle(&s, &FitOptions::default()).unwrap();
    assert_eq!(fit.status, MleStatus::Converged, "{fit:?}");
    assert!(fit.params.xi().abs() < 0.15, "xi = {}", fit.params.xi());
    assert!((fit.params.mu() - 2.0).abs() < 0.3, "mu = {}", fit.params.mu());
    assert!((fit.params.sigma() - 1.5).abs() < 0.3, "sigma = {}", fit.params.sigma());
    // The fit cannot be worse than the truth it was generated from.
    assert!(fit.negloglik <= gev_negloglik(&truth, &s) + 1e-9);
}

#[test]
fn fit_recovers_positive_xi() {
    let truth = gev(0.0, 1.0, 0.5);
    let s = order_sample(&sample_gev(&truth, 1000, RngSpec::new(7, 3))).unwrap();
    let fit = fit_mle(&s, &FitOptions::default()).unwrap();
    assert_eq!(fit.status, MleStatus::Converged, "{fit:?}");
    assert!((fit.params.xi() - 0.5).abs() < 0.15, "xi = {}", fit.params.xi());
    assert!(fit.negloglik <= gev_negloglik(&truth, &s) + 1e-9);
}

#[test]
fn init_choices_reach_the_same_optimum() {
    let s = order_sample(&sample_gev(&gev(1.0, 2.0, -0.2), 400, RngSpec::new(55, 0))).unwrap();
    let a = fit_mle(&s, &FitOptions { init: Init::Elemental, ..Default::default() }).unwrap();
    let b = fit_mle(&s, &FitOptions { init: Init::Moments, ..Default::default() }).unwrap();
    let c = fit_mle(
        &s,
        &FitOptions { init: Init::Explicit(gev(0.5, 1.0, 0.1)), ..Default::default() },
    )
    .unwrap();
    assert!((a.negloglik - b.negloglik).abs() < 1e-4, "{} vs {}", a.negloglik, b.negloglik);
    assert!((a.negloglik - c.negloglik).abs() < 1e-4, "{} vs {}", a.negloglik, c.negloglik);
    assert!((a.params.xi() - b.params.xi()).abs() < 5e-3);
    assert!((a.params.xi() - c.params.xi()).abs() < 5e-3);
}

#[test]
fn fit_is_location_scale_equivariant() {
    let raw = sample_gev(&gev(0.0, 1.0, 0.2), 300, RngSpec::new(9, 1));
    let s1 = order_sample(&raw).unwrap();
    let (shift, scale) = (10.0, 2.0);
    let moved: Vec<f64> = raw.iter().map(|&x| shift + scale * x).collect();
    let s2 = order_sample(&moved).unwrap();

    let f1 = fit_mle(&s1, &FitOptions::default()).unwrap();
    let f2 = fit_mle(&s2, &FitOptions::default()).unwrap();
    assert!((f1.params.xi() - f2.params.xi()).abs() < 5e-3);
    assert!((f2.params.mu() - (shift + scale * f1.params.mu())).abs() < 5e-3);
    assert!((f2.params.sigma() - scale * f1.params.sigma()).abs() < 5e-3);
    // nll transforms by exactly n ln(scale).
    let expected_shift = 300.0 * scale.ln();
    assert!(
        ((f2.negloglik - f1.negloglik) - expected_shift).abs() < 1e-4,
        "nll offset {}",
        f2.negloglik - f1.negloglik
    );
}

#[test]
fn zero_iterations_reports_max_iter() {
    let s = sample(&[3.0, 1.0, 0.2, -0.5]);
    let opts = FitOptions { max_iter: 0, ..Default::default() };
    let fit = fit_mle(&s, &opts).unwrap();
    assert_eq!(fit.iterations, 0);
    assert_eq!(fit.status, MleStatus::MaxIter);
}

#[test]
fn fit_is_deterministic() {
    let s = order_sample(&sample_gev(&gev(0.0, 1.0, 0.3), 200, RngSpec::new(4, 4))).unwrap();
    let a = fit_mle(&s, &FitOptions::default()).unwrap();
    let b = fit_mle(&s, &FitOptions::default()).unwrap();
    assert_eq!(a.params.mu().to_bits(), b.params.mu().to_bits());
    assert_eq!(a.params.sigma().to_bits(), b.params.sigma().to_bits());
    assert_eq!(a.params.xi().to_bits(), b.params.xi().to_bits());
    assert_eq!(a.negloglik.to_bits(), b.negloglik.to_bits());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn idealized_fit_lands_near_the_generating_shape() {
    for &xi in &[-0.5, 0.0, 0.5] {
        let s = idealized_sample(&gev(0.0, 1.0, xi), 200).unwrap();
        let fit = fit_mle(&s, &FitOptions::default()).unwrap();
        assert!(
            (fit.params.xi() - xi).abs() < 0.1,
            "xi={xi}: fitted {}",
            fit.params.xi()
        );
    }
}

#[test]
fn status_names_are_stable() {
    assert_eq!(MleStatus::Converged.name(), "converged");
    assert_eq!(MleStatus::MaxIter.name(), "max_iter");
    assert_eq!(MleStatus::BoundarySuspect.name(), "boundary_suspect");
    assert_eq!(MleStatus::Failed.name(), "failed");
}
