use gevtail::{
    combination_weights, combined_estimate, combined_estimate_opts, elemental_estimate,
    enumerate_elementals, order_sample, spacing_ratios, weight_vector, ElementalIndex, Error,
    Family, OrderedSample, WeightScheme,
};

fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} (tol {tol})"
    );
}

fn idx(i: usize, j: usize, n: usize) -> ElementalIndex {
    ElementalIndex::new(i, j, n).unwrap()
}

#[test]
fn order_sample_sorts_descending() {
    assert_eq!(order_sample(&[0.0, -1.0, 1.0]).unwrap().values(), &[1.0, 0.0, -1.0]);
    assert_eq!(order_sample(&[5.0]).unwrap().values(), &[5.0]);
    assert_eq!(order_sample(&[2.0, 2.0, 1.0]).unwrap().values(), &[2.0, 2.0, 1.0]);
    assert!(matches!(order_sample(&[]), Err(Error::Input(_))));
    assert!(matches!(order_sample(&[1.0, f64::NAN]), Err(Error::Input(_))));
    assert!(matches!(order_sample(&[1.0, f64::INFINITY]), Err(Error::Input(_))));
}

#[test]
fn from_descending_validates_order() {
    assert!(OrderedSample::from_descending(vec![3.0, 1.0, 0.0]).is_ok());
    assert!(OrderedSample::from_descending(vec![1.0, 3.0]).is_err());
}

#[test]
fn elemental_index_validation() {
    assert!(ElementalIndex::new(1, 3, 3).is_ok());
    assert!(ElementalIndex::new(1, 2, 3).is_err());
    assert!(ElementalIndex::new(0, 3, 3).is_err());
    assert!(ElementalIndex::new(2, 4, 3).is_err());
}

#[test]
fn spacing_ratio_examples() {
    let s = order_sample(&[1.0, 0.0, -1.0]).unwrap();
    let r = spacing_ratios(&s, idx(1, 3, 3)).unwrap();
    assert_eq!((r.tau, r.t), (0.5, 0.5));

    let s = order_sample(&[3.0, 1.0, 0.0]).unwrap();
    let r = spacing_ratios(&s, idx(1, 3, 3)).unwrap();
    assert_close(r.tau, 2.0 / 3.0, 1e-15, "tau");
    assert_close(r.t, 1.0 / 3.0, 1e-15, "t");

    let s = order_sample(&[1.0, 1.0, 0.0]).unwrap();
    assert!(matches!(
        spacing_ratios(&s, idx(1, 3, 3)),
        Err(Error::DegenerateSpacing { i: 1, j: 3, .. })
    ));

    let s = order_sample(&[1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        spacing_ratios(&s, idx(1, 3, 3)),
        Err(Error::DegenerateSpacing { .. })
    ));

    let s = order_sample(&[1.0, 1.0, 1.0]).unwrap();
    assert!(matches!(
        spacing_ratios(&s, idx(1, 3, 3)),
        Err(Error::DegenerateSpacing { .. })
    ));
}

#[test]
fn ratios_stay_in_unit_interval() {
    let s = order_sample(&[9.0, 4.5, 4.4, 1.0, 0.2, -3.0, -17.0]).unwrap();
    for e in enumerate_elementals(7).unwrap() {
        let r = spacing_ratios(&s, e).unwrap();
        assert!(r.tau > 0.0 && r.tau <= 1.0, "tau {} at {e}", r.tau);
        assert!(r.t > 0.0 && r.t <= 1.0, "t {} at {e}", r.t);
    }
}

#[test]
fn elemental_estimate_examples() {
    let s = order_sample(&[1.0, 0.0, -1.0]).unwrap();
    assert_close(
        elemental_estimate(&s, idx(1, 3, 3), Family::Gev).unwrap(),
        -0.23330318276725141,
        1e-12,
        "midpoint elemental",
    );

    let s = order_sample(&[3.0, 1.0, 0.0]).unwrap();
    assert_close(
        elemental_estimate(&s, idx(1, 3, 3), Family::Gev).unwrap(),
        0.43336348389941526,
        1e-12,
        "gev elemental [3,1,0]",
    );
    assert_close(
        elemental_estimate(&s, idx(1, 3, 3), Family::Gpd).unwrap(),
        0.28768207245178093,
        1e-12,
        "gpd elemental [3,1,0]",
    );
}

#[test]
fn location_scale_invariance_of_elementals() {
    let s = order_sample(&[1.0, 0.0, -1.0]).unwrap();
    let t = order_sample(&[7.0, 4.0, 1.0]).unwrap();
    let a = elemental_estimate(&s, idx(1, 3, 3), Family::Gev).unwrap();
    let b = elemental_estimate(&t, idx(1, 3, 3), Family::Gev).unwrap();
    assert_close(b, a, 1e-9, "shift/scale invariance");
}

#[test]
fn enumeration_order_and_count() {
    let e3 = enumerate_elementals(3).unwrap();
    assert_eq!(e3, vec![idx(1, 3, 3)]);

    let e4 = enumerate_elementals(4).unwrap();
    assert_eq!(e4, vec![idx(1, 3, 4), idx(1, 4, 4), idx(2, 4, 4)]);

    assert_eq!(enumerate_elementals(7).unwrap().len(), 15);
    for n in 3..=40 {
        assert_eq!(
            enumerate_elementals(n).unwrap().len(),
            (n - 1) * (n - 2) / 2,
            "count at n={n}"
        );
    }
    assert!(matches!(enumerate_elementals(2), Err(Error::Domain(_))));
}

#[test]
fn named_weight_examples() {
    let w = combination_weights(&WeightScheme::Equal, 3).unwrap();
    assert_eq!(w, vec![(idx(1, 3, 3), 1.0)]);

    let w = combination_weights(&WeightScheme::Nj1, 4).unwrap();
    assert_eq!(
        w,
        vec![(idx(1, 3, 4), 0.5), (idx(1, 4, 4), 0.25), (idx(2, 4, 4), 0.25)]
    );

    let w = combination_weights(&WeightScheme::I, 4).unwrap();
    assert_eq!(
        w,
        vec![(idx(1, 3, 4), 0.25), (idx(1, 4, 4), 0.25), (idx(2, 4, 4), 0.5)]
    );
}

#[test]
fn weights_normalize_to_unit_sum() {
    for scheme in gevtail::NAMED_SCHEMES {
        for n in [3usize, 4, 7, 12, 25] {
            let w = weight_vector(&scheme, n).unwrap();
            let sum: f64 = w.iter().sum();
            assert!(
                (sum - 1.0).abs() < 1e-12,
                "scheme {} at n={n} sums to {sum}",
                scheme.name()
            );
            assert!(w.iter().all(|&x| x >= 0.0));
        }
    }
}

#[test]
fn custom_weights() {
    let scheme = WeightScheme::Custom(vec![(1, 3, 2.0), (2, 4, 2.0)]);
    let w = combination_weights(&scheme, 4).unwrap();
    assert_eq!(w, vec![(idx(1, 3, 4), 0.5), (idx(1, 4, 4), 0.0), (idx(2, 4, 4), 0.5)]);

    let all_zero = WeightScheme::Custom(vec![(1, 3, 0.0)]);
    assert!(matches!(weight_vector(&all_zero, 4), Err(Error::Config(_))));

    let bad_pair = WeightScheme::Custom(vec![(1, 2, 1.0)]);
    assert!(matches!(weight_vector(&bad_pair, 4), Err(Error::Config(_))));

    let negative = WeightScheme::Custom(vec![(1, 3, -1.0)]);
    assert!(matches!(weight_vector(&negative, 4), Err(Error::Config(_))));

    let dup = WeightScheme::Custom(vec![(1, 3, 1.0), (1, 3, 2.0)]);
    assert!(matches!(weight_vector(&dup, 4), Err(Error::Config(_))));
}

#[test]
fn combined_equals_elemental_at_n3() {
    let s = order_sample(&[0.4, -0.2, 2.5]).unwrap();
    let single = elemental_estimate(&s, idx(1, 3, 3), Family::Gev).unwrap();
    for scheme in gevtail::NAMED_SCHEMES {
        assert_eq!(
            combined_estimate(&s, &scheme, Family::Gev).unwrap(),
            single,
            "scheme {}",
            scheme.name()
        );
    }
}

#[test]
fn combined_estimate_midpoint_value() {
    let s = order_sample(&[1.0, 0.0, -1.0]).unwrap();
    assert_close(
        combined_estimate(&s, &WeightScheme::Equal, Family::Gev).unwrap(),
        -0.23330318276725141,
        1e-12,
        "combined [1,0,-1]",
    );
}

#[test]
fn combined_location_scale_invariance() {
    let raw = [3.1, -0.4, 0.0, 2.2, 5.9, 1.1, -2.7];
    let s = order_sample(&raw).unwrap();
    let moved: Vec<f64> = raw.iter().map(|x| 3.5 * x - 11.25).collect();
    let t = order_sample(&moved).unwrap();
    for family in [Family::Gev, Family::Gpd, Family::Weibull] {
        for scheme in gevtail::NAMED_SCHEMES {
            let a = combined_estimate(&s, &scheme, family).unwrap();
            let b = combined_estimate(&t, &scheme, family).unwrap();
            assert_close(b, a, 1e-9, &format!("{} {}", family.name(), scheme.name()));
        }
    }
}

#[test]
fn combined_lies_within_elemental_range() {
    let s = order_sample(&[4.0, 2.9, 2.7, 0.3, -1.0, -6.2]).unwrap();
    let ests: Vec<f64> = enumerate_elementals(6)
        .unwrap()
        .into_iter()
        .map(|e| elemental_estimate(&s, e, Family::Gev).unwrap())
        .collect();
    let lo = ests.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ests.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for scheme in gevtail::NAMED_SCHEMES {
        let c = combined_estimate(&s, &scheme, Family::Gev).unwrap();
        assert!(
            (lo - 1e-12..=hi + 1e-12).contains(&c),
            "{} estimate {c} outside [{lo}, {hi}]",
            scheme.name()
        );
    }
}

#[test]
fn degenerate_elemental_fails_combination_and_names_the_pair() {
    let s = order_sample(&[2.0, 1.0, 1.0, 0.0]).unwrap();
    match combined_estimate(&s, &WeightScheme::Equal, Family::Gev) {
        Err(Error::DegenerateSpacing { i, j, .. }) => {
            assert_eq!((i, j), (1, 3), "first offending elemental");
        }
        other => panic!("expected degenerate spacing, got {other:?}"),
    }
}

#[test]
fn skip_degenerate_renormalizes() {
    let s = order_sample(&[2.0, 1.0, 1.0, 0.0]).unwrap();
    let skipped =
        combined_estimate_opts(&s, &WeightScheme::Equal, Family::Gev, true).unwrap();
    // The tie X_2 = X_3 kills both (1,3) (t = 0) and (2,4) (tau = 0), so
    // (1,4) is the sole survivor and takes the whole weight.
    assert!(matches!(
        elemental_estimate(&s, idx(2, 4, 4), Family::Gev),
        Err(Error::DegenerateSpacing { i: 2, j: 4, .. })
    ));
    let e14 = elemental_estimate(&s, idx(1, 4, 4), Family::Gev).unwrap();
    assert_close(skipped, e14, 1e-12, "renormalized mean");

    let all_tied = order_sample(&[1.0, 1.0, 1.0]).unwrap();
    assert!(combined_estimate_opts(&all_tied, &WeightScheme::Equal, Family::Gev, true).is_err());
}

#[test]
fn zero_weight_elementals_may_be_degenerate() {
    // The tie breaks (1,3) and (2,4); a custom scheme that gives both
    // zero weight never evaluates them.
    let s = order_sample(&[2.0, 1.0, 1.0, 0.0]).unwrap();
    let scheme = WeightScheme::Custom(vec![(1, 4, 1.0)]);
    let c = combined_estimate(&s, &scheme, Family::Gev).unwrap();
    let e14 = elemental_estimate(&s, idx(1, 4, 4), Family::Gev).unwrap();
    assert_close(c, e14, 1e-12, "single-elemental custom weight");
}

#[test]
fn weibull_reflection_identity_by_hand() {
    let raw = [0.3, 1.9, -0.7, 4.2, 2.6];
    let x = order_sample(&raw).unwrap();
    let neg: Vec<f64> = raw.iter().map(|v| -v).collect();
    let y = order_sample(&neg).unwrap();
    let n = 5;
    for e in enumerate_elementals(n).unwrap() {
        let zeta = elemental_estimate(&y, e, Family::Weibull).unwrap();
        let xi = elemental_estimate(
            &x,
            idx(n + 1 - e.j, n + 1 - e.i, n),
            Family::Gev,
        )
        .unwrap();
        assert_close(zeta, xi, 1e-9, &format!("reflection at {e}"));
    }
}

#[test]
fn scheme_parsing() {
    for scheme in gevtail::NAMED_SCHEMES {
        assert_eq!(scheme.name().parse::<WeightScheme>().unwrap(), scheme);
    }
    assert!("best".parse::<WeightScheme>().is_err());
}
