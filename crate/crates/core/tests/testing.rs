use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

use anisotest_core::geometry::{Point, PointPattern, Window};
use anisotest_core::processes::{sim_lgcp, sim_poisson, ModelSpec};
use anisotest_core::replication::{ReplicationConfig, TilingConfig};
use anisotest_core::rng::{derive_seed, RngStream};
use anisotest_core::summaries::{AngleGrid, FrequencyGrid, RangeGrid};
use anisotest_core::testing::{
    functional_direction, functional_range, mc_p_value, run_isotropy_test, stat_ms, stat_ms_std, Dss,
    FunctionalSpec, PValueOrientation, Recentering, StatKind, TestConfig,
};
use proptest::prelude::*;

fn unit() -> Window {
    Window::centered_square(1.0).unwrap()
}

fn config(dss: Dss, stat: StatKind, replication: ReplicationConfig, n: usize) -> TestConfig {
    TestConfig {
        functional: FunctionalSpec::standard(dss, FRAC_PI_6),
        statistic: stat,
        replication,
        n_replicates: n,
        alpha_level: 0.05,
        recentering: Recentering::Plugin,
        pvalue_orientation: PValueOrientation::Standard,
    }
}

#[test]
fn axis_symmetric_pattern_has_zero_contrast() {
    let mut rng = RngStream::from_seed(4);
    let base = sim_poisson(100.0, &unit(), &mut rng).unwrap();
    let mut pts: Vec<Point> = base.points().to_vec();
    pts.extend(base.points().iter().map(|p| Point::new(p.y, p.x)).filter(|q| !base.points().contains(q)));
    let pat = PointPattern::new(pts, unit()).unwrap();
    let grid = RangeGrid::new(0.25, 36).unwrap();
    for dss in [Dss::gloc(), Dss::kcyl()] {
        let v = functional_range(&pat, dss, 0.0, FRAC_PI_2, &grid).unwrap();
        assert!(v.values.iter().all(|x| x.abs() < 1e-12), "{dss:?}: {:?}", v.values);
    }
}

#[test]
fn kcyl_contrast_of_two_points() {
    let pat = PointPattern::new(vec![Point::new(0.0, 0.0), Point::new(0.1, 0.0)], unit()).unwrap();
    let grid = RangeGrid::new(0.1, 1).unwrap();
    let v = functional_range(&pat, Dss::kcyl(), 0.0, FRAC_PI_2, &grid).unwrap();
    assert!((v.values[0] - 0.5555556).abs() < 1e-7);
}

#[test]
fn direction_functional_of_single_point() {
    let w = Window::new(0.0, 2.0, 0.0, 2.0).unwrap();
    let pat = PointPattern::new(vec![Point::new(1.3, 0.2)], w).unwrap();
    let v = functional_direction(&pat, 7.5f64.to_radians(), &FrequencyGrid::new(15).unwrap(), &AngleGrid::new(36).unwrap())
        .unwrap();
    assert_eq!(v.values.len(), 36);
    assert!(v.values.iter().all(|x| (x - 0.25).abs() < 1e-12));
}

#[test]
fn poisson_direction_spectrum_is_nearly_flat() {
    let spec = FunctionalSpec::standard(Dss::theta(), FRAC_PI_6);
    let mut rng = RngStream::from_seed(5);
    let mut sum = vec![0.0; 36];
    for _ in 0..200 {
        let v = spec.evaluate(&sim_poisson(400.0, &unit(), &mut rng).unwrap()).unwrap();
        for (s, x) in sum.iter_mut().zip(&v.values) {
            *s += x / 200.0;
        }
    }
    let mean = sum.iter().sum::<f64>() / 36.0;
    let sd = (sum.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 35.0).sqrt();
    assert!(sd / mean < 0.5, "cv {}", sd / mean);
}

#[test]
fn swapping_directions_negates_functionals_and_keeps_the_test() {
    let pat = sim_lgcp(&ModelSpec::paper_lgcp(0.6), &unit(), &mut RngStream::from_seed(6)).unwrap();
    for (dss, stat) in [
        (Dss::gloc(), StatKind::Ms),
        (Dss::kcyl(), StatKind::MsRangeStd),
        (Dss::kcyl(), StatKind::MsDirStd),
    ] {
        let cfg = config(dss, stat, ReplicationConfig::Tiling(TilingConfig { k: 3 }), 39);
        let mut swapped = cfg;
        swapped.functional.alpha1 = cfg.functional.alpha2;
        swapped.functional.alpha2 = cfg.functional.alpha1;
        let a = run_isotropy_test(&pat, &cfg, 17).unwrap();
        let b = run_isotropy_test(&pat, &swapped, 17).unwrap();
        for (x, y) in a.v0.iter().zip(&b.v0) {
            assert!((x + y).abs() < 1e-9);
        }
        assert!((a.t0 - b.t0).abs() <= 1e-9 * a.t0.abs().max(1.0));
        for (x, y) in a.t_rep.iter().zip(&b.t_rep) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
        assert_eq!(a.p_value, b.p_value);
    }
}

#[test]
fn test_is_bit_identical_across_invocations() {
    let pat = sim_poisson(400.0, &unit(), &mut RngStream::from_seed(7)).unwrap();
    let cfg = config(Dss::gloc(), StatKind::Ms, ReplicationConfig::Tiling(TilingConfig { k: 4 }), 19);
    let a = run_isotropy_test(&pat, &cfg, 99).unwrap();
    let b = run_isotropy_test(&pat, &cfg, 99).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = (a.p_value * 20.0).round();
    assert_eq!(c / 20.0, a.p_value);
    assert_eq!(a.reject, a.p_value <= 0.05);
}

#[test]
fn result_json_has_documented_fields() {
    let pat = sim_poisson(400.0, &unit(), &mut RngStream::from_seed(8)).unwrap();
    let cfg = config(Dss::kcyl(), StatKind::MsRangeStd, ReplicationConfig::Tiling(TilingConfig { k: 3 }), 19);
    let r = run_isotropy_test(&pat, &cfg, 1).unwrap();
    let json: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in [
        "dss",
        "statistic",
        "replication",
        "n_replicates",
        "T0",
        "p_value",
        "reject",
        "alpha_level",
        "dropped_coordinates",
        "seed",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["dss"], "Kcyl");
    assert_eq!(json["statistic"], "MS_RangeStd");
}

#[test]
fn poisson_tiling_size_is_calibrated() {
    let cfg = config(Dss::gloc(), StatKind::Ms, ReplicationConfig::Tiling(TilingConfig { k: 3 }), 199);
    let mut rejections = 0;
    for i in 0..200 {
        let mut rng = RngStream::from_seed(derive_seed(2024, 1, i, 0));
        let pat = sim_poisson(400.0, &unit(), &mut rng).unwrap();
        if run_isotropy_test(&pat, &cfg, derive_seed(2024, 1, i, 1)).unwrap().reject {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / 200.0;
    assert!((0.01..=0.10).contains(&rate), "rate {rate}");
}

#[test]
fn oracle_test_detects_strong_lgcp_anisotropy() {
    let cfg = config(
        Dss::kcyl(),
        StatKind::MsRangeStd,
        ReplicationConfig::ParametricMc {
            model: ModelSpec::paper_lgcp(1.0),
        },
        99,
    );
    let model = ModelSpec::paper_lgcp(0.4);
    let mut rejections = 0;
    for i in 0..100 {
        let mut rng = RngStream::from_seed(derive_seed(2025, 2, i, 0));
        let pat = sim_lgcp(&model, &unit(), &mut rng).unwrap();
        if run_isotropy_test(&pat, &cfg, derive_seed(2025, 2, i, 1)).unwrap().reject {
            rejections += 1;
        }
    }
    assert!(rejections > 50, "{rejections} of 100");
}

#[test]
fn zero_replicates_is_an_error() {
    let pat = sim_poisson(400.0, &unit(), &mut RngStream::from_seed(9)).unwrap();
    let cfg = config(Dss::gloc(), StatKind::Ms, ReplicationConfig::Tiling(TilingConfig { k: 3 }), 0);
    assert!(run_isotropy_test(&pat, &cfg, 1).is_err());
}

#[test]
fn replicate_failure_names_the_index() {
    let pat = sim_poisson(400.0, &unit(), &mut RngStream::from_seed(10)).unwrap();
    let cfg = config(
        Dss::kcyl(),
        StatKind::Ms,
        ReplicationConfig::ParametricMc {
            model: ModelSpec::Poisson { lambda: 0.0 },
        },
        19,
    );
    let err = run_isotropy_test(&pat, &cfg, 1).unwrap_err().to_string();
    assert!(err.contains("replicate 0"), "{err}");
}

fn vectors(len: usize, n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
    (
        prop::collection::vec(-10.0..10.0f64, len),
        prop::collection::vec(prop::collection::vec(-10.0..10.0f64, len), n),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ms_is_invariant_to_replicate_order((v0, reps) in vectors(5, 8), shift in 1usize..8) {
        let a = stat_ms(&v0, &reps, Recentering::Plugin).unwrap();
        let mut rotated = reps.clone();
        rotated.rotate_left(shift);
        let b = stat_ms(&v0, &rotated, Recentering::Plugin).unwrap();
        prop_assert!((a.t0 - b.t0).abs() < 1e-9);
        let mut ta = a.t_rep.clone();
        let mut tb = b.t_rep.clone();
        ta.sort_by(f64::total_cmp);
        tb.sort_by(f64::total_cmp);
        for (x, y) in ta.iter().zip(&tb) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn standardised_statistic_is_scale_free((v0, reps) in vectors(6, 10), c in 0.01..100.0f64) {
        let a = stat_ms_std(&v0, &reps, Recentering::Plugin).unwrap();
        let scale = |v: &Vec<f64>| v.iter().map(|x| x * c).collect::<Vec<_>>();
        let b = stat_ms_std(&scale(&v0), &reps.iter().map(scale).collect::<Vec<_>>(), Recentering::Plugin).unwrap();
        prop_assert!((a.t0 - b.t0).abs() <= 1e-9 * a.t0.max(1.0));
        for (x, y) in a.t_rep.iter().zip(&b.t_rep) {
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn statistics_are_non_negative((v0, reps) in vectors(4, 6)) {
        for kind in [StatKind::Ms, StatKind::MsRangeStd, StatKind::MsDirStd] {
            for rc in [Recentering::Plugin, Recentering::Loo] {
                let out = anisotest_core::testing::compute_statistic(kind, &v0, &reps, rc).unwrap();
                prop_assert!(out.t0 >= 0.0);
                prop_assert!(out.t_rep.iter().all(|t| *t >= 0.0));
            }
        }
    }

    #[test]
    fn p_value_is_on_the_lattice(t0 in 0.0..5.0f64, reps in prop::collection::vec(0.0..5.0f64, 1..200)) {
        let p = mc_p_value(t0, &reps);
        let c = p * (reps.len() + 1) as f64;
        prop_assert!((c - c.round()).abs() < 1e-9);
        prop_assert!(c.round() >= 1.0 && p <= 1.0);
    }

    #[test]
    fn relabelling_points_leaves_functionals_unchanged(seed in 0u64..1000, shift in 1usize..50) {
        let pat = sim_poisson(100.0, &unit(), &mut RngStream::from_seed(seed)).unwrap();
        prop_assume!(pat.len() > 2);
        let mut pts = pat.points().to_vec();
        let k = shift % pts.len();
        pts.rotate_left(k);
        let perm = PointPattern::new(pts, unit()).unwrap();
        for dss in [Dss::gloc(), Dss::kcyl(), Dss::theta()] {
            let spec = FunctionalSpec::standard(dss, FRAC_PI_6);
            let (a, b) = (spec.evaluate(&pat).unwrap(), spec.evaluate(&perm).unwrap());
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }
}
