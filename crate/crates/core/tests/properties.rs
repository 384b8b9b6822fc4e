use indoor_mmwave::angular::{azimuth_gain, rotational_average_power, AngularSpectrum, AntennaPattern, DegradationTables, Environment};
use indoor_mmwave::fading::{diversity_comparison, fade_durations, FadeTrace};
use indoor_mmwave::fitting::{fit_slope_intercept, FitParameters, Measurement};
use indoor_mmwave::layout::Point;
use indoor_mmwave::propagation::{CornerModel, FrequencyScaled, PathGainModel};
use indoor_mmwave::scene::load_scene;
use indoor_mmwave::stats::{from_db, stream_rng, EmpiricalCdf};
use indoor_mmwave::syssim::{simulate_coverage, RadioConfig, SimOptions};
use num_complex::Complex64;
use proptest::prelude::*;

fn measurements(points: &[(f64, f64)]) -> Vec<Measurement> {
    points.iter().map(|&(d, pg)| Measurement::at_distance(d, pg)).collect()
}

fn slope_intercept(r: &indoor_mmwave::fitting::FitReport) -> (f64, f64) {
    match r.parameters {
        FitParameters::SlopeIntercept { intercept_db, slope_db } => (intercept_db, slope_db),
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_shift_moves_only_intercept(
        pts in prop::collection::vec((1.0f64..200.0, -140.0f64..-50.0), 5..60),
        c in -30.0f64..30.0,
    ) {
        let base = measurements(&pts);
        prop_assume!(fit_slope_intercept(&base).is_ok());
        let shifted: Vec<_> = pts.iter().map(|&(d, pg)| (d, pg + c)).collect();
        let a = fit_slope_intercept(&base).unwrap();
        let b = fit_slope_intercept(&measurements(&shifted)).unwrap();
        let (ia, sa) = slope_intercept(&a);
        let (ib, sb) = slope_intercept(&b);
        prop_assert!((ib - ia - c).abs() < 1e-6);
        prop_assert!((sb - sa).abs() < 1e-6);
        prop_assert!((b.rms_error_db - a.rms_error_db).abs() < 1e-6);
    }

    #[test]
    fn fit_beats_perturbed_parameters(
        pts in prop::collection::vec((1.0f64..200.0, -140.0f64..-50.0), 5..60),
        scale in prop::sample::select(vec![0.9, 1.1]),
    ) {
        let data = measurements(&pts);
        let Ok(r) = fit_slope_intercept(&data) else { return Ok(()) };
        let (i, s) = slope_intercept(&r);
        let rms = |i: f64, s: f64| {
            (data.iter().map(|m| (m.pg_db - i - s * m.distance().log10()).powi(2)).sum::<f64>() / data.len() as f64).sqrt()
        };
        prop_assert!(r.rms_error_db <= rms(i * scale, s) + 1e-9);
        prop_assert!(r.rms_error_db <= rms(i, s * scale) + 1e-9);
    }

    #[test]
    fn path_gain_decreases_with_distance(d in 1.0f64..500.0, extra in 0.01f64..100.0) {
        for m in [PathGainModel::LOS_28GHZ, PathGainModel::NLOS_ROOM_28GHZ] {
            prop_assert!(m.path_gain(d + extra).unwrap() < m.path_gain(d).unwrap());
        }
    }

    #[test]
    fn corner_legs_commute(a in 0.0f64..80.0, b in 0.0f64..80.0, c in 0.0f64..80.0) {
        let m = CornerModel::default();
        let x = m.path_gain_segments(&[a, b, c]).unwrap();
        let y = m.path_gain_segments(&[c, a, b]).unwrap();
        prop_assert!((x - y).abs() < 1e-9);
        prop_assert!(m.path_gain_segments(&[a.max(1.0), b]).unwrap() <= m.path_gain_segments(&[a.max(1.0)]).unwrap() + m.pls_db + 1e-9);
    }

    #[test]
    fn frequency_round_trip(f in 1.0f64..100.0) {
        let m = CornerModel::default();
        let back = m.scale_frequency(f).unwrap().scale_frequency(28.0).unwrap();
        prop_assert!((back.pl1_db - m.pl1_db).abs() < 1e-9);
        prop_assert!((back.pls_db - m.pls_db).abs() < 1e-9);
        let los = PathGainModel::LOS_28GHZ.scale_frequency(f).unwrap();
        prop_assert_eq!(los.slope_db, PathGainModel::LOS_28GHZ.slope_db);
    }

    #[test]
    fn routes_are_symmetric(ax in -49.0f64..49.0, bx in -49.0f64..49.0, ay in 0usize..4, by in 0usize..4) {
        let layout = load_scene("h_building").unwrap().layout;
        let ys = [-4.0, 0.0, 20.0, 24.0];
        let a = Point::new(ax, ys[ay]);
        let b = Point::new(bx, ys[by]);
        let ab = layout.route(a, b).unwrap();
        let ba = layout.route(b, a).unwrap();
        prop_assert!((ab.manhattan_d - ba.manhattan_d).abs() < 1e-9);
        prop_assert_eq!(ab.n_turns, ba.n_turns);
        prop_assert!(ab.manhattan_d + 1e-9 >= ab.euclidean_d);
    }

    #[test]
    fn cdf_is_monotone_and_bounded(xs in prop::collection::vec(-100.0f64..100.0, 1..200), probe in prop::collection::vec(-150.0f64..150.0, 1..20)) {
        let cdf = EmpiricalCdf::new(xs).unwrap();
        let mut probe = probe;
        probe.sort_by(f64::total_cmp);
        let vals: Vec<f64> = probe.iter().map(|&x| cdf.cdf(x)).collect();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
        for (x, f) in cdf.steps() {
            prop_assert_eq!(cdf.cdf(x), f);
            prop_assert!(cdf.quantile(f) <= x);
        }
    }

    #[test]
    fn fade_durations_partition(samples in prop::collection::vec(0.0f64..3.0, 2..500), thr in -15.0f64..-0.1) {
        prop_assume!(samples.iter().sum::<f64>() > 0.0);
        let t = FadeTrace::new(samples.clone(), 740.0).unwrap();
        let durations = fade_durations(&t, thr).unwrap();
        let level = t.mean() * from_db(thr);
        let below = samples.iter().filter(|&&s| s < level).count();
        let total: f64 = durations.iter().map(|d| d * 740.0 / 1e3).sum();
        prop_assert!((total - below as f64).abs() < 1e-6);
        let n = t.normalized().unwrap();
        prop_assert!((n.mean() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn diversity_loss_nonnegative(
        a in prop::collection::vec(0.01f64..5.0, 200),
        b in prop::collection::vec(0.01f64..5.0, 200),
    ) {
        let ta = FadeTrace::new(a, 740.0).unwrap();
        let tb = FadeTrace::new(b, 740.0).unwrap();
        let cdf = diversity_comparison(&[ta, tb], 10.0, 3).unwrap();
        prop_assert!(cdf.min() >= 0.0);
    }

    #[test]
    fn azimuth_gain_nonnegative_and_shift_invariant(bins in prop::collection::vec(0.0f64..10.0, 360), k in 0usize..360) {
        prop_assume!(bins.iter().any(|b| *b > 0.0));
        let s = AngularSpectrum::new(bins).unwrap();
        let g = azimuth_gain(&s);
        prop_assert!(g >= -1e-12);
        prop_assert!((azimuth_gain(&s.shifted(k)) - g).abs() < 1e-9);
    }

    #[test]
    fn isotropic_pattern_sums_field(re in prop::collection::vec(-1.0f64..1.0, 360), im in prop::collection::vec(-1.0f64..1.0, 360)) {
        let h: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let sum: Complex64 = h.iter().sum();
        let got = rotational_average_power(&h, &AntennaPattern::isotropic()).unwrap();
        prop_assert!((got - sum.norm_sqr()).abs() < 1e-9 * (1.0 + got));
    }

    #[test]
    fn degradation_draws_nonnegative(seed in any::<u64>()) {
        let tables = DegradationTables::default();
        let mut rng = stream_rng(seed, 0);
        for env in Environment::ALL {
            prop_assert!(tables.get(env).sample(&mut rng) >= 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tx_power_shifts_snr_exactly(delta in 0.5f64..20.0, seed in any::<u64>()) {
        let scene = load_scene("h_building").unwrap();
        let opts = SimOptions { n_terminals: 200, seed, threads: Some(2) };
        let base = simulate_coverage(&scene.layout, &scene.radio, &scene.models, opts).unwrap();
        let louder = RadioConfig { tx_power_dbm: scene.radio.tx_power_dbm + delta, ..scene.radio.clone() };
        let up = simulate_coverage(&scene.layout, &louder, &scene.models, opts).unwrap();
        for (a, b) in base.links.iter().zip(&up.links) {
            prop_assert!(a.sinr_db <= a.snr_db + 1e-12);
            prop_assert!((b.snr_db - a.snr_db - delta).abs() < 1e-9);
            prop_assert!(b.sinr_db - a.sinr_db <= delta + 1e-9);
            let rate = scene.radio.bandwidth_hz * (1.0 + from_db(a.sinr_db)).log2();
            prop_assert!((rate - a.shannon_rate_bps).abs() < 1e-6);
        }
    }

    #[test]
    fn worker_count_does_not_change_results(seed in any::<u64>(), threads in 1usize..6) {
        let scene = load_scene("h_building").unwrap();
        let one = simulate_coverage(&scene.layout, &scene.radio, &scene.models, SimOptions { n_terminals: 300, seed, threads: Some(1) }).unwrap();
        let many = simulate_coverage(&scene.layout, &scene.radio, &scene.models, SimOptions { n_terminals: 300, seed, threads: Some(threads) }).unwrap();
        prop_assert_eq!(one.links, many.links);
    }
}
