//! Reference values computed by independent formulas in this file, plus the
//! worked examples for each module.

use approx::assert_abs_diff_eq;
use indoor_mmwave::angular::{AngularSpectrum, AntennaPattern, BeamSelectionModel};
use indoor_mmwave::fading::{coherence_time, fade_depth_cdf, k_factor_two_moment, ricean_trace, RiceanParams};
use indoor_mmwave::fitting::{
    fit_corner_model, fit_slope_intercept, lognormality_gap, synthesize_corner_survey, FitParameters, Measurement,
};
use indoor_mmwave::layout::{classify_link, LinkClass, Point};
use indoor_mmwave::propagation::CornerModel;
use indoor_mmwave::scene::load_scene;
use indoor_mmwave::stats::{median, stream_rng};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// 10% quantile (dB re mean) of unit-mean Ricean power, by trapezoidal
/// integration of the noncentral chi-square density.
fn ricean_power_quantile_db(k_db: f64, p: f64) -> f64 {
    let k = 10f64.powf(k_db / 10.0);
    let i0 = |z: f64| {
        let (mut sum, mut term, mut j) = (0.0, 1.0, 0.0);
        while term > 1e-17 * sum || sum == 0.0 {
            sum += term;
            j += 1.0;
            term *= (z / 2.0).powi(2) / (j * j);
        }
        sum
    };
    let pdf = |x: f64| (k + 1.0) * (-k - (k + 1.0) * x).exp() * i0(2.0 * (k * (k + 1.0) * x).sqrt());
    let h = 1e-5;
    let (mut x, mut c, mut prev) = (0.0, 0.0, pdf(0.0));
    loop {
        let next = pdf(x + h);
        let inc = 0.5 * (prev + next) * h;
        if c + inc >= p {
            return 10.0 * (x + (p - c) / (0.5 * (prev + next))).log10();
        }
        c += inc;
        x += h;
        prev = next;
    }
}

const RICE_P10_K0: f64 = -8.6426;
const RICE_P10_K6_5: f64 = -4.7154;
const RICE_P10_K10: f64 = -2.9978;

#[test]
fn ricean_quantile_oracle_is_frozen() {
    assert_abs_diff_eq!(ricean_power_quantile_db(0.0, 0.1), RICE_P10_K0, epsilon = 1e-3);
    assert_abs_diff_eq!(ricean_power_quantile_db(6.5, 0.1), RICE_P10_K6_5, epsilon = 1e-3);
    assert_abs_diff_eq!(ricean_power_quantile_db(10.0, 0.1), RICE_P10_K10, epsilon = 1e-3);
}

#[test]
fn generator_matches_ricean_quantiles() {
    for (i, (k, want)) in [(0.0, RICE_P10_K0), (6.5, RICE_P10_K6_5), (10.0, RICE_P10_K10)].into_iter().enumerate() {
        let mut rng = stream_rng(100, i as u64);
        let t = ricean_trace(&RiceanParams::white(k), 1_000_000, &mut rng).unwrap();
        let got = fade_depth_cdf(&t).unwrap().quantile(0.1);
        assert_abs_diff_eq!(got, want, epsilon = 0.05);
    }
}

#[test]
fn strong_los_barely_fades() {
    let mut rng = stream_rng(101, 0);
    let t = ricean_trace(&RiceanParams::new(60.0, 20.0), 100_000, &mut rng).unwrap();
    let cdf = fade_depth_cdf(&t).unwrap();
    assert!(cdf.quantile(0.1).abs() <= 0.1);
    assert!(cdf.quantile(0.9).abs() <= 0.1);
}

#[test]
fn coherence_round_trip() {
    for (i, target) in [20.0, 50.0, 100.0].into_iter().enumerate() {
        let mut rng = stream_rng(102, i as u64);
        let t = ricean_trace(&RiceanParams::new(6.5, target), 740 * 300, &mut rng).unwrap();
        let got = coherence_time(&t).unwrap();
        assert!((got - target).abs() <= 0.1 * target, "target {target} got {got}");
    }
}

#[test]
fn rayleigh_coherence_round_trip() {
    let mut rng = stream_rng(103, 0);
    let t = ricean_trace(&RiceanParams::new(f64::NEG_INFINITY, 50.0), 740 * 300, &mut rng).unwrap();
    let got = coherence_time(&t).unwrap();
    assert!((got - 50.0).abs() <= 5.0, "{got}");
}

#[test]
fn rayleigh_k_estimate() {
    let mut rng = stream_rng(104, 0);
    let t = ricean_trace(&RiceanParams::white(f64::NEG_INFINITY), 1_000_000, &mut rng).unwrap();
    assert!(k_factor_two_moment(&t).unwrap() <= -20.0);
}

fn log_uniform_distances<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.random::<f64>() * 2.0)).collect()
}

#[test]
fn los_regression_oracle() {
    let mut rng = stream_rng(105, 0);
    let noise = Normal::new(0.0, 3.14).unwrap();
    let data: Vec<Measurement> = log_uniform_distances(226, &mut rng)
        .into_iter()
        .map(|d| Measurement::at_distance(d, -61.0 - 17.6 * d.log10() + noise.sample(&mut rng)))
        .collect();
    let r = fit_slope_intercept(&data).unwrap();
    let FitParameters::SlopeIntercept { slope_db, .. } = r.parameters else { panic!() };
    assert!((r.rms_error_db - 3.14).abs() <= 0.4, "{}", r.rms_error_db);
    assert!((slope_db + 17.6).abs() <= 0.8, "{slope_db}");
}

#[test]
fn room_regression_oracle() {
    let mut rng = stream_rng(106, 0);
    let noise = Normal::new(0.0, 3.2).unwrap();
    let data: Vec<Measurement> = log_uniform_distances(600, &mut rng)
        .into_iter()
        .map(|d| Measurement::at_distance(d, -87.6 - 21.0 * d.log10() + noise.sample(&mut rng)))
        .collect();
    let r = fit_slope_intercept(&data).unwrap();
    let FitParameters::SlopeIntercept { intercept_db, .. } = r.parameters else { panic!() };
    assert!((intercept_db + 87.6).abs() <= 1.0, "{intercept_db}");
}

fn corner_params(data: &[Measurement], pl1: f64) -> (f64, f64, f64) {
    let r = fit_corner_model(data, pl1).unwrap();
    let FitParameters::Corner { n, pls_db, .. } = r.parameters else { panic!() };
    (n, pls_db, r.rms_error_db)
}

#[test]
fn corner_fit_single_realization() {
    let truth = CornerModel::default();
    let mut rng = stream_rng(107, 0);
    let data: Vec<Measurement> = synthesize_corner_survey(&truth, &mut rng).unwrap().into_iter().map(|(_, m)| m).collect();
    let (n, pls, rms) = corner_params(&data, truth.pl1_db);
    assert!((n + 1.81).abs() <= 0.05);
    assert!((pls + 18.7).abs() <= 1.0);
    assert!((rms - 3.0).abs() <= 0.4);
}

#[test]
fn building_subsets_spread() {
    let truth = CornerModel::default();
    let (mut dn, mut dp) = (Vec::new(), Vec::new());
    for rep in 0..200 {
        let mut rng = stream_rng(108, rep);
        let survey = synthesize_corner_survey(&truth, &mut rng).unwrap();
        let subset = |b: &str| -> Vec<Measurement> {
            survey.iter().filter(|(x, _)| *x == b).map(|(_, m)| m.clone()).collect()
        };
        let a = corner_params(&subset("building-a"), truth.pl1_db);
        let b = corner_params(&subset("building-b"), truth.pl1_db);
        dn.push((a.0 - b.0).abs());
        dp.push((a.1 - b.1).abs());
    }
    assert!(median(&dn) <= 0.05, "median |dn| {}", median(&dn));
    assert!(median(&dp) <= 1.5, "median |dPL_S| {}", median(&dp));
}

#[test]
fn lognormality_gap_examples() {
    let mut rng = stream_rng(109, 0);
    let normal = Normal::new(0.0, 3.0).unwrap();
    let gaussian: Vec<f64> = (0..10_000).map(|_| normal.sample(&mut rng)).collect();
    assert!(lognormality_gap(&gaussian).unwrap() < 0.2);
    let uniform: Vec<f64> = (0..10_000).map(|_| rng.random_range(-6.0..6.0)).collect();
    assert!(lognormality_gap(&uniform).unwrap() > 0.5);
    assert_eq!(lognormality_gap(&[1.5; 40]).unwrap(), f64::INFINITY);
}

#[test]
fn uniform_sector_gain_quantiles() {
    // x_q = -ln(1 - q^(1/n)) for the max of n unit exponentials
    let m = BeamSelectionModel::default();
    let q90 = -(1.0 - 0.9f64.powf(1.0 / 6.0)).ln();
    assert_abs_diff_eq!(m.gain_quantile(0.9), 10.0 * 6f64.log10() + 10.0 * q90.log10(), epsilon = 1e-9);
    assert_abs_diff_eq!(m.ideal_gain_db(), 10.0 * 36f64.log10(), epsilon = 1e-12);
}

#[test]
fn impulse_pattern_returns_power() {
    use indoor_mmwave::angular::rotational_average_power;
    use num_complex::Complex64;
    let mut field = vec![Complex64::new(0.0, 0.0); 360];
    field[0] = Complex64::new(1.0, 0.0);
    let pattern = AntennaPattern::from_field(field).unwrap();
    let mut rng = stream_rng(110, 0);
    let h: Vec<Complex64> = (0..360).map(|_| Complex64::new(rng.random(), rng.random())).collect();
    let want: f64 = h.iter().map(|c| c.norm_sqr()).sum();
    let got = rotational_average_power(&h, &pattern).unwrap();
    assert_abs_diff_eq!(got / want, 1.0, epsilon = 1e-9);
    assert!(AngularSpectrum::uniform().mean_power() > 0.0);
}

#[test]
fn h_building_geometry() {
    let scene = load_scene("h_building").unwrap();
    let layout = &scene.layout;
    let ap = layout.access_points()[0].position;
    let r = layout.route(ap, Point::new(-40.0, 20.0)).unwrap();
    assert_eq!(r.segments, vec![20.0, 40.0]);
    assert_eq!(classify_link(&r), LinkClass::AroundCorner);
    let room = layout.route(ap, Point::new(20.0, 4.0)).unwrap();
    assert_eq!(classify_link(&room), LinkClass::CorridorRoom);
    assert_abs_diff_eq!(room.euclidean_d, 20.0f64.hypot(4.0), epsilon = 1e-9);
    let far = layout.route(layout.access_points()[1].position, Point::new(20.0, 4.0)).unwrap();
    assert_eq!(classify_link(&far), LinkClass::OutOfModel);
    assert_eq!(far.n_turns, 1);
}

#[test]
fn straight_only_corner_data() {
    use indoor_mmwave::fitting::fit_slope_fixed_intercept;
    let truth = CornerModel::default();
    let data: Vec<Measurement> = (1..=50)
        .map(|d| Measurement::at_distance(d as f64, truth.path_gain_segments(&[d as f64]).unwrap()))
        .collect();
    assert!(matches!(fit_corner_model(&data, truth.pl1_db), Err(indoor_mmwave::Error::Rank(_))));
    let r = fit_slope_fixed_intercept(&data, truth.pl1_db).unwrap();
    let FitParameters::SlopeIntercept { slope_db, .. } = r.parameters else { panic!() };
    assert_abs_diff_eq!(slope_db / 10.0, truth.n, epsilon = 1e-9);
}

#[test]
fn ricean_mean_converges() {
    for (i, k) in [f64::NEG_INFINITY, 0.0, 6.5, 10.0].into_iter().enumerate() {
        let mut rng = stream_rng(111, i as u64);
        let n = 400_000;
        let t = ricean_trace(&RiceanParams::white(k), n, &mut rng).unwrap();
        let kl = 10f64.powf(k / 10.0);
        // power variance of unit-mean Rice: (1 + 2K) / (1 + K)^2
        let sd = ((1.0 + 2.0 * kl) / (1.0 + kl).powi(2) / n as f64).sqrt();
        assert!((t.mean() - 1.0).abs() <= 3.0 * sd, "K {k}: {}", t.mean());
    }
}
