//! Power angular spectra, rotational power averaging, azimuth gain and the
//! beam-selection model of effective gain degradation.

use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::to_db;

/// Azimuth grid size: one bin per degree.
pub const N_BINS: usize = 360;

/// Power-versus-azimuth samples on the 1 degree grid, linear units.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSpectrum {
    bins: Vec<f64>,
}

impl AngularSpectrum {
    pub fn new(bins: Vec<f64>) -> Result<Self> {
        if bins.len() != N_BINS {
            return Err(Error::Dimension(format!("spectrum needs {N_BINS} bins, got {}", bins.len())));
        }
        if bins.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::Domain("spectrum bins must be finite and >= 0".into()));
        }
        if bins.iter().all(|b| *b == 0.0) {
            return Err(Error::Domain("spectrum is identically zero".into()));
        }
        Ok(Self { bins })
    }

    pub fn uniform() -> Self {
        Self { bins: vec![1.0; N_BINS] }
    }

    /// Unit power in bin `at`, zero elsewhere.
    pub fn delta(at: usize) -> Self {
        let mut bins = vec![0.0; N_BINS];
        bins[at % N_BINS] = 1.0;
        Self { bins }
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    /// Average power over all angles (the omnidirectional level).
    pub fn mean_power(&self) -> f64 {
        self.bins.iter().sum::<f64>() / N_BINS as f64
    }

    pub fn max_power(&self) -> f64 {
        self.bins.iter().copied().fold(0.0, f64::max)
    }

    /// Rotated copy: bin `i` moves to `i + k`.
    pub fn shifted(&self, k: usize) -> Self {
        let mut bins = self.bins.clone();
        bins.rotate_right(k % N_BINS);
        Self { bins }
    }

    /// Power at an arbitrary azimuth, linear in power between bins.
    pub fn power_at(&self, azimuth_deg: f64) -> f64 {
        let a = azimuth_deg.rem_euclid(360.0);
        let i = a.floor() as usize % N_BINS;
        let frac = a - a.floor();
        self.bins[i] * (1.0 - frac) + self.bins[(i + 1) % N_BINS] * frac
    }

    /// Reads `angle_deg,power_linear` rows; a header line is optional.
    /// The angles must be 0..359 in one-degree steps, in any order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut bins = vec![f64::NAN; N_BINS];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("angle") {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("spectrum csv line {}: expected `angle_deg,power_linear`", lineno + 1)))
            };
            let angle = parse(cols.next())?;
            let power = parse(cols.next())?;
            let idx = angle.round();
            if (angle - idx).abs() > 1e-6 || !(0.0..360.0).contains(&idx) {
                return Err(Error::Dimension(format!("spectrum csv line {}: angle {angle} is off the 1 degree grid", lineno + 1)));
            }
            bins[idx as usize] = power;
        }
        if bins.iter().any(|b| b.is_nan()) {
            return Err(Error::Dimension(format!("spectrum csv must cover all {N_BINS} one-degree bins")));
        }
        Self::new(bins)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle_deg,power_linear\n");
        for (i, p) in self.bins.iter().enumerate() {
            out.push_str(&format!("{i},{p}\n"));
        }
        out
    }
}

/// Ratio of peak to all-angle average power, in dB.
pub fn azimuth_gain(s: &AngularSpectrum) -> f64 {
    to_db(s.max_power() / s.mean_power())
}

/// Complex field response of a receive antenna on the 1 degree grid,
/// normalized to unit mean power gain (`mean |a|^2 = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaPattern {
    field: Vec<Complex64>,
}

impl AntennaPattern {
    /// Normalizes an arbitrary field pattern.
    pub fn from_field(mut field: Vec<Complex64>) -> Result<Self> {
        if field.len() != N_BINS {
            return Err(Error::Dimension(format!("pattern needs {N_BINS} samples, got {}", field.len())));
        }
        let mean = field.iter().map(|a| a.norm_sqr()).sum::<f64>() / N_BINS as f64;
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::Domain("pattern has no power".into()));
        }
        let k = mean.sqrt().recip();
        field.iter_mut().for_each(|a| *a *= k);
        Ok(Self { field })
    }

    pub fn isotropic() -> Self {
        Self {
            field: vec![Complex64::new(1.0, 0.0); N_BINS],
        }
    }

    /// Gaussian main lobe with the given half-power beamwidth, boresight at 0 degrees.
    pub fn gaussian(hpbw_deg: f64) -> Result<Self> {
        if !(hpbw_deg > 0.0 && hpbw_deg.is_finite()) {
            return Err(Error::Domain(format!("beamwidth must be > 0, got {hpbw_deg}")));
        }
        let field = (0..N_BINS)
            .map(|i| {
                let mut phi = i as f64;
                if phi > 180.0 {
                    phi -= 360.0;
                }
                let power = (-4.0 * std::f64::consts::LN_2 * (phi / hpbw_deg).powi(2)).exp();
                Complex64::new(power.sqrt(), 0.0)
            })
            .collect();
        Self::from_field(field)
    }

    pub fn field(&self) -> &[Complex64] {
        &self.field
    }

    /// `mean |a|^2`; 1 up to rounding.
    pub fn mean_power_gain(&self) -> f64 {
        self.field.iter().map(|a| a.norm_sqr()).sum::<f64>() / N_BINS as f64
    }
}

/// Received field at every rotation angle: the circular convolution
/// `r[n] = sum_k h[k] a[(n - k) mod 360]`.
pub fn rotational_response(h: &[Complex64], a: &AntennaPattern) -> Result<Vec<Complex64>> {
    if h.len() != N_BINS {
        return Err(Error::Dimension(format!("directional response needs {N_BINS} samples, got {}", h.len())));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(N_BINS);
    let inv = planner.plan_fft_inverse(N_BINS);
    let mut hf = h.to_vec();
    let mut af = a.field.clone();
    fwd.process(&mut hf);
    fwd.process(&mut af);
    let mut r: Vec<Complex64> = hf.iter().zip(&af).map(|(x, y)| x * y).collect();
    inv.process(&mut r);
    let scale = 1.0 / N_BINS as f64;
    r.iter_mut().for_each(|v| *v *= scale);
    Ok(r)
}

/// Average of `|r|^2` over all rotation angles.
pub fn rotational_average_power(h: &[Complex64], a: &AntennaPattern) -> Result<f64> {
    let r = rotational_response(h, a)?;
    Ok(r.iter().map(|v| v.norm_sqr()).sum::<f64>() / N_BINS as f64)
}

/// One realization of an uncorrelated-scattering directional response with
/// power profile `profile`: independent `CN(0, P[k] / 360)` bins, so that the
/// expected omnidirectional power `sum E|h|^2` equals `profile.mean_power()`.
pub fn uncorrelated_response<R: Rng + ?Sized>(profile: &AngularSpectrum, rng: &mut R) -> Vec<Complex64> {
    profile
        .bins
        .iter()
        .map(|p| {
            let s = (p / N_BINS as f64 / 2.0).sqrt();
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(s * re, s * im)
        })
        .collect()
}

/// Best-of-N beam selection within an angular sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSelectionModel {
    pub n_beams: usize,
    pub sector_deg: f64,
    /// Beamwidth of the selecting antenna; sets the ideal (scatter-free)
    /// azimuth gain `10 log10(360 / beamwidth)`.
    pub beamwidth_deg: f64,
}

impl Default for BeamSelectionModel {
    fn default() -> Self {
        Self {
            n_beams: 6,
            sector_deg: 60.0,
            beamwidth_deg: 10.0,
        }
    }
}

impl BeamSelectionModel {
    fn check(&self) -> Result<()> {
        if self.n_beams == 0 {
            return Err(Error::Domain("n_beams must be >= 1".into()));
        }
        if !(self.sector_deg > 0.0 && self.sector_deg <= 360.0) {
            return Err(Error::Domain(format!("sector must be in (0, 360], got {}", self.sector_deg)));
        }
        if !(self.beamwidth_deg > 0.0 && self.beamwidth_deg <= 360.0) {
            return Err(Error::Domain(format!("beamwidth must be in (0, 360], got {}", self.beamwidth_deg)));
        }
        Ok(())
    }

    pub fn ideal_gain_db(&self) -> f64 {
        to_db(360.0 / self.beamwidth_deg)
    }

    fn sector_gain_db(&self) -> f64 {
        to_db(360.0 / self.sector_deg)
    }

    /// One draw of the effective azimuth gain in dB.
    pub fn sample_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.check()?;
        let best = (0..self.n_beams).map(|_| Exp1.sample(rng)).fold(0.0f64, f64::max);
        Ok(self.sector_gain_db() + to_db(best))
    }

    /// Analytic quantile of the effective gain: the max of `n` unit
    /// exponentials has CDF `(1 - e^-x)^n`.
    pub fn gain_quantile(&self, q: f64) -> f64 {
        let x = -(1.0 - q.powf(1.0 / self.n_beams as f64)).ln();
        self.sector_gain_db() + to_db(x)
    }

    /// Quantile `p` of the degradation `ideal - gain`.
    pub fn degradation_quantile(&self, p: f64) -> f64 {
        self.ideal_gain_db() - self.gain_quantile(1.0 - p)
    }

    /// Synthetic spectrum: `n_beams` exponential arrivals in adjacent
    /// beam-wide slots of a sector whose center is uniform in azimuth.
    pub fn sample_spectrum<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<AngularSpectrum> {
        self.check()?;
        let mut bins = vec![0.0; N_BINS];
        let center: f64 = rng.random_range(0.0..360.0);
        let start = center - self.sector_deg / 2.0;
        let per_beam = self.sector_deg / self.n_beams as f64;
        for b in 0..self.n_beams {
            let p: f64 = Exp1.sample(rng);
            let lo = start + b as f64 * per_beam;
            let width = per_beam.round().max(1.0) as usize;
            for k in 0..width {
                let idx = (lo.round() as i64 + k as i64).rem_euclid(N_BINS as i64) as usize;
                bins[idx] += p;
            }
        }
        if bins.iter().all(|b| *b == 0.0) {
            bins[center as usize % N_BINS] = f64::MIN_POSITIVE;
        }
        AngularSpectrum::new(bins)
    }
}

/// Beam-selection gain sample: `10 log10(360 / sector)` plus the best of
/// `n_beams` i.i.d. unit-mean exponential beam powers, in dB.
pub fn beam_selection_gain_sample<R: Rng + ?Sized>(n_beams: usize, sector_deg: f64, rng: &mut R) -> Result<f64> {
    BeamSelectionModel {
        n_beams,
        sector_deg,
        ..Default::default()
    }
    .sample_gain(rng)
}

/// Link environment for effective gain degradation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Environment {
    Los,
    HallwayNlos,
    RoomNlos,
}

impl Environment {
    pub const ALL: [Environment; 3] = [Environment::Los, Environment::HallwayNlos, Environment::RoomNlos];

    /// 90th-percentile degradation anchors in dB.
    pub fn anchor_p90_db(&self) -> f64 {
        match self {
            Environment::Los => 2.5,
            Environment::HallwayNlos => 4.5,
            Environment::RoomNlos => 7.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Environment::Los => "los",
            Environment::HallwayNlos => "hallway-nlos",
            Environment::RoomNlos => "room-nlos",
        }
    }
}

impl FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "los" => Ok(Environment::Los),
            "hallway-nlos" => Ok(Environment::HallwayNlos),
            "room-nlos" => Ok(Environment::RoomNlos),
            other => Err(Error::Config(format!(
                "unknown environment `{other}` (expected los, hallway-nlos or room-nlos)"
            ))),
        }
    }
}

/// Inverse-CDF table of gain degradation: `(quantile, dB)` points with
/// quantiles running from 0 to 1. Sampling interpolates linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct DegradationTable {
    points: Vec<(f64, f64)>,
}

impl TryFrom<Vec<[f64; 2]>> for DegradationTable {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(v.into_iter().map(|[q, d]| (q, d)).collect())
    }
}

impl From<DegradationTable> for Vec<[f64; 2]> {
    fn from(t: DegradationTable) -> Self {
        t.points.into_iter().map(|(q, d)| [q, d]).collect()
    }
}

impl DegradationTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Invariant("degradation table needs at least two points".into()));
        }
        if points.iter().any(|(q, d)| !q.is_finite() || !d.is_finite() || *d < 0.0) {
            return Err(Error::Invariant("degradation table values must be finite and dB >= 0".into()));
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(Error::Invariant("degradation table quantiles must span 0 to 1".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 < w[0].1 {
                return Err(Error::Invariant(
                    "degradation table must have increasing quantiles and non-decreasing dB".into(),
                ));
            }
        }
        Ok(Self { points })
    }

    /// Default table for `env`: the beam-selection degradation quantiles,
    /// floored at 0 dB and scaled so the 90% point equals the anchor.
    pub fn model_default(env: Environment) -> Self {
        let model = BeamSelectionModel::default();
        let raw = |p: f64| model.degradation_quantile(p.clamp(0.001, 0.999)).max(0.0);
        let scale = env.anchor_p90_db() / raw(0.9);
        let points = (0..=100)
            .map(|i| {
                let p = i as f64 / 100.0;
                let d = if i == 90 { env.anchor_p90_db() } else { scale * raw(p) };
                (p, d)
            })
            .collect();
        Self::new(points).expect("model table is monotone")
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Degradation at cumulative probability `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let i = self.points.partition_point(|(q, _)| *q < p);
        if i == 0 {
            return self.points[0].1;
        }
        let (q0, d0) = self.points[i - 1];
        let (q1, d1) = self.points[i.min(self.points.len() - 1)];
        if q1 == q0 {
            return d1;
        }
        d0 + (d1 - d0) * (p - q0) / (q1 - q0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// Reads `quantile,dB` rows; a header line is optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("quantile") {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Config(format!("degradation csv line {}: expected `quantile,dB`", lineno + 1)))?;
            if vals.len() != 2 {
                return Err(Error::Config(format!("degradation csv line {}: expected 2 columns", lineno + 1)));
            }
            points.push((vals[0], vals[1]));
        }
        Self::new(points)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantile,db\n");
        for (q, d) in &self.points {
            out.push_str(&format!("{q},{d}\n"));
        }
        out
    }
}

/// One table per environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegradationTables {
    pub los: DegradationTable,
    pub hallway_nlos: DegradationTable,
    pub room_nlos: DegradationTable,
}

impl Default for DegradationTables {
    fn default() -> Self {
        Self {
            los: DegradationTable::model_default(Environment::Los),
            hallway_nlos: DegradationTable::model_default(Environment::HallwayNlos),
            room_nlos: DegradationTable::model_default(Environment::RoomNlos),
        }
    }
}

impl DegradationTables {
    pub fn get(&self, env: Environment) -> &DegradationTable {
        match env {
            Environment::Los => &self.los,
            Environment::HallwayNlos => &self.hallway_nlos,
            Environment::RoomNlos => &self.room_nlos,
        }
    }
}

/// Draws an effective gain degradation (dB, >= 0) for `env`.
pub fn gain_degradation_sample<R: Rng + ?Sized>(env: Environment, tables: &DegradationTables, rng: &mut R) -> f64 {
    tables.get(env).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::stream_rng;
    use approx::assert_abs_diff_eq;

    /// Direct O(N^2) circular convolution, independent of the FFT path.
    fn brute_force_average(h: &[Complex64], a: &AntennaPattern) -> f64 {
        let mut acc = 0.0;
        for n in 0..N_BINS {
            let mut r = Complex64::new(0.0, 0.0);
            for k in 0..N_BINS {
                r += h[k] * a.field()[(n + N_BINS - k) % N_BINS];
            }
            acc += r.norm_sqr();
        }
        acc / N_BINS as f64
    }

    #[test]
    fn azimuth_gain_cases() {
        assert_eq!(azimuth_gain(&AngularSpectrum::uniform()), 0.0);
        assert_abs_diff_eq!(azimuth_gain(&AngularSpectrum::delta(17)), 25.563, epsilon = 1e-3);
        let mut bins = vec![0.0; N_BINS];
        bins[3] = 2.0;
        bins[200] = 2.0;
        let s = AngularSpectrum::new(bins).unwrap();
        assert_abs_diff_eq!(azimuth_gain(&s), 10.0 * 180f64.log10(), epsilon = 1e-12);
    }

    #[test]
    fn zero_spectrum_rejected() {
        assert!(AngularSpectrum::new(vec![0.0; N_BINS]).is_err());
        assert!(AngularSpectrum::new(vec![1.0; 10]).is_err());
    }

    #[test]
    fn fft_matches_direct_convolution() {
        let mut rng = stream_rng(3, 0);
        let profile = AngularSpectrum::uniform();
        let h = uncorrelated_response(&profile, &mut rng);
        let a = AntennaPattern::gaussian(10.0).unwrap();
        let fast = rotational_average_power(&h, &a).unwrap();
        let slow = brute_force_average(&h, &a);
        assert_abs_diff_eq!(fast, slow, epsilon = 1e-12 * slow.max(1.0));
    }

    #[test]
    fn impulse_response_gives_unit_power() {
        let mut h = vec![Complex64::new(0.0, 0.0); N_BINS];
        h[42] = Complex64::new(1.0, 0.0);
        for a in [AntennaPattern::gaussian(10.0).unwrap(), AntennaPattern::isotropic()] {
            assert_abs_diff_eq!(rotational_average_power(&h, &a).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn isotropic_pattern_sees_coherent_sum() {
        let mut rng = stream_rng(4, 0);
        let h = uncorrelated_response(&AngularSpectrum::uniform(), &mut rng);
        let coherent: Complex64 = h.iter().sum();
        let p = rotational_average_power(&h, &AntennaPattern::isotropic()).unwrap();
        assert_abs_diff_eq!(p, coherent.norm_sqr(), epsilon = 1e-12);
    }

    #[test]
    fn pattern_normalized() {
        let a = AntennaPattern::gaussian(10.0).unwrap();
        assert!((a.mean_power_gain() - 1.0).abs() < 1e-6);
        assert!(rotational_average_power(&[Complex64::new(1.0, 0.0); 10], &a).is_err());
    }

    #[test]
    fn selection_with_one_beam_full_circle() {
        let mut a = stream_rng(9, 0);
        let mut b = stream_rng(9, 0);
        let g = beam_selection_gain_sample(1, 360.0, &mut a).unwrap();
        let x: f64 = Exp1.sample(&mut b);
        assert_abs_diff_eq!(g, to_db(x), epsilon = 1e-12);
        assert!(beam_selection_gain_sample(0, 60.0, &mut a).is_err());
        assert!(beam_selection_gain_sample(6, 0.0, &mut a).is_err());
    }

    #[test]
    fn model_tables_hit_anchors() {
        for env in Environment::ALL {
            let t = DegradationTable::model_default(env);
            assert_eq!(t.quantile(0.9), env.anchor_p90_db());
            assert!(t.points().iter().all(|(_, d)| *d >= 0.0));
        }
    }

    #[test]
    fn unknown_environment_is_config_error() {
        assert!(matches!("attic".parse::<Environment>(), Err(Error::Config(_))));
        assert_eq!("room-nlos".parse::<Environment>().unwrap(), Environment::RoomNlos);
    }

    #[test]
    fn table_csv_round_trip() {
        let t = DegradationTable::model_default(Environment::Los);
        assert_eq!(DegradationTable::from_csv(&t.to_csv()).unwrap(), t);
        assert!(DegradationTable::from_csv("0,1\n1,0.5\n").is_err());
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let s = BeamSelectionModel::default().sample_spectrum(&mut stream_rng(5, 0)).unwrap();
        assert_eq!(AngularSpectrum::from_csv(&s.to_csv()).unwrap(), s);
        assert!(AngularSpectrum::from_csv("0,1\n").is_err());
    }

    #[test]
    fn interpolation_between_bins() {
        let mut bins = vec![0.0; N_BINS];
        bins[10] = 2.0;
        let s = AngularSpectrum::new(bins).unwrap();
        assert_abs_diff_eq!(s.power_at(9.5), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.power_at(370.0), 2.0, epsilon = 1e-12);
    }
}
