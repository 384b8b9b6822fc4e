//! Temporal fading: Ricean trace synthesis, fade statistics, coherence
//! time, moment-based K-factor estimation and the comparison of ideal
//! per-instant angular selection against average-power aiming.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{from_db, mean_var, median, to_db, EmpiricalCdf};

/// Sampling rate of the fixed-direction power recordings.
pub const DEFAULT_RATE_HZ: f64 = 740.0;
/// Length of the subintervals used for coherence-time estimation.
pub const COHERENCE_SEGMENT_S: f64 = 10.0;

/// Power time series sampled at `rate_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct FadeTrace {
    samples: Vec<f64>,
    rate_hz: f64,
}

impl FadeTrace {
    pub fn new(samples: Vec<f64>, rate_hz: f64) -> Result<Self> {
        if !(rate_hz.is_finite() && rate_hz > 0.0) {
            return Err(Error::Domain(format!("rate_hz must be > 0, got {rate_hz}")));
        }
        if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Domain("trace samples must be finite and >= 0".into()));
        }
        Ok(Self { samples, rate_hz })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.rate_hz
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Copy scaled to unit temporal mean.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.checked_mean()?;
        Ok(Self {
            samples: self.samples.iter().map(|s| s / m).collect(),
            rate_hz: self.rate_hz,
        })
    }

    /// Copy multiplied by a constant power factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            rate_hz: self.rate_hz,
        }
    }

    fn checked_mean(&self) -> Result<f64> {
        if self.samples.is_empty() {
            return Err(Error::Domain("empty trace".into()));
        }
        let m = self.mean();
        if m <= 0.0 {
            return Err(Error::Domain("trace mean power must be > 0".into()));
        }
        Ok(m)
    }

    /// Parses a single-column CSV whose header line carries the rate,
    /// e.g. `rate_hz=740`, followed by one power value per line.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Config("trace csv is empty".into()))?;
        let rate = header
            .split([',', ' ', ';'])
            .find_map(|tok| tok.strip_prefix("rate_hz="))
            .ok_or_else(|| Error::Config("trace csv header must carry `rate_hz=<value>`".into()))?
            .parse::<f64>()
            .map_err(|_| Error::Config("trace csv: rate_hz is not a number".into()))?;
        let samples = lines
            .enumerate()
            .map(|(i, l)| {
                l.parse::<f64>()
                    .map_err(|_| Error::Config(format!("trace csv data line {}: `{l}` is not a number", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, rate)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("rate_hz={}\n", self.rate_hz);
        for s in &self.samples {
            out.push_str(&format!("{s}\n"));
        }
        out
    }
}

/// Ricean fading parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiceanParams {
    /// Dominant-to-scattered power ratio. `-inf` gives Rayleigh fading.
    pub k_db: f64,
    /// Lag at which the envelope autocovariance falls to 0.5. Zero or less
    /// than one sample period gives independent samples.
    pub correlation_time_ms: f64,
    pub rate_hz: f64,
}

impl RiceanParams {
    pub fn new(k_db: f64, correlation_time_ms: f64) -> Self {
        Self {
            k_db,
            correlation_time_ms,
            rate_hz: DEFAULT_RATE_HZ,
        }
    }

    /// Independent samples.
    pub fn white(k_db: f64) -> Self {
        Self::new(k_db, 0.0)
    }

    fn check(&self) -> Result<()> {
        if self.k_db.is_nan() || self.k_db == f64::INFINITY {
            return Err(Error::Domain(format!("k_db must be finite or -inf, got {}", self.k_db)));
        }
        if !(self.correlation_time_ms.is_finite() && self.correlation_time_ms >= 0.0) {
            return Err(Error::Domain("correlation_time_ms must be >= 0".into()));
        }
        if !(self.rate_hz.is_finite() && self.rate_hz > 0.0) {
            return Err(Error::Domain("rate_hz must be > 0".into()));
        }
        Ok(())
    }

    /// Linear K.
    pub fn k_linear(&self) -> f64 {
        from_db(self.k_db)
    }

    /// Per-sample coefficient of the first-order low-pass applied to the
    /// scattered component.
    pub fn ar_coefficient(&self) -> f64 {
        let lag_samples = self.correlation_time_ms * 1e-3 * self.rate_hz;
        if lag_samples <= 1.0 {
            return 0.0;
        }
        let rho_half = scatter_correlation_for_half_envelope(self.k_linear());
        rho_half.powf(1.0 / lag_samples)
    }
}

/// Unit-mean Ricean power trace. The scattered component is a complex
/// Gaussian AR(1) process whose coefficient is calibrated so the envelope
/// autocovariance drops to 0.5 at the configured correlation time.
pub fn ricean_trace<R: Rng + ?Sized>(params: &RiceanParams, n: usize, rng: &mut R) -> Result<FadeTrace> {
    params.check()?;
    if n == 0 {
        return Err(Error::Domain("trace length must be >= 1".into()));
    }
    let k = params.k_linear();
    let los = (k / (k + 1.0)).sqrt();
    let scatter = (1.0 / (k + 1.0)).sqrt();
    let a = params.ar_coefficient();
    let innovation = (1.0 - a * a).sqrt();
    let mut cn = || -> (f64, f64) {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        (re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
    };
    let (mut xr, mut xi) = cn();
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            let (wr, wi) = cn();
            xr = a * xr + innovation * wr;
            xi = a * xi + innovation * wi;
        }
        let re = los + scatter * xr;
        let im = scatter * xi;
        samples.push(re * re + im * im);
    }
    FadeTrace::new(samples, params.rate_hz)
}

/// Empirical CDF of the fade depth `10 log10(sample / mean)`.
pub fn fade_depth_cdf(trace: &FadeTrace) -> Result<EmpiricalCdf> {
    let m = trace.checked_mean()?;
    EmpiricalCdf::new(trace.samples.iter().map(|s| to_db(s / m)).collect())
}

/// Durations (ms) of contiguous runs strictly below `mean + threshold_db`.
pub fn fade_durations(trace: &FadeTrace, threshold_db: f64) -> Result<Vec<f64>> {
    if !(threshold_db < 0.0) {
        return Err(Error::Domain(format!("fade threshold must be < 0 dB, got {threshold_db}")));
    }
    let level = trace.checked_mean()? * from_db(threshold_db);
    let period_ms = 1e3 / trace.rate_hz;
    let mut out = Vec::new();
    let mut run = 0usize;
    for &s in &trace.samples {
        if s < level {
            run += 1;
        } else if run > 0 {
            out.push(run as f64 * period_ms);
            run = 0;
        }
    }
    if run > 0 {
        out.push(run as f64 * period_ms);
    }
    Ok(out)
}

/// Median, over 10 s subintervals, of the first lag at which the normalized
/// envelope autocovariance drops below 0.5. Returned in ms.
pub fn coherence_time(trace: &FadeTrace) -> Result<f64> {
    let seg_len = (COHERENCE_SEGMENT_S * trace.rate_hz).round() as usize;
    if seg_len < 2 || trace.len() < seg_len {
        return Err(Error::Domain(format!(
            "coherence time needs at least {COHERENCE_SEGMENT_S} s of samples, trace has {:.3} s",
            trace.duration_s()
        )));
    }
    let mut lags = Vec::new();
    for seg in trace.samples.chunks_exact(seg_len) {
        let env: Vec<f64> = seg.iter().map(|p| p.sqrt()).collect();
        let (m, v) = mean_var(&env);
        if v <= 0.0 {
            continue;
        }
        let dev: Vec<f64> = env.iter().map(|e| e - m).collect();
        let c0 = v * seg_len as f64;
        let lag = (1..seg_len).find(|&k| {
            let ck: f64 = dev[..seg_len - k].iter().zip(&dev[k..]).map(|(a, b)| a * b).sum();
            ck / c0 < 0.5
        });
        if let Some(k) = lag {
            lags.push(k as f64);
        }
    }
    if lags.is_empty() {
        return Err(Error::Domain("envelope has zero variance or never decorrelates".into()));
    }
    Ok(median(&lags) * 1e3 / trace.rate_hz)
}

/// Two-moment K estimate in dB. With `m` the mean power and `v` its
/// variance, `gamma = sqrt(max(m^2 - v, 0))` and `K = gamma / (m - gamma)`.
/// Zero variance reports `+inf`; `m^2 <= v` reports `-inf`.
pub fn k_factor_two_moment(trace: &FadeTrace) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::Domain("empty trace".into()));
    }
    let (m, v) = mean_var(&trace.samples);
    if v == 0.0 {
        return Ok(f64::INFINITY);
    }
    if m * m <= v {
        return Ok(f64::NEG_INFINITY);
    }
    let gamma = (m * m - v).sqrt();
    Ok(to_db(gamma / (m - gamma)))
}

/// Loss of average-power aiming relative to an ideal per-instant selection
/// combiner, as a CDF in dB.
///
/// Traces are read once per scan (every `scan_period_ms`). The fixed aim is
/// the direction with the best mean power over the previous
/// `avg_window_scans` scans, re-chosen once per window.
pub fn diversity_comparison(traces: &[FadeTrace], scan_period_ms: f64, avg_window_scans: usize) -> Result<EmpiricalCdf> {
    if traces.len() < 2 {
        return Err(Error::Dimension("diversity comparison needs at least two directions".into()));
    }
    let len = traces[0].len();
    let rate = traces[0].rate_hz;
    if traces.iter().any(|t| t.len() != len || t.rate_hz != rate) {
        return Err(Error::Dimension("direction traces must share length and rate".into()));
    }
    if !(scan_period_ms.is_finite() && scan_period_ms > 0.0) {
        return Err(Error::Domain("scan period must be > 0".into()));
    }
    if avg_window_scans == 0 {
        return Err(Error::Domain("averaging window must be >= 1 scan".into()));
    }
    let step = ((scan_period_ms * 1e-3 * rate).round() as usize).max(1);
    let scans: Vec<Vec<f64>> = traces.iter().map(|t| t.samples.iter().step_by(step).copied().collect()).collect();
    let n_scans = scans[0].len();
    let w = avg_window_scans;
    if n_scans <= w {
        return Err(Error::Domain(format!("need more than {w} scans, have {n_scans}")));
    }
    let mut losses = Vec::with_capacity(n_scans - w);
    let mut aim = 0usize;
    for t in w..n_scans {
        if (t - w).is_multiple_of(w) {
            aim = (0..scans.len())
                .max_by(|&a, &b| {
                    let sa: f64 = scans[a][t - w..t].iter().sum();
                    let sb: f64 = scans[b][t - w..t].iter().sum();
                    sa.total_cmp(&sb)
                })
                .unwrap();
        }
        let best = scans.iter().map(|s| s[t]).fold(0.0, f64::max);
        let chosen = scans[aim][t];
        losses.push(if best == chosen { 0.0 } else { to_db(best / chosen) });
    }
    EmpiricalCdf::new(losses)
}

/// Scattered-component correlation at which the normalized envelope
/// autocovariance of a unit-power Ricean process equals 0.5.
fn scatter_correlation_for_half_envelope(k: f64) -> f64 {
    if k > 1e3 {
        // envelope ~ LOS + in-phase scatter, autocovariance ~ rho
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if envelope_autocovariance(k, mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Normalized autocovariance of the envelope `|A + s z|` of a unit-power
/// Ricean process whose scattered parts at two instants have correlation `rho`.
///
/// `E[R1 R2]` is integrated over the first sample (polar grid around the LOS
/// point) with the conditional Rice mean of the second sample in closed form.
pub(crate) fn envelope_autocovariance(k: f64, rho: f64) -> f64 {
    let a = (k / (k + 1.0)).sqrt();
    let s2 = 1.0 / (k + 1.0);
    let s = s2.sqrt();
    const NR: usize = 600;
    const NT: usize = 64;
    const R_MAX: f64 = 6.0;
    let dr = R_MAX / NR as f64;
    let cond_var = s2 * (1.0 - rho * rho) / 2.0;
    // moments accumulated on one grid so rho = 0 and rho = 1 are exact
    let (mut w_sum, mut e1, mut e2, mut e11, mut e12) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 1..NR {
        let r = i as f64 * dr;
        let w = 2.0 * r * (-r * r).exp();
        for j in 0..NT {
            let th = 2.0 * std::f64::consts::PI * j as f64 / NT as f64;
            let (zr, zi) = (r * th.cos(), r * th.sin());
            let r1 = (a + s * zr).hypot(s * zi);
            let nu = (a + rho * s * zr).hypot(rho * s * zi);
            let r2 = rice_mean(nu, cond_var);
            w_sum += w;
            e1 += w * r1;
            e2 += w * r2;
            e11 += w * r1 * r1;
            e12 += w * r1 * r2;
        }
    }
    let (e1, e2, e11, e12) = (e1 / w_sum, e2 / w_sum, e11 / w_sum, e12 / w_sum);
    (e12 - e1 * e2) / (e11 - e1 * e1)
}

/// Mean of a Rice(`nu`, `sigma^2 = var_per_dim`) variable.
fn rice_mean(nu: f64, var_per_dim: f64) -> f64 {
    if var_per_dim <= 1e-300 {
        return nu;
    }
    let sigma = var_per_dim.sqrt();
    let u = nu * nu / (4.0 * var_per_dim);
    let laguerre_half = (1.0 + 2.0 * u) * bessel_i0e(u) + 2.0 * u * bessel_i1e(u);
    sigma * (std::f64::consts::PI / 2.0).sqrt() * laguerre_half
}

/// Exponentially scaled modified Bessel function `I0(x) e^-|x|`.
fn bessel_i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 3.75 {
        let y = (x / 3.75).powi(2);
        let i0 = 1.0
            + y * (3.5156229 + y * (3.0899424 + y * (1.2067492 + y * (0.2659732 + y * (0.360768e-1 + y * 0.45813e-2)))));
        i0 * (-ax).exp()
    } else {
        let y = 3.75 / ax;
        (0.39894228
            + y * (0.1328592e-1
                + y * (0.225319e-2
                    + y * (-0.157565e-2
                        + y * (0.916281e-2
                            + y * (-0.2057706e-1 + y * (0.2635537e-1 + y * (-0.1647633e-1 + y * 0.392377e-2))))))))
            / ax.sqrt()
    }
}

/// Exponentially scaled modified Bessel function `I1(x) e^-|x|`.
fn bessel_i1e(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 3.75 {
        let y = (x / 3.75).powi(2);
        ax * (0.5 + y * (0.87890594 + y * (0.51498869 + y * (0.15084934 + y * (0.2658733e-1 + y * (0.301532e-2 + y * 0.32411e-3))))))
            * (-ax).exp()
    } else {
        let y = 3.75 / ax;
        let tail = 0.2282967e-1 + y * (-0.2895312e-1 + y * (0.1787654e-1 - y * 0.420059e-2));
        (0.39894228 + y * (-0.3988024e-1 + y * (-0.362018e-2 + y * (0.163801e-2 + y * (-0.1031555e-1 + y * tail)))))
            / ax.sqrt()
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}
