//! Least-squares extraction of path-gain model parameters in the dB domain.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::layout::{classify_link, LinkClass, Route};
use crate::propagation::CornerModel;
use crate::stats::{mean_var, EmpiricalCdf};

/// Minimum residual count for [`lognormality_gap`].
pub const MIN_GAP_RESIDUALS: usize = 20;

/// One measured link: corridor legs (a single leg for scalar-distance
/// datasets), room penetrations and path gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub segments: Vec<f64>,
    pub room_penetrations: usize,
    pub pg_db: f64,
}

impl Measurement {
    pub fn at_distance(d: f64, pg_db: f64) -> Self {
        Self {
            segments: vec![d],
            room_penetrations: 0,
            pg_db,
        }
    }

    pub fn along(segments: Vec<f64>, pg_db: f64) -> Self {
        Self {
            segments,
            room_penetrations: 0,
            pg_db,
        }
    }

    pub fn distance(&self) -> f64 {
        self.segments.iter().sum()
    }

    pub fn route(&self) -> Route {
        Route::from_segments(self.segments.clone(), self.room_penetrations)
    }

    pub fn link_class(&self) -> LinkClass {
        classify_link(&self.route())
    }

    fn check(&self) -> Result<()> {
        if !self.pg_db.is_finite() {
            return Err(Error::Domain(format!("path gain must be finite, got {}", self.pg_db)));
        }
        if self.segments.is_empty() || self.segments.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Domain("measurement legs must be finite and >= 0".into()));
        }
        let d = self.distance();
        if d < 1.0 {
            return Err(Error::Domain(format!("measurement distance must be >= 1 m, got {d}")));
        }
        Ok(())
    }
}

/// Fitted coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum FitParameters {
    SlopeIntercept {
        intercept_db: f64,
        slope_db: f64,
    },
    Corner {
        #[serde(rename = "PL1")]
        pl1_db: f64,
        n: f64,
        #[serde(rename = "PL_S")]
        pls_db: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub parameters: FitParameters,
    pub n_points: usize,
    pub rms_error_db: f64,
    pub mean_bias_db: f64,
    /// Absent when there are too few residuals.
    pub lognormal_max_cdf_gap_db: Option<f64>,
    /// Measured minus modeled, in input order.
    pub residuals: Vec<f64>,
}

impl FitReport {
    fn from_residuals(parameters: FitParameters, residuals: Vec<f64>) -> Self {
        let (bias, _) = mean_var(&residuals);
        let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
        let gap = lognormality_gap(&residuals).ok();
        Self {
            parameters,
            n_points: residuals.len(),
            rms_error_db: rms,
            mean_bias_db: bias,
            lognormal_max_cdf_gap_db: gap,
            residuals,
        }
    }

    /// The corner model the fit describes, if it is a corner fit.
    pub fn corner_model(&self, frequency_ghz: f64, shadow_sigma_db: f64) -> Option<CornerModel> {
        match self.parameters {
            FitParameters::Corner { pl1_db, n, pls_db } => Some(CornerModel {
                pl1_db,
                n,
                pls_db,
                shadow_sigma_db,
                frequency_ghz,
            }),
            FitParameters::SlopeIntercept { .. } => None,
        }
    }
}

fn check_all(data: &[Measurement]) -> Result<()> {
    data.iter().try_for_each(Measurement::check)
}

/// Ordinary least squares of `pg` on `log10 d`, `d` the summed leg length.
pub fn fit_slope_intercept(data: &[Measurement]) -> Result<FitReport> {
    if data.len() < 3 {
        return Err(Error::Domain(format!("slope-intercept fit needs >= 3 points, got {}", data.len())));
    }
    check_all(data)?;
    let x: Vec<f64> = data.iter().map(|m| m.distance().log10()).collect();
    let y: Vec<f64> = data.iter().map(|m| m.pg_db).collect();
    let (mx, vx) = mean_var(&x);
    let my = y.iter().sum::<f64>() / y.len() as f64;
    if vx <= 1e-18 * mx.abs().max(1.0) {
        return Err(Error::Rank("all measurements share one distance".into()));
    }
    let sxy = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / x.len() as f64;
    let slope = sxy / vx;
    let intercept = my - slope * mx;
    let residuals = x.iter().zip(&y).map(|(a, b)| b - (intercept + slope * a)).collect();
    Ok(FitReport::from_residuals(
        FitParameters::SlopeIntercept {
            intercept_db: intercept,
            slope_db: slope,
        },
        residuals,
    ))
}

/// Least-squares slope with the intercept held at `intercept_db`.
pub fn fit_slope_fixed_intercept(data: &[Measurement], intercept_db: f64) -> Result<FitReport> {
    if data.is_empty() {
        return Err(Error::Domain("no measurements".into()));
    }
    check_all(data)?;
    let x: Vec<f64> = data.iter().map(|m| m.distance().log10()).collect();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    if sxx == 0.0 {
        return Err(Error::Rank("all measurements at 1 m".into()));
    }
    let sxy: f64 = x.iter().zip(data).map(|(a, m)| a * (m.pg_db - intercept_db)).sum();
    let slope = sxy / sxx;
    let residuals = x.iter().zip(data).map(|(a, m)| m.pg_db - (intercept_db + slope * a)).collect();
    Ok(FitReport::from_residuals(
        FitParameters::SlopeIntercept {
            intercept_db,
            slope_db: slope,
        },
        residuals,
    ))
}

/// Joint least-squares fit of the exponent `n` and per-turn loss `PL_S` of
/// the corner model with `PL1` fixed.
///
/// With `x = 10 log10(product of clamped legs)` and `t` the turn count the
/// model is `pg - PL1 = n x + PL_S t`, solved through the 2x2 normal equations.
pub fn fit_corner_model(data: &[Measurement], pl1_db: f64) -> Result<FitReport> {
    if data.is_empty() {
        return Err(Error::Domain("no measurements".into()));
    }
    if !pl1_db.is_finite() {
        return Err(Error::Domain("PL1 must be finite".into()));
    }
    check_all(data)?;
    let rows = data
        .iter()
        .map(|m| CornerModel::regressors(&m.segments).map(|(x, t)| (x, t as f64, m.pg_db - pl1_db)))
        .collect::<Result<Vec<_>>>()?;
    let (mut sxx, mut sxt, mut stt, mut sxy, mut sty) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, t, y) in &rows {
        sxx += x * x;
        sxt += x * t;
        stt += t * t;
        sxy += x * y;
        sty += t * y;
    }
    if stt == 0.0 {
        return Err(Error::Rank("no multi-leg routes: PL_S is unidentifiable".into()));
    }
    let det = sxx * stt - sxt * sxt;
    if det.abs() <= 1e-12 * sxx * stt {
        return Err(Error::Rank("corner design matrix is singular".into()));
    }
    let n = (sxy * stt - sty * sxt) / det;
    let pls = (sty * sxx - sxy * sxt) / det;
    let residuals = rows.iter().map(|&(x, t, y)| y - (n * x + pls * t)).collect();
    Ok(FitReport::from_residuals(
        FitParameters::Corner {
            pl1_db,
            n,
            pls_db: pls,
        },
        residuals,
    ))
}

/// Largest horizontal distance (dB) between the empirical residual CDF and
/// `Normal(0, sigma)` over the 5%..95% quantile band, `sigma` the standard
/// deviation of the residuals. Zero spread reports `+inf`.
pub fn lognormality_gap(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < MIN_GAP_RESIDUALS {
        return Err(Error::Domain(format!(
            "lognormality gap needs >= {MIN_GAP_RESIDUALS} residuals, got {}",
            residuals.len()
        )));
    }
    let sigma = mean_var(residuals).1.sqrt();
    if sigma == 0.0 {
        return Ok(f64::INFINITY);
    }
    let cdf = EmpiricalCdf::new(residuals.to_vec())?;
    let std_normal = Normal::standard();
    let gap = (5..=95)
        .map(|i| {
            let p = i as f64 / 100.0;
            (cdf.quantile(p) - sigma * std_normal.inverse_cdf(p)).abs()
        })
        .fold(0.0, f64::max);
    Ok(gap)
}

/// Reads measurements from CSV with a header naming the columns `seg1_m`,
/// `seg2_m`, `seg3_m`, `penetrations`, `pg_db` (case-insensitive, any order,
/// extra columns ignored). Empty or zero trailing legs are dropped.
pub fn read_measurements_csv(text: &str) -> Result<Vec<Measurement>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| Error::Config("measurement csv is empty".into()))?;
    let cols: Vec<String> = header.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
    let find = |name: &str| cols.iter().position(|c| c == name);
    let seg_cols: Vec<usize> = ["seg1_m", "seg2_m", "seg3_m"].iter().filter_map(|n| find(n)).collect();
    let first = find("seg1_m").ok_or_else(|| Error::Config("measurement csv: missing column seg1_m".into()))?;
    let pg_col = find("pg_db").ok_or_else(|| Error::Config("measurement csv: missing column pg_db".into()))?;
    let pen_col = find("penetrations");
    debug_assert_eq!(seg_cols.first(), Some(&first));

    let mut out = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |what: &str| Error::Config(format!("measurement csv line {}: {what}", lineno + 1));
        let num = |i: usize| -> Result<Option<f64>> {
            match fields.get(i).copied().unwrap_or("") {
                "" => Ok(None),
                s => s.parse::<f64>().map(Some).map_err(|_| bad(&format!("`{s}` is not a number"))),
            }
        };
        let mut segments = Vec::new();
        for &c in &seg_cols {
            match num(c)? {
                Some(v) if v > 0.0 || segments.is_empty() => segments.push(v),
                _ => break,
            }
        }
        if segments.is_empty() {
            return Err(bad("seg1_m is empty"));
        }
        let pg_db = num(pg_col)?.ok_or_else(|| bad("pg_db is empty"))?;
        let room_penetrations = match pen_col {
            Some(c) => match num(c)? {
                Some(v) if v >= 0.0 && v.fract() == 0.0 => v as usize,
                Some(_) => return Err(bad("penetrations must be a non-negative integer")),
                None => 0,
            },
            None => 0,
        };
        let m = Measurement {
            segments,
            room_penetrations,
            pg_db,
        };
        m.check().map_err(|e| bad(&e.to_string()))?;
        out.push(m);
    }
    Ok(out)
}

pub fn write_measurements_csv(data: &[Measurement]) -> String {
    let mut out = String::from("seg1_m,seg2_m,seg3_m,penetrations,pg_db\n");
    for m in data {
        let seg = |i: usize| m.segments.get(i).map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{}\n", seg(0), seg(1), seg(2), m.room_penetrations, m.pg_db));
    }
    out
}

/// One swept route of the corner survey: the receiver walks `1..=d_max` m
/// of Manhattan distance along a corridor with turns after `d1` (and `d2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyRoute {
    pub building: &'static str,
    pub d1: f64,
    pub d2: Option<f64>,
    pub d_max: usize,
}

/// Corner-survey geometry: three one-turn sweeps in one building and two
/// two-turn sweeps in another, 418 links in total.
pub const CORNER_SURVEY: [SurveyRoute; 5] = [
    SurveyRoute { building: "building-a", d1: 17.0, d2: None, d_max: 100 },
    SurveyRoute { building: "building-a", d1: 27.0, d2: None, d_max: 100 },
    SurveyRoute { building: "building-a", d1: 37.0, d2: None, d_max: 99 },
    SurveyRoute { building: "building-b", d1: 10.0, d2: Some(20.0), d_max: 60 },
    SurveyRoute { building: "building-b", d1: 15.0, d2: Some(20.0), d_max: 59 },
];

/// Corridor legs at Manhattan distance `d` along a survey route.
pub fn survey_segments(route: &SurveyRoute, d: f64) -> Vec<f64> {
    match route.d2 {
        _ if d <= route.d1 => vec![d],
        None => vec![route.d1, d - route.d1],
        Some(d2) if d <= route.d1 + d2 => vec![route.d1, d - route.d1],
        Some(d2) => vec![route.d1, d2, d - route.d1 - d2],
    }
}

/// Synthetic measurements over [`CORNER_SURVEY`] drawn from `model` with its
/// lognormal shadowing, tagged with the building name.
pub fn synthesize_corner_survey<R: rand::Rng + ?Sized>(
    model: &CornerModel,
    rng: &mut R,
) -> Result<Vec<(&'static str, Measurement)>> {
    let mut out = Vec::new();
    for route in &CORNER_SURVEY {
        for i in 1..=route.d_max {
            let segments = survey_segments(route, i as f64);
            let pg = model.path_gain_segments(&segments)?;
            let pg = crate::propagation::shadowed(pg, model.shadow_sigma_db, rng);
            out.push((route.building, Measurement::along(segments, pg)));
        }
    }
    Ok(out)
}
