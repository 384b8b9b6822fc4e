//! Deterministic path-gain models, lognormal shadowing and frequency scaling.
//!
//! All values are path *gains* in dB (negative numbers); path loss is the
//! negation. Distances are meters, frequencies GHz.
//!
//! * [`PathGainModel`]: slope-intercept power law, used for the hallway LOS
//!   fit (`-61 - 17.6 log10 d`) and the corridor-to-room fit
//!   (`-87.6 - 21 log10 d`).
//! * [`CornerModel`]: single-slope Manhattan-distance law with a fixed loss
//!   per corridor turn, for up to two turns.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::Route;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Offset applied to 28 GHz path gains for the 2 GHz comparison system.
pub const COMPARISON_2GHZ_OFFSET_DB: f64 = 34.0;

/// Free-space (Friis) path gain in dB at distance `d_m` for carrier `f_ghz`.
pub fn friis_gain_db(d_m: f64, f_ghz: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / (f_ghz * 1e9);
    20.0 * (lambda / (4.0 * std::f64::consts::PI * d_m)).log10()
}

/// Frequency shift of an intercept or fixed loss that scales as `f^2`.
pub fn f2_shift_db(f_old_ghz: f64, f_new_ghz: f64) -> f64 {
    -20.0 * (f_new_ghz / f_old_ghz).log10()
}

fn check_distance(d: f64) -> Result<()> {
    if !d.is_finite() || d < 1.0 {
        return Err(Error::Domain(format!("distance must be finite and >= 1 m, got {d}")));
    }
    Ok(())
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0 GHz, got {f}")));
    }
    Ok(())
}

/// Models whose dB constants move with carrier frequency.
pub trait FrequencyScaled: Sized {
    fn frequency_ghz(&self) -> f64;

    /// Re-targets the model to `f_new_ghz`: intercepts and fixed losses shift
    /// by `-20 log10(f_new / f_old)`, slopes are unchanged.
    fn scale_frequency(&self, f_new_ghz: f64) -> Result<Self>;
}

/// Slope-intercept power law `intercept + slope * log10(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathGainModel {
    /// Path gain at 1 m.
    pub intercept_db: f64,
    /// dB per decade of distance (`10 n`, negative).
    pub slope_db: f64,
    pub shadow_sigma_db: f64,
    pub frequency_ghz: f64,
}

impl PathGainModel {
    /// Hallway line-of-sight fit at 28 GHz.
    pub const LOS_28GHZ: PathGainModel = PathGainModel {
        intercept_db: -61.0,
        slope_db: -17.6,
        shadow_sigma_db: 3.14,
        frequency_ghz: 28.0,
    };

    /// Corridor-to-room fit at 28 GHz.
    pub const NLOS_ROOM_28GHZ: PathGainModel = PathGainModel {
        intercept_db: -87.6,
        slope_db: -21.0,
        shadow_sigma_db: 3.2,
        frequency_ghz: 28.0,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.intercept_db.is_finite() && self.slope_db.is_finite()) {
            return Err(Error::Invariant("path gain model: intercept and slope must be finite".into()));
        }
        if !(self.shadow_sigma_db.is_finite() && self.shadow_sigma_db >= 0.0) {
            return Err(Error::Invariant("path gain model: shadow_sigma_db must be >= 0".into()));
        }
        check_frequency(self.frequency_ghz).map_err(|e| Error::Invariant(format!("path gain model: {e}")))
    }

    /// Deterministic path gain at `d` meters.
    pub fn path_gain(&self, d: f64) -> Result<f64> {
        check_distance(d)?;
        Ok(self.intercept_db + self.slope_db * d.log10())
    }
}

impl FrequencyScaled for PathGainModel {
    fn frequency_ghz(&self) -> f64 {
        self.frequency_ghz
    }

    fn scale_frequency(&self, f_new_ghz: f64) -> Result<Self> {
        check_frequency(f_new_ghz)?;
        Ok(Self {
            intercept_db: self.intercept_db + f2_shift_db(self.frequency_ghz, f_new_ghz),
            frequency_ghz: f_new_ghz,
            ..*self
        })
    }
}

/// Hallway line-of-sight path gain with the default fit.
pub fn pg_los(d: f64) -> Result<f64> {
    PathGainModel::LOS_28GHZ.path_gain(d)
}

/// Corridor-to-room path gain with the default fit.
pub fn pg_nlos_room(d: f64) -> Result<f64> {
    PathGainModel::NLOS_ROOM_28GHZ.path_gain(d)
}

/// Corner geometry seen by a transmitter moving along a corridor route:
/// first leg `d1`, optional second leg `d2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerGeometry {
    pub d1: f64,
    pub d2: Option<f64>,
}

/// Manhattan-distance model with a fixed loss per turn.
///
/// ```text
/// PL1 + 10n log10(d)                          d <= D1
/// PL1 +  PLs + 10n log10(D1 (d - D1))         D1 < d <= D1 + D2
/// PL1 + 2PLs + 10n log10(D1 D2 (d - D1 - D2)) d > D1 + D2
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CornerModel {
    /// Free-space path gain at 1 m.
    pub pl1_db: f64,
    /// Path-gain exponent (negative).
    pub n: f64,
    /// Loss per turn, negative dB.
    pub pls_db: f64,
    pub shadow_sigma_db: f64,
    pub frequency_ghz: f64,
}

impl Default for CornerModel {
    fn default() -> Self {
        Self::at_frequency(28.0)
    }
}

impl CornerModel {
    /// Default fit (`n = -1.81`, `PLs = -18.7 dB`, `sigma = 3.0 dB`) with the
    /// intercept pinned to Friis at 1 m for `f_ghz`.
    pub fn at_frequency(f_ghz: f64) -> Self {
        Self {
            pl1_db: friis_gain_db(1.0, f_ghz),
            n: -1.81,
            pls_db: -18.7,
            shadow_sigma_db: 3.0,
            frequency_ghz: f_ghz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pl1_db.is_finite() && self.n.is_finite() && self.pls_db.is_finite()) {
            return Err(Error::Invariant("corner model: parameters must be finite".into()));
        }
        if !(self.shadow_sigma_db.is_finite() && self.shadow_sigma_db >= 0.0) {
            return Err(Error::Invariant("corner model: shadow_sigma_db must be >= 0".into()));
        }
        check_frequency(self.frequency_ghz).map_err(|e| Error::Invariant(format!("corner model: {e}")))?;
        let friis = friis_gain_db(1.0, self.frequency_ghz);
        if (self.pl1_db - friis).abs() > 0.5 {
            return Err(Error::Invariant(format!(
                "corner model: pl1_db {} is more than 0.5 dB from free space ({friis:.2} dB)",
                self.pl1_db
            )));
        }
        Ok(())
    }

    /// Log-distance argument `10 log10(product)` and turn count for a list of
    /// corridor legs. Legs shorter than 1 m are clamped to 1 m.
    pub fn regressors(segments: &[f64]) -> Result<(f64, usize)> {
        if segments.is_empty() || segments.len() > 3 {
            return Err(Error::OutOfModel(format!(
                "corner model covers 0 to 2 turns, route has {} legs",
                segments.len()
            )));
        }
        if segments.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Domain("route legs must be finite and >= 0".into()));
        }
        let turns = segments.len() - 1;
        let product: f64 = if turns == 0 {
            segments[0].max(1.0)
        } else {
            segments.iter().map(|s| s.max(1.0)).product()
        };
        Ok((10.0 * product.log10(), turns))
    }

    /// Path gain for explicit corridor legs.
    pub fn path_gain_segments(&self, segments: &[f64]) -> Result<f64> {
        let (log_term, turns) = Self::regressors(segments)?;
        Ok(self.pl1_db + turns as f64 * self.pls_db + self.n * log_term)
    }

    /// Path gain along a route.
    pub fn path_gain(&self, route: &Route) -> Result<f64> {
        if route.n_turns > 2 {
            return Err(Error::OutOfModel(format!("route has {} turns (max 2)", route.n_turns)));
        }
        self.path_gain_segments(&route.segments)
    }

    /// Path gain at Manhattan distance `d` for a fixed corner geometry; the
    /// branch is picked from where `d` falls relative to `D1` and `D1 + D2`.
    pub fn path_gain_at(&self, d: f64, geom: CornerGeometry) -> Result<f64> {
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::Domain(format!("distance must be > 0, got {d}")));
        }
        let d1 = geom.d1;
        match geom.d2 {
            _ if d <= d1 => self.path_gain_segments(&[d]),
            None => self.path_gain_segments(&[d1, d - d1]),
            Some(d2) if d <= d1 + d2 => self.path_gain_segments(&[d1, d - d1]),
            Some(d2) => self.path_gain_segments(&[d1, d2, d - d1 - d2]),
        }
    }
}

impl FrequencyScaled for CornerModel {
    fn frequency_ghz(&self) -> f64 {
        self.frequency_ghz
    }

    fn scale_frequency(&self, f_new_ghz: f64) -> Result<Self> {
        check_frequency(f_new_ghz)?;
        let shift = f2_shift_db(self.frequency_ghz, f_new_ghz);
        Ok(Self {
            pl1_db: self.pl1_db + shift,
            pls_db: self.pls_db + shift,
            frequency_ghz: f_new_ghz,
            ..*self
        })
    }
}

pub fn pg_corner(route: &Route, model: &CornerModel) -> Result<f64> {
    model.path_gain(route)
}

/// Adds a zero-mean Gaussian (in dB) shadowing draw.
pub fn shadowed<R: Rng + ?Sized>(pg_db: f64, sigma_db: f64, rng: &mut R) -> f64 {
    if sigma_db <= 0.0 {
        return pg_db;
    }
    let normal = Normal::new(0.0, sigma_db).expect("finite sigma");
    pg_db + normal.sample(rng)
}

/// Path gain of the 2 GHz comparison system, derived from the 28 GHz value.
pub fn pg_2ghz_comparison(pg28_db: f64) -> f64 {
    pg28_db + COMPARISON_2GHZ_OFFSET_DB
}
