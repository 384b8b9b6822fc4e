//! Empirical distributions and small dB helpers shared by every module.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear power ratio to dB.
#[inline]
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dB to linear power ratio.
#[inline]
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Deterministic per-unit RNG stream: the same `(seed, stream)` pair always
/// yields the same sequence, independent of which thread consumes it.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Empirical CDF of a finite sample.
///
/// Quantiles use the inverse of the step CDF: `quantile(p)` is the smallest
/// sample `x` with `F(x) >= p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// Builds a CDF from samples. NaN samples are rejected.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("empirical CDF of an empty sample".into()));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("NaN sample in empirical CDF".into()));
        }
        samples.sort_by(|a, b| a.total_cmp(b));
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }

    /// Smallest sample with `F(x) >= p`, `p` clamped to `[0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let p = p.clamp(0.0, 1.0);
        let mut rank = (p * n as f64).ceil() as usize;
        // p = k/n can round up past k
        if rank > 1 && (rank - 1) as f64 / n as f64 >= p {
            rank -= 1;
        }
        self.sorted[rank.clamp(1, n) - 1]
    }

    /// Values at the 10%, 20%, ..., 90% points.
    pub fn deciles(&self) -> [f64; 9] {
        std::array::from_fn(|i| self.quantile((i + 1) as f64 / 10.0))
    }

    /// Right-continuous step points `(x, F(x))`, one per distinct value.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = f,
                _ => out.push((v, f)),
            }
        }
        out
    }
}

/// Mean and (population) variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v)
}

/// Median with midpoint averaging for even counts. Empty input gives NaN.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
