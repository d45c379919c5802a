use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Which convention the supplied standard deviations use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdKind {
    /// Use the values as given.
    Population,
    /// Values are population SDs; rescale by sqrt(n/(n-1)) first.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub dof: f64,
    /// Two-tailed.
    pub p: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

/// Welch's unequal-variance t-test from summary statistics.
pub fn welch(a: Summary, b: Summary, kind: SdKind) -> Result<WelchResult> {
    for s in [a, b] {
        if s.n < 2 {
            return Err(Error::InvalidStatistic(format!("need n >= 2, got {}", s.n)));
        }
        if s.sd.is_nan() || s.sd < 0.0 || !s.mean.is_finite() {
            return Err(Error::InvalidStatistic(format!("bad summary {s:?}")));
        }
    }
    let sd = |s: Summary| match kind {
        SdKind::Population => s.sd,
        SdKind::Sample => s.sd * (s.n as f64 / (s.n as f64 - 1.0)).sqrt(),
    };
    let va = sd(a).powi(2) / a.n as f64;
    let vb = sd(b).powi(2) / b.n as f64;
    let se = (va + vb).sqrt();
    if se == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let t = (a.mean - b.mean) / se;
    let dof = (va + vb).powi(2) / (va.powi(2) / (a.n as f64 - 1.0) + vb.powi(2) / (b.n as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::InvalidStatistic(e.to_string()))?;
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(WelchResult { t, dof, p, se })
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divides by n).
pub fn pstdev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Sample standard deviation (divides by n - 1).
pub fn stdev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

impl Summary {
    pub fn new(mean: f64, sd: f64, n: usize) -> Self {
        Self { mean, sd, n }
    }

    /// Mean and population SD of `xs`.
    pub fn of(xs: &[f64]) -> Self {
        Self { mean: mean(xs), sd: pstdev(xs), n: xs.len() }
    }
}
