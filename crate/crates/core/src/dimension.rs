//! Threshold rules that turn a spectrum into an integer dimension.
//!
//! - [`dim_gte`] counts entries whose share of the spectrum sum is at least
//!   `t` (default 1%). Shares use raw values.
//! - [`dim_cumulative`] is the length of the shortest prefix whose cumulative
//!   share reaches `t` (default 90%). Shares are raw values by default;
//!   [`Share::Squared`] weighs by σ² (variance) instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svp::{Source, Spectrum};

pub const DEFAULT_GTE_THRESHOLD: f64 = 0.01;
pub const DEFAULT_CUMULATIVE_THRESHOLD: f64 = 0.90;

/// Weighting used by the cumulative rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Share {
    /// σᵢ / Σσⱼ
    #[default]
    Raw,
    /// σᵢ² / Σσⱼ²
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    GteFraction,
    CumulativeRaw,
    CumulativeEnergy,
}

impl Rule {
    pub fn cumulative(share: Share) -> Self {
        match share {
            Share::Raw => Rule::CumulativeRaw,
            Share::Squared => Rule::CumulativeEnergy,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::GteFraction => "gte_fraction",
            Rule::CumulativeRaw => "cumulative_raw",
            Rule::CumulativeEnergy => "cumulative_energy",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub method: Source,
    pub rule: Rule,
    pub threshold: f64,
    pub p: usize,
}

fn check(spectrum: &Spectrum, t: f64) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(Error::argument("spectrum is empty"));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::argument(format!("threshold must lie in (0, 1), got {t}")));
    }
    let sum = spectrum.sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateSpectrum("spectrum sums to zero".into()));
    }
    Ok(sum)
}

/// Number of entries with `σᵢ / Σσⱼ ≥ t`.
pub fn dim_gte(spectrum: &Spectrum, t: f64) -> Result<DimensionEstimate> {
    let sum = check(spectrum, t)?;
    let p = spectrum.values().iter().filter(|&&s| s / sum >= t).count();
    Ok(DimensionEstimate {
        method: spectrum.source(),
        rule: Rule::GteFraction,
        threshold: t,
        p,
    })
}

/// Smallest `l` whose leading `l` shares add up to at least `t`.
pub fn dim_cumulative(spectrum: &Spectrum, t: f64, share: Share) -> Result<DimensionEstimate> {
    check(spectrum, t)?;
    let weight = |s: f64| match share {
        Share::Raw => s,
        Share::Squared => s * s,
    };
    let total: f64 = spectrum.values().iter().map(|&s| weight(s)).sum();
    if total <= 0.0 {
        // σ² underflowed for a spectrum of subnormal values.
        return Err(Error::DegenerateSpectrum("squared spectrum sums to zero".into()));
    }
    let mut running = 0.0;
    let mut p = spectrum.len();
    for (i, &s) in spectrum.values().iter().enumerate() {
        running += weight(s);
        if running / total >= t {
            p = i + 1;
            break;
        }
    }
    Ok(DimensionEstimate {
        method: spectrum.source(),
        rule: Rule::cumulative(share),
        threshold: t,
        p,
    })
}

/// Both rules at the default thresholds (1% and 90%, raw shares).
pub fn estimate_all(spectrum: &Spectrum) -> Result<(DimensionEstimate, DimensionEstimate)> {
    estimate_with(
        spectrum,
        DEFAULT_GTE_THRESHOLD,
        DEFAULT_CUMULATIVE_THRESHOLD,
        Share::Raw,
    )
}

pub fn estimate_with(
    spectrum: &Spectrum,
    gte_threshold: f64,
    cumulative_threshold: f64,
    share: Share,
) -> Result<(DimensionEstimate, DimensionEstimate)> {
    Ok((
        dim_gte(spectrum, gte_threshold)?,
        dim_cumulative(spectrum, cumulative_threshold, share)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec(), Source::Pca).unwrap()
    }

    #[test]
    fn gte_examples() {
        assert_eq!(dim_gte(&spec(&[98.0, 1.5, 0.5]), 0.01).unwrap().p, 2);
        assert_eq!(dim_gte(&spec(&[1.0, 0.0, 0.0]), 0.01).unwrap().p, 1);
        assert_eq!(dim_gte(&spec(&[1.0, 1.0, 1.0, 1.0]), 0.01).unwrap().p, 4);
    }

    #[test]
    fn gte_counts_exact_threshold_ties() {
        // 1.0 / 100.0 rounds to the same double as the literal 0.01.
        let v = vec![1.0; 100];
        assert_eq!(dim_gte(&spec(&v), 0.01).unwrap().p, 100);
    }

    #[test]
    fn cumulative_examples_match_under_both_shares() {
        for share in [Share::Raw, Share::Squared] {
            assert_eq!(dim_cumulative(&spec(&[3.0, 3.0, 3.0, 1.0]), 0.9, share).unwrap().p, 3);
            assert_eq!(dim_cumulative(&spec(&[1.0]), 0.9, share).unwrap().p, 1);
            assert_eq!(dim_cumulative(&spec(&[4.0, 3.0]), 0.9, share).unwrap().p, 2);
        }
    }

    #[test]
    fn shares_differ_on_skewed_spectra() {
        // squared: 100/(100+4·1) = 0.96 ≥ 0.9 after one value;
        // raw: 10/14 = 0.71, 11/14, 12/14 = 0.857, 13/14 = 0.93.
        let s = spec(&[10.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(dim_cumulative(&s, 0.9, Share::Squared).unwrap().p, 1);
        assert_eq!(dim_cumulative(&s, 0.9, Share::Raw).unwrap().p, 4);
        assert_eq!(dim_cumulative(&s, 0.9, Share::Squared).unwrap().rule, Rule::CumulativeEnergy);
    }

    #[test]
    fn estimate_all_examples() {
        let (g, c) = estimate_all(&spec(&[1.0, 0.0])).unwrap();
        assert_eq!((g.p, c.p), (1, 1));
        for n in [1usize, 7, 10, 64] {
            let (g, c) = estimate_all(&spec(&vec![2.5; n])).unwrap();
            assert_eq!(g.p, n);
            assert_eq!(c.p, (0.9 * n as f64).ceil() as usize);
        }
    }

    #[test]
    fn degenerate_and_bad_thresholds() {
        assert!(matches!(dim_gte(&spec(&[0.0, 0.0]), 0.01), Err(Error::DegenerateSpectrum(_))));
        assert!(matches!(
            dim_cumulative(&spec(&[0.0]), 0.9, Share::Raw),
            Err(Error::DegenerateSpectrum(_))
        ));
        assert!(matches!(dim_gte(&spec(&[1.0]), 0.0), Err(Error::Argument(_))));
        assert!(matches!(dim_gte(&spec(&[1.0]), 1.0), Err(Error::Argument(_))));
        assert!(matches!(dim_gte(&spec(&[]), 0.5), Err(Error::Argument(_))));
    }

    #[test]
    fn trailing_zeros_never_count() {
        let s = spec(&[5.0, 4.0, 0.0, 0.0, 0.0]);
        assert_eq!(dim_gte(&s, 1e-9).unwrap().p, 2);
        assert_eq!(dim_cumulative(&s, 0.999_999, Share::Raw).unwrap().p, 2);
    }
}
