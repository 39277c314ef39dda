//! Seeded generators with known latent dimension.

use chrono::NaiveDate;
use ndarray::{Array2, Axis};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral::DataMatrix;

fn gaussian<R: Rng>(rng: &mut R, shape: (usize, usize), std: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn(shape, || std * rng.sample::<f64, _>(StandardNormal))
}

/// `X = A·B + ε` with standard-normal `A` (samples × factors) and
/// `B` (factors × features) and i.i.d. `N(0, noise_std²)` noise.
///
/// Entries of `A·B` have standard deviation `√factors`.
pub fn synth_factor_panel(
    n_samples: usize,
    n_features: usize,
    n_factors: usize,
    noise_std: f64,
    seed: u64,
) -> Result<DataMatrix> {
    if n_samples == 0 || n_features == 0 {
        return Err(Error::argument("panel needs at least one sample and one feature"));
    }
    if n_factors > n_samples.min(n_features) {
        return Err(Error::argument(format!(
            "{n_factors} factors exceed min({n_samples}, {n_features})"
        )));
    }
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(Error::argument("noise std must be finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian(&mut rng, (n_samples, n_factors), 1.0);
    let b = gaussian(&mut rng, (n_factors, n_features), 1.0);
    let noise = gaussian(&mut rng, (n_samples, n_features), noise_std);
    DataMatrix::new(a.dot(&b) + noise)
}

/// A stretch of `days` trading days driven by `factors` common factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regime {
    pub days: usize,
    pub factors: usize,
}

/// Synthetic price table for time-series tests.
#[derive(Debug, Clone)]
pub struct SynthPrices {
    pub dates: Vec<NaiveDate>,
    pub tickers: Vec<String>,
    /// Rows are dates; the first row is 100 for every ticker.
    pub prices: Array2<f64>,
}

/// Prices whose daily log returns follow a factor model that switches
/// between regimes. Each regime draws fresh loadings; factor returns have
/// standard deviation `factor_std` and idiosyncratic noise `noise_std`.
/// Row `t > 0` carries the return of the regime containing day `t`.
pub fn regime_price_panel(
    regimes: &[Regime],
    tickers: usize,
    factor_std: f64,
    noise_std: f64,
    seed: u64,
) -> Result<SynthPrices> {
    let days: usize = regimes.iter().map(|r| r.days).sum();
    if days < 2 || tickers == 0 {
        return Err(Error::argument("need at least two days and one ticker"));
    }
    if let Some(r) = regimes.iter().find(|r| r.factors == 0 || r.factors > tickers) {
        return Err(Error::argument(format!("{} factors for {tickers} tickers", r.factors)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut returns = Array2::zeros((0, tickers));
    for r in regimes {
        let f = gaussian(&mut rng, (r.days, r.factors), factor_std);
        let b = gaussian(&mut rng, (r.factors, tickers), 1.0);
        let e = gaussian(&mut rng, (r.days, tickers), noise_std);
        returns
            .append(Axis(0), (f.dot(&b) + e).view())
            .expect("column counts agree");
    }
    let mut prices = Array2::from_elem((days, tickers), 100.0);
    for t in 1..days {
        for j in 0..tickers {
            prices[[t, j]] = prices[[t - 1, j]] * returns[[t, j]].exp();
        }
    }
    let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    Ok(SynthPrices {
        dates: (0..days as u64).map(|d| start + chrono::Days::new(d)).collect(),
        tickers: (0..tickers).map(|j| format!("S{j:03}")).collect(),
        prices,
    })
}
