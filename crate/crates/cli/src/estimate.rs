//! One dimension estimate for one batch, by any of the three routes.

use clap::ValueEnum;
use serde::Serialize;

use dimest::autoencoder::{train, Activation, AeConfig, Optimizer};
use dimest::dimension::estimate_with;
use dimest::isomap::isomap_embed;
use dimest::pca::fit_pca;
use dimest::{to_svp, DataMatrix, Error, Result, Share, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pca,
    Isomap,
    Ae,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Isomap => "isomap",
            Method::Ae => "ae",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareArg {
    Raw,
    Squared,
}

impl From<ShareArg> for Share {
    fn from(s: ShareArg) -> Share {
        match s {
            ShareArg::Raw => Share::Raw,
            ShareArg::Squared => Share::Squared,
        }
    }
}

/// Everything an estimate needs besides the data and the seed.
#[derive(Debug, Clone)]
pub struct EstimateOpts {
    pub gte_threshold: f64,
    pub cum_threshold: f64,
    pub share: Share,
    pub center: bool,
    pub neighbors: usize,
    pub lambda: f64,
    pub epochs: usize,
    pub steps: Option<usize>,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerArg,
    /// Output activation of the autoencoder (sigmoid for pixels, tanh for returns).
    pub output: Activation,
}

impl EstimateOpts {
    /// Training recipe for `rows` samples of width `input`.
    pub fn ae_config(&self, input: usize, rows: usize, seed: u64) -> AeConfig {
        let mut c = AeConfig::five_layer(input, self.output);
        c.lambda = self.lambda;
        c.epochs = match self.steps {
            Some(steps) if self.batch_size > 0 => steps.div_ceil(rows.div_ceil(self.batch_size).max(1)),
            _ => self.epochs,
        };
        c.batch_size = self.batch_size;
        c.learning_rate = self.learning_rate;
        c.seed = seed;
        c.optimizer = match self.optimizer {
            OptimizerArg::Adam => Optimizer::adam(),
            OptimizerArg::Sgd => Optimizer::Sgd,
        };
        c
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub gte: usize,
    pub cumulative: usize,
    pub spectrum: Spectrum,
    /// Per-epoch training loss (autoencoder only).
    pub history: Option<Vec<f64>>,
}

/// Estimates the dimension of `x`. For the autoencoder, `x` is the training
/// batch and `probe` (default `x`) the batch whose code is summarized.
pub fn estimate(
    method: Method,
    x: &DataMatrix,
    probe: Option<&DataMatrix>,
    opts: &EstimateOpts,
    seed: u64,
) -> Result<Outcome> {
    let (spectrum, history) = match method {
        Method::Pca => (fit_pca(x, opts.center)?.spectrum(), None),
        Method::Isomap => (isomap_embed(x, opts.neighbors, x.row_count())?.spectrum, None),
        Method::Ae => {
            let model = train(&opts.ae_config(x.col_count(), x.row_count(), seed), x)?;
            let hidden = model.hidden_activations(probe.unwrap_or(x))?;
            (to_svp(&hidden)?, Some(model.training_history().to_vec()))
        }
    };
    let (g, c) = estimate_with(&spectrum, opts.gte_threshold, opts.cum_threshold, opts.share)?;
    Ok(Outcome {
        gte: g.p,
        cumulative: c.p,
        spectrum,
        history,
    })
}

/// Failures that belong to one run (excluded from means and counted)
/// rather than to the command as a whole.
pub fn is_run_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::Divergence { .. }
            | Error::DisconnectedGraph { .. }
            | Error::DegenerateSpectrum(_)
            | Error::NoConvergence { .. }
    )
}
