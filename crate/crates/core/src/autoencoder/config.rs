use serde::{Deserialize, Serialize};

use super::Activation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    /// Plain mini-batch gradient descent.
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Architecture and training recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeConfig {
    /// Widths from input to output, e.g. `[784, 256, 128, 64, 128, 256, 784]`.
    pub layer_sizes: Vec<usize>,
    /// One activation per non-input layer.
    pub activations: Vec<Activation>,
    /// Weight of the sparsity term.
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Weights start uniform in ±`init_scale / sqrt(fan_in)`.
    pub init_scale: f64,
    pub optimizer: Optimizer,
}

impl AeConfig {
    pub const DEFAULT_LAMBDA: f64 = 0.1;
    pub const DEFAULT_LEARNING_RATE: f64 = 1e-3;
    pub const DEFAULT_EPOCHS: usize = 200;
    pub const DEFAULT_BATCH_SIZE: usize = 10;

    /// `input → 256 (relu) → 128 → 64 → 128 → 256 (relu) → input (output)`.
    pub fn five_layer(input: usize, output: Activation) -> Self {
        use Activation::*;
        AeConfig {
            layer_sizes: vec![input, 256, 128, 64, 128, 256, input],
            activations: vec![Relu, Identity, Identity, Identity, Relu, output],
            lambda: Self::DEFAULT_LAMBDA,
            learning_rate: Self::DEFAULT_LEARNING_RATE,
            epochs: Self::DEFAULT_EPOCHS,
            batch_size: Self::DEFAULT_BATCH_SIZE,
            seed: 0,
            init_scale: 1.0,
            optimizer: Optimizer::adam(),
        }
    }

    /// 784-pixel images, sigmoid output.
    pub fn mnist() -> Self {
        Self::five_layer(784, Activation::Sigmoid)
    }

    /// Daily log returns of `tickers` stocks, tanh output.
    pub fn returns(tickers: usize) -> Self {
        Self::five_layer(tickers, Activation::Tanh)
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes.first().copied().unwrap_or(0)
    }

    /// Index into `layer_sizes` of the innermost hidden layer: the first
    /// hidden layer of minimal width.
    pub fn code_layer(&self) -> usize {
        let hidden = 1..self.layer_sizes.len().saturating_sub(1);
        let mut best = hidden.start;
        for l in hidden {
            if self.layer_sizes[l] < self.layer_sizes[best] {
                best = l;
            }
        }
        best
    }

    pub fn code_width(&self) -> usize {
        self.layer_sizes[self.code_layer()]
    }

    pub fn validate(&self) -> Result<()> {
        let sizes = &self.layer_sizes;
        if sizes.len() < 3 {
            return Err(Error::argument("an autoencoder needs at least one hidden layer"));
        }
        if sizes.contains(&0) {
            return Err(Error::argument("layer widths must be positive"));
        }
        if sizes[0] != sizes[sizes.len() - 1] {
            return Err(Error::argument(format!(
                "output width {} must equal input width {}",
                sizes[sizes.len() - 1],
                sizes[0]
            )));
        }
        if self.activations.len() != sizes.len() - 1 {
            return Err(Error::argument(format!(
                "expected {} activations, got {}",
                sizes.len() - 1,
                self.activations.len()
            )));
        }
        let code = self.code_layer();
        if self.activations[code - 1] != Activation::Identity {
            return Err(Error::argument(format!(
                "innermost hidden layer {code} must use the identity activation, got {:?}",
                self.activations[code - 1]
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::argument(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::argument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::argument("batch size must be positive"));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::argument("init scale must be positive"));
        }
        if let Optimizer::Adam { beta1, beta2, epsilon } = self.optimizer {
            let unit = |b: f64| (0.0..1.0).contains(&b);
            if !unit(beta1) || !unit(beta2) || epsilon.is_nan() || epsilon <= 0.0 {
                return Err(Error::argument("Adam needs betas in [0, 1) and a positive epsilon"));
            }
        }
        Ok(())
    }
}
