use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Activation, AeConfig, NORM_EPSILON};
use crate::error::{Error, Result};
use crate::spectral::DataMatrix;

/// One affine map followed by an activation. `weights` is (out × in).
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

/// Parameter gradients, shaped like the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub total: f64,
    pub recon: f64,
    pub sparsity: f64,
}

/// Raw innermost-layer values, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenBatch {
    values: Array2<f64>,
}

impl HiddenBatch {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("hidden activations must be finite".into()));
        }
        Ok(HiddenBatch { values })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AeModel {
    layers: Vec<Layer>,
    config: AeConfig,
    training_history: Vec<f64>,
}

/// Pre- and post-activation values of every layer for a batch.
struct Trace {
    pre: Vec<Array2<f64>>,
    post: Vec<Array2<f64>>,
}

impl AeModel {
    /// Uniform initialization seeded from `config.seed`.
    pub fn init(config: &AeConfig) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self::init_with(config, &mut rng)
    }

    pub(crate) fn init_with<R: Rng>(config: &AeConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let layers = config
            .layer_sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = config.init_scale / (fan_in as f64).sqrt();
                let weights =
                    Array2::from_shape_fn((fan_out, fan_in), |_| rng.random_range(-bound..=bound));
                Layer {
                    weights,
                    biases: Array1::zeros(fan_out),
                }
            })
            .collect();
        Ok(AeModel {
            layers,
            config: config.clone(),
            training_history: Vec::new(),
        })
    }

    /// Assembles a model from explicit parameters, checking every shape.
    pub fn from_parts(config: AeConfig, layers: Vec<Layer>, training_history: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if layers.len() != config.layer_sizes.len() - 1 {
            return Err(Error::argument(format!(
                "expected {} layers, got {}",
                config.layer_sizes.len() - 1,
                layers.len()
            )));
        }
        for (l, (layer, w)) in layers.iter().zip(config.layer_sizes.windows(2)).enumerate() {
            if layer.weights.dim() != (w[1], w[0]) || layer.biases.len() != w[1] {
                return Err(Error::argument(format!(
                    "layer {l} has weights {:?} and {} biases, expected ({}, {}) and {}",
                    layer.weights.dim(),
                    layer.biases.len(),
                    w[1],
                    w[0],
                    w[1]
                )));
            }
        }
        let model = AeModel {
            layers,
            config,
            training_history,
        };
        if !model.is_finite() {
            return Err(Error::InvalidInput("model parameters must be finite".into()));
        }
        Ok(model)
    }

    pub fn config(&self) -> &AeConfig {
        &self.config
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    /// Mean loss per epoch, in training order.
    pub fn training_history(&self) -> &[f64] {
        &self.training_history
    }

    pub(crate) fn push_history(&mut self, loss: f64) {
        self.training_history.push(loss);
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.biases.iter()).all(|v| v.is_finite()))
    }

    fn check_width(&self, cols: usize) -> Result<()> {
        let input = self.config.input_size();
        if cols != input {
            return Err(Error::argument(format!(
                "expected {input} input features, got {cols}"
            )));
        }
        Ok(())
    }

    /// Runs the first `depth` layers.
    fn trace(&self, x: ArrayView2<f64>, depth: usize) -> Trace {
        let mut pre = Vec::with_capacity(depth);
        let mut post: Vec<Array2<f64>> = Vec::with_capacity(depth);
        for (l, layer) in self.layers.iter().take(depth).enumerate() {
            let input = if l == 0 { x } else { post[l - 1].view() };
            let z = input.dot(&layer.weights.t()) + layer.biases.view().insert_axis(Axis(0));
            let act = self.config.activations[l];
            let a = match act {
                Activation::Identity => z.clone(),
                _ => z.mapv(|v| act.apply(v)),
            };
            pre.push(z);
            post.push(a);
        }
        Trace { pre, post }
    }

    /// Reconstruction and innermost hidden values for one sample.
    pub fn forward(&self, x: &[f64]) -> Result<(Array1<f64>, Array1<f64>)> {
        self.check_width(x.len())?;
        let row = ArrayView1::from(x).insert_axis(Axis(0));
        let mut t = self.trace(row, self.layers.len());
        let hidden = t.post[self.config.code_layer() - 1].row(0).to_owned();
        let out = t.post.pop().expect("at least two layers").row(0).to_owned();
        Ok((out, hidden))
    }

    /// Reconstructions of every row of `data`.
    pub fn reconstruct(&self, data: &DataMatrix) -> Result<Array2<f64>> {
        self.check_width(data.col_count())?;
        let mut t = self.trace(data.view(), self.layers.len());
        Ok(t.post.pop().expect("at least two layers"))
    }

    /// Innermost-layer values (no activation is applied there).
    pub fn hidden_activations(&self, data: &DataMatrix) -> Result<HiddenBatch> {
        self.check_width(data.col_count())?;
        let code = self.config.code_layer();
        let mut t = self.trace(data.view(), code);
        HiddenBatch::new(t.post.pop().expect("code layer is at least 1"))
    }

    pub fn loss(&self, batch: &DataMatrix) -> Result<LossParts> {
        self.check_width(batch.col_count())?;
        let t = self.trace(batch.view(), self.layers.len());
        let n = batch.row_count() as f64;
        let recon = recon_sum(&batch.view(), &t.post[t.post.len() - 1].view()) / n;
        let sparsity = self.config.lambda * penalty_sum(&t.post[self.config.code_layer() - 1].view()) / n;
        Ok(LossParts {
            total: recon + sparsity,
            recon,
            sparsity,
        })
    }

    /// Analytic gradient of [`AeModel::loss`] with respect to every parameter.
    pub fn gradients(&self, batch: &DataMatrix) -> Result<(LossParts, Gradients)> {
        self.check_width(batch.col_count())?;
        Ok(self.gradients_of(batch.view()))
    }

    pub(crate) fn gradients_of(&self, x: ArrayView2<f64>) -> (LossParts, Gradients) {
        let depth = self.layers.len();
        let code = self.config.code_layer();
        let lambda = self.config.lambda;
        let n = x.nrows() as f64;
        let t = self.trace(x, depth);

        let out = &t.post[depth - 1];
        let recon = recon_sum(&x, &out.view()) / n;
        let hidden = &t.post[code - 1];
        let sparsity = lambda * penalty_sum(&hidden.view()) / n;

        let mut upstream: Array2<f64> = (out - &x) / n;
        let mut gw = vec![Array2::zeros((0, 0)); depth];
        let mut gb = vec![Array1::zeros(0); depth];
        for l in (0..depth).rev() {
            if l + 1 == code && lambda > 0.0 {
                add_penalty_gradient(&mut upstream, &hidden.view(), lambda / n);
            }
            let act = self.config.activations[l];
            if act != Activation::Identity {
                Zip::from(&mut upstream)
                    .and(&t.pre[l])
                    .and(&t.post[l])
                    .for_each(|u, &z, &a| *u *= act.derivative(z, a));
            }
            let delta = upstream;
            let input = if l == 0 { x } else { t.post[l - 1].view() };
            gw[l] = delta.t().dot(&input);
            gb[l] = delta.sum_axis(Axis(0));
            upstream = if l > 0 {
                delta.dot(&self.layers[l].weights)
            } else {
                delta
            };
        }
        (
            LossParts {
                total: recon + sparsity,
                recon,
                sparsity,
            },
            Gradients {
                weights: gw,
                biases: gb,
            },
        )
    }
}

fn recon_sum(x: &ArrayView2<f64>, out: &ArrayView2<f64>) -> f64 {
    0.5 * Zip::from(x)
        .and(out)
        .fold(0.0, |acc, &a, &b| acc + (a - b) * (a - b))
}

/// Σ over rows of ‖y‖₁ / ‖y‖₂, skipping rows with a vanishing norm.
pub(crate) fn penalty_sum(y: &ArrayView2<f64>) -> f64 {
    y.rows()
        .into_iter()
        .map(|row| {
            let norm = row.dot(&row).sqrt();
            if norm < NORM_EPSILON {
                0.0
            } else {
                row.iter().map(|v| v.abs()).sum::<f64>() / norm
            }
        })
        .sum()
}

/// Adds `scale · ∂(‖y‖₁/‖y‖₂)/∂y = scale · (sign(y)/‖y‖ − ‖y‖₁·y/‖y‖³)`.
fn add_penalty_gradient(upstream: &mut Array2<f64>, y: &ArrayView2<f64>, scale: f64) {
    for (mut g, row) in upstream.rows_mut().into_iter().zip(y.rows()) {
        let norm = row.dot(&row).sqrt();
        if norm < NORM_EPSILON {
            continue;
        }
        let l1: f64 = row.iter().map(|v| v.abs()).sum();
        let cube = norm * norm * norm;
        Zip::from(&mut g).and(&row).for_each(|gi, &yi| {
            let sign = if yi > 0.0 {
                1.0
            } else if yi < 0.0 {
                -1.0
            } else {
                0.0
            };
            *gi += scale * (sign / norm - l1 * yi / cube);
        });
    }
}
