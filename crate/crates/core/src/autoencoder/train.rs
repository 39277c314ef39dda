use ndarray::{Array1, Array2, Axis, Zip};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AeConfig, AeModel, Gradients, Optimizer};
use crate::error::{Error, Result};
use crate::spectral::DataMatrix;

/// First and second moment estimates for Adam, shaped like the parameters.
struct Moments {
    mw: Vec<Array2<f64>>,
    mb: Vec<Array1<f64>>,
    vw: Vec<Array2<f64>>,
    vb: Vec<Array1<f64>>,
    step: i32,
}

impl Moments {
    fn zeros(model: &AeModel) -> Self {
        let w: Vec<_> = model.layers().iter().map(|l| Array2::zeros(l.weights.dim())).collect();
        let b: Vec<_> = model.layers().iter().map(|l| Array1::zeros(l.biases.len())).collect();
        Moments {
            mw: w.clone(),
            mb: b.clone(),
            vw: w,
            vb: b,
            step: 0,
        }
    }
}

fn adam_update<D: ndarray::Dimension>(
    param: &mut ndarray::Array<f64, D>,
    grad: &ndarray::Array<f64, D>,
    m: &mut ndarray::Array<f64, D>,
    v: &mut ndarray::Array<f64, D>,
    (lr, beta1, beta2, eps, c1, c2): (f64, f64, f64, f64, f64, f64),
) {
    Zip::from(param).and(grad).and(m).and(v).for_each(|p, &g, m, v| {
        *m = beta1 * *m + (1.0 - beta1) * g;
        *v = beta2 * *v + (1.0 - beta2) * g * g;
        *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
    });
}

fn apply(model: &mut AeModel, grads: &Gradients, optimizer: Optimizer, lr: f64, state: &mut Moments) {
    match optimizer {
        Optimizer::Sgd => {
            for (layer, (gw, gb)) in model.layers_mut().iter_mut().zip(grads.weights.iter().zip(&grads.biases)) {
                layer.weights.scaled_add(-lr, gw);
                layer.biases.scaled_add(-lr, gb);
            }
        }
        Optimizer::Adam { beta1, beta2, epsilon } => {
            state.step += 1;
            let c1 = 1.0 - beta1.powi(state.step);
            let c2 = 1.0 - beta2.powi(state.step);
            let hyper = (lr, beta1, beta2, epsilon, c1, c2);
            for (l, layer) in model.layers_mut().iter_mut().enumerate() {
                adam_update(&mut layer.weights, &grads.weights[l], &mut state.mw[l], &mut state.vw[l], hyper);
                adam_update(&mut layer.biases, &grads.biases[l], &mut state.mb[l], &mut state.vb[l], hyper);
            }
        }
    }
}

/// Trains a fresh model on the rows of `data`.
///
/// One seeded generator drives both initialization and the per-epoch
/// shuffle, so equal configs and data give bit-identical models. Each
/// epoch's history entry is the sample-weighted mean of its batch losses.
pub fn train(config: &AeConfig, data: &DataMatrix) -> Result<AeModel> {
    config.validate()?;
    if data.col_count() != config.input_size() {
        return Err(Error::argument(format!(
            "config expects {} features, data has {}",
            config.input_size(),
            data.col_count()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = AeModel::init_with(config, &mut rng)?;
    let mut state = Moments::zeros(&model);
    let x = data.values();
    let n = data.row_count();
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut weighted = 0.0;
        for (step, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch = x.select(Axis(0), chunk);
            let (loss, grads) = model.gradients_of(batch.view());
            if !loss.total.is_finite() {
                return Err(Error::Divergence { epoch, step });
            }
            weighted += loss.total * chunk.len() as f64;
            apply(&mut model, &grads, config.optimizer, config.learning_rate, &mut state);
            if !model.is_finite() {
                return Err(Error::Divergence { epoch, step });
            }
        }
        model.push_history(weighted / n as f64);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::Activation;

    fn tiny(optimizer: Optimizer, lr: f64) -> AeConfig {
        AeConfig {
            layer_sizes: vec![4, 3, 2, 3, 4],
            activations: vec![Activation::Tanh, Activation::Identity, Activation::Tanh, Activation::Identity],
            lambda: 0.0,
            learning_rate: lr,
            epochs: 150,
            batch_size: 4,
            seed: 11,
            init_scale: 1.0,
            optimizer,
        }
    }

    fn line_data() -> DataMatrix {
        let rows: Vec<[f64; 4]> = (0..16)
            .map(|i| {
                let t = i as f64 / 8.0 - 1.0;
                [t, -t, 0.5 * t, 2.0 * t]
            })
            .collect();
        DataMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn loss_decreases() {
        for (opt, lr) in [(Optimizer::adam(), 0.01), (Optimizer::Sgd, 0.05)] {
            let m = train(&tiny(opt, lr), &line_data()).unwrap();
            let h = m.training_history();
            assert_eq!(h.len(), 150);
            assert!(h[h.len() - 1] < 0.5 * h[0], "{opt:?}: {} -> {}", h[0], h[h.len() - 1]);
        }
    }

    #[test]
    fn zero_epochs_returns_the_initial_model() {
        let mut c = tiny(Optimizer::adam(), 0.01);
        c.epochs = 0;
        let m = train(&c, &line_data()).unwrap();
        assert!(m.training_history().is_empty());
    }

    #[test]
    fn same_seed_same_model() {
        let c = tiny(Optimizer::adam(), 0.01);
        assert_eq!(train(&c, &line_data()).unwrap(), train(&c, &line_data()).unwrap());
    }

    #[test]
    fn huge_learning_rate_diverges() {
        let mut c = tiny(Optimizer::Sgd, 1e200);
        c.activations = vec![Activation::Identity; 4];
        assert!(matches!(train(&c, &line_data()), Err(Error::Divergence { .. })));
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let data = DataMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(train(&tiny(Optimizer::Sgd, 0.1), &data), Err(Error::Argument(_))));
    }
}
