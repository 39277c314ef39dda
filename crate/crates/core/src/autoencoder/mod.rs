//! Fully connected autoencoder with an L1 penalty on the L2-normalized
//! innermost hidden layer.
//!
//! Per sample the objective is
//!
//! ```text
//! ½‖x − x̂‖² + λ · Σᵢ |yᵢ| / ‖y‖₂
//! ```
//!
//! averaged over the batch, where `y` is the (identity-activated) innermost
//! hidden layer. Gradients flow through the normalization.

mod activation;
mod codec;
mod config;
mod model;
mod train;

pub use activation::Activation;
pub use config::{AeConfig, Optimizer};
pub use model::{AeModel, Gradients, HiddenBatch, Layer, LossParts};
pub use train::train;

/// Below this hidden-vector norm the sparsity term and its gradient are zero.
pub const NORM_EPSILON: f64 = 1e-12;
