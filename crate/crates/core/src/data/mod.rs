//! Dataset ingestion and generation.

mod idx;
mod mnist;
mod prices;
mod synth;
mod window;

pub use idx::{decode_idx_images, decode_idx_labels, encode_idx_images, encode_idx_labels, read_maybe_gz, IdxImages};
pub use mnist::{load_mnist_idx, MnistSet, MNIST_PIXELS};
pub use prices::{load_prices_csv, parse_prices_csv, write_prices_csv, ReturnsPanel};
pub use synth::{regime_price_panel, synth_factor_panel, Regime, SynthPrices};
pub use window::{sliding_windows, window_count, WindowSpec};
