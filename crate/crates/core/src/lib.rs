//! Intrinsic dimension estimation.
//!
//! Three routes produce a descending [`Spectrum`]:
//!
//! - [`pca`]: singular values of the data matrix,
//! - [`isomap`]: singular values of the geodesic-MDS embedding,
//! - [`autoencoder`] + [`svp`]: singular value proxies built from the
//!   innermost hidden layer of a sparsity-regularized autoencoder.
//!
//! The [`dimension`] rules then turn any spectrum into an integer estimate.

pub mod autoencoder;
pub mod data;
pub mod dimension;
pub mod error;
pub mod isomap;
pub mod pca;
pub mod spectral;
pub mod svp;

pub use dimension::{dim_cumulative, dim_gte, estimate_all, DimensionEstimate, Rule, Share};
pub use error::{Error, Result};
pub use spectral::{DataMatrix, SvdResult};
pub use svp::{to_svp, Source, Spectrum};
