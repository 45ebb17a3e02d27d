//! Temporal link prediction by spectral evolution.
//!
//! A growing network is cut into cumulative adjacency snapshots. The
//! eigenvectors of the latest snapshot are treated as fixed, and only the
//! eigenvalues are modelled over time. Forecasting the next spectrum and
//! recombining it with the current eigenvectors yields link scores.

pub mod diagnostics;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod kernels;
pub mod scores;
pub mod spectral;
pub mod synthetic;
pub mod trajectory;

pub use error::{Error, ErrorKind, Result};
pub use graph::{SnapshotSequence, TemporalEdge, TemporalGraph};
pub use kernels::{Alpha, SpectralTransform};
pub use scores::PredictionScores;
pub use spectral::{SpectralDecomposition, SymmetricMatrix};
pub use trajectory::{ForecastMethod, ForecastOptions, SpectrumForecast, UnselectedPolicy};
