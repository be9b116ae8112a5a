//! Topological detection of latent block structure in weighted networks.
//!
//! Pipeline: a [`WeightedNetwork`] is turned into a cropped reciprocal
//! [`DistanceMatrix`], whose flag [`Filtration`] is reduced to a persistence
//! [`Barcode`]. Diagram features then drive a heuristic block-structure
//! classifier. Weighted Louvain and a variational weighted stochastic block
//! model serve as baselines.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod community;
pub mod crvr;
pub mod diagram;
pub mod error;
pub mod metrics;
pub mod netgen;
pub mod network;
pub mod persistence;
pub mod scalar;
pub mod seed;
pub mod wsbm;

pub use crvr::{build_flag_filtration, crvr_distance, DistanceMatrix, Filtration, Simplex};
pub use error::{Error, Result};
pub use network::WeightedNetwork;
pub use persistence::{compute_persistence, Barcode, Interval};
pub use scalar::Scalar;

pub type Network = WeightedNetwork<f64>;
pub type Distances = DistanceMatrix<f64>;
pub type FlagFiltration = Filtration<f64>;
pub type Bars = Barcode<f64>;

pub type Spec = netgen::BlockSpec<f64>;
pub type ErdosRenyi = netgen::ErSpec<f64>;
pub type Features = diagram::DiagramFeatures<f64>;
pub type WsbmFit = wsbm::WsbmFit<f64>;
pub type WsbmConfig = wsbm::WsbmConfig<f64>;
pub type Partition = community::Partition<f64>;

/// Single-precision network, mainly for memory-bound experiments.
pub type Network32 = WeightedNetwork<f32>;
