//! Graph data augmentation for graph classification.
//!
//! The main method crops a connected neighbourhood: pick an initial node
//! uniformly at random, score every node by diffusion connectivity to it
//! (personalized PageRank by default), and keep the top `ceil(rho * n)`
//! nodes with all edges between them. Uniform node sampling and uniform
//! edge dropping are provided as baselines.

pub mod augment;
pub mod cli;
pub mod dataset;
pub mod diffusion;
mod error;
pub mod generate;
pub mod graph;
pub mod verify;

pub use augment::{AugmentConfig, Augmenter, Method, RngStream};
pub use dataset::{Dataset, DatasetStats};
pub use diffusion::{ConnectivityScores, DiffusionConfig, Metric, Normalization};
pub use error::{Error, Result};
pub use graph::{CropResult, Graph, InducedSubgraph, Label, NodeId};
