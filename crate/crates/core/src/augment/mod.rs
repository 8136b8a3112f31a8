//! Graph augmentations: diffusion-guided cropping, uniform node sampling and
//! uniform edge dropping, plus the per-graph, per-epoch application policy.

mod rng;

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use rng::{hash64, RngStream};

use crate::dataset::Dataset;
use crate::diffusion::{ConnectivityScores, DiffusionCache, DiffusionConfig};
use crate::error::{Error, Result};
use crate::graph::{CropResult, Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    GraphCrop,
    UniNode,
    DropEdge,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::GraphCrop => "graphcrop",
            Method::UniNode => "uninode",
            Method::DropEdge => "dropedge",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "graphcrop" => Ok(Method::GraphCrop),
            "uninode" => Ok(Method::UniNode),
            "dropedge" => Ok(Method::DropEdge),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (graphcrop, uninode, dropedge)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    /// Probability of augmenting a graph in a given epoch.
    pub p: f64,
    /// Fraction of nodes kept by node-removing methods.
    pub rho: f64,
    pub method: Method,
    /// Per-edge removal probability for DropEdge.
    pub drop_rate: f64,
    pub diffusion: DiffusionConfig,
    /// Restrict crop candidates to the initial node's connected component.
    pub enforce_component: bool,
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            p: 0.5,
            rho: 0.7,
            method: Method::GraphCrop,
            drop_rate: 0.3,
            diffusion: DiffusionConfig::default(),
            enforce_component: true,
            seed: 0,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Config(format!(
                "p must be in [0, 1], got {}",
                self.p
            )));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::Config(format!(
                "rho must be in (0, 1], got {}",
                self.rho
            )));
        }
        if !(0.0..1.0).contains(&self.drop_rate) {
            return Err(Error::Config(format!(
                "drop rate must be in [0, 1), got {}",
                self.drop_rate
            )));
        }
        self.diffusion.validate()
    }
}

/// `ceil(rho * n)`, clamped to `[1, n]` for non-empty graphs.
///
/// Products within a relative 1e-9 of an integer count as that integer, so
/// `0.7 * 10` is 7 rather than 8.
pub fn crop_size(node_count: usize, rho: f64) -> usize {
    if node_count == 0 {
        return 0;
    }
    let x = rho * node_count as f64;
    let nearest = x.round();
    let m = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    (m as usize).clamp(1, node_count)
}

/// Keeps `initial_node` plus the best-scoring candidates up to
/// `crop_size(n, rho)` nodes, ranking by descending score and then ascending
/// id.
pub fn select_crop(
    g: &Graph,
    initial_node: NodeId,
    rho: f64,
    enforce_component: bool,
    scores: &ConnectivityScores,
) -> Result<CropResult> {
    g.check_node(initial_node)?;
    if scores.scores.len() != g.node_count() {
        return Err(Error::Usage(format!(
            "{} scores for {} nodes",
            scores.scores.len(),
            g.node_count()
        )));
    }
    let mut candidates: Vec<NodeId> = if enforce_component {
        g.connected_component_of(initial_node)
    } else {
        (0..g.node_count()).collect()
    };
    let size = crop_size(g.node_count(), rho).min(candidates.len());

    candidates.retain(|&u| u != initial_node);
    let s = &scores.scores;
    candidates.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));

    let mut keep = Vec::with_capacity(size);
    keep.push(initial_node);
    keep.extend_from_slice(&candidates[..size - 1]);
    keep.sort_unstable();
    g.induced_subgraph(&keep)?.centred_at(initial_node)
}

/// Crops around a uniformly drawn initial node. Scores come from `cache`
/// (keyed by `graph_index`) when given.
pub fn graph_crop_cached<R: Rng + ?Sized>(
    g: &Graph,
    graph_index: usize,
    cfg: &AugmentConfig,
    rng: &mut R,
    cache: Option<&DiffusionCache>,
) -> Result<CropResult> {
    if g.node_count() == 0 {
        return Err(Error::Usage("cannot crop a graph with no nodes".into()));
    }
    cfg.validate()?;
    let v = rng.random_range(0..g.node_count());
    graph_crop_at(g, graph_index, v, cfg, cache)
}

/// Crop with the initial node fixed to `v`.
pub fn graph_crop_at(
    g: &Graph,
    graph_index: usize,
    v: NodeId,
    cfg: &AugmentConfig,
    cache: Option<&DiffusionCache>,
) -> Result<CropResult> {
    g.check_node(v)?;
    cfg.validate()?;
    let scores = match cache {
        Some(cache) => cache.scores(graph_index, g, v, &cfg.diffusion)?,
        None => crate::diffusion::connectivity_scores(g, v, &cfg.diffusion)?,
    };
    select_crop(g, v, cfg.rho, cfg.enforce_component, &scores)
}

pub fn graph_crop<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &AugmentConfig,
    rng: &mut R,
) -> Result<CropResult> {
    graph_crop_cached(g, 0, cfg, rng, None)
}

/// Keeps a uniformly random subset of `crop_size(n, rho)` nodes. The first
/// node drawn is reported as the initial node.
pub fn uni_node<R: Rng + ?Sized>(g: &Graph, rho: f64, rng: &mut R) -> Result<CropResult> {
    if g.node_count() == 0 {
        return Err(Error::Usage(
            "cannot sample nodes from an empty graph".into(),
        ));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Config(format!("rho must be in (0, 1], got {rho}")));
    }
    let size = crop_size(g.node_count(), rho);
    let drawn = index::sample(rng, g.node_count(), size).into_vec();
    let first = drawn[0];
    let mut keep = drawn;
    keep.sort_unstable();
    g.induced_subgraph(&keep)?.centred_at(first)
}

/// Removes each edge independently with probability `drop_rate`.
pub fn drop_edge<R: Rng + ?Sized>(g: &Graph, drop_rate: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..1.0).contains(&drop_rate) {
        return Err(Error::Config(format!(
            "drop rate must be in [0, 1), got {drop_rate}"
        )));
    }
    Ok(g.retain_edges(|_, _| rng.random::<f64>() >= drop_rate))
}

/// What the policy did to one graph in one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyOutcome {
    pub graph: Graph,
    pub augmented: bool,
    /// Kept nodes over source nodes (1 when not augmented or for DropEdge).
    pub node_ratio: f64,
    /// Kept edges over source edges (1 for edgeless sources).
    pub edge_ratio: f64,
}

/// Stateful form of the policy that shares a diffusion cache across calls.
#[derive(Debug)]
pub struct Augmenter {
    cfg: AugmentConfig,
    cache: DiffusionCache,
}

impl Augmenter {
    pub fn new(cfg: AugmentConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Augmenter {
            cfg,
            cache: DiffusionCache::default(),
        })
    }

    pub fn config(&self) -> &AugmentConfig {
        &self.cfg
    }

    /// Applies the configured method with probability `p`, drawing from the
    /// `(seed, graph_index, epoch)` stream.
    pub fn apply(&self, g: &Graph, graph_index: usize, epoch: usize) -> Result<PolicyOutcome> {
        policy(g, graph_index, epoch, &self.cfg, Some(&self.cache))
    }

    /// Epoch-major augmentation of every graph. Parallel over
    /// `(epoch, graph)` pairs on the current rayon pool; output order and
    /// content do not depend on the pool size.
    pub fn augment_dataset(&self, d: &Dataset, epochs: usize) -> Result<AugmentedDataset> {
        if epochs == 0 {
            return Err(Error::Usage("epochs must be at least 1".into()));
        }
        let n = d.len();
        let outcomes: Vec<PolicyOutcome> = (0..epochs * n)
            .into_par_iter()
            .map(|i| self.apply(&d.graphs()[i % n], i % n, i / n))
            .collect::<Result<_>>()?;

        let augmented: Vec<&PolicyOutcome> = outcomes.iter().filter(|o| o.augmented).collect();
        let mean = |f: fn(&PolicyOutcome) -> f64| {
            if augmented.is_empty() {
                1.0
            } else {
                augmented.iter().map(|o| f(o)).sum::<f64>() / augmented.len() as f64
            }
        };
        let summary = AugmentSummary {
            graphs_in: n,
            graphs_out: outcomes.len(),
            augmented: augmented.len(),
            mean_node_ratio: mean(|o| o.node_ratio),
            mean_edge_ratio: mean(|o| o.edge_ratio),
        };

        let mut dataset = Dataset::new(
            d.name.clone(),
            outcomes.into_iter().map(|o| o.graph).collect(),
        );
        dataset.metadata = d.metadata.clone();
        dataset.metadata.insert(
            "augment.config".into(),
            serde_json::to_string(&self.cfg).expect("config serializes"),
        );
        dataset
            .metadata
            .insert("augment.seed".into(), self.cfg.seed.to_string());
        dataset
            .metadata
            .insert("augment.epochs".into(), epochs.to_string());
        dataset
            .metadata
            .insert("augment.source_graphs".into(), n.to_string());
        Ok(AugmentedDataset { dataset, summary })
    }
}

fn policy(
    g: &Graph,
    graph_index: usize,
    epoch: usize,
    cfg: &AugmentConfig,
    cache: Option<&DiffusionCache>,
) -> Result<PolicyOutcome> {
    let mut rng = RngStream::new(cfg.seed, graph_index as u64, epoch as u64);
    let unchanged = || PolicyOutcome {
        graph: g.clone(),
        augmented: false,
        node_ratio: 1.0,
        edge_ratio: 1.0,
    };
    if rng.random::<f64>() >= cfg.p || g.node_count() == 0 {
        return Ok(unchanged());
    }
    let graph = match cfg.method {
        Method::GraphCrop => graph_crop_cached(g, graph_index, cfg, &mut rng, cache)?.subgraph,
        Method::UniNode => uni_node(g, cfg.rho, &mut rng)?.subgraph,
        Method::DropEdge => drop_edge(g, cfg.drop_rate, &mut rng)?,
    };
    let edge_ratio = if g.edge_count() == 0 {
        1.0
    } else {
        graph.edge_count() as f64 / g.edge_count() as f64
    };
    Ok(PolicyOutcome {
        node_ratio: graph.node_count() as f64 / g.node_count() as f64,
        edge_ratio,
        graph,
        augmented: true,
    })
}

/// Policy outcome for one graph and epoch, without a shared cache.
pub fn apply_policy_detailed(
    g: &Graph,
    graph_index: usize,
    epoch: usize,
    cfg: &AugmentConfig,
) -> Result<PolicyOutcome> {
    cfg.validate()?;
    policy(g, graph_index, epoch, cfg, None)
}

pub fn apply_policy(
    g: &Graph,
    graph_index: usize,
    epoch: usize,
    cfg: &AugmentConfig,
) -> Result<Graph> {
    apply_policy_detailed(g, graph_index, epoch, cfg).map(|o| o.graph)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentSummary {
    pub graphs_in: usize,
    pub graphs_out: usize,
    pub augmented: usize,
    /// Mean kept-node fraction over augmented graphs.
    pub mean_node_ratio: f64,
    /// Mean kept-edge fraction over augmented graphs.
    pub mean_edge_ratio: f64,
}

impl AugmentSummary {
    pub fn augmented_fraction(&self) -> f64 {
        if self.graphs_out == 0 {
            0.0
        } else {
            self.augmented as f64 / self.graphs_out as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct AugmentedDataset {
    pub dataset: Dataset,
    pub summary: AugmentSummary,
}

pub fn augment_dataset(
    d: &Dataset,
    cfg: &AugmentConfig,
    epochs: usize,
) -> Result<AugmentedDataset> {
    Augmenter::new(*cfg)?.augment_dataset(d, epochs)
}
