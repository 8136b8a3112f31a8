//! Graph-classification datasets: TU text format, JSONL export, statistics.

mod jsonl;
mod tu;

use std::collections::BTreeMap;
use std::path::Path;

pub use jsonl::{read_jsonl, write_jsonl, JsonGraph};
pub use tu::{parse_tu, write_tu};

use crate::error::{Error, Result};
use crate::graph::{Graph, Label};

/// Ordered collection of graphs with their label vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    graphs: Vec<Graph>,
    label_set: Vec<Label>,
    /// Free-form provenance, e.g. the augmentation settings that produced it.
    pub metadata: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>) -> Self {
        let mut label_set: Vec<Label> = graphs.iter().filter_map(Graph::graph_label).collect();
        label_set.sort_unstable();
        label_set.dedup();
        Dataset {
            name: name.into(),
            graphs,
            label_set,
            metadata: BTreeMap::new(),
        }
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn into_graphs(self) -> Vec<Graph> {
        self.graphs
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Sorted distinct graph labels.
    pub fn label_set(&self) -> &[Label] {
        &self.label_set
    }

    /// Same graphs, labels and attributes, ignoring name and metadata.
    pub fn same_structure(&self, other: &Dataset) -> bool {
        self.graphs == other.graphs
    }

    pub fn stats(&self) -> Result<DatasetStats> {
        dataset_stats(self)
    }

    /// Loads a dataset from a TU directory, or from a `.jsonl` file when
    /// `source` points at one.
    pub fn load(source: &Path, name: &str) -> Result<Dataset> {
        if source.extension().is_some_and(|e| e == "jsonl") {
            read_jsonl(source, name)
        } else {
            parse_tu(source, name)
        }
    }
}

/// Per-dataset averages, computed in full precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub graph_count: usize,
    pub mean_nodes: f64,
    /// Mean number of undirected edges per graph.
    pub mean_edges: f64,
}

impl std::fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} graphs, {:.2} nodes, {:.2} edges",
            self.graph_count, self.mean_nodes, self.mean_edges
        )
    }
}

pub fn dataset_stats(d: &Dataset) -> Result<DatasetStats> {
    if d.is_empty() {
        return Err(Error::Usage(format!("dataset '{}' has no graphs", d.name)));
    }
    let count = d.len() as f64;
    let nodes: usize = d.graphs.iter().map(Graph::node_count).sum();
    let edges: usize = d.graphs.iter().map(Graph::edge_count).sum();
    Ok(DatasetStats {
        graph_count: d.len(),
        mean_nodes: nodes as f64 / count,
        mean_edges: edges as f64 / count,
    })
}

/// Published statistics of the standard benchmarks, keyed by every common
/// spelling of the dataset name.
pub fn reference_stats(name: &str) -> Option<DatasetStats> {
    let (graph_count, mean_nodes, mean_edges) = match name.to_ascii_uppercase().as_str() {
        "DD" | "D&D" => (1178, 284.32, 715.66),
        "ENZYMES" => (600, 32.63, 62.14),
        "NCI1" => (4110, 29.87, 32.30),
        "NCI109" => (4127, 29.68, 32.13),
        "PROTEINS" => (1113, 39.06, 72.82),
        "COLLAB" => (5000, 74.49, 2457.78),
        "IMDB-B" | "IMDB-BINARY" => (1000, 19.77, 96.53),
        "IMDB-M" | "IMDB-MULTI" => (1500, 13.00, 65.94),
        "REDDIT-B" | "REDDIT-BINARY" => (2000, 429.63, 497.75),
        "REDDIT-5K" | "REDDIT-MULTI-5K" => (4999, 508.52, 594.87),
        _ => return None,
    };
    Some(DatasetStats {
        graph_count,
        mean_nodes,
        mean_edges,
    })
}

impl DatasetStats {
    /// True when graph counts agree exactly and both means lie within 0.01 of
    /// the two-decimal reference figures.
    pub fn matches_reference(&self, reference: &DatasetStats) -> bool {
        const TOL: f64 = 0.01 + 1e-9;
        self.graph_count == reference.graph_count
            && (self.mean_nodes - reference.mean_nodes).abs() <= TOL
            && (self.mean_edges - reference.mean_edges).abs() <= TOL
    }
}

/// Uses node degrees as node labels. Graphs without node labels always get
/// them; graphs that already carry labels are overwritten only when
/// `overwrite_existing` is set.
pub fn synthesize_degree_labels(d: &Dataset, overwrite_existing: bool) -> Dataset {
    let mut out = d.clone();
    for g in &mut out.graphs {
        if g.node_labels().is_none() || overwrite_existing {
            let degrees = g.degrees().into_iter().map(|x| x as Label).collect();
            g.set_node_labels_unchecked(Some(degrees));
        }
    }
    out
}
