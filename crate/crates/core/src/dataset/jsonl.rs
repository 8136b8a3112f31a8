//! One JSON object per graph per line:
//! `{"id":0,"label":1,"n":3,"edges":[[0,1],[0,2],[1,2]]}` with optional
//! `node_labels` and `node_attributes` arrays.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::graph::{Graph, Label, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonGraph {
    pub id: usize,
    pub label: Option<Label>,
    pub n: usize,
    /// `[u, v]` with `u < v`, lexicographically sorted.
    pub edges: Vec<[NodeId; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_labels: Option<Vec<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_attributes: Option<Vec<Vec<f64>>>,
}

impl JsonGraph {
    pub fn from_graph(id: usize, g: &Graph) -> Self {
        JsonGraph {
            id,
            label: g.graph_label(),
            n: g.node_count(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            node_labels: g.node_labels().map(<[Label]>::to_vec),
            node_attributes: g.node_attributes().map(<[Vec<f64>]>::to_vec),
        }
    }

    pub fn into_graph(self) -> Result<Graph> {
        let pairs: Vec<_> = self.edges.iter().map(|&[u, v]| (u, v)).collect();
        let mut g = Graph::from_edge_list(self.n, &pairs)?.with_graph_label(self.label);
        if let Some(labels) = self.node_labels {
            g = g.with_node_labels(labels)?;
        }
        if let Some(attrs) = self.node_attributes {
            g = g.with_node_attributes(attrs)?;
        }
        Ok(g)
    }
}

pub fn write_jsonl(d: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (id, g) in d.graphs().iter().enumerate() {
        let record = JsonGraph::from_graph(id, g);
        serde_json::to_writer(&mut out, &record)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads records written by [`write_jsonl`]. Records must appear in id order.
pub fn read_jsonl(path: &Path, name: &str) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut graphs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonGraph = serde_json::from_str(line).map_err(|source| Error::Json {
            line: i + 1,
            source,
        })?;
        if record.id != graphs.len() {
            return Err(Error::parse(
                path,
                i + 1,
                format!(
                    "record id {} out of order, expected {}",
                    record.id,
                    graphs.len()
                ),
            ));
        }
        graphs.push(record.into_graph()?);
    }
    Ok(Dataset::new(name, graphs))
}
