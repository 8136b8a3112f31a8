//! Immutable undirected simple graphs and the structural queries cropping needs.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Dense 0-based node index.
pub type NodeId = usize;

/// Categorical label as stored in the TU files (graph labels and node labels).
pub type Label = i64;

/// Undirected simple graph with optional node labels, node attributes and a
/// graph label.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted lexicographically.
/// Adjacency lists are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<NodeId>>,
    node_labels: Option<Vec<Label>>,
    node_attributes: Option<Vec<Vec<f64>>>,
    graph_label: Option<Label>,
}

impl Graph {
    /// Builds a graph from unordered pairs. Duplicates (in either order) collapse
    /// to one edge; self-loops are dropped with a logged warning.
    pub fn from_edge_list(node_count: usize, pairs: &[(NodeId, NodeId)]) -> Result<Self> {
        let (graph, loops) = Self::from_edge_list_counting(node_count, pairs)?;
        if loops > 0 {
            log::warn!("dropped {loops} self-loop(s) while building a {node_count}-node graph");
        }
        Ok(graph)
    }

    /// Like [`Graph::from_edge_list`] but returns the number of self-loops
    /// dropped instead of logging it.
    pub fn from_edge_list_counting(
        node_count: usize,
        pairs: &[(NodeId, NodeId)],
    ) -> Result<(Self, usize)> {
        let mut edges = Vec::with_capacity(pairs.len());
        let mut loops = 0;
        for &(u, v) in pairs {
            if u >= node_count || v >= node_count {
                return Err(Error::Structure(format!(
                    "edge ({u}, {v}) references a node outside [0, {node_count})"
                )));
            }
            if u == v {
                loops += 1;
                continue;
            }
            edges.push(if u < v { (u, v) } else { (v, u) });
        }
        edges.sort_unstable();
        edges.dedup();
        Ok((Self::from_canonical_edges(node_count, edges), loops))
    }

    /// `edges` must already be sorted, deduplicated and oriented `u < v`.
    fn from_canonical_edges(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            node_count,
            edges,
            adjacency,
            node_labels: None,
            node_attributes: None,
            graph_label: None,
        }
    }

    pub fn with_node_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.node_count {
            return Err(Error::Structure(format!(
                "{} node labels for {} nodes",
                labels.len(),
                self.node_count
            )));
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    pub fn with_node_attributes(mut self, attributes: Vec<Vec<f64>>) -> Result<Self> {
        if attributes.len() != self.node_count {
            return Err(Error::Structure(format!(
                "{} attribute rows for {} nodes",
                attributes.len(),
                self.node_count
            )));
        }
        if let Some(first) = attributes.first() {
            let dim = first.len();
            if let Some(row) = attributes.iter().position(|a| a.len() != dim) {
                return Err(Error::Structure(format!(
                    "node {row} has {} attributes, expected {dim}",
                    attributes[row].len()
                )));
            }
        }
        self.node_attributes = Some(attributes);
        Ok(self)
    }

    pub fn with_graph_label(mut self, label: Option<Label>) -> Self {
        self.graph_label = label;
        self
    }

    /// Replaces node labels without a length check; callers guarantee the length.
    pub(crate) fn set_node_labels_unchecked(&mut self, labels: Option<Vec<Label>>) {
        debug_assert!(labels.as_ref().is_none_or(|l| l.len() == self.node_count));
        self.node_labels = labels;
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count && v < self.node_count && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn node_labels(&self) -> Option<&[Label]> {
        self.node_labels.as_deref()
    }

    pub fn node_attributes(&self) -> Option<&[Vec<f64>]> {
        self.node_attributes.as_deref()
    }

    pub fn graph_label(&self) -> Option<Label> {
        self.graph_label
    }

    pub(crate) fn check_node(&self, v: NodeId) -> Result<()> {
        if v >= self.node_count {
            return Err(Error::Usage(format!(
                "node {v} out of range for a graph with {} nodes",
                self.node_count
            )));
        }
        Ok(())
    }

    /// Subgraph induced by `keep` (strictly increasing, non-empty, valid ids).
    /// Kept nodes are renumbered `0..keep.len()` in order; labels, attributes
    /// and the graph label carry over.
    pub fn induced_subgraph(&self, keep: &[NodeId]) -> Result<InducedSubgraph> {
        if keep.is_empty() {
            return Err(Error::Usage(
                "cannot induce a subgraph on an empty node set".into(),
            ));
        }
        if let Some(w) = keep.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Usage(format!(
                "kept node ids must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        self.check_node(*keep.last().unwrap())?;

        let mut new_id = vec![usize::MAX; self.node_count];
        for (i, &old) in keep.iter().enumerate() {
            new_id[old] = i;
        }
        // Source edges are sorted and the renumbering is monotone, so the
        // filtered list is already canonical.
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v)| {
                let (a, b) = (new_id[u], new_id[v]);
                (a != usize::MAX && b != usize::MAX).then_some((a, b))
            })
            .collect();

        let mut subgraph = Graph::from_canonical_edges(keep.len(), edges);
        subgraph.node_labels = self
            .node_labels
            .as_ref()
            .map(|labels| keep.iter().map(|&v| labels[v]).collect());
        subgraph.node_attributes = self
            .node_attributes
            .as_ref()
            .map(|attrs| keep.iter().map(|&v| attrs[v].clone()).collect());
        subgraph.graph_label = self.graph_label;

        Ok(InducedSubgraph {
            kept_original_ids: keep.to_vec(),
            subgraph,
        })
    }

    /// Graph with the same nodes and labels but only the edges for which
    /// `keep_edge` returns true.
    pub(crate) fn retain_edges(&self, mut keep_edge: impl FnMut(NodeId, NodeId) -> bool) -> Graph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| keep_edge(u, v))
            .collect();
        let mut out = Graph::from_canonical_edges(self.node_count, edges);
        out.node_labels = self.node_labels.clone();
        out.node_attributes = self.node_attributes.clone();
        out.graph_label = self.graph_label;
        out
    }

    /// Sorted ids of the connected component containing `v`.
    pub fn connected_component_of(&self, v: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([v]);
        seen[v] = true;
        let mut out = Vec::new();
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for &w in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// BFS hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap() + 1;
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// True for the empty graph and for graphs with a single component.
    pub fn is_connected(&self) -> bool {
        self.node_count == 0 || self.connected_component_of(0).len() == self.node_count
    }
}

/// Result of [`Graph::induced_subgraph`]: the kept source ids and the
/// compacted subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedSubgraph {
    pub kept_original_ids: Vec<NodeId>,
    pub subgraph: Graph,
}

impl InducedSubgraph {
    /// Attaches the crop centre. `initial_node` must be one of the kept ids.
    pub fn centred_at(self, initial_node: NodeId) -> Result<CropResult> {
        if self.kept_original_ids.binary_search(&initial_node).is_err() {
            return Err(Error::Internal(format!(
                "initial node {initial_node} is not among the kept nodes"
            )));
        }
        Ok(CropResult {
            kept_original_ids: self.kept_original_ids,
            subgraph: self.subgraph,
            initial_node,
        })
    }
}

/// Outcome of a node-removing augmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct CropResult {
    /// Strictly increasing source ids of the kept nodes.
    pub kept_original_ids: Vec<NodeId>,
    /// Induced subgraph, node `i` corresponding to `kept_original_ids[i]`.
    pub subgraph: Graph,
    /// Source id of the node the crop was grown from.
    pub initial_node: NodeId,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_list(n, &pairs).unwrap()
    }

    #[test]
    fn duplicate_pairs_collapse() {
        let g = Graph::from_edge_list(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn empty_edge_set() {
        let g = Graph::from_edge_list(2, &[]).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn out_of_range_pair_is_named() {
        let err = Graph::from_edge_list(2, &[(0, 2)]).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
        assert!(err.to_string().contains("(0, 2)"));
    }

    #[test]
    fn self_loops_are_dropped_and_counted() {
        let (g, loops) = Graph::from_edge_list_counting(3, &[(0, 0), (0, 1), (2, 2)]).unwrap();
        assert_eq!(loops, 2);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(path(3).degrees(), vec![1, 2, 1]);
        assert_eq!(Graph::from_edge_list(2, &[]).unwrap().degrees(), vec![0, 0]);
        let cycle = Graph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(cycle.degrees(), vec![2, 2, 2, 2]);
    }

    #[test]
    fn induced_on_path_middle() {
        let r = path(4).induced_subgraph(&[1, 2]).unwrap();
        assert_eq!(r.kept_original_ids, vec![1, 2]);
        assert_eq!(r.subgraph.node_count(), 2);
        assert_eq!(r.subgraph.edges(), &[(0, 1)]);
    }

    #[test]
    fn induced_on_all_ids_is_identity() {
        let g = path(5)
            .with_node_labels(vec![3, 1, 4, 1, 5])
            .unwrap()
            .with_graph_label(Some(2));
        let r = g.induced_subgraph(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(r.subgraph, g);
    }

    #[test]
    fn induced_triangle_corner_pair() {
        let g = Graph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = g.induced_subgraph(&[0, 2]).unwrap();
        assert_eq!(r.subgraph.edges(), &[(0, 1)]);
    }

    #[test]
    fn induced_rejects_bad_keep_lists() {
        let g = path(4);
        assert!(matches!(g.induced_subgraph(&[]), Err(Error::Usage(_))));
        assert!(matches!(g.induced_subgraph(&[2, 1]), Err(Error::Usage(_))));
        assert!(matches!(g.induced_subgraph(&[1, 1]), Err(Error::Usage(_))));
        assert!(matches!(g.induced_subgraph(&[0, 4]), Err(Error::Usage(_))));
    }

    #[test]
    fn induced_carries_labels_and_attributes() {
        let g = path(3)
            .with_node_labels(vec![7, 8, 9])
            .unwrap()
            .with_node_attributes(vec![vec![0.5], vec![1.5], vec![2.5]])
            .unwrap()
            .with_graph_label(Some(-1));
        let r = g.induced_subgraph(&[0, 2]).unwrap();
        assert_eq!(r.subgraph.node_labels(), Some(&[7, 9][..]));
        assert_eq!(
            r.subgraph.node_attributes().unwrap(),
            &[vec![0.5], vec![2.5]]
        );
        assert_eq!(r.subgraph.graph_label(), Some(-1));
        assert_eq!(r.subgraph.edge_count(), 0);
    }

    #[test]
    fn component_examples() {
        let g = Graph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.connected_component_of(0), vec![0, 1]);
        assert_eq!(path(5).connected_component_of(3), vec![0, 1, 2, 3, 4]);
        let e = Graph::from_edge_list(3, &[]).unwrap();
        assert_eq!(e.connected_component_of(1), vec![1]);
    }

    #[test]
    fn attribute_dimension_mismatch() {
        let err = path(2)
            .with_node_attributes(vec![vec![1.0, 2.0], vec![1.0]])
            .unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
        assert!(path(2).with_node_labels(vec![1]).is_err());
    }

    #[test]
    fn centred_at_requires_membership() {
        let r = path(4).induced_subgraph(&[1, 2]).unwrap();
        assert!(r.clone().centred_at(0).is_err());
        assert_eq!(r.centred_at(2).unwrap().initial_node, 2);
    }
}
