//! Synthetic graphs for the verification suites and tests.

use rand::Rng;

use crate::graph::{Graph, NodeId};

pub fn path(n: usize) -> Graph {
    let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edge_list(n, &pairs).expect("path edges are in range")
}

pub fn cycle(n: usize) -> Graph {
    let mut pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n > 2 {
        pairs.push((n - 1, 0));
    }
    Graph::from_edge_list(n, &pairs).expect("cycle edges are in range")
}

pub fn complete(n: usize) -> Graph {
    let pairs: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::from_edge_list(n, &pairs).expect("complete-graph edges are in range")
}

/// G(n, p): every unordered pair independently present with probability `p`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    Graph::from_edge_list(n, &pairs).expect("generated edges are in range")
}

/// G(n, p) overlaid with a random spanning tree, so the result is connected.
pub fn connected_random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut pairs: Vec<(NodeId, NodeId)> = erdos_renyi(n, p, rng).edges().to_vec();
    // Random recursive tree on a shuffled order.
    let mut order: Vec<NodeId> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        pairs.push((parent, order[i]));
    }
    Graph::from_edge_list(n, &pairs).expect("generated edges are in range")
}
