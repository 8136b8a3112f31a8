//! Node-connectivity scores relative to one initial node: personalized
//! PageRank (closed form and truncated series), heat-kernel diffusion, and
//! negated shortest-path distance.
//!
//! Both diffusions are weighted power series `S = sum_k theta_k M^k` over a
//! normalized adjacency operator `M`:
//!
//! * `RandomWalk`: `M = A D^-1`, column-stochastic on non-isolated columns;
//! * `Symmetric`: `M = D^-1/2 A D^-1/2`.
//!
//! Isolated nodes get zero rows and columns (pseudo-inverse of `D`).
//! PPR uses `theta_k = alpha (1 - alpha)^k`, whose sum has the closed form
//! `alpha (I - (1 - alpha) M)^-1`; heat uses Poisson weights
//! `theta_k = e^-t t^k / k!`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Largest graph for which PPR is computed by a dense inverse (and cached);
/// larger graphs use the per-column truncated series.
pub const DENSE_THRESHOLD: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Ppr,
    Heat,
    #[serde(rename = "sp")]
    ShortestPath,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Ppr => "ppr",
            Metric::Heat => "heat",
            Metric::ShortestPath => "sp",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ppr" => Ok(Metric::Ppr),
            "heat" => Ok(Metric::Heat),
            "sp" => Ok(Metric::ShortestPath),
            other => Err(Error::Config(format!(
                "unknown metric '{other}' (ppr, heat, sp)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `D^-1/2 A D^-1/2`
    Symmetric,
    /// `A D^-1`
    RandomWalk,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::Symmetric => "sym",
            Normalization::RandomWalk => "rw",
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sym" | "symmetric" => Ok(Normalization::Symmetric),
            "rw" | "randomwalk" | "random-walk" => Ok(Normalization::RandomWalk),
            other => Err(Error::Config(format!(
                "unknown normalization '{other}' (sym, rw)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionConfig {
    pub metric: Metric,
    /// Teleport probability, PPR only.
    pub alpha: f64,
    /// Diffusion time, heat only.
    pub t: f64,
    /// Maximum power of `M` in truncated series.
    pub series_depth: usize,
    pub normalization: Normalization,
    /// Iterative PPR stops once a series term's max-norm drops below this.
    pub residual_tol: f64,
}

impl DiffusionConfig {
    pub const DEFAULT_ALPHA: f64 = 0.15;
    pub const DEFAULT_T: f64 = 5.0;
    pub const DEFAULT_DEPTH: usize = 64;
    pub const DEFAULT_TOL: f64 = 1e-6;

    /// PPR with symmetric normalization.
    pub fn ppr(alpha: f64) -> Self {
        DiffusionConfig {
            metric: Metric::Ppr,
            alpha,
            t: Self::DEFAULT_T,
            series_depth: Self::DEFAULT_DEPTH,
            normalization: Normalization::Symmetric,
            residual_tol: Self::DEFAULT_TOL,
        }
    }

    /// Heat kernel with random-walk normalization.
    pub fn heat(t: f64) -> Self {
        DiffusionConfig {
            metric: Metric::Heat,
            t,
            normalization: Normalization::RandomWalk,
            ..Self::ppr(Self::DEFAULT_ALPHA)
        }
    }

    pub fn shortest_path() -> Self {
        DiffusionConfig {
            metric: Metric::ShortestPath,
            ..Self::ppr(Self::DEFAULT_ALPHA)
        }
    }

    /// Default settings for `metric`, including its default normalization.
    pub fn for_metric(metric: Metric) -> Self {
        match metric {
            Metric::Ppr => Self::ppr(Self::DEFAULT_ALPHA),
            Metric::Heat => Self::heat(Self::DEFAULT_T),
            Metric::ShortestPath => Self::shortest_path(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha must be in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Config(format!(
                "t must be positive and finite, got {}",
                self.t
            )));
        }
        if self.series_depth == 0 {
            return Err(Error::Config("series depth must be at least 1".into()));
        }
        if self.residual_tol.is_nan() || self.residual_tol <= 0.0 {
            return Err(Error::Config(format!(
                "residual tolerance must be positive, got {}",
                self.residual_tol
            )));
        }
        Ok(())
    }
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self::ppr(Self::DEFAULT_ALPHA)
    }
}

/// Column `initial_node` of a diffusion matrix, or negated BFS distances.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityScores {
    pub initial_node: NodeId,
    pub metric: Metric,
    /// `scores[u]` is the connectivity of `u` to the initial node. Higher is
    /// more connected. Shortest-path scores use `-inf` for unreachable nodes.
    pub scores: Vec<f64>,
}

/// Normalized adjacency in compressed-row form.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    row_offsets: Vec<usize>,
    columns: Vec<NodeId>,
    weights: Vec<f64>,
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.row_offsets.len() - 1
    }

    /// `y = M x`
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let range = self.row_offsets[i]..self.row_offsets[i + 1];
            *yi = self.columns[range.clone()]
                .iter()
                .zip(&self.weights[range])
                .map(|(&j, &w)| w * x[j])
                .sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                m[(i, self.columns[k])] = self.weights[k];
            }
        }
        m
    }
}

pub fn normalized_operator(g: &Graph, normalization: Normalization) -> SparseOperator {
    let degrees = g.degrees();
    let n = g.node_count();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut columns = Vec::with_capacity(2 * g.edge_count());
    let mut weights = Vec::with_capacity(2 * g.edge_count());
    row_offsets.push(0);
    for i in 0..n {
        for &j in g.neighbors(i) {
            columns.push(j);
            weights.push(match normalization {
                Normalization::RandomWalk => 1.0 / degrees[j] as f64,
                Normalization::Symmetric => 1.0 / (degrees[i] as f64 * degrees[j] as f64).sqrt(),
            });
        }
        row_offsets.push(columns.len());
    }
    SparseOperator {
        row_offsets,
        columns,
        weights,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "alpha must be in (0, 1], got {alpha}"
        )))
    }
}

/// `alpha (I - (1 - alpha) M)^-1` by dense LU.
pub fn ppr_closed_form(
    g: &Graph,
    alpha: f64,
    normalization: Normalization,
) -> Result<DMatrix<f64>> {
    check_alpha(alpha)?;
    let n = g.node_count();
    let system =
        DMatrix::identity(n, n) - normalized_operator(g, normalization).to_dense() * (1.0 - alpha);
    let mut inverse = system
        .lu()
        .solve(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::Internal(format!("PPR system singular for alpha = {alpha}")))?;
    inverse *= alpha;
    if inverse.iter().any(|x| !x.is_finite()) {
        return Err(Error::Internal("non-finite entry in PPR inverse".into()));
    }
    Ok(inverse)
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Column `v` of the PPR matrix by accumulating `alpha (1 - alpha)^k M^k e_v`
/// until a term's max-norm falls below `residual_tol` or `k` reaches
/// `max_depth`.
pub fn ppr_column_iterative(
    g: &Graph,
    v: NodeId,
    alpha: f64,
    normalization: Normalization,
    residual_tol: f64,
    max_depth: usize,
) -> Result<ConnectivityScores> {
    g.check_node(v)?;
    check_alpha(alpha)?;
    let op = normalized_operator(g, normalization);
    let n = g.node_count();
    let mut walk = vec![0.0; n];
    walk[v] = 1.0;
    let mut next = vec![0.0; n];
    let mut coeff = alpha;
    let mut scores: Vec<f64> = walk.iter().map(|x| coeff * x).collect();
    let mut term_norm = coeff;
    let mut k = 0;
    while term_norm >= residual_tol && k < max_depth {
        k += 1;
        op.apply(&walk, &mut next);
        std::mem::swap(&mut walk, &mut next);
        coeff *= 1.0 - alpha;
        for (s, w) in scores.iter_mut().zip(&walk) {
            *s += coeff * w;
        }
        term_norm = coeff * max_abs(&walk);
    }
    Ok(ConnectivityScores {
        initial_node: v,
        metric: Metric::Ppr,
        scores,
    })
}

/// `sum_{k=0..=depth} e^-t t^k / k! M^k e_v`
pub fn heat_scores(
    g: &Graph,
    v: NodeId,
    t: f64,
    depth: usize,
    normalization: Normalization,
) -> Result<ConnectivityScores> {
    g.check_node(v)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!(
            "t must be positive and finite, got {t}"
        )));
    }
    let op = normalized_operator(g, normalization);
    let n = g.node_count();
    let mut walk = vec![0.0; n];
    walk[v] = 1.0;
    let mut next = vec![0.0; n];
    let mut coeff = (-t).exp();
    let mut scores: Vec<f64> = walk.iter().map(|x| coeff * x).collect();
    for k in 1..=depth {
        op.apply(&walk, &mut next);
        std::mem::swap(&mut walk, &mut next);
        coeff *= t / k as f64;
        for (s, w) in scores.iter_mut().zip(&walk) {
            *s += coeff * w;
        }
    }
    Ok(ConnectivityScores {
        initial_node: v,
        metric: Metric::Heat,
        scores,
    })
}

/// Negated BFS distance to `v`; unreachable nodes score `-inf`.
pub fn shortest_path_scores(g: &Graph, v: NodeId) -> Result<ConnectivityScores> {
    g.check_node(v)?;
    let scores = g
        .bfs_distances(v)
        .into_iter()
        .map(|d| d.map_or(f64::NEG_INFINITY, |d| -(d as f64)))
        .collect();
    Ok(ConnectivityScores {
        initial_node: v,
        metric: Metric::ShortestPath,
        scores,
    })
}

fn column(m: &DMatrix<f64>, v: NodeId) -> Vec<f64> {
    m.column(v).iter().copied().collect()
}

fn diffusion_matrix(g: &Graph, cfg: &DiffusionConfig) -> Result<DMatrix<f64>> {
    match cfg.metric {
        Metric::Ppr => ppr_closed_form(g, cfg.alpha, cfg.normalization),
        Metric::Heat => {
            let n = g.node_count();
            let mut m = DMatrix::zeros(n, n);
            for v in 0..n {
                let col = heat_scores(g, v, cfg.t, cfg.series_depth, cfg.normalization)?;
                m.set_column(v, &nalgebra::DVector::from_vec(col.scores));
            }
            Ok(m)
        }
        Metric::ShortestPath => Err(Error::Internal(
            "shortest-path scores are not a diffusion matrix".into(),
        )),
    }
}

/// Scores of every node relative to `v` under `cfg`, without caching.
///
/// PPR on graphs up to [`DENSE_THRESHOLD`] nodes reads the column of the
/// dense closed form; larger graphs use the truncated series.
pub fn connectivity_scores(
    g: &Graph,
    v: NodeId,
    cfg: &DiffusionConfig,
) -> Result<ConnectivityScores> {
    g.check_node(v)?;
    cfg.validate()?;
    match cfg.metric {
        Metric::Ppr if g.node_count() <= DENSE_THRESHOLD => Ok(ConnectivityScores {
            initial_node: v,
            metric: Metric::Ppr,
            scores: column(&ppr_closed_form(g, cfg.alpha, cfg.normalization)?, v),
        }),
        Metric::Ppr => ppr_column_iterative(
            g,
            v,
            cfg.alpha,
            cfg.normalization,
            cfg.residual_tol,
            cfg.series_depth,
        ),
        Metric::Heat => heat_scores(g, v, cfg.t, cfg.series_depth, cfg.normalization),
        Metric::ShortestPath => shortest_path_scores(g, v),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    graph_index: usize,
    metric: Metric,
    normalization: Normalization,
    alpha_bits: u64,
    t_bits: u64,
    series_depth: usize,
}

impl CacheKey {
    fn new(graph_index: usize, cfg: &DiffusionConfig) -> Self {
        CacheKey {
            graph_index,
            metric: cfg.metric,
            normalization: cfg.normalization,
            alpha_bits: cfg.alpha.to_bits(),
            t_bits: cfg.t.to_bits(),
            series_depth: cfg.series_depth,
        }
    }
}

/// Full diffusion matrices per graph, for graphs up to [`DENSE_THRESHOLD`]
/// nodes. Safe to share between threads; results are identical to
/// [`connectivity_scores`] whether or not an entry is cached.
#[derive(Debug)]
pub struct DiffusionCache {
    entries: RwLock<HashMap<CacheKey, Arc<DMatrix<f64>>>>,
    budget_bytes: usize,
    used_bytes: std::sync::atomic::AtomicUsize,
}

impl Default for DiffusionCache {
    fn default() -> Self {
        Self::with_budget(1 << 30)
    }
}

impl DiffusionCache {
    /// A cache that stops admitting matrices once `budget_bytes` are held.
    pub fn with_budget(budget_bytes: usize) -> Self {
        DiffusionCache {
            entries: RwLock::new(HashMap::new()),
            budget_bytes,
            used_bytes: Default::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Like [`connectivity_scores`], reading `graph_index`'s matrix from the
    /// cache or populating it.
    pub fn scores(
        &self,
        graph_index: usize,
        g: &Graph,
        v: NodeId,
        cfg: &DiffusionConfig,
    ) -> Result<ConnectivityScores> {
        use std::sync::atomic::Ordering;

        let cacheable = cfg.metric != Metric::ShortestPath && g.node_count() <= DENSE_THRESHOLD;
        if !cacheable {
            return connectivity_scores(g, v, cfg);
        }
        g.check_node(v)?;
        cfg.validate()?;
        let key = CacheKey::new(graph_index, cfg);
        if let Some(m) = self.entries.read().unwrap().get(&key) {
            return Ok(ConnectivityScores {
                initial_node: v,
                metric: cfg.metric,
                scores: column(m, v),
            });
        }

        let m = diffusion_matrix(g, cfg)?;
        let scores = column(&m, v);
        let bytes = m.len() * std::mem::size_of::<f64>();
        if self.used_bytes.load(Ordering::Relaxed) + bytes <= self.budget_bytes {
            let mut entries = self.entries.write().unwrap();
            if let std::collections::hash_map::Entry::Vacant(slot) = entries.entry(key) {
                self.used_bytes.fetch_add(bytes, Ordering::Relaxed);
                slot.insert(Arc::new(m));
            }
        }
        Ok(ConnectivityScores {
            initial_node: v,
            metric: cfg.metric,
            scores,
        })
    }
}
