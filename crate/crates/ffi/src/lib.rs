//! C ABI over the `graphcrop` library.
//!
//! Graphs, datasets and crop results cross the boundary as opaque handles
//! owned by the caller and released with the matching `*_free` function.
//! Every fallible call returns a [`GcStatus`]; the message for the most
//! recent failure on the calling thread is available from
//! [`gc_last_error_message`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use graphcrop::augment::{self, AugmentConfig, Augmenter, Method, RngStream};
use graphcrop::dataset::{self, Dataset};
use graphcrop::diffusion::{self, DiffusionConfig, Metric, Normalization};
use graphcrop::{CropResult, Error, Graph};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    NullPointer = 1,
    Usage = 2,
    Config = 3,
    Parse = 4,
    Io = 5,
    Structure = 6,
    BufferTooSmall = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcMetric {
    Ppr = 0,
    Heat = 1,
    ShortestPath = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcNormalization {
    Symmetric = 0,
    RandomWalk = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcMethod {
    GraphCrop = 0,
    UniNode = 1,
    DropEdge = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcDiffusionConfig {
    pub metric: GcMetric,
    pub alpha: f64,
    pub t: f64,
    pub series_depth: usize,
    pub normalization: GcNormalization,
    pub residual_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcAugmentConfig {
    pub p: f64,
    pub rho: f64,
    pub method: GcMethod,
    pub drop_rate: f64,
    pub diffusion: GcDiffusionConfig,
    pub enforce_component: bool,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GcDatasetStats {
    pub graph_count: usize,
    pub mean_nodes: f64,
    pub mean_edges: f64,
}

/// Opaque graph handle.
pub struct GcGraph(Graph);

/// Opaque dataset handle.
pub struct GcDataset(Dataset);

/// Opaque crop-result handle.
pub struct GcCrop(CropResult);

impl From<Metric> for GcMetric {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Ppr => GcMetric::Ppr,
            Metric::Heat => GcMetric::Heat,
            Metric::ShortestPath => GcMetric::ShortestPath,
        }
    }
}

impl From<GcDiffusionConfig> for DiffusionConfig {
    fn from(c: GcDiffusionConfig) -> Self {
        DiffusionConfig {
            metric: match c.metric {
                GcMetric::Ppr => Metric::Ppr,
                GcMetric::Heat => Metric::Heat,
                GcMetric::ShortestPath => Metric::ShortestPath,
            },
            alpha: c.alpha,
            t: c.t,
            series_depth: c.series_depth,
            normalization: match c.normalization {
                GcNormalization::Symmetric => Normalization::Symmetric,
                GcNormalization::RandomWalk => Normalization::RandomWalk,
            },
            residual_tol: c.residual_tol,
        }
    }
}

impl From<DiffusionConfig> for GcDiffusionConfig {
    fn from(c: DiffusionConfig) -> Self {
        GcDiffusionConfig {
            metric: c.metric.into(),
            alpha: c.alpha,
            t: c.t,
            series_depth: c.series_depth,
            normalization: match c.normalization {
                Normalization::Symmetric => GcNormalization::Symmetric,
                Normalization::RandomWalk => GcNormalization::RandomWalk,
            },
            residual_tol: c.residual_tol,
        }
    }
}

impl From<GcAugmentConfig> for AugmentConfig {
    fn from(c: GcAugmentConfig) -> Self {
        AugmentConfig {
            p: c.p,
            rho: c.rho,
            method: match c.method {
                GcMethod::GraphCrop => Method::GraphCrop,
                GcMethod::UniNode => Method::UniNode,
                GcMethod::DropEdge => Method::DropEdge,
            },
            drop_rate: c.drop_rate,
            diffusion: c.diffusion.into(),
            enforce_component: c.enforce_component,
            seed: c.seed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(GcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Usage(_) => GcStatus::Usage,
            Error::Config(_) => GcStatus::Config,
            Error::Parse { .. } | Error::Json { .. } => GcStatus::Parse,
            Error::Io { .. } => GcStatus::Io,
            Error::Structure(_) => GcStatus::Structure,
            Error::Internal(_) => GcStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn null(what: &str) -> Failure {
    Failure(GcStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> FfiResult) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside graphcrop".into());
            GcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn c_path<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GcStatus::Usage, format!("{what} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> FfiResult {
    if out.is_null() {
        return Err(null("output handle pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn copy_out<T: Copy>(
    src: &[T],
    out: *mut T,
    capacity: usize,
    written: *mut usize,
) -> FfiResult {
    if !written.is_null() {
        *written = src.len();
    }
    if src.len() > capacity {
        return Err(Failure(
            GcStatus::BufferTooSmall,
            format!(
                "need room for {} values, buffer holds {capacity}",
                src.len()
            ),
        ));
    }
    if !src.is_empty() {
        if out.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    }
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default settings for `metric`.
#[no_mangle]
pub extern "C" fn gc_diffusion_config_default(metric: GcMetric) -> GcDiffusionConfig {
    let m = match metric {
        GcMetric::Ppr => Metric::Ppr,
        GcMetric::Heat => Metric::Heat,
        GcMetric::ShortestPath => Metric::ShortestPath,
    };
    DiffusionConfig::for_metric(m).into()
}

/// p = 0.5, rho = 0.7, graph cropping with PPR (alpha = 0.15), drop rate
/// 0.3, component enforcement on, seed 0.
#[no_mangle]
pub extern "C" fn gc_augment_config_default() -> GcAugmentConfig {
    let d = AugmentConfig::default();
    GcAugmentConfig {
        p: d.p,
        rho: d.rho,
        method: GcMethod::GraphCrop,
        drop_rate: d.drop_rate,
        diffusion: d.diffusion.into(),
        enforce_component: d.enforce_component,
        seed: d.seed,
    }
}

/// Builds a graph on `node_count` nodes from `pair_count` pairs stored as
/// `pairs[2 * i], pairs[2 * i + 1]`.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_from_edges(
    node_count: usize,
    pairs: *const usize,
    pair_count: usize,
    out: *mut *mut GcGraph,
) -> GcStatus {
    guard(|| {
        let flat: &[usize] = if pair_count == 0 {
            &[]
        } else if pairs.is_null() {
            return Err(null("pairs"));
        } else {
            std::slice::from_raw_parts(pairs, 2 * pair_count)
        };
        let pairs: Vec<_> = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        put(out, GcGraph(Graph::from_edge_list(node_count, &pairs)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_graph_free(graph: *mut GcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

#[no_mangle]
pub unsafe extern "C" fn gc_graph_node_count(graph: *const GcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

#[no_mangle]
pub unsafe extern "C" fn gc_graph_edge_count(graph: *const GcGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Writes edges as `u, v` pairs (`u < v`, sorted) into `out`, which holds
/// `capacity` pairs. `written` receives the number of pairs.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_edges(
    graph: *const GcGraph,
    out: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> GcStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let flat: Vec<usize> = g.0.edges().iter().flat_map(|&(u, v)| [u, v]).collect();
        if !written.is_null() {
            *written = g.0.edge_count();
        }
        copy_out(&flat, out, capacity.saturating_mul(2), ptr::null_mut())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_graph_degrees(
    graph: *const GcGraph,
    out: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> GcStatus {
    guard(|| copy_out(&deref(graph, "graph")?.0.degrees(), out, capacity, written))
}

#[no_mangle]
pub unsafe extern "C" fn gc_graph_set_graph_label(graph: *mut GcGraph, label: i64) -> GcStatus {
    guard(|| {
        let g = graph.as_mut().ok_or_else(|| null("graph"))?;
        g.0 = g.0.clone().with_graph_label(Some(label));
        Ok(())
    })
}

/// Writes the graph label to `label` and sets `has_label`; a graph without
/// a label leaves `label` untouched.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_graph_label(
    graph: *const GcGraph,
    label: *mut i64,
    has_label: *mut bool,
) -> GcStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        if has_label.is_null() {
            return Err(null("has_label"));
        }
        *has_label = g.0.graph_label().is_some();
        if let (Some(l), false) = (g.0.graph_label(), label.is_null()) {
            *label = l;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_graph_set_node_labels(
    graph: *mut GcGraph,
    labels: *const i64,
    len: usize,
) -> GcStatus {
    guard(|| {
        let g = graph.as_mut().ok_or_else(|| null("graph"))?;
        let labels = if len == 0 {
            Vec::new()
        } else if labels.is_null() {
            return Err(null("labels"));
        } else {
            std::slice::from_raw_parts(labels, len).to_vec()
        };
        g.0 = g.0.clone().with_node_labels(labels)?;
        Ok(())
    })
}

/// Reads TU dataset `name` from directory `dir`.
#[no_mangle]
pub unsafe extern "C" fn gc_dataset_parse_tu(
    dir: *const c_char,
    name: *const c_char,
    out: *mut *mut GcDataset,
) -> GcStatus {
    guard(|| {
        let dir = c_path(dir, "dir")?;
        let name = c_path(name, "name")?;
        put(out, GcDataset(dataset::parse_tu(Path::new(dir), name)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_read_jsonl(
    path: *const c_char,
    name: *const c_char,
    out: *mut *mut GcDataset,
) -> GcStatus {
    guard(|| {
        let path = c_path(path, "path")?;
        let name = c_path(name, "name")?;
        put(out, GcDataset(dataset::read_jsonl(Path::new(path), name)?))
    })
}

/// Builds a dataset by copying `count` graphs.
#[no_mangle]
pub unsafe extern "C" fn gc_dataset_from_graphs(
    name: *const c_char,
    graphs: *const *const GcGraph,
    count: usize,
    out: *mut *mut GcDataset,
) -> GcStatus {
    guard(|| {
        let name = c_path(name, "name")?;
        let handles = if count == 0 {
            &[][..]
        } else if graphs.is_null() {
            return Err(null("graphs"));
        } else {
            std::slice::from_raw_parts(graphs, count)
        };
        let graphs = handles
            .iter()
            .map(|&h| deref(h, "graph").map(|g| g.0.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        put(out, GcDataset(Dataset::new(name, graphs)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_free(dataset: *mut GcDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_len(dataset: *const GcDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.len())
}

/// Copies graph `index` into a new handle.
#[no_mangle]
pub unsafe extern "C" fn gc_dataset_graph(
    dataset: *const GcDataset,
    index: usize,
    out: *mut *mut GcGraph,
) -> GcStatus {
    guard(|| {
        let d = deref(dataset, "dataset")?;
        let g = d.0.graphs().get(index).ok_or_else(|| {
            Failure(
                GcStatus::Usage,
                format!("graph {index} out of range ({} graphs)", d.0.len()),
            )
        })?;
        put(out, GcGraph(g.clone()))
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_stats(
    dataset: *const GcDataset,
    out: *mut GcDatasetStats,
) -> GcStatus {
    guard(|| {
        let s = deref(dataset, "dataset")?.0.stats()?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = GcDatasetStats {
            graph_count: s.graph_count,
            mean_nodes: s.mean_nodes,
            mean_edges: s.mean_edges,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_write_tu(
    dataset: *const GcDataset,
    dir: *const c_char,
) -> GcStatus {
    guard(|| {
        let d = deref(dataset, "dataset")?;
        Ok(dataset::write_tu(&d.0, Path::new(c_path(dir, "dir")?))?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_dataset_write_jsonl(
    dataset: *const GcDataset,
    path: *const c_char,
) -> GcStatus {
    guard(|| {
        let d = deref(dataset, "dataset")?;
        Ok(dataset::write_jsonl(
            &d.0,
            Path::new(c_path(path, "path")?),
        )?)
    })
}

/// Augments every graph for `epochs` epochs, epoch-major.
#[no_mangle]
pub unsafe extern "C" fn gc_dataset_augment(
    dataset: *const GcDataset,
    config: *const GcAugmentConfig,
    epochs: usize,
    out: *mut *mut GcDataset,
) -> GcStatus {
    guard(|| {
        let d = deref(dataset, "dataset")?;
        let cfg: AugmentConfig = (*deref(config, "config")?).into();
        let result = Augmenter::new(cfg)?.augment_dataset(&d.0, epochs)?;
        put(out, GcDataset(result.dataset))
    })
}

/// Writes the `node_count` connectivity scores of every node to `v` into
/// `out`. Unreachable nodes under shortest-path scoring get `-INFINITY`.
#[no_mangle]
pub unsafe extern "C" fn gc_connectivity_scores(
    graph: *const GcGraph,
    v: usize,
    config: *const GcDiffusionConfig,
    out: *mut f64,
    capacity: usize,
) -> GcStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let cfg: DiffusionConfig = (*deref(config, "config")?).into();
        let scores = diffusion::connectivity_scores(&g.0, v, &cfg)?;
        copy_out(&scores.scores, out, capacity, ptr::null_mut())
    })
}

/// Crops `graph` around `initial_node`, or around a node drawn from
/// `config->seed` when `initial_node` is negative.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_crop(
    graph: *const GcGraph,
    initial_node: i64,
    config: *const GcAugmentConfig,
    out: *mut *mut GcCrop,
) -> GcStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let cfg: AugmentConfig = (*deref(config, "config")?).into();
        let crop = if initial_node < 0 {
            augment::graph_crop(&g.0, &cfg, &mut RngStream::from_seed(cfg.seed))?
        } else {
            augment::graph_crop_at(&g.0, 0, initial_node as usize, &cfg, None)?
        };
        put(out, GcCrop(crop))
    })
}

#[no_mangle]
pub unsafe extern "C" fn gc_crop_free(crop: *mut GcCrop) {
    if !crop.is_null() {
        drop(Box::from_raw(crop));
    }
}

#[no_mangle]
pub unsafe extern "C" fn gc_crop_initial_node(crop: *const GcCrop) -> usize {
    crop.as_ref().map_or(0, |c| c.0.initial_node)
}

#[no_mangle]
pub unsafe extern "C" fn gc_crop_kept_count(crop: *const GcCrop) -> usize {
    crop.as_ref().map_or(0, |c| c.0.kept_original_ids.len())
}

/// Kept source node ids, ascending.
#[no_mangle]
pub unsafe extern "C" fn gc_crop_kept_ids(
    crop: *const GcCrop,
    out: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> GcStatus {
    guard(|| {
        copy_out(
            &deref(crop, "crop")?.0.kept_original_ids,
            out,
            capacity,
            written,
        )
    })
}

/// Copies the induced subgraph (compacted ids) into a new handle.
#[no_mangle]
pub unsafe extern "C" fn gc_crop_subgraph(crop: *const GcCrop, out: *mut *mut GcGraph) -> GcStatus {
    guard(|| put(out, GcGraph(deref(crop, "crop")?.0.subgraph.clone())))
}

/// Applies the augmentation policy for `(graph_index, epoch)`.
#[no_mangle]
pub unsafe extern "C" fn gc_apply_policy(
    graph: *const GcGraph,
    graph_index: usize,
    epoch: usize,
    config: *const GcAugmentConfig,
    out: *mut *mut GcGraph,
) -> GcStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let cfg: AugmentConfig = (*deref(config, "config")?).into();
        put(
            out,
            GcGraph(augment::apply_policy(&g.0, graph_index, epoch, &cfg)?),
        )
    })
}
