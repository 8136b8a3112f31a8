#ifndef GRAPHCROP_H
#define GRAPHCROP_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GcMetric {
  GC_METRIC_PPR = 0,
  GC_METRIC_HEAT = 1,
  GC_METRIC_SHORTEST_PATH = 2,
} GcMetric;

typedef enum GcNormalization {
  GC_NORMALIZATION_SYMMETRIC = 0,
  GC_NORMALIZATION_RANDOM_WALK = 1,
} GcNormalization;

typedef enum GcMethod {
  GC_METHOD_GRAPH_CROP = 0,
  GC_METHOD_UNI_NODE = 1,
  GC_METHOD_DROP_EDGE = 2,
} GcMethod;

/*
 Result code of every fallible call.
 */
typedef enum GcStatus {
  GC_STATUS_OK = 0,
  GC_STATUS_NULL_POINTER = 1,
  GC_STATUS_USAGE = 2,
  GC_STATUS_CONFIG = 3,
  GC_STATUS_PARSE = 4,
  GC_STATUS_IO = 5,
  GC_STATUS_STRUCTURE = 6,
  GC_STATUS_BUFFER_TOO_SMALL = 7,
  GC_STATUS_INTERNAL = 8,
  GC_STATUS_PANIC = 9,
} GcStatus;

/*
 Opaque crop-result handle.
 */
typedef struct GcCrop GcCrop;

/*
 Opaque dataset handle.
 */
typedef struct GcDataset GcDataset;

/*
 Opaque graph handle.
 */
typedef struct GcGraph GcGraph;

typedef struct GcDiffusionConfig {
  enum GcMetric metric;
  double alpha;
  double t;
  size_t series_depth;
  enum GcNormalization normalization;
  double residual_tol;
} GcDiffusionConfig;

typedef struct GcAugmentConfig {
  double p;
  double rho;
  enum GcMethod method;
  double drop_rate;
  struct GcDiffusionConfig diffusion;
  bool enforce_component;
  uint64_t seed;
} GcAugmentConfig;

typedef struct GcDatasetStats {
  size_t graph_count;
  double mean_nodes;
  double mean_edges;
} GcDatasetStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer is
 valid until the next failing call on the same thread.
 */
const char *gc_last_error_message(void);

/*
 Default settings for `metric`.
 */
struct GcDiffusionConfig gc_diffusion_config_default(enum GcMetric metric);

/*
 p = 0.5, rho = 0.7, graph cropping with PPR (alpha = 0.15), drop rate
 0.3, component enforcement on, seed 0.
 */
struct GcAugmentConfig gc_augment_config_default(void);

/*
 Builds a graph on `node_count` nodes from `pair_count` pairs stored as
 `pairs[2 * i], pairs[2 * i + 1]`.
 */
enum GcStatus gc_graph_from_edges(size_t node_count,
                                  const size_t *pairs,
                                  size_t pair_count,
                                  struct GcGraph **out);

void gc_graph_free(struct GcGraph *graph);

size_t gc_graph_node_count(const struct GcGraph *graph);

size_t gc_graph_edge_count(const struct GcGraph *graph);

/*
 Writes edges as `u, v` pairs (`u < v`, sorted) into `out`, which holds
 `capacity` pairs. `written` receives the number of pairs.
 */
enum GcStatus gc_graph_edges(const struct GcGraph *graph,
                             size_t *out,
                             size_t capacity,
                             size_t *written);

enum GcStatus gc_graph_degrees(const struct GcGraph *graph,
                               size_t *out,
                               size_t capacity,
                               size_t *written);

enum GcStatus gc_graph_set_graph_label(struct GcGraph *graph, int64_t label);

/*
 Writes the graph label to `label` and sets `has_label`; a graph without
 a label leaves `label` untouched.
 */
enum GcStatus gc_graph_graph_label(const struct GcGraph *graph, int64_t *label, bool *has_label);

enum GcStatus gc_graph_set_node_labels(struct GcGraph *graph, const int64_t *labels, size_t len);

/*
 Reads TU dataset `name` from directory `dir`.
 */
enum GcStatus gc_dataset_parse_tu(const char *dir, const char *name, struct GcDataset **out);

enum GcStatus gc_dataset_read_jsonl(const char *path, const char *name, struct GcDataset **out);

/*
 Builds a dataset by copying `count` graphs.
 */
enum GcStatus gc_dataset_from_graphs(const char *name,
                                     const struct GcGraph *const *graphs,
                                     size_t count,
                                     struct GcDataset **out);

void gc_dataset_free(struct GcDataset *dataset);

size_t gc_dataset_len(const struct GcDataset *dataset);

/*
 Copies graph `index` into a new handle.
 */
enum GcStatus gc_dataset_graph(const struct GcDataset *dataset, size_t index, struct GcGraph **out);

enum GcStatus gc_dataset_stats(const struct GcDataset *dataset, struct GcDatasetStats *out);

enum GcStatus gc_dataset_write_tu(const struct GcDataset *dataset, const char *dir);

enum GcStatus gc_dataset_write_jsonl(const struct GcDataset *dataset, const char *path);

/*
 Augments every graph for `epochs` epochs, epoch-major.
 */
enum GcStatus gc_dataset_augment(const struct GcDataset *dataset,
                                 const struct GcAugmentConfig *config,
                                 size_t epochs,
                                 struct GcDataset **out);

/*
 Writes the `node_count` connectivity scores of every node to `v` into
 `out`. Unreachable nodes under shortest-path scoring get `-INFINITY`.
 */
enum GcStatus gc_connectivity_scores(const struct GcGraph *graph,
                                     size_t v,
                                     const struct GcDiffusionConfig *config,
                                     double *out,
                                     size_t capacity);

/*
 Crops `graph` around `initial_node`, or around a node drawn from
 `config->seed` when `initial_node` is negative.
 */
enum GcStatus gc_graph_crop(const struct GcGraph *graph,
                            int64_t initial_node,
                            const struct GcAugmentConfig *config,
                            struct GcCrop **out);

void gc_crop_free(struct GcCrop *crop);

size_t gc_crop_initial_node(const struct GcCrop *crop);

size_t gc_crop_kept_count(const struct GcCrop *crop);

/*
 Kept source node ids, ascending.
 */
enum GcStatus gc_crop_kept_ids(const struct GcCrop *crop,
                               size_t *out,
                               size_t capacity,
                               size_t *written);

/*
 Copies the induced subgraph (compacted ids) into a new handle.
 */
enum GcStatus gc_crop_subgraph(const struct GcCrop *crop, struct GcGraph **out);

/*
 Applies the augmentation policy for `(graph_index, epoch)`.
 */
enum GcStatus gc_apply_policy(const struct GcGraph *graph,
                              size_t graph_index,
                              size_t epoch,
                              const struct GcAugmentConfig *config,
                              struct GcGraph **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHCROP_H */
