#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gramme/types.hpp"

namespace gramme {

/// One relationship layer over the shared node set. Edges are stored as
/// directed ordered pairs with no self loops and no duplicates; undirected
/// sources are symmetrized at load time.
struct LayerGraph {
  int layer_id = 0;
  IndexVec src;
  IndexVec dst;
  /// present[v]: node v participates in this layer (has a similarity group
  /// or at least one incident edge).
  std::vector<bool> present;
  /// Edge total under the reporting convention of the dataset summaries:
  /// for similarity-built layers, ordered pairs including self pairs; for
  /// layers loaded from edge lists, the stored directed count.
  std::int64_t counted_edges = 0;

  std::int64_t edge_count() const { return static_cast<std::int64_t>(src.size()); }
};

/// L directed layer adjacencies over one node set, plus labels.
struct MultiLayerGraph {
  Index n_nodes = 0;
  int n_classes = 0;
  std::vector<LayerGraph> layers;
  /// Per-node class index in [0, n_classes), or -1 for unlabeled.
  std::vector<int> labels;

  int n_layers() const { return static_cast<int>(layers.size()); }
  IndexVec labeled_ids() const;
  /// Throws DataError if any structural invariant is broken.
  void validate() const;
};

/// Flattened (node, layer) graph. Copy (i, l) lives at row l*N + i, so the
/// adjacency is block diagonal in the intra edges. Every node keeps a copy
/// in every layer; copies absent from a layer are isolated except for the
/// pillar edges linking the L copies of one node id.
struct SupraGraph {
  Index n_nodes = 0;  // N of the source graph
  int n_layers = 0;   // L
  IndexVec intra_src, intra_dst;
  IndexVec pillar_src, pillar_dst;

  Index supra_count() const { return n_nodes * static_cast<Index>(n_layers); }
  Index index_of(Index node, int layer) const {
    return static_cast<Index>(layer) * n_nodes + node;
  }
  Index node_of(Index supra) const { return supra % n_nodes; }
  int layer_of(Index supra) const { return static_cast<int>(supra / n_nodes); }

  /// Intra and pillar edges concatenated, in that order.
  void all_edges(IndexVec& src_out, IndexVec& dst_out) const;
};

/// Pillar edges form a complete directed clique among the L copies of each
/// node id: N*L*(L-1) directed pairs. Intra edges are copied per layer at
/// the layer offset.
SupraGraph build_supra_graph(const MultiLayerGraph& g);

struct LayerStats {
  int layer_id = 0;
  std::int64_t stored_directed = 0;
  std::int64_t counted = 0;
  Index present_nodes = 0;
};

struct GraphStats {
  Index n_nodes = 0;
  int n_layers = 0;
  int n_classes = 0;
  std::vector<LayerStats> per_layer;
  std::int64_t total_stored = 0;
  std::int64_t total_counted = 0;
  std::vector<std::int64_t> class_histogram;  // labeled nodes per class
};

GraphStats graph_stats(const MultiLayerGraph& g);
std::string format_stats(const GraphStats& s);

/// Edge view consumed by the attention ops: one entry per message, where
/// agg[e] collects the transformed feature of nbr[e]. Built from stored
/// directed edges (dst aggregates src) plus optional self messages.
struct Adjacency {
  IndexVec agg;
  IndexVec nbr;
  Index n_nodes = 0;
  bool self_loops = false;

  static Adjacency from_edges(const IndexVec& src, const IndexVec& dst, Index n_nodes,
                              bool add_self_loops = true);
  static Adjacency from_layer(const LayerGraph& layer, Index n_nodes,
                              bool add_self_loops = true);
  static Adjacency from_supra(const SupraGraph& s, bool add_self_loops = true);

  std::int64_t edge_count() const { return static_cast<std::int64_t>(agg.size()); }
};

}  // namespace gramme
