#pragma once

#include <string>
#include <vector>

#include "gramme/graph.hpp"

namespace gramme {

/// Parses a whitespace-separated "u v" edge list. '#' starts a comment.
/// Duplicate ordered pairs are dropped; with directed=false both
/// orientations are stored. Node ids must lie in [0, n_nodes).
LayerGraph load_layer_edgelist(const std::string& path, Index n_nodes, bool directed);

/// One "node_id label_index" pair per line; nodes not listed stay unlabeled.
std::vector<int> load_labels(const std::string& path, Index n_nodes);

/// Line-oriented key=value descriptor:
///   n_nodes = <N>
///   n_classes = <C>
///   directed = true|false
///   labels = <relative path>
///   layer = <relative path>     (repeated, in layer order)
MultiLayerGraph load_dataset(const std::string& descriptor_path);

/// Accepts either a descriptor file or a directory containing dataset.cfg.
MultiLayerGraph load_dataset_auto(const std::string& path);

/// Writes descriptor + labels + one edge file per layer into a directory.
/// Undirected graphs are written with one orientation per pair.
void write_dataset_dir(const MultiLayerGraph& g, const std::string& dir, bool directed);

}  // namespace gramme
