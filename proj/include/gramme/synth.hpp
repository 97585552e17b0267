#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gramme/graph.hpp"
#include "gramme/table.hpp"

namespace gramme::synth {

/// Deterministic stand-ins for the classic multiplex benchmarks. The
/// originals cannot be redistributed here, so each generator synthesizes a
/// dataset with the published node/layer/class counts and edge totals
/// (exactly), and a community/attribute structure that reproduces the
/// qualitative difficulty of the original.
struct EdgeListDataset {
  std::string name;
  Index n_nodes = 0;
  int n_classes = 0;
  bool directed = false;
  std::vector<int> labels;
  /// One edge per stored pair; for undirected datasets one orientation per
  /// pair (the loader symmetrizes).
  std::vector<std::vector<std::pair<Index, Index>>> layers;

  MultiLayerGraph to_graph() const;
};

/// 29 students, 3 nomination layers, 740 directed edges, gender labels.
EdgeListDataset vickers_chan();

/// 191 researchers in two groups, 4 co-authorship windows, 918 undirected
/// pairs (1836 directed), group labels.
EdgeListDataset leskovec_ng();

/// 145 countries, 12 sector similarity layers, 9324 undirected pairs
/// (18648 directed), 3 development levels.
EdgeListDataset reinnovation();

/// 241 physicians in four towns, 3 nomination layers, 3825 directed edges.
EdgeListDataset ckm_social();

/// Exact 5^4 factorial of weights/distances; label compares the torques.
/// 625 rows, 4 attributes, 3 classes; similarity ingestion yields 312500
/// counted edges.
CategoricalTable balance_scale();

/// 435 members, 16 near-party-line votes in {y, n, ?}; group sizes are
/// designed so the similarity layers count 358338 ordered pairs.
CategoricalTable congress_votes();

/// 961 lesions, 5 categorical attributes with class-dependent value
/// distributions; group sizes are designed so the similarity layers count
/// 1979115 ordered pairs.
CategoricalTable mammography();

inline const char* kBalanceLabel = "class";
inline const char* kCongressLabel = "party";
inline const char* kMammographyLabel = "severity";

std::vector<std::string> bundled_names();

/// In-memory build of a bundled dataset (tables go through the categorical
/// ingest path).
MultiLayerGraph build(const std::string& name);

/// Writes the dataset directory (descriptor + layer edge lists + labels)
/// for any bundled name, plus the raw table under <dir>/raw for the
/// categorical ones.
void write(const std::string& name, const std::string& dir);

}  // namespace gramme::synth
