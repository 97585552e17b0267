#include "gramme/graph.hpp"

#include <algorithm>
#include <sstream>

namespace gramme {

IndexVec MultiLayerGraph::labeled_ids() const {
  IndexVec out;
  for (Index v = 0; v < n_nodes; ++v) {
    if (labels[v] >= 0) out.push_back(v);
  }
  return out;
}

void MultiLayerGraph::validate() const {
  if (n_nodes <= 0) throw DataError("graph has no nodes");
  if (layers.empty()) throw DataError("graph has no layers");
  if (static_cast<Index>(labels.size()) != n_nodes)
    throw DataError("labels length does not match node count");
  for (int lbl : labels) {
    if (lbl >= n_classes || lbl < -1)
      throw DataError("label " + std::to_string(lbl) + " outside [0, " +
                      std::to_string(n_classes) + ")");
  }
  for (const LayerGraph& layer : layers) {
    if (layer.src.size() != layer.dst.size())
      throw DataError("layer " + std::to_string(layer.layer_id) + ": ragged edge arrays");
    if (static_cast<Index>(layer.present.size()) != n_nodes)
      throw DataError("layer " + std::to_string(layer.layer_id) + ": bad presence mask");
    for (std::size_t e = 0; e < layer.src.size(); ++e) {
      const Index u = layer.src[e], v = layer.dst[e];
      if (u < 0 || u >= n_nodes || v < 0 || v >= n_nodes)
        throw DataError("layer " + std::to_string(layer.layer_id) + ": edge (" +
                        std::to_string(u) + "," + std::to_string(v) + ") out of range");
      if (u == v)
        throw DataError("layer " + std::to_string(layer.layer_id) + ": self loop at node " +
                        std::to_string(u));
    }
  }
}

void SupraGraph::all_edges(IndexVec& src_out, IndexVec& dst_out) const {
  src_out.clear();
  dst_out.clear();
  src_out.reserve(intra_src.size() + pillar_src.size());
  dst_out.reserve(intra_dst.size() + pillar_dst.size());
  src_out.insert(src_out.end(), intra_src.begin(), intra_src.end());
  src_out.insert(src_out.end(), pillar_src.begin(), pillar_src.end());
  dst_out.insert(dst_out.end(), intra_dst.begin(), intra_dst.end());
  dst_out.insert(dst_out.end(), pillar_dst.begin(), pillar_dst.end());
}

SupraGraph build_supra_graph(const MultiLayerGraph& g) {
  if (g.n_layers() < 1) throw DataError("supra graph needs at least one layer");
  SupraGraph s;
  s.n_nodes = g.n_nodes;
  s.n_layers = g.n_layers();

  std::int64_t intra_total = 0;
  for (const LayerGraph& layer : g.layers) intra_total += layer.edge_count();
  s.intra_src.reserve(intra_total);
  s.intra_dst.reserve(intra_total);
  for (int l = 0; l < s.n_layers; ++l) {
    const Index offset = static_cast<Index>(l) * s.n_nodes;
    const LayerGraph& layer = g.layers[l];
    for (std::size_t e = 0; e < layer.src.size(); ++e) {
      s.intra_src.push_back(layer.src[e] + offset);
      s.intra_dst.push_back(layer.dst[e] + offset);
    }
  }

  if (s.n_layers > 1) {
    s.pillar_src.reserve(static_cast<std::size_t>(s.n_nodes) * s.n_layers * (s.n_layers - 1));
    s.pillar_dst.reserve(s.pillar_src.capacity());
    for (Index i = 0; i < s.n_nodes; ++i) {
      for (int l1 = 0; l1 < s.n_layers; ++l1) {
        for (int l2 = 0; l2 < s.n_layers; ++l2) {
          if (l1 == l2) continue;
          s.pillar_src.push_back(s.index_of(i, l1));
          s.pillar_dst.push_back(s.index_of(i, l2));
        }
      }
    }
  }
  return s;
}

GraphStats graph_stats(const MultiLayerGraph& g) {
  GraphStats st;
  st.n_nodes = g.n_nodes;
  st.n_layers = g.n_layers();
  st.n_classes = g.n_classes;
  st.class_histogram.assign(std::max(g.n_classes, 0), 0);
  for (int lbl : g.labels) {
    if (lbl >= 0) ++st.class_histogram[lbl];
  }
  for (const LayerGraph& layer : g.layers) {
    LayerStats ls;
    ls.layer_id = layer.layer_id;
    ls.stored_directed = layer.edge_count();
    ls.counted = layer.counted_edges;
    ls.present_nodes =
        static_cast<Index>(std::count(layer.present.begin(), layer.present.end(), true));
    st.total_stored += ls.stored_directed;
    st.total_counted += ls.counted;
    st.per_layer.push_back(ls);
  }
  return st;
}

std::string format_stats(const GraphStats& s) {
  std::ostringstream os;
  os << "nodes: " << s.n_nodes << "\n"
     << "layers: " << s.n_layers << "\n"
     << "classes: " << s.n_classes << "\n"
     << "edges (stored directed): " << s.total_stored << "\n"
     << "edges (counted): " << s.total_counted << "\n";
  os << "class histogram:";
  for (std::size_t c = 0; c < s.class_histogram.size(); ++c)
    os << " " << c << ":" << s.class_histogram[c];
  os << "\n";
  for (const LayerStats& ls : s.per_layer) {
    os << "layer " << ls.layer_id << ": stored=" << ls.stored_directed
       << " counted=" << ls.counted << " present=" << ls.present_nodes << "\n";
  }
  return os.str();
}

Adjacency Adjacency::from_edges(const IndexVec& src, const IndexVec& dst, Index n_nodes,
                                bool add_self_loops) {
  if (src.size() != dst.size()) throw DataError("adjacency: ragged edge arrays");
  Adjacency a;
  a.n_nodes = n_nodes;
  a.self_loops = add_self_loops;
  a.agg.reserve(src.size() + (add_self_loops ? n_nodes : 0));
  a.nbr.reserve(a.agg.capacity());
  // Stored edge (u, v): v aggregates the feature of u.
  for (std::size_t e = 0; e < src.size(); ++e) {
    a.agg.push_back(dst[e]);
    a.nbr.push_back(src[e]);
  }
  if (add_self_loops) {
    for (Index v = 0; v < n_nodes; ++v) {
      a.agg.push_back(v);
      a.nbr.push_back(v);
    }
  }
  return a;
}

Adjacency Adjacency::from_layer(const LayerGraph& layer, Index n_nodes, bool add_self_loops) {
  return from_edges(layer.src, layer.dst, n_nodes, add_self_loops);
}

Adjacency Adjacency::from_supra(const SupraGraph& s, bool add_self_loops) {
  IndexVec src, dst;
  s.all_edges(src, dst);
  return from_edges(src, dst, s.supra_count(), add_self_loops);
}

}  // namespace gramme
