#include "gramme/dataset_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace fs = std::filesystem;

namespace gramme {

namespace {

std::string location(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

bool parse_index(const std::string& token, Index& out) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(token, &pos);
    if (pos != token.size() || v < 0 || v > INT32_MAX) return false;
    out = static_cast<Index>(v);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LayerGraph load_layer_edgelist(const std::string& path, Index n_nodes, bool directed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list: " + path);

  LayerGraph layer;
  layer.present.assign(n_nodes, false);
  std::unordered_set<std::int64_t> seen;
  auto key = [n_nodes](Index u, Index v) {
    return static_cast<std::int64_t>(u) * n_nodes + v;
  };
  auto push = [&](Index u, Index v) {
    if (u == v) return;  // self edges are implicit in the attention ops
    if (seen.insert(key(u, v)).second) {
      layer.src.push_back(u);
      layer.dst.push_back(v);
      layer.present[u] = true;
      layer.present[v] = true;
    }
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    std::string a, b;
    if (!(is >> a)) continue;  // blank or comment-only line
    if (!(is >> b)) throw DataError(location(path, line_no) + ": expected two node ids");
    std::string extra;
    if (is >> extra) throw DataError(location(path, line_no) + ": trailing token '" + extra + "'");
    Index u, v;
    if (!parse_index(a, u)) throw DataError(location(path, line_no) + ": bad node id '" + a + "'");
    if (!parse_index(b, v)) throw DataError(location(path, line_no) + ": bad node id '" + b + "'");
    if (u >= n_nodes || v >= n_nodes)
      throw DataError(location(path, line_no) + ": node id out of range (n_nodes=" +
                      std::to_string(n_nodes) + ")");
    push(u, v);
    if (!directed) push(v, u);
  }
  layer.counted_edges = layer.edge_count();
  return layer;
}

std::vector<int> load_labels(const std::string& path, Index n_nodes) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels file: " + path);
  std::vector<int> labels(n_nodes, -1);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    std::string a, b;
    if (!(is >> a)) continue;
    if (!(is >> b)) throw DataError(location(path, line_no) + ": expected 'node label'");
    Index v;
    if (!parse_index(a, v) || v >= n_nodes)
      throw DataError(location(path, line_no) + ": bad node id '" + a + "'");
    Index lbl;
    if (!parse_index(b, lbl)) throw DataError(location(path, line_no) + ": bad label '" + b + "'");
    labels[v] = static_cast<int>(lbl);
  }
  return labels;
}

MultiLayerGraph load_dataset(const std::string& descriptor_path) {
  std::ifstream in(descriptor_path);
  if (!in) throw DataError("cannot open dataset descriptor: " + descriptor_path);
  const fs::path base = fs::path(descriptor_path).parent_path();

  Index n_nodes = -1;
  int n_classes = -1;
  bool directed = false;
  bool have_directed = false;
  std::string labels_path;
  std::vector<std::string> layer_paths;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string trimmed = strip(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw DataError(location(descriptor_path, line_no) + ": expected key = value");
    const std::string key = strip(trimmed.substr(0, eq));
    const std::string value = strip(trimmed.substr(eq + 1));
    if (key == "n_nodes") {
      if (!parse_index(value, n_nodes))
        throw DataError(location(descriptor_path, line_no) + ": bad n_nodes");
    } else if (key == "n_classes") {
      Index c;
      if (!parse_index(value, c))
        throw DataError(location(descriptor_path, line_no) + ": bad n_classes");
      n_classes = static_cast<int>(c);
    } else if (key == "directed") {
      if (value != "true" && value != "false")
        throw DataError(location(descriptor_path, line_no) + ": directed must be true or false");
      directed = (value == "true");
      have_directed = true;
    } else if (key == "labels") {
      labels_path = (base / value).string();
    } else if (key == "layer") {
      layer_paths.push_back((base / value).string());
    } else {
      throw DataError(location(descriptor_path, line_no) + ": unknown key '" + key + "'");
    }
  }
  if (n_nodes <= 0) throw DataError(descriptor_path + ": missing n_nodes");
  if (n_classes <= 0) throw DataError(descriptor_path + ": missing n_classes");
  if (!have_directed) throw DataError(descriptor_path + ": missing directed flag");
  if (labels_path.empty()) throw DataError(descriptor_path + ": missing labels entry");
  if (layer_paths.empty()) throw DataError(descriptor_path + ": no layer entries");

  MultiLayerGraph g;
  g.n_nodes = n_nodes;
  g.n_classes = n_classes;
  g.labels = load_labels(labels_path, n_nodes);
  for (std::size_t l = 0; l < layer_paths.size(); ++l) {
    LayerGraph layer = load_layer_edgelist(layer_paths[l], n_nodes, directed);
    layer.layer_id = static_cast<int>(l);
    g.layers.push_back(std::move(layer));
  }
  g.validate();
  return g;
}

MultiLayerGraph load_dataset_auto(const std::string& path) {
  if (fs::is_directory(path)) return load_dataset((fs::path(path) / "dataset.cfg").string());
  return load_dataset(path);
}

void write_dataset_dir(const MultiLayerGraph& g, const std::string& dir, bool directed) {
  fs::create_directories(dir);
  const fs::path base(dir);

  {
    std::ofstream out(base / "labels.txt");
    if (!out) throw DataError("cannot write labels under " + dir);
    for (Index v = 0; v < g.n_nodes; ++v) {
      if (g.labels[v] >= 0) out << v << " " << g.labels[v] << "\n";
    }
  }

  std::vector<std::string> layer_files;
  for (const LayerGraph& layer : g.layers) {
    std::ostringstream name;
    name << "layer_" << layer.layer_id << ".edges";
    layer_files.push_back(name.str());
    std::ofstream out(base / name.str());
    if (!out) throw DataError("cannot write layer file under " + dir);
    for (std::size_t e = 0; e < layer.src.size(); ++e) {
      const Index u = layer.src[e], v = layer.dst[e];
      if (!directed && u > v) continue;  // one orientation per undirected pair
      out << u << " " << v << "\n";
    }
  }

  std::ofstream out(base / "dataset.cfg");
  if (!out) throw DataError("cannot write descriptor under " + dir);
  out << "n_nodes = " << g.n_nodes << "\n";
  out << "n_classes = " << g.n_classes << "\n";
  out << "directed = " << (directed ? "true" : "false") << "\n";
  out << "labels = labels.txt\n";
  for (const std::string& f : layer_files) out << "layer = " << f << "\n";
}

}  // namespace gramme
