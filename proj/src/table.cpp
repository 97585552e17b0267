#include "gramme/table.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace gramme {

int CategoricalTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return static_cast<int>(c);
  }
  return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, delimiter)) out.push_back(cell);
  if (!line.empty() && line.back() == delimiter) out.emplace_back();
  return out;
}

}  // namespace

CategoricalTable read_table(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open table file: " + path);
  CategoricalTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line, delimiter);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size())
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(t.columns.size()) + " cells, got " +
                      std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.columns.empty()) throw DataError("table is empty: " + path);
  return t;
}

void write_table(const CategoricalTable& table, const std::string& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write table file: " + path);
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? std::string(1, delimiter) : "") << table.columns[c];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? std::string(1, delimiter) : "") << row[c];
    out << "\n";
  }
}

MultiLayerGraph ingest_categorical_table(const CategoricalTable& table,
                                         const std::string& label_column, MissingPolicy policy,
                                         const std::string& missing_token) {
  if (table.rows.empty()) throw DataError("categorical table has no rows");
  const int label_col = table.column_index(label_column);
  if (label_col < 0) throw DataError("label column not found: " + label_column);

  const Index n = static_cast<Index>(table.rows.size());
  MultiLayerGraph g;
  g.n_nodes = n;

  // Label tokens in sorted order define the class indices.
  std::map<std::string, int> classes;
  for (const auto& row : table.rows) classes.emplace(row[label_col], 0);
  int next = 0;
  for (auto& [token, id] : classes) id = next++;
  g.n_classes = next;
  g.labels.resize(n);
  for (Index i = 0; i < n; ++i) g.labels[i] = classes.at(table.rows[i][label_col]);

  int layer_id = 0;
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (static_cast<int>(c) == label_col) continue;

    std::map<std::string, IndexVec> groups;
    std::size_t missing = 0;
    for (Index i = 0; i < n; ++i) {
      const std::string& value = table.rows[i][c];
      if (value == missing_token && policy == MissingPolicy::kDropEdges) {
        ++missing;
        continue;
      }
      groups[value].push_back(i);
    }
    if (groups.empty())
      throw DataError("column '" + table.columns[c] + "' has only missing values");

    LayerGraph layer;
    layer.layer_id = layer_id++;
    layer.present.assign(n, false);
    std::int64_t stored = 0;
    for (const auto& [value, members] : groups) {
      const std::int64_t s = static_cast<std::int64_t>(members.size());
      layer.counted_edges += s * s;
      stored += s * (s - 1);
    }
    layer.src.reserve(stored);
    layer.dst.reserve(stored);
    for (const auto& [value, members] : groups) {
      for (Index u : members) layer.present[u] = true;
      for (Index u : members) {
        for (Index v : members) {
          if (u == v) continue;
          layer.src.push_back(u);
          layer.dst.push_back(v);
        }
      }
    }
    (void)missing;
    g.layers.push_back(std::move(layer));
  }
  if (g.layers.empty()) throw DataError("table has no attribute columns besides the label");
  g.validate();
  return g;
}

}  // namespace gramme
