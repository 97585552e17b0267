#pragma once

#include <string>
#include <vector>

#include "gramme/graph.hpp"

namespace gramme {

/// Delimited text table of categorical attributes. One row per entity, one
/// column per attribute; a designated column carries the class label.
struct CategoricalTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // rows[i][c]

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return columns.size(); }
  int column_index(const std::string& name) const;
};

CategoricalTable read_table(const std::string& path, char delimiter = ',');
void write_table(const CategoricalTable& table, const std::string& path, char delimiter = ',');

enum class MissingPolicy {
  kDropEdges,    // a missing value joins no similarity group
  kOwnCategory,  // missing values of a column form their own group
};

/// Builds one layer per non-label column: layer l connects every ordered
/// pair (u, v), u != v, whose column-l values are equal (and non-missing
/// under kDropEdges). counted_edges keeps the ordered-pairs-including-self
/// total per similarity group, the convention the dataset summaries use.
/// Classes are label tokens in sorted order.
MultiLayerGraph ingest_categorical_table(const CategoricalTable& table,
                                         const std::string& label_column,
                                         MissingPolicy policy = MissingPolicy::kDropEdges,
                                         const std::string& missing_token = "?");

}  // namespace gramme
