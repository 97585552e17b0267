#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gramme {

/// Node and edge ids. Datasets here are small enough for 32 bits.
using Index = std::int32_t;
using IndexVec = std::vector<Index>;

/// Dense row-major matrix, one row per node. Row gathers/scatters dominate
/// the workload, so rows are kept contiguous.
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Matd = Mat<double>;

/// Malformed input files, bad tables, out-of-range ids.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Incompatible operand shapes in the tensor engine.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// NaN/Inf surfaced where finite values are required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad command line or config key.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gramme
