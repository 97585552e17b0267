#pragma once

#include <string>

#include "gramme/harness.hpp"

namespace gramme {

/// Versioned text dump of the model config, feature/init seeds and every
/// parameter tensor at full precision. Stable across runs.
void save_checkpoint(Model& model, const std::string& path);

/// Rebuilds the model against the same dataset and restores the tensors.
/// Fails if the graph shape or config recorded in the file disagrees.
Model load_checkpoint(const MultiLayerGraph& g, const std::string& path);

}  // namespace gramme
