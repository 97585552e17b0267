#include "gramme/model.hpp"

namespace gramme {

std::string variant_name(Variant v) { return v == Variant::kSg ? "sg" : "fusion"; }

Variant parse_variant(const std::string& name) {
  if (name == "sg" || name == "SG") return Variant::kSg;
  if (name == "fusion" || name == "Fusion") return Variant::kFusion;
  throw DataError("unknown model variant '" + name + "' (expected sg or fusion)");
}

void ModelConfig::validate() const {
  if (attention_layers < 1) throw DataError("model: attention_layers must be >= 1");
  if (heads < 1) throw DataError("model: heads must be >= 1");
  if (feature_dim < 1 || hidden_dim < 1) throw DataError("model: dimensions must be >= 1");
  if (variant == Variant::kFusion && supra_fusion_heads < 1)
    throw DataError("model: supra_fusion_heads must be >= 1");
}

IndexVec across_layer_segments(Index n_nodes, int n_layers) {
  IndexVec seg(static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(n_layers));
  for (int l = 0; l < n_layers; ++l) {
    for (Index i = 0; i < n_nodes; ++i)
      seg[static_cast<std::size_t>(l) * n_nodes + i] = i;
  }
  return seg;
}

}  // namespace gramme
