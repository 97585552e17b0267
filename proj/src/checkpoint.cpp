#include "gramme/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace gramme {

namespace {

constexpr const char* kMagic = "gramme-checkpoint";
constexpr int kVersion = 1;

std::string sigma_name(AttentionOptions::Sigma s) {
  return s == AttentionOptions::Sigma::kElu ? "elu" : "none";
}

AttentionOptions::Sigma parse_sigma(const std::string& s) {
  if (s == "elu") return AttentionOptions::Sigma::kElu;
  if (s == "none") return AttentionOptions::Sigma::kNone;
  throw DataError("checkpoint: unknown nonlinearity '" + s + "'");
}

}  // namespace

void save_checkpoint(Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << std::setprecision(17);

  const ModelConfig& c = model.config();
  out << kMagic << " " << kVersion << "\n";
  out << "variant " << variant_name(c.variant) << "\n";
  out << "attention_layers " << c.attention_layers << "\n";
  out << "heads " << c.heads << "\n";
  out << "supra_fusion_heads " << c.supra_fusion_heads << "\n";
  out << "feature_dim " << c.feature_dim << "\n";
  out << "hidden_dim " << c.hidden_dim << "\n";
  out << "feed_forward " << (c.feed_forward_before_overall_fusion ? 1 : 0) << "\n";
  out << "share_features " << (c.resolved_share_features() ? 1 : 0) << "\n";
  out << "logit_slope " << c.attention.logit_slope << "\n";
  out << "logit_activation " << (c.attention.logit_activation ? 1 : 0) << "\n";
  out << "sigma " << sigma_name(c.attention.sigma) << "\n";
  out << "normalize_fusion " << (c.attention.normalize_fusion ? 1 : 0) << "\n";
  out << "n_nodes " << model.n_nodes() << "\n";
  out << "n_layers " << model.n_layers() << "\n";
  out << "n_classes " << model.n_classes() << "\n";
  out << "feature_seed " << model.feature_seed() << "\n";
  out << "init_seed " << model.init_seed() << "\n";

  model.visit([&out](const std::string& name, Matd& m) {
    out << "tensor " << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index col = 0; col < m.cols(); ++col)
        out << (col ? " " : "") << m(r, col);
      out << "\n";
    }
  });
  out << "end\n";
  if (!out) throw DataError("write failure on checkpoint: " + path);
}

Model load_checkpoint(const MultiLayerGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);

  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic)
    throw DataError("not a checkpoint file: " + path);
  if (version != kVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));

  ModelConfig config;
  std::uint64_t feature_seed = 0, init_seed = 0;
  Index n_nodes = 0;
  int n_layers = 0, n_classes = 0;
  int share = 1;

  std::string key;
  while (in >> key && key != "tensor" && key != "end") {
    std::string value;
    if (!(in >> value)) throw DataError("checkpoint: truncated header at key " + key);
    if (key == "variant") config.variant = parse_variant(value);
    else if (key == "attention_layers") config.attention_layers = std::stoi(value);
    else if (key == "heads") config.heads = std::stoi(value);
    else if (key == "supra_fusion_heads") config.supra_fusion_heads = std::stoi(value);
    else if (key == "feature_dim") config.feature_dim = std::stol(value);
    else if (key == "hidden_dim") config.hidden_dim = std::stol(value);
    else if (key == "feed_forward") config.feed_forward_before_overall_fusion = value == "1";
    else if (key == "share_features") share = std::stoi(value);
    else if (key == "logit_slope") config.attention.logit_slope = std::stod(value);
    else if (key == "logit_activation") config.attention.logit_activation = value == "1";
    else if (key == "sigma") config.attention.sigma = parse_sigma(value);
    else if (key == "normalize_fusion") config.attention.normalize_fusion = value == "1";
    else if (key == "n_nodes") n_nodes = static_cast<Index>(std::stol(value));
    else if (key == "n_layers") n_layers = std::stoi(value);
    else if (key == "n_classes") n_classes = std::stoi(value);
    else if (key == "feature_seed") feature_seed = std::stoull(value);
    else if (key == "init_seed") init_seed = std::stoull(value);
    else throw DataError("checkpoint: unknown header key '" + key + "'");
  }
  config.share_features = (share == 1);

  if (g.n_nodes != n_nodes || g.n_layers() != n_layers || g.n_classes != n_classes)
    throw DataError("checkpoint was written for a " + std::to_string(n_nodes) + "-node, " +
                    std::to_string(n_layers) + "-layer, " + std::to_string(n_classes) +
                    "-class dataset");

  Model model(g, config, init_seed, feature_seed);

  std::map<std::string, Matd*> slots;
  model.visit([&slots](const std::string& name, Matd& m) { slots[name] = &m; });

  while (key == "tensor") {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols)) throw DataError("checkpoint: truncated tensor header");
    const auto it = slots.find(name);
    if (it == slots.end()) throw DataError("checkpoint: unexpected tensor '" + name + "'");
    Matd& m = *it->second;
    if (m.rows() != rows || m.cols() != cols)
      throw DataError("checkpoint: tensor '" + name + "' has shape " + std::to_string(rows) +
                      "x" + std::to_string(cols) + ", expected " + std::to_string(m.rows()) +
                      "x" + std::to_string(m.cols()));
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index col = 0; col < cols; ++col) {
        if (!(in >> m(r, col))) throw DataError("checkpoint: truncated tensor '" + name + "'");
      }
    }
    slots.erase(it);
    if (!(in >> key)) throw DataError("checkpoint: missing end marker");
  }
  if (key != "end") throw DataError("checkpoint: missing end marker");
  if (!slots.empty())
    throw DataError("checkpoint: tensor '" + slots.begin()->first + "' not present");
  return model;
}

}  // namespace gramme
