#include "gramme/config.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace gramme {

namespace {

const std::vector<std::string> kKeys = {
    "data.dataset",
    "model.variant",
    "model.T",
    "model.H",
    "model.K",
    "model.D",
    "model.d",
    "model.ff",
    "model.share_features",
    "model.logit_slope",
    "model.logit_activation",
    "model.sigma",
    "model.normalize_fusion",
    "train.lr",
    "train.epochs",
    "train.weight_decay",
    "train.early_stop",
    "train.patience",
    "train.min_delta",
    "train.fracs",
    "train.frac",
    "train.realizations",
    "train.seed",
    "train.workers",
};

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void unknown_key(const std::string& key) {
  std::ostringstream os;
  os << "unknown config key '" << key << "'; valid keys:";
  for (const std::string& k : kKeys) os << " " << k;
  throw UsageError(os.str());
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw UsageError("config key " + key + ": expected a boolean, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key " + key + ": expected an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key " + key + ": expected a number, got '" + value + "'");
  }
}

}  // namespace

const std::vector<std::string>& known_config_keys() { return kKeys; }

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::map<std::string, std::string> values;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = strip(line);
    if (t.empty()) continue;
    if (t.front() == '[' && t.back() == ']') {
      section = strip(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = strip(t.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) unknown_key(key);
    values[key] = strip(t.substr(eq + 1));
  }
  return values;
}

void apply_override(std::map<std::string, std::string>& values, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw UsageError("override '" + assignment + "' is not of the form section.key=value");
  const std::string key = strip(assignment.substr(0, eq));
  if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) unknown_key(key);
  values[key] = strip(assignment.substr(eq + 1));
}

RunConfig make_run_config(const std::map<std::string, std::string>& values) {
  RunConfig rc;
  ExperimentConfig& e = rc.experiment;
  for (const auto& [key, value] : values) {
    if (key == "data.dataset") e.dataset_path = value;
    else if (key == "model.variant") e.model.variant = parse_variant(value);
    else if (key == "model.T") e.model.attention_layers = parse_int(key, value);
    else if (key == "model.H") e.model.heads = parse_int(key, value);
    else if (key == "model.K") e.model.supra_fusion_heads = parse_int(key, value);
    else if (key == "model.D") e.model.feature_dim = parse_int(key, value);
    else if (key == "model.d") e.model.hidden_dim = parse_int(key, value);
    else if (key == "model.ff")
      e.model.feed_forward_before_overall_fusion = parse_bool(key, value);
    else if (key == "model.share_features") e.model.share_features = parse_bool(key, value);
    else if (key == "model.logit_slope") e.model.attention.logit_slope = parse_double(key, value);
    else if (key == "model.logit_activation")
      e.model.attention.logit_activation = parse_bool(key, value);
    else if (key == "model.sigma") {
      if (value == "elu") e.model.attention.sigma = AttentionOptions::Sigma::kElu;
      else if (value == "none") e.model.attention.sigma = AttentionOptions::Sigma::kNone;
      else throw UsageError("config key model.sigma: expected elu or none, got '" + value + "'");
    } else if (key == "model.normalize_fusion")
      e.model.attention.normalize_fusion = parse_bool(key, value);
    else if (key == "train.lr") e.train.lr = parse_double(key, value);
    else if (key == "train.epochs") e.train.epochs = parse_int(key, value);
    else if (key == "train.weight_decay") e.train.weight_decay = parse_double(key, value);
    else if (key == "train.early_stop") e.train.early_stop = parse_bool(key, value);
    else if (key == "train.patience") e.train.patience = parse_int(key, value);
    else if (key == "train.min_delta") e.train.min_delta = parse_double(key, value);
    else if (key == "train.fracs") {
      e.train_fracs.clear();
      std::istringstream is(value);
      std::string cell;
      while (std::getline(is, cell, ',')) e.train_fracs.push_back(parse_double(key, strip(cell)));
      if (e.train_fracs.empty()) throw UsageError("config key train.fracs: empty list");
    } else if (key == "train.frac") rc.train_frac = parse_double(key, value);
    else if (key == "train.realizations") e.realizations = parse_int(key, value);
    else if (key == "train.seed") e.base_seed = std::stoull(value);
    else if (key == "train.workers") e.workers = parse_int(key, value);
    else unknown_key(key);
  }
  e.validate();
  if (!(rc.train_frac > 0.0 && rc.train_frac < 1.0))
    throw UsageError("train.frac must lie in (0, 1)");
  return rc;
}

std::string render_config(const RunConfig& rc) {
  const ExperimentConfig& e = rc.experiment;
  std::ostringstream os;
  os << std::setprecision(17);
  os << "[data]\n";
  os << "dataset = " << e.dataset_path << "\n\n";
  os << "[model]\n";
  os << "variant = " << variant_name(e.model.variant) << "\n";
  os << "T = " << e.model.attention_layers << "\n";
  os << "H = " << e.model.heads << "\n";
  os << "K = " << e.model.supra_fusion_heads << "\n";
  os << "D = " << e.model.feature_dim << "\n";
  os << "d = " << e.model.hidden_dim << "\n";
  os << "ff = " << (e.model.feed_forward_before_overall_fusion ? "true" : "false") << "\n";
  os << "share_features = " << (e.model.resolved_share_features() ? "true" : "false") << "\n";
  os << "logit_slope = " << e.model.attention.logit_slope << "\n";
  os << "logit_activation = " << (e.model.attention.logit_activation ? "true" : "false") << "\n";
  os << "sigma = "
     << (e.model.attention.sigma == AttentionOptions::Sigma::kElu ? "elu" : "none") << "\n";
  os << "normalize_fusion = " << (e.model.attention.normalize_fusion ? "true" : "false")
     << "\n\n";
  os << "[train]\n";
  os << "lr = " << e.train.lr << "\n";
  os << "epochs = " << e.train.epochs << "\n";
  os << "weight_decay = " << e.train.weight_decay << "\n";
  os << "early_stop = " << (e.train.early_stop ? "true" : "false") << "\n";
  os << "patience = " << e.train.patience << "\n";
  os << "min_delta = " << e.train.min_delta << "\n";
  os << "fracs = ";
  for (std::size_t i = 0; i < e.train_fracs.size(); ++i)
    os << (i ? "," : "") << e.train_fracs[i];
  os << "\n";
  os << "frac = " << rc.train_frac << "\n";
  os << "realizations = " << e.realizations << "\n";
  os << "seed = " << e.base_seed << "\n";
  os << "workers = " << e.workers << "\n";
  return os.str();
}

}  // namespace gramme
