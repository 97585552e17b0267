#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "gramme/ad/adam.hpp"
#include "gramme/model.hpp"
#include "gramme/sampling.hpp"

namespace gramme {

struct TrainOptions {
  double lr = 1e-3;
  int epochs = 300;
  double weight_decay = 0.0;
  /// Stop on a train-loss plateau (patience epochs without an improvement
  /// of at least min_delta). Off by default.
  bool early_stop = false;
  int patience = 30;
  double min_delta = 1e-5;
};

/// A model variant instantiated against one dataset: immutable edge views
/// and features plus the trainable parameters.
class Model {
 public:
  Model(const MultiLayerGraph& g, const ModelConfig& config, std::uint64_t init_seed,
        std::uint64_t feature_seed);

  ForwardResult<double> forward(ad::Tape<double>& tape);

  /// Fresh single-threaded forward pass; deterministic for fixed state.
  Matd logits();
  Matd embeddings();

  const ModelConfig& config() const { return config_; }
  Index n_nodes() const { return n_nodes_; }
  int n_classes() const { return n_classes_; }
  int n_layers() const { return n_layers_; }
  std::uint64_t feature_seed() const { return feature_seed_; }
  std::uint64_t init_seed() const { return init_seed_; }

  template <typename Fn>
  void visit(Fn&& fn) {
    if (config_.variant == Variant::kSg)
      visit_params(std::get<SgModelParams<double>>(params_), fn);
    else
      visit_params(std::get<FusionModelParams<double>>(params_), fn);
  }

  SgModelParams<double>& sg_params() { return std::get<SgModelParams<double>>(params_); }
  FusionModelParams<double>& fusion_params() {
    return std::get<FusionModelParams<double>>(params_);
  }

 private:
  ModelConfig config_;
  Index n_nodes_ = 0;
  int n_layers_ = 0;
  int n_classes_ = 0;
  std::uint64_t init_seed_ = 0;
  std::uint64_t feature_seed_ = 0;
  std::variant<SgModelParams<double>, FusionModelParams<double>> params_;
  // supra-graph route
  Adjacency supra_adj_;
  IndexVec pool_segments_;
  // layer-wise route
  std::vector<Adjacency> layer_adj_;
  std::vector<Matd> features_;  // one shared matrix or one per layer
};

struct TrainResult {
  std::vector<double> loss_trace;  // one entry per epoch run
  double final_loss = 0.0;
  int epochs_run = 0;
};

/// Full-batch Adam on the masked cross entropy over the training nodes.
/// Deterministic for a fixed model state. Throws NumericError (with the
/// epoch in the message) if the loss leaves the finite range.
TrainResult train_model(Model& model, const IndexVec& train_idx, const std::vector<int>& labels,
                        const TrainOptions& options);

/// Percentage of argmax hits over the test nodes; ties resolve to the
/// lowest class index.
double evaluate_accuracy(const Matd& logits, const std::vector<int>& labels,
                         const IndexVec& test_idx);

struct ExperimentConfig {
  std::string dataset_path;
  ModelConfig model;
  TrainOptions train;
  std::vector<double> train_fracs = {0.1, 0.2, 0.3};
  int realizations = 20;
  std::uint64_t base_seed = 1;
  int workers = 1;

  void validate() const;
};

struct MetricsRecord {
  int realization = 0;
  std::uint64_t seed = 0;
  double frac = 0.0;
  double accuracy = 0.0;  // percent
  double final_loss = 0.0;
  int epochs_run = 0;
  double seconds = 0.0;
  bool failed = false;
  std::string error;
  std::vector<double> loss_trace;
};

struct FracSummary {
  double frac = 0.0;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
  int completed = 0;
  int failed = 0;
};

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  std::vector<FracSummary> summaries;
};

struct RunSeeds {
  std::uint64_t run = 0;
  std::uint64_t split = 0;
  std::uint64_t feature = 0;
  std::uint64_t init = 0;
};

/// run = base + frac_index * realizations + realization;
/// the split/feature/init streams are drawn from mt19937_64(run).
RunSeeds derive_seeds(std::uint64_t base_seed, std::size_t frac_index, std::size_t realization,
                      std::size_t realizations);

/// One cell of the sweep: fresh split, fresh features, fresh init, train,
/// evaluate on the held-out nodes.
MetricsRecord run_single(const MultiLayerGraph& g, const ExperimentConfig& config,
                         std::size_t frac_index, std::size_t realization);

/// Full sweep over fracs x realizations. Failures are recorded per run
/// without aborting the sweep. Worker count only affects wall time, never
/// results.
ExperimentResult run_experiment(const MultiLayerGraph& g, const ExperimentConfig& config);

/// Node id plus the pre-classifier representation, tab separated, full
/// precision.
void export_embeddings(Model& model, const std::string& path);

void write_metrics_csv(const std::vector<MetricsRecord>& records, const std::string& path);
void write_summary(const std::vector<FracSummary>& summaries, const std::string& path);
void write_loss_trace(const std::vector<double>& trace, const std::string& path);

}  // namespace gramme
