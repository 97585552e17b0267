#include "gramme/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <thread>

#include "gramme/dataset_io.hpp"

namespace gramme {

Model::Model(const MultiLayerGraph& g, const ModelConfig& config, std::uint64_t init_seed,
             std::uint64_t feature_seed)
    : config_(config),
      n_nodes_(g.n_nodes),
      n_layers_(g.n_layers()),
      n_classes_(g.n_classes),
      init_seed_(init_seed),
      feature_seed_(feature_seed) {
  config_.validate();
  Rng rng(init_seed);
  const bool share = config_.resolved_share_features();

  if (config_.variant == Variant::kSg) {
    const SupraGraph supra = build_supra_graph(g);
    supra_adj_ = Adjacency::from_supra(supra);
    pool_segments_ = across_layer_segments(n_nodes_, n_layers_);
    params_ = init_sg_params<double>(config_, n_classes_, rng);
    if (share) {
      const Matd base = random_features(n_nodes_, config_.feature_dim, feature_seed);
      Matd stacked(static_cast<Eigen::Index>(n_nodes_) * n_layers_, config_.feature_dim);
      for (int l = 0; l < n_layers_; ++l)
        stacked.middleRows(static_cast<Eigen::Index>(l) * n_nodes_, n_nodes_) = base;
      features_.push_back(std::move(stacked));
    } else {
      features_.push_back(random_features(n_nodes_ * static_cast<Index>(n_layers_),
                                          config_.feature_dim, feature_seed));
    }
  } else {
    layer_adj_.reserve(g.layers.size());
    for (const LayerGraph& layer : g.layers)
      layer_adj_.push_back(Adjacency::from_layer(layer, n_nodes_));
    params_ = init_fusion_params<double>(config_, n_layers_, n_classes_, rng);
    if (share) {
      features_.push_back(random_features(n_nodes_, config_.feature_dim, feature_seed));
    } else {
      std::mt19937_64 seeder(feature_seed);
      for (int l = 0; l < n_layers_; ++l)
        features_.push_back(random_features(n_nodes_, config_.feature_dim, seeder()));
    }
  }
}

ForwardResult<double> Model::forward(ad::Tape<double>& tape) {
  if (config_.variant == Variant::kSg) {
    return gramme_sg_forward(tape, supra_adj_, features_[0], sg_params(), config_.attention,
                             n_nodes_, n_layers_, pool_segments_);
  }
  std::vector<const Matd*> feats;
  for (const Matd& f : features_) feats.push_back(&f);
  return gramme_fusion_forward(tape, layer_adj_, feats, fusion_params(), config_.attention);
}

Matd Model::logits() {
  ad::Tape<double> tape;
  return forward(tape).logits.value();
}

Matd Model::embeddings() {
  ad::Tape<double> tape;
  return forward(tape).embedding.value();
}

TrainResult train_model(Model& model, const IndexVec& train_idx, const std::vector<int>& labels,
                        const TrainOptions& options) {
  if (train_idx.empty()) throw DataError("train_model: empty training set");

  ad::AdamConfig<double> adam_config;
  adam_config.lr = options.lr;
  adam_config.weight_decay = options.weight_decay;
  ad::AdamState<double> adam_state;

  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    ad::Tape<double> tape;
    ForwardResult<double> fwd = model.forward(tape);
    ad::Var<double> loss = ad::masked_cross_entropy(fwd.logits, labels, train_idx);
    const double loss_value = loss.value()(0, 0);
    if (!std::isfinite(loss_value))
      throw NumericError("train_model: non-finite loss at epoch " + std::to_string(epoch));
    tape.backward(loss);

    std::vector<Matd*> params;
    std::vector<const Matd*> grads;
    params.reserve(fwd.bound.entries.size());
    grads.reserve(fwd.bound.entries.size());
    for (auto& [storage, var] : fwd.bound.entries) {
      params.push_back(storage);
      grads.push_back(&tape.grad_of(var.id()));
    }
    ad::adam_step(params, grads, adam_state, adam_config);

    result.loss_trace.push_back(loss_value);
    result.final_loss = loss_value;
    result.epochs_run = epoch + 1;

    if (options.early_stop) {
      if (loss_value < best - options.min_delta) {
        best = loss_value;
        since_best = 0;
      } else if (++since_best >= options.patience) {
        break;
      }
    }
  }
  return result;
}

double evaluate_accuracy(const Matd& logits, const std::vector<int>& labels,
                         const IndexVec& test_idx) {
  if (test_idx.empty()) throw DataError("evaluate_accuracy: empty test set");
  std::int64_t correct = 0;
  for (const Index v : test_idx) {
    const auto row = logits.row(v);
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < row.size(); ++c) {
      if (row(c) > row(best)) best = c;  // ties keep the lowest class index
    }
    if (static_cast<int>(best) == labels[static_cast<std::size_t>(v)]) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(test_idx.size());
}

void ExperimentConfig::validate() const {
  model.validate();
  if (realizations < 1) throw DataError("experiment: realizations must be >= 1");
  if (train_fracs.empty()) throw DataError("experiment: no train fractions");
  for (double f : train_fracs) {
    if (!(f > 0.0 && f < 1.0))
      throw DataError("experiment: train fraction " + std::to_string(f) + " outside (0, 1)");
  }
  if (workers < 1) throw DataError("experiment: workers must be >= 1");
  if (train.epochs < 0) throw DataError("experiment: epochs must be >= 0");
}

RunSeeds derive_seeds(std::uint64_t base_seed, std::size_t frac_index, std::size_t realization,
                      std::size_t realizations) {
  RunSeeds s;
  s.run = base_seed + frac_index * realizations + realization;
  std::mt19937_64 eng(s.run);
  s.split = eng();
  s.feature = eng();
  s.init = eng();
  return s;
}

MetricsRecord run_single(const MultiLayerGraph& g, const ExperimentConfig& config,
                         std::size_t frac_index, std::size_t realization) {
  const double frac = config.train_fracs[frac_index];
  const RunSeeds seeds = derive_seeds(config.base_seed, frac_index, realization,
                                      static_cast<std::size_t>(config.realizations));
  MetricsRecord rec;
  rec.realization = static_cast<int>(realization);
  rec.seed = seeds.run;
  rec.frac = frac;

  const auto start = std::chrono::steady_clock::now();
  try {
    const IndexVec labeled = g.labeled_ids();
    const Split split = split_transductive(labeled, g.labels, frac, seeds.split);
    Model model(g, config.model, seeds.init, seeds.feature);
    const TrainResult trained = train_model(model, split.train_idx, g.labels, config.train);
    rec.accuracy = evaluate_accuracy(model.logits(), g.labels, split.test_idx);
    rec.final_loss = trained.final_loss;
    rec.epochs_run = trained.epochs_run;
    rec.loss_trace = trained.loss_trace;
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ExperimentResult run_experiment(const MultiLayerGraph& g, const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_fracs = config.train_fracs.size();
  const std::size_t n_real = static_cast<std::size_t>(config.realizations);
  const std::size_t total = n_fracs * n_real;

  std::vector<MetricsRecord> records(total);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= total) return;
      const std::size_t fi = cell / n_real;
      const std::size_t r = cell % n_real;
      records[cell] = run_single(g, config, fi, r);
    }
  };

  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(total)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  ExperimentResult result;
  result.records = std::move(records);
  for (std::size_t fi = 0; fi < n_fracs; ++fi) {
    FracSummary s;
    s.frac = config.train_fracs[fi];
    double sum = 0.0;
    std::vector<double> values;
    for (std::size_t r = 0; r < n_real; ++r) {
      const MetricsRecord& rec = result.records[fi * n_real + r];
      if (rec.failed) {
        ++s.failed;
        continue;
      }
      values.push_back(rec.accuracy);
      sum += rec.accuracy;
    }
    s.completed = static_cast<int>(values.size());
    if (!values.empty()) {
      s.mean_accuracy = sum / static_cast<double>(values.size());
      double sq = 0.0;
      for (double v : values) sq += (v - s.mean_accuracy) * (v - s.mean_accuracy);
      s.stddev_accuracy =
          values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
    }
    result.summaries.push_back(s);
  }
  return result;
}

void export_embeddings(Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embeddings file: " + path);
  const Matd emb = model.embeddings();
  out << std::setprecision(17);
  for (Eigen::Index v = 0; v < emb.rows(); ++v) {
    out << v;
    for (Eigen::Index c = 0; c < emb.cols(); ++c) out << "\t" << emb(v, c);
    out << "\n";
  }
}

void write_metrics_csv(const std::vector<MetricsRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write metrics file: " + path);
  out << std::setprecision(17);
  out << "realization,seed,frac,accuracy,final_loss,epochs,seconds\n";
  for (const MetricsRecord& r : records) {
    if (r.failed) {
      out << r.realization << "," << r.seed << "," << r.frac << ",failed,,," << "\n";
      continue;
    }
    out << r.realization << "," << r.seed << "," << r.frac << "," << r.accuracy << ","
        << r.final_loss << "," << r.epochs_run << "," << r.seconds << "\n";
  }
}

void write_summary(const std::vector<FracSummary>& summaries, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write summary file: " + path);
  out << std::setprecision(17);
  out << "frac mean_accuracy stddev_accuracy completed failed\n";
  for (const FracSummary& s : summaries) {
    out << s.frac << " " << s.mean_accuracy << " " << s.stddev_accuracy << " " << s.completed
        << " " << s.failed << "\n";
  }
}

void write_loss_trace(const std::vector<double>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write loss trace: " + path);
  out << std::setprecision(17);
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < trace.size(); ++e) out << e << "," << trace[e] << "\n";
}

}  // namespace gramme
