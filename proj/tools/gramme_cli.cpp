#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gramme/checkpoint.hpp"
#include "gramme/config.hpp"
#include "gramme/dataset_io.hpp"
#include "gramme/gradcheck_suite.hpp"
#include "gramme/table.hpp"

namespace fs = std::filesystem;
using namespace gramme;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return os.str();
}

/// Every run writes its fully resolved config next to its outputs.
fs::path make_run_dir(const std::string& out_root, const RunConfig& config) {
  fs::path dir = fs::path(out_root) /
                 (timestamp() + "-seed" + std::to_string(config.experiment.base_seed));
  fs::create_directories(dir);
  std::ofstream cfg(dir / "resolved.cfg");
  cfg << render_config(config);
  return dir;
}

RunConfig load_run_config(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  auto values = read_config_file(config_path);
  for (const std::string& o : overrides) apply_override(values, o);
  return make_run_config(values);
}

int cmd_ingest(const std::string& table_path, const std::string& label, char delimiter,
               const std::string& missing, const std::string& policy, const std::string& out) {
  const CategoricalTable table = read_table(table_path, delimiter);
  const MissingPolicy mp = policy == "own-category" ? MissingPolicy::kOwnCategory
                                                    : MissingPolicy::kDropEdges;
  if (policy != "own-category" && policy != "drop-edges")
    throw UsageError("policy must be drop-edges or own-category");
  const MultiLayerGraph g = ingest_categorical_table(table, label, mp, missing);
  write_dataset_dir(g, out, /*directed=*/false);
  const GraphStats stats = graph_stats(g);
  std::cout << "ingested " << table_path << " -> " << out << "\n" << format_stats(stats);
  return kExitOk;
}

int cmd_stats(const std::string& dataset, const std::string& table_path, const std::string& label,
              char delimiter, const std::string& missing, const std::string& policy) {
  MultiLayerGraph g;
  if (!table_path.empty()) {
    if (label.empty()) throw UsageError("--table needs --label");
    const MissingPolicy mp = policy == "own-category" ? MissingPolicy::kOwnCategory
                                                      : MissingPolicy::kDropEdges;
    g = ingest_categorical_table(read_table(table_path, delimiter), label, mp, missing);
  } else if (!dataset.empty()) {
    g = load_dataset_auto(dataset);
  } else {
    throw UsageError("stats needs --dataset or --table");
  }
  std::cout << format_stats(graph_stats(g));
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& out_root) {
  const RunConfig rc = load_run_config(config_path, overrides);
  const MultiLayerGraph g = load_dataset_auto(rc.experiment.dataset_path);
  const fs::path dir = make_run_dir(out_root, rc);

  const RunSeeds seeds = derive_seeds(rc.experiment.base_seed, 0, 0, 1);
  const Split split =
      split_transductive(g.labeled_ids(), g.labels, rc.train_frac, seeds.split);
  Model model(g, rc.experiment.model, seeds.init, seeds.feature);
  const TrainResult result = train_model(model, split.train_idx, g.labels, rc.experiment.train);
  const double accuracy = evaluate_accuracy(model.logits(), g.labels, split.test_idx);

  save_checkpoint(model, (dir / "model.ckpt").string());
  write_loss_trace(result.loss_trace, (dir / "loss_trace.csv").string());
  std::cout << "run_dir " << dir.string() << "\n";
  std::cout << "epochs " << result.epochs_run << "\n";
  std::cout << std::setprecision(10) << "final_loss " << result.final_loss << "\n";
  std::cout << "test_accuracy " << accuracy << "\n";
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::vector<std::string>& overrides,
                   const std::string& out_root) {
  const RunConfig rc = load_run_config(config_path, overrides);
  const MultiLayerGraph g = load_dataset_auto(rc.experiment.dataset_path);
  const fs::path dir = make_run_dir(out_root, rc);

  const ExperimentResult result = run_experiment(g, rc.experiment);
  write_metrics_csv(result.records, (dir / "metrics.csv").string());
  write_summary(result.summaries, (dir / "summary.txt").string());
  fs::create_directories(dir / "traces");
  for (const MetricsRecord& rec : result.records) {
    if (rec.failed) continue;
    std::ostringstream name;
    name << "trace_frac" << rec.frac << "_r" << rec.realization << ".csv";
    write_loss_trace(rec.loss_trace, (dir / "traces" / name.str()).string());
  }

  std::cout << "run_dir " << dir.string() << "\n";
  std::cout << std::setprecision(6);
  for (const FracSummary& s : result.summaries) {
    std::cout << "frac " << s.frac << " mean_accuracy " << s.mean_accuracy << " stddev "
              << s.stddev_accuracy << " completed " << s.completed << " failed " << s.failed
              << "\n";
  }
  for (const MetricsRecord& rec : result.records) {
    if (rec.failed)
      std::cerr << "warning: run frac=" << rec.frac << " r=" << rec.realization
                << " failed: " << rec.error << "\n";
  }
  return kExitOk;
}

int cmd_export(const std::string& checkpoint_path, const std::string& dataset,
               const std::string& out) {
  const MultiLayerGraph g = load_dataset_auto(dataset);
  Model model = load_checkpoint(g, checkpoint_path);
  export_embeddings(model, out);
  std::cout << "wrote " << out << " (" << model.n_nodes() << " x "
            << model.config().hidden_dim << ")\n";
  return kExitOk;
}

int cmd_gradcheck(int trials, std::uint64_t seed) {
  const std::vector<GradCheckEntry> report = run_gradcheck_suite(trials, seed);
  bool ok = true;
  std::cout << std::setprecision(3) << std::scientific;
  for (const GradCheckEntry& e : report) {
    std::cout << e.name << " " << e.max_rel_error << "\n";
    ok = ok && e.max_rel_error < 1e-4;
  }
  std::cout << (ok ? "gradcheck passed" : "gradcheck FAILED") << "\n";
  return ok ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-layered graph attention models for semi-supervised node classification"};
  app.require_subcommand(1);

  std::string table_path, label, dataset, out, config_path, checkpoint_path;
  std::string missing = "?";
  std::string policy = "drop-edges";
  std::string delimiter = ",";
  std::string out_root = "runs";
  std::vector<std::string> overrides;
  int trials = 10;
  std::uint64_t gc_seed = 7;

  CLI::App* ingest = app.add_subcommand("ingest", "Build a dataset from a categorical table");
  ingest->add_option("--table", table_path, "Delimited table with a header row")->required();
  ingest->add_option("--label", label, "Label column name")->required();
  ingest->add_option("--delimiter", delimiter, "Cell delimiter (default ,)");
  ingest->add_option("--missing", missing, "Missing-value token (default ?)");
  ingest->add_option("--policy", policy, "drop-edges or own-category");
  ingest->add_option("--out", out, "Output dataset directory")->required();

  CLI::App* stats = app.add_subcommand("stats", "Report dataset statistics");
  stats->add_option("--dataset", dataset, "Dataset directory or descriptor file");
  stats->add_option("--table", table_path, "Categorical table (with --label)");
  stats->add_option("--label", label, "Label column name");
  stats->add_option("--delimiter", delimiter, "Cell delimiter (default ,)");
  stats->add_option("--missing", missing, "Missing-value token (default ?)");
  stats->add_option("--policy", policy, "drop-edges or own-category");

  CLI::App* train = app.add_subcommand("train", "Train one model and write a checkpoint");
  train->add_option("--config", config_path, "Config file")->required();
  train->add_option("--out", out_root, "Run directory root (default runs)");
  train->add_option("overrides", overrides, "section.key=value overrides");

  CLI::App* experiment =
      app.add_subcommand("experiment", "Run the full realization sweep");
  experiment->add_option("--config", config_path, "Config file")->required();
  experiment->add_option("--out", out_root, "Run directory root (default runs)");
  experiment->add_option("overrides", overrides, "section.key=value overrides");

  CLI::App* exp_emb =
      app.add_subcommand("export-embeddings", "Dump pre-classifier representations");
  exp_emb->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  exp_emb->add_option("--dataset", dataset, "Dataset the checkpoint was trained on")->required();
  exp_emb->add_option("--out", out, "Output file")->required();

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference check of every op and both models");
  gradcheck->add_option("--trials", trials, "Randomized trials per op (default 10)");
  gradcheck->add_option("--seed", gc_seed, "Base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest)
      return cmd_ingest(table_path, label, delimiter.empty() ? ',' : delimiter[0], missing,
                        policy, out);
    if (*stats)
      return cmd_stats(dataset, table_path, label, delimiter.empty() ? ',' : delimiter[0],
                       missing, policy);
    if (*train) return cmd_train(config_path, overrides, out_root);
    if (*experiment) return cmd_experiment(config_path, overrides, out_root);
    if (*exp_emb) return cmd_export(checkpoint_path, dataset, out);
    if (*gradcheck) return cmd_gradcheck(trials, gc_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
