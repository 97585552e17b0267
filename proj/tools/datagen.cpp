#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gramme/graph.hpp"
#include "gramme/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the bundled benchmark datasets"};
  std::string out = "data";
  std::vector<std::string> names;
  app.add_option("--out", out, "Output root (default data)");
  app.add_option("--only", names, "Subset of dataset names");
  CLI11_PARSE(app, argc, argv);

  if (names.empty()) names = gramme::synth::bundled_names();
  try {
    for (const std::string& name : names) {
      const std::string dir = (std::filesystem::path(out) / name).string();
      gramme::synth::write(name, dir);
      const auto stats = gramme::graph_stats(gramme::synth::build(name));
      std::cout << name << ": nodes=" << stats.n_nodes << " layers=" << stats.n_layers
                << " classes=" << stats.n_classes << " counted_edges=" << stats.total_counted
                << " -> " << dir << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
