#include "gramme/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "gramme/dataset_io.hpp"
#include "gramme/rng.hpp"

namespace gramme::synth {

namespace {

using Pair = std::pair<Index, Index>;

/// Samples `count` distinct pairs without replacement, weighting same-class
/// pairs by `homophily`. Ordered pairs when directed, u < v otherwise.
std::vector<Pair> sample_pairs(Index n, const std::vector<int>& labels, std::size_t count,
                               double homophily, bool directed, Rng& rng) {
  std::vector<Pair> pool;
  std::vector<double> weight;
  for (Index u = 0; u < n; ++u) {
    for (Index v = directed ? 0 : u + 1; v < n; ++v) {
      if (u == v) continue;
      pool.emplace_back(u, v);
      weight.push_back(labels[u] == labels[v] ? homophily : 1.0);
    }
  }
  if (count > pool.size()) throw DataError("sample_pairs: not enough candidate pairs");

  std::vector<Pair> picked;
  picked.reserve(count);
  double total = std::accumulate(weight.begin(), weight.end(), 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    double target = rng.unit() * total;
    std::size_t chosen = pool.size() - 1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (weight[i] <= 0.0) continue;
      target -= weight[i];
      if (target <= 0.0) {
        chosen = i;
        break;
      }
    }
    picked.push_back(pool[chosen]);
    total -= weight[chosen];
    weight[chosen] = 0.0;
  }
  return picked;
}

/// Necessary conditions for splitting p participants into `groups` positive
/// sizes with squared sizes summing to r.
bool sizes_plausible(long groups, long p, long r) {
  if (groups == 0) return p == 0 && r == 0;
  if (p < groups) return false;
  if (((p ^ r) & 1) != 0) return false;  // sum of squares matches the sum mod 2
  const long q = p / groups, rem = p % groups;
  const long min_sq = (groups - rem) * q * q + rem * (q + 1) * (q + 1);
  const long big = p - (groups - 1);
  return r >= min_sq && r <= big * big + (groups - 1);
}

bool solve_sizes_rec(long groups, long p, long r, long& budget, std::vector<long>& out) {
  if (budget-- <= 0) return false;
  if (groups == 0) return p == 0 && r == 0;
  if (groups == 1) {
    const long s = std::lround(std::sqrt(static_cast<double>(r)));
    if (p >= 1 && s == p && s * s == r) {
      out.push_back(p);
      return true;
    }
    return false;
  }
  if (!sizes_plausible(groups, p, r)) return false;
  const long ideal = std::lround(std::sqrt(static_cast<double>(r) / groups));
  const long hi = p - (groups - 1);
  for (long delta = 0; ideal + delta <= hi || ideal - delta >= 1; ++delta) {
    for (const long s : {ideal + delta, ideal - delta}) {
      if (s < 1 || s > hi) continue;
      if (!sizes_plausible(groups - 1, p - s, r - s * s)) continue;
      out.push_back(s);
      if (solve_sizes_rec(groups - 1, p - s, r - s * s, budget, out)) return true;
      out.pop_back();
    }
    if (delta == 0) continue;
  }
  return false;
}

/// Picks n_groups positive sizes with the exact participant total and the
/// exact sum of squares. Sizes are chosen near the balanced value, so the
/// result looks like a plateau rather than one giant group.
std::vector<long> solve_group_sizes(int n_groups, long participants, long target_sum_sq) {
  std::vector<long> sizes;
  long budget = 2000000;
  if (!solve_sizes_rec(n_groups, participants, target_sum_sq, budget, sizes))
    throw DataError("solve_group_sizes: target " + std::to_string(target_sum_sq) +
                    " unreachable with " + std::to_string(participants) + " participants in " +
                    std::to_string(n_groups) + " groups");
  return sizes;
}

/// Largest-remainder allocation of `total` over weights, capped per entry.
std::vector<long> apportion(const std::vector<double>& weights, const std::vector<long>& caps,
                            long total) {
  const std::size_t n = weights.size();
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  std::vector<long> out(n, 0);
  std::vector<std::pair<double, std::size_t>> rema;
  long assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = wsum > 0 ? total * weights[i] / wsum : 0.0;
    out[i] = std::min(caps[i], static_cast<long>(std::floor(exact)));
    assigned += out[i];
    rema.emplace_back(exact - std::floor(exact), i);
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::size_t cursor = 0;
  while (assigned < total) {
    const std::size_t i = rema[cursor % n].second;
    if (out[i] < caps[i]) {
      ++out[i];
      ++assigned;
    }
    ++cursor;
    if (cursor > 4 * n * static_cast<std::size_t>(total + 1))
      throw DataError("apportion: caps too tight");
  }
  return out;
}

}  // namespace

MultiLayerGraph EdgeListDataset::to_graph() const {
  MultiLayerGraph g;
  g.n_nodes = n_nodes;
  g.n_classes = n_classes;
  g.labels = labels;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    LayerGraph layer;
    layer.layer_id = static_cast<int>(l);
    layer.present.assign(n_nodes, false);
    std::set<Pair> seen;
    auto push = [&](Index u, Index v) {
      if (u == v) return;
      if (seen.insert({u, v}).second) {
        layer.src.push_back(u);
        layer.dst.push_back(v);
        layer.present[u] = true;
        layer.present[v] = true;
      }
    };
    for (const Pair& e : layers[l]) {
      push(e.first, e.second);
      if (!directed) push(e.second, e.first);
    }
    layer.counted_edges = layer.edge_count();
    g.layers.push_back(std::move(layer));
  }
  g.validate();
  return g;
}

EdgeListDataset vickers_chan() {
  EdgeListDataset d;
  d.name = "vickers_chan";
  d.n_nodes = 29;
  d.n_classes = 2;
  d.directed = true;
  d.labels.assign(29, 1);
  for (Index v = 0; v < 12; ++v) d.labels[v] = 0;  // 12 boys, 17 girls

  Rng rng(29031981);
  const std::size_t quotas[3] = {300, 240, 200};  // 740 directed nominations
  for (std::size_t l = 0; l < 3; ++l)
    d.layers.push_back(sample_pairs(29, d.labels, quotas[l], 12.0, true, rng));
  return d;
}

EdgeListDataset leskovec_ng() {
  EdgeListDataset d;
  d.name = "leskovec_ng";
  d.n_nodes = 191;
  d.n_classes = 2;
  d.directed = false;
  d.labels.assign(191, 1);
  for (Index v = 0; v < 96; ++v) d.labels[v] = 0;

  Rng rng(20021997);
  // Staggered careers: a researcher joins at some window and stays.
  std::vector<int> joins(191, 0);
  for (Index v = 0; v < 191; ++v) {
    const double u = rng.unit();
    joins[v] = u < 0.40 ? 0 : (u < 0.65 ? 1 : (u < 0.85 ? 2 : 3));
  }
  const std::size_t quotas[4] = {150, 220, 260, 288};  // 918 co-author pairs
  for (int w = 0; w < 4; ++w) {
    IndexVec active;
    std::vector<int> active_labels;
    for (Index v = 0; v < 191; ++v) {
      if (joins[v] <= w) {
        active.push_back(v);
        active_labels.push_back(d.labels[v]);
      }
    }
    auto local = sample_pairs(static_cast<Index>(active.size()), active_labels, quotas[w], 60.0,
                              false, rng);
    std::vector<Pair> remapped;
    remapped.reserve(local.size());
    for (const Pair& e : local) remapped.emplace_back(active[e.first], active[e.second]);
    d.layers.push_back(std::move(remapped));
  }
  return d;
}

EdgeListDataset reinnovation() {
  EdgeListDataset d;
  d.name = "reinnovation";
  d.n_nodes = 145;
  d.n_classes = 3;
  d.directed = false;
  d.labels.assign(145, 2);
  for (Index v = 0; v < 48; ++v) d.labels[v] = 0;
  for (Index v = 48; v < 97; ++v) d.labels[v] = 1;

  Rng rng(144012);
  // Sector layers of varying informativeness; a few are nearly pure noise.
  const double themes[12] = {9.0, 8.0, 7.0, 6.0, 5.0, 4.5, 4.0, 3.0, 2.5, 2.0, 1.5, 1.0};
  for (int l = 0; l < 12; ++l)
    d.layers.push_back(sample_pairs(145, d.labels, 777, themes[l], false, rng));
  return d;
}

EdgeListDataset ckm_social() {
  EdgeListDataset d;
  d.name = "ckm_social";
  d.n_nodes = 241;
  d.n_classes = 4;
  d.directed = true;
  const Index town_sizes[4] = {117, 48, 45, 31};
  d.labels.clear();
  for (int t = 0; t < 4; ++t) d.labels.insert(d.labels.end(), town_sizes[t], t);

  std::vector<IndexVec> towns(4);
  for (Index v = 0; v < 241; ++v) towns[static_cast<std::size_t>(d.labels[v])].push_back(v);

  Rng rng(1957);
  for (int l = 0; l < 3; ++l) {
    // 1275 nominations per layer: everyone names 5, a rotating 70 name 6.
    IndexVec order(241);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<Pair> layer;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const Index u = order[pos];
      const IndexVec& town = towns[static_cast<std::size_t>(d.labels[u])];
      const int degree = pos < 70 ? 6 : 5;
      std::set<Index> chosen;
      while (static_cast<int>(chosen.size()) < degree) {
        const Index v = town[rng.below(town.size())];
        if (v != u) chosen.insert(v);
      }
      for (Index v : chosen) layer.emplace_back(u, v);
    }
    d.layers.push_back(std::move(layer));
  }
  return d;
}

CategoricalTable balance_scale() {
  CategoricalTable t;
  t.columns = {"left_weight", "left_distance", "right_weight", "right_distance", kBalanceLabel};
  for (int lw = 1; lw <= 5; ++lw) {
    for (int ld = 1; ld <= 5; ++ld) {
      for (int rw = 1; rw <= 5; ++rw) {
        for (int rd = 1; rd <= 5; ++rd) {
          const int left = lw * ld, right = rw * rd;
          const char* cls = left > right ? "L" : (left < right ? "R" : "B");
          t.rows.push_back({std::to_string(lw), std::to_string(ld), std::to_string(rw),
                            std::to_string(rd), cls});
        }
      }
    }
  }
  return t;
}

CategoricalTable congress_votes() {
  const Index n = 435, n_dem = 267;
  const double mix = 0.03;  // cross-party vote rate
  const double participation[14] = {0.40, 0.56, 0.44, 0.52, 0.48, 0.46, 0.50,
                                    0.42, 0.54, 0.47, 0.49, 0.45, 0.53, 0.43};
  const long target_counted = 358338;

  // Group sizes for the 14 free bills.
  std::vector<long> yes_sizes, no_sizes;
  long partial = 0;
  for (double p : participation) {
    const long y = std::lround(p * ((n_dem) * (1.0 - mix) + (n - n_dem) * mix));
    const long no = std::lround(p * ((n - n_dem) * (1.0 - mix) + n_dem * mix));
    yes_sizes.push_back(y);
    no_sizes.push_back(no);
    partial += y * y + no * no;
  }

  // The last two bills balance the ordered-pair total exactly.
  const long rest = target_counted - partial;
  bool found = false;
  for (long margin = 0; margin <= 60 && !found; margin += 20) {
    for (long y1 = 90 - margin; y1 <= 170 + margin && !found; ++y1) {
      for (long n1 = 55 - margin; n1 <= 115 + margin && !found; ++n1) {
        if (y1 < 1 || n1 < 1 || y1 + n1 > n) continue;
        const long r1 = rest - y1 * y1 - n1 * n1;
        if (r1 <= 0) continue;
        for (long y2 = 90 - margin; y2 <= 170 + margin && !found; ++y2) {
          const long n2sq = r1 - y2 * y2;
          if (n2sq <= 0) continue;
          const long n2 = std::lround(std::sqrt(static_cast<double>(n2sq)));
          if (n2 * n2 != n2sq || n2 < 40 || n2 > 140 || y2 + n2 > n) continue;
          yes_sizes.push_back(y1);
          no_sizes.push_back(n1);
          yes_sizes.push_back(y2);
          no_sizes.push_back(n2);
          found = true;
        }
      }
    }
  }
  if (!found) throw DataError("congress_votes: no size design reaches the edge total");

  CategoricalTable t;
  for (int b = 1; b <= 16; ++b) {
    std::ostringstream name;
    name << "bill_" << (b < 10 ? "0" : "") << b;
    t.columns.push_back(name.str());
  }
  t.columns.push_back(kCongressLabel);
  t.rows.assign(n, std::vector<std::string>(17, "?"));
  for (Index v = 0; v < n; ++v) t.rows[v][16] = v < n_dem ? "democrat" : "republican";

  Rng rng(1984);
  for (int b = 0; b < 16; ++b) {
    const long y = yes_sizes[b], no = no_sizes[b];
    const bool dem_yes = (b % 2 == 0);
    // Majority-party share of each voting bloc.
    long y_major = std::min<long>(std::lround(y * (1.0 - mix)), dem_yes ? n_dem : n - n_dem);
    long n_major = std::min<long>(std::lround(no * (1.0 - mix)), dem_yes ? n - n_dem : n_dem);
    const long y_minor = y - y_major;
    const long n_minor = no - n_major;

    IndexVec dems(n_dem), reps(n - n_dem);
    std::iota(dems.begin(), dems.end(), 0);
    std::iota(reps.begin(), reps.end(), n_dem);
    rng.shuffle(dems);
    rng.shuffle(reps);

    IndexVec& yes_pool = dem_yes ? dems : reps;
    IndexVec& no_pool = dem_yes ? reps : dems;
    const long yes_from_yes_pool = y_major, yes_from_no_pool = y_minor;
    const long no_from_no_pool = n_major, no_from_yes_pool = n_minor;
    if (yes_from_yes_pool + no_from_yes_pool > static_cast<long>(yes_pool.size()) ||
        no_from_no_pool + yes_from_no_pool > static_cast<long>(no_pool.size()))
      throw DataError("congress_votes: bill " + std::to_string(b) + " exceeds a party pool");

    std::size_t cursor = 0;
    for (long k = 0; k < yes_from_yes_pool; ++k) t.rows[yes_pool[cursor++]][b] = "y";
    for (long k = 0; k < no_from_yes_pool; ++k) t.rows[yes_pool[cursor++]][b] = "n";
    cursor = 0;
    for (long k = 0; k < no_from_no_pool; ++k) t.rows[no_pool[cursor++]][b] = "n";
    for (long k = 0; k < yes_from_no_pool; ++k) t.rows[no_pool[cursor++]][b] = "y";
  }

  // A member with no recorded votes would be isolated in every layer; swap
  // such a row with a same-party participant of the fullest bill.
  for (Index v = 0; v < n; ++v) {
    bool any = false;
    for (int b = 0; b < 16; ++b) any = any || t.rows[v][b] != "?";
    if (any) continue;
    for (Index w = 0; w < n && !any; ++w) {
      if (t.rows[w][16] != t.rows[v][16] || t.rows[w][0] == "?") continue;
      std::swap(t.rows[v][0], t.rows[w][0]);
      any = true;
    }
  }
  return t;
}

CategoricalTable mammography() {
  const Index n = 961, n_benign = 516;
  const long target_counted = 1979115;

  struct LayerDesign {
    std::string column;
    std::vector<std::string> values;
    std::vector<long> sizes;
    std::vector<double> malignant_affinity;
  };
  std::vector<LayerDesign> design = {
      {"bi_rads", {"1", "2", "3", "4", "5"}, {6, 20, 45, 640, 245}, {0.02, 0.03, 0.08, 0.35, 0.82}},
      {"shape", {"1", "2", "3", "4"}, {170, 150, 80, 550}, {0.12, 0.22, 0.45, 0.62}},
      {"margin", {"1", "2", "3", "4", "5"}, {390, 50, 80, 300, 130}, {0.15, 0.30, 0.45, 0.68, 0.80}},
      {"density", {"1", "2", "3", "4"}, {15, 25, 890, 26}, {0.35, 0.40, 0.47, 0.50}},
  };

  long partial = 0;
  for (const LayerDesign& l : design) {
    for (long s : l.sizes) partial += s * s;
  }
  long age_target = target_counted - partial;

  // Age group sizes solve the remaining ordered-pair budget exactly.
  long age_participants = 955;  // parity of the target drives odd/even
  if (((age_target ^ age_participants) & 1) != 0) --age_participants;
  std::vector<long> age_sizes = solve_group_sizes(40, age_participants, age_target);
  std::sort(age_sizes.begin(), age_sizes.end(), std::greater<>());

  LayerDesign age;
  age.column = "age";
  int low = 57, high = 58;
  for (std::size_t i = 0; i < age_sizes.size(); ++i) {
    const int value = (i % 2 == 0) ? low-- : high++;
    age.values.push_back(std::to_string(value));
    age.sizes.push_back(age_sizes[i]);
    age.malignant_affinity.push_back(0.15 + 0.75 / (1.0 + std::exp(-(value - 57.0) / 10.0)));
  }
  design.insert(design.begin() + 1, std::move(age));

  CategoricalTable t;
  for (const LayerDesign& l : design) t.columns.push_back(l.column);
  t.columns.push_back(kMammographyLabel);
  t.rows.assign(n, std::vector<std::string>(t.columns.size(), "?"));
  for (Index v = 0; v < n; ++v)
    t.rows[v][t.columns.size() - 1] = v < n_benign ? "benign" : "malignant";

  Rng rng(96100);
  for (std::size_t c = 0; c < design.size(); ++c) {
    const LayerDesign& l = design[c];
    long participants = 0;
    for (long s : l.sizes) participants += s;
    const long missing = n - participants;
    // Missingness is split across classes in proportion.
    const long missing_malignant = std::lround(missing * (n - n_benign) / double(n));
    const long malignant_present = (n - n_benign) - missing_malignant;

    std::vector<double> weights;
    std::vector<long> caps;
    for (std::size_t g = 0; g < l.sizes.size(); ++g) {
      weights.push_back(l.sizes[g] * l.malignant_affinity[g]);
      caps.push_back(l.sizes[g]);
    }
    const std::vector<long> malignant_per_group = apportion(weights, caps, malignant_present);

    IndexVec benign_pool(n_benign), malignant_pool(n - n_benign);
    std::iota(benign_pool.begin(), benign_pool.end(), 0);
    std::iota(malignant_pool.begin(), malignant_pool.end(), n_benign);
    rng.shuffle(benign_pool);
    rng.shuffle(malignant_pool);

    std::size_t b_cursor = 0, m_cursor = 0;
    for (std::size_t g = 0; g < l.sizes.size(); ++g) {
      const long m_take = malignant_per_group[g];
      const long b_take = l.sizes[g] - m_take;
      if (b_cursor + b_take > benign_pool.size() || m_cursor + m_take > malignant_pool.size())
        throw DataError("mammography: class pool exhausted in column " + l.column);
      for (long k = 0; k < m_take; ++k) t.rows[malignant_pool[m_cursor++]][c] = l.values[g];
      for (long k = 0; k < b_take; ++k) t.rows[benign_pool[b_cursor++]][c] = l.values[g];
    }
  }
  return t;
}

std::vector<std::string> bundled_names() {
  return {"vickers_chan", "congress_votes", "leskovec_ng", "reinnovation",
          "mammography",  "ckm_social",     "balance_scale"};
}

MultiLayerGraph build(const std::string& name) {
  if (name == "vickers_chan") return vickers_chan().to_graph();
  if (name == "leskovec_ng") return leskovec_ng().to_graph();
  if (name == "reinnovation") return reinnovation().to_graph();
  if (name == "ckm_social") return ckm_social().to_graph();
  if (name == "balance_scale") return ingest_categorical_table(balance_scale(), kBalanceLabel);
  if (name == "congress_votes") return ingest_categorical_table(congress_votes(), kCongressLabel);
  if (name == "mammography") return ingest_categorical_table(mammography(), kMammographyLabel);
  throw DataError("unknown bundled dataset '" + name + "'");
}

void write(const std::string& name, const std::string& dir) {
  namespace fs = std::filesystem;
  const bool is_table =
      name == "balance_scale" || name == "congress_votes" || name == "mammography";
  const MultiLayerGraph g = build(name);
  bool directed = true;
  if (name == "leskovec_ng" || name == "reinnovation") directed = false;
  // Similarity layers are symmetric; writing one orientation halves the files.
  if (is_table) directed = false;
  write_dataset_dir(g, dir, directed);
  if (is_table) {
    fs::create_directories(fs::path(dir) / "raw");
    const std::string raw = (fs::path(dir) / "raw" / (name + ".csv")).string();
    if (name == "balance_scale") write_table(balance_scale(), raw);
    if (name == "congress_votes") write_table(congress_votes(), raw);
    if (name == "mammography") write_table(mammography(), raw);
  }
}

}  // namespace gramme::synth
