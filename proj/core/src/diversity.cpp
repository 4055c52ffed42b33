#include "nnbench/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "nnbench/analytic.hpp"
#include "nnbench/error.hpp"

namespace nnbench {

std::string_view to_string(FeatureScale s) noexcept { return s == FeatureScale::raw ? "raw" : "log"; }

std::optional<FeatureScale> parse_feature_scale(std::string_view s) {
  if (s == "raw") return FeatureScale::raw;
  if (s == "log") return FeatureScale::log;
  return std::nullopt;
}

FeatureVector feature_vector(const NetworkDescriptor& net, FeatureScale scale) {
  validate_network(net);
  FeatureVector v;
  v.name = net.name;
  for (const auto& l : net.layers) v.values[kind_index(l.kind)] += static_cast<double>(analytic_counts(l).ops);
  if (scale == FeatureScale::log) {
    for (auto& x : v.values) x = std::log10(1.0 + x);
  }
  return v;
}

std::string_view to_string(Linkage l) noexcept {
  switch (l) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
  }
  return "average";
}

std::optional<Linkage> parse_linkage(std::string_view s) {
  if (s == "average") return Linkage::average;
  if (s == "complete") return Linkage::complete;
  if (s == "single") return Linkage::single;
  return std::nullopt;
}

// ---- dendrogram ---------------------------------------------------------------

std::vector<std::string> Dendrogram::leaves(int node) const {
  std::vector<std::string> out;
  std::vector<int> stack = {node};
  while (!stack.empty()) {
    const auto& n = nodes.at(static_cast<std::size_t>(stack.back()));
    stack.pop_back();
    if (n.left < 0) {
      out.push_back(n.name);
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<double, std::vector<std::string>> Dendrogram::first_merge(std::string_view name) const {
  for (std::size_t i = 0; i < leaf_count; ++i) {
    if (nodes[i].name != name) continue;
    for (std::size_t m = leaf_count; m < nodes.size(); ++m) {
      const auto& n = nodes[m];
      if (n.left == static_cast<int>(i)) return {n.height, leaves(n.right)};
      if (n.right == static_cast<int>(i)) return {n.height, leaves(n.left)};
    }
  }
  throw Error("dendrogram: no leaf named '" + std::string(name) + "'");
}

namespace {

double euclidean(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < kFeatureSlots; ++k) {
    const double d = a.values[k] - b.values[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

Dendrogram hierarchical_cluster(std::span<const FeatureVector> vectors, Linkage linkage) {
  const std::size_t n = vectors.size();
  if (n < 2) throw Error("hierarchical_cluster: need at least two vectors");
  {
    std::set<std::string> names;
    for (const auto& v : vectors) {
      if (!names.insert(v.name).second) throw Error("hierarchical_cluster: duplicate name '" + v.name + "'");
    }
  }

  // Leaf indices sorted by name give every cluster a canonical member order.
  std::vector<std::size_t> by_name(n);
  for (std::size_t i = 0; i < n; ++i) by_name[i] = i;
  std::sort(by_name.begin(), by_name.end(), [&](auto a, auto b) { return vectors[a].name < vectors[b].name; });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[by_name[r]] = r;

  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = euclidean(vectors[i], vectors[j]);
  }

  Dendrogram d;
  d.leaf_count = n;
  d.linkage = linkage;
  for (const auto& v : vectors) d.nodes.push_back({-1, -1, 0.0, v.name, 1});

  struct Cluster {
    int node;
    std::vector<std::size_t> members;  // sorted by name rank
  };
  std::vector<Cluster> active;
  for (std::size_t r = 0; r < n; ++r) active.push_back({static_cast<int>(by_name[r]), {by_name[r]}});

  auto linkage_distance = [&](const Cluster& a, const Cluster& b) {
    double acc = linkage == Linkage::single ? std::numeric_limits<double>::infinity() : 0.0;
    for (auto i : a.members) {
      for (auto j : b.members) {
        const double x = dist[i][j];
        switch (linkage) {
          case Linkage::average: acc += x; break;
          case Linkage::complete: acc = std::max(acc, x); break;
          case Linkage::single: acc = std::min(acc, x); break;
        }
      }
    }
    if (linkage == Linkage::average) acc /= static_cast<double>(a.members.size() * b.members.size());
    return acc;
  };
  auto cluster_name = [&](const Cluster& c) -> const std::string& { return vectors[c.members.front()].name; };

  double last_height = 0.0;
  while (active.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    // `active` stays sorted by cluster name, so scanning in order and
    // replacing only on strictly smaller distances keeps the lexicographic
    // tie-break.
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double x = linkage_distance(active[a], active[b]);
        if (x < best) {
          best = x;
          best_a = a;
          best_b = b;
        }
      }
    }
    Cluster merged;
    merged.members = active[best_a].members;
    merged.members.insert(merged.members.end(), active[best_b].members.begin(), active[best_b].members.end());
    std::sort(merged.members.begin(), merged.members.end(), [&](auto x, auto y) { return rank[x] < rank[y]; });
    // Average linkage can produce inversions only through rounding; clamp so
    // heights stay monotone.
    last_height = std::max(last_height, best);
    Dendrogram::Node node{active[best_a].node, active[best_b].node, last_height, cluster_name(active[best_a]),
                          merged.members.size()};
    d.nodes.push_back(node);
    merged.node = static_cast<int>(d.nodes.size()) - 1;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    active[best_a] = std::move(merged);
    std::sort(active.begin(), active.end(),
              [&](const Cluster& x, const Cluster& y) { return cluster_name(x) < cluster_name(y); });
  }
  return d;
}

namespace {

nlohmann::json node_json(const Dendrogram& d, int idx) {
  const auto& n = d.nodes[static_cast<std::size_t>(idx)];
  nlohmann::json j;
  if (n.left < 0) {
    j["name"] = n.name;
    j["height"] = 0.0;
    return j;
  }
  j["height"] = n.height;
  j["size"] = n.size;
  j["children"] = nlohmann::json::array({node_json(d, n.left), node_json(d, n.right)});
  return j;
}

void newick(const Dendrogram& d, int idx, double parent_height, std::string& out, bool with_lengths) {
  const auto& n = d.nodes[static_cast<std::size_t>(idx)];
  if (n.left < 0) {
    out += n.name;
  } else {
    out += '(';
    newick(d, n.left, n.height, out, with_lengths);
    out += ',';
    newick(d, n.right, n.height, out, with_lengths);
    out += ')';
  }
  if (with_lengths && parent_height >= 0) {
    out += ':';
    out += nlohmann::json(parent_height - n.height).dump();
  }
}

std::string canonical(const Dendrogram& d, int idx) {
  const auto& n = d.nodes[static_cast<std::size_t>(idx)];
  if (n.left < 0) return n.name;
  std::string a = canonical(d, n.left), b = canonical(d, n.right);
  if (b < a) std::swap(a, b);
  return "(" + a + "," + b + ")";
}

}  // namespace

nlohmann::json to_json(const Dendrogram& d) {
  nlohmann::json j;
  j["linkage"] = to_string(d.linkage);
  j["leaves"] = d.leaf_count;
  nlohmann::json merges = nlohmann::json::array();
  for (std::size_t m = d.leaf_count; m < d.nodes.size(); ++m) {
    const auto& n = d.nodes[m];
    merges.push_back({{"left", d.nodes[static_cast<std::size_t>(n.left)].name},
                      {"right", d.nodes[static_cast<std::size_t>(n.right)].name},
                      {"height", n.height},
                      {"size", n.size}});
  }
  j["merges"] = std::move(merges);
  j["root"] = node_json(d, static_cast<int>(d.nodes.size()) - 1);
  return j;
}

std::string to_newick(const Dendrogram& d) {
  std::string out;
  newick(d, static_cast<int>(d.nodes.size()) - 1, -1.0, out, true);
  return out + ";";
}

std::string topology(const Dendrogram& d) { return canonical(d, static_cast<int>(d.nodes.size()) - 1); }

// ---- correlation --------------------------------------------------------------

CorrelationMatrix correlation_matrix(std::span<const FeatureVector> vectors) {
  const std::size_t n = vectors.size();
  constexpr double kSlots = static_cast<double>(kFeatureSlots);
  std::vector<std::array<double, kFeatureSlots>> centered(n);
  std::vector<double> norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (double x : vectors[i].values) mean += x;
    mean /= kSlots;
    for (std::size_t k = 0; k < kFeatureSlots; ++k) {
      centered[i][k] = vectors[i].values[k] - mean;
      norm[i] += centered[i][k] * centered[i][k];
    }
    norm[i] = std::sqrt(norm[i]);
  }
  CorrelationMatrix m(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (norm[i] == 0.0) continue;
    m[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norm[j] == 0.0) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < kFeatureSlots; ++k) s += centered[i][k] * centered[j][k];
      const double r = std::clamp(s / (norm[i] * norm[j]), -1.0, 1.0);
      m[i][j] = m[j][i] = r;
    }
  }
  return m;
}

// ---- kiviat ----------------------------------------------------------------------

namespace {

std::array<std::optional<double>, kKiviatAxes.size()> kiviat_raw(const CharacteristicVector& v) {
  auto count = [](double x) { return std::log1p(x); };
  std::array<std::optional<double>, kKiviatAxes.size()> a;
  a[0] = count(static_cast<double>(v.mem_acc));
  if (v.redist_avg) a[1] = count(*v.redist_avg);
  a[2] = count(static_cast<double>(v.in_mem));
  a[3] = count(static_cast<double>(v.out_mem));
  a[4] = count(static_cast<double>(v.wgh_mem));
  a[5] = count(static_cast<double>(v.ops));
  a[6] = v.op_mem;
  a[7] = v.pr;
  a[8] = v.mpr;
  return a;
}

}  // namespace

std::vector<KiviatRow> kiviat_normalize(std::span<const std::pair<std::string, CharacteristicVector>> rows) {
  if (rows.empty()) throw Error("kiviat_normalize: no vectors");
  std::vector<KiviatRow> out;
  for (const auto& [id, v] : rows) out.push_back({id, kiviat_raw(v)});
  for (std::size_t a = 0; a < kKiviatAxes.size(); ++a) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : out) {
      if (!r.axes[a]) continue;
      lo = std::min(lo, *r.axes[a]);
      hi = std::max(hi, *r.axes[a]);
    }
    for (auto& r : out) {
      if (!r.axes[a]) continue;
      r.axes[a] = hi > lo ? (*r.axes[a] - lo) / (hi - lo) : 0.0;
    }
  }
  return out;
}

// ---- summary -----------------------------------------------------------------------

DiversitySummary diversity_summary(const Dendrogram& d) {
  if (d.leaf_count < 2) throw Error("diversity_summary: need at least two leaves");
  DiversitySummary s;
  double log_sum = 0.0;
  bool any_zero = false;
  for (std::size_t m = d.leaf_count; m < d.nodes.size(); ++m) {
    const double h = d.nodes[m].height;
    s.max_height = std::max(s.max_height, h);
    if (h <= 0.0) any_zero = true;
    else log_sum += std::log(h);
  }
  const auto merges = static_cast<double>(d.nodes.size() - d.leaf_count);
  s.geomean_height = any_zero ? 0.0 : std::exp(log_sum / merges);
  std::size_t above = 0;
  for (std::size_t i = 0; i < d.leaf_count; ++i) {
    if (d.first_merge(d.nodes[i].name).first > s.geomean_height) ++above;
  }
  s.fraction_above = static_cast<double>(above) / static_cast<double>(d.leaf_count);
  return s;
}

nlohmann::json to_json(const DiversitySummary& s) {
  return {{"geomean_height", s.geomean_height},
          {"max_height", s.max_height},
          {"fraction_above_geomean", s.fraction_above}};
}

}  // namespace nnbench
