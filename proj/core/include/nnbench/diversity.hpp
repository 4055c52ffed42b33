#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nnbench/characterize.hpp"
#include "nnbench/network.hpp"

namespace nnbench {

/// One slot per layer kind, in kAllKinds order.
inline constexpr std::size_t kFeatureSlots = kAllKinds.size();

/// raw: operation counts as is. log: log10(1 + ops) per slot (default; raw
/// counts let the largest networks dominate every distance).
enum class FeatureScale { raw, log };
std::string_view to_string(FeatureScale s) noexcept;
std::optional<FeatureScale> parse_feature_scale(std::string_view s);

struct FeatureVector {
  std::string name;
  std::array<double, kFeatureSlots> values{};
};

/// Analytic ops summed per layer kind; sparse layers contribute density-scaled ops.
FeatureVector feature_vector(const NetworkDescriptor& net, FeatureScale scale = FeatureScale::log);

enum class Linkage { average, complete, single };
std::string_view to_string(Linkage l) noexcept;
std::optional<Linkage> parse_linkage(std::string_view s);

/// Binary merge tree. nodes[0, leaf_count) are the leaves in input order,
/// every later node is a merge; the last node is the root.
struct Dendrogram {
  struct Node {
    int left = -1;
    int right = -1;
    double height = 0.0;
    std::string name;  ///< leaf name, or the smallest leaf name below a merge
    std::size_t size = 1;
  };
  std::vector<Node> nodes;
  std::size_t leaf_count = 0;
  Linkage linkage = Linkage::average;

  const Node& root() const { return nodes.back(); }
  /// Leaf names below `node`, sorted.
  std::vector<std::string> leaves(int node) const;
  /// Height of the merge in which leaf `name` first joins another cluster,
  /// together with the leaves it joins.
  std::pair<double, std::vector<std::string>> first_merge(std::string_view name) const;
};

/// Agglomerative clustering on Euclidean distances. Cluster distances are
/// recomputed from sorted leaf members, and ties go to the lexicographically
/// smallest (name, name) pair, so input order never matters.
Dendrogram hierarchical_cluster(std::span<const FeatureVector> vectors, Linkage linkage = Linkage::average);

nlohmann::json to_json(const Dendrogram& d);
std::string to_newick(const Dendrogram& d);
/// Height-free canonical form used to compare topologies.
std::string topology(const Dendrogram& d);

/// Pearson correlation across slots; rows/columns of zero-variance vectors are null.
using CorrelationMatrix = std::vector<std::vector<std::optional<double>>>;
CorrelationMatrix correlation_matrix(std::span<const FeatureVector> vectors);

/// The characteristic axes shown on a Kiviat chart (everything but com_ptt).
inline constexpr std::array<std::string_view, 9> kKiviatAxes = {
    "mem_acc", "redist_avg", "in_mem", "out_mem", "wgh_mem", "ops", "op_mem", "pr", "mpr"};

struct KiviatRow {
  std::string id;
  std::array<std::optional<double>, kKiviatAxes.size()> axes{};
};

/// Min-max scaling per axis over the supplied set. Count axes are log1p
/// transformed first. An axis where min == max maps to 0; absent values stay
/// absent and do not take part in the scaling.
std::vector<KiviatRow> kiviat_normalize(std::span<const std::pair<std::string, CharacteristicVector>> rows);

struct DiversitySummary {
  double geomean_height = 0.0;  ///< 0 when any merge height is 0
  double max_height = 0.0;
  double fraction_above = 0.0;  ///< leaves whose first merge is strictly above the geomean
};
DiversitySummary diversity_summary(const Dendrogram& d);
nlohmann::json to_json(const DiversitySummary& s);

}  // namespace nnbench
