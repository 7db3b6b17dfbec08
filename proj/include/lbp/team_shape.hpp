#pragma once

// Opponent defensive shape as vertical bands: Ward agglomerative clustering of
// the opponents' x-coordinates, with the number of bands chosen by mean
// silhouette.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbp/error.hpp"
#include "lbp/geometry.hpp"
#include "lbp/ingestion.hpp"

namespace lbp {

struct ShapeConfig {
  bool exclude_goalkeeper = true;
  std::vector<int> k_candidates{2, 3, 4};
  double min_spread_m = 1.0;
  std::string linkage = "ward";  // only "ward" is supported

  friend bool operator==(const ShapeConfig&, const ShapeConfig&) = default;
};

/// Silhouette scores closer than this count as a tie (smaller k wins).
inline constexpr double kSilhouetteTieEps = 1e-12;

struct ClusterLine {
  int cluster_id = 0;
  double x_centroid = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  std::vector<std::string> member_ids;

  friend bool operator==(const ClusterLine&, const ClusterLine&) = default;
};

struct TeamShape {
  std::vector<ClusterLine> lines;  // ascending x_centroid
  int k = 0;
  std::optional<double> silhouette;  // empty when k = 1

  friend bool operator==(const TeamShape&, const TeamShape&) = default;
};

/// Mean silhouette of a 1D labelling; labels are 0..k-1. Singletons score 0.
inline double mean_silhouette_1d(std::span<const double> xs, std::span<const int> labels, int k) {
  const std::size_t n = xs.size();
  double total = 0.0;
  std::vector<double> sum(static_cast<std::size_t>(k));
  std::vector<int> count(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[static_cast<std::size_t>(labels[j])] += std::abs(xs[i] - xs[j]);
      ++count[static_cast<std::size_t>(labels[j])];
    }
    const auto own = static_cast<std::size_t>(labels[i]);
    if (count[own] == 0) continue;
    const double a = sum[own] / count[own];
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sum.size(); ++c)
      if (c != own && count[c] > 0) b = std::min(b, sum[c] / count[c]);
    const double denom = std::max(a, b);
    if (denom > 0.0 && std::isfinite(b)) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

/// Ward agglomeration of 1D values. Returns, for every requested k, the flat
/// labelling (labels ordered by ascending cluster mean). Merge ties resolve
/// to the lowest pair of cluster slots.
inline std::vector<std::vector<int>> ward_partitions_1d(std::span<const double> xs,
                                                        std::span<const int> ks) {
  struct Cluster {
    double mean;
    double size;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;
  clusters.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) clusters.push_back({xs[i], 1.0, {i}});

  std::vector<std::vector<int>> result(ks.size());
  auto snapshot = [&]() {
    std::vector<std::size_t> order(clusters.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return clusters[a].mean < clusters[b].mean; });
    std::vector<int> labels(xs.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank)
      for (std::size_t m : clusters[order[rank]].members) labels[m] = static_cast<int>(rank);
    for (std::size_t q = 0; q < ks.size(); ++q)
      if (static_cast<std::size_t>(ks[q]) == clusters.size()) result[q] = labels;
  };

  snapshot();
  while (clusters.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double d = clusters[a].mean - clusters[b].mean;
        const double cost = clusters[a].size * clusters[b].size / (clusters[a].size + clusters[b].size) * d * d;
        if (cost < best) {
          best = cost;
          best_a = a;
          best_b = b;
        }
      }
    }
    Cluster& into = clusters[best_a];
    Cluster& from = clusters[best_b];
    const double size = into.size + from.size;
    into.mean = (into.mean * into.size + from.mean * from.size) / size;
    into.size = size;
    into.members.insert(into.members.end(), from.members.begin(), from.members.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    snapshot();
  }
  return result;
}

/// Result of choosing k for 1D values: labels are 0..k-1 in ascending x.
struct Partition1D {
  int k = 1;
  std::vector<int> labels;
  std::optional<double> silhouette;
};

/// Ward clustering with silhouette-based k selection; the spread rule and the
/// tie-break (smaller k) are shared with the public entry point.
inline Partition1D select_partition_1d(std::span<const double> xs, const ShapeConfig& config) {
  Partition1D out;
  out.labels.assign(xs.size(), 0);
  if (xs.empty()) return out;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*hi - *lo < config.min_spread_m) return out;

  std::vector<int> ks;
  for (int k : config.k_candidates)
    if (k >= 2 && static_cast<std::size_t>(k) <= xs.size() - 1 &&
        std::find(ks.begin(), ks.end(), k) == ks.end())
      ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  if (ks.empty()) return out;

  const auto partitions = ward_partitions_1d(xs, ks);
  for (std::size_t q = 0; q < ks.size(); ++q) {
    const double s = mean_silhouette_1d(xs, partitions[q], ks[q]);
    if (!out.silhouette || s > *out.silhouette + kSilhouetteTieEps) {
      out.k = ks[q];
      out.labels = partitions[q];
      out.silhouette = s;
    }
  }
  return out;
}

/// Clusters opponents into vertical bands. The caller excludes the
/// goalkeeper beforehand when the configuration asks for it.
inline TeamShape cluster_team_shape(std::span<const PlayerPoint> opponents, const ShapeConfig& config) {
  if (opponents.empty()) throw EmptyOpponentsError("cluster_team_shape: no opponents");
  if (config.linkage != "ward") throw ConfigError("unsupported linkage '" + config.linkage + "'");

  // Stable input order makes the result independent of the caller's order.
  std::vector<std::size_t> order(opponents.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = opponents[a];
    const auto& pb = opponents[b];
    if (pa.pos.x != pb.pos.x) return pa.pos.x < pb.pos.x;
    if (pa.pos.y != pb.pos.y) return pa.pos.y < pb.pos.y;
    return pa.id < pb.id;
  });
  std::vector<double> xs;
  xs.reserve(order.size());
  for (std::size_t i : order) xs.push_back(opponents[i].pos.x);

  const Partition1D part = select_partition_1d(xs, config);

  TeamShape shape;
  shape.k = part.k;
  shape.silhouette = part.silhouette;
  shape.lines.resize(static_cast<std::size_t>(part.k));
  std::vector<double> sums(shape.lines.size(), 0.0);
  for (std::size_t c = 0; c < shape.lines.size(); ++c) {
    shape.lines[c].cluster_id = static_cast<int>(c);
    shape.lines[c].y_min = std::numeric_limits<double>::infinity();
    shape.lines[c].y_max = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const PlayerPoint& p = opponents[order[i]];
    auto& line = shape.lines[static_cast<std::size_t>(part.labels[i])];
    sums[static_cast<std::size_t>(part.labels[i])] += p.pos.x;
    line.y_min = std::min(line.y_min, p.pos.y);
    line.y_max = std::max(line.y_max, p.pos.y);
    line.member_ids.push_back(p.id);
  }
  for (std::size_t c = 0; c < shape.lines.size(); ++c)
    shape.lines[c].x_centroid = sums[c] / static_cast<double>(shape.lines[c].member_ids.size());
  return shape;
}

/// Number of bands whose segment the pass crosses. Direction-agnostic.
inline int count_lines_crossed(const PassVector& pass, const TeamShape& shape) {
  int n = 0;
  for (const auto& line : shape.lines)
    if (segment_intersects_band(pass, line.x_centroid, line.y_min, line.y_max)) ++n;
  return n;
}

}  // namespace lbp
