#pragma once

// Brute-force reference implementations for differential testing. Nothing
// here calls into the production geometry, team_shape or detection code; the
// only shared pieces are the plain data types.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "lbp/ingestion.hpp"

namespace lbp::testkit {

inline constexpr int kOracleSamples = 10000;

struct OracleBand {
  double x_centroid = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

/// Walks 10^4 + 1 evenly spaced points along the pass and looks for the pair
/// of consecutive samples that straddles x_j; the crossing height is read off
/// between those two samples.
inline bool oracle_crosses_band(Point2 s, Point2 r, const OracleBand& band) {
  const double lo = s.x < r.x ? s.x : r.x;
  const double hi = s.x < r.x ? r.x : s.x;
  if (!(band.x_centroid - lo > 1e-9 && hi - band.x_centroid > 1e-9)) return false;
  double px = s.x, py = s.y;
  for (int k = 1; k <= kOracleSamples; ++k) {
    const double f = static_cast<double>(k) / kOracleSamples;
    const double qx = s.x + (r.x - s.x) * f;
    const double qy = s.y + (r.y - s.y) * f;
    const bool straddles = (px <= band.x_centroid && band.x_centroid <= qx) ||
                           (qx <= band.x_centroid && band.x_centroid <= px);
    if (straddles && px != qx) {
      const double w = (band.x_centroid - px) / (qx - px);
      const double y = py + (qy - py) * w;
      return y >= band.y_min - 1e-9 && y <= band.y_max + 1e-9;
    }
    px = qx;
    py = qy;
  }
  return false;
}

/// Minimum distance from p to 10^4 + 1 samples of the segment.
inline double oracle_segment_distance(Point2 p, Point2 s, Point2 r) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kOracleSamples; ++k) {
    const double f = static_cast<double>(k) / kOracleSamples;
    const double dx = s.x + (r.x - s.x) * f - p.x;
    const double dy = s.y + (r.y - s.y) * f - p.y;
    best = std::min(best, dx * dx + dy * dy);
  }
  return std::sqrt(best);
}

struct OracleClustering {
  int k = 1;
  std::vector<int> labels;  // input order; 0..k-1 by ascending x
  double silhouette = 0.0;  // 0 when k = 1
};

namespace detail {

inline double oracle_silhouette(const std::vector<double>& sorted, const std::vector<int>& cut_labels, int k) {
  const std::size_t n = sorted.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> dist_sum(static_cast<std::size_t>(k), 0.0);
    std::vector<double> count(static_cast<std::size_t>(k), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      dist_sum[static_cast<std::size_t>(cut_labels[j])] += std::fabs(sorted[i] - sorted[j]);
      count[static_cast<std::size_t>(cut_labels[j])] += 1.0;
    }
    const int own = cut_labels[i];
    if (count[static_cast<std::size_t>(own)] == 0.0) continue;  // singleton scores 0
    const double a = dist_sum[static_cast<std::size_t>(own)] / count[static_cast<std::size_t>(own)];
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c)
      if (c != own && count[static_cast<std::size_t>(c)] > 0.0)
        b = std::min(b, dist_sum[static_cast<std::size_t>(c)] / count[static_cast<std::size_t>(c)]);
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

}  // namespace detail

/// Exhaustive search over contiguous partitions of the sorted values for each
/// candidate k. Same conventions as production: spread below `min_spread`
/// gives k = 1, only 2 <= k <= n-1 is considered, and a later k must beat
/// the best so far by more than 1e-12.
inline OracleClustering oracle_cluster_1d(const std::vector<double>& xs, const std::vector<int>& k_candidates,
                                          double min_spread = 1.0) {
  OracleClustering out;
  out.labels.assign(xs.size(), 0);
  const std::size_t n = xs.size();
  if (n == 0) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = xs[order[i]];
  if (sorted.back() - sorted.front() < min_spread) return out;

  std::vector<int> ks(k_candidates);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  bool have = false;
  std::vector<int> best_labels;
  for (int k : ks) {
    if (k < 2 || k > static_cast<int>(n) - 1) continue;
    // Enumerate (k-1)-subsets of the n-1 gaps as bitmasks in increasing order.
    double best_k = -std::numeric_limits<double>::infinity();
    std::vector<int> best_k_labels;
    const std::uint32_t gaps = static_cast<std::uint32_t>(n - 1);
    for (std::uint32_t mask = 0; mask < (1u << gaps); ++mask) {
      if (std::popcount(mask) != k - 1) continue;
      std::vector<int> labels(n, 0);
      int c = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (mask & (1u << (i - 1))) ++c;
        labels[i] = c;
      }
      // Equal values may not be split across clusters.
      bool splits_tie = false;
      for (std::size_t i = 1; i < n; ++i)
        if (labels[i] != labels[i - 1] && sorted[i] == sorted[i - 1]) splits_tie = true;
      if (splits_tie) continue;
      const double s = detail::oracle_silhouette(sorted, labels, k);
      if (s > best_k) {
        best_k = s;
        best_k_labels = labels;
      }
    }
    if (best_k_labels.empty()) continue;
    if (!have || best_k > out.silhouette + 1e-12) {
      have = true;
      out.k = k;
      out.silhouette = best_k;
      best_labels = best_k_labels;
    }
  }
  if (!have) return out;
  for (std::size_t i = 0; i < n; ++i) out.labels[order[i]] = best_labels[i];
  return out;
}

struct OracleVerdict {
  bool is_lbp = false;
  int lines_crossed = 0;
  int bypassed = 0;
  bool forward = false;
};

/// Number of explicit bands the pass crosses.
inline int oracle_lines_crossed(Point2 s, Point2 r, const std::vector<OracleBand>& bands) {
  int n = 0;
  for (const auto& b : bands) n += oracle_crosses_band(s, r, b) ? 1 : 0;
  return n;
}

inline OracleVerdict oracle_lbp_on_bands(const PassSnapshot& snap, const std::vector<OracleBand>& bands,
                                         double bypass_radius, double min_forward);

/// Full verdict with the oracle's own clustering of the snapshot's opponents.
inline OracleVerdict oracle_lbp(const PassSnapshot& snap, bool exclude_goalkeeper = true,
                                const std::vector<int>& k_candidates = {2, 3, 4}, double min_spread = 1.0,
                                double bypass_radius = 10.0, double min_forward = 0.0) {
  std::vector<double> xs;
  std::vector<Point2> pts;
  for (const auto& p : snap.opponents) {
    if (exclude_goalkeeper && p.goalkeeper) continue;
    xs.push_back(p.pos.x);
    pts.push_back(p.pos);
  }
  const OracleClustering cl = oracle_cluster_1d(xs, k_candidates, min_spread);
  std::vector<OracleBand> bands(static_cast<std::size_t>(cl.k));
  std::vector<int> members(bands.size(), 0);
  for (auto& b : bands) {
    b.y_min = std::numeric_limits<double>::infinity();
    b.y_max = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto& b = bands[static_cast<std::size_t>(cl.labels[i])];
    b.x_centroid += pts[i].x;
    b.y_min = std::min(b.y_min, pts[i].y);
    b.y_max = std::max(b.y_max, pts[i].y);
    ++members[static_cast<std::size_t>(cl.labels[i])];
  }
  for (std::size_t c = 0; c < bands.size(); ++c)
    if (members[c] > 0) bands[c].x_centroid /= members[c];

  return oracle_lbp_on_bands(snap, bands, bypass_radius, min_forward);
}

/// Verdict for a given set of bands; used when the clustering is fixed.
inline OracleVerdict oracle_lbp_on_bands(const PassSnapshot& snap, const std::vector<OracleBand>& bands,
                                         double bypass_radius, double min_forward) {
  OracleVerdict v;
  v.lines_crossed = oracle_lines_crossed(snap.s, snap.r, bands);
  const double lo = std::min(snap.s.x, snap.r.x);
  const double hi = std::max(snap.s.x, snap.r.x);
  for (const auto& p : snap.opponents) {
    if (p.pos.x - lo > 1e-9 && hi - p.pos.x > 1e-9 &&
        oracle_segment_distance(p.pos, snap.s, snap.r) <= bypass_radius + 1e-9)
      ++v.bypassed;
  }
  v.forward = snap.r.x - snap.s.x > min_forward;
  v.is_lbp = snap.is_open_play && v.forward && v.bypassed >= 2 && v.lines_crossed >= 1;
  return v;
}

}  // namespace lbp::testkit
