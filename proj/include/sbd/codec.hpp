#pragma once

// Sequential-free key-edge codec.
//
// A quadrilateral is described by its four sorted x values and four sorted y
// values (the key edges) plus a match type telling which sorted y belongs to
// which sorted x. Both are independent of the order in which the vertices were
// listed. Each key edge t is learned through its half target
// (t + t_mean) / 2, quantized into M uniform bins over the RoI; the half
// targets stay inside the RoI even when the border itself does not.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbd/geometry.hpp"

namespace sbd {

inline constexpr int kDefaultBins = 56;
inline constexpr int kMatchTypeCount = 24;

/// Axis-aligned proposal rectangle; the codec's coordinate frame.
struct Roi {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool valid() const {
    return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) && std::isfinite(y1) &&
           x1 > x0 && y1 > y0;
  }

  friend bool operator==(const Roi&, const Roi&) = default;
};

/// Tight axis-aligned bounding rectangle of a quad.
inline Roi bounding_roi(const Quadrilateral& q) {
  Roi r{q[0].x, q[0].y, q[0].x, q[0].y};
  for (const auto& p : q.vertices) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

struct SortedCoords {
  std::array<double, 4> xs{};  // ascending
  std::array<double, 4> ys{};  // ascending
  double x_mean = 0.0;
  double y_mean = 0.0;

  friend bool operator==(const SortedCoords&, const SortedCoords&) = default;
};

/// One of the 24 pairings of y ranks to x ranks. perm[i] is the 1-based y rank
/// paired with x rank i + 1; index is the position in the lexicographic list
/// 1234, 1243, ..., 4321.
class MatchType {
 public:
  MatchType() : MatchType(std::array<int, 4>{1, 2, 3, 4}) {}

  explicit MatchType(const std::array<int, 4>& perm) : perm_(perm) {
    std::array<int, 4> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<int, 4>{1, 2, 3, 4})
      throw std::invalid_argument("MatchType: not a permutation of 1..4");
    const auto& table = all_perms();
    index_ = static_cast<int>(std::find(table.begin(), table.end(), perm) - table.begin());
  }

  static MatchType from_index(int index) {
    if (index < 0 || index >= kMatchTypeCount)
      throw std::out_of_range("MatchType: index outside 0..23");
    return MatchType(all_perms()[static_cast<std::size_t>(index)]);
  }

  /// Parses the four-digit form, e.g. "2413".
  static MatchType from_string(std::string_view s) {
    if (s.size() != 4) throw std::invalid_argument("MatchType: expected four digits");
    std::array<int, 4> p{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (s[i] < '1' || s[i] > '4') throw std::invalid_argument("MatchType: digit outside 1..4");
      p[i] = s[i] - '0';
    }
    return MatchType(p);
  }

  const std::array<int, 4>& perm() const { return perm_; }
  int index() const { return index_; }

  std::string str() const {
    std::string s(4, '0');
    for (std::size_t i = 0; i < 4; ++i) s[i] = static_cast<char>('0' + perm_[i]);
    return s;
  }

  static const std::array<std::array<int, 4>, kMatchTypeCount>& all_perms() {
    static const auto table = [] {
      std::array<std::array<int, 4>, kMatchTypeCount> t{};
      std::array<int, 4> p{1, 2, 3, 4};
      for (auto& row : t) {
        row = p;
        std::next_permutation(p.begin(), p.end());
      }
      return t;
    }();
    return table;
  }

  friend bool operator==(const MatchType& a, const MatchType& b) { return a.perm_ == b.perm_; }

 private:
  std::array<int, 4> perm_;
  int index_ = 0;
};

namespace detail {

// Rank of each vertex along one axis. Ties are broken by the other coordinate
// and then by the vertex index, so the ranking depends on the vertex multiset
// except for exactly repeated vertices.
inline std::array<int, 4> axis_ranks(const Quadrilateral& q, bool along_x) {
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  auto key = [&](std::size_t i) {
    const Point& p = q[i];
    return along_x ? std::pair{p.x, p.y} : std::pair{p.y, p.x};
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::array<int, 4> rank{};
  for (std::size_t r = 0; r < 4; ++r) rank[order[r]] = static_cast<int>(r);
  return rank;
}

}  // namespace detail

inline SortedCoords sort_key_edges(const Quadrilateral& q) {
  SortedCoords sc;
  for (std::size_t i = 0; i < 4; ++i) {
    sc.xs[i] = q[i].x;
    sc.ys[i] = q[i].y;
  }
  std::sort(sc.xs.begin(), sc.xs.end());
  std::sort(sc.ys.begin(), sc.ys.end());
  sc.x_mean = (sc.xs[0] + sc.xs[1] + sc.xs[2] + sc.xs[3]) / 4.0;
  sc.y_mean = (sc.ys[0] + sc.ys[1] + sc.ys[2] + sc.ys[3]) / 4.0;
  return sc;
}

inline MatchType compute_match_type(const Quadrilateral& q) {
  const auto xr = detail::axis_ranks(q, true);
  const auto yr = detail::axis_ranks(q, false);
  std::array<int, 4> perm{};
  for (std::size_t v = 0; v < 4; ++v) perm[static_cast<std::size_t>(xr[v])] = yr[v] + 1;
  return MatchType(perm);
}

/// Vertex i is (xs[i], ys[perm[i] - 1]); output is in x-rank order.
inline Quadrilateral reconstruct_quad(const SortedCoords& sc, const MatchType& mt) {
  Quadrilateral q;
  for (std::size_t i = 0; i < 4; ++i)
    q[i] = {sc.xs[i], sc.ys[static_cast<std::size_t>(mt.perm()[i] - 1)]};
  return q;
}

inline double half_transform(double t, double t_mean) { return (t + t_mean) / 2.0; }
inline double inverse_half_transform(double h, double t_mean) { return 2.0 * h - t_mean; }

/// Classification labels of one quad: bins for the four x and four y key
/// edges, whether each half target fell inside the RoI before clamping, and the
/// match type.
struct KeTargets {
  std::array<int, 4> x_bins{};
  std::array<int, 4> y_bins{};
  std::array<bool, 8> in_roi{};  // x key edges first, then y
  MatchType match_type;
  int bins = kDefaultBins;
  bool degenerate = false;  // zero extent along x or y

  friend bool operator==(const KeTargets&, const KeTargets&) = default;
};

namespace detail {

inline int bin_of(double h, double lo, double extent, int bins) {
  const double f = std::floor((h - lo) * bins / extent);
  return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(bins - 1)));
}

inline double bin_center(int bin, double lo, double extent, int bins) {
  return lo + (bin + 0.5) * extent / bins;
}

inline void check_frame(const Roi& roi, int bins) {
  if (bins < 2) throw std::invalid_argument("bin count must be at least 2");
  if (!roi.valid()) throw std::invalid_argument("RoI must have positive width and height");
}

}  // namespace detail

inline KeTargets encode(const Quadrilateral& q, const Roi& roi, int bins = kDefaultBins) {
  detail::check_frame(roi, bins);
  if (!q.finite()) throw std::invalid_argument("encode: non-finite vertex");
  const SortedCoords sc = sort_key_edges(q);
  KeTargets kt;
  kt.bins = bins;
  kt.match_type = compute_match_type(q);
  kt.degenerate = sc.xs[3] == sc.xs[0] || sc.ys[3] == sc.ys[0];
  for (std::size_t i = 0; i < 4; ++i) {
    const double hx = half_transform(sc.xs[i], sc.x_mean);
    const double hy = half_transform(sc.ys[i], sc.y_mean);
    kt.x_bins[i] = detail::bin_of(hx, roi.x0, roi.width(), bins);
    kt.y_bins[i] = detail::bin_of(hy, roi.y0, roi.height(), bins);
    kt.in_roi[i] = hx >= roi.x0 && hx < roi.x1;
    kt.in_roi[4 + i] = hy >= roi.y0 && hy < roi.y1;
  }
  return kt;
}

namespace detail {

// Bin centers -> half values -> key edges; t_mean is recovered as the mean of
// the half values, since mean((t_i + t_mean) / 2) == t_mean.
inline std::array<double, 4> decode_axis(const std::array<int, 4>& b, double lo, double extent,
                                         int bins) {
  std::array<double, 4> h{};
  for (std::size_t i = 0; i < 4; ++i) h[i] = bin_center(b[i], lo, extent, bins);
  const double mean = (h[0] + h[1] + h[2] + h[3]) / 4.0;
  std::array<double, 4> t{};
  for (std::size_t i = 0; i < 4; ++i) t[i] = inverse_half_transform(h[i], mean);
  return t;
}

}  // namespace detail

/// Decoded vertices may lie outside the RoI; nothing is clamped.
inline Quadrilateral decode_bins(const KeTargets& kt, const Roi& roi) {
  detail::check_frame(roi, kt.bins);
  SortedCoords sc;
  sc.xs = detail::decode_axis(kt.x_bins, roi.x0, roi.width(), kt.bins);
  sc.ys = detail::decode_axis(kt.y_bins, roi.y0, roi.height(), kt.bins);
  sc.x_mean = (sc.xs[0] + sc.xs[1] + sc.xs[2] + sc.xs[3]) / 4.0;
  sc.y_mean = (sc.ys[0] + sc.ys[1] + sc.ys[2] + sc.ys[3]) / 4.0;
  return reconstruct_quad(sc, kt.match_type);
}

/// Raw head output: one M-way score vector per key edge plus 24 match-type
/// scores.
struct KeDistributions {
  std::array<std::vector<double>, 4> x_dists;
  std::array<std::vector<double>, 4> y_dists;
  std::array<double, kMatchTypeCount> match_scores{};

  /// The eight key-edge distributions, x first.
  std::array<std::span<const double>, 8> all() const {
    return {x_dists[0], x_dists[1], x_dists[2], x_dists[3],
            y_dists[0], y_dists[1], y_dists[2], y_dists[3]};
  }
};

/// Empty string when valid; otherwise a description of the first problem.
inline std::string validate(const KeDistributions& kd, int bins, double tol = 1e-6) {
  auto check = [&](std::span<const double> v, std::size_t len, const char* what) -> std::string {
    if (v.size() != len) return std::string(what) + ": wrong length";
    double sum = 0.0;
    for (double s : v) {
      if (!(s >= 0.0)) return std::string(what) + ": negative or NaN score";
      sum += s;
    }
    if (std::abs(sum - 1.0) > tol) return std::string(what) + ": does not sum to 1";
    return {};
  };
  for (auto d : kd.all())
    if (auto e = check(d, static_cast<std::size_t>(bins), "key-edge distribution"); !e.empty()) return e;
  return check(kd.match_scores, kd.match_scores.size(), "match scores");
}

/// Index of the largest entry; ties go to the lowest index.
inline int argmax(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("argmax: empty vector");
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct Decoded {
  Quadrilateral quad;  // x-rank order
  MatchType match_type;
};

inline Decoded decode(const KeDistributions& kd, const Roi& roi, int bins = kDefaultBins) {
  KeTargets kt;
  kt.bins = bins;
  for (std::size_t i = 0; i < 4; ++i) {
    if (static_cast<int>(kd.x_dists[i].size()) != bins ||
        static_cast<int>(kd.y_dists[i].size()) != bins)
      throw std::invalid_argument("decode: distribution length differs from bin count");
    kt.x_bins[i] = argmax(kd.x_dists[i]);
    kt.y_bins[i] = argmax(kd.y_dists[i]);
  }
  kt.match_type = MatchType::from_index(argmax(kd.match_scores));
  return {decode_bins(kt, roi), kt.match_type};
}

}  // namespace sbd
