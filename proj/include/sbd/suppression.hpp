#pragma once

// Post-processing of decoded detections: validity filtering, polygon NMS and
// keypoint-similarity NMS.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sbd/codec.hpp"
#include "sbd/geometry.hpp"

namespace sbd {

inline constexpr double kDefaultPnmsThreshold = 0.2;
inline constexpr double kDefaultOksThreshold = 0.9;

struct Detection {
  Quadrilateral quad;
  double s_box = 0.0;
  double s_sbd = 0.0;
  double score = 0.0;
  Roi roi;
  MatchType match_type;
  std::size_t source = 0;  // index of the raw detection it came from
};

enum class OksScale { sqrt_area };

struct OksParams {
  OksScale scale_mode = OksScale::sqrt_area;
  double threshold = kDefaultOksThreshold;
};

struct FilterResult {
  std::vector<Detection> kept;
  std::vector<Detection> rejected;
};

/// Keeps detections whose quad is simple with positive area. Order within
/// each list follows the input.
inline FilterResult validity_filter(const std::vector<Detection>& dets) {
  FilterResult r;
  for (const auto& d : dets) {
    if (is_simple_quad(d.quad) && polygon_area(d.quad) > 0.0)
      r.kept.push_back(d);
    else
      r.rejected.push_back(d);
  }
  return r;
}

namespace detail {

// Indices sorted by descending score; equal scores keep input order.
inline std::vector<std::size_t> score_order(const std::vector<Detection>& dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

template <typename Overlap>
std::vector<Detection> greedy_suppress(const std::vector<Detection>& dets, double threshold,
                                       Overlap overlap) {
  const auto order = score_order(dets);
  std::vector<bool> removed(dets.size(), false);
  std::vector<Detection> kept;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (removed[order[i]]) continue;
    const Detection& top = dets[order[i]];
    kept.push_back(top);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (!removed[order[j]] && overlap(top, dets[order[j]]) > threshold) removed[order[j]] = true;
    }
  }
  return kept;
}

// Vertices sorted by (x, y); pairs keypoints between two quads by x rank.
inline std::array<Point, 4> x_rank_order(const Quadrilateral& q) {
  std::array<Point, 4> v = q.vertices;
  std::stable_sort(v.begin(), v.end(),
                   [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  return v;
}

}  // namespace detail

/// Greedy polygon NMS: drops any detection whose IoU with a higher-scored kept
/// detection exceeds `threshold`. Output is in descending score order.
inline std::vector<Detection> pnms(const std::vector<Detection>& dets,
                                   double threshold = kDefaultPnmsThreshold) {
  return detail::greedy_suppress(dets, threshold, [](const Detection& a, const Detection& b) {
    return polygon_iou(a.quad, b.quad);
  });
}

/// Keypoint similarity over the four vertices, all weighted equally. The
/// scale is the square root of the area of the higher-scored detection (a on
/// ties). Throws std::invalid_argument if that area is zero.
inline double oks(const Detection& a, const Detection& b, const OksParams& = {}) {
  const Detection& ref = b.score > a.score ? b : a;
  const double s2 = polygon_area(ref.quad);
  if (!(s2 > 0.0)) throw std::invalid_argument("oks: reference detection has zero area");
  const auto pa = detail::x_rank_order(a.quad);
  const auto pb = detail::x_rank_order(b.quad);
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point d = pa[i] - pb[i];
    acc += std::exp(-dot(d, d) / (2.0 * s2));
  }
  return acc / 4.0;
}

inline std::vector<Detection> oks_nms(const std::vector<Detection>& dets,
                                      const OksParams& params = {}) {
  return detail::greedy_suppress(dets, params.threshold,
                                 [&](const Detection& a, const Detection& b) {
                                   return oks(a, b, params);
                                 });
}

}  // namespace sbd
