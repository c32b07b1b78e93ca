#pragma once

// Detection scoring in the style of the ICDAR robust-reading protocol:
// greedy one-to-one IoU matching, then precision / recall / Hmean.

#include <string>
#include <utility>
#include <vector>

#include "sbd/geometry.hpp"
#include "sbd/suppression.hpp"

namespace sbd {

inline constexpr double kDefaultIouThreshold = 0.5;

struct GtBox {
  Quadrilateral quad;
  bool dont_care = false;
};

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (gt index, det index)
  std::vector<std::size_t> unmatched_gt;                   // excludes don't-care boxes
  std::vector<std::size_t> unmatched_det;                  // false positives
  std::vector<std::size_t> ignored_det;                    // matched a don't-care box
};

/// Detections are taken in descending score order; each claims the unmatched
/// GT box with the highest IoU if that IoU reaches `iou_thresh`. A detection
/// that claims nothing but overlaps a don't-care box at the threshold is
/// ignored rather than counted. Non-simple quads overlap nothing, so such a
/// detection is a false positive and such a GT box goes unmatched.
inline Matching match_detections(const std::vector<GtBox>& gts,
                                 const std::vector<Detection>& dets,
                                 double iou_thresh = kDefaultIouThreshold) {
  Matching m;
  std::vector<bool> taken(gts.size(), false);
  std::vector<bool> gt_simple(gts.size());
  for (std::size_t gi = 0; gi < gts.size(); ++gi) gt_simple[gi] = is_simple_quad(gts[gi].quad);
  for (std::size_t di : detail::score_order(dets)) {
    const auto& dq = dets[di].quad;
    const bool det_simple = is_simple_quad(dq);
    double best = -1.0;
    std::size_t best_gt = gts.size();
    bool hits_dont_care = false;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      const double iou = det_simple && gt_simple[gi] ? polygon_iou(gts[gi].quad, dq) : 0.0;
      if (gts[gi].dont_care) {
        hits_dont_care = hits_dont_care || iou >= iou_thresh;
        continue;
      }
      if (!taken[gi] && iou > best) {
        best = iou;
        best_gt = gi;
      }
    }
    if (best_gt < gts.size() && best >= iou_thresh) {
      taken[best_gt] = true;
      m.pairs.emplace_back(best_gt, di);
    } else if (hits_dont_care) {
      m.ignored_det.push_back(di);
    } else {
      m.unmatched_det.push_back(di);
    }
  }
  for (std::size_t gi = 0; gi < gts.size(); ++gi)
    if (!gts[gi].dont_care && !taken[gi]) m.unmatched_gt.push_back(gi);
  return m;
}

struct Prh {
  double precision = 0.0;
  double recall = 0.0;
  double hmean = 0.0;
};

inline double harmonic_mean(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

inline Prh hmean(std::size_t tp, std::size_t n_det, std::size_t n_gt) {
  Prh out;
  out.precision = n_det ? static_cast<double>(tp) / static_cast<double>(n_det) : 0.0;
  out.recall = n_gt ? static_cast<double>(tp) / static_cast<double>(n_gt) : 0.0;
  out.hmean = harmonic_mean(out.precision, out.recall);
  return out;
}

struct ImageResult {
  std::string image;
  std::size_t tp = 0;
  std::size_t n_det = 0;
  std::size_t n_gt = 0;
};

struct EvalReport {
  std::size_t tp = 0;
  std::size_t n_det = 0;
  std::size_t n_gt = 0;
  double precision = 0.0;
  double recall = 0.0;
  double hmean = 0.0;
  std::vector<ImageResult> per_image;

  void add(const ImageResult& r) {
    per_image.push_back(r);
    tp += r.tp;
    n_det += r.n_det;
    n_gt += r.n_gt;
    const Prh prh = sbd::hmean(tp, n_det, n_gt);
    precision = prh.precision;
    recall = prh.recall;
    hmean = prh.hmean;
  }
};

inline ImageResult evaluate_image(std::string image, const std::vector<GtBox>& gts,
                                  const std::vector<Detection>& dets,
                                  double iou_thresh = kDefaultIouThreshold) {
  const Matching m = match_detections(gts, dets, iou_thresh);
  ImageResult r;
  r.image = std::move(image);
  r.tp = m.pairs.size();
  r.n_det = dets.size() - m.ignored_det.size();
  r.n_gt = m.pairs.size() + m.unmatched_gt.size();
  return r;
}

}  // namespace sbd
