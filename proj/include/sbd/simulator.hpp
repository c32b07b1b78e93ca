#pragma once

// Deterministic stand-in for a trained detector head. Generates scenes of
// convex quadrilaterals, renders the key-edge score distributions a head would
// emit for them (plus flat-distribution false positives), and runs the full
// decode -> rescore -> filter -> suppress -> evaluate pipeline.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by the
// standard. Real numbers are built from its raw 64-bit output directly instead
// of through <random> distributions, whose algorithms are
// implementation-defined. Each (seed, scene, purpose) triple gets its own
// stream seeded through splitmix64, so scenes can be generated in any order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbd/codec.hpp"
#include "sbd/evaluation.hpp"
#include "sbd/geometry.hpp"
#include "sbd/scoring.hpp"
#include "sbd/suppression.hpp"

namespace sbd {

struct SimConfig {
  double image_w = 1920.0;
  double image_h = 1080.0;
  std::size_t n_quads = 20;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  double heat_sigma = 1.0;
  double fp_rate = 0.0;
  double roi_jitter = 0.0;
};

/// Empty string when valid.
inline std::string validate(const SimConfig& c) {
  if (!(c.image_w > 0.0 && c.image_h > 0.0)) return "image dimensions must be positive";
  if (!(c.noise_sigma >= 0.0)) return "noise_sigma must be >= 0";
  if (!(c.heat_sigma > 0.0)) return "heat_sigma must be > 0";
  if (!(c.fp_rate >= 0.0 && c.fp_rate <= 1.0)) return "fp_rate must lie in [0, 1]";
  if (!(c.roi_jitter >= 0.0)) return "roi_jitter must be >= 0";
  return {};
}

struct SceneGT {
  std::vector<Quadrilateral> quads;
  double image_w = 0.0;
  double image_h = 0.0;
};

class SimRng {
 public:
  enum class Stream : std::uint64_t { scene = 1, render = 2 };

  SimRng(std::uint64_t seed, std::uint64_t scene, Stream stream)
      : engine_(splitmix64(splitmix64(seed ^ splitmix64(scene)) + static_cast<std::uint64_t>(stream))) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline Quadrilateral random_text_quad(SimRng& rng, double avail_w, double avail_h) {
  const double limit = std::min(avail_w, avail_h);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double w = rng.uniform(0.45, 0.95) * limit;
    const double h = w / rng.uniform(1.0, 3.0);
    const double angle = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
    const double ca = std::cos(angle), sa = std::sin(angle);
    const std::array<Point, 4> corners{Point{-w / 2, -h / 2}, Point{w / 2, -h / 2},
                                       Point{w / 2, h / 2}, Point{-w / 2, h / 2}};
    Quadrilateral q;
    for (std::size_t i = 0; i < 4; ++i) {
      // perspective-like skew: independent corner displacement
      const Point c{corners[i].x + rng.uniform(-0.12, 0.12) * h,
                    corners[i].y + rng.uniform(-0.12, 0.12) * h};
      q[i] = {ca * c.x - sa * c.y, sa * c.x + ca * c.y};
    }
    const Roi box = bounding_roi(q);
    const double fit = std::min({1.0, avail_w / box.width(), avail_h / box.height()});
    for (auto& p : q.vertices) p = fit * p;
    if (is_simple_quad(q) && is_convex_quad(q)) return canonical_clockwise(q);
  }
  const double w = 0.5 * avail_w, h = 0.25 * avail_h;
  return {{Point{0, 0}, Point{w, 0}, Point{w, h}, Point{0, h}}};
}

}  // namespace detail

/// Convex quads placed one per grid cell, so no two overlap.
inline SceneGT gen_scene(const SimConfig& cfg, std::uint64_t scene_index = 0) {
  if (auto e = validate(cfg); !e.empty()) throw std::invalid_argument("SimConfig: " + e);
  SceneGT scene;
  scene.image_w = cfg.image_w;
  scene.image_h = cfg.image_h;
  if (cfg.n_quads == 0) return scene;

  SimRng rng(cfg.seed, scene_index, SimRng::Stream::scene);
  const auto n = cfg.n_quads;
  const auto cols = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n) * cfg.image_w / cfg.image_h)));
  const std::size_t rows = (n + cols - 1) / cols;
  const double cell_w = cfg.image_w / static_cast<double>(cols);
  const double cell_h = cfg.image_h / static_cast<double>(rows);

  std::vector<std::size_t> cells(cols * rows);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
  for (std::size_t i = cells.size() - 1; i > 0; --i) std::swap(cells[i], cells[rng.below(i + 1)]);

  const double margin = 0.05 * std::min(cell_w, cell_h);
  const double avail_w = cell_w - 2 * margin;
  const double avail_h = cell_h - 2 * margin;
  for (std::size_t k = 0; k < n; ++k) {
    const double cx0 = static_cast<double>(cells[k] % cols) * cell_w + margin;
    const double cy0 = static_cast<double>(cells[k] / cols) * cell_h + margin;
    Quadrilateral q = detail::random_text_quad(rng, avail_w, avail_h);
    const Roi box = bounding_roi(q);
    const Point shift{cx0 - box.x0 + rng.uniform() * (avail_w - box.width()),
                      cy0 - box.y0 + rng.uniform() * (avail_h - box.height())};
    for (auto& p : q.vertices) p = p + shift;
    scene.quads.push_back(q);
  }
  return scene;
}

struct RawDetection {
  Roi roi;
  KeDistributions dists;
  double s_box = 0.0;
  bool injected_fp = false;
};

namespace detail {

inline std::vector<double> normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  for (double& x : v) x /= sum;
  return v;
}

inline std::vector<double> render_bump(SimRng& rng, int center, int bins, double heat_sigma,
                                       double noise_sigma) {
  std::vector<double> v(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    const double d = k - center;
    v[static_cast<std::size_t>(k)] = std::exp(-d * d / (2.0 * heat_sigma * heat_sigma));
  }
  if (noise_sigma > 0.0)
    for (double& x : v) x += noise_sigma * rng.uniform();
  return normalized(std::move(v));
}

inline std::vector<double> render_flat(SimRng& rng, std::size_t bins, double noise_sigma) {
  std::vector<double> v(bins, 1.0 / static_cast<double>(bins));
  if (noise_sigma > 0.0) {
    for (double& x : v) x += noise_sigma * rng.uniform();
    return normalized(std::move(v));
  }
  return v;
}

inline void render_match_scores(SimRng& rng, KeDistributions& kd, int peak,
                                double noise_sigma) {
  std::vector<double> m(kMatchTypeCount, peak < 0 ? 1.0 / kMatchTypeCount : 0.0);
  if (peak >= 0) m[static_cast<std::size_t>(peak)] = 1.0;
  if (noise_sigma > 0.0) {
    for (double& x : m) x += noise_sigma * rng.uniform();
    m = normalized(std::move(m));
  }
  std::copy(m.begin(), m.end(), kd.match_scores.begin());
}

inline Roi jittered_roi(SimRng& rng, const Quadrilateral& q, double jitter) {
  const Roi tight = bounding_roi(q);
  if (jitter <= 0.0) return tight;
  const double w = tight.width(), h = tight.height();
  Roi r{tight.x0 + rng.uniform(-jitter, jitter) * w, tight.y0 + rng.uniform(-jitter, jitter) * h,
        tight.x1 + rng.uniform(-jitter, jitter) * w, tight.y1 + rng.uniform(-jitter, jitter) * h};
  return r.valid() ? r : tight;
}

}  // namespace detail

inline std::size_t false_positive_count(const SimConfig& cfg) {
  return static_cast<std::size_t>(std::ceil(cfg.fp_rate * static_cast<double>(cfg.n_quads)));
}

/// One raw detection per GT quad (peaked distributions on the encoded bins),
/// followed by the injected false positives (flat distributions).
inline std::vector<RawDetection> render_detector_output(const SceneGT& scene, const SimConfig& cfg,
                                                        int bins = kDefaultBins,
                                                        std::uint64_t scene_index = 0) {
  if (auto e = validate(cfg); !e.empty()) throw std::invalid_argument("SimConfig: " + e);
  SimRng rng(cfg.seed, scene_index, SimRng::Stream::render);
  std::vector<RawDetection> out;

  for (const auto& q : scene.quads) {
    RawDetection rd;
    rd.roi = detail::jittered_roi(rng, q, cfg.roi_jitter);
    const KeTargets kt = encode(q, rd.roi, bins);
    for (std::size_t i = 0; i < 4; ++i) {
      rd.dists.x_dists[i] = detail::render_bump(rng, kt.x_bins[i], bins, cfg.heat_sigma, cfg.noise_sigma);
      rd.dists.y_dists[i] = detail::render_bump(rng, kt.y_bins[i], bins, cfg.heat_sigma, cfg.noise_sigma);
    }
    detail::render_match_scores(rng, rd.dists, kt.match_type.index(), cfg.noise_sigma);
    rd.s_box = rng.uniform(0.8, 1.0);
    out.push_back(std::move(rd));
  }

  const std::size_t n_fp = false_positive_count(cfg);
  for (std::size_t k = 0; k < n_fp; ++k) {
    RawDetection rd;
    const double w = rng.uniform(0.04, 0.12) * cfg.image_w;
    const double h = rng.uniform(0.04, 0.12) * cfg.image_h;
    const double x0 = rng.uniform(0.0, cfg.image_w - w);
    const double y0 = rng.uniform(0.0, cfg.image_h - h);
    rd.roi = {x0, y0, x0 + w, y0 + h};
    const auto m = static_cast<std::size_t>(bins);
    for (std::size_t i = 0; i < 4; ++i) {
      rd.dists.x_dists[i] = detail::render_flat(rng, m, cfg.noise_sigma);
      rd.dists.y_dists[i] = detail::render_flat(rng, m, cfg.noise_sigma);
    }
    detail::render_match_scores(rng, rd.dists, -1, cfg.noise_sigma);
    rd.s_box = rng.uniform(0.8, 1.0);
    rd.injected_fp = true;
    out.push_back(std::move(rd));
  }
  return out;
}

enum class Stage { validity, pnms, oks_nms };

struct PipelineConfig {
  int bins = kDefaultBins;
  RescoreParams rescore;
  double score_cutoff = 0.0;
  double pnms_threshold = kDefaultPnmsThreshold;
  OksParams oks;
  double iou_threshold = kDefaultIouThreshold;
  std::vector<Stage> stages{Stage::validity, Stage::pnms, Stage::oks_nms};
};

struct PipelineResult {
  std::vector<Detection> detections;
  std::vector<Detection> rejected;  // failed the validity filter
  ImageResult image;
};

/// Decodes each raw detection, rescores it, drops scores below the cutoff,
/// then applies the configured stages in order and evaluates against `gt`.
inline PipelineResult run_pipeline(const std::vector<RawDetection>& raw,
                                   const std::vector<GtBox>& gt, const PipelineConfig& cfg,
                                   std::string image = "scene_0") {
  std::vector<Detection> dets;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& rd = raw[i];
    const Decoded dec = decode(rd.dists, rd.roi, cfg.bins);
    Detection d;
    // Any fixed vertex order works downstream; clockwise is what files expect.
    d.quad = canonical_clockwise(dec.quad);
    d.match_type = dec.match_type;
    d.roi = rd.roi;
    d.s_box = rd.s_box;
    d.s_sbd = s_sbd(rd.dists, cfg.rescore.window);
    d.score = rescore(d.s_box, d.s_sbd, cfg.rescore.gamma);
    d.source = i;
    if (d.score >= cfg.score_cutoff) dets.push_back(d);
  }

  PipelineResult out;
  for (Stage s : cfg.stages) {
    switch (s) {
      case Stage::validity: {
        auto fr = validity_filter(dets);
        dets = std::move(fr.kept);
        out.rejected.insert(out.rejected.end(), fr.rejected.begin(), fr.rejected.end());
        break;
      }
      case Stage::pnms:
        dets = pnms(dets, cfg.pnms_threshold);
        break;
      case Stage::oks_nms:
        dets = oks_nms(dets, cfg.oks);
        break;
    }
  }
  out.image = evaluate_image(std::move(image), gt, dets, cfg.iou_threshold);
  out.detections = std::move(dets);
  return out;
}

inline std::vector<GtBox> to_gt_boxes(const SceneGT& scene) {
  std::vector<GtBox> gt;
  for (const auto& q : scene.quads) gt.push_back({q, false});
  return gt;
}

struct SceneOutput {
  std::string image;
  SceneGT gt;
  std::vector<Detection> detections;
};

struct SimulationResult {
  EvalReport report;
  std::vector<SceneOutput> scenes;
  std::size_t injected_fp = 0;
  std::size_t surviving_fp = 0;
  double max_fp_score = 0.0;  // highest rescored confidence among injected FPs
};

/// Generates, renders and evaluates `n_scenes` scenes; scene k uses streams
/// derived from (cfg.seed, k).
inline SimulationResult simulate(const SimConfig& cfg, const PipelineConfig& pcfg,
                                 std::size_t n_scenes = 1) {
  SimulationResult res;
  for (std::size_t k = 0; k < n_scenes; ++k) {
    const SceneGT scene = gen_scene(cfg, k);
    const auto raw = render_detector_output(scene, cfg, pcfg.bins, k);
    for (const auto& rd : raw) {
      if (!rd.injected_fp) continue;
      ++res.injected_fp;
      res.max_fp_score = std::max(
          res.max_fp_score, rescore(rd.s_box, s_sbd(rd.dists, pcfg.rescore.window), pcfg.rescore.gamma));
    }
    auto pr = run_pipeline(raw, to_gt_boxes(scene), pcfg, "scene_" + std::to_string(k));
    for (const auto& d : pr.detections) res.surviving_fp += raw[d.source].injected_fp;
    res.report.add(pr.image);
    res.scenes.push_back({pr.image.image, scene, std::move(pr.detections)});
  }
  return res;
}

}  // namespace sbd
