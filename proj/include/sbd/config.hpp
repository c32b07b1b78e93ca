#pragma once

// Flat "key = value" configuration files for the simulator and pipeline.
// Blank lines and '#' comments are ignored. Keys:
//
//   image_w image_h n_quads seed noise_sigma heat_sigma fp_rate roi_jitter
//   M gamma window pnms oks iou score_cutoff n_scenes stages
//
// `stages` is a comma-separated list drawn from validity, pnms, oks_nms.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sbd/icdar_io.hpp"
#include "sbd/simulator.hpp"

namespace sbd {

using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::istream& in, const std::string& where = "<config>") {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) throw ParseError(where, lineno, "expected key = value");
    const auto key = detail::trim(sv.substr(0, eq));
    const auto value = detail::trim(sv.substr(eq + 1));
    if (key.empty()) throw ParseError(where, lineno, "empty key");
    kv[std::string(key)] = std::string(value);
  }
  return kv;
}

inline KeyValues parse_key_values_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_key_values(in, path.string());
}

struct RunConfig {
  SimConfig sim;
  PipelineConfig pipeline;
  std::size_t n_scenes = 1;
};

namespace detail {

inline double real_value(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_real(v, out)) throw std::invalid_argument("config key '" + key + "': expected a real");
  return out;
}

inline std::uint64_t uint_value(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw std::invalid_argument("config key '" + key + "': expected a non-negative integer");
  return out;
}

inline std::vector<Stage> parse_stages(const std::string& v) {
  std::vector<Stage> stages;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto name = trim(item);
    if (name == "validity")
      stages.push_back(Stage::validity);
    else if (name == "pnms")
      stages.push_back(Stage::pnms);
    else if (name == "oks_nms")
      stages.push_back(Stage::oks_nms);
    else
      throw std::invalid_argument("unknown stage '" + std::string(name) + "'");
  }
  return stages;
}

}  // namespace detail

/// Applies every key in `kv` on top of `cfg`. Unknown keys are an error.
inline void apply(const KeyValues& kv, RunConfig& cfg) {
  for (const auto& [key, v] : kv) {
    auto& s = cfg.sim;
    auto& p = cfg.pipeline;
    if (key == "image_w") s.image_w = detail::real_value(key, v);
    else if (key == "image_h") s.image_h = detail::real_value(key, v);
    else if (key == "n_quads") s.n_quads = detail::uint_value(key, v);
    else if (key == "seed") s.seed = detail::uint_value(key, v);
    else if (key == "noise_sigma") s.noise_sigma = detail::real_value(key, v);
    else if (key == "heat_sigma") s.heat_sigma = detail::real_value(key, v);
    else if (key == "fp_rate") s.fp_rate = detail::real_value(key, v);
    else if (key == "roi_jitter") s.roi_jitter = detail::real_value(key, v);
    else if (key == "M") p.bins = static_cast<int>(detail::uint_value(key, v));
    else if (key == "gamma") p.rescore.gamma = detail::real_value(key, v);
    else if (key == "window") p.rescore.window = static_cast<int>(detail::uint_value(key, v));
    else if (key == "pnms") p.pnms_threshold = detail::real_value(key, v);
    else if (key == "oks") p.oks.threshold = detail::real_value(key, v);
    else if (key == "iou") p.iou_threshold = detail::real_value(key, v);
    else if (key == "score_cutoff") p.score_cutoff = detail::real_value(key, v);
    else if (key == "n_scenes") cfg.n_scenes = detail::uint_value(key, v);
    else if (key == "stages") p.stages = detail::parse_stages(v);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

/// Empty string when valid.
inline std::string validate(const RunConfig& cfg) {
  if (auto e = validate(cfg.sim); !e.empty()) return e;
  const auto& p = cfg.pipeline;
  if (p.bins < 2) return "M must be at least 2";
  if (!(p.rescore.gamma >= 0.0 && p.rescore.gamma <= 2.0)) return "gamma must lie in [0, 2]";
  if (p.rescore.window < 1 || p.rescore.window > p.bins) return "window must lie in [1, M]";
  if (!(p.pnms_threshold >= 0.0 && p.pnms_threshold <= 1.0)) return "pnms must lie in [0, 1]";
  if (!(p.oks.threshold >= 0.0 && p.oks.threshold <= 1.0)) return "oks must lie in [0, 1]";
  if (!(p.iou_threshold > 0.0 && p.iou_threshold <= 1.0)) return "iou must lie in (0, 1]";
  return {};
}

}  // namespace sbd
