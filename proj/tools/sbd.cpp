// sbd: key-edge codec, simulator, evaluator and benchmark from the command line.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbd/sbd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json quad_json(const sbd::Quadrilateral& q) {
  json a = json::array();
  for (const auto& p : q.vertices) {
    a.push_back(p.x);
    a.push_back(p.y);
  }
  return a;
}

sbd::Quadrilateral quad_from_json(const json& j) {
  if (!j.is_array() || j.size() != 8) throw std::runtime_error("quad must be an array of 8 numbers");
  sbd::Quadrilateral q;
  for (std::size_t k = 0; k < 8; ++k) (k % 2 ? q[k / 2].y : q[k / 2].x) = j.at(k).get<double>();
  return q;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text << '\n';
}

json report_json(const sbd::EvalReport& r) {
  json per_image = json::array();
  for (const auto& im : r.per_image)
    per_image.push_back({{"image", im.image}, {"tp", im.tp}, {"n_det", im.n_det}, {"n_gt", im.n_gt}});
  return {{"schema_version", kSchemaVersion},
          {"precision", r.precision},
          {"recall", r.recall},
          {"hmean", r.hmean},
          {"n_gt", r.n_gt},
          {"n_det", r.n_det},
          {"tp", r.tp},
          {"per_image", per_image}};
}

// Zero-extent axes get a one-pixel frame so the RoI stays valid.
sbd::Roi padded_tight_roi(const sbd::Quadrilateral& q) {
  sbd::Roi r = sbd::bounding_roi(q);
  if (r.x1 <= r.x0) r.x0 -= 0.5, r.x1 += 0.5;
  if (r.y1 <= r.y0) r.y0 -= 0.5, r.y1 += 0.5;
  return r;
}

struct EncodeOpts {
  std::string gt;
  std::string roi_mode = "tight";
  double image_w = 1280;
  double image_h = 720;
  int bins = sbd::kDefaultBins;
  std::string out;
};

int run_encode(const EncodeOpts& o) {
  if (o.roi_mode != "tight" && o.roi_mode != "image")
    throw std::runtime_error("--roi-mode must be 'tight' or 'image'");
  json images = json::array();
  for (const auto& [id, path] : sbd::list_text_files(o.gt)) {
    json recs = json::array();
    for (const auto& rec : sbd::parse_gt_file(path)) {
      const sbd::Roi roi = o.roi_mode == "image" ? sbd::Roi{0, 0, o.image_w, o.image_h}
                                                 : padded_tight_roi(rec.quad);
      const sbd::KeTargets kt = sbd::encode(rec.quad, roi, o.bins);
      recs.push_back({{"quad", quad_json(rec.quad)},
                      {"dont_care", rec.dont_care},
                      {"roi", {roi.x0, roi.y0, roi.x1, roi.y1}},
                      {"x_bins", kt.x_bins},
                      {"y_bins", kt.y_bins},
                      {"in_roi", kt.in_roi},
                      {"match_type", kt.match_type.str()},
                      {"degenerate", kt.degenerate}});
    }
    images.push_back({{"image", id}, {"records", recs}});
  }
  json doc = {{"schema_version", kSchemaVersion},
              {"kind", "ke_targets"},
              {"M", o.bins},
              {"roi_mode", o.roi_mode},
              {"images", images}};
  emit(o.out, doc.dump(2));
  return 0;
}

int run_decode(const std::string& targets, const std::string& out) {
  std::ifstream in(targets);
  if (!in) throw std::runtime_error("cannot open " + targets);
  const json doc = json::parse(in);
  if (doc.value("kind", "") != "ke_targets") throw std::runtime_error("not a ke_targets file");
  const int bins = doc.at("M").get<int>();

  double max_error = 0.0;
  double max_bound = 0.0;
  bool within = true;
  json images = json::array();
  for (const auto& im : doc.at("images")) {
    json recs = json::array();
    for (const auto& r : im.at("records")) {
      sbd::KeTargets kt;
      kt.bins = bins;
      kt.x_bins = r.at("x_bins").get<std::array<int, 4>>();
      kt.y_bins = r.at("y_bins").get<std::array<int, 4>>();
      kt.match_type = sbd::MatchType::from_string(r.at("match_type").get<std::string>());
      const auto rv = r.at("roi").get<std::array<double, 4>>();
      const sbd::Roi roi{rv[0], rv[1], rv[2], rv[3]};
      const sbd::Quadrilateral q = sbd::decode_bins(kt, roi);
      json rec = {{"quad", quad_json(sbd::canonical_clockwise(q))},
                  {"match_type", kt.match_type.str()}};
      if (r.contains("quad")) {
        const auto orig = quad_from_json(r.at("quad"));
        const auto ref = sbd::reconstruct_quad(sbd::sort_key_edges(orig), kt.match_type);
        double err = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
          err = std::max({err, std::abs(q[i].x - ref[i].x), std::abs(q[i].y - ref[i].y)});
        const double bound = 1.5 * std::max(roi.width(), roi.height()) / bins;
        rec["max_abs_error"] = err;
        rec["bound"] = bound;
        max_error = std::max(max_error, err);
        max_bound = std::max(max_bound, bound);
        within = within && err <= bound + 1e-9;
      }
      recs.push_back(rec);
    }
    images.push_back({{"image", im.at("image")}, {"records", recs}});
  }
  json doc_out = {{"schema_version", kSchemaVersion},
                  {"kind", "decoded"},
                  {"M", bins},
                  {"max_abs_error", max_error},
                  {"max_bound", max_bound},
                  {"within_bound", within},
                  {"images", images}};
  emit(out, doc_out.dump(2));
  return within ? 0 : 1;
}

struct SimulateOpts {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma, pnms, oks, iou, cutoff;
  std::optional<int> window, bins;
  std::optional<std::size_t> n_scenes;
  std::string out;
  std::string icdar_dir;
};

int run_simulate(const SimulateOpts& o) {
  sbd::RunConfig cfg;
  if (!o.config.empty()) sbd::apply(sbd::parse_key_values_file(o.config), cfg);
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.gamma) cfg.pipeline.rescore.gamma = *o.gamma;
  if (o.window) cfg.pipeline.rescore.window = *o.window;
  if (o.pnms) cfg.pipeline.pnms_threshold = *o.pnms;
  if (o.oks) cfg.pipeline.oks.threshold = *o.oks;
  if (o.iou) cfg.pipeline.iou_threshold = *o.iou;
  if (o.cutoff) cfg.pipeline.score_cutoff = *o.cutoff;
  if (o.bins) cfg.pipeline.bins = *o.bins;
  if (o.n_scenes) cfg.n_scenes = *o.n_scenes;
  if (auto e = sbd::validate(cfg); !e.empty()) throw std::runtime_error("invalid config: " + e);

  const auto res = sbd::simulate(cfg.sim, cfg.pipeline, cfg.n_scenes);

  if (!o.icdar_dir.empty()) {
    fs::create_directories(fs::path(o.icdar_dir) / "gt");
    fs::create_directories(fs::path(o.icdar_dir) / "det");
    for (const auto& sc : res.scenes) {
      std::vector<sbd::IcdarRecord> gt, det;
      for (const auto& q : sc.gt.quads) gt.push_back({q, "text", 1.0, false});
      for (const auto& d : sc.detections) det.push_back({d.quad, {}, d.score, false});
      std::ofstream g(fs::path(o.icdar_dir) / "gt" / ("gt_" + sc.image + ".txt"), std::ios::binary);
      sbd::write_gt(g, gt);
      sbd::write_det_file(fs::path(o.icdar_dir) / "det" / ("res_" + sc.image + ".txt"), det);
    }
  }

  json doc = report_json(res.report);
  doc["injected_fp"] = res.injected_fp;
  doc["surviving_fp"] = res.surviving_fp;
  doc["config"] = {{"seed", cfg.sim.seed},
                   {"n_quads", cfg.sim.n_quads},
                   {"n_scenes", cfg.n_scenes},
                   {"M", cfg.pipeline.bins},
                   {"gamma", cfg.pipeline.rescore.gamma},
                   {"window", cfg.pipeline.rescore.window},
                   {"pnms", cfg.pipeline.pnms_threshold},
                   {"oks", cfg.pipeline.oks.threshold},
                   {"iou", cfg.pipeline.iou_threshold},
                   {"score_cutoff", cfg.pipeline.score_cutoff}};
  emit(o.out, doc.dump(2));
  return 0;
}

std::vector<sbd::GtBox> load_gt(const fs::path& p) {
  std::vector<sbd::GtBox> out;
  for (const auto& r : sbd::parse_gt_file(p)) {
    const auto q = sbd::is_simple_quad(r.quad) ? r.quad : sbd::canonical_clockwise(r.quad);
    out.push_back({q, r.dont_care});
  }
  return out;
}

std::vector<sbd::Detection> load_det(const fs::path& p) {
  std::vector<sbd::Detection> out;
  for (const auto& r : sbd::parse_det_file(p)) {
    sbd::Detection d;
    d.quad = sbd::is_simple_quad(r.quad) ? r.quad : sbd::canonical_clockwise(r.quad);
    d.score = d.s_box = r.score;
    out.push_back(d);
  }
  return out;
}

int run_eval(const std::string& gt_dir, const std::string& det_dir, double iou, bool as_json) {
  if (!(iou > 0.0 && iou <= 1.0)) throw std::runtime_error("--iou must lie in (0, 1]");
  const auto gts = sbd::list_text_files(gt_dir);
  const auto dets = sbd::list_text_files(det_dir);
  for (const auto& [id, path] : dets)
    if (!gts.count(id)) throw std::runtime_error("detection file without ground truth: " + path.string());

  sbd::EvalReport report;
  for (const auto& [id, path] : gts) {
    const auto it = dets.find(id);
    const auto d = it == dets.end() ? std::vector<sbd::Detection>{} : load_det(it->second);
    report.add(sbd::evaluate_image(id, load_gt(path), d, iou));
  }
  if (as_json) {
    std::cout << report_json(report).dump(2) << '\n';
  } else {
    std::printf("precision %.4f  recall %.4f  hmean %.4f  (tp %zu, det %zu, gt %zu)\n",
                report.precision, report.recall, report.hmean, report.tp, report.n_det, report.n_gt);
  }
  return 0;
}

int run_bench(std::size_t n, int bins) {
  sbd::SimRng rng(0, 0, sbd::SimRng::Stream::scene);
  const sbd::Roi roi{0, 0, 112, 112};
  std::vector<sbd::Quadrilateral> quads(n);
  for (auto& q : quads)
    for (auto& p : q.vertices) p = {rng.uniform(0, 112), rng.uniform(0, 112)};

  double checksum = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& q : quads) {
    const auto kt = sbd::encode(q, roi, bins);
    const auto d = sbd::decode_bins(kt, roi);
    checksum += d[0].x + d[3].y;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json doc = {{"schema_version", kSchemaVersion},
                    {"n", n},
                    {"M", bins},
                    {"seconds", secs},
                    {"quads_per_second", secs > 0 ? static_cast<double>(n) / secs : 0.0},
                    {"checksum", checksum}};
  std::cout << doc.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential-free key-edge box codec and post-processing tools"};
  app.require_subcommand(1);

  EncodeOpts enc;
  auto* encode = app.add_subcommand("encode", "Encode GT quads into key-edge targets");
  encode->add_option("--gt", enc.gt, "GT file or directory of gt_*.txt files")->required();
  encode->add_option("--roi-mode", enc.roi_mode, "tight | image")->check(CLI::IsMember({"tight", "image"}));
  encode->add_option("--image-w", enc.image_w, "image width for --roi-mode image");
  encode->add_option("--image-h", enc.image_h, "image height for --roi-mode image");
  encode->add_option("--M", enc.bins, "bins per key edge")->check(CLI::Range(2, 1 << 20));
  encode->add_option("--out", enc.out, "output JSON (default stdout)");

  std::string targets, decode_out;
  auto* decode = app.add_subcommand("decode", "Decode key-edge targets back into quads");
  decode->add_option("--targets", targets, "ke_targets JSON from encode")->required();
  decode->add_option("--out", decode_out, "output JSON (default stdout)");

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "Run the synthetic detector pipeline");
  simulate->add_option("--config", sim.config, "key = value config file");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--gamma", sim.gamma, "rescoring weight in [0, 2]");
  simulate->add_option("--window", sim.window, "adjacent-score window");
  simulate->add_option("--pnms", sim.pnms, "polygon NMS IoU threshold");
  simulate->add_option("--oks", sim.oks, "OKS-NMS threshold");
  simulate->add_option("--iou", sim.iou, "evaluation IoU threshold");
  simulate->add_option("--cutoff", sim.cutoff, "minimum rescored confidence");
  simulate->add_option("--M", sim.bins, "bins per key edge");
  simulate->add_option("--n-scenes", sim.n_scenes, "number of scenes");
  simulate->add_option("--icdar-dir", sim.icdar_dir, "also write gt/ and det/ ICDAR files here");
  simulate->add_option("--out", sim.out, "metric JSON (default stdout)");

  std::string gt_dir, det_dir;
  double iou = sbd::kDefaultIouThreshold;
  bool as_json = false;
  auto* eval = app.add_subcommand("eval", "Score detections against ground truth");
  eval->add_option("--gt", gt_dir, "GT file or directory")->required();
  eval->add_option("--det", det_dir, "detection file or directory")->required();
  eval->add_option("--iou", iou, "IoU threshold");
  eval->add_flag("--json", as_json, "print metric JSON");

  std::size_t bench_n = 100000;
  int bench_bins = sbd::kDefaultBins;
  auto* bench = app.add_subcommand("bench", "Time encode + decode");
  bench->add_option("--n", bench_n, "number of quads");
  bench->add_option("--M", bench_bins, "bins per key edge")->check(CLI::Range(2, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*encode) return run_encode(enc);
    if (*decode) return run_decode(targets, decode_out);
    if (*simulate) return run_simulate(sim);
    if (*eval) return run_eval(gt_dir, det_dir, iou, as_json);
    if (*bench) return run_bench(bench_n, bench_bins);
  } catch (const std::exception& e) {
    std::cerr << "sbd: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
