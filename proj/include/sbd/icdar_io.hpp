#pragma once

// ICDAR-style text files: one quadrilateral per line,
//   GT:         x1,y1,x2,y2,x3,y3,x4,y4,transcription   ("###" = don't care)
//   detections: x1,y1,x2,y2,x3,y3,x4,y4,score

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sbd/geometry.hpp"

namespace sbd {

struct IcdarRecord {
  Quadrilateral quad;
  std::string transcription;
  double score = 1.0;
  bool dont_care = false;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, std::size_t line, const std::string& what)
      : std::runtime_error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline bool parse_real(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

enum class RecordKind { gt, det };

inline std::vector<IcdarRecord> parse_records(std::istream& in, const std::string& where,
                                              RecordKind kind) {
  std::vector<IcdarRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (lineno == 1 && sv.starts_with("\xEF\xBB\xBF")) sv.remove_prefix(3);
    if (trim(sv).empty()) continue;

    IcdarRecord rec;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      const auto comma = sv.find(',', pos);
      if (comma == std::string_view::npos)
        throw ParseError(where, lineno, "expected 8 coordinates followed by a field");
      double v = 0.0;
      if (!parse_real(sv.substr(pos, comma - pos), v))
        throw ParseError(where, lineno, "invalid coordinate '" +
                                            std::string(trim(sv.substr(pos, comma - pos))) + "'");
      auto& p = rec.quad[k / 2];
      (k % 2 ? p.y : p.x) = v;
      pos = comma + 1;
    }
    const std::string_view tail = sv.substr(pos);
    if (kind == RecordKind::gt) {
      // transcriptions may themselves contain commas
      rec.transcription = std::string(tail);
      while (!rec.transcription.empty() &&
             (rec.transcription.back() == '\r' || rec.transcription.back() == '\n'))
        rec.transcription.pop_back();
      rec.dont_care = trim(tail) == "###";
    } else {
      if (!parse_real(tail, rec.score) || rec.score < 0.0 || rec.score > 1.0)
        throw ParseError(where, lineno, "score must be a real in [0, 1]");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace detail

inline std::vector<IcdarRecord> parse_gt(std::istream& in, const std::string& where = "<input>") {
  return detail::parse_records(in, where, detail::RecordKind::gt);
}

inline std::vector<IcdarRecord> parse_det(std::istream& in, const std::string& where = "<input>") {
  return detail::parse_records(in, where, detail::RecordKind::det);
}

inline std::vector<IcdarRecord> parse_gt_file(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_gt(in, path.string());
}

inline std::vector<IcdarRecord> parse_det_file(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_det(in, path.string());
}

namespace detail {

inline void write_coords(std::ostream& out, const Quadrilateral& q) {
  char buf[64];
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& p = q[k / 2];
    std::snprintf(buf, sizeof buf, "%.2f,", k % 2 ? p.y : p.x);
    out << buf;
  }
}

}  // namespace detail

/// Coordinates with 2 decimals, score with 6.
inline void write_det(std::ostream& out, const std::vector<IcdarRecord>& recs) {
  char buf[32];
  for (const auto& r : recs) {
    detail::write_coords(out, r.quad);
    std::snprintf(buf, sizeof buf, "%.6f", r.score);
    out << buf << '\n';
  }
}

inline void write_gt(std::ostream& out, const std::vector<IcdarRecord>& recs) {
  for (const auto& r : recs) {
    detail::write_coords(out, r.quad);
    out << (r.dont_care ? std::string("###") : r.transcription) << '\n';
  }
}

inline void write_det_file(const std::filesystem::path& path, const std::vector<IcdarRecord>& recs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_det(out, recs);
}

/// Image id of an ICDAR file name: "gt_img_12.txt" and "res_img_12.txt" both
/// map to "img_12".
inline std::string image_id(const std::filesystem::path& file) {
  std::string stem = file.stem().string();
  for (std::string_view prefix : {"gt_", "res_"})
    if (stem.starts_with(prefix)) return stem.substr(prefix.size());
  return stem;
}

/// The .txt files of a directory keyed by image id, or a single file.
inline std::map<std::string, std::filesystem::path> list_text_files(
    const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::map<std::string, fs::path> out;
  if (fs::is_regular_file(path)) {
    out.emplace(image_id(path), path);
    return out;
  }
  if (!fs::is_directory(path)) throw std::runtime_error("no such file or directory: " + path.string());
  for (const auto& e : fs::directory_iterator(path))
    if (e.is_regular_file() && e.path().extension() == ".txt") out.emplace(image_id(e.path()), e.path());
  return out;
}

}  // namespace sbd
