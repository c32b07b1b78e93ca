#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "sbd/icdar_io.hpp"

namespace {

using sbd::Point;
namespace oracle = sbd::oracle;

TEST(IcdarIo, ParsesGroundTruth) {
  std::istringstream in(
      "\xEF\xBB\xBF"
      "377,117,463,117,465,130,378,130,Genaxis Theatre\n"
      "\n"
      "493,115,519,115,519,131,493,131,[06]\n"
      "374,155,409,155,409,170,374,170,###\n"
      "10,10,20,10,20,20,10,20,a,b,c\n");
  const auto recs = sbd::parse_gt(in);
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[0].quad[0], (Point{377, 117}));
  EXPECT_EQ(recs[0].quad[3], (Point{378, 130}));
  EXPECT_EQ(recs[0].transcription, "Genaxis Theatre");
  EXPECT_FALSE(recs[0].dont_care);
  EXPECT_TRUE(recs[2].dont_care);
  EXPECT_EQ(recs[3].transcription, "a,b,c");
}

TEST(IcdarIo, ParsesDetections) {
  std::istringstream in("1.5,2,3,2,3,4,1.5,4,0.75\r\n");
  const auto recs = sbd::parse_det(in);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].quad[0], (Point{1.5, 2}));
  EXPECT_EQ(recs[0].score, 0.75);
}

TEST(IcdarIo, MalformedLineReportsLineNumber) {
  std::istringstream in("1,2,3,4,5,6,7,8,0.5\n1,2,3,x,5,6,7,8,0.5\n");
  try {
    sbd::parse_det(in);
    FAIL() << "expected ParseError";
  } catch (const sbd::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream short_line("1,2,3,4,5,6,7\n");
  EXPECT_THROW(sbd::parse_gt(short_line), sbd::ParseError);
  std::istringstream bad_score("1,2,3,4,5,6,7,8,1.5\n");
  EXPECT_THROW(sbd::parse_det(bad_score), sbd::ParseError);
}

TEST(IcdarIo, EmptyFile) {
  std::istringstream in("");
  EXPECT_TRUE(sbd::parse_gt(in).empty());
}

TEST(IcdarIo, WriteParseRoundTrip) {
  oracle::Rng rng(71);
  std::vector<sbd::IcdarRecord> recs;
  for (int i = 0; i < 1000; ++i) {
    sbd::IcdarRecord r;
    r.quad = oracle::random_convex_quad(rng, oracle::uniform(rng, 50, 1800), oracle::uniform(rng, 50, 1000), 5, 40);
    r.score = oracle::uniform(rng, 0, 1);
    recs.push_back(r);
  }
  std::stringstream buf;
  sbd::write_det(buf, recs);
  const auto back = sbd::parse_det(buf);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_LE(std::abs(back[i].quad[k].x - recs[i].quad[k].x), 0.005 + 1e-9);
      EXPECT_LE(std::abs(back[i].quad[k].y - recs[i].quad[k].y), 0.005 + 1e-9);
    }
    EXPECT_LE(std::abs(back[i].score - recs[i].score), 5e-7 + 1e-12);
  }
}

TEST(IcdarIo, GtWriterKeepsDontCare) {
  sbd::IcdarRecord a{{{Point{0, 0}, Point{4, 0}, Point{4, 2}, Point{0, 2}}}, "word", 1.0, false};
  sbd::IcdarRecord b = a;
  b.dont_care = true;
  std::stringstream buf;
  sbd::write_gt(buf, {a, b});
  const auto back = sbd::parse_gt(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].transcription, "word");
  EXPECT_TRUE(back[1].dont_care);
}

TEST(IcdarIo, ImageIdsAndDirectoryListing) {
  EXPECT_EQ(sbd::image_id("gt_img_12.txt"), "img_12");
  EXPECT_EQ(sbd::image_id("res_img_12.txt"), "img_12");
  EXPECT_EQ(sbd::image_id("other.txt"), "other");

  const auto dir = std::filesystem::temp_directory_path() / "sbd_io_listing";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "gt_img_1.txt") << "0,0,1,0,1,1,0,1,x\n";
  std::ofstream(dir / "gt_img_2.txt") << "";
  std::ofstream(dir / "notes.md") << "ignored";
  const auto files = sbd::list_text_files(dir);
  EXPECT_EQ(files.size(), 2u);
  EXPECT_EQ(files.count("img_1"), 1u);
  EXPECT_EQ(sbd::parse_gt_file(files.at("img_1")).size(), 1u);
  EXPECT_THROW(sbd::list_text_files(dir / "missing"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // namespace
