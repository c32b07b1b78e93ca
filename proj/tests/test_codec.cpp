#include <gtest/gtest.h>

#include <algorithm>
#include <array>

#include "oracles.hpp"
#include "sbd/codec.hpp"

namespace {

using sbd::Point;
using sbd::Quadrilateral;
using sbd::Roi;
namespace oracle = sbd::oracle;

// Vertex listing used throughout: the match type of this quad is "2413".
const Quadrilateral kExample{{Point{10, 40}, Point{20, 100}, Point{50, 0}, Point{80, 60}}};
const Roi kRoi112{0, 0, 112, 112};

std::array<Point, 4> multiset(const Quadrilateral& q) {
  std::array<Point, 4> v = q.vertices;
  std::sort(v.begin(), v.end(), [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  return v;
}

std::vector<Quadrilateral> all_orderings(const Quadrilateral& q) {
  std::vector<Quadrilateral> out;
  std::array<int, 4> order{0, 1, 2, 3};
  do {
    Quadrilateral r;
    for (std::size_t i = 0; i < 4; ++i) r[i] = q[static_cast<std::size_t>(order[i])];
    out.push_back(r);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

TEST(MatchType, LexicographicTable) {
  EXPECT_EQ(sbd::MatchType::from_index(0).str(), "1234");
  EXPECT_EQ(sbd::MatchType::from_index(1).str(), "1243");
  EXPECT_EQ(sbd::MatchType::from_index(2).str(), "1324");
  EXPECT_EQ(sbd::MatchType::from_index(22).str(), "4312");
  EXPECT_EQ(sbd::MatchType::from_index(23).str(), "4321");
  for (int i = 0; i < 24; ++i) EXPECT_EQ(sbd::MatchType::from_index(i).index(), i);
  EXPECT_EQ(sbd::MatchType::from_string("2413").index(), 10);
}

TEST(MatchType, RejectsNonPermutations) {
  EXPECT_THROW(sbd::MatchType::from_string("1123"), std::invalid_argument);
  EXPECT_THROW(sbd::MatchType::from_string("125"), std::invalid_argument);
  EXPECT_THROW(sbd::MatchType::from_index(24), std::out_of_range);
}

TEST(SortKeyEdges, Example) {
  const auto sc = sbd::sort_key_edges(kExample);
  EXPECT_EQ(sc.xs, (std::array<double, 4>{10, 20, 50, 80}));
  EXPECT_EQ(sc.ys, (std::array<double, 4>{0, 40, 60, 100}));
  EXPECT_EQ(sc.x_mean, 40.0);
  EXPECT_EQ(sc.y_mean, 50.0);
}

TEST(SortKeyEdges, SymmetricTies) {
  const Quadrilateral sq{{Point{0, 0}, Point{0, 10}, Point{10, 10}, Point{10, 0}}};
  const auto sc = sbd::sort_key_edges(sq);
  EXPECT_EQ(sc.xs, (std::array<double, 4>{0, 0, 10, 10}));
  EXPECT_EQ(sc.ys, (std::array<double, 4>{0, 0, 10, 10}));
}

TEST(SortKeyEdges, PermutationInvariant) {
  const auto ref = sbd::sort_key_edges(kExample);
  for (const auto& q : all_orderings(kExample)) EXPECT_EQ(sbd::sort_key_edges(q), ref);
}

TEST(ComputeMatchType, PairingExample) {
  const auto mt = sbd::compute_match_type(kExample);
  EXPECT_EQ(mt.str(), "2413");
  // (x_min, y_2), (x_2, y_max), (x_3, y_min), (x_max, y_3)
  const auto q = sbd::reconstruct_quad(sbd::sort_key_edges(kExample), mt);
  EXPECT_EQ(q[0], (Point{10, 40}));
  EXPECT_EQ(q[1], (Point{20, 100}));
  EXPECT_EQ(q[2], (Point{50, 0}));
  EXPECT_EQ(q[3], (Point{80, 60}));
}

TEST(ComputeMatchType, AscendingDiagonalIsIdentity) {
  const Quadrilateral q{{Point{0, 0}, Point{1, 1}, Point{2, 2}, Point{3, 3}}};
  EXPECT_EQ(sbd::compute_match_type(q).str(), "1234");
}

TEST(ComputeMatchType, AgreesWithExhaustiveSearch) {
  oracle::Rng rng(31);
  for (int k = 0; k < 1000; ++k) {
    const auto q = oracle::random_quad(rng, 0, 1000);
    const auto hits = oracle::matching_perm_indices(q);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(sbd::compute_match_type(q).index(), hits.front());
  }
}

TEST(ComputeMatchType, TiesStayOrderIndependent) {
  const Quadrilateral sq{{Point{0, 0}, Point{0, 10}, Point{10, 10}, Point{10, 0}}};
  const auto ref = sbd::compute_match_type(sq);
  for (const auto& q : all_orderings(sq)) EXPECT_EQ(sbd::compute_match_type(q), ref);
}

TEST(ReconstructQuad, TieDegeneracy) {
  sbd::SortedCoords sc{{0, 0, 10, 10}, {0, 0, 10, 10}, 5, 5};
  EXPECT_EQ(multiset(sbd::reconstruct_quad(sc, sbd::MatchType::from_string("1234"))),
            multiset(sbd::reconstruct_quad(sc, sbd::MatchType::from_string("2134"))));
}

TEST(ReconstructQuad, RoundTripsVertexMultiset) {
  oracle::Rng rng(32);
  for (int k = 0; k < 1000; ++k) {
    const auto q = oracle::random_quad(rng, -50, 500);
    const auto r = sbd::reconstruct_quad(sbd::sort_key_edges(q), sbd::compute_match_type(q));
    EXPECT_EQ(multiset(r), multiset(q));
  }
}

TEST(HalfTransform, ArithmeticAndFixedPoint) {
  EXPECT_EQ(sbd::half_transform(10, 40), 25.0);
  EXPECT_EQ(sbd::half_transform(7.5, 7.5), 7.5);
  EXPECT_EQ(sbd::inverse_half_transform(25, 40), 10.0);
}

TEST(HalfTransform, MeanRecovery) {
  oracle::Rng rng(33);
  for (int k = 0; k < 1000; ++k) {
    std::array<double, 4> t{};
    for (auto& v : t) v = oracle::uniform(rng, -1000, 1000);
    const double mean = (t[0] + t[1] + t[2] + t[3]) / 4;
    double hsum = 0;
    for (double v : t) hsum += sbd::half_transform(v, mean);
    EXPECT_NEAR(hsum / 4, mean, 1e-9);
  }
}

TEST(Encode, WorkedExample) {
  const auto kt = sbd::encode(kExample, kRoi112, 56);
  EXPECT_EQ(kt.x_bins, (std::array<int, 4>{12, 15, 22, 30}));
  EXPECT_EQ(kt.y_bins, (std::array<int, 4>{12, 22, 27, 37}));
  EXPECT_EQ(kt.match_type.str(), "2413");
  for (bool f : kt.in_roi) EXPECT_TRUE(f);
  EXPECT_FALSE(kt.degenerate);
}

TEST(Encode, CornerSymmetry) {
  const Quadrilateral q{{Point{0, 0}, Point{112, 0}, Point{112, 112}, Point{0, 112}}};
  const auto kt = sbd::encode(q, kRoi112, 56);
  EXPECT_EQ(kt.x_bins, (std::array<int, 4>{14, 14, 42, 42}));
  EXPECT_EQ(kt.y_bins, (std::array<int, 4>{14, 14, 42, 42}));
}

TEST(Encode, BorderOutsideRoiStillInside) {
  // x = 150 is outside [0, 112] but its half target (150 + 60) / 2 = 105 is not
  const Quadrilateral q{{Point{10, 20}, Point{30, 80}, Point{50, 40}, Point{150, 60}}};
  const auto sc = sbd::sort_key_edges(q);
  EXPECT_EQ(sc.x_mean, 60.0);
  const auto kt = sbd::encode(q, kRoi112, 56);
  EXPECT_TRUE(kt.in_roi[3]);
  EXPECT_EQ(kt.x_bins[3], 52);
  const auto d = sbd::decode_bins(kt, kRoi112);
  EXPECT_GT(d[3].x, 112.0);
  EXPECT_NEAR(d[3].x, 150.0, 3.0);
}

TEST(Encode, OutOfRoiTargetsClampAndFlag) {
  const Quadrilateral q{{Point{200, 10}, Point{260, 20}, Point{230, 50}, Point{210, 40}}};
  const auto kt = sbd::encode(q, kRoi112, 56);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(kt.x_bins[i], 55);
    EXPECT_FALSE(kt.in_roi[i]);
    EXPECT_TRUE(kt.in_roi[4 + i]);
  }
}

TEST(Encode, DegenerateFlaggedButEncoded) {
  const Quadrilateral q{{Point{5, 5}, Point{5, 9}, Point{5, 20}, Point{5, 30}}};
  const auto kt = sbd::encode(q, kRoi112, 56);
  EXPECT_TRUE(kt.degenerate);
}

TEST(Encode, RejectsBadFrame) {
  EXPECT_THROW(sbd::encode(kExample, Roi{0, 0, 0, 10}, 56), std::invalid_argument);
  EXPECT_THROW(sbd::encode(kExample, kRoi112, 1), std::invalid_argument);
}

TEST(Encode, SequentialFreedom) {
  oracle::Rng rng(34);
  for (int k = 0; k < 200; ++k) {
    const auto q = oracle::random_quad(rng, 0, 112);
    const auto ref = sbd::encode(q, kRoi112, 56);
    for (const auto& r : all_orderings(q)) EXPECT_EQ(sbd::encode(r, kRoi112, 56), ref);
  }
}

TEST(Encode, BinsNondecreasing) {
  oracle::Rng rng(35);
  for (int k = 0; k < 1000; ++k) {
    const auto kt = sbd::encode(oracle::random_quad(rng, -50, 200), kRoi112, 56);
    EXPECT_TRUE(std::is_sorted(kt.x_bins.begin(), kt.x_bins.end()));
    EXPECT_TRUE(std::is_sorted(kt.y_bins.begin(), kt.y_bins.end()));
  }
}

TEST(DecodeBins, WorkedExample) {
  const auto kt = sbd::encode(kExample, kRoi112, 56);
  const auto d = sbd::decode_bins(kt, kRoi112);
  // halves (25, 31, 45, 61), recovered mean 40.5
  EXPECT_DOUBLE_EQ(d[0].x, 9.5);
  EXPECT_DOUBLE_EQ(d[1].x, 21.5);
  EXPECT_DOUBLE_EQ(d[2].x, 49.5);
  EXPECT_DOUBLE_EQ(d[3].x, 81.5);
  EXPECT_DOUBLE_EQ(d[0].y, 40);
  EXPECT_DOUBLE_EQ(d[1].y, 100);
  EXPECT_DOUBLE_EQ(d[2].y, 0);
  EXPECT_DOUBLE_EQ(d[3].y, 60);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(std::abs(d[i].x - kExample[i].x), 3.0);
    EXPECT_LE(std::abs(d[i].y - kExample[i].y), 3.0);
  }
}

TEST(DecodeBins, ExactOnBinCenters) {
  // halves (29, 29, 83, 83) are bin centers for w = 2
  const Quadrilateral q{{Point{2, 2}, Point{110, 2}, Point{110, 110}, Point{2, 110}}};
  const auto d = sbd::decode_bins(sbd::encode(q, kRoi112, 56), kRoi112);
  EXPECT_EQ(multiset(d), multiset(q));
}

TEST(DecodeBins, RoundTripBound) {
  oracle::Rng rng(36);
  const double w = 112.0 / 56;
  for (int k = 0; k < 1000; ++k) {
    const auto q = oracle::random_quad(rng, 0, 112);
    const auto kt = sbd::encode(q, kRoi112, 56);
    const auto d = sbd::decode_bins(kt, kRoi112);
    const auto ref = sbd::reconstruct_quad(sbd::sort_key_edges(q), kt.match_type);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_LE(std::abs(d[i].x - ref[i].x), 1.5 * w + 1e-9);
      EXPECT_LE(std::abs(d[i].y - ref[i].y), 1.5 * w + 1e-9);
    }
  }
}

sbd::KeDistributions one_hot(const sbd::KeTargets& kt, int bins) {
  sbd::KeDistributions kd;
  for (std::size_t i = 0; i < 4; ++i) {
    kd.x_dists[i].assign(static_cast<std::size_t>(bins), 0.0);
    kd.y_dists[i].assign(static_cast<std::size_t>(bins), 0.0);
    kd.x_dists[i][static_cast<std::size_t>(kt.x_bins[i])] = 1.0;
    kd.y_dists[i][static_cast<std::size_t>(kt.y_bins[i])] = 1.0;
  }
  kd.match_scores[static_cast<std::size_t>(kt.match_type.index())] = 1.0;
  return kd;
}

TEST(Decode, OneHotMatchesDecodeBins) {
  const auto kt = sbd::encode(kExample, kRoi112, 56);
  const auto kd = one_hot(kt, 56);
  EXPECT_EQ(sbd::validate(kd, 56), "");
  const auto dec = sbd::decode(kd, kRoi112, 56);
  EXPECT_EQ(dec.quad, sbd::decode_bins(kt, kRoi112));
  EXPECT_EQ(dec.match_type.str(), "2413");
}

TEST(Decode, UniformCollapsesToFirstBin) {
  sbd::KeDistributions kd;
  for (std::size_t i = 0; i < 4; ++i) {
    kd.x_dists[i].assign(56, 1.0 / 56);
    kd.y_dists[i].assign(56, 1.0 / 56);
  }
  kd.match_scores.fill(1.0 / 24);
  const auto dec = sbd::decode(kd, kRoi112, 56);
  EXPECT_EQ(dec.match_type.index(), 0);
  for (const auto& p : dec.quad.vertices) {
    EXPECT_DOUBLE_EQ(p.x, 1.0);
    EXPECT_DOUBLE_EQ(p.y, 1.0);
  }
}

TEST(Decode, ArgmaxStableUnderSmallNoise) {
  oracle::Rng rng(37);
  const auto kt = sbd::encode(kExample, kRoi112, 56);
  auto kd = one_hot(kt, 56);
  // peak 1, runner-up 0: noise below 0.5 cannot move the argmax
  for (auto* set : {&kd.x_dists, &kd.y_dists})
    for (auto& v : *set)
      for (auto& s : v) s += oracle::uniform(rng, 0.0, 0.49);
  const auto dec = sbd::decode(kd, kRoi112, 56);
  EXPECT_EQ(dec.quad, sbd::decode_bins(kt, kRoi112));
}

TEST(Decode, RejectsWrongLength) {
  auto kd = one_hot(sbd::encode(kExample, kRoi112, 56), 56);
  kd.x_dists[2].pop_back();
  EXPECT_THROW(sbd::decode(kd, kRoi112, 56), std::invalid_argument);
  EXPECT_NE(sbd::validate(kd, 56), "");
}

}  // namespace
