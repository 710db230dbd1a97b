#include <rvk/ransac.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include <rvk/rng.hpp>

namespace {

using rvk::NormalizedCluster;

Eigen::ArrayX2d cluster_from(const std::vector<std::pair<double, double>>& pts) {
  Eigen::ArrayX2d out(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out(static_cast<Eigen::Index>(k), 0) = pts[k].first;
    out(static_cast<Eigen::Index>(k), 1) = pts[k].second;
  }
  return out;
}

Eigen::ArrayX2d random_cluster(std::uint64_t seed, int n) {
  rvk::KeyedRng rng(seed, 55);
  Eigen::ArrayX2d out(n, 2);
  for (int k = 0; k < n; ++k) {
    out(k, 0) = rng.next_range(-1.0, 1.0);
    out(k, 1) = rng.next_range(-20.0, 20.0);
  }
  return out;
}

TEST(NormalizeCluster, EndpointsMapToCorners) {
  const auto nc = rvk::normalize_cluster(cluster_from({{0, 0}, {1, 2}}));
  EXPECT_DOUBLE_EQ(nc.pts(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(nc.pts(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(nc.pts(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(nc.pts(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(nc.offset(0), 0.0);
  EXPECT_DOUBLE_EQ(nc.offset(1), 0.0);
  EXPECT_DOUBLE_EQ(nc.scale(0), 1.0);
  EXPECT_DOUBLE_EQ(nc.scale(1), 2.0);
}

TEST(NormalizeCluster, DegenerateAxisMapsToHalf) {
  const auto nc = rvk::normalize_cluster(cluster_from({{3, 7}, {3, 7}, {3, 7}}));
  for (int k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(nc.pts(k, 0), 0.5);
    EXPECT_DOUBLE_EQ(nc.pts(k, 1), 0.5);
  }
  EXPECT_DOUBLE_EQ(nc.scale(0), 0.0);
  EXPECT_DOUBLE_EQ(nc.offset(0), 3.0);
}

TEST(NormalizeCluster, RandomClustersFillUnitInterval) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::ArrayX2d raw = random_cluster(seed, 37);
    const auto nc = rvk::normalize_cluster(raw);
    for (int axis = 0; axis < 2; ++axis) {
      EXPECT_DOUBLE_EQ(nc.pts.col(axis).minCoeff(), 0.0);
      EXPECT_DOUBLE_EQ(nc.pts.col(axis).maxCoeff(), 1.0);
    }
    // Affine maps reconstruct the raw coordinates.
    for (int k = 0; k < raw.rows(); ++k) {
      for (int axis = 0; axis < 2; ++axis) {
        EXPECT_NEAR(nc.pts(k, axis) * nc.scale(axis) + nc.offset(axis), raw(k, axis),
                    1e-12 * std::max(1.0, std::abs(raw(k, axis))));
      }
    }
  }
}

TEST(NormalizeCluster, EmptyClusterRejected) {
  Eigen::ArrayX2d empty(0, 2);
  EXPECT_THROW(rvk::normalize_cluster(empty), std::invalid_argument);
}

TEST(Median, OddAndEvenLengths) {
  Eigen::ArrayXd odd(3);
  odd << 3.0, 1.0, 2.0;
  EXPECT_DOUBLE_EQ(rvk::median(odd), 2.0);
  Eigen::ArrayXd even(4);
  even << 4.0, 1.0, 3.0, 2.0;
  EXPECT_DOUBLE_EQ(rvk::median(even), 2.5);
  Eigen::ArrayXd empty(0);
  EXPECT_THROW(rvk::median(empty), std::invalid_argument);
}

TEST(MeanAbsDeviation, KnownValues) {
  Eigen::ArrayXd v(3);
  v << 0.0, 0.5, 1.0;
  // median 0.5; deviations 0.5, 0, 0.5; mean 1/3.
  EXPECT_DOUBLE_EQ(rvk::mean_abs_deviation(v), 0.3333333333333333);

  Eigen::ArrayXd flat(3);
  flat << 0.5, 0.5, 0.5;
  EXPECT_EQ(rvk::mean_abs_deviation(flat), 0.0);
}

TEST(MeanAbsDeviation, ShiftInvariantAndHomogeneous) {
  rvk::KeyedRng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_below(40));
    Eigen::ArrayXd v(n);
    for (int k = 0; k < n; ++k) {
      v(k) = rng.next_range(-100.0, 100.0);
    }
    const double base = rvk::mean_abs_deviation(v);
    const double shift = rng.next_range(-50.0, 50.0);
    const double scale = rng.next_range(-3.0, 3.0);
    EXPECT_NEAR(rvk::mean_abs_deviation((v + shift).eval()), base, 1e-12 * std::max(1.0, base));
    EXPECT_NEAR(rvk::mean_abs_deviation((v * scale).eval()), std::abs(scale) * base,
                1e-12 * std::max(1.0, std::abs(scale) * base));
    EXPECT_GE(base, 0.0);
  }
}

TEST(MadThreshold, AppliesScale) {
  Eigen::ArrayXd v(3);
  v << 0.0, 0.5, 1.0;
  EXPECT_DOUBLE_EQ(rvk::mad_threshold(v, 1.0), 0.3333333333333333);
  EXPECT_DOUBLE_EQ(rvk::mad_threshold(v, 3.0), 3.0 * 0.3333333333333333);
  Eigen::ArrayXd empty(0);
  EXPECT_THROW(rvk::mad_threshold(empty, 1.0), std::invalid_argument);
}

TEST(LineFromSeeds, SlopeAndIntercept) {
  const auto diag = rvk::line_from_seeds({0.0, 0.0}, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(diag.m, 1.0);
  EXPECT_DOUBLE_EQ(diag.c, 0.0);

  const auto horizontal = rvk::line_from_seeds({0.0, 2.0}, {1.0, 2.0});
  EXPECT_DOUBLE_EQ(horizontal.m, 0.0);
  EXPECT_DOUBLE_EQ(horizontal.c, 2.0);

  EXPECT_THROW(rvk::line_from_seeds({0.3, 0.3}, {0.3, 0.9}), rvk::DegenerateSeeds);
}

TEST(PointLineDistance, KnownValues) {
  const rvk::LineModel flat{0.0, 0.0};
  EXPECT_DOUBLE_EQ(rvk::point_line_distance(flat, {5.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(rvk::point_line_distance(flat, {5.0, 2.0}), 2.0);
  const rvk::LineModel diag{1.0, 0.0};
  EXPECT_NEAR(rvk::point_line_distance(diag, {0.0, 1.0}), 0.70710678118654752, 1e-15);
}

TEST(EvaluateTrial, CollinearClusterAllInliersAtZeroThreshold) {
  // Dyadic coordinates keep the arithmetic exact.
  const auto nc = rvk::normalize_cluster(
      cluster_from({{0.0, 1.0}, {0.25, 1.5}, {0.5, 2.0}, {0.75, 2.5}, {1.0, 3.0}}));
  const auto mask = rvk::evaluate_trial(nc, 0, 4, 0.0);
  EXPECT_EQ(mask.inlier_count, 5);
  for (int k = 0; k < 5; ++k) {
    EXPECT_TRUE(mask.mask(k));
  }
}

TEST(EvaluateTrial, ZeroThresholdKeepsExactlyTheSeeds) {
  const auto nc = rvk::normalize_cluster(
      cluster_from({{0.0, 0.0}, {1.0, 0.5}, {0.25, 0.8}, {0.7, 0.3}}));
  const auto mask = rvk::evaluate_trial(nc, 0, 1, 0.0);
  EXPECT_EQ(mask.inlier_count, 2);
  EXPECT_TRUE(mask.mask(0));
  EXPECT_TRUE(mask.mask(1));
  EXPECT_FALSE(mask.mask(2));
  EXPECT_FALSE(mask.mask(3));
  EXPECT_EQ(mask.cluster_id, -1);
  EXPECT_EQ(mask.winning_trial, -1);
}

TEST(EvaluateTrial, DegenerateSeedsScoreZero) {
  const auto nc =
      rvk::normalize_cluster(cluster_from({{0.5, 0.0}, {0.5, 1.0}, {0.0, 0.5}, {1.0, 0.5}}));
  const auto mask = rvk::evaluate_trial(nc, 0, 1, 10.0);  // same normalized x
  EXPECT_EQ(mask.inlier_count, 0);
  for (int k = 0; k < 4; ++k) {
    EXPECT_FALSE(mask.mask(k));
  }
}

TEST(EvaluateTrial, MatchesBruteForceRecomputation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    rvk::KeyedRng rng(seed, 77);
    const int n = 5 + static_cast<int>(rng.next_below(40));
    const auto nc = rvk::normalize_cluster(random_cluster(seed, n));
    const int a = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n)));
    int b = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n - 1)));
    if (b >= a) {
      ++b;
    }
    const double threshold = rng.next_range(0.0, 0.4);

    const auto mask = rvk::evaluate_trial(nc, a, b, threshold);

    int expected_count = 0;
    try {
      const auto line = rvk::line_from_seeds(nc.pts.row(a), nc.pts.row(b));
      for (int k = 0; k < n; ++k) {
        const bool inlier = (k == a || k == b) ||
                            rvk::point_line_distance(line, nc.pts.row(k)) <= threshold;
        EXPECT_EQ(mask.mask(k), inlier) << "seed " << seed << " point " << k;
        expected_count += inlier ? 1 : 0;
      }
    } catch (const rvk::DegenerateSeeds&) {
      expected_count = 0;
    }
    EXPECT_EQ(mask.inlier_count, expected_count) << "seed " << seed;
  }
}

TEST(DrawSeedPair, DistinctInRangeAndDeterministic) {
  std::set<std::pair<int, int>> seen;
  for (int trial = 0; trial < 200; ++trial) {
    const auto [a, b] = rvk::draw_seed_pair(9, 2, trial, 3);
    EXPECT_NE(a, b);
    EXPECT_GE(a, 0);
    EXPECT_LT(a, 3);
    EXPECT_GE(b, 0);
    EXPECT_LT(b, 3);
    const auto [a2, b2] = rvk::draw_seed_pair(9, 2, trial, 3);
    EXPECT_EQ(a, a2);
    EXPECT_EQ(b, b2);
    seen.emplace(a, b);
  }
  EXPECT_EQ(seen.size(), 6u);  // all ordered pairs of 3 indices show up
  EXPECT_THROW(rvk::draw_seed_pair(9, 0, 0, 1), std::invalid_argument);
}

TEST(RunRansac, CollinearClusterWinsAllPointsOnFirstTrial) {
  std::vector<Eigen::ArrayX2d> clusters;
  clusters.push_back(
      cluster_from({{0.0, 1.0}, {0.1, 1.2}, {0.2, 1.4}, {0.3, 1.6}, {0.4, 1.8}}));
  rvk::RansacParams params;
  params.max_trials = 32;
  const auto masks = rvk::run_ransac(clusters, params);
  ASSERT_EQ(masks.size(), 1u);
  EXPECT_EQ(masks[0].inlier_count, 5);
  EXPECT_EQ(masks[0].cluster_id, 0);
  // Every trial scores 5, so the lowest trial index must win.
  EXPECT_EQ(masks[0].winning_trial, 0);
  for (int k = 0; k < 5; ++k) {
    EXPECT_TRUE(masks[0].mask(k));
  }
}

TEST(RunRansac, SingleTrialEqualsEvaluateTrial) {
  std::vector<Eigen::ArrayX2d> clusters{random_cluster(3, 12)};
  rvk::RansacParams params;
  params.max_trials = 1;
  params.rng_seed = 17;
  const auto masks = rvk::run_ransac(clusters, params);

  const auto nc = rvk::normalize_cluster(clusters[0]);
  const double threshold = rvk::mad_threshold(nc.pts.col(1), params.threshold_scale);
  const auto [a, b] = rvk::draw_seed_pair(params.rng_seed, 0, 0, 12);
  const auto expected = rvk::evaluate_trial(nc, a, b, threshold);

  ASSERT_EQ(masks.size(), 1u);
  EXPECT_EQ(masks[0].inlier_count, expected.inlier_count);
  EXPECT_EQ(masks[0].winning_trial, 0);
  for (int k = 0; k < 12; ++k) {
    EXPECT_EQ(masks[0].mask(k), expected.mask(k));
  }
}

TEST(RunRansac, MatchesExhaustiveSequentialScan) {
  std::vector<Eigen::ArrayX2d> clusters;
  for (std::uint64_t s = 0; s < 4; ++s) {
    clusters.push_back(random_cluster(s, 10 + static_cast<int>(3 * s)));
  }
  rvk::RansacParams params;
  params.max_trials = 64;
  params.rng_seed = 123;
  const auto masks = rvk::run_ransac(clusters, params);

  for (int c = 0; c < 4; ++c) {
    const auto nc = rvk::normalize_cluster(clusters[static_cast<std::size_t>(c)]);
    const double threshold = rvk::mad_threshold(nc.pts.col(1), params.threshold_scale);
    const int n = static_cast<int>(nc.pts.rows());
    int best_count = -1;
    int best_trial = -1;
    for (int t = 0; t < params.max_trials; ++t) {
      const auto [a, b] = rvk::draw_seed_pair(params.rng_seed, c, t, n);
      const auto trial = rvk::evaluate_trial(nc, a, b, threshold);
      if (trial.inlier_count > best_count) {
        best_count = trial.inlier_count;
        best_trial = t;
      }
    }
    EXPECT_EQ(masks[static_cast<std::size_t>(c)].inlier_count, best_count);
    EXPECT_EQ(masks[static_cast<std::size_t>(c)].winning_trial, best_trial);
  }
}

TEST(RunRansac, BitIdenticalAcrossWorkerCounts) {
  std::vector<Eigen::ArrayX2d> clusters;
  for (std::uint64_t s = 10; s < 16; ++s) {
    clusters.push_back(random_cluster(s, 20));
  }
  rvk::RansacParams params;
  params.max_trials = 128;
  params.rng_seed = 2024;

  const auto one = rvk::run_ransac(clusters, params, 1);
  const auto two = rvk::run_ransac(clusters, params, 2);
  const auto eight = rvk::run_ransac(clusters, params, 8);

  ASSERT_EQ(one.size(), two.size());
  ASSERT_EQ(one.size(), eight.size());
  for (std::size_t c = 0; c < one.size(); ++c) {
    for (const auto* other : {&two[c], &eight[c]}) {
      EXPECT_EQ(one[c].inlier_count, other->inlier_count);
      EXPECT_EQ(one[c].winning_trial, other->winning_trial);
      ASSERT_EQ(one[c].mask.size(), other->mask.size());
      for (Eigen::Index k = 0; k < one[c].mask.size(); ++k) {
        EXPECT_EQ(one[c].mask(k), other->mask(k));
      }
    }
  }
}

TEST(RunRansac, WinnerMaskContainsItsSeeds) {
  for (std::uint64_t seed = 40; seed < 50; ++seed) {
    std::vector<Eigen::ArrayX2d> clusters{random_cluster(seed, 15)};
    rvk::RansacParams params;
    params.rng_seed = seed;
    params.max_trials = 32;
    const auto masks = rvk::run_ransac(clusters, params);
    const auto [a, b] = rvk::draw_seed_pair(params.rng_seed, 0, masks[0].winning_trial, 15);
    EXPECT_TRUE(masks[0].mask(a));
    EXPECT_TRUE(masks[0].mask(b));
  }
}

TEST(CountTrialInliers, MonotoneInThreshold) {
  const auto nc = rvk::normalize_cluster(random_cluster(7, 30));
  for (int trial = 0; trial < 40; ++trial) {
    const auto [a, b] = rvk::draw_seed_pair(5, 0, trial, 30);
    const double base = rvk::mad_threshold(nc.pts.col(1), 1.0);
    const int narrow = rvk::count_trial_inliers(nc, a, b, base);
    const int wide = rvk::count_trial_inliers(nc, a, b, 2.0 * base);
    EXPECT_GE(wide, narrow);
  }
}

TEST(RunRansac, RejectsBadInput) {
  std::vector<Eigen::ArrayX2d> tiny{cluster_from({{0, 0}, {1, 1}})};
  EXPECT_THROW(rvk::run_ransac(tiny, rvk::RansacParams{}), rvk::ClusterTooSmall);

  std::vector<Eigen::ArrayX2d> ok{random_cluster(1, 8)};
  rvk::RansacParams no_trials;
  no_trials.max_trials = 0;
  EXPECT_THROW(rvk::run_ransac(ok, no_trials), std::invalid_argument);
  rvk::RansacParams no_scale;
  no_scale.threshold_scale = 0.0;
  EXPECT_THROW(rvk::run_ransac(ok, no_scale), std::invalid_argument);
}

TEST(CombineMasks, UnionOfDisjointClusters) {
  rvk::Frame frame;
  frame.points.resize(7);
  frame.labels = {0, rvk::kNoiseLabel, 1, 0, 1, 0, rvk::kNoiseLabel};

  std::vector<rvk::Cluster> clusters(2);
  clusters[0] = {0, {0, 3, 5}};
  clusters[1] = {1, {2, 4}};
  auto masks = rvk::all_true_masks(clusters);

  const rvk::BoolArray combined = rvk::combine_masks(frame, masks);
  ASSERT_EQ(combined.size(), 7);
  EXPECT_TRUE(combined(0));
  EXPECT_FALSE(combined(1));
  EXPECT_TRUE(combined(2));
  EXPECT_TRUE(combined(3));
  EXPECT_TRUE(combined(4));
  EXPECT_TRUE(combined(5));
  EXPECT_FALSE(combined(6));
}

TEST(CombineMasks, EmptyMaskListAllFalse) {
  rvk::Frame frame;
  frame.points.resize(3);
  frame.labels = {0, 0, 0};
  const rvk::BoolArray combined = rvk::combine_masks(frame, {});
  for (int k = 0; k < 3; ++k) {
    EXPECT_FALSE(combined(k));
  }
}

TEST(CombineMasks, MatchesPerClusterLookup) {
  rvk::Frame frame;
  frame.points.resize(10);
  frame.labels = {0, 1, 0, 1, rvk::kNoiseLabel, 0, 1, 0, rvk::kNoiseLabel, 1};

  std::vector<rvk::InlierMask> masks(2);
  masks[0].cluster_id = 0;
  masks[0].mask = rvk::BoolArray(4);
  masks[0].mask << true, false, true, false;  // points 0, 2, 5, 7
  masks[0].inlier_count = 2;
  masks[1].cluster_id = 1;
  masks[1].mask = rvk::BoolArray(4);
  masks[1].mask << false, true, true, false;  // points 1, 3, 6, 9

  const rvk::BoolArray combined = rvk::combine_masks(frame, masks);
  const std::vector<bool> expected = {true, false, false, true, false,
                                      true, true,  false, false, false};
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(combined(k), expected[static_cast<std::size_t>(k)]) << "point " << k;
  }
}

TEST(GatherClusterPoints, PullsAzimuthDopplerInFrameOrder) {
  rvk::Frame frame;
  frame.points.resize(4);
  frame.points[0].azimuth = 0.1;
  frame.points[0].doppler = 1.0;
  frame.points[1].azimuth = 0.2;
  frame.points[1].doppler = 2.0;
  frame.points[2].azimuth = 0.3;
  frame.points[2].doppler = 3.0;
  frame.points[3].azimuth = 0.4;
  frame.points[3].doppler = 4.0;

  std::vector<rvk::Cluster> clusters(1);
  clusters[0] = {0, {1, 3}};
  const auto pts = rvk::gather_cluster_points(frame, clusters);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_DOUBLE_EQ(pts[0](0, 0), 0.2);
  EXPECT_DOUBLE_EQ(pts[0](0, 1), 2.0);
  EXPECT_DOUBLE_EQ(pts[0](1, 0), 0.4);
  EXPECT_DOUBLE_EQ(pts[0](1, 1), 4.0);
}

}  // namespace
