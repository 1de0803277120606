#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "vdk/metrics.hpp"

using namespace vdk;
using fixtures::tweet;

namespace {

ViewpointMatrix matrix_of(std::vector<ExposureColumn> columns) {
  ViewpointMatrix m;
  m.conversation_id = "c";
  for (std::size_t i = 0; i < columns.size(); ++i) m.users.push_back(fixtures::uid(static_cast<int>(i)));
  m.columns = std::move(columns);
  return m;
}

ViewpointMatrix matrix_of(const ConversationTree& t) {
  return build_viewpoint_matrix(build_viewpoint_network(t));
}

// A tree holding the given label counts: a star rooted at an L-count-ordered
// first tweet, every tweet by a distinct author.
ConversationTree tree_with_counts(const std::string& conv, std::array<int, 4> counts) {
  std::vector<TweetRecord> nodes;
  int k = 0;
  for (std::size_t l = 0; l < 4; ++l) {
    for (int i = 0; i < counts[l]; ++i, ++k) {
      std::optional<std::string> parent;
      if (k > 0) parent = conv + "-" + fixtures::tid(0);
      nodes.push_back(tweet(conv + "-" + fixtures::tid(k), conv + fixtures::uid(k), conv, parent,
                            label_at(l)));
    }
  }
  return ConversationTree(conv, std::move(nodes));
}

void expect_matches_oracle(const oracle::Thread& thread, bool drop_l1) {
  auto tree = fixtures::tree(thread);
  auto scores = fragmentation_scores(matrix_of(tree), drop_l1);
  auto expected = oracle::fragmentation(thread, drop_l1);
  ASSERT_EQ(scores.size(), expected.size());
  for (const auto& s : scores) {
    int author = std::stoi(s.author_id.substr(1));
    const auto& e = expected.at(author);
    ASSERT_EQ(s.defined, e.has_value());
    if (e) EXPECT_NEAR(s.score, *e, 1e-9);
  }
}

}  // namespace

TEST(Fragmentation, DistinctViewpointsScoreOne) {
  auto s = fragmentation_scores(matrix_of({{0, 0, 0, 1}, {0, 0, 1, 0}}), false);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_TRUE(s[0].defined && s[1].defined);
  EXPECT_EQ(s[0].score, 1.0);
  EXPECT_EQ(s[1].score, 1.0);
}

TEST(Fragmentation, IdenticalViewpointsScoreZero) {
  auto s = fragmentation_scores(matrix_of({{0, 0, 1, 0}, {0, 0, 1, 0}}), false);
  EXPECT_EQ(s[0].score, 0.0);
  EXPECT_EQ(s[1].score, 0.0);
}

TEST(Fragmentation, ThreeUsersHandComputed) {
  // u0 and u1 see L3 once, u2 sees L4 once: sims for u0 are {1, 0}.
  auto s = fragmentation_scores(matrix_of({{0, 0, 1, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}), false);
  EXPECT_DOUBLE_EQ(s[0].score, 0.5);
  EXPECT_DOUBLE_EQ(s[1].score, 0.5);
  EXPECT_DOUBLE_EQ(s[2].score, 1.0);
}

TEST(Fragmentation, ZeroColumnsAndLoneUsersAreUndefined) {
  FragmentationTally tally;
  auto s = fragmentation_scores(matrix_of({{0, 0, 1, 0}, {0, 0, 0, 0}, {0, 0, 2, 1}}), false, &tally);
  EXPECT_TRUE(s[0].defined);
  EXPECT_FALSE(s[1].defined);
  EXPECT_TRUE(s[2].defined);
  EXPECT_EQ(tally.defined, 2u);
  EXPECT_EQ(tally.zero_exposure, 1u);

  FragmentationTally lone;
  auto one = fragmentation_scores(matrix_of({{0, 1, 0, 0}, {0, 0, 0, 0}}), false, &lone);
  EXPECT_FALSE(one[0].defined);
  EXPECT_FALSE(one[1].defined);
  EXPECT_EQ(lone.lone_user, 1u);
  EXPECT_EQ(lone.zero_exposure, 1u);
}

TEST(Fragmentation, ExcludingL1DropsL1OnlyUsers) {
  FragmentationTally tally;
  auto s = fragmentation_scores(matrix_of({{3, 0, 0, 0}, {1, 0, 1, 0}, {0, 0, 0, 1}}), true, &tally);
  EXPECT_FALSE(s[0].defined);
  EXPECT_EQ(s[1].score, 1.0);  // (0,1,0) vs (0,0,1)
  EXPECT_EQ(tally.zero_exposure, 1u);

  auto with = fragmentation_scores(matrix_of({{3, 0, 0, 0}, {1, 0, 1, 0}, {0, 0, 0, 1}}), false);
  EXPECT_TRUE(with[0].defined);
}

TEST(FragmentationProperty, ColumnScalingLeavesScoresUnchanged) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ExposureColumn> cols(2 + rng() % 6);
    for (auto& c : cols) {
      for (auto& x : c) x = rng() % 4;
    }
    auto base = fragmentation_scores(matrix_of(cols), false);
    auto scaled_cols = cols;
    std::size_t who = rng() % cols.size();
    std::uint64_t k = 2 + rng() % 7;
    for (auto& x : scaled_cols[who]) x *= k;
    auto scaled = fragmentation_scores(matrix_of(scaled_cols), false);
    for (std::size_t u = 0; u < cols.size(); ++u) {
      ASSERT_EQ(base[u].defined, scaled[u].defined);
      if (base[u].defined) EXPECT_NEAR(base[u].score, scaled[u].score, 1e-12);
    }
  }
}

TEST(FragmentationProperty, PermutingUsersPermutesScores) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ExposureColumn> cols(2 + rng() % 6);
    for (auto& c : cols) {
      for (auto& x : c) x = rng() % 3;
    }
    std::vector<std::size_t> perm(cols.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ExposureColumn> permuted(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) permuted[i] = cols[perm[i]];
    auto a = fragmentation_scores(matrix_of(cols), false);
    auto b = fragmentation_scores(matrix_of(permuted), false);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      ASSERT_EQ(b[i].defined, a[perm[i]].defined);
      if (b[i].defined) {
        EXPECT_NEAR(b[i].score, a[perm[i]].score, 1e-12);
        EXPECT_GE(b[i].score, 0.0);
        EXPECT_LE(b[i].score, 1.0);
      }
    }
  }
}

TEST(FragmentationOracle, ExhaustiveSmallConversations) {
  // Every recursive tree up to 4 tweets, every author pattern over 3 authors,
  // every labelling over all four labels.
  for (int n = 1; n <= 4; ++n) {
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    int shapes = 1;
    for (int k = 2; k < n; ++k) shapes *= k;
    int patterns = static_cast<int>(std::pow(3, n));
    int labellings = static_cast<int>(std::pow(4, n));
    for (int s = 0; s < shapes; ++s) {
      int code = s;
      for (int k = 1; k < n; ++k) {
        parent[static_cast<std::size_t>(k)] = code % k;
        code /= k;
      }
      for (int a = 0; a < patterns; ++a) {
        for (int l = 0; l < labellings; ++l) {
          oracle::Thread t{parent, {}, {}};
          for (int k = 0, ac = a, lc = l; k < n; ++k, ac /= 3, lc /= 4) {
            t.author.push_back(ac % 3);
            t.label.push_back(lc % 4);
          }
          expect_matches_oracle(t, false);
          expect_matches_oracle(t, true);
          if (HasFatalFailure()) return;
        }
      }
    }
  }
}

TEST(FragmentationOracle, RandomLargerConversations) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    auto t = fixtures::random_thread(rng, 2 + static_cast<int>(rng() % 40), 2 + static_cast<int>(rng() % 8), 4);
    expect_matches_oracle(t, false);
    expect_matches_oracle(t, true);
  }
}

TEST(PoolDistribution, CalibrationShares) {
  std::vector<ConversationTree> immigration{tree_with_counts("imm", {7843, 986, 770, 401})};
  auto p = pool_distribution(immigration, false);
  ASSERT_EQ(p.probabilities.size(), 4u);
  const double imm[] = {0.7843, 0.0986, 0.077, 0.0401};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(p.probabilities[i], imm[i], 1e-12);

  // These shares are rounded and sum to 99.99%; counts out of 9999 land within 1e-4.
  std::vector<ConversationTree> dst{tree_with_counts("dst", {8685, 600, 404, 310})};
  auto q = pool_distribution(dst, false);
  const double dst_shares[] = {0.8685, 0.06, 0.0404, 0.031};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(q.probabilities[i], dst_shares[i], 1e-4);
}

TEST(PoolDistribution, ExcludingL1Renormalizes) {
  std::vector<ConversationTree> trees{tree_with_counts("c", {3, 2, 1, 1})};
  auto p = pool_distribution(trees, true);
  EXPECT_EQ(p.labels, (std::vector<Label>{Label::L2, Label::L3, Label::L4}));
  EXPECT_DOUBLE_EQ(p.probabilities[0], 0.5);
  EXPECT_DOUBLE_EQ(p.probabilities[1], 0.25);
  EXPECT_DOUBLE_EQ(p.probabilities[2], 0.25);
  double sum = std::accumulate(p.probabilities.begin(), p.probabilities.end(), 0.0);
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(PoolDistribution, EmptyPoolIsFlagged) {
  EXPECT_TRUE(pool_distribution({}, false).empty());
  std::vector<ConversationTree> only_l1{tree_with_counts("c", {3, 0, 0, 0})};
  EXPECT_TRUE(pool_distribution(only_l1, true).empty());
  EXPECT_FALSE(pool_distribution(only_l1, false).empty());
}

TEST(Representation, TypicalConversationScoresZero) {
  std::vector<ConversationTree> trees{tree_with_counts("a", {2, 2, 0, 0}),
                                      tree_with_counts("b", {1, 1, 0, 0})};
  auto pool = pool_distribution(trees, false);
  auto s = representation_scores(trees, pool, false);
  for (const auto& r : s) {
    EXPECT_TRUE(r.defined);
    EXPECT_LE(r.raw_kl, 1e-12);
    EXPECT_EQ(r.score, 0.0);
  }
}

TEST(Representation, TwoConversationHandKl) {
  std::vector<ConversationTree> trees{tree_with_counts("a", {2, 0, 0, 0}),
                                      tree_with_counts("b", {1, 1, 0, 0})};
  LabelDistribution pool{active_labels(false), {0.5, 0.5, 0.0, 0.0}, 4};
  auto s = representation_scores(trees, pool, false);
  EXPECT_NEAR(s[0].raw_kl, std::log(2.0), 1e-15);
  EXPECT_NEAR(s[1].raw_kl, 0.0, 1e-15);
  EXPECT_EQ(s[0].score, 1.0);
  EXPECT_EQ(s[1].score, 0.0);
}

TEST(Representation, ArgmaxScoresExactlyOne) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ConversationTree> trees;
    for (int c = 0; c < 2 + static_cast<int>(rng() % 10); ++c) {
      trees.push_back(fixtures::tree(fixtures::random_thread(rng, 2 + static_cast<int>(rng() % 10), 3, 4),
                                     "c" + std::to_string(c)));
    }
    auto pool = pool_distribution(trees, false);
    auto s = representation_scores(trees, pool, false);
    double max_kl = 0;
    for (const auto& r : s) {
      EXPECT_GE(r.raw_kl, 0.0);
      EXPECT_GE(r.score, 0.0);
      EXPECT_LE(r.score, 1.0);
      max_kl = std::max(max_kl, r.raw_kl);
    }
    if (max_kl == 0) continue;
    bool hit = false;
    for (const auto& r : s) {
      if (r.raw_kl == max_kl) {
        EXPECT_EQ(r.score, 1.0);
        hit = true;
      }
    }
    EXPECT_TRUE(hit);
  }
}

TEST(Representation, NoActiveLabelsIsUndefined) {
  std::vector<ConversationTree> trees{tree_with_counts("a", {2, 0, 0, 0}),
                                      tree_with_counts("b", {1, 1, 1, 0})};
  auto pool = pool_distribution(trees, true);
  auto s = representation_scores(trees, pool, true);
  EXPECT_FALSE(s[0].defined);
  EXPECT_TRUE(s[1].defined);
  EXPECT_EQ(s[1].score, 0.0);  // only defined conversation matches its own pool
}

TEST(Representation, MatchesOracleOnRandomTopics) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<oracle::Thread> threads;
    std::vector<ConversationTree> trees;
    int convs = 1 + static_cast<int>(rng() % 12);
    for (int c = 0; c < convs; ++c) {
      threads.push_back(fixtures::random_thread(rng, 2 + static_cast<int>(rng() % 12), 3, 4));
      trees.push_back(fixtures::tree(threads.back(), "c" + std::to_string(c)));
    }
    for (bool drop : {false, true}) {
      auto expected = oracle::representation(threads, drop);
      auto pool = pool_distribution(trees, drop);
      if (pool.empty()) continue;
      auto got = representation_scores(trees, pool, drop);
      for (std::size_t i = 0; i < got.size(); ++i) {
        ASSERT_EQ(got[i].defined, expected[i].raw_kl.has_value());
        if (!got[i].defined) continue;
        EXPECT_NEAR(got[i].raw_kl, *expected[i].raw_kl, 1e-9);
        EXPECT_NEAR(got[i].score, expected[i].score, 1e-9);
      }
    }
  }
}

TEST(KlDivergence, RejectsUnsupportedMass) {
  LabelDistribution p{active_labels(false), {0.5, 0.5, 0, 0}, 2};
  LabelDistribution q{active_labels(false), {1, 0, 0, 0}, 2};
  EXPECT_THROW(kl_divergence(p, q), Error);
  LabelDistribution r{active_labels(true), {1, 0, 0}, 2};
  EXPECT_THROW(kl_divergence(p, r), Error);
}

TEST(Histogram, BoundaryConvention) {
  std::vector<double> scores{0.0, 0.04, 0.05};
  auto h = histogram(scores, 0.05);
  ASSERT_EQ(h.bin_count(), 20u);
  EXPECT_EQ(h.counts[0], 2u);
  EXPECT_EQ(h.counts[1], 1u);
}

TEST(Histogram, OneGoesToLastBin) {
  std::vector<double> scores{1.0};
  auto h = histogram(scores);
  EXPECT_EQ(h.counts.back(), 1u);
  EXPECT_EQ(h.upper(h.bin_count() - 1), 1.0);
}

TEST(Histogram, TwentyOneEvenlySpacedScores) {
  std::vector<double> scores;
  for (int k = 0; k <= 20; ++k) scores.push_back(k * 0.05);
  auto h = histogram(scores, 0.05);
  for (std::size_t b = 0; b + 1 < h.bin_count(); ++b) EXPECT_EQ(h.counts[b], 1u) << "bin " << b;
  EXPECT_EQ(h.counts.back(), 2u);
  double sum = std::accumulate(h.shares.begin(), h.shares.end(), 0.0);
  EXPECT_NEAR(sum, 1.0, 1e-12);

  // Decimal literals that sit on an edge land in the upper bin too.
  std::vector<double> literal{0.15, 0.3, 0.35, 0.7};
  auto g = histogram(literal, 0.05);
  EXPECT_EQ(g.counts[3], 1u);
  EXPECT_EQ(g.counts[6], 1u);
  EXPECT_EQ(g.counts[7], 1u);
  EXPECT_EQ(g.counts[14], 1u);
}

TEST(Histogram, InvalidWidthIsConfigError) {
  std::vector<double> scores{0.5};
  for (double w : {0.0, -0.1, 1.5}) {
    try {
      histogram(scores, w);
      FAIL() << w;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::config);
    }
  }
  EXPECT_EQ(histogram(scores, 1.0).bin_count(), 1u);
  EXPECT_EQ(histogram(scores, 0.3).bin_count(), 4u);
}

TEST(Histogram, CsvRows) {
  std::vector<double> scores{0.1, 0.9};
  auto rows = histogram_csv_rows(histogram(scores, 0.5), Variant::without_l1, "fragmentation");
  EXPECT_EQ(rows,
            "without_l1,fragmentation,0,0.5,1,0.5\n"
            "without_l1,fragmentation,0.5,1,1,0.5\n");
}
