#include "cqzl/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace cqzl;

namespace {

Eigen::VectorXcd rvec(std::initializer_list<double> xs) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = cxd(x, 0.0);
  return v;
}

TEST(MakeChannel, AcceptsOrthonormalPair) {
  ChannelSpec ch = make_channel({rvec({1, 0}), rvec({0, 1})});
  EXPECT_EQ(ch.dim, 2);
  EXPECT_EQ(ch.alphabet_size(), 2);
}

TEST(MakeChannel, RejectsZeroVector) {
  EXPECT_THROW(make_channel({rvec({0, 0})}), error);
}

TEST(MakeChannel, RejectsInconsistentDims) {
  EXPECT_THROW(make_channel({rvec({1, 0}), rvec({1, 0, 0})}), error);
}

TEST(MakeChannel, RejectsNormDeviation) {
  EXPECT_THROW(make_channel({rvec({0.9, 0})}), error);
  // within 1e-9 gets normalized
  Eigen::VectorXcd v = rvec({1, 0});
  v(0) += 5e-10;
  ChannelSpec ch = make_channel({v});
  EXPECT_NEAR(ch.states[0].norm(), 1.0, 1e-15);
}

TEST(TrineChannel, MatchesPlanarEmbedding) {
  ChannelSpec t = trine_channel();
  EXPECT_EQ(t.dim, 2);
  EXPECT_EQ(t.alphabet_size(), 3);
  EXPECT_NEAR(t.states[0](0).real(), 1.0, 1e-15);
  EXPECT_NEAR(t.states[1](0).real(), -0.5, 1e-15);
  EXPECT_NEAR(t.states[1](1).real(), std::sqrt(3.0) / 2.0, 1e-15);
  OverlapMatrix a = absolute_overlap_matrix(t);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(a.entries(i, j), i == j ? 1.0 : 0.5, 1e-12);
}

TEST(TrineChannel, OverlapSpectrumFromEigensolver) {
  // independent eigensolver check of the 3x3 overlap matrix
  Eigen::MatrixXd a = absolute_overlap_matrix(trine_channel()).entries;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  EXPECT_NEAR(es.eigenvalues()(0), 0.5, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 0.5, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(2), 2.0, 1e-12);
  EXPECT_TRUE(is_psd_absolute_overlaps(trine_channel(), 1e-9));
}

TEST(BinaryChannel, OverlapByConstruction) {
  EXPECT_NEAR(std::abs(state_overlap(binary_channel(0.0), 0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(state_overlap(binary_channel(1.0), 0, 1)), 1.0, 1e-15);
  OverlapMatrix a = absolute_overlap_matrix(binary_channel(0.5));
  EXPECT_NEAR(a.entries(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(a.entries(0, 0), 1.0, 0.0);
  a = absolute_overlap_matrix(binary_channel(0.3));
  EXPECT_NEAR(a.entries(1, 0), 0.3, 1e-15);
  EXPECT_THROW(binary_channel(1.5), error);
  EXPECT_THROW(binary_channel(-0.1), error);
}

TEST(AbsoluteOverlapMatrix, OrthonormalGivesIdentity) {
  ChannelSpec ch = make_channel({rvec({1, 0, 0}), rvec({0, 1, 0}), rvec({0, 0, 1})});
  EXPECT_NEAR((absolute_overlap_matrix(ch).entries - Eigen::MatrixXd::Identity(3, 3))
                  .cwiseAbs()
                  .maxCoeff(),
              0.0, 1e-15);
}

TEST(AbsoluteOverlapMatrix, RandomChannelsWellFormed) {
  for (int trial = 0; trial < 20; ++trial) {
    ChannelSpec ch = random_channel(2 + trial % 3, 2 + trial % 4, derive_key(7, trial));
    Eigen::MatrixXd a = absolute_overlap_matrix(ch).entries;
    EXPECT_NEAR((a - a.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-14);
    for (int i = 0; i < a.rows(); ++i) {
      EXPECT_DOUBLE_EQ(a(i, i), 1.0);
      for (int j = 0; j < a.cols(); ++j) {
        EXPECT_GE(a(i, j), 0.0);
        EXPECT_LE(a(i, j), 1.0);
      }
    }
  }
}

TEST(CodewordAbsOverlap, IdenticalSequencesGiveOne) {
  ChannelSpec t = trine_channel();
  EXPECT_DOUBLE_EQ(codeword_abs_overlap(t, {0, 0}, {0, 0}), 1.0);
}

TEST(CodewordAbsOverlap, ProductRuleAgainstTensorOracle) {
  ChannelSpec t = trine_channel();
  EXPECT_NEAR(codeword_abs_overlap(t, {0, 1}, {1, 0}), 0.25, 1e-12);
  EXPECT_NEAR(codeword_abs_overlap(t, {0, 1}, {1, 0}), oracle::tensor_abs_overlap(t, {0, 1}, {1, 0}),
              1e-12);
}

TEST(CodewordAbsOverlap, ExhaustiveSmallGridsMatchTensorOracle) {
  for (int dim = 2; dim <= 3; ++dim) {
    for (int alpha = 2; alpha <= 3; ++alpha) {
      ChannelSpec ch = random_channel(dim, alpha, derive_key(11, dim * 10 + alpha));
      for (int n = 1; n <= 4; ++n) {
        std::int64_t total = 1;
        for (int l = 0; l < n; ++l) total *= alpha;
        for (std::int64_t xi = 0; xi < total; ++xi) {
          for (std::int64_t yi = 0; yi < total; ++yi) {
            std::vector<int> x(n), y(n);
            std::int64_t xr = xi, yr = yi;
            for (int l = 0; l < n; ++l) {
              x[l] = xr % alpha;
              xr /= alpha;
              y[l] = yr % alpha;
              yr /= alpha;
            }
            ASSERT_NEAR(codeword_abs_overlap(ch, x, y), oracle::tensor_abs_overlap(ch, x, y),
                        1e-10);
          }
        }
      }
    }
  }
}

TEST(CodewordAbsOverlap, LongBlockLogDomain) {
  ChannelSpec t = trine_channel();
  std::vector<int> zeros(10, 0), ones(10, 1);
  EXPECT_NEAR(codeword_abs_overlap(t, zeros, ones), std::pow(0.5, 10), 1e-15);
}

TEST(CodewordAbsOverlap, SymmetricInArguments) {
  ChannelSpec ch = random_channel(3, 3, derive_key(13, 0));
  std::vector<int> x{0, 1, 2, 1}, y{2, 1, 0, 0};
  EXPECT_DOUBLE_EQ(codeword_abs_overlap(ch, x, y), codeword_abs_overlap(ch, y, x));
  EXPECT_THROW(codeword_abs_overlap(ch, {0, 1}, {0}), error);
  EXPECT_THROW(codeword_abs_overlap(ch, {0, 5}, {0, 1}), error);
}

TEST(IsPsdAbsoluteOverlaps, FourStateCounterexample) {
  // Randomized search for 4 unit vectors whose absolute overlap matrix has a
  // negative eigenvalue; the 3x3 guarantee does not extend to 4x4. The seed
  // below was found by scanning and is frozen for determinism.
  bool found = false;
  for (std::uint64_t key = 0; key < 200 && !found; ++key) {
    ChannelSpec ch = random_channel(2, 4, derive_key(17, key));
    Eigen::MatrixXd a = absolute_overlap_matrix(ch).entries;
    if (min_eigenvalue_sym(a) < -1e-6) {
      found = true;
      EXPECT_FALSE(is_psd_absolute_overlaps(ch, 1e-9));
    }
  }
  EXPECT_TRUE(found) << "no non-PSD absolute-overlap channel found in the scanned family";
}

TEST(PairwiseNonObtuse, BinaryAlwaysSucceeds) {
  for (double c : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    auto res = pairwise_non_obtuse_phases(binary_channel(c), 1e-9);
    EXPECT_TRUE(res.ok()) << "c=" << c;
  }
}

TEST(PairwiseNonObtuse, OrthonormalSucceedsTrivially) {
  ChannelSpec ch = make_channel({rvec({1, 0}), rvec({0, 1})});
  auto res = pairwise_non_obtuse_phases(ch, 1e-9);
  ASSERT_TRUE(res.ok());
  for (const auto& a : res.phases->phases) EXPECT_NEAR(std::abs(a - cxd(1, 0)), 0.0, 1e-12);
}

TEST(PairwiseNonObtuse, SuccessPhasesSatisfyDefinition) {
  // rotate binary states by scattered phases; the gauge must undo them
  ChannelSpec base = binary_channel(0.4);
  std::vector<Eigen::VectorXcd> v{std::polar(1.0, 1.1) * base.states[0],
                                  std::polar(1.0, -2.3) * base.states[1]};
  auto res = pairwise_non_obtuse_phases(make_channel(v), 1e-9);
  ASSERT_TRUE(res.ok());
  ChannelSpec ch = make_channel(v);
  const auto& al = res.phases->phases;
  for (int x = 0; x < 2; ++x) EXPECT_NEAR(std::abs(al[x]), 1.0, 1e-12);
  cxd z = std::conj(al[0]) * al[1] * state_overlap(ch, 0, 1);
  EXPECT_NEAR(z.imag(), 0.0, 1e-9);
  EXPECT_GE(z.real(), -1e-9);
}

TEST(PairwiseNonObtuse, TrineFailsWithThreeCycle) {
  auto res = pairwise_non_obtuse_phases(trine_channel(), 1e-9);
  ASSERT_FALSE(res.ok());
  EXPECT_EQ(res.witness_cycle.size(), 3u);

  // exhaustive oracle: no sign pattern makes all pairwise products >= 0
  ChannelSpec t = trine_channel();
  for (int mask = 0; mask < 8; ++mask) {
    bool all_nonneg = true;
    for (int x = 0; x < 3 && all_nonneg; ++x)
      for (int y = x + 1; y < 3 && all_nonneg; ++y) {
        double sx = (mask >> x) & 1 ? -1.0 : 1.0;
        double sy = (mask >> y) & 1 ? -1.0 : 1.0;
        if (sx * sy * state_overlap(t, x, y).real() < 0) all_nonneg = false;
      }
    EXPECT_FALSE(all_nonneg) << "sign pattern " << mask << " should not align the trine";
  }
}

TEST(PairwiseNonObtuse, SuccessImpliesPsdOverlaps) {
  for (int trial = 0; trial < 40; ++trial) {
    ChannelSpec ch = random_channel(2 + trial % 3, 2 + trial % 4, derive_key(23, trial));
    auto res = pairwise_non_obtuse_phases(ch, 1e-9);
    if (res.ok()) EXPECT_TRUE(is_psd_absolute_overlaps(ch, 1e-7));
  }
}

TEST(ChannelHash, StableAndSensitive) {
  EXPECT_EQ(channel_hash(trine_channel()), channel_hash(trine_channel()));
  EXPECT_NE(channel_hash(trine_channel()), channel_hash(binary_channel(0.5)));
}

}  // namespace
