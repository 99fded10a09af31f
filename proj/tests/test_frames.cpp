#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tfweave/frames.hpp"

using namespace tfweave;

namespace {

LabeledFrameFamily plain_family(std::vector<std::vector<CVector>> groups) {
  LabeledFrameFamily fam{static_cast<int>(groups.front().front().size()), 1.0, {}};
  int i = 0;
  for (auto& g : groups) fam.entries.push_back({{i++, 0}, std::move(g)});
  return fam;
}

CVector basis(int dim, int i) {
  CVector v = CVector::Zero(dim);
  v[i] = 1.0;
  return v;
}

std::function<Signal(const SymbolFamilyMember&)> everywhere(const Signal& w) {
  return [w](const SymbolFamilyMember&) { return w; };
}

}  // namespace

TEST(GaborSystem, Counting) {
  const SampleGrid g = make_grid(16);
  const Signal phi = window(g, WindowSpec::standard());
  const LabeledFrameFamily full = gabor_system({phi}, make_lattice(16, 1, 1));
  EXPECT_EQ(full.member_count(), 256);
  const LabeledFrameFamily two = gabor_system({phi, window(g, WindowSpec::hermite(1))}, make_lattice(16, 4, 4));
  EXPECT_EQ(two.entries.size(), 16u);
  for (const auto& e : two.entries) EXPECT_EQ(e.members.size(), 2u);
  EXPECT_DOUBLE_EQ(make_lattice(16, 4, 4).density(), 1.0);
}

TEST(GaborSystem, Errors) {
  EXPECT_THROW(gabor_system({}, make_lattice(16, 4, 4)), Error);
  EXPECT_THROW(gabor_system({window(make_grid(32), WindowSpec::standard())}, make_lattice(16, 4, 4)), Error);
}

TEST(FrameOperator, FullGridIsTight) {
  const SampleGrid g = make_grid(16);
  const Signal phi = normalized(window(g, WindowSpec::standard()));
  const CMatrix s = frame_operator(gabor_system({phi}, make_lattice(16, 1, 1)));
  // direct assembly: S = step * sum_{x,w} g g^H
  CMatrix direct = CMatrix::Zero(16, 16);
  for (int x = 0; x < 16; ++x)
    for (int w = 0; w < 16; ++w) {
      const CVector v = tf_shift(phi, {x, w}).values;
      for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) direct(r, c) += g.step * v[r] * std::conj(v[c]);
    }
  EXPECT_LT((s - direct).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((s - 16.0 * CMatrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FrameOperator, RankOneAndOrthonormalBasis) {
  const CMatrix one = frame_operator(plain_family({{CVector::Constant(3, cplx(1.0, 1.0))}}));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(one, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(es.eigenvalues()[0], 0.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()[1], 0.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()[2], 6.0, 1e-12);

  const CMatrix onb = frame_operator(plain_family({{basis(3, 0)}, {basis(3, 1)}, {basis(3, 2)}}));
  EXPECT_LT((onb - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);

  // weighted basis on a grid: e_j / sqrt(step)
  const SampleGrid g = make_grid(8);
  LabeledFrameFamily grid_onb{8, g.step, {}};
  for (int j = 0; j < 8; ++j) grid_onb.entries.push_back({{j, 0}, {basis(8, j) / std::sqrt(g.step)}});
  const FrameBounds fb = frame_bounds(grid_onb);
  EXPECT_NEAR(fb.lower, 1.0, 1e-12);
  EXPECT_NEAR(fb.upper, 1.0, 1e-12);
  EXPECT_TRUE(fb.is_frame);
}

TEST(FrameOperator, DimensionMismatchThrows) {
  LabeledFrameFamily bad = plain_family({{basis(2, 0)}});
  bad.entries.push_back({{1, 0}, {basis(3, 0)}});
  EXPECT_THROW(frame_operator(bad), Error);
}

TEST(FrameBounds, RepeatedVectorIsNotAFrame) {
  const FrameBounds fb = frame_bounds(plain_family({{basis(2, 0)}, {basis(2, 0)}}));
  EXPECT_EQ(fb.lower, 0.0);
  EXPECT_NEAR(fb.upper, 2.0, 1e-15);
  EXPECT_FALSE(fb.is_frame);
}

TEST(FrameBounds, OversampledGaussianGaborIsAFrame) {
  const SampleGrid g = make_grid(16);
  const LabeledFrameFamily fam = gabor_system({window(g, WindowSpec::standard())}, make_lattice(16, 2, 2));
  const FrameBounds fb = frame_bounds(fam);
  Eigen::SelfAdjointEigenSolver<CMatrix> dense(frame_operator(fam), Eigen::EigenvaluesOnly);
  EXPECT_NEAR(fb.lower, dense.eigenvalues()[0], 1e-12);
  EXPECT_NEAR(fb.upper, dense.eigenvalues()[15], 1e-12);
  EXPECT_TRUE(fb.is_frame);
  EXPECT_GT(fb.lower, 0.1);
}

TEST(FrameOperator, HermitianPsdMonotoneAndAdditive) {
  std::mt19937_64 rng(3);
  const SampleGrid g = make_grid(16);
  const Lattice lat = make_lattice(16, 4, 2);
  const Signal w1 = oracle::random_signal(g, rng);
  const Signal w2 = oracle::random_signal(g, rng);
  const CMatrix s1 = frame_operator(gabor_system({w1}, lat));
  const CMatrix s2 = frame_operator(gabor_system({w2}, lat));
  const CMatrix s12 = frame_operator(gabor_system({w1, w2}, lat));
  EXPECT_LT((s12 - s1 - s2).cwiseAbs().maxCoeff(), 1e-10 * s12.cwiseAbs().maxCoeff());
  EXPECT_LT((s12 - s12.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * s12.cwiseAbs().maxCoeff());
  EXPECT_GE(hermitian_range(s12).min, -1e-12 * s12.cwiseAbs().maxCoeff());

  // nested families: adding members never lowers A or B
  for (int trial = 0; trial < 10; ++trial) {
    LabeledFrameFamily fam{16, g.step, {}};
    FrameBounds prev{0.0, 0.0, false};
    for (int step = 0; step < 24; ++step) {
      fam.entries.push_back({{step, 0}, {oracle::random_signal(g, rng).values}});
      const FrameBounds fb = frame_bounds(fam);
      EXPECT_GE(fb.lower, prev.lower - 1e-12);
      EXPECT_GE(fb.upper, prev.upper - 1e-12);
      prev = fb;
    }
  }
}

TEST(Eigenframe, SmallThresholdGivesFrame) {
  const SampleGrid g = make_grid(16);
  const SymbolFamily fam = bupu_family(make_lattice(16, 4, 4), BumpShape::Box);
  const LabeledFrameFamily ef = eigenframe(fam, everywhere(window(g, WindowSpec::standard())), 0.1);
  EXPECT_EQ(ef.entries.size(), 16u);
  EXPECT_EQ(ef.empty_labels(), 0);
  const FrameBounds fb = frame_bounds(ef);
  EXPECT_TRUE(fb.is_frame);
  // dense oracle on the same family
  Eigen::SelfAdjointEigenSolver<CMatrix> dense(frame_operator(ef), Eigen::EigenvaluesOnly);
  EXPECT_NEAR(fb.lower, dense.eigenvalues()[0], 1e-12);
}

TEST(Eigenframe, ThresholdAboveAllEigenvaluesGivesEmptyFamily) {
  const SampleGrid g = make_grid(16);
  const SymbolFamily fam = bupu_family(make_lattice(16, 4, 4), BumpShape::Box);
  const LabeledFrameFamily ef = eigenframe(fam, everywhere(window(g, WindowSpec::standard())), 0.999);
  EXPECT_EQ(ef.member_count(), 0);
  EXPECT_EQ(ef.empty_labels(), 16);
  EXPECT_FALSE(frame_bounds(ef).is_frame);
}

TEST(Eigenframe, RuleDerivedThresholdGivesFrame) {
  const SampleGrid g = make_grid(16);
  const SymbolFamily fam = bupu_family(make_lattice(16, 4, 4), BumpShape::Box);
  const Signal phi = normalized(window(g, WindowSpec::standard()));
  const auto ops = local_operators(fam, everywhere(phi));
  const TruncationSandwich sw = truncation_sandwich(ops);

  // oracle: assemble sum H^2 and sum H^4 directly
  CMatrix h2 = CMatrix::Zero(16, 16), h4 = CMatrix::Zero(16, 16);
  for (const auto& op : ops) {
    const CMatrix sq = op.matrix() * op.matrix();
    h2 += sq;
    h4 += sq * sq;
  }
  EXPECT_NEAR(sw.sum_h2.max, hermitian_range(h2).max, 1e-12);
  EXPECT_NEAR(sw.sum_h4.min, hermitian_range(h4).min, 1e-12);

  const double eps = sw.eps_rule();
  EXPECT_GT(eps, 0.0);
  EXPECT_LT(eps, sw.sum_h4.min / sw.sum_h2.max);
  EXPECT_TRUE(frame_bounds(eigenframe(fam, ops, eps)).is_frame);
}

TEST(Eigenframe, SandwichOrderingWithPartitionOfUnity) {
  const SampleGrid g = make_grid(16);
  for (BumpShape shape : {BumpShape::Box, BumpShape::Tent}) {
    const SymbolFamily fam = bupu_family(make_lattice(16, 4, 4), shape);
    for (double l : {1.0, 1.5}) {
      const auto ops = local_operators(fam, everywhere(normalized(window(g, WindowSpec::gaussian(l)))));
      const TruncationSandwich sw = truncation_sandwich(ops);
      EXPECT_NEAR(sw.sum_h.min, 1.0, 1e-10);
      EXPECT_NEAR(sw.sum_h.max, 1.0, 1e-10);
      EXPECT_TRUE(sw.ordered());
      EXPECT_LE(sw.sum_h4.min, sw.sum_h2.min);
      EXPECT_GT(sw.sum_h4.min, 0.0);
    }
  }
}

TEST(Eigenframe, Preconditions) {
  const SampleGrid g = make_grid(16);
  const SymbolFamily fam = bupu_family(make_lattice(16, 4, 4), BumpShape::Box);
  EXPECT_THROW(eigenframe(fam, everywhere(window(g, WindowSpec::standard())), 0.0), Error);
  SymbolFamily broken = fam;
  broken.members.pop_back();
  broken.partition_of_unity = false;
  EXPECT_THROW(eigenframe(broken, everywhere(window(g, WindowSpec::standard())), 0.1), Error);
}
