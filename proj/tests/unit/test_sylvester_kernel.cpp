#include <gtest/gtest.h>

#include "fbi/errors.hpp"
#include "fbi/sylvester_kernel.hpp"
#include "fixtures.hpp"

using namespace fbi;
using fbi::testing::random_matrix;
using fbi::testing::table;

namespace {

VectorXc vec(const MatrixXc& X) { return Eigen::Map<const VectorXc>(X.data(), X.size()); }

}  // namespace

TEST(PairTerm, ActsAsSylvesterOperator) {
  std::mt19937_64 rng(41);
  for (int d : {2, 4, 8}) {
    const MatrixXc A = random_matrix(d, d, rng), B = random_matrix(d, d, rng), X = random_matrix(d, d, rng);
    const VectorXc lhs = pair_term(A, B) * vec(X);
    EXPECT_LT((lhs - vec(X * B - A * X)).norm(), 1e-12 * lhs.norm());
  }
}

TEST(KernelBasis, SyntheticSpectra) {
  Eigen::VectorXd d(4);
  d << 0.0, 0.0, 1.0, 2.0;
  KernelReport r = kernel_basis(d.cast<cplx>().asDiagonal().toDenseMatrix(), 2);
  EXPECT_EQ(r.dim, 2);
  EXPECT_FALSE(r.ambiguous);
  EXPECT_NEAR(r.gap, 1.0, 1e-15);
  EXPECT_NEAR(r.lambda_max, 2.0, 1e-15);
  ASSERT_EQ(r.basis.size(), 2u);
  for (const auto& X : r.basis) EXPECT_NEAR(X.norm(), 1.0, 1e-14);

  d << 0.0, 5e-10, 1.0, 1.0;
  r = kernel_basis(d.cast<cplx>().asDiagonal().toDenseMatrix(), 2, 1e-10);
  EXPECT_EQ(r.dim, 1);
  EXPECT_TRUE(r.ambiguous);

  // An identically vanishing operator has a full kernel once a scale is supplied.
  d << 0.0, 0.0, 1e-30, 1e-30;
  EXPECT_EQ(kernel_basis(d.cast<cplx>().asDiagonal().toDenseMatrix(), 2, 1e-10).dim, 2);
  EXPECT_EQ(kernel_basis(d.cast<cplx>().asDiagonal().toDenseMatrix(), 2, 1e-10, 1.0).dim, 4);
}

TEST(PairMatrix, HermitianPositive) {
  const FormFactorTable& T = table(3, 3, 7);
  const MatrixXc M = build_pair_matrix(T, 1, 4);
  EXPECT_LT((M - M.adjoint()).norm(), 1e-14 * M.norm());
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXc>(M).eigenvalues().minCoeff(), -1e-12);
  // vec(I) is always in the kernel at k = k'.
  const VectorXc one = vec(MatrixXc::Identity(2, 2));
  EXPECT_LT((build_pair_matrix(T, 4, 4) * one).norm(), 1e-12);
}

TEST(KernelScan, ThreeByThreeGrid) {
  const FormFactorTable& T = table(3, 3, 7);
  const KernelScan s = scan_pairs(T);
  const KGrid& g = T.grid();
  for (std::size_t k = 0; k < 9; ++k)
    for (std::size_t kp = 0; kp < 9; ++kp) {
      int expect = 0;
      if (k == 0 && kp == 0) expect = 4;
      else if (kp == k || kp == g.negate(k)) expect = 2;
      EXPECT_EQ(s.dim(k, kp), expect) << k << "," << kp;
      EXPECT_FALSE(s.ambiguous[k * 9 + kp]);
      if (expect == 0) EXPECT_GT(s.gap(k, kp), 1e-6);
    }
  ASSERT_EQ(s.antipodal.size(), 8u);
  for (const auto& v : s.antipodal) {
    EXPECT_EQ(v.kind, AntipodalVerdict::Kind::forced_zero);
    EXPECT_EQ(v.shifted_dim, 0);
    EXPECT_EQ(v.shifted_k, g.add(v.k, v.witness));
  }
  EXPECT_THROW(resolve_antipodal(T, 0), PreconditionError);
}

TEST(KernelScan, KernelVectorsSolveSylvester) {
  const FormFactorTable& T = table(3, 3, 7);
  const KernelReport same = pair_kernel(T, 2, 2);
  ASSERT_EQ(same.dim, 2);
  EXPECT_LT(same.max_sylvester_residual, 1e-8);
  for (const auto& X : same.basis) EXPECT_LT(std::abs(X(0, 1)) + std::abs(X(1, 0)), 1e-8);
  const KernelReport anti = pair_kernel(T, 2, T.grid().negate(2));
  ASSERT_EQ(anti.dim, 2);
  for (const auto& X : anti.basis) EXPECT_LT(std::abs(X(0, 0)) + std::abs(X(1, 1)), 1e-8);
  EXPECT_GT(sylvester_residual(T, 2, 2, MatrixXc::Constant(2, 2, 1.0)), 1e-3);
}

TEST(DisjointSpectra, Separation) {
  const FormFactorTable& T = table(3, 3, 7);
  EXPECT_EQ(disjoint_spectra_check(T, 4, 4), 0.0);
  EXPECT_GT(disjoint_spectra_check(T, 1, 4), 1e-3);
  EXPECT_LT(disjoint_spectra_check(T, 1, T.grid().negate(1)), 1e-8);
}

TEST(KernelScan, TwoTorsionPointsCarryBothSolutions) {
  // k = -k mod the reciprocal lattice: diagonal and swapped solutions coexist.
  const FormFactorTable& T = table(4, 4, 7);
  const KGrid& g = T.grid();
  for (std::size_t k = 1; k < 16; ++k) {
    const KernelReport r = pair_kernel(T, k, k);
    EXPECT_EQ(r.dim, g.is_two_torsion(k) ? 4 : 2) << k;
    if (g.is_two_torsion(k))
      EXPECT_EQ(resolve_antipodal(T, k).kind, AntipodalVerdict::Kind::self_antipodal);
  }
  EXPECT_STREQ(AntipodalVerdict::name(AntipodalVerdict::Kind::forced_zero), "forced-zero");
}
