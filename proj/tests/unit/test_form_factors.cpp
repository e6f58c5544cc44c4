#include <gtest/gtest.h>

#include <cmath>

#include "fbi/errors.hpp"
#include "fbi/form_factors.hpp"
#include "fixtures.hpp"

using namespace fbi;
using fbi::testing::bundle;
using fbi::testing::flavored_table;
using fbi::testing::lattice;
using fbi::testing::table;

namespace {

// Lambda_k(p) by quadrature of the real-space Bloch functions on an n x n cell sample.
MatrixXc quadrature_form_factor(const BlochBundle& B, std::size_t k, GridMomentum p, int n) {
  const KGrid& grid = B.grid();
  const Folded f = grid.fold(grid.momentum(k) + p);
  const Vec2 G = lattice().reciprocal(f.G);
  MatrixXc out = MatrixXc::Zero(2, 2);
  const auto rs = r_sample(lattice(), n);
  for (const Vec2& r : rs) {
    const cplx phase = std::polar(1.0, -G.dot(r));
    for (int m = 0; m < 2; ++m) {
      const VectorXc a = evaluate_state(B.band(k, m), B.basis(), r);
      for (int nn = 0; nn < 2; ++nn) out(m, nn) += phase * a.dot(evaluate_state(B.band(f.k, nn), B.basis(), r));
    }
  }
  return out / double(rs.size());
}

}  // namespace

TEST(QPrimeDisc, BruteForceCountAndOrder) {
  const KGrid grid(lattice(), 4, 4);
  const double R = 2.5 * lattice().g1.norm();
  const auto disc = qprime_disc(grid, R);
  std::size_t count = 0;
  for (int a = -40; a <= 40; ++a)
    for (int b = -40; b <= 40; ++b)
      if (grid.vec({a, b}).norm() <= R + 1e-9) ++count;
  EXPECT_EQ(disc.size(), count);
  EXPECT_EQ(disc.front(), (GridMomentum{0, 0}));
  for (std::size_t i = 1; i < disc.size(); ++i) EXPECT_LE(grid.vec(disc[i - 1]).norm(), grid.vec(disc[i]).norm() + 1e-9);
}

TEST(FormFactorTable, LayoutAndLookup) {
  const FormFactorTable& T = table(4, 4);
  EXPECT_EQ(T.nk(), 16u);
  EXPECT_EQ(T.dim(), 2);
  EXPECT_EQ(T.flavor(), Flavor::spinless);
  for (std::size_t qi = 0; qi < T.nq(); ++qi) {
    EXPECT_EQ(T.index_of(T.qprime(qi)), qi);
    EXPECT_EQ(T.qprime(T.negate(qi)), -T.qprime(qi));
  }
  for (std::size_t k = 0; k < 16; ++k)
    for (std::size_t qi = 0; qi < T.nq(); qi += 7)
      EXPECT_EQ(T.target(k, qi), T.grid().fold(T.grid().momentum(k) + T.qprime(qi)).k);
  EXPECT_FALSE(T.find({1000, 0}).has_value());
  EXPECT_THROW(T.index_of({1000, 0}), PreconditionError);
  EXPECT_THROW(FormFactorTable(T.grid(), Flavor::spinless, 1.0, {{0, 0}, {1, 0}}, std::vector<MatrixXc>(32)),
               PreconditionError);
}

TEST(FormFactorTable, MatchesRealSpaceQuadrature) {
  const BlochBundle& B = bundle(4, 4);
  const FormFactorTable& T = table(4, 4);
  for (std::size_t k : {0u, 3u, 9u})
    for (GridMomentum p : {GridMomentum{0, 0}, GridMomentum{1, 0}, GridMomentum{-3, 2}, GridMomentum{4, 4}}) {
      const MatrixXc ref = quadrature_form_factor(B, k, p, 40);
      EXPECT_LT((T.at(k, T.index_of(p)) - ref).norm(), 1e-10) << "k=" << k << " p=(" << p.a << "," << p.b << ")";
    }
}

TEST(FormFactorTable, UnfoldedEvaluationAgrees) {
  const BlochBundle& B = bundle(4, 4);
  const FormFactorTable& T = table(4, 4);
  for (std::size_t k = 0; k < 16; k += 5)
    for (std::size_t qi = 0; qi < T.nq(); qi += 11)
      EXPECT_LT((form_factor_unfolded(B, T.grid().momentum(k), T.qprime(qi)) - T.at(k, qi)).norm(), 1e-13);
}

TEST(FormFactorTable, Identities) {
  const FormFactorTable& T = table(4, 4);
  const IdentityResiduals r = identity_residuals(T);
  EXPECT_LT(r.normalization, 1e-10);
  EXPECT_LT(r.adjoint, 1e-10);
  EXPECT_EQ(off_diagonal_norm(T), 0.0);
  EXPECT_EQ(block_scalar_residual(T), 0.0);
}

TEST(FormFactorTable, CutoffMargin) {
  EXPECT_THROW(compute_table(bundle(4, 4), 3.5 * lattice().g1.norm()), CutoffError);
  // The 4-shell table's outermost q' shell still carries weight.
  EXPECT_TRUE(table(4, 4).cutoff_warning);
  EXPECT_FALSE(table(3, 3, 7).cutoff_warning);
  EXPECT_LT(table(3, 3, 7).tail_norm, 1e-6);
}

TEST(SumRule, HoldsOverGridButNotPerMomentum) {
  const FormFactorTable& T = table(3, 3, 7);
  EXPECT_LT(sum_rule_check(T), 1e-8 * T.nk());
  double single = 0.0;
  for (std::size_t qi = 0; qi < T.nq(); ++qi)
    if (T.is_reciprocal(qi)) single = std::max(single, std::abs(T.at(1, qi)(0, 0) - T.at(1, qi)(1, 1)));
  EXPECT_GT(single, 1e-3);
  EXPECT_THROW(sum_rule_check(flavored_table(3, 3, Flavor::valley, 7)), FlavorMismatchError);
}

TEST(PairProduct, FourierSumReproducesRealSpace) {
  const BlochBundle& B = bundle(3, 3, 7);
  const FormFactorTable& T = table(3, 3, 7);
  for (std::size_t k : {0u, 4u})
    for (std::size_t kp : {0u, 2u, 4u, 7u})
      for (const Vec2& r : {Vec2(0.1, 0.2), Vec2(-1.3, 0.8), Vec2(2.0, -0.5)})
        EXPECT_LT((pair_product(T, k, kp, r) - pair_product_direct(B, k, kp, r)).norm(), 1e-6);
}

TEST(PairProduct, ParsevalConsistency) {
  const BlochBundle& B = bundle(3, 3, 7);
  const FormFactorTable& T = table(3, 3, 7);
  const auto rs = r_sample(lattice(), 40);
  for (std::size_t kp : {0u, 5u}) {
    const std::size_t k = 1;
    const GridMomentum base = T.grid().momentum(kp) - T.grid().momentum(k);
    double lhs = 0.0;
    for (std::size_t qi = 0; qi < T.nq(); ++qi)
      if (T.grid().is_reciprocal(T.qprime(qi) - base)) lhs += T.at(k, qi).squaredNorm();
    double rhs = 0.0;
    for (const Vec2& r : rs) rhs += pair_product_direct(B, k, kp, r).squaredNorm();
    rhs /= double(rs.size());
    EXPECT_NEAR(lhs, rhs, 1e-6);
  }
}

TEST(TailProfile, DecaysOverLastShells) {
  const FormFactorTable& T = table(3, 3, 7);
  const auto prof = tail_profile(T, 2);
  ASSERT_GE(prof.size(), 4u);
  for (std::size_t i = prof.size() - 3; i < prof.size(); ++i) EXPECT_LE(prof[i].tail, prof[i - 1].tail);
  EXPECT_EQ(prof.back().tail, 0.0);
}

TEST(ExtendFlavor, ValleyStructure) {
  const FormFactorTable& S = table(3, 3, 7);
  const FormFactorTable& V = flavored_table(3, 3, Flavor::valley, 7);
  EXPECT_EQ(V.dim(), 4);
  EXPECT_LT(identity_residuals(V).normalization, 1e-10);
  EXPECT_LT(identity_residuals(V).adjoint, 1e-10);
  EXPECT_LT(block_scalar_residual(V), 1e-12);
  const MatrixXc Pi = flavor_permutation(Flavor::valley);
  EXPECT_LT((Pi * Pi - MatrixXc::Identity(4, 4)).norm(), 1e-15);
  // q' = 0 pair product: diag(|u_k(r)|^2, |u_k(-r)|^2, |u_k(-r)|^2, |u_k(r)|^2).
  const BlochBundle& B = bundle(3, 3, 7);
  for (std::size_t k : {1u, 5u}) {
    const Vec2 r(0.4, -0.9);
    const MatrixXc rho = pair_product(V, k, k, r);
    const double up = evaluate_state(B.band(k, 0), B.basis(), r).squaredNorm();
    const double um = evaluate_state(B.band(k, 0), B.basis(), -r).squaredNorm();
    EXPECT_NEAR(rho(0, 0).real(), up, 1e-6);
    EXPECT_NEAR(rho(1, 1).real(), um, 1e-6);
    EXPECT_NEAR(rho(2, 2).real(), um, 1e-6);
    EXPECT_NEAR(rho(3, 3).real(), up, 1e-6);
    EXPECT_LT((rho - MatrixXc(rho.diagonal().asDiagonal())).norm(), 1e-12);
  }
  EXPECT_LT(time_reversal_magnitude_residual(S), 1e-8);
}

TEST(ExtendFlavor, SpinIsTensorFactor) {
  const FormFactorTable& V = flavored_table(3, 3, Flavor::valley, 7);
  const FormFactorTable& W = flavored_table(3, 3, Flavor::valley_spin, 7);
  EXPECT_EQ(W.dim(), 8);
  for (std::size_t k = 0; k < W.nk(); k += 4)
    for (std::size_t qi = 0; qi < W.nq(); qi += 13) {
      const MatrixXc& a = V.at(k, qi);
      const MatrixXc& b = W.at(k, qi);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) EXPECT_EQ(b(2 * i + s, 2 * j + t), s == t ? a(i, j) : cplx(0.0));
    }
  EXPECT_LT(block_scalar_residual(W), 1e-12);
}

TEST(ExtendFlavor, RejectsTruncationBrokenSymmetry) {
  // At 4 shells the time-reversal magnitude relation only holds to ~1e-4.
  EXPECT_GT(time_reversal_magnitude_residual(table(4, 4)), 1e-8);
  EXPECT_THROW(extend_flavor(table(4, 4), Flavor::valley), ConventionError);
  EXPECT_THROW(extend_flavor(flavored_table(3, 3, Flavor::valley, 7), Flavor::valley_spin), FlavorMismatchError);
}
