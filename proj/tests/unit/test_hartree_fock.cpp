#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "fbi/errors.hpp"
#include "fbi/hartree_fock.hpp"
#include "fixtures.hpp"

using namespace fbi;
using fbi::testing::flavored_table;
using fbi::testing::random_matrix;
using fbi::testing::table;

namespace {

// Dense evaluation with explicit Lambda(q') and pi_{q'} matrices.
struct DenseEnergy {
  double trace_form = 0.0;
  double commutator_form = 0.0;
};

DenseEnergy dense_energy(const DensityMatrix& dm, const FormFactorTable& T, const Interaction& V) {
  const int d = T.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(T.nk()) * d;
  const MatrixXc I = MatrixXc::Identity(n, n);
  const MatrixXc Q = dm.P - 0.5 * I;
  double direct = 0.0, constant = 0.0, exchange = 0.0, comm = 0.0;
  for (std::size_t qi = 0; qi < T.nq(); ++qi) {
    MatrixXc Lam = MatrixXc::Zero(n, n);
    for (std::size_t k = 0; k < T.nk(); ++k) Lam.block(k * d, k * d, d, d) = T.at(k, qi);
    const MatrixXc A = Lam * momentum_shift(T.grid(), d, T.qprime(qi));
    const double v = V(T.qvec(qi));
    direct += v * std::norm((A * Q).trace());
    constant += v * 0.25 * Lam.squaredNorm();
    exchange += v * (A * Q * A.adjoint() * Q).trace().real();
    comm += v * (std::norm((A * Q).trace()) + 0.5 * (A * dm.P - dm.P * A).squaredNorm());
  }
  const double pref = 1.0 / (double(T.nk()) * T.grid().lattice().area_omega);
  return {pref * (direct + constant - exchange), pref * comm};
}

}  // namespace

TEST(Interaction, Families) {
  const Interaction y = Interaction::parse("yukawa", 0.5);
  EXPECT_NEAR(y(Vec2::Zero()), 2 * std::numbers::pi / 0.5, 1e-14);
  EXPECT_NEAR(y(Vec2(3, 4)), 2 * std::numbers::pi / std::sqrt(25.25), 1e-14);
  const Interaction g = Interaction::parse("gaussian", 2.0);
  EXPECT_NEAR(g(Vec2::Zero()), 8 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(g(Vec2(1, 0)), 8 * std::numbers::pi * std::exp(-2.0), 1e-13);
  EXPECT_STREQ(g.name(), "gaussian");
  EXPECT_THROW(Interaction::parse("coulomb", 1.0), ConfigError);
  EXPECT_THROW(Interaction(Interaction::Family::yukawa, 0.0), PreconditionError);
}

TEST(MomentumShift, PermutationAlgebra) {
  const KGrid grid(fbi::testing::lattice(), 3, 4);
  const MatrixXc a = momentum_shift(grid, 2, {1, 2});
  const MatrixXc b = momentum_shift(grid, 2, {-1, -2});
  EXPECT_LT((a * b - MatrixXc::Identity(24, 24)).norm(), 1e-15);
  EXPECT_LT((a.adjoint() - b).norm(), 1e-15);
  EXPECT_LT((momentum_shift(grid, 2, {3, 4}) - MatrixXc::Identity(24, 24)).norm(), 1e-15);
}

TEST(HaarUnitary, UnitaryAndSeeded) {
  std::mt19937_64 a(5), b(5);
  const MatrixXc U = haar_unitary(9, a);
  EXPECT_LT((U.adjoint() * U - MatrixXc::Identity(9, 9)).norm(), 1e-13);
  EXPECT_EQ((U - haar_unitary(9, b)).norm(), 0.0);
}

TEST(RandomProjector, HalfFilled) {
  std::mt19937_64 rng(3);
  const DensityMatrix dm = random_projector(Flavor::spinless, 4, 4, rng);
  EXPECT_LT(projector_defect(dm.P), 1e-12);
  EXPECT_TRUE(dm.half_filled());
  EXPECT_NO_THROW(require_projector(dm));
  DensityMatrix bad = dm;
  bad.P *= 1.1;
  EXPECT_THROW(require_projector(bad), PreconditionError);
}

TEST(EnergyForms, MatchDenseReference) {
  const FormFactorTable& T = table(2, 2);
  const Interaction V = Interaction::parse("yukawa", 1.0);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 4; ++t) {
    const DensityMatrix dm = random_projector(Flavor::spinless, 4, 4, rng);
    const DenseEnergy ref = dense_energy(dm, T, V);
    const EnergyTerms e = energy_trace_form(dm, T, V);
    EXPECT_NEAR(e.total, ref.trace_form, 1e-10 * (1 + std::abs(ref.trace_form)));
    EXPECT_NEAR(energy_commutator_form(dm, T, V), ref.commutator_form, 1e-10 * (1 + std::abs(ref.commutator_form)));
    EXPECT_NEAR(e.per_k * 4, e.total, 1e-14 * (1 + std::abs(e.total)));
  }
  // Block-diagonal states take the blockwise path; compare with the dense reference too.
  MatrixXc P0 = MatrixXc::Zero(2, 2);
  P0(0, 0) = 0.5;
  P0(0, 1) = 0.5;
  P0(1, 0) = 0.5;
  P0(1, 1) = 0.5;
  const DensityMatrix dm = constant_block_state(T, P0);
  const DenseEnergy ref = dense_energy(dm, T, V);
  EXPECT_NEAR(energy_trace_form(dm, T, V).total, ref.trace_form, 1e-10 * (1 + std::abs(ref.trace_form)));
  EXPECT_NEAR(energy_commutator_form(dm, T, V), ref.commutator_form, 1e-10 * (1 + std::abs(ref.commutator_form)));
}

TEST(EnergyForms, TraceEqualsCommutatorForm) {
  const FormFactorTable& T = table(4, 4);
  const Interaction V = Interaction::parse("gaussian", 1.3);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix dm = random_projector(Flavor::spinless, 16, 16, rng);
    const double a = energy_trace_form(dm, T, V).total;
    const double b = energy_commutator_form(dm, T, V);
    EXPECT_NEAR(a, b, 1e-10 * (1 + std::abs(a)));
    EXPECT_GE(b, -1e-12);
    EXPECT_GT(b, 1e-3);
  }
}

TEST(FerromagneticStates, ZeroEnergy) {
  const FormFactorTable& T = table(3, 3, 7);
  const Interaction V = Interaction::parse("yukawa", 1.0);
  for (std::size_t c = 0; c < 2; ++c) {
    const DensityMatrix dm = build_fm_state(T, c);
    EXPECT_TRUE(dm.half_filled());
    EXPECT_LT(std::abs(energy_trace_form(dm, T, V).total), 1e-12);
    const GsResiduals r = gs_condition_residuals(dm, T, V);
    EXPECT_LT(r.trace_residual, 1e-8);
    EXPECT_EQ(r.commutator_residual, 0.0);
    EXPECT_EQ(r.trace_per_q.size(), T.nq());
  }
  EXPECT_THROW(build_fm_state(T, 2), PreconditionError);
  EXPECT_THROW(energy_trace_form(build_fm_state(flavored_table(3, 3, Flavor::valley, 7), 0), T, V), FlavorMismatchError);
}

TEST(FerromagneticStates, GeneratorShapes) {
  EXPECT_EQ(fm_generators(Flavor::spinless).size(), 2u);
  EXPECT_EQ(fm_generators(Flavor::valley).size(), 3u);
  const auto g = fm_generators(Flavor::valley_spin);
  ASSERT_EQ(g.size(), 5u);
  for (const auto& P : g) EXPECT_NEAR(P.trace().real(), 4.0, 1e-15);
  // First listed generator diag(1,0,0,1,1,0,0,1) (spin-major) in valley-band-major order.
  for (int a = 0; a < 4; ++a)
    for (int s = 0; s < 2; ++s) EXPECT_EQ(g[0](2 * a + s, 2 * a + s).real(), (a == 0 || a == 3) ? 1.0 : 0.0);
}

TEST(TraceLemma, RandomPairs) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> size(1, 16);
  for (int t = 0; t < 200; ++t) {
    const int n = size(rng);
    const MatrixXc A = random_matrix(n, n, rng), B = random_matrix(n, n, rng);
    const double scale = A.squaredNorm() * B.squaredNorm();
    EXPECT_LT(trace_lemma_residual(A, B), 1e-12 * std::max(1.0, scale));
  }
}

TEST(PairwiseSum, MatchesExactSum) {
  std::vector<double> x(1001);
  std::iota(x.begin(), x.end(), 0.0);
  EXPECT_EQ(pairwise_sum(x.data(), x.size()), 500500.0);
  EXPECT_EQ(pairwise_sum(x.data(), 0), 0.0);
}
