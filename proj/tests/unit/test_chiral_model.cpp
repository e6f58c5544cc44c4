#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fbi/chiral_model.hpp"
#include "fbi/errors.hpp"
#include "fixtures.hpp"

using namespace fbi;
using fbi::testing::basis;
using fbi::testing::lattice;

namespace {

VectorXc random_vector(int n, std::mt19937_64& rng) { return fbi::testing::random_matrix(n, 1, rng).col(0); }

Eigen::VectorXd singular_values(const MatrixXc& M) {
  Eigen::VectorXd s = Eigen::BDCSVD<MatrixXc>(M).singularValues();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

}  // namespace

TEST(PlaneWaveBasis, Sizes) {
  EXPECT_EQ(basis(1).n_g(), 7);
  EXPECT_EQ(basis(4).n_g(), 61);
  EXPECT_EQ(basis(4).spinor_dim(), 122);
  EXPECT_EQ(basis(4).state_dim(), 244);
  EXPECT_THROW(make_basis(lattice(), 0.5), CutoffError);
  const auto& b = basis(4);
  for (int i = 0; i < b.n_g(); ++i) EXPECT_EQ(b.find(b.g_list()[i]), i);
  EXPECT_EQ(b.find({9, 9}), -1);
  EXPECT_GT(b.truncated_couplings(), 0);
}

TEST(PlaneWaveBasis, InterlayerShifts) {
  const auto& L = lattice();
  EXPECT_EQ(interlayer_shift(L, 0), (ReciprocalIndex{-1, -1}));
  EXPECT_EQ(interlayer_shift(L, 1), (ReciprocalIndex{0, -1}));
  EXPECT_EQ(interlayer_shift(L, 2), (ReciprocalIndex{-1, 0}));
  // Layer-2 momentum minus layer-1 momentum equals q_n.
  const auto& b = basis(2);
  for (int n = 0; n < 3; ++n) {
    const ReciprocalIndex G{1, -1};
    const Vec2 diff = b.offset(1, G + interlayer_shift(L, n)) - b.offset(0, G);
    EXPECT_NEAR((diff - L.q_vectors[n]).norm(), 0.0, 1e-14);
  }
}

TEST(ChiralOperator, UncoupledSpectrumIsKinetic) {
  const auto& b = basis(3);
  const Vec2 k = 0.31 * lattice().g1 - 0.12 * lattice().g2;
  std::vector<double> expect;
  for (int layer = 0; layer < 2; ++layer)
    for (const auto& G : b.g_list()) expect.push_back((k + b.offset(layer, G)).norm());
  std::sort(expect.begin(), expect.end());
  const Eigen::VectorXd s = singular_values(assemble_D(k, 0.0, b).matrix);
  ASSERT_EQ(s.size(), static_cast<Eigen::Index>(expect.size()));
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(s(i), expect[i], 1e-12);

  // Dirac points: k = -q0 zeroes the layer-1 G = 0 entry.
  EXPECT_NEAR(singular_values(assemble_D(-lattice().q_vectors[0], 0.0, b).matrix)(0), 0.0, 1e-15);
}

TEST(ChiralOperator, LinearInAlpha) {
  const auto& b = basis(3);
  const Vec2 k(0.2, -0.4);
  const MatrixXc D0 = assemble_D(k, 0.0, b).matrix;
  const MatrixXc D1 = assemble_D(k, 1.0, b).matrix;
  const MatrixXc Da = assemble_D(k, 0.37, b).matrix;
  EXPECT_NEAR((Da - D0 - 0.37 * (D1 - D0)).norm(), 0.0, 1e-13);
  // Coupling entries have modulus alpha and phases from {1, w, w^2}.
  const MatrixXc C = D1 - D0;
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index j = 0; j < C.cols(); ++j)
      if (std::abs(C(i, j)) > 0) {
        EXPECT_NEAR(std::abs(C(i, j)), 1.0, 1e-14);
        EXPECT_NEAR(std::abs(std::pow(C(i, j), 3) - 1.0), 0.0, 1e-13);
      }
}

TEST(ChiralOperator, HamiltonianStructure) {
  const auto& b = basis(3);
  const Vec2 k(0.13, 0.41);
  const MatrixXc H = assemble_H(k, 0.5, b);
  EXPECT_NEAR((H - H.adjoint()).norm(), 0.0, 1e-14);
  const int n = b.spinor_dim();
  Eigen::VectorXd g = Eigen::VectorXd::Ones(2 * n);
  g.tail(n).setConstant(-1.0);
  const MatrixXc G = g.cast<cplx>().asDiagonal();
  EXPECT_NEAR((G * H * G + H).norm(), 0.0, 1e-14);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXc>(H, Eigen::EigenvaluesOnly).eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev(i), -ev(ev.size() - 1 - i), 1e-11);
}

TEST(Symmetries, QCommutesWithH) {
  const auto& b = basis(3);
  std::mt19937_64 rng(11);
  const Vec2 k(0.27, -0.09);
  const MatrixXc H = assemble_H(k, 0.58, b);
  for (int t = 0; t < 3; ++t) {
    const VectorXc v = random_vector(b.state_dim(), rng);
    const VectorXc lhs = H * symmetry_action(Symmetry::Q, v, b);
    const VectorXc rhs = symmetry_action(Symmetry::Q, H * v, b);
    EXPECT_LT((lhs - rhs).norm(), 1e-12 * v.norm());
    // Q is an involution.
    EXPECT_LT((symmetry_action(Symmetry::Q, symmetry_action(Symmetry::Q, v, b), b) - v).norm(), 1e-14);
  }
}

TEST(Symmetries, LAnticommutesAndReversesMomentum) {
  const auto& b = basis(3);
  std::mt19937_64 rng(12);
  const Vec2 k(0.27, -0.09);
  const MatrixXc Hk = assemble_H(k, 0.58, b);
  const MatrixXc Hmk = assemble_H(-k, 0.58, b);
  for (int t = 0; t < 3; ++t) {
    const VectorXc v = random_vector(b.state_dim(), rng);
    const VectorXc Lv = symmetry_action(Symmetry::L, v, b);
    EXPECT_LT((Hmk * Lv + symmetry_action(Symmetry::L, Hk * v, b)).norm(), 1e-12 * v.norm());
    // L^2 = -1 and L commutes with Q.
    EXPECT_LT((symmetry_action(Symmetry::L, Lv, b) + v).norm(), 1e-14);
    const VectorXc QL = symmetry_action(Symmetry::Q, Lv, b);
    const VectorXc LQ = symmetry_action(Symmetry::L, symmetry_action(Symmetry::Q, v, b), b);
    EXPECT_LT((QL - LQ).norm(), 1e-14);
  }
  EXPECT_THROW(symmetry_action(Symmetry::Q, VectorXc::Zero(5), b), PreconditionError);
}

TEST(ShiftState, RelabelsBlochMomentum) {
  // For a state supported well inside the cutoff, D_{k+G0} (shifted v) = shifted (D_k v).
  const auto& b = basis(4);
  std::mt19937_64 rng(13);
  VectorXc v = VectorXc::Zero(b.spinor_dim());
  for (int layer = 0; layer < 2; ++layer)
    for (int g = 0; g < b.n_g(); ++g)
      if (lattice().reciprocal(b.g_list()[g]).norm() <= 2.0 * lattice().g1.norm() + 1e-9)
        v[layer * b.n_g() + g] = random_vector(1, rng)(0);
  const Vec2 k(0.11, 0.05);
  const ReciprocalIndex G0{1, 0};
  const MatrixXc Dk = assemble_D(k, 0.58, b).matrix;
  const MatrixXc Dkg = assemble_D(k + lattice().reciprocal(G0), 0.58, b).matrix;
  const VectorXc lhs = Dkg * shift_state(v, G0, b);
  const VectorXc rhs = shift_state(Dk * v, G0, b);
  EXPECT_LT((lhs - rhs).norm(), 1e-12 * v.norm());
  EXPECT_LT((shift_state(shift_state(v, G0, b), -G0, b) - v).norm(), 1e-15);
}
