#include <gtest/gtest.h>

#include "fbi/classification.hpp"
#include "fbi/errors.hpp"
#include "fbi/ferro_propagation.hpp"
#include "fbi/sylvester_kernel.hpp"
#include "fixtures.hpp"

using namespace fbi;
using fbi::testing::flavored_table;
using fbi::testing::table;

TEST(Commutant, DimensionsMatchNumericalKernels) {
  EXPECT_EQ(commutant_dimension(Flavor::spinless), 2);
  EXPECT_EQ(commutant_dimension(Flavor::valley), 8);
  EXPECT_EQ(commutant_dimension(Flavor::valley_spin), 32);
  for (Flavor f : {Flavor::valley, Flavor::valley_spin}) {
    const FormFactorTable& T = flavored_table(3, 3, f, 7);
    const KernelReport r = pair_kernel(T, 4, 4);
    EXPECT_EQ(r.dim, commutant_dimension(f)) << flavor_name(f);
    EXPECT_FALSE(r.ambiguous);
    // Every kernel vector, pulled back by Pi, is block diagonal.
    const MatrixXc Pi = flavor_permutation(f);
    for (const auto& X : r.basis) EXPECT_LT(block_structure_defect(Pi * X * Pi, f), 1e-8);
  }
}

TEST(BlockUnitary, Structure) {
  std::mt19937_64 rng(2);
  for (Flavor f : {Flavor::spinless, Flavor::valley, Flavor::valley_spin}) {
    const SymmetryElement g = random_block_unitary(f, rng);
    const int d = flavor_dim(f);
    EXPECT_EQ(g.U.rows(), d);
    EXPECT_LT((g.U.adjoint() * g.U - MatrixXc::Identity(d, d)).norm(), 1e-13);
    EXPECT_EQ(block_structure_defect(g.U, f), 0.0);
  }
  EXPECT_EQ(block_size(Flavor::valley_spin), 4);
}

TEST(ChernOperator, Layout) {
  EXPECT_THROW(chern_operator(Flavor::spinless), FlavorMismatchError);
  const MatrixXc C = chern_operator(Flavor::valley_spin);
  const double expect[8] = {1, 1, -1, -1, -1, -1, 1, 1};
  for (int i = 0; i < 8; ++i) EXPECT_EQ(C(i, i).real(), expect[i]);
  EXPECT_LT((C * C - MatrixXc::Identity(8, 8)).norm(), 1e-15);
}

TEST(OrbitState, ValidProjectorAndErrors) {
  const FormFactorTable& T = flavored_table(3, 3, Flavor::valley, 7);
  std::mt19937_64 rng(6);
  const auto gens = generators(Flavor::valley);
  const DensityMatrix dm = orbit_state(gens[1], random_block_unitary(Flavor::valley, rng), T);
  EXPECT_LT(projector_defect(dm.P), 1e-12);
  EXPECT_TRUE(dm.half_filled());
  EXPECT_EQ(uniform_filling_check(dm), 0.0);
  SymmetryElement bad = random_block_unitary(Flavor::valley, rng);
  bad.U(0, 3) = 0.1;
  EXPECT_THROW(orbit_state(gens[1], bad, T), PreconditionError);
  SymmetryElement nonunitary = random_block_unitary(Flavor::valley, rng);
  nonunitary.U *= 2.0;
  EXPECT_THROW(orbit_state(gens[1], nonunitary, T), PreconditionError);
  EXPECT_THROW(orbit_state(gens[1], random_block_unitary(Flavor::valley_spin, rng), T), FlavorMismatchError);
}

TEST(OrbitSweep, ValleyGroundStates) {
  const FormFactorTable& T = flavored_table(3, 3, Flavor::valley, 7);
  const Interaction V = Interaction::parse("yukawa", 1.0);
  const OrbitSweep s = orbit_sweep(T, V, 6, 99);
  ASSERT_EQ(s.generators.size(), 3u);
  const double bound = 10.0 * std::max(s.fm_trace_residual, 1e-14);
  for (const auto& g : s.generators) {
    EXPECT_LE(g.max_trace_residual, bound);
    EXPECT_LE(g.max_commutator_residual, 10.0 * s.fm_commutator_residual + 1e-14);
    EXPECT_LE(g.max_energy - g.min_energy, 1e-8);
    EXPECT_LE(g.max_chern_residual, 1e-12);
  }
  EXPECT_TRUE(s.generators[0].quantum_hall);
  EXPECT_FALSE(s.generators[1].quantum_hall);
  EXPECT_TRUE(s.generators[2].quantum_hall);
  EXPECT_LT(s.generators[0].max_distance_from_generator, 1e-12);
  EXPECT_LT(s.generators[2].max_distance_from_generator, 1e-12);
  EXPECT_GT(s.generators[1].max_distance_from_generator, 0.1);
}

TEST(OrbitSweep, NonGroundStateIsDetected) {
  // A block mixing sublattices within one valley is outside every orbit and fails the commutator condition.
  const FormFactorTable& T = flavored_table(3, 3, Flavor::valley, 7);
  MatrixXc P0 = MatrixXc::Zero(4, 4);
  P0.topLeftCorner(2, 2).setConstant(0.5);
  P0(2, 2) = 1.0;
  const DensityMatrix dm = constant_block_state(T, P0);
  const GsResiduals r = gs_condition_residuals(dm, T, Interaction::parse("yukawa", 1.0));
  EXPECT_GT(r.commutator_residual, 1e-3);
}
