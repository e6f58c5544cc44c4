#include "fbi/classification.hpp"

#include <algorithm>
#include <limits>

#include "fbi/errors.hpp"

namespace fbi {

std::vector<MatrixXc> generators(Flavor flavor) { return fm_generators(flavor); }

int block_size(Flavor flavor) { return flavor_dim(flavor) / 2; }

int commutant_dimension(Flavor flavor) { return 2 * block_size(flavor) * block_size(flavor); }

SymmetryElement random_block_unitary(Flavor flavor, std::mt19937_64& rng) {
  const int n = block_size(flavor);
  SymmetryElement g;
  g.flavor = flavor;
  g.U = MatrixXc::Zero(2 * n, 2 * n);
  g.U.topLeftCorner(n, n) = haar_unitary(n, rng);
  g.U.bottomRightCorner(n, n) = haar_unitary(n, rng);
  return g;
}

double block_structure_defect(const MatrixXc& U, Flavor flavor) {
  const int n = block_size(flavor);
  return std::hypot(U.topRightCorner(n, n).norm(), U.bottomLeftCorner(n, n).norm());
}

MatrixXc chern_operator(Flavor flavor) {
  if (flavor == Flavor::spinless) throw FlavorMismatchError("the Chern operator needs the valley degree of freedom");
  const int d = flavor_dim(flavor);
  const int spin = flavor == Flavor::valley_spin ? 2 : 1;
  const double sign[4] = {1, -1, -1, 1};
  MatrixXc C = MatrixXc::Zero(d, d);
  for (int a = 0; a < 4; ++a)
    for (int s = 0; s < spin; ++s) C(a * spin + s, a * spin + s) = sign[a];
  return C;
}

DensityMatrix orbit_state(const MatrixXc& P0, const SymmetryElement& g, const FormFactorTable& table) {
  if (g.flavor != table.flavor()) throw FlavorMismatchError("symmetry element and table flavors differ");
  const MatrixXc& U = g.U;
  if ((U.adjoint() * U - MatrixXc::Identity(U.rows(), U.cols())).norm() > 1e-12)
    throw PreconditionError("symmetry element is not unitary");
  if (block_structure_defect(U, g.flavor) > 1e-12)
    throw PreconditionError("symmetry element violates the block structure");
  const MatrixXc Pi = flavor_permutation(g.flavor);
  const MatrixXc block = Pi * U * (Pi * P0 * Pi) * U.adjoint() * Pi;
  return constant_block_state(table, block);
}

double chern_commutation_check(const DensityMatrix& dm) {
  const MatrixXc C = chern_operator(dm.flavor);
  double worst = 0.0;
  for (std::size_t k = 0; k < dm.nk; ++k) {
    const MatrixXc B = dm.block(k, k);
    worst = std::max(worst, (C * B - B * C).norm());
  }
  return worst;
}

OrbitSample sample_orbit(const MatrixXc& P0, const SymmetryElement& g, const FormFactorTable& table,
                         const Interaction& V) {
  OrbitSample s;
  s.state = orbit_state(P0, g, table);
  s.residuals = gs_condition_residuals(s.state, table, V);
  s.energy = energy_commutator_form(s.state, table, V);
  s.chern_residual = table.flavor() == Flavor::spinless ? 0.0 : chern_commutation_check(s.state);
  return s;
}

OrbitSweep orbit_sweep(const FormFactorTable& table, const Interaction& V, int samples, std::uint64_t seed) {
  OrbitSweep sweep;
  sweep.flavor = table.flavor();
  const auto gens = generators(table.flavor());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const GsResiduals r = gs_condition_residuals(build_fm_state(table, i), table, V);
    sweep.fm_trace_residual = std::max(sweep.fm_trace_residual, r.trace_residual);
    sweep.fm_commutator_residual = std::max(sweep.fm_commutator_residual, r.commutator_residual);
  }
  const MatrixXc chern = table.flavor() == Flavor::spinless ? MatrixXc() : chern_operator(table.flavor());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    GeneratorSweep gs;
    gs.generator = i;
    gs.samples = samples;
    gs.min_energy = std::numeric_limits<double>::infinity();
    gs.max_energy = -std::numeric_limits<double>::infinity();
    if (chern.size() > 0) {
      const MatrixXc d = chern * gens[i];
      gs.quantum_hall = (d - gens[i]).norm() < 1e-14 || (d + gens[i]).norm() < 1e-14;
    }
    std::mt19937_64 rng(seed + 7919 * i);
    for (int s = 0; s < samples; ++s) {
      const OrbitSample o = sample_orbit(gens[i], random_block_unitary(table.flavor(), rng), table, V);
      gs.max_trace_residual = std::max(gs.max_trace_residual, o.residuals.trace_residual);
      gs.max_commutator_residual = std::max(gs.max_commutator_residual, o.residuals.commutator_residual);
      gs.min_energy = std::min(gs.min_energy, o.energy);
      gs.max_energy = std::max(gs.max_energy, o.energy);
      gs.max_chern_residual = std::max(gs.max_chern_residual, o.chern_residual);
      gs.max_distance_from_generator = std::max(gs.max_distance_from_generator, (o.state.block(0, 0) - gens[i]).norm());
    }
    sweep.generators.push_back(gs);
  }
  return sweep;
}

}  // namespace fbi
