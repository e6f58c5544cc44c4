#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fbi/hartree_fock.hpp"

namespace fbi {

// U = diag(U1, U2) acting in the Pi-permuted basis.
struct SymmetryElement {
  Flavor flavor = Flavor::spinless;
  MatrixXc U;
};

std::vector<MatrixXc> generators(Flavor flavor);

// Size of each diagonal block of U: 1, 2 or 4.
int block_size(Flavor flavor);
// Dimension of the block-scalar commutant, sum of squared block sizes.
int commutant_dimension(Flavor flavor);

SymmetryElement random_block_unitary(Flavor flavor, std::mt19937_64& rng);
// Frobenius norm of the off-diagonal blocks of U.
double block_structure_defect(const MatrixXc& U, Flavor flavor);

// sigma_z tau_z = diag(1,-1,-1,1), tensored with I_2 for spin.
MatrixXc chern_operator(Flavor flavor);

struct OrbitSample {
  DensityMatrix state;
  GsResiduals residuals;
  double energy = 0.0;
  double chern_residual = 0.0;
};

// P(k,k) = Pi U (Pi P0 Pi) U^dagger Pi for every k; off-diagonal blocks zero.
DensityMatrix orbit_state(const MatrixXc& P0, const SymmetryElement& g, const FormFactorTable& table);
OrbitSample sample_orbit(const MatrixXc& P0, const SymmetryElement& g, const FormFactorTable& table,
                         const Interaction& V);

// max_k |[sigma_z tau_z, P(k,k)]|_F.
double chern_commutation_check(const DensityMatrix& dm);

struct GeneratorSweep {
  std::size_t generator = 0;
  int samples = 0;
  double max_trace_residual = 0.0;
  double max_commutator_residual = 0.0;
  double min_energy = 0.0, max_energy = 0.0;
  double max_chern_residual = 0.0;
  double max_distance_from_generator = 0.0;  // zero for singleton orbits
  bool quantum_hall = false;
};

struct OrbitSweep {
  Flavor flavor = Flavor::spinless;
  double fm_trace_residual = 0.0;
  double fm_commutator_residual = 0.0;
  std::vector<GeneratorSweep> generators;
};

OrbitSweep orbit_sweep(const FormFactorTable& table, const Interaction& V, int samples, std::uint64_t seed);

}  // namespace fbi
