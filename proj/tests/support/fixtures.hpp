#pragma once

#include <random>

#include "fbi/classification.hpp"
#include "fbi/flat_bands.hpp"
#include "fbi/form_factors.hpp"
#include "fbi/hartree_fock.hpp"

namespace fbi::testing {

// Magic coupling of the 4-shell basis from an independent dense-SVD scan
// (bounded Brent over [0.58, 0.59], sample {0, 0.3 g1 + 0.17 g2}).
inline constexpr double reference_alpha_4_shells = 0.58566355890407;

const MoireLattice& lattice();
const PlaneWaveBasis& basis(int shells = 4);
double alpha_star(int shells = 4);
const BlochBundle& bundle(int nkx, int nky, int shells = 4);
// Form-factor cutoff one shell inside the plane-wave cutoff.
const FormFactorTable& table(int nkx, int nky, int shells = 4);
const FormFactorTable& flavored_table(int nkx, int nky, Flavor flavor, int shells = 4);

MatrixXc random_matrix(int rows, int cols, std::mt19937_64& rng);

}  // namespace fbi::testing
