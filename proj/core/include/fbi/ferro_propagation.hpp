#pragma once

#include <vector>

#include "fbi/flat_bands.hpp"
#include "fbi/form_factors.hpp"
#include "fbi/hartree_fock.hpp"

namespace fbi {

struct ShiftChoice {
  std::size_t qi = 0;  // table index of delta + G
  ReciprocalIndex G;
  double sigma_min = 0.0;
  double condition = 0.0;
};

// G maximising sigma_min(Lambda_k(delta + G)) over the table.
ShiftChoice select_invertible_shift(const FormFactorTable& table, std::size_t k, GridMomentum delta,
                                    double threshold = 1e-6);

struct PropagationStep {
  std::size_t k = 0;
  GridMomentum delta;
  ShiftChoice shift;
};

struct PropagationPath {
  std::vector<std::size_t> momenta;  // k_1 ... k_L
  std::vector<PropagationStep> steps;
  double condition_bound = 1.0;      // product of step condition numbers
};

// Walk from `start` along the given grid steps, choosing an invertible shift at each step.
PropagationPath path_from_steps(const FormFactorTable& table, std::size_t start, const std::vector<GridMomentum>& deltas,
                                double threshold = 1e-6);
// Shortest walk on the connectivity graph.
PropagationPath build_path(const FormFactorTable& table, const ConnectivityReport& graph, std::size_t from,
                           std::size_t to, double threshold = 1e-6);

// P(k_L, k_L + Delta) = (prod Lambda_{k_i})^{-1} P(k_1, k_1 + Delta) (prod Lambda_{k_i + Delta}).
MatrixXc propagate_block(const FormFactorTable& table, const MatrixXc& block, GridMomentum Delta,
                         const PropagationPath& path);

// max_k |Tr P(k,k) - Tr P(k0,k0)|.
double uniform_filling_check(const DensityMatrix& dm);

}  // namespace fbi
