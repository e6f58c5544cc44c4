#pragma once

#include <vector>

#include "fbi/form_factors.hpp"

namespace fbi {

struct KernelReport {
  std::size_t k = 0, kp = 0;
  Eigen::VectorXd eigenvalues;  // ascending
  double tol = 0.0;             // relative to the largest eigenvalue
  double lambda_max = 0.0;
  int dim = 0;
  std::vector<MatrixXc> basis;  // devectorised kernel vectors (column stacking)
  double gap = 0.0;             // smallest eigenvalue above the kernel threshold
  bool ambiguous = false;
  double tail_bound = 0.0;
  double max_sylvester_residual = 0.0;
};

// M_{k,k'}(G) = Lambda_{k'}(G)^T (x) I - I (x) Lambda_k(G).
MatrixXc pair_term(const MatrixXc& Lk, const MatrixXc& Lkp);
// sum over reciprocal G in the table of M(G)^dagger M(G).
MatrixXc build_pair_matrix(const FormFactorTable& table, std::size_t k, std::size_t kp);

// Kernel: eigenvalues <= tol * max(lambda_max, scale). A positive scale keeps the cut
// meaningful when M vanishes identically.
KernelReport kernel_basis(const MatrixXc& M, int d, double tol = 1e-10, double scale = 0.0);
// Frobenius bound sum_G d (|Lambda_k(G)|^2 + |Lambda_k'(G)|^2) used as the kernel scale.
double pair_matrix_scale(const FormFactorTable& table, std::size_t k, std::size_t kp);
KernelReport pair_kernel(const FormFactorTable& table, std::size_t k, std::size_t kp, double tol = 1e-10);

// max_G |X Lambda_{k'}(G) - Lambda_k(G) X|_F over reciprocal entries.
double sylvester_residual(const FormFactorTable& table, std::size_t k, std::size_t kp, const MatrixXc& X);

// max over G of the distance between the spectra of Lambda_k(G) and Lambda_{k'}(G).
double disjoint_spectra_check(const FormFactorTable& table, std::size_t k, std::size_t kp);

struct AntipodalVerdict {
  enum class Kind { forced_zero, inconclusive, self_antipodal };
  Kind kind = Kind::inconclusive;
  std::size_t k = 0;
  GridMomentum witness;
  std::size_t shifted_k = 0, shifted_kp = 0;
  int shifted_dim = -1;
  static const char* name(Kind kind);
};

// Rank argument for P(k, -k): look for q' with an empty kernel at (k + q', -k + q').
AntipodalVerdict resolve_antipodal(const FormFactorTable& table, std::size_t k, double tol = 1e-10);

struct KernelScan {
  std::size_t nk = 0;
  std::vector<int> dims;          // nk x nk, row-major in (k, k')
  std::vector<double> gaps;
  std::vector<char> ambiguous;
  std::vector<AntipodalVerdict> antipodal;  // one per k != 0
  int dim(std::size_t k, std::size_t kp) const { return dims[k * nk + kp]; }
  double gap(std::size_t k, std::size_t kp) const { return gaps[k * nk + kp]; }
};

KernelScan scan_pairs(const FormFactorTable& table, double tol = 1e-10);

}  // namespace fbi
