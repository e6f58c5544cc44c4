#pragma once

#include <random>
#include <string>
#include <vector>

#include "fbi/form_factors.hpp"

namespace fbi {

// Block 1-RDM; row/column (k, m) sits at index k * dim + m.
struct DensityMatrix {
  Flavor flavor = Flavor::spinless;
  std::size_t nk = 0;
  MatrixXc P;

  int dim() const { return flavor_dim(flavor); }
  auto block(std::size_t k, std::size_t kp) const { return P.block(k * dim(), kp * dim(), dim(), dim()); }
  auto block(std::size_t k, std::size_t kp) { return P.block(k * dim(), kp * dim(), dim(), dim()); }
  double trace() const { return P.trace().real(); }
  bool half_filled(double tol = 1e-9) const { return std::abs(trace() - 0.5 * double(P.rows())) <= tol; }
};

// max(|P - P^dagger|, |P^2 - P|) in Frobenius norm.
double projector_defect(const MatrixXc& P);
// Throws PreconditionError when P is not a Hermitian projector to tol.
void require_projector(const DensityMatrix& dm, double tol = 1e-10);

// Q = P - I/2.
MatrixXc shifted(const DensityMatrix& dm);

// Dense pi_{q'} = sum |m,k><m,k+q'|.
MatrixXc momentum_shift(const KGrid& grid, int dim, GridMomentum q);

class Interaction {
 public:
  enum class Family { yukawa, gaussian };
  Interaction() = default;
  Interaction(Family family, double param);
  static Interaction parse(const std::string& family, double param);

  double operator()(const Vec2& q) const;
  Family family() const { return family_; }
  double param() const { return param_; }
  const char* name() const { return family_ == Family::yukawa ? "yukawa" : "gaussian"; }

 private:
  Family family_ = Family::yukawa;
  double param_ = 1.0;
};

struct EnergyTerms {
  double direct = 0.0;    // sum V |Tr(Lambda pi Q)|^2
  double constant = 0.0;  // sum V (1/4) sum_k |Lambda_k|_F^2
  double exchange = 0.0;  // sum V Tr(Lambda pi Q pi^dagger Lambda^dagger Q)
  double total = 0.0;     // (direct + constant - exchange) / (N_k |Omega|)
  double per_k = 0.0;
};

EnergyTerms energy_trace_form(const DensityMatrix& dm, const FormFactorTable& table, const Interaction& V);
double energy_commutator_form(const DensityMatrix& dm, const FormFactorTable& table, const Interaction& V);

struct GsResiduals {
  double trace_residual = 0.0;
  double commutator_residual = 0.0;
  std::size_t trace_argmax = 0;
  std::size_t commutator_argmax = 0;
  std::vector<double> trace_per_q;
  std::vector<double> commutator_per_q;
};

GsResiduals gs_condition_residuals(const DensityMatrix& dm, const FormFactorTable& table, const Interaction& V);

// Ground-state generators P_0 of each flavor, in the band ordering of the form-factor table.
std::vector<MatrixXc> fm_generators(Flavor flavor);

DensityMatrix build_fm_state(const FormFactorTable& table, std::size_t choice);
DensityMatrix constant_block_state(const FormFactorTable& table, const MatrixXc& P0);

// Haar-random rank-r projector on the full (band, k) space.
DensityMatrix random_projector(Flavor flavor, std::size_t nk, std::size_t rank, std::mt19937_64& rng);
MatrixXc haar_unitary(int n, std::mt19937_64& rng);

// |Re Tr(A B A^dagger B^dagger) - (1/2)Tr(A A^dagger B^dagger B + A^dagger A B B^dagger) + (1/2)|[A,B]|_F^2|
double trace_lemma_residual(const MatrixXc& A, const MatrixXc& B);

// Deterministic pairwise summation.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace fbi
