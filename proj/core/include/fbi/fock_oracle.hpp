#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

#include "fbi/hartree_fock.hpp"

namespace fbi {

using SparseXc = Eigen::SparseMatrix<cplx>;

// Fock space over modes (k, m) -> bit k * dim + m, little-endian occupation bitstrings.
class FockSpace {
 public:
  static constexpr int max_modes = 16;
  FockSpace(std::size_t nk, int band_dim);

  int n_modes() const { return n_modes_; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_modes_; }
  int mode(std::size_t k, int m) const { return static_cast<int>(k) * band_dim_ + m; }
  std::size_t nk() const { return nk_; }
  int band_dim() const { return band_dim_; }

 private:
  std::size_t nk_;
  int band_dim_;
  int n_modes_;
};

// Sign (-1)^{number of occupied modes below `mode`}.
inline double jw_sign(std::uint64_t x, int mode) {
  return (std::popcount(x & ((std::uint64_t{1} << mode) - 1)) & 1) ? -1.0 : 1.0;
}

SparseXc annihilation(const FockSpace& space, int mode);
SparseXc creation(const FockSpace& space, int mode);
// f^dagger_i f_j.
SparseXc hopping(const FockSpace& space, int i, int j);
SparseXc number_operator(const FockSpace& space);

SparseXc build_rho_q(const FormFactorTable& table, const FockSpace& space, std::size_t qi);
SparseXc build_h_fbi(const FormFactorTable& table, const Interaction& V);

// prod_i b_i^dagger |0> with b_i^dagger = sum_mode Xi(mode, i) f^dagger_mode.
VectorXc slater_vector(const FockSpace& space, const MatrixXc& Xi);
// P_{ij} = <f^dagger_j f_i>.
MatrixXc one_rdm(const FockSpace& space, const VectorXc& psi);

double hermitian_defect(const SparseXc& H);

struct GroundSpaceReport {
  Eigen::VectorXd eigenvalues;
  int zero_dim = 0;
  MatrixXc zero_space;                // orthonormal columns
  std::vector<double> number_values;  // <N> for each zero-space eigenvector
  std::vector<double> principal_angles;  // between the zero space and span(hf_states)
  int hf_rank = 0;
};

GroundSpaceReport ground_space(const FockSpace& space, const SparseXc& H, double tol,
                               const std::vector<VectorXc>& hf_states);

// Principal angles between span(A) and span(B); columns need not be orthonormal.
std::vector<double> principal_angles(const MatrixXc& A, const MatrixXc& B);

}  // namespace fbi
