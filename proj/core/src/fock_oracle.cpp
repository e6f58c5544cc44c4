#include "fbi/fock_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "fbi/errors.hpp"

namespace fbi {

namespace {
using Triplet = Eigen::Triplet<cplx>;

SparseXc from_triplets(std::uint64_t dim, const std::vector<Triplet>& t) {
  SparseXc M(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

MatrixXc orthonormal_columns(const MatrixXc& A, int& rank) {
  Eigen::JacobiSVD<MatrixXc> svd(A, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  rank = 0;
  while (rank < s.size() && s(rank) > 1e-10 * std::max(1.0, s(0))) ++rank;
  return svd.matrixU().leftCols(rank);
}
}  // namespace

FockSpace::FockSpace(std::size_t nk, int band_dim)
    : nk_(nk), band_dim_(band_dim), n_modes_(static_cast<int>(nk) * band_dim) {
  if (n_modes_ > max_modes) throw DimensionCapError("Fock space exceeds 2^16 states");
}

SparseXc annihilation(const FockSpace& space, int mode) {
  std::vector<Triplet> t;
  const std::uint64_t bit = std::uint64_t{1} << mode;
  for (std::uint64_t x = 0; x < space.dim(); ++x)
    if (x & bit) t.emplace_back(x ^ bit, x, jw_sign(x, mode));
  return from_triplets(space.dim(), t);
}

SparseXc creation(const FockSpace& space, int mode) { return SparseXc(annihilation(space, mode).adjoint()); }

SparseXc hopping(const FockSpace& space, int i, int j) {
  std::vector<Triplet> t;
  const std::uint64_t bi = std::uint64_t{1} << i, bj = std::uint64_t{1} << j;
  for (std::uint64_t x = 0; x < space.dim(); ++x) {
    if (!(x & bj)) continue;
    const double s1 = jw_sign(x, j);
    const std::uint64_t y = x ^ bj;
    if (y & bi) continue;
    t.emplace_back(y | bi, x, s1 * jw_sign(y, i));
  }
  return from_triplets(space.dim(), t);
}

SparseXc number_operator(const FockSpace& space) {
  std::vector<Triplet> t;
  for (std::uint64_t x = 0; x < space.dim(); ++x) t.emplace_back(x, x, double(std::popcount(x)));
  return from_triplets(space.dim(), t);
}

SparseXc build_rho_q(const FormFactorTable& table, const FockSpace& space, std::size_t qi) {
  const int d = table.dim();
  if (space.nk() != table.nk() || space.band_dim() != d) throw FlavorMismatchError("Fock space does not match the table");
  SparseXc rho(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  cplx shift = 0.0;
  for (std::size_t k = 0; k < table.nk(); ++k) {
    const std::size_t kq = table.target(k, qi);
    const MatrixXc& L = table.at(k, qi);
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        if (L(m, n) != cplx(0.0)) rho += L(m, n) * hopping(space, space.mode(k, m), space.mode(kq, n));
    if (table.is_reciprocal(qi)) shift += 0.5 * L.trace();
  }
  if (shift != cplx(0.0)) {
    SparseXc Id(rho.rows(), rho.cols());
    Id.setIdentity();
    rho -= shift * Id;
  }
  return rho;
}

SparseXc build_h_fbi(const FormFactorTable& table, const Interaction& V) {
  const FockSpace space(table.nk(), table.dim());
  std::vector<SparseXc> rho(table.nq());
  for (std::size_t qi = 0; qi < table.nq(); ++qi) rho[qi] = build_rho_q(table, space, qi);
  SparseXc H(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  for (std::size_t qi = 0; qi < table.nq(); ++qi) {
    SparseXc term = rho[qi] * rho[table.negate(qi)];
    H += V(table.qvec(qi)) * term;
  }
  H *= 1.0 / (double(table.nk()) * table.grid().lattice().area_omega);
  H.prune(cplx(0.0));
  return H;
}

VectorXc slater_vector(const FockSpace& space, const MatrixXc& Xi) {
  if (Xi.rows() != space.n_modes()) throw PreconditionError("orbital matrix rows must equal the number of modes");
  if ((Xi.adjoint() * Xi - MatrixXc::Identity(Xi.cols(), Xi.cols())).norm() > 1e-10)
    throw PreconditionError("orbitals are not orthonormal");
  VectorXc psi = VectorXc::Zero(static_cast<Eigen::Index>(space.dim()));
  psi(0) = 1.0;
  for (Eigen::Index i = Xi.cols() - 1; i >= 0; --i) {
    VectorXc next = VectorXc::Zero(psi.size());
    for (std::uint64_t x = 0; x < space.dim(); ++x) {
      if (psi(x) == cplx(0.0)) continue;
      for (int mode = 0; mode < space.n_modes(); ++mode) {
        const std::uint64_t bit = std::uint64_t{1} << mode;
        if (x & bit) continue;
        next(x | bit) += Xi(mode, i) * jw_sign(x, mode) * psi(x);
      }
    }
    psi = std::move(next);
  }
  return psi;
}

MatrixXc one_rdm(const FockSpace& space, const VectorXc& psi) {
  const int n = space.n_modes();
  MatrixXc P(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) = psi.dot(hopping(space, j, i) * psi);
  return P;
}

double hermitian_defect(const SparseXc& H) {
  const SparseXc D = H - SparseXc(H.adjoint());
  return D.norm();
}

std::vector<double> principal_angles(const MatrixXc& A, const MatrixXc& B) {
  int ra = 0, rb = 0;
  const MatrixXc Qa = orthonormal_columns(A, ra), Qb = orthonormal_columns(B, rb);
  std::vector<double> out;
  if (ra == 0 || rb == 0) return out;
  Eigen::JacobiSVD<MatrixXc> svd(Qa.adjoint() * Qb);
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    out.push_back(std::acos(std::clamp(svd.singularValues()(i), -1.0, 1.0)));
  return out;
}

GroundSpaceReport ground_space(const FockSpace& space, const SparseXc& H, double tol,
                               const std::vector<VectorXc>& hf_states) {
  if (space.dim() > 4096) throw DimensionCapError("dense ground-space solve is limited to 4096 states");
  const MatrixXc dense = MatrixXc(H);
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (dense + dense.adjoint()));
  GroundSpaceReport r;
  r.eigenvalues = es.eigenvalues();
  while (r.zero_dim < r.eigenvalues.size() && r.eigenvalues(r.zero_dim) <= tol) ++r.zero_dim;
  r.zero_space = es.eigenvectors().leftCols(r.zero_dim);
  const SparseXc N = number_operator(space);
  for (int i = 0; i < r.zero_dim; ++i) {
    const VectorXc v = r.zero_space.col(i);
    r.number_values.push_back(v.dot(N * v).real());
  }
  if (!hf_states.empty() && r.zero_dim > 0) {
    MatrixXc B(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(hf_states.size()));
    for (std::size_t i = 0; i < hf_states.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = hf_states[i];
    orthonormal_columns(B, r.hf_rank);
    r.principal_angles = principal_angles(r.zero_space, B);
  }
  return r;
}

}  // namespace fbi
