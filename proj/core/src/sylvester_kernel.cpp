#include "fbi/sylvester_kernel.hpp"

#include <cmath>
#include <limits>

#include "fbi/errors.hpp"

namespace fbi {

MatrixXc pair_term(const MatrixXc& Lk, const MatrixXc& Lkp) {
  const Eigen::Index d = Lk.rows();
  MatrixXc M = MatrixXc::Zero(d * d, d * d);
  // (A^T (x) I) vec X = vec(X A); (I (x) B) vec X = vec(B X); vec index i + j d.
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index l = 0; l < d; ++l) {
      const cplx a = Lkp(l, j);
      for (Eigen::Index i = 0; i < d; ++i) M(i + j * d, i + l * d) += a;
    }
  for (Eigen::Index j = 0; j < d; ++j) M.block(j * d, j * d, d, d) -= Lk;
  return M;
}

MatrixXc build_pair_matrix(const FormFactorTable& table, std::size_t k, std::size_t kp) {
  const int d = table.dim();
  MatrixXc M = MatrixXc::Zero(d * d, d * d);
  for (std::size_t qi = 0; qi < table.nq(); ++qi) {
    if (!table.is_reciprocal(qi)) continue;
    const MatrixXc T = pair_term(table.at(k, qi), table.at(kp, qi));
    M.noalias() += T.adjoint() * T;
  }
  return 0.5 * (M + M.adjoint());
}

KernelReport kernel_basis(const MatrixXc& M, int d, double tol, double scale) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(M);
  KernelReport r;
  r.eigenvalues = es.eigenvalues();
  r.tol = tol;
  r.lambda_max = std::max(0.0, r.eigenvalues(r.eigenvalues.size() - 1));
  const double cut = tol * std::max(r.lambda_max, scale);
  r.gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
    if (r.eigenvalues(i) <= cut) {
      VectorXc v = es.eigenvectors().col(i);
      Eigen::Index piv = 0;
      v.cwiseAbs().maxCoeff(&piv);
      v *= std::conj(v(piv)) / std::abs(v(piv));
      r.basis.push_back(Eigen::Map<MatrixXc>(v.data(), d, d));
      ++r.dim;
    } else {
      r.gap = std::min(r.gap, r.eigenvalues(i));
    }
  }
  if (r.dim == r.eigenvalues.size()) r.gap = 0.0;
  r.ambiguous = r.dim < r.eigenvalues.size() && r.gap < 10.0 * cut;
  return r;
}

double sylvester_residual(const FormFactorTable& table, std::size_t k, std::size_t kp, const MatrixXc& X) {
  double worst = 0.0;
  for (std::size_t qi = 0; qi < table.nq(); ++qi) {
    if (!table.is_reciprocal(qi)) continue;
    worst = std::max(worst, (X * table.at(kp, qi) - table.at(k, qi) * X).norm());
  }
  return worst;
}

double pair_matrix_scale(const FormFactorTable& table, std::size_t k, std::size_t kp) {
  double s = 0.0;
  for (std::size_t qi = 0; qi < table.nq(); ++qi)
    if (table.is_reciprocal(qi)) s += table.at(k, qi).squaredNorm() + table.at(kp, qi).squaredNorm();
  return s * table.dim();
}

KernelReport pair_kernel(const FormFactorTable& table, std::size_t k, std::size_t kp, double tol) {
  KernelReport r = kernel_basis(build_pair_matrix(table, k, kp), table.dim(), tol, pair_matrix_scale(table, k, kp));
  r.k = k;
  r.kp = kp;
  r.tail_bound = table.tail_norm;
  for (const auto& X : r.basis) r.max_sylvester_residual = std::max(r.max_sylvester_residual, sylvester_residual(table, k, kp, X));
  return r;
}

double disjoint_spectra_check(const FormFactorTable& table, std::size_t k, std::size_t kp) {
  double best = 0.0;
  for (std::size_t qi = 0; qi < table.nq(); ++qi) {
    if (!table.is_reciprocal(qi)) continue;
    const Eigen::VectorXcd a = Eigen::ComplexEigenSolver<MatrixXc>(table.at(k, qi), false).eigenvalues();
    const Eigen::VectorXcd b = Eigen::ComplexEigenSolver<MatrixXc>(table.at(kp, qi), false).eigenvalues();
    double sep = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.size(); ++i)
      for (Eigen::Index j = 0; j < b.size(); ++j) sep = std::min(sep, std::abs(a(i) - b(j)));
    best = std::max(best, sep);
  }
  return best;
}

const char* AntipodalVerdict::name(Kind kind) {
  switch (kind) {
    case Kind::forced_zero: return "forced-zero";
    case Kind::inconclusive: return "inconclusive";
    case Kind::self_antipodal: return "self-antipodal";
  }
  return "?";
}

AntipodalVerdict resolve_antipodal(const FormFactorTable& table, std::size_t k, double tol) {
  const KGrid& grid = table.grid();
  if (k == 0) throw PreconditionError("resolve_antipodal requires k != 0 mod reciprocal lattice");
  AntipodalVerdict v;
  v.k = k;
  const std::size_t mk = grid.negate(k);
  if (mk == k) {
    v.kind = AntipodalVerdict::Kind::self_antipodal;
    return v;
  }
  for (std::size_t q = 1; q < grid.size(); ++q) {
    const GridMomentum qp = grid.momentum(q);
    const std::size_t a = grid.add(k, qp), b = grid.add(mk, qp);
    const KernelReport r = pair_kernel(table, a, b, tol);
    if (r.dim == 0 && !r.ambiguous) {
      v.kind = AntipodalVerdict::Kind::forced_zero;
      v.witness = qp;
      v.shifted_k = a;
      v.shifted_kp = b;
      v.shifted_dim = 0;
      return v;
    }
  }
  v.kind = AntipodalVerdict::Kind::inconclusive;
  return v;
}

KernelScan scan_pairs(const FormFactorTable& table, double tol) {
  const std::size_t nk = table.nk();
  KernelScan s;
  s.nk = nk;
  s.dims.assign(nk * nk, 0);
  s.gaps.assign(nk * nk, 0.0);
  s.ambiguous.assign(nk * nk, 0);
#pragma omp parallel for schedule(dynamic)
  for (long idx = 0; idx < static_cast<long>(nk * nk); ++idx) {
    const KernelReport r = pair_kernel(table, idx / nk, idx % nk, tol);
    s.dims[idx] = r.dim;
    s.gaps[idx] = r.gap;
    s.ambiguous[idx] = r.ambiguous;
  }
  for (std::size_t k = 1; k < nk; ++k) s.antipodal.push_back(resolve_antipodal(table, k, tol));
  return s;
}

}  // namespace fbi
