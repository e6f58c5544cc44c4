#include "fbi/hartree_fock.hpp"

#include <cmath>
#include <numbers>

#include "fbi/errors.hpp"

namespace fbi {

namespace {

void require_match(const DensityMatrix& dm, const FormFactorTable& table) {
  if (dm.flavor != table.flavor()) throw FlavorMismatchError("density matrix and form-factor table flavors differ");
  if (dm.nk != table.nk()) throw FlavorMismatchError("density matrix and form-factor table grids differ");
}

// Products with A = Lambda(q') pi_{q'}, whose only nonzero blocks are A(k, k+q') = Lambda_k(q').
struct ShiftedFormFactor {
  const FormFactorTable& table;
  std::size_t qi;
  int d;

  MatrixXc left(const MatrixXc& X) const {  // A X
    MatrixXc out(X.rows(), X.cols());
    for (std::size_t k = 0; k < table.nk(); ++k)
      out.middleRows(k * d, d).noalias() = table.at(k, qi) * X.middleRows(table.target(k, qi) * d, d);
    return out;
  }
  MatrixXc right(const MatrixXc& X) const {  // X A
    MatrixXc out(X.rows(), X.cols());
    for (std::size_t k = 0; k < table.nk(); ++k)
      out.middleCols(table.target(k, qi) * d, d).noalias() = X.middleCols(k * d, d) * table.at(k, qi);
    return out;
  }
  MatrixXc adjoint_left(const MatrixXc& X) const {  // A^dagger X
    MatrixXc out(X.rows(), X.cols());
    for (std::size_t k = 0; k < table.nk(); ++k)
      out.middleRows(table.target(k, qi) * d, d).noalias() = table.at(k, qi).adjoint() * X.middleRows(k * d, d);
    return out;
  }
  cplx trace_with(const MatrixXc& X) const {  // Tr(A X)
    cplx t = 0.0;
    for (std::size_t k = 0; k < table.nk(); ++k)
      t += (table.at(k, qi) * X.block(table.target(k, qi) * d, k * d, d, d)).trace();
    return t;
  }
  double frobenius2() const {
    double s = 0.0;
    for (std::size_t k = 0; k < table.nk(); ++k) s += table.at(k, qi).squaredNorm();
    return s;
  }
};

// Blocks Q(k, k) when the state has no weight between different momenta, empty otherwise.
std::vector<MatrixXc> diagonal_blocks(const DensityMatrix& dm, const MatrixXc& Q) {
  const int d = dm.dim();
  for (std::size_t k = 0; k < dm.nk; ++k)
    for (std::size_t kp = 0; kp < dm.nk; ++kp)
      if (k != kp && !dm.block(k, kp).isZero(0.0)) return {};
  std::vector<MatrixXc> blocks(dm.nk);
  for (std::size_t k = 0; k < dm.nk; ++k) blocks[k] = Q.block(k * d, k * d, d, d);
  return blocks;
}

struct BlockTerms {
  cplx trace = 0.0;          // Tr(A Q)
  double exchange = 0.0;     // Re Tr(A Q A^dagger Q)
  double commutator2 = 0.0;  // |A P - P A|_F^2
};

BlockTerms block_terms(const FormFactorTable& table, std::size_t qi, const std::vector<MatrixXc>& Qb) {
  BlockTerms t;
  const MatrixXc half = 0.5 * MatrixXc::Identity(table.dim(), table.dim());
  for (std::size_t k = 0; k < table.nk(); ++k) {
    const std::size_t kt = table.target(k, qi);
    const MatrixXc& L = table.at(k, qi);
    if (kt == k) t.trace += (L * Qb[k]).trace();
    t.exchange += (L * Qb[kt] * L.adjoint() * Qb[k]).trace().real();
    t.commutator2 += (L * (Qb[kt] + half) - (Qb[k] + half) * L).squaredNorm();
  }
  return t;
}

}  // namespace

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double projector_defect(const MatrixXc& P) {
  return std::max((P - P.adjoint()).norm(), (P * P - P).norm());
}

void require_projector(const DensityMatrix& dm, double tol) {
  if (dm.P.rows() != static_cast<Eigen::Index>(dm.nk * dm.dim()) || dm.P.cols() != dm.P.rows())
    throw PreconditionError("density matrix has the wrong shape");
  if (projector_defect(dm.P) > tol) throw PreconditionError("density matrix is not an orthogonal projector");
}

MatrixXc shifted(const DensityMatrix& dm) { return dm.P - 0.5 * MatrixXc::Identity(dm.P.rows(), dm.P.cols()); }

MatrixXc momentum_shift(const KGrid& grid, int dim, GridMomentum q) {
  const std::size_t n = grid.size() * dim;
  MatrixXc pi = MatrixXc::Zero(n, n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const std::size_t kq = grid.add(k, q);
    for (int m = 0; m < dim; ++m) pi(k * dim + m, kq * dim + m) = 1.0;
  }
  return pi;
}

Interaction::Interaction(Family family, double param) : family_(family), param_(param) {
  if (!(param > 0.0)) throw PreconditionError("interaction parameter must be positive");
}

Interaction Interaction::parse(const std::string& family, double param) {
  if (family == "yukawa") return Interaction(Family::yukawa, param);
  if (family == "gaussian") return Interaction(Family::gaussian, param);
  throw ConfigError("unknown interaction family '" + family + "'");
}

double Interaction::operator()(const Vec2& q) const {
  const double q2 = q.squaredNorm();
  if (family_ == Family::yukawa) return 2.0 * std::numbers::pi / std::sqrt(q2 + param_ * param_);
  return 2.0 * std::numbers::pi * param_ * param_ * std::exp(-0.5 * q2 * param_ * param_);
}

EnergyTerms energy_trace_form(const DensityMatrix& dm, const FormFactorTable& table, const Interaction& V) {
  require_match(dm, table);
  require_projector(dm);
  const MatrixXc Q = shifted(dm);
  const std::size_t nq = table.nq();
  const std::vector<MatrixXc> Qb = diagonal_blocks(dm, Q);
  std::vector<double> direct(nq), constant(nq), exchange(nq);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(nq); ++i) {
    const ShiftedFormFactor A{table, static_cast<std::size_t>(i), dm.dim()};
    const double v = V(table.qvec(i));
    constant[i] = v * 0.25 * A.frobenius2();
    if (!Qb.empty()) {
      const BlockTerms t = block_terms(table, i, Qb);
      direct[i] = v * std::norm(t.trace);
      exchange[i] = v * t.exchange;
      continue;
    }
    direct[i] = v * std::norm(A.trace_with(Q));
    const MatrixXc AQ = A.left(Q);
    const MatrixXc AdQ = A.adjoint_left(Q);
    exchange[i] = v * (AQ.cwiseProduct(AdQ.transpose())).sum().real();
  }
  EnergyTerms e;
  e.direct = pairwise_sum(direct.data(), nq);
  e.constant = pairwise_sum(constant.data(), nq);
  e.exchange = pairwise_sum(exchange.data(), nq);
  const double pref = 1.0 / (double(table.nk()) * table.grid().lattice().area_omega);
  e.total = pref * (e.direct + e.constant - e.exchange);
  e.per_k = e.total / double(table.nk());
  return e;
}

double energy_commutator_form(const DensityMatrix& dm, const FormFactorTable& table, const Interaction& V) {
  require_match(dm, table);
  require_projector(dm);
  const MatrixXc Q = shifted(dm);
  const std::size_t nq = table.nq();
  const std::vector<MatrixXc> Qb = diagonal_blocks(dm, Q);
  std::vector<double> terms(nq);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(nq); ++i) {
    if (!Qb.empty()) {
      const BlockTerms t = block_terms(table, i, Qb);
      terms[i] = V(table.qvec(i)) * (std::norm(t.trace) + 0.5 * t.commutator2);
      continue;
    }
    const ShiftedFormFactor A{table, static_cast<std::size_t>(i), dm.dim()};
    const MatrixXc C = A.right(dm.P) - A.left(dm.P);
    terms[i] = V(table.qvec(i)) * (std::norm(A.trace_with(Q)) + 0.5 * C.squaredNorm());
  }
  return pairwise_sum(terms.data(), nq) / (double(table.nk()) * table.grid().lattice().area_omega);
}

GsResiduals gs_condition_residuals(const DensityMatrix& dm, const FormFactorTable& table, const Interaction&) {
  require_match(dm, table);
  require_projector(dm);
  const MatrixXc Q = shifted(dm);
  const std::size_t nq = table.nq();
  GsResiduals r;
  r.trace_per_q.resize(nq);
  r.commutator_per_q.resize(nq);
  const std::vector<MatrixXc> Qb = diagonal_blocks(dm, Q);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(nq); ++i) {
    if (!Qb.empty()) {
      const BlockTerms t = block_terms(table, i, Qb);
      r.trace_per_q[i] = std::abs(t.trace);
      r.commutator_per_q[i] = std::sqrt(t.commutator2);
      continue;
    }
    const ShiftedFormFactor A{table, static_cast<std::size_t>(i), dm.dim()};
    r.trace_per_q[i] = std::abs(A.trace_with(Q));
    r.commutator_per_q[i] = (A.right(dm.P) - A.left(dm.P)).norm();
  }
  for (std::size_t i = 0; i < nq; ++i) {
    if (r.trace_per_q[i] > r.trace_residual) {
      r.trace_residual = r.trace_per_q[i];
      r.trace_argmax = i;
    }
    if (r.commutator_per_q[i] > r.commutator_residual) {
      r.commutator_residual = r.commutator_per_q[i];
      r.commutator_argmax = i;
    }
  }
  return r;
}

std::vector<MatrixXc> fm_generators(Flavor flavor) {
  auto diag = [](std::initializer_list<double> d) {
    Eigen::VectorXd v(d.size());
    int i = 0;
    for (double x : d) v(i++) = x;
    return MatrixXc(v.cast<cplx>().asDiagonal());
  };
  switch (flavor) {
    case Flavor::spinless:
      return {diag({1, 0}), diag({0, 1})};
    case Flavor::valley:
      return {diag({1, 0, 0, 1}), diag({1, 1, 0, 0}), diag({0, 1, 1, 0})};
    case Flavor::valley_spin: {
      // Listed spin-major (index 4s + a); stored valley-band major (index 2a + s).
      const std::vector<std::vector<double>> listed = {{1, 0, 0, 1, 1, 0, 0, 1},
                                                       {1, 1, 0, 1, 1, 0, 0, 0},
                                                       {1, 1, 1, 1, 0, 0, 0, 0},
                                                       {0, 0, 1, 0, 0, 1, 1, 1},
                                                       {0, 1, 1, 0, 0, 1, 1, 0}};
      std::vector<MatrixXc> out;
      for (const auto& d : listed) {
        MatrixXc P0 = MatrixXc::Zero(8, 8);
        for (int s = 0; s < 2; ++s)
          for (int a = 0; a < 4; ++a) P0(2 * a + s, 2 * a + s) = d[4 * s + a];
        out.push_back(P0);
      }
      return out;
    }
  }
  return {};
}

DensityMatrix constant_block_state(const FormFactorTable& table, const MatrixXc& P0) {
  DensityMatrix dm;
  dm.flavor = table.flavor();
  dm.nk = table.nk();
  const int d = dm.dim();
  if (P0.rows() != d || P0.cols() != d) throw FlavorMismatchError("block size does not match the flavor");
  dm.P = MatrixXc::Zero(d * dm.nk, d * dm.nk);
  for (std::size_t k = 0; k < dm.nk; ++k) dm.block(k, k) = P0;
  return dm;
}

DensityMatrix build_fm_state(const FormFactorTable& table, std::size_t choice) {
  const auto gens = fm_generators(table.flavor());
  if (choice >= gens.size()) throw PreconditionError("generator index out of range for this flavor");
  return constant_block_state(table, gens[choice]);
}

MatrixXc haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  MatrixXc Z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) Z(i, j) = cplx(N(rng), N(rng));
  Eigen::HouseholderQR<MatrixXc> qr(Z);
  MatrixXc Qm = qr.householderQ();
  const MatrixXc R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const cplx r = R(j, j);
    if (std::abs(r) > 0.0) Qm.col(j) *= r / std::abs(r);
  }
  return Qm;
}

DensityMatrix random_projector(Flavor flavor, std::size_t nk, std::size_t rank, std::mt19937_64& rng) {
  DensityMatrix dm;
  dm.flavor = flavor;
  dm.nk = nk;
  const int n = static_cast<int>(nk * dm.dim());
  const MatrixXc U = haar_unitary(n, rng);
  const MatrixXc V = U.leftCols(static_cast<Eigen::Index>(rank));
  dm.P = V * V.adjoint();
  dm.P = 0.5 * (dm.P + dm.P.adjoint()).eval();
  return dm;
}

double trace_lemma_residual(const MatrixXc& A, const MatrixXc& B) {
  const cplx lhs = (A * B * A.adjoint() * B.adjoint()).trace();
  const MatrixXc C = A * B - B * A;
  const cplx rhs = 0.5 * (A * A.adjoint() * B.adjoint() * B + A.adjoint() * A * B * B.adjoint()).trace() -
                   0.5 * C.squaredNorm();
  return std::abs(lhs.real() - rhs.real());
}

}  // namespace fbi
