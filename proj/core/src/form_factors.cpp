#include "fbi/form_factors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbi/errors.hpp"

namespace fbi {

std::vector<GridMomentum> qprime_disc(const KGrid& grid, double radius) {
  const MoireLattice& L = grid.lattice();
  const double r = radius + 1e-9;
  const auto ba = static_cast<std::int64_t>(std::ceil(r * L.a1.norm() / (2.0 * std::numbers::pi) * grid.n_kx()));
  const auto bb = static_cast<std::int64_t>(std::ceil(r * L.a2.norm() / (2.0 * std::numbers::pi) * grid.n_ky()));
  struct Entry {
    GridMomentum p;
    double norm2;
  };
  std::vector<Entry> found;
  for (std::int64_t a = -ba; a <= ba; ++a)
    for (std::int64_t b = -bb; b <= bb; ++b) {
      const double n2 = grid.vec({a, b}).squaredNorm();
      if (n2 <= r * r) found.push_back({{a, b}, n2});
    }
  std::sort(found.begin(), found.end(), [](const Entry& x, const Entry& y) {
    if (std::abs(x.norm2 - y.norm2) > 1e-9) return x.norm2 < y.norm2;
    return x.p < y.p;
  });
  std::vector<GridMomentum> out;
  out.reserve(found.size());
  for (const auto& e : found) out.push_back(e.p);
  return out;
}

FormFactorTable::FormFactorTable(KGrid grid, Flavor flavor, double cutoff, std::vector<GridMomentum> qprimes,
                                 std::vector<MatrixXc> entries)
    : grid_(std::move(grid)), flavor_(flavor), cutoff_(cutoff), qprimes_(std::move(qprimes)), entries_(std::move(entries)) {
  if (entries_.size() != grid_.size() * qprimes_.size())
    throw PreconditionError("form-factor entry count does not match grid and q' set");
  for (const auto& p : qprimes_) {
    box_a_ = std::max<std::int64_t>(box_a_, std::abs(p.a));
    box_b_ = std::max<std::int64_t>(box_b_, std::abs(p.b));
  }
  lookup_.assign(static_cast<std::size_t>((2 * box_a_ + 1) * (2 * box_b_ + 1)), -1);
  for (std::size_t i = 0; i < qprimes_.size(); ++i) {
    const auto& p = qprimes_[i];
    lookup_[static_cast<std::size_t>((p.a + box_a_) * (2 * box_b_ + 1) + (p.b + box_b_))] = static_cast<std::int64_t>(i);
  }
  negation_.resize(qprimes_.size());
  for (std::size_t i = 0; i < qprimes_.size(); ++i) {
    const auto neg = find(-qprimes_[i]);
    if (!neg) throw PreconditionError("q' set must be closed under negation");
    negation_[i] = *neg;
  }
}

std::optional<std::size_t> FormFactorTable::find(GridMomentum p) const {
  if (std::abs(p.a) > box_a_ || std::abs(p.b) > box_b_) return std::nullopt;
  const std::int64_t i = lookup_[static_cast<std::size_t>((p.a + box_a_) * (2 * box_b_ + 1) + (p.b + box_b_))];
  if (i < 0) return std::nullopt;
  return static_cast<std::size_t>(i);
}

std::size_t FormFactorTable::index_of(GridMomentum p) const {
  const auto i = find(p);
  if (!i) throw PreconditionError("momentum transfer outside the form-factor cutoff");
  return *i;
}

FormFactorTable compute_table(const BlochBundle& bundle, double cutoff, const TableOptions& opt) {
  const KGrid& grid = bundle.grid();
  const double g = grid.lattice().g1.norm();
  if (cutoff > bundle.basis().radius() - g + 1e-9)
    throw CutoffError("form-factor cutoff must leave one plane-wave shell of margin");
  std::vector<GridMomentum> qs = qprime_disc(grid, cutoff);
  const std::size_t nk = grid.size(), nq = qs.size();
  std::vector<MatrixXc> entries(nk * nq);
  const long total = static_cast<long>(nk * nq);
#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < total; ++idx) {
    const std::size_t k = static_cast<std::size_t>(idx) / nq, qi = static_cast<std::size_t>(idx) % nq;
    const Folded f = grid.fold(grid.momentum(k) + qs[qi]);
    entries[idx] = band_overlap(bundle.state(k).bands, bundle.state(f.k).bands, f.G, bundle.basis());
  }
  FormFactorTable table(grid, Flavor::spinless, cutoff, std::move(qs), std::move(entries));
  table.plane_wave_cutoff = bundle.basis().radius();
  for (std::size_t k = 0; k < nk; ++k) {
    double tail = 0.0;
    for (std::size_t qi = 0; qi < nq; ++qi)
      if (table.qvec(qi).norm() > cutoff - g + 1e-9) tail += table.at(k, qi).squaredNorm();
    table.tail_norm = std::max(table.tail_norm, tail);
  }
  table.cutoff_warning = table.tail_norm > opt.tail_threshold;
  return table;
}

MatrixXc form_factor_unfolded(const BlochBundle& bundle, GridMomentum k, GridMomentum p) {
  const KGrid& grid = bundle.grid();
  const Folded f1 = grid.fold(k), f2 = grid.fold(k + p);
  std::array<VectorXc, 2> left;
  for (int n = 0; n < 2; ++n) left[n] = shift_state(bundle.band(f1.k, n), f1.G, bundle.basis());
  return band_overlap(left, bundle.state(f2.k).bands, f2.G, bundle.basis());
}

MatrixXc pair_product(const FormFactorTable& table, std::size_t k, std::size_t kp, const Vec2& r) {
  const KGrid& grid = table.grid();
  const GridMomentum base = grid.momentum(kp) - grid.momentum(k);
  MatrixXc rho = MatrixXc::Zero(table.dim(), table.dim());
  for (std::size_t qi = 0; qi < table.nq(); ++qi) {
    const GridMomentum G = table.qprime(qi) - base;
    if (!grid.is_reciprocal(G)) continue;
    rho += std::polar(1.0, grid.vec(G).dot(r)) * table.at(k, qi);
  }
  return rho;
}

MatrixXc pair_product_direct(const BlochBundle& bundle, std::size_t k, std::size_t kp, const Vec2& r) {
  MatrixXc rho(2, 2);
  std::array<VectorXc, 2> a, b;
  for (int n = 0; n < 2; ++n) {
    a[n] = evaluate_state(bundle.band(k, n), bundle.basis(), r);
    b[n] = evaluate_state(bundle.band(kp, n), bundle.basis(), r);
  }
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) rho(m, n) = a[m].dot(b[n]);
  return rho;
}

double sum_rule_check(const FormFactorTable& table) {
  if (table.flavor() != Flavor::spinless) throw FlavorMismatchError("sum rule is defined for the spinless table");
  double worst = 0.0;
  for (std::size_t qi = 0; qi < table.nq(); ++qi) {
    if (!table.is_reciprocal(qi)) continue;
    cplx s = 0.0;
    for (std::size_t k = 0; k < table.nk(); ++k) s += table.at(k, qi)(0, 0) - table.at(k, qi)(1, 1);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

IdentityResiduals identity_residuals(const FormFactorTable& table) {
  IdentityResiduals r;
  const std::size_t q0 = table.index_of({0, 0});
  const MatrixXc I = MatrixXc::Identity(table.dim(), table.dim());
  for (std::size_t k = 0; k < table.nk(); ++k) {
    r.normalization = std::max(r.normalization, (table.at(k, q0) - I).norm());
    for (std::size_t qi = 0; qi < table.nq(); ++qi) {
      const std::size_t kp = table.target(k, qi);
      r.adjoint = std::max(r.adjoint, (table.at(k, qi).adjoint() - table.at(kp, table.negate(qi))).norm());
    }
  }
  return r;
}

double off_diagonal_norm(const FormFactorTable& table) {
  double worst = 0.0;
  for (std::size_t k = 0; k < table.nk(); ++k)
    for (std::size_t qi = 0; qi < table.nq(); ++qi) {
      const MatrixXc& L = table.at(k, qi);
      worst = std::max({worst, std::abs(L(0, 1)), std::abs(L(1, 0))});
    }
  return worst;
}

double time_reversal_magnitude_residual(const FormFactorTable& table) {
  double worst = 0.0;
  const KGrid& grid = table.grid();
  for (std::size_t k = 0; k < table.nk(); ++k) {
    const std::size_t mk = grid.negate(k);
    for (std::size_t qi = 0; qi < table.nq(); ++qi) {
      const MatrixXc& a = table.at(k, qi);
      const MatrixXc& b = table.at(mk, table.negate(qi));
      worst = std::max(worst, (a.cwiseAbs() - b.cwiseAbs()).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

namespace {

MatrixXc kron_identity(const MatrixXc& A, int n) {
  MatrixXc out = MatrixXc::Zero(A.rows() * n, A.cols() * n);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      for (int s = 0; s < n; ++s) out(i * n + s, j * n + s) = A(i, j);
  return out;
}

MatrixXc valley_double(const MatrixXc& L) {
  MatrixXc out = MatrixXc::Zero(4, 4);
  out.topLeftCorner(2, 2) = L;
  // sigma_x L sigma_x
  out(2, 2) = L(1, 1);
  out(2, 3) = L(1, 0);
  out(3, 2) = L(0, 1);
  out(3, 3) = L(0, 0);
  return out;
}

}  // namespace

MatrixXc flavor_permutation(Flavor flavor) {
  if (flavor == Flavor::spinless) return MatrixXc::Identity(2, 2);
  MatrixXc P = MatrixXc::Zero(4, 4);
  P(0, 0) = P(1, 3) = P(2, 2) = P(3, 1) = 1.0;
  return flavor == Flavor::valley ? P : kron_identity(P, 2);
}

double block_scalar_residual(const FormFactorTable& table) {
  const int d = table.dim();
  if (table.flavor() == Flavor::spinless) return off_diagonal_norm(table);
  const MatrixXc P = flavor_permutation(table.flavor());
  const int h = d / 2;
  double worst = 0.0;
  for (std::size_t k = 0; k < table.nk(); ++k)
    for (std::size_t qi = 0; qi < table.nq(); ++qi) {
      const MatrixXc B = P * table.at(k, qi) * P;
      for (int blk = 0; blk < 2; ++blk) {
        const cplx s = B(blk * h, blk * h);
        MatrixXc D = B.block(blk * h, blk * h, h, h) - s * MatrixXc::Identity(h, h);
        worst = std::max(worst, D.norm());
      }
      worst = std::max({worst, B.topRightCorner(h, h).norm(), B.bottomLeftCorner(h, h).norm()});
    }
  return worst;
}

FormFactorTable extend_flavor(const FormFactorTable& spinless, Flavor target) {
  if (spinless.flavor() != Flavor::spinless) throw FlavorMismatchError("extend_flavor expects a spinless table");
  if (target == Flavor::spinless) return spinless;
  const double off = off_diagonal_norm(spinless);
  if (off > 1e-8) throw ConventionError("spinless table is not sublattice-diagonal (chiral gauge required)");
  const double tr = time_reversal_magnitude_residual(spinless);
  if (tr > 1e-8) throw ConventionError("spinless table violates the time-reversal magnitude relation");

  std::vector<MatrixXc> entries(spinless.nk() * spinless.nq());
  for (std::size_t k = 0; k < spinless.nk(); ++k)
    for (std::size_t qi = 0; qi < spinless.nq(); ++qi) {
      MatrixXc V = valley_double(spinless.at(k, qi));
      entries[k * spinless.nq() + qi] = target == Flavor::valley ? V : kron_identity(V, 2);
    }
  FormFactorTable out(spinless.grid(), target, spinless.cutoff(), spinless.qprimes(), std::move(entries));
  out.tail_norm = spinless.tail_norm * (target == Flavor::valley ? 2.0 : 4.0);
  out.cutoff_warning = spinless.cutoff_warning;
  out.plane_wave_cutoff = spinless.plane_wave_cutoff;

  const IdentityResiduals ids = identity_residuals(out);
  if (ids.normalization > 1e-8) throw ConventionError("extended table violates Lambda_k(0) = I");
  if (block_scalar_residual(out) > 1e-8) throw ConventionError("permuted extended form factors are not block-scalar");
  return out;
}

std::vector<TailShell> tail_profile(const FormFactorTable& table, std::size_t k) {
  std::vector<std::pair<double, double>> items;
  for (std::size_t qi = 0; qi < table.nq(); ++qi)
    if (table.is_reciprocal(qi)) items.emplace_back(table.qvec(qi).norm(), table.at(k, qi).squaredNorm());
  std::vector<double> radii;
  for (const auto& it : items) radii.push_back(it.first);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              radii.end());
  std::vector<TailShell> out;
  for (double L : radii) {
    double s = 0.0;
    for (const auto& it : items)
      if (it.first > L + 1e-9) s += it.second;
    out.push_back({L, s});
  }
  return out;
}

}  // namespace fbi
