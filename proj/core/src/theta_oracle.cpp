#include "fbi/theta_oracle.hpp"

#include <cmath>
#include <numbers>

#include "fbi/errors.hpp"

namespace fbi {

namespace {
constexpr cplx I{0.0, 1.0};
cplx to_complex(const Vec2& v) { return {v.x(), v.y()}; }
}  // namespace

cplx jacobi_theta1(cplx v, cplx tau) {
  const cplx q = std::exp(I * std::numbers::pi * tau);
  if (!(std::abs(q) < 1.0)) throw ThetaSeriesError("theta nome |q| >= 1");
  cplx sum = 0.0;
  for (int n = 0; n < 400; ++n) {
    const double e = (n + 0.5) * (n + 0.5);
    const cplx term = std::exp(I * std::numbers::pi * tau * e) * std::sin(double(2 * n + 1) * v);
    sum += (n % 2 == 0 ? 1.0 : -1.0) * term;
    if (n > 2 && std::abs(term) <= 1e-17 * std::max(1.0, std::abs(sum))) return 2.0 * sum;
  }
  throw ThetaSeriesError("theta series did not converge");
}

ThetaOracle::ThetaOracle(const PlaneWaveBasis& basis, const VectorXc& u0) : basis_(basis), u0_(u0) {
  w1_ = to_complex(basis.lattice().a1);
  w2_ = to_complex(basis.lattice().a2);
  tau_ = w2_ / w1_;
  if (tau_.imag() < 0.0) throw ConventionError("real-space generators must be positively oriented");
}

Vec2 ThetaOracle::zero_location(const Vec2& k) const {
  const cplx z1 = -I * to_complex(k) * basis_.lattice().area_omega / (2.0 * std::numbers::pi);
  return {z1.real(), z1.imag()};
}

cplx ThetaOracle::factor(const Vec2& k, const Vec2& r) const {
  const cplx kc = to_complex(k);
  if (kc == cplx(0.0)) return 1.0;
  const cplx z = to_complex(r);
  const Vec2 zero = zero_location(k);
  const cplx z1 = to_complex(zero);
  const cplx beta = 0.5 * I * kc * std::conj(w1_) / w1_;
  const double pi = std::numbers::pi;
  return std::exp(-0.5 * I * kc * std::conj(z) + beta * z) * jacobi_theta1(pi * (z - z1) / w1_, tau_) /
         jacobi_theta1(pi * z / w1_, tau_);
}

std::vector<VectorXc> ThetaOracle::sample(const Vec2& k, const std::vector<Vec2>& rs) const {
  std::vector<VectorXc> out;
  out.reserve(rs.size());
  double total = 0.0;
  for (const auto& r : rs) {
    out.push_back(factor(k, r) * evaluate_state(u0_, basis_, r));
    total += out.back().squaredNorm();
  }
  const double s = std::sqrt(rs.size() / total);
  for (auto& v : out) v *= s;
  return out;
}

double sampled_overlap(const std::vector<VectorXc>& a, const std::vector<VectorXc>& b) {
  cplx ip = 0.0;
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ip += a[i].dot(b[i]);
    na += a[i].squaredNorm();
    nb += b[i].squaredNorm();
  }
  return std::abs(ip) / std::sqrt(na * nb);
}

std::vector<VectorXc> sample_state(const VectorXc& coeffs, const PlaneWaveBasis& basis, const std::vector<Vec2>& rs) {
  std::vector<VectorXc> out;
  out.reserve(rs.size());
  for (const auto& r : rs) out.push_back(evaluate_state(coeffs, basis, r));
  return out;
}

}  // namespace fbi
