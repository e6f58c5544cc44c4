#include "fbi/moire_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbi/errors.hpp"

namespace fbi {

namespace {

Vec2 rotate(const Vec2& v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

std::uint64_t fnv1a(std::uint64_t h, std::int64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= static_cast<std::uint64_t>((v >> (8 * i)) & 0xff);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

LatticeConvention parse_convention(const std::string& name) {
  if (name == "chiral-standard") return LatticeConvention::chiral_standard;
  throw ConfigError("unknown lattice convention '" + name + "'");
}

const char* convention_name(LatticeConvention) { return "chiral-standard"; }

MoireLattice build_lattice(LatticeConvention convention) {
  constexpr double pi = std::numbers::pi;
  MoireLattice L;
  L.convention = convention;
  L.q_vectors[0] = Vec2(0.0, -1.0);
  L.q_vectors[1] = rotate(L.q_vectors[0], 2.0 * pi / 3.0);
  L.q_vectors[2] = rotate(L.q_vectors[0], 4.0 * pi / 3.0);
  L.g1 = L.q_vectors[1] - L.q_vectors[0];
  L.g2 = L.q_vectors[2] - L.q_vectors[0];

  Eigen::Matrix2d G;
  G.col(0) = L.g1;
  G.col(1) = L.g2;
  const Eigen::Matrix2d A = 2.0 * pi * G.inverse().transpose();
  L.a1 = A.col(0);
  L.a2 = A.col(1);
  L.area_omega = std::abs(A.determinant());
  L.omega_phase = std::polar(1.0, 2.0 * pi / 3.0);
  return L;
}

ReciprocalIndex MoireLattice::q_difference(int n) const {
  const Eigen::Vector2d c = reciprocal_coords(q_vectors[n] - q_vectors[0]);
  return {static_cast<int>(std::lround(c.x())), static_cast<int>(std::lround(c.y()))};
}

Eigen::Vector2d MoireLattice::reciprocal_coords(const Vec2& v) const {
  // a_i . g_j = 2 pi delta_ij
  return Eigen::Vector2d(a1.dot(v), a2.dot(v)) / (2.0 * std::numbers::pi);
}

KGrid::KGrid(const MoireLattice& lattice, int n_kx, int n_ky)
    : lattice_(lattice), n_kx_(n_kx), n_ky_(n_ky) {
  if (n_kx < 1 || n_ky < 1) throw PreconditionError("k-grid counts must be >= 1");
}

KGrid build_kgrid(const MoireLattice& lattice, int n_kx, int n_ky) { return KGrid(lattice, n_kx, n_ky); }

GridMomentum KGrid::momentum(std::size_t k) const {
  return {static_cast<std::int64_t>(k / n_ky_), static_cast<std::int64_t>(k % n_ky_)};
}

Vec2 KGrid::vec(GridMomentum p) const {
  return (double(p.a) / n_kx_) * lattice_.g1 + (double(p.b) / n_ky_) * lattice_.g2;
}

GridMomentum KGrid::from_reciprocal(ReciprocalIndex G) const {
  return {std::int64_t(G.m) * n_kx_, std::int64_t(G.n) * n_ky_};
}

bool KGrid::is_reciprocal(GridMomentum p) const { return p.a % n_kx_ == 0 && p.b % n_ky_ == 0; }

Folded KGrid::fold(GridMomentum p) const {
  const std::int64_t m = floor_div(p.a, n_kx_);
  const std::int64_t n = floor_div(p.b, n_ky_);
  const std::int64_t i = p.a - m * n_kx_;
  const std::int64_t j = p.b - n * n_ky_;
  return {index(static_cast<int>(i), static_cast<int>(j)), {static_cast<int>(m), static_cast<int>(n)}};
}

GridMomentum KGrid::to_grid(const Vec2& p, double tol) const {
  const Eigen::Vector2d s = lattice_.reciprocal_coords(p);
  const GridMomentum g{std::llround(s.x() * n_kx_), std::llround(s.y() * n_ky_)};
  if ((vec(g) - p).norm() > tol)
    throw GridMismatchError("momentum is not on the k-grid plus reciprocal lattice");
  return g;
}

Folded KGrid::fold(const Vec2& p, double tol) const { return fold(to_grid(p, tol)); }

std::uint64_t KGrid::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, static_cast<std::int64_t>(lattice_.convention));
  h = fnv1a(h, n_kx_);
  h = fnv1a(h, n_ky_);
  return h;
}

std::vector<ReciprocalIndex> gshells(const MoireLattice& lattice, double radius) {
  if (radius < 0.0) throw PreconditionError("gshells radius must be non-negative");
  const double r = radius + 1e-9;
  const int bm = static_cast<int>(std::ceil(r * lattice.a1.norm() / (2.0 * std::numbers::pi)));
  const int bn = static_cast<int>(std::ceil(r * lattice.a2.norm() / (2.0 * std::numbers::pi)));
  struct Entry {
    ReciprocalIndex G;
    double norm2;
  };
  std::vector<Entry> found;
  for (int m = -bm; m <= bm; ++m)
    for (int n = -bn; n <= bn; ++n) {
      const double n2 = lattice.reciprocal({m, n}).squaredNorm();
      if (n2 <= r * r) found.push_back({{m, n}, n2});
    }
  std::sort(found.begin(), found.end(), [](const Entry& x, const Entry& y) {
    if (std::abs(x.norm2 - y.norm2) > 1e-9) return x.norm2 < y.norm2;
    return x.G < y.G;
  });
  std::vector<ReciprocalIndex> out;
  out.reserve(found.size());
  for (const auto& e : found) out.push_back(e.G);
  return out;
}

}  // namespace fbi
