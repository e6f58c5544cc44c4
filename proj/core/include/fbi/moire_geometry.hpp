#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fbi/types.hpp"

namespace fbi {

enum class LatticeConvention { chiral_standard };

LatticeConvention parse_convention(const std::string& name);
const char* convention_name(LatticeConvention c);

struct MoireLattice {
  LatticeConvention convention = LatticeConvention::chiral_standard;
  Vec2 g1, g2;
  Vec2 a1, a2;
  double area_omega = 0.0;
  std::array<Vec2, 3> q_vectors;
  cplx omega_phase;

  Vec2 reciprocal(ReciprocalIndex G) const { return double(G.m) * g1 + double(G.n) * g2; }
  Vec2 real_space(double s1, double s2) const { return s1 * a1 + s2 * a2; }
  // Integer coordinates of q_n - q_0 in the (g1, g2) basis.
  ReciprocalIndex q_difference(int n) const;
  // Coordinates (s1, s2) with v = s1*g1 + s2*g2.
  Eigen::Vector2d reciprocal_coords(const Vec2& v) const;
};

MoireLattice build_lattice(LatticeConvention convention = LatticeConvention::chiral_standard);

// Exact grid momentum (a/n_kx) g1 + (b/n_ky) g2.
struct GridMomentum {
  std::int64_t a = 0;
  std::int64_t b = 0;
  friend bool operator==(const GridMomentum&, const GridMomentum&) = default;
  friend auto operator<=>(const GridMomentum&, const GridMomentum&) = default;
};

inline GridMomentum operator+(GridMomentum x, GridMomentum y) { return {x.a + y.a, x.b + y.b}; }
inline GridMomentum operator-(GridMomentum x, GridMomentum y) { return {x.a - y.a, x.b - y.b}; }
inline GridMomentum operator-(GridMomentum x) { return {-x.a, -x.b}; }

struct Folded {
  std::size_t k = 0;
  ReciprocalIndex G;
};

class KGrid {
 public:
  KGrid() = default;
  KGrid(const MoireLattice& lattice, int n_kx, int n_ky);

  const MoireLattice& lattice() const { return lattice_; }
  int n_kx() const { return n_kx_; }
  int n_ky() const { return n_ky_; }
  std::size_t size() const { return static_cast<std::size_t>(n_kx_) * n_ky_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ky_ + j; }
  GridMomentum momentum(std::size_t k) const;
  Vec2 point(std::size_t k) const { return vec(momentum(k)); }
  Vec2 vec(GridMomentum p) const;
  GridMomentum from_reciprocal(ReciprocalIndex G) const;
  bool is_reciprocal(GridMomentum p) const;

  Folded fold(GridMomentum p) const;
  // Throws GridMismatchError when p is farther than tol from K + Gamma*.
  Folded fold(const Vec2& p, double tol = 1e-9) const;
  GridMomentum to_grid(const Vec2& p, double tol = 1e-9) const;

  std::size_t add(std::size_t k, GridMomentum q) const { return fold(momentum(k) + q).k; }
  std::size_t negate(std::size_t k) const { return fold(-momentum(k)).k; }
  bool is_two_torsion(std::size_t k) const { return negate(k) == k; }

  std::uint64_t hash() const;

 private:
  MoireLattice lattice_;
  int n_kx_ = 0;
  int n_ky_ = 0;
};

KGrid build_kgrid(const MoireLattice& lattice, int n_kx, int n_ky);

// All G with |G| <= radius, sorted by |G| then by (m, n).
std::vector<ReciprocalIndex> gshells(const MoireLattice& lattice, double radius);

// Floor division for signed integers.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace fbi
