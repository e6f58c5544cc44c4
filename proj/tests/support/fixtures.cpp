#include "fixtures.hpp"

#include <map>
#include <mutex>
#include <tuple>

namespace fbi::testing {

namespace {
std::mutex mu;
}

const MoireLattice& lattice() {
  static const MoireLattice L = build_lattice();
  return L;
}

const PlaneWaveBasis& basis(int shells) {
  static std::map<int, PlaneWaveBasis> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(shells);
  if (it == cache.end()) it = cache.emplace(shells, make_basis(lattice(), shells_to_radius(lattice(), shells))).first;
  return it->second;
}

double alpha_star(int shells) {
  static std::map<int, double> cache;
  const PlaneWaveBasis& b = basis(shells);
  std::lock_guard lock(mu);
  auto it = cache.find(shells);
  if (it == cache.end()) it = cache.emplace(shells, find_magic_alpha(b, 0.3, 0.9, 1e-7).alpha).first;
  return it->second;
}

const BlochBundle& bundle(int nkx, int nky, int shells) {
  static std::map<std::tuple<int, int, int>, BlochBundle> cache;
  const double a = alpha_star(shells);
  const PlaneWaveBasis& b = basis(shells);
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(nkx, nky, shells);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_bundle(build_kgrid(lattice(), nkx, nky), b, a)).first;
  return it->second;
}

const FormFactorTable& table(int nkx, int nky, int shells) {
  static std::map<std::tuple<int, int, int>, FormFactorTable> cache;
  const BlochBundle& b = bundle(nkx, nky, shells);
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(nkx, nky, shells);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, compute_table(b, shells_to_radius(lattice(), shells - 1))).first;
  return it->second;
}

const FormFactorTable& flavored_table(int nkx, int nky, Flavor flavor, int shells) {
  static std::map<std::tuple<int, int, int, int>, FormFactorTable> cache;
  const FormFactorTable& base = table(nkx, nky, shells);
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(nkx, nky, static_cast<int>(flavor), shells);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, extend_flavor(base, flavor)).first;
  return it->second;
}

MatrixXc random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  MatrixXc M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = cplx(N(rng), N(rng));
  return M;
}

}  // namespace fbi::testing
