#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "fbi/fock_oracle.hpp"
#include "fbi/hartree_fock.hpp"
#include "fbi/sylvester_kernel.hpp"

using namespace fbi;

namespace {

constexpr double alpha = 0.585663558;

const MoireLattice& lattice() {
  static const MoireLattice L = build_lattice();
  return L;
}

const PlaneWaveBasis& basis(int shells) {
  static std::map<int, PlaneWaveBasis> cache;
  auto it = cache.find(shells);
  if (it == cache.end()) it = cache.emplace(shells, make_basis(lattice(), shells_to_radius(lattice(), shells))).first;
  return it->second;
}

const BlochBundle& bundle(int n, int shells) {
  static std::map<std::pair<int, int>, BlochBundle> cache;
  const auto key = std::make_pair(n, shells);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_bundle(build_kgrid(lattice(), n, n), basis(shells), alpha)).first;
  return it->second;
}

const FormFactorTable& table(int n, int shells) {
  static std::map<std::pair<int, int>, FormFactorTable> cache;
  const auto key = std::make_pair(n, shells);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, compute_table(bundle(n, shells), shells_to_radius(lattice(), shells - 1))).first;
  return it->second;
}

}  // namespace

static void BM_FlatBandSolve(benchmark::State& state) {
  const PlaneWaveBasis& b = basis(static_cast<int>(state.range(0)));
  const Vec2 k = 0.3 * lattice().g1 + 0.17 * lattice().g2;
  for (auto _ : state) benchmark::DoNotOptimize(flat_band_states(k, alpha, b));
  state.counters["plane_waves"] = b.n_g();
}
BENCHMARK(BM_FlatBandSolve)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_FormFactorTable(benchmark::State& state) {
  const int shells = static_cast<int>(state.range(0));
  const BlochBundle& b = bundle(4, shells);
  for (auto _ : state) benchmark::DoNotOptimize(compute_table(b, shells_to_radius(lattice(), shells - 1)));
}
BENCHMARK(BM_FormFactorTable)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_EnergyRandomProjector(benchmark::State& state) {
  const FormFactorTable& T = table(4, 4);
  const Interaction V;
  std::mt19937_64 rng(1);
  const DensityMatrix dm = random_projector(Flavor::spinless, T.nk(), T.nk(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(energy_trace_form(dm, T, V));
}
BENCHMARK(BM_EnergyRandomProjector)->Unit(benchmark::kMillisecond);

static void BM_EnergyFerromagnet(benchmark::State& state) {
  const FormFactorTable& T = table(4, 4);
  const Interaction V;
  const DensityMatrix dm = build_fm_state(T, 0);
  for (auto _ : state) benchmark::DoNotOptimize(energy_commutator_form(dm, T, V));
}
BENCHMARK(BM_EnergyFerromagnet)->Unit(benchmark::kMicrosecond);

static void BM_SylvesterScan(benchmark::State& state) {
  const FormFactorTable& T = table(4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(scan_pairs(T));
}
BENCHMARK(BM_SylvesterScan)->Unit(benchmark::kMillisecond);

static void BM_FockHamiltonian(benchmark::State& state) {
  static const FormFactorTable T = compute_table(build_bundle(build_kgrid(lattice(), 2, 1), basis(4), alpha),
                                                 shells_to_radius(lattice(), static_cast<double>(state.range(0))));
  const Interaction V;
  for (auto _ : state) benchmark::DoNotOptimize(build_h_fbi(T, V));
  state.counters["entries"] = static_cast<double>(T.nq());
}
BENCHMARK(BM_FockHamiltonian)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
