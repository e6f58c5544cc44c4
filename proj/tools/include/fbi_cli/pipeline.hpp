#pragma once

#include <memory>
#include <optional>
#include <string>

#include "fbi/config.hpp"
#include "fbi/flat_bands.hpp"
#include "fbi/form_factors.hpp"
#include "fbi/hartree_fock.hpp"

namespace fbi::cli {

struct CacheStats {
  int hits = 0;
  int misses = 0;
};

// Lazily computed single-particle data for one run configuration, backed by the on-disk cache.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  const MoireLattice& lattice() const { return lattice_; }
  const PlaneWaveBasis& basis();
  const MagicAlphaResult& magic_alpha();
  double alpha();
  const BlochBundle& bundle();
  const FormFactorTable& spinless_table();
  // Table in the configured flavor.
  const FormFactorTable& table();
  Interaction interaction() const;
  // State named by the `state` field: fm:<i> or random (seeded).
  DensityMatrix state(const FormFactorTable& table) const;

  const CacheStats& cache_stats() const { return stats_; }

 private:
  bool caching() const { return !cfg_.cache_dir.empty(); }

  RunConfig cfg_;
  MoireLattice lattice_;
  std::optional<PlaneWaveBasis> basis_;
  std::optional<MagicAlphaResult> magic_;
  std::optional<BlochBundle> bundle_;
  std::optional<FormFactorTable> spinless_;
  std::optional<FormFactorTable> flavored_;
  CacheStats stats_;
};

std::uint64_t magic_hash(const RunConfig& cfg);

}  // namespace fbi::cli
