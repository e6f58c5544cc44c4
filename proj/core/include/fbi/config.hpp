#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fbi/types.hpp"

namespace fbi {

// Run configuration. Text form is one `key = value` per line, `#` starts a comment.
struct RunConfig {
  std::string convention = "chiral-standard";
  int n_kx = 4;
  int n_ky = 4;
  double pw_shells = 7.0;   // plane-wave cutoff in units of |g1|
  double ff_shells = 0.0;   // form-factor cutoff; <= 0 means pw_shells - 1
  bool auto_alpha = true;
  double alpha = 0.0;
  double alpha_lo = 0.3;
  double alpha_hi = 0.9;
  double magic_tol = 1e-7;
  Flavor flavor = Flavor::spinless;
  std::string interaction = "yukawa";
  double interaction_param = 1.0;
  double flat_tol = 1e-6;
  double kernel_tol = 1e-10;
  double invertible_tol = 1e-6;
  double gs_tol = 1e-4;
  std::uint64_t seed = 20240607;
  int orbit_samples = 20;
  int random_states = 100;
  std::string state = "fm:0";
  int oracle_nkx = 2;
  int oracle_nky = 1;
  double oracle_ff_shells = 2.0;
  std::string out_dir = "fbi-out";
  std::string cache_dir;
  int threads = 0;

  double form_factor_shells() const { return ff_shells > 0.0 ? ff_shells : pw_shells - 1.0; }
};

std::vector<std::string> config_keys();

// Parses config text; errors carry "line N: field 'key': ..." diagnostics.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Assigns one key from its text value; throws ConfigError.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Applies FBI_<KEY> overrides (key upper-cased) found through `lookup`.
inline constexpr const char* env_prefix = "FBI_";
void apply_env_overrides(RunConfig& cfg, const std::function<std::optional<std::string>(const std::string&)>& lookup);
void apply_env_overrides(RunConfig& cfg);

void validate_config(const RunConfig& cfg);

// Hash of the fields that determine the single-particle data (convention, grid, cutoff, alpha choice).
std::uint64_t bundle_hash(const RunConfig& cfg);
std::uint64_t table_hash(const RunConfig& cfg);

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace fbi
