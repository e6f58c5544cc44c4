#include "fbi/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fbi/errors.hpp"
#include "fbi/moire_geometry.hpp"

namespace fbi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  // Shortest form that parses back to the same double.
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

template <class Int>
Int to_int(const std::string& v) {
  Int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define FBI_INT_FIELD(name)                                                          \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_int<int>(v); }, \
        [](const RunConfig& c) { return std::to_string(c.name); }}
#define FBI_DOUBLE_FIELD(name)                                                      \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_double(v); }, \
        [](const RunConfig& c) { return fmt_double(c.name); }}
#define FBI_STRING_FIELD(name) \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name; }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      FBI_STRING_FIELD(convention),
      FBI_INT_FIELD(n_kx),
      FBI_INT_FIELD(n_ky),
      FBI_DOUBLE_FIELD(pw_shells),
      FBI_DOUBLE_FIELD(ff_shells),
      Field{"alpha",
            [](RunConfig& c, const std::string& v) {
              if (v == "auto") {
                c.auto_alpha = true;
                c.alpha = 0.0;
              } else {
                c.auto_alpha = false;
                c.alpha = to_double(v);
              }
            },
            [](const RunConfig& c) { return c.auto_alpha ? std::string("auto") : fmt_double(c.alpha); }},
      FBI_DOUBLE_FIELD(alpha_lo),
      FBI_DOUBLE_FIELD(alpha_hi),
      FBI_DOUBLE_FIELD(magic_tol),
      Field{"flavor", [](RunConfig& c, const std::string& v) { c.flavor = parse_flavor(v); },
            [](const RunConfig& c) { return std::string(flavor_name(c.flavor)); }},
      FBI_STRING_FIELD(interaction),
      FBI_DOUBLE_FIELD(interaction_param),
      FBI_DOUBLE_FIELD(flat_tol),
      FBI_DOUBLE_FIELD(kernel_tol),
      FBI_DOUBLE_FIELD(invertible_tol),
      FBI_DOUBLE_FIELD(gs_tol),
      Field{"seed", [](RunConfig& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      FBI_INT_FIELD(orbit_samples),
      FBI_INT_FIELD(random_states),
      FBI_STRING_FIELD(state),
      FBI_INT_FIELD(oracle_nkx),
      FBI_INT_FIELD(oracle_nky),
      FBI_DOUBLE_FIELD(oracle_ff_shells),
      FBI_STRING_FIELD(out_dir),
      FBI_STRING_FIELD(cache_dir),
      FBI_INT_FIELD(threads),
  };
  return f;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.key) return f;
  throw ConfigError("unknown field '" + key + "'");
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Field& f = field(key);
  try {
    f.set(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError("field '" + key + "': " + e.what());
  }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  return out;
}

void apply_env_overrides(RunConfig& cfg, const std::function<std::optional<std::string>(const std::string&)>& lookup) {
  for (const auto& f : fields()) {
    std::string name = env_prefix;
    for (const char* c = f.key; *c; ++c) name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
    if (const auto v = lookup(name)) {
      try {
        f.set(cfg, trim(*v));
      } catch (const ConfigError& e) {
        throw ConfigError("environment " + name + ": " + e.what());
      }
    }
  }
}

void apply_env_overrides(RunConfig& cfg) {
  apply_env_overrides(cfg, [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  });
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& key, const std::string& msg) { throw ConfigError("field '" + key + "': " + msg); };
  parse_convention(cfg.convention);
  if (cfg.n_kx < 1) fail("n_kx", "must be >= 1");
  if (cfg.n_ky < 1) fail("n_ky", "must be >= 1");
  if (!(cfg.pw_shells > 1.0)) fail("pw_shells", "must exceed 1");
  if (!(cfg.form_factor_shells() > 0.0) || cfg.form_factor_shells() > cfg.pw_shells - 1.0 + 1e-12)
    fail("ff_shells", "must be positive and at most pw_shells - 1");
  if (!(cfg.alpha_lo < cfg.alpha_hi)) fail("alpha_lo", "must be below alpha_hi");
  if (!cfg.auto_alpha && !(cfg.alpha >= 0.0)) fail("alpha", "must be non-negative");
  for (const auto& [key, v] : std::vector<std::pair<std::string, double>>{{"magic_tol", cfg.magic_tol},
                                                                          {"flat_tol", cfg.flat_tol},
                                                                          {"kernel_tol", cfg.kernel_tol},
                                                                          {"invertible_tol", cfg.invertible_tol},
                                                                          {"gs_tol", cfg.gs_tol},
                                                                          {"interaction_param", cfg.interaction_param}})
    if (!(v > 0.0)) fail(key, "must be positive");
  if (cfg.interaction != "yukawa" && cfg.interaction != "gaussian") fail("interaction", "expected yukawa|gaussian");
  if (cfg.orbit_samples < 0) fail("orbit_samples", "must be >= 0");
  if (cfg.random_states < 0) fail("random_states", "must be >= 0");
  if (cfg.oracle_nkx < 1 || cfg.oracle_nky < 1) fail("oracle_nkx", "oracle grid must be >= 1x1");
  if (cfg.oracle_nkx * cfg.oracle_nky * 2 > 16) fail("oracle_nkx", "oracle grid exceeds 16 modes");
  if (!(cfg.oracle_ff_shells > 0.0) || cfg.oracle_ff_shells > cfg.pw_shells - 1.0 + 1e-12)
    fail("oracle_ff_shells", "must be positive and at most pw_shells - 1");
  if (cfg.threads < 0) fail("threads", "must be >= 0");
  const std::string& s = cfg.state;
  if (!(s == "random" || s.rfind("fm:", 0) == 0)) fail("state", "expected fm:<index> or random");
}

std::uint64_t bundle_hash(const RunConfig& cfg) {
  std::string key = "bundle|" + cfg.convention + "|" + std::to_string(cfg.n_kx) + "|" + std::to_string(cfg.n_ky) +
                    "|" + fmt_double(cfg.pw_shells) + "|" +
                    (cfg.auto_alpha ? "auto|" + fmt_double(cfg.alpha_lo) + "|" + fmt_double(cfg.alpha_hi) + "|" +
                                          fmt_double(cfg.magic_tol)
                                    : fmt_double(cfg.alpha)) +
                    "|" + fmt_double(cfg.flat_tol);
  return fnv1a64(key.data(), key.size());
}

std::uint64_t table_hash(const RunConfig& cfg) {
  const std::uint64_t b = bundle_hash(cfg);
  const std::string key = "table|" + fmt_double(cfg.form_factor_shells());
  return fnv1a64(key.data(), key.size(), b);
}

}  // namespace fbi
