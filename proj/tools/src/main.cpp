#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fbi/config.hpp"
#include "fbi/errors.hpp"
#include "fbi_cli/commands.hpp"
#include "fbi_cli/pipeline.hpp"

using namespace fbi;
using namespace fbi::cli;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out, cache, flavor;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  int verbosity = 0;
  bool quiet = false;
};

// defaults < config file < FBI_* environment < command-line flags
RunConfig effective_config(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  apply_env_overrides(cfg);
  if (f.out) cfg.out_dir = *f.out;
  if (f.cache) cfg.cache_dir = *f.cache;
  if (f.flavor) set_config_value(cfg, "flavor", *f.flavor);
  if (f.threads) cfg.threads = *f.threads;
  if (f.seed) cfg.seed = *f.seed;
  for (const std::string& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  auto log = spdlog::stderr_color_mt("fbi");
  spdlog::set_default_logger(log);
  spdlog::set_pattern("[%H:%M:%S] %^%l%$ %v");

  CLI::App app{"Flat-band interaction toolkit for the chiral TBG model"};
  app.set_version_flag("--version", FBI_VERSION);
  app.require_subcommand(1, 1);
  // Global options may also follow the subcommand.
  app.fallthrough();
  Flags f;
  app.add_option("-c,--config", f.config, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("-o,--out", f.out, "output directory");
  app.add_option("--cache", f.cache, "cache directory (empty disables caching)");
  app.add_option("-j,--threads", f.threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--flavor", f.flavor, "spinless | valley | valley-spin")
      ->check(CLI::IsMember({"spinless", "valley", "valley-spin"}));
  app.add_option("--set", f.sets, "override one config key, key=value (repeatable)")
      ->allow_extra_args(false);
  app.add_flag("-v,--verbose", f.verbosity, "more logging (repeat for debug)");
  app.add_flag("-q,--quiet", f.quiet, "errors only");

  std::string chosen;
  for (const std::string& name : command_names())
    app.add_subcommand(name, command_help(name))->callback([&chosen, name] { chosen = name; });
  app.add_subcommand("config", "print the effective configuration")->callback([&chosen] { chosen = "config"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  spdlog::set_level(f.quiet ? spdlog::level::err
                    : f.verbosity >= 2 ? spdlog::level::debug
                    : f.verbosity == 1 ? spdlog::level::info
                                       : spdlog::level::warn);
  try {
    const RunConfig cfg = effective_config(f);
    if (chosen == "config") {
      std::cout << serialize_config(cfg);
      return exit_ok;
    }
    set_threads(cfg.threads);
    Pipeline pipeline(cfg);
    return run_command(chosen, pipeline);
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return exit_config;
  } catch (const CacheError& e) {
    spdlog::error("cache: {}", e.what());
    return exit_cache;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_validation;
  } catch (const std::exception& e) {
    spdlog::critical("internal error: {}", e.what());
    return exit_internal;
  }
}
