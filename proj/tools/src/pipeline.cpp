#include "fbi_cli/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "fbi/cache.hpp"
#include "fbi/errors.hpp"

namespace fbi::cli {

namespace {

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::uint64_t magic_hash(const RunConfig& cfg) {
  RunConfig key;
  key.convention = cfg.convention;
  key.pw_shells = cfg.pw_shells;
  key.alpha_lo = cfg.alpha_lo;
  key.alpha_hi = cfg.alpha_hi;
  key.magic_tol = cfg.magic_tol;
  const std::string s = "magic|" + serialize_config(key);
  return fnv1a64(s.data(), s.size());
}

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)), lattice_(build_lattice(parse_convention(cfg_.convention))) {
  validate_config(cfg_);
}

const PlaneWaveBasis& Pipeline::basis() {
  if (!basis_) basis_ = make_basis(lattice_, shells_to_radius(lattice_, cfg_.pw_shells));
  return *basis_;
}

const MagicAlphaResult& Pipeline::magic_alpha() {
  if (magic_) return *magic_;
  if (!cfg_.auto_alpha) {
    MagicAlphaResult r;
    r.alpha = cfg_.alpha;
    for (const Vec2& k : default_magic_sample(lattice_))
      r.residual = std::max(r.residual, flatness_residual(k, cfg_.alpha, basis()));
    magic_ = r;
    return *magic_;
  }
  const std::uint64_t h = magic_hash(cfg_);
  const std::string path = caching() ? cache_path(cfg_.cache_dir, PayloadKind::magic_alpha, h) : "";
  if (caching()) {
    if (auto bytes = read_cache_file(path, PayloadKind::magic_alpha, h)) {
      ByteReader r(*bytes);
      MagicAlphaResult m;
      m.alpha = r.get<double>();
      m.residual = r.get<double>();
      m.evaluations = r.get<std::int32_t>();
      if (!r.done()) throw CacheError("trailing bytes in cached magic alpha");
      ++stats_.hits;
      spdlog::debug("magic alpha from cache {}", path);
      magic_ = m;
      return *magic_;
    }
  }
  spdlog::info("searching magic alpha in [{}, {}] with {} plane waves", cfg_.alpha_lo, cfg_.alpha_hi, basis().n_g());
  magic_ = find_magic_alpha(basis(), cfg_.alpha_lo, cfg_.alpha_hi, cfg_.magic_tol);
  if (caching()) {
    ++stats_.misses;
    ByteWriter w;
    w.put(magic_->alpha);
    w.put(magic_->residual);
    w.put(static_cast<std::int32_t>(magic_->evaluations));
    write_cache_file(path, PayloadKind::magic_alpha, h, w.bytes());
  }
  return *magic_;
}

double Pipeline::alpha() { return magic_alpha().alpha; }

const BlochBundle& Pipeline::bundle() {
  if (bundle_) return *bundle_;
  const std::uint64_t h = bundle_hash(cfg_);
  const std::string path = caching() ? cache_path(cfg_.cache_dir, PayloadKind::bundle, h) : "";
  if (caching()) {
    if (auto bytes = read_cache_file(path, PayloadKind::bundle, h)) {
      ++stats_.hits;
      spdlog::debug("bundle from cache {}", path);
      bundle_ = deserialize_bundle(*bytes);
      return *bundle_;
    }
  }
  const double a = alpha();
  spdlog::info("building {}x{} Bloch bundle at alpha = {:.15g} (bundle {})", cfg_.n_kx, cfg_.n_ky, a, hex(h));
  bundle_ = build_bundle(build_kgrid(lattice_, cfg_.n_kx, cfg_.n_ky), basis(), a, cfg_.flat_tol);
  if (caching()) {
    ++stats_.misses;
    write_cache_file(path, PayloadKind::bundle, h, serialize_bundle(*bundle_));
  }
  return *bundle_;
}

const FormFactorTable& Pipeline::spinless_table() {
  if (spinless_) return *spinless_;
  const std::uint64_t h = table_hash(cfg_);
  const std::string path = caching() ? cache_path(cfg_.cache_dir, PayloadKind::table, h) : "";
  if (caching()) {
    if (auto bytes = read_cache_file(path, PayloadKind::table, h)) {
      ++stats_.hits;
      spdlog::debug("form factors from cache {}", path);
      spinless_ = deserialize_table(*bytes);
      return *spinless_;
    }
  }
  const BlochBundle& b = bundle();
  spdlog::info("computing form factors, cutoff {} |g1|", cfg_.form_factor_shells());
  spinless_ = compute_table(b, shells_to_radius(lattice_, cfg_.form_factor_shells()));
  if (spinless_->cutoff_warning)
    spdlog::warn("form-factor tail {:.3g} exceeds the threshold; raise pw_shells", spinless_->tail_norm);
  if (caching()) {
    ++stats_.misses;
    write_cache_file(path, PayloadKind::table, h, serialize_table(*spinless_));
  }
  return *spinless_;
}

const FormFactorTable& Pipeline::table() {
  if (cfg_.flavor == Flavor::spinless) return spinless_table();
  if (!flavored_) flavored_ = extend_flavor(spinless_table(), cfg_.flavor);
  return *flavored_;
}

Interaction Pipeline::interaction() const { return Interaction::parse(cfg_.interaction, cfg_.interaction_param); }

DensityMatrix Pipeline::state(const FormFactorTable& t) const {
  if (cfg_.state == "random") {
    std::mt19937_64 rng(cfg_.seed);
    return random_projector(t.flavor(), t.nk(), t.nk() * t.dim() / 2, rng);
  }
  std::size_t idx = 0;
  try {
    idx = std::stoul(cfg_.state.substr(3));
  } catch (const std::exception&) {
    throw ConfigError("field 'state': expected fm:<index>, got '" + cfg_.state + "'");
  }
  if (idx >= fm_generators(t.flavor()).size())
    throw ConfigError("field 'state': generator index out of range for flavor " + std::string(flavor_name(t.flavor())));
  return build_fm_state(t, idx);
}

}  // namespace fbi::cli
