#include "fbi/cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "fbi/config.hpp"
#include "fbi/errors.hpp"

namespace fbi {

namespace fs = std::filesystem;

void ByteWriter::put_complex(const VectorXc& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    put(v(i).real());
    put(v(i).imag());
  }
}

void ByteReader::need(std::size_t n) const {
  if (pos_ + n > bytes_.size()) throw CacheError("cache payload truncated");
}

VectorXc ByteReader::get_complex(std::size_t n) {
  VectorXc v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double re = get<double>();
    const double im = get<double>();
    v(static_cast<Eigen::Index>(i)) = cplx(re, im);
  }
  return v;
}

void write_cache_file(const std::string& path, PayloadKind kind, std::uint64_t config_hash, const Bytes& payload) {
  ByteWriter w;
  for (char c : cache_magic) w.put(c);
  w.put(cache_format_version);
  w.put(static_cast<std::uint32_t>(kind));
  w.put(config_hash);
  w.put(static_cast<std::uint64_t>(payload.size()));
  Bytes out = w.bytes();
  out.insert(out.end(), payload.begin(), payload.end());
  const std::uint64_t sum = fnv1a64(payload.data(), payload.size());
  const auto* p = reinterpret_cast<const std::uint8_t*>(&sum);
  out.insert(out.end(), p, p + sizeof sum);

  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CacheError("cannot write cache file '" + tmp.string() + "'");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw CacheError("short write to cache file '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::optional<Bytes> read_cache_file(const std::string& path, PayloadKind kind, std::uint64_t config_hash) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  const Bytes all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  ByteReader r(all);
  for (char c : cache_magic)
    if (r.get<char>() != c) throw CacheError("cache file '" + path + "' has a bad magic header");
  if (r.get<std::uint32_t>() != cache_format_version) return std::nullopt;
  if (r.get<std::uint32_t>() != static_cast<std::uint32_t>(kind)) return std::nullopt;
  if (r.get<std::uint64_t>() != config_hash) return std::nullopt;
  const auto size = r.get<std::uint64_t>();
  constexpr std::size_t header = 4 + 4 + 4 + 8 + 8;
  if (all.size() != header + size + 8) throw CacheError("cache file '" + path + "' has the wrong length");
  Bytes payload(all.begin() + header, all.begin() + static_cast<std::ptrdiff_t>(header + size));
  std::uint64_t stored = 0;
  std::copy(all.end() - 8, all.end(), reinterpret_cast<std::uint8_t*>(&stored));
  if (stored != fnv1a64(payload.data(), payload.size()))
    throw CacheError("cache file '" + path + "' fails its checksum");
  return payload;
}

std::string cache_path(const std::string& dir, PayloadKind kind, std::uint64_t config_hash) {
  const char* name = kind == PayloadKind::magic_alpha ? "magic" : kind == PayloadKind::bundle ? "bundle" : "table";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%016llx.fbi", name, static_cast<unsigned long long>(config_hash));
  return (fs::path(dir) / buf).string();
}

Bytes serialize_bundle(const BlochBundle& b) {
  ByteWriter w;
  w.put(static_cast<std::uint32_t>(b.lattice().convention));
  w.put(static_cast<std::int32_t>(b.grid().n_kx()));
  w.put(static_cast<std::int32_t>(b.grid().n_ky()));
  w.put(b.basis().radius());
  w.put(b.alpha_star());
  w.put(static_cast<std::uint64_t>(b.basis().state_dim()));
  for (const auto& s : b.states()) {
    w.put(s.k.x());
    w.put(s.k.y());
    w.put(s.residual);
    w.put(s.next_singular);
    w.put_complex(s.bands[0]);
    w.put_complex(s.bands[1]);
  }
  return w.bytes();
}

BlochBundle deserialize_bundle(const Bytes& payload) {
  ByteReader r(payload);
  const auto conv = static_cast<LatticeConvention>(r.get<std::uint32_t>());
  const int nkx = r.get<std::int32_t>(), nky = r.get<std::int32_t>();
  const double radius = r.get<double>(), alpha = r.get<double>();
  const auto n = r.get<std::uint64_t>();
  const MoireLattice L = build_lattice(conv);
  KGrid grid(L, nkx, nky);
  PlaneWaveBasis basis(L, radius);
  if (n != static_cast<std::uint64_t>(basis.state_dim())) throw CacheError("cached bundle does not match its basis");
  std::vector<FlatBandState> states(grid.size());
  for (auto& s : states) {
    s.k.x() = r.get<double>();
    s.k.y() = r.get<double>();
    s.residual = r.get<double>();
    s.next_singular = r.get<double>();
    s.bands[0] = r.get_complex(n);
    s.bands[1] = r.get_complex(n);
  }
  if (!r.done()) throw CacheError("trailing bytes in cached bundle");
  return BlochBundle(grid, basis, alpha, std::move(states));
}

Bytes serialize_table(const FormFactorTable& t) {
  ByteWriter w;
  w.put(static_cast<std::uint32_t>(t.grid().lattice().convention));
  w.put(static_cast<std::int32_t>(t.grid().n_kx()));
  w.put(static_cast<std::int32_t>(t.grid().n_ky()));
  w.put(static_cast<std::uint32_t>(t.flavor()));
  w.put(t.cutoff());
  w.put(t.plane_wave_cutoff);
  w.put(t.tail_norm);
  w.put(static_cast<std::uint8_t>(t.cutoff_warning));
  w.put(static_cast<std::uint64_t>(t.nq()));
  for (const auto& p : t.qprimes()) {
    w.put(p.a);
    w.put(p.b);
  }
  const int d = t.dim();
  for (std::size_t k = 0; k < t.nk(); ++k)
    for (std::size_t qi = 0; qi < t.nq(); ++qi)
      w.put_complex(Eigen::Map<const VectorXc>(t.at(k, qi).data(), d * d));
  return w.bytes();
}

FormFactorTable deserialize_table(const Bytes& payload) {
  ByteReader r(payload);
  const auto conv = static_cast<LatticeConvention>(r.get<std::uint32_t>());
  const int nkx = r.get<std::int32_t>(), nky = r.get<std::int32_t>();
  const auto flavor = static_cast<Flavor>(r.get<std::uint32_t>());
  const double cutoff = r.get<double>(), pw = r.get<double>(), tail = r.get<double>();
  const bool warn = r.get<std::uint8_t>() != 0;
  const auto nq = r.get<std::uint64_t>();
  std::vector<GridMomentum> qs(nq);
  for (auto& p : qs) {
    p.a = r.get<std::int64_t>();
    p.b = r.get<std::int64_t>();
  }
  KGrid grid(build_lattice(conv), nkx, nky);
  const int d = flavor_dim(flavor);
  std::vector<MatrixXc> entries(grid.size() * nq);
  for (auto& e : entries) {
    const VectorXc v = r.get_complex(static_cast<std::size_t>(d * d));
    e = Eigen::Map<const MatrixXc>(v.data(), d, d);
  }
  if (!r.done()) throw CacheError("trailing bytes in cached table");
  FormFactorTable t(grid, flavor, cutoff, std::move(qs), std::move(entries));
  t.plane_wave_cutoff = pw;
  t.tail_norm = tail;
  t.cutoff_warning = warn;
  return t;
}

}  // namespace fbi
