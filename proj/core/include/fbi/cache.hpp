#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbi/flat_bands.hpp"
#include "fbi/form_factors.hpp"

namespace fbi {

// File layout: "FBI1" | u32 version | u32 kind | u64 config hash | u64 payload size | payload | u64 FNV-1a checksum.
inline constexpr char cache_magic[4] = {'F', 'B', 'I', '1'};
inline constexpr std::uint32_t cache_format_version = 1;

enum class PayloadKind : std::uint32_t { magic_alpha = 1, bundle = 2, table = 3 };

using Bytes = std::vector<std::uint8_t>;

class ByteWriter {
 public:
  template <class T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_complex(const VectorXc& v);
  const Bytes& bytes() const { return bytes_; }

 private:
  Bytes bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(const Bytes& b) : bytes_(b) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::copy(bytes_.begin() + pos_, bytes_.begin() + pos_ + sizeof(T), reinterpret_cast<std::uint8_t*>(&v));
    pos_ += sizeof(T);
    return v;
  }
  VectorXc get_complex(std::size_t n);
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const;
  const Bytes& bytes_;
  std::size_t pos_ = 0;
};

// Atomic write: temp file in the same directory, then rename.
void write_cache_file(const std::string& path, PayloadKind kind, std::uint64_t config_hash, const Bytes& payload);
// nullopt when the file is absent or stale (other version, kind or hash); CacheError when corrupt.
std::optional<Bytes> read_cache_file(const std::string& path, PayloadKind kind, std::uint64_t config_hash);

std::string cache_path(const std::string& dir, PayloadKind kind, std::uint64_t config_hash);

Bytes serialize_bundle(const BlochBundle& bundle);
BlochBundle deserialize_bundle(const Bytes& payload);
Bytes serialize_table(const FormFactorTable& table);
FormFactorTable deserialize_table(const Bytes& payload);

}  // namespace fbi
