#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "artpoint/common.hpp"

namespace artpoint {

// Doubles in text outputs use %.17g: round-trips IEEE doubles exactly and is
// byte-stable across reruns.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// FNV-1a accumulator used for config digests in report files.
class Digest {
 public:
  Digest& add(const std::string& s) {
    for (const char c : s) step(static_cast<unsigned char>(c));
    step(0xffu);  // field separator
    return *this;
  }
  Digest& add(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return add(std::to_string(bits));
  }
  Digest& add(std::uint64_t v) { return add(std::to_string(v)); }
  Digest& add(int v) { return add(std::to_string(v)); }

  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  void step(unsigned char byte) {
    state_ ^= byte;
    state_ *= 0x100000001b3ULL;
  }
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// Little-endian binary container helpers with explicit byte order so files
// are portable across hosts.

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for write: " + path);
  }

  void write_magic(const char magic[4]) { out_.write(magic, 4); }
  void write_u32(std::uint32_t v) { write_le(v); }
  void write_i32(std::int32_t v) { write_le(static_cast<std::uint32_t>(v)); }
  void write_u64(std::uint64_t v) { write_le(v); }
  void write_f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    write_le(bits);
  }
  void write_string(const std::string& s) {
    write_u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_);
  }

 private:
  template <typename T>
  void write_le(T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
      buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
  }

  std::string path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open for read: " + path);
  }

  void expect_magic(const char magic[4], const std::string& what) {
    char buf[4] = {};
    in_.read(buf, 4);
    if (!in_ || std::memcmp(buf, magic, 4) != 0)
      throw FormatError(what + ": bad magic in " + path_);
  }
  std::uint32_t read_u32() { return read_le<std::uint32_t>(); }
  std::int32_t read_i32() { return static_cast<std::int32_t>(read_le<std::uint32_t>()); }
  std::uint64_t read_u64() { return read_le<std::uint64_t>(); }
  double read_f64() {
    const std::uint64_t bits = read_le<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::string read_string() {
    const std::uint32_t n = read_u32();
    std::string s(n, '\0');
    in_.read(s.data(), n);
    check();
    return s;
  }

 private:
  template <typename T>
  T read_le() {
    unsigned char buf[sizeof(T)];
    in_.read(reinterpret_cast<char*>(buf), sizeof(T));
    check();
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }
  void check() {
    if (!in_) throw FormatError("truncated or unreadable file: " + path_);
  }

  std::string path_;
  std::ifstream in_;
};

}  // namespace artpoint
