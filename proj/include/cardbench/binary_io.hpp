#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "cardbench/error.hpp"

namespace cardbench {

// Host-endian binary primitives for model files.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u64(uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    raw(v.data(), v.size() * sizeof(double));
  }
  void u64s(const std::vector<uint64_t>& v) {
    u64(v.size());
    raw(v.data(), v.size() * sizeof(uint64_t));
  }

 private:
  void raw(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  uint64_t u64() {
    uint64_t v;
    raw(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    raw(&v, sizeof v);
    return v;
  }
  std::string str() {
    std::string s(checked_size(u64(), 1), '\0');
    raw(s.data(), s.size());
    return s;
  }
  std::vector<double> f64s() {
    std::vector<double> v(checked_size(u64(), sizeof(double)));
    raw(v.data(), v.size() * sizeof(double));
    return v;
  }
  std::vector<uint64_t> u64s() {
    std::vector<uint64_t> v(checked_size(u64(), sizeof(uint64_t)));
    raw(v.data(), v.size() * sizeof(uint64_t));
    return v;
  }

 private:
  static std::size_t checked_size(uint64_t n, std::size_t element) {
    if (n > (uint64_t{1} << 40) / element) fail(ErrorCode::kIo, "corrupt model file (length field)");
    return static_cast<std::size_t>(n);
  }
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail(ErrorCode::kIo, "truncated model file");
  }
  std::istream& in_;
};

}  // namespace cardbench
