#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace cardbench {

// 64-bit FNV-1a, incremental.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= bytes[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void add(std::string_view text) {
    add_bytes(text.data(), text.size());
    add_u64(text.size());
  }
  void add_u64(uint64_t value) { add_bytes(&value, sizeof(value)); }
  void add_double(double value) {
    uint64_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    add_u64(bits);
  }
  uint64_t digest() const { return state_; }

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a label (query id, method, sub-plan key).
inline uint64_t derive_seed(uint64_t base, std::string_view label) {
  Fnv1a h;
  h.add_u64(base);
  h.add(label);
  return splitmix64(h.digest());
}

}  // namespace cardbench
