#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <string_view>

namespace multisum {

// FNV-1a 64 accumulator for provenance digests.
class Digest {
 public:
  Digest& add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001B3ull;
    }
    h_ ^= 0xFF;
    h_ *= 0x100000001B3ull;
    return *this;
  }
  Digest& add(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return add(bits);
  }
  Digest& add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xFF;
      h_ *= 0x100000001B3ull;
    }
    return *this;
  }
  Digest& add(std::int64_t v) { return add(static_cast<std::uint64_t>(v)); }
  Digest& add(int v) { return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }

  std::uint64_t value() const { return h_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ull;
};

inline std::string digest_of(std::string_view bytes) { return Digest().add(bytes).hex(); }

}  // namespace multisum
