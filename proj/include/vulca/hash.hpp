#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vulca {

// FNV-1a, 64-bit. Cache keys and stage fingerprints only; not for security.
class Fnv1a64 {
 public:
  Fnv1a64& update(std::string_view data) {
    for (unsigned char c : data) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  // Separator byte keeps ("ab","c") distinct from ("a","bc").
  Fnv1a64& field(std::string_view data) {
    update(data);
    state_ ^= 0x1f;
    state_ *= 0x100000001b3ULL;
    return *this;
  }

  std::uint64_t value() const { return state_; }

  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = state_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = digits[v & 0xf];
      v >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hash_fields(const std::vector<std::string_view>& fields) {
  Fnv1a64 h;
  for (auto f : fields) h.field(f);
  return h.hex();
}

}  // namespace vulca
