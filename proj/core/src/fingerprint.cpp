#include "tagrec/fingerprint.hpp"

#include <bit>
#include <cstdio>

namespace tagrec {

namespace {
constexpr std::uint64_t kPrime = 1099511628211ULL;
}

Fingerprint& Fingerprint::add(std::string_view bytes) noexcept {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= kPrime;
  }
  // Length terminator so ("ab","c") and ("a","bc") differ.
  return add(static_cast<std::uint64_t>(bytes.size()));
}

Fingerprint& Fingerprint::add(std::uint64_t value) noexcept {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (value >> (8 * i)) & 0xffU;
    state_ *= kPrime;
  }
  return *this;
}

Fingerprint& Fingerprint::add(double value) noexcept {
  return add(std::bit_cast<std::uint64_t>(value));
}

std::string Fingerprint::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

std::string fingerprint_of(std::string_view bytes) {
  Fingerprint fp;
  fp.add(bytes);
  return fp.hex();
}

}  // namespace tagrec
