#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tagrec {

/// Incremental 64-bit FNV-1a hash used to fingerprint datasets, models and
/// run configurations.
class Fingerprint {
 public:
  Fingerprint& add(std::string_view bytes) noexcept;
  Fingerprint& add(std::uint64_t value) noexcept;
  Fingerprint& add(std::int64_t value) noexcept {
    return add(static_cast<std::uint64_t>(value));
  }
  Fingerprint& add(double value) noexcept;

  std::uint64_t value() const noexcept { return state_; }
  /// 16 lowercase hex digits.
  std::string hex() const;

 private:
  std::uint64_t state_ = 14695981039346656037ULL;
};

std::string fingerprint_of(std::string_view bytes);

}  // namespace tagrec
