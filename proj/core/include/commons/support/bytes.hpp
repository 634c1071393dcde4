#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace commons {

using Byte = std::uint8_t;
using Bytes = std::vector<Byte>;

/// 32-byte digest / identifier. Comparable and hashable; orders
/// lexicographically, which fixes canonical map ordering everywhere.
struct Digest32 {
  std::array<Byte, 32> v{};

  auto operator<=>(const Digest32&) const = default;

  bool is_zero() const {
    for (auto b : v)
      if (b != 0) return false;
    return true;
  }
};

std::string to_hex(const Bytes& data);
std::string to_hex(const Digest32& d);
std::optional<Bytes> from_hex(std::string_view hex);
std::optional<Digest32> digest_from_hex(std::string_view hex);

/// Short printable prefix (8 hex chars) for reports and error messages.
std::string short_hex(const Digest32& d);

}  // namespace commons
