// Copyright 2026 The paytv-kex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace paytv {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline Bytes concat(ByteView a, ByteView b) {
  Bytes out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline void append(Bytes& dst, ByteView src) { dst.insert(dst.end(), src.begin(), src.end()); }

std::string to_hex(ByteView data);
// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

// Constant-time comparison for secrets of equal length.
bool equal_ct(ByteView a, ByteView b);

// Returns true when `needle` occurs anywhere in `haystack`.
bool contains(ByteView haystack, ByteView needle);

/// Receiver and sender identities are 8-byte big-endian integers on the wire.
struct EntityId {
  std::uint64_t value = 0;
  friend auto operator<=>(const EntityId&, const EntityId&) = default;
};

inline constexpr EntityId kBroadcastId{0xFFFFFFFFFFFFFFFFull};

}  // namespace paytv
