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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "paytv/bytes.hpp"

namespace paytv::binding {

/// Input to the binding function h: the sender public key(s) and the random
/// number r. Keys are canonical fixed-length serializations, sorted
/// lexicographically without duplicates so every interoperating CA system
/// builds the same input.
struct HInput {
  std::vector<Bytes> public_keys;
  Bytes r;
};

/// The n-bit shared secret K (control word).
struct SharedSecret {
  Bytes k;
  friend bool operator==(const SharedSecret&, const SharedSecret&) = default;
};

inline std::size_t bits_to_bytes(std::size_t bits) { return (bits + 7) / 8; }

/// Sorts and deduplicates `keys` into a valid HInput key list.
std::vector<Bytes> canonical_key_set(std::vector<Bytes> keys);

/// Returns r || pk_1 || ... || pk_m. Throws ConfigError if the key list is
/// empty, unsorted, has duplicates or mixed key lengths, or if r is not
/// exactly `r_bits` long.
Bytes encode_h_input(const HInput& input, std::size_t r_bits);

/// K = leftmost n bits of SHA-512(encode_h_input(input)), with |r| = n.
/// For n not a multiple of 8 the unused low bits of the last byte are zero.
SharedSecret derive_k(const HInput& input, std::size_t n_bits);
/// Same with a longer r: r_bits must be at least n_bits.
SharedSecret derive_k(const HInput& input, std::size_t n_bits, std::size_t r_bits);

/// Second-preimage strength in bits of n-bit truncated SHA-512 for inputs
/// of at most `max_input_len_bits`:
///   min{ n, 512 - log2(max_input_len_bits / 2^10) }, rounded down.
/// Requires max_input_len_bits >= 2^10.
std::uint32_t second_preimage_strength(std::uint32_t n_bits, std::uint64_t max_input_len_bits);

/// Bit length of the h input for `sender_count` keys of `key_bytes` each.
std::uint64_t h_input_bits(std::size_t sender_count, std::size_t key_bytes, std::size_t r_bits);

}  // namespace paytv::binding
