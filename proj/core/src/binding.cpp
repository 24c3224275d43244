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

#include "paytv/binding.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "paytv/crypto.hpp"
#include "paytv/error.hpp"

namespace paytv::binding {

std::vector<Bytes> canonical_key_set(std::vector<Bytes> keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

Bytes encode_h_input(const HInput& input, std::size_t r_bits) {
  if (input.public_keys.empty()) throw ConfigError("h input needs at least one public key");
  if (input.r.size() != bits_to_bytes(r_bits))
    throw ConfigError("r must be " + std::to_string(r_bits) + " bits, got " + std::to_string(input.r.size()) +
                      " bytes");
  const std::size_t key_len = input.public_keys.front().size();
  if (key_len == 0) throw ConfigError("empty public key in h input");
  for (std::size_t i = 0; i < input.public_keys.size(); ++i) {
    if (input.public_keys[i].size() != key_len) throw ConfigError("public keys in h input differ in length");
    if (i > 0 && !(input.public_keys[i - 1] < input.public_keys[i]))
      throw ConfigError("public keys in h input must be sorted and distinct");
  }

  Bytes out = input.r;
  out.reserve(input.r.size() + key_len * input.public_keys.size());
  for (const auto& pk : input.public_keys) append(out, pk);
  return out;
}

SharedSecret derive_k(const HInput& input, std::size_t n_bits) { return derive_k(input, n_bits, n_bits); }

SharedSecret derive_k(const HInput& input, std::size_t n_bits, std::size_t r_bits) {
  if (n_bits == 0 || n_bits > 512) throw ConfigError("n must be in 1..512 bits");
  if (r_bits < n_bits) throw ConfigError("r must be at least n bits");
  crypto::Digest d = crypto::sha512(encode_h_input(input, r_bits));
  Bytes k(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(bits_to_bytes(n_bits)));
  if (n_bits % 8 != 0) k.back() &= static_cast<std::uint8_t>(0xFF << (8 - n_bits % 8));
  return SharedSecret{std::move(k)};
}

std::uint32_t second_preimage_strength(std::uint32_t n_bits, std::uint64_t max_input_len_bits) {
  if (max_input_len_bits < (1u << 10)) throw ConfigError("maximum input length must be at least 2^10 bits");
  // floor(512 - log2(L / 2^10)) = 512 - ceil(log2 L) + 10, computed exactly.
  const auto ceil_log2 = static_cast<std::uint32_t>(std::bit_width(max_input_len_bits - 1));
  const std::uint32_t bound = 512 - (ceil_log2 - 10);
  return std::min(n_bits, bound);
}

std::uint64_t h_input_bits(std::size_t sender_count, std::size_t key_bytes, std::size_t r_bits) {
  return static_cast<std::uint64_t>(r_bits) + 8ull * key_bytes * sender_count;
}

}  // namespace paytv::binding
