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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "paytv/binding.hpp"
#include "paytv/crypto.hpp"
#include "paytv/error.hpp"
#include "test_support.hpp"

using namespace paytv;
using binding::HInput;

namespace {

Bytes u16be(unsigned v) { return Bytes{static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)}; }

// Leftmost 16 bits of SHA-512(r || pk), computed without the library's h.
unsigned toy_h(unsigned r, unsigned pk) {
  Bytes in = u16be(r);
  append(in, u16be(pk));
  const auto d = crypto::sha512(in);
  return (static_cast<unsigned>(d[0]) << 8) | d[1];
}

}  // namespace

TEST_CASE("single key encodes as r || pk") {
  const Bytes r = test::counting(16, 0x10);
  const Bytes pk(32, 0x11);
  CHECK(binding::encode_h_input(HInput{{pk}, r}, 128) == concat(r, pk));
}

TEST_CASE("key list invariants are enforced") {
  const Bytes a(32, 0x11), b(32, 0x22), r(16, 0);
  CHECK_NOTHROW(binding::encode_h_input(HInput{{a, b}, r}, 128));
  CHECK_THROWS_AS(binding::encode_h_input(HInput{{b, a}, r}, 128), ConfigError);
  CHECK_THROWS_AS(binding::encode_h_input(HInput{{a, a}, r}, 128), ConfigError);
  CHECK_THROWS_AS(binding::encode_h_input(HInput{{}, r}, 128), ConfigError);
  CHECK_THROWS_AS(binding::encode_h_input(HInput{{a, Bytes(31, 0x33)}, r}, 128), ConfigError);
  CHECK_THROWS_AS(binding::encode_h_input(HInput{{a}, Bytes(15, 0)}, 128), ConfigError);
  CHECK(binding::canonical_key_set({b, a, b}) == std::vector<Bytes>{a, b});
}

TEST_CASE("encoding is injective over a toy universe") {
  // 2-byte keys and 2-byte r; lists of one or two keys drawn from 24 keys.
  std::set<Bytes> seen;
  std::size_t inputs = 0;
  for (unsigned r = 0; r < 64; ++r) {
    for (unsigned i = 0; i < 24; ++i) {
      for (unsigned j = i; j < 24; ++j) {
        HInput in{{u16be(i * 2731)}, u16be(r * 1021)};
        if (j != i) in.public_keys = binding::canonical_key_set({u16be(i * 2731), u16be(j * 2731)});
        REQUIRE(seen.insert(binding::encode_h_input(in, 16)).second);
        ++inputs;
      }
    }
  }
  CHECK(seen.size() == inputs);
}

TEST_CASE("derive_k matches an independent SHA-512 composition") {
  const std::vector<Bytes> pks = {Bytes(32, 0x22), Bytes(32, 0x11)};
  for (std::size_t n : {128, 192, 256}) {
    const Bytes r = test::counting(n / 8);
    Bytes input = r;
    append(input, Bytes(32, 0x11));
    append(input, Bytes(32, 0x22));
    const auto d = crypto::sha512(input);
    const auto k = binding::derive_k(HInput{binding::canonical_key_set(pks), r}, n);
    CHECK(k.k == Bytes(d.begin(), d.begin() + n / 8));
  }
}

TEST_CASE("truncation keeps the leftmost bits") {
  const Bytes r = test::counting(64);
  const HInput in{{Bytes(32, 0x11)}, r};
  const auto full = binding::derive_k(in, 512);
  const auto digest = crypto::sha512(concat(r, Bytes(32, 0x11)));
  CHECK(full.k == Bytes(digest.begin(), digest.end()));
  for (std::size_t n : {128, 192, 256, 384}) {
    const auto k = binding::derive_k(in, n, 512);
    CHECK(std::equal(k.k.begin(), k.k.end(), full.k.begin()));
  }
  const auto odd = binding::derive_k(in, 12, 512);
  REQUIRE(odd.k.size() == 2);
  CHECK(odd.k[0] == full.k[0]);
  CHECK(odd.k[1] == (full.k[1] & 0xF0));
  CHECK_THROWS_AS(binding::derive_k(in, 513, 513), ConfigError);
  CHECK_THROWS_AS(binding::derive_k(in, 256, 128), ConfigError);
}

TEST_CASE("changing any key changes K") {
  Drbg rng = Drbg::from_u64(8);
  std::vector<Bytes> keys;
  for (int i = 0; i < 4; ++i) keys.push_back(rng.generate(32));
  const Bytes r = rng.generate(16);
  const auto base = binding::derive_k(HInput{binding::canonical_key_set(keys), r}, 128);
  for (int trial = 0; trial < 100; ++trial) {
    auto perturbed = keys;
    auto& victim = perturbed[rng.uniform(perturbed.size())];
    victim = test::flip_bit(victim, rng.uniform(256));
    CHECK(binding::derive_k(HInput{binding::canonical_key_set(perturbed), r}, 128) != base);
  }
  CHECK(binding::derive_k(HInput{binding::canonical_key_set(keys), rng.generate(16)}, 128) != base);
}

TEST_CASE("toy h behaves like a random function") {
  // 2^16 inputs (r, pk) with r, pk < 256, 16-bit output. For a random
  // function the number of inputs whose output is shared with another input
  // concentrates near 2^16 * (1 - e^-1) ~ 41427.
  std::map<unsigned, unsigned> buckets;
  for (unsigned r = 0; r < 256; ++r)
    for (unsigned pk = 0; pk < 256; ++pk) ++buckets[toy_h(r, pk)];
  unsigned shared = 0;
  unsigned largest = 0;
  for (const auto& [out, count] : buckets) {
    if (count > 1) shared += count;
    largest = std::max(largest, count);
  }
  const double expected = 65536.0 * (1.0 - std::exp(-1.0));
  CHECK(std::abs(shared - expected) < 6 * std::sqrt(expected));
  CHECK(largest < 12);

  // Second preimages of one fixed input are as rare as for a random function.
  const unsigned target = toy_h(7, 9);
  unsigned second = 0;
  for (unsigned r = 0; r < 256; ++r)
    for (unsigned pk = 0; pk < 256; ++pk)
      if ((r != 7 || pk != 9) && toy_h(r, pk) == target) ++second;
  CHECK(second < 8);
}

TEST_CASE("K is unpredictable without r on the toy universe") {
  Drbg rng = Drbg::from_u64(9);
  unsigned hits = 0;
  const unsigned trials = 1u << 16;
  for (unsigned i = 0; i < trials; ++i) {
    const auto pk = static_cast<unsigned>(rng.uniform(256));
    const auto r = static_cast<unsigned>(rng.uniform(65536));
    if (toy_h(r, pk) == static_cast<unsigned>(rng.uniform(65536))) ++hits;
  }
  // Expected 1 hit at probability 2^-16.
  CHECK(hits <= 6);
}

TEST_CASE("second preimage strength") {
  CHECK(binding::second_preimage_strength(128, 1u << 10) == 128);
  CHECK(binding::second_preimage_strength(128, 1u << 20) == 128);
  CHECK(binding::second_preimage_strength(511, 1u << 13) == 509);
  CHECK(binding::second_preimage_strength(512, 1ull << 40) == 482);
  CHECK(binding::second_preimage_strength(512, (1u << 11) + 1) == 510);
  CHECK_THROWS_AS(binding::second_preimage_strength(128, 1023), ConfigError);

  for (std::size_t senders = 1; senders <= 16; ++senders) {
    const auto len = std::max<std::uint64_t>(binding::h_input_bits(senders, 32, 256), 1u << 10);
    for (std::uint32_t n : {128u, 192u, 256u}) CHECK(binding::second_preimage_strength(n, len) == n);
  }
  CHECK(binding::h_input_bits(2, 32, 128) == 128 + 512);
}
