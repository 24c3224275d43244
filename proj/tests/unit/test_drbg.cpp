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

#include <map>

#include "paytv/crypto.hpp"
#include "paytv/drbg.hpp"
#include "test_support.hpp"

using namespace paytv;

TEST_CASE("output blocks are SHA-512 of seed and counter") {
  Drbg rng = Drbg::from_u64(7);
  const Bytes out = rng.generate(80);
  Bytes first_input = {0, 0, 0, 0, 0, 0, 0, 7, 0, 0, 0, 0, 0, 0, 0, 0};
  Bytes second_input = first_input;
  second_input.back() = 1;
  const auto b0 = crypto::sha512(first_input);
  const auto b1 = crypto::sha512(second_input);
  CHECK(Bytes(out.begin(), out.begin() + 64) == Bytes(b0.begin(), b0.end()));
  CHECK(Bytes(out.begin() + 64, out.end()) == Bytes(b1.begin(), b1.begin() + 16));
}

TEST_CASE("stream does not depend on how it is chunked") {
  Drbg whole = Drbg::from_u64(3);
  Drbg pieces = Drbg::from_u64(3);
  const Bytes expected = whole.generate(300);
  Bytes got;
  for (std::size_t n : {1, 63, 64, 65, 7, 100}) append(got, pieces.generate(n));
  CHECK(got == expected);
}

TEST_CASE("fork is independent of consumed output and label-specific") {
  Drbg a = Drbg::from_u64(5);
  Drbg b = Drbg::from_u64(5);
  b.generate(1000);
  CHECK(a.fork("x").generate(32) == b.fork("x").generate(32));
  CHECK(a.fork("x").generate(32) != a.fork("y").generate(32));
  CHECK(a.fork("x").generate(32) != a.generate(32));
}

TEST_CASE("uniform stays in range and covers it") {
  Drbg rng = Drbg::from_u64(11);
  std::map<std::uint64_t, int> seen;
  for (int i = 0; i < 6000; ++i) {
    const auto v = rng.uniform(6);
    REQUIRE(v < 6);
    ++seen[v];
  }
  CHECK(seen.size() == 6);
  for (const auto& [v, count] : seen) CHECK(count > 800);
  CHECK(rng.uniform(1) == 0);
}

TEST_CASE("different seeds give different streams") {
  CHECK(Drbg::from_u64(1).generate(32) != Drbg::from_u64(2).generate(32));
  CHECK(Drbg::from_u64(1).generate(32) == Drbg::from_u64(1).generate(32));
}
