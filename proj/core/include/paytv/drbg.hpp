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
#include <string_view>

#include "paytv/bytes.hpp"

namespace paytv {

// Hash-counter deterministic generator: output block i is
// SHA-512(seed || be64(i)), and the stream is the concatenation of blocks.
// Fully reproducible from the seed; not a source of real entropy.
class Drbg {
 public:
  explicit Drbg(Bytes seed) : seed_(std::move(seed)) {}
  static Drbg from_u64(std::uint64_t seed);

  Bytes generate(std::size_t n);
  std::uint64_t next_u64();
  // Uniform in [0, bound) by rejection; bound must be non-zero.
  std::uint64_t uniform(std::uint64_t bound);

  // Independent child stream, seeded from this generator's seed and `label`
  // without consuming any output.
  Drbg fork(std::string_view label) const;

  const Bytes& seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  void refill();

  Bytes seed_;
  std::uint64_t counter_ = 0;
  Bytes block_;
  std::size_t used_ = 0;
};

}  // namespace paytv
