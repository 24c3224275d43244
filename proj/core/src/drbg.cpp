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

#include "paytv/drbg.hpp"

#include <algorithm>
#include <stdexcept>

#include "paytv/codec.hpp"
#include "paytv/crypto.hpp"

namespace paytv {

Drbg Drbg::from_u64(std::uint64_t seed) { return Drbg(codec::Writer().u64(seed).bytes()); }

void Drbg::refill() {
  Bytes input = seed_;
  codec::Writer w;
  w.u64(counter_++);
  append(input, w.bytes());
  auto digest = crypto::sha512(input);
  block_.assign(digest.begin(), digest.end());
  used_ = 0;
}

Bytes Drbg::generate(std::size_t n) {
  Bytes out;
  out.reserve(n);
  while (out.size() < n) {
    if (used_ == block_.size()) refill();
    std::size_t take = std::min(n - out.size(), block_.size() - used_);
    out.insert(out.end(), block_.begin() + static_cast<std::ptrdiff_t>(used_),
               block_.begin() + static_cast<std::ptrdiff_t>(used_ + take));
    used_ += take;
  }
  return out;
}

std::uint64_t Drbg::next_u64() {
  const Bytes raw = generate(8);
  codec::Reader r(raw);
  return r.u64();
}

std::uint64_t Drbg::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be non-zero");
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

Drbg Drbg::fork(std::string_view label) const {
  Bytes input = to_bytes("drbg-fork");
  append(input, codec::length_prefixed(seed_));
  append(input, codec::length_prefixed(to_bytes(label)));
  auto digest = crypto::sha512(input);
  return Drbg(Bytes(digest.begin(), digest.end()));
}

}  // namespace paytv
