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

#include "paytv/bytes.hpp"

namespace paytv {

// Stand-in for the broadcast content cipher: AES in counter mode keyed with
// the control word, IV = be64(epoch) || 0^64. Like the real content cipher it
// is unauthenticated, so descrambling under a wrong key yields noise rather
// than an error.
class ContentScrambler {
 public:
  // Control word of 16, 24 or 32 bytes.
  explicit ContentScrambler(Bytes control_word);

  Bytes scramble(std::uint64_t epoch, ByteView content) const;
  Bytes descramble(std::uint64_t epoch, ByteView scrambled) const { return scramble(epoch, scrambled); }

 private:
  Bytes key_;
};

}  // namespace paytv
