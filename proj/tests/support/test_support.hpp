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

#include <doctest.h>

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "paytv/bytes.hpp"
#include "paytv/crypto.hpp"
#include "paytv/drbg.hpp"
#include "paytv/error.hpp"
#include "paytv/protocol_one.hpp"
#include "paytv/protocol_two.hpp"
#include "paytv/ttp.hpp"

namespace paytv::test {

inline Bytes counting(std::size_t n, std::uint8_t start = 0) {
  Bytes out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>(start + i);
  return out;
}

inline Bytes flip_bit(Bytes data, std::size_t bit) {
  data.at(bit / 8) ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
  return data;
}

// `count` distinct bit positions in [0, total_bits), or all of them when
// there are fewer. Always includes the first and last bit.
inline std::vector<std::size_t> sample_bits(std::size_t total_bits, std::size_t count, Drbg& rng) {
  std::set<std::size_t> picked;
  if (total_bits <= count) {
    for (std::size_t i = 0; i < total_bits; ++i) picked.insert(i);
  } else {
    picked.insert(0);
    picked.insert(total_bits - 1);
    while (picked.size() < count) picked.insert(static_cast<std::size_t>(rng.uniform(total_bits)));
  }
  return {picked.begin(), picked.end()};
}

// Runs `fn` and returns the reason of the ProtocolAbort it throws. Any other
// outcome fails the calling test case.
inline AbortReason abort_reason(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ProtocolAbort& e) {
    return e.reason();
  } catch (const std::exception& e) {
    FAIL("expected ProtocolAbort, got: " << e.what());
  }
  FAIL("expected ProtocolAbort");
  return AbortReason::kMalformedMessage;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_bytes(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

inline std::string data_path(const std::string& name) { return std::string(PAYTV_TEST_DATA_DIR) + "/" + name; }
inline std::string scenario_path(const std::string& name) {
  return std::string(PAYTV_SCENARIO_DIR) + "/" + name;
}

// One TTP, one sender and `receivers` registered receivers (ids 0x1000+i).
struct Universe {
  crypto::Suite suite;
  Drbg rng;
  ttp::TrustedThirdParty ttp;
  std::vector<EntityId> ids;
  std::vector<crypto::KeyPair> receiver_keys;

  explicit Universe(std::size_t receivers, std::uint64_t seed = 1, std::size_t bits = 128)
      : suite(crypto::SuiteConfig{.secret_len_bits = bits}), rng(Drbg::from_u64(seed)), ttp(suite, rng) {
    for (std::size_t i = 0; i < receivers; ++i) {
      ids.push_back(EntityId{0x1000 + i});
      receiver_keys.push_back(crypto::keygen(suite, crypto::KeyPurpose::kEncryption, rng));
      ttp.register_receiver(ids.back(), receiver_keys.back().public_key);
    }
  }

  p1::Sender p1_sender(EntityId id = EntityId{0x5000}) {
    auto sender = p1::Sender::create(suite, id, ttp, rng);
    sender.load_directory(ttp.export_directory(), ttp.public_key());
    return sender;
  }
  p1::Receiver p1_receiver(std::size_t i) const {
    return p1::Receiver(suite, ids[i], ttp.public_key(), receiver_keys[i].private_key);
  }
  p2::Sender p2_sender(EntityId id = EntityId{0x5000}) {
    p2::Sender sender(suite, id, crypto::keygen(suite, crypto::KeyPurpose::kSignature, rng));
    sender.load_directory(ttp.export_directory(), ttp.public_key());
    return sender;
  }
  p2::Receiver p2_receiver(std::size_t i) const {
    return p2::Receiver(suite, ids[i], receiver_keys[i].private_key);
  }
};

}  // namespace paytv::test
