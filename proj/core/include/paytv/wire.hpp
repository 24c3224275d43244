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

// Broadcast CA message formats and the protected channel between head-end CA
// components and CA clients. All integers are big-endian; lp(x) is a 4-byte
// length followed by x.
//
//   EMM  = "EM" | u8 version | u16 ca_system_id | u8 kind | u64 addressee
//          | lp(clear body) | lp(sealed)
//   ECM  = "EC" | u8 version | u16 ca_system_id | u64 epoch | lp(sealed)
//   FRAME= "FR" | u8 version | u64 epoch | lp(scrambled content)
//          | u32 n | n x lp(ECM) | u32 m | m x lp(EMM)
//
// `sealed` is the authenticated encryption of the confidential body (empty
// for broadcast kinds) with the header and clear body as associated data.
// Broadcast EMM kinds therefore carry their body in clear with integrity only.

#include <cstdint>
#include <string>
#include <vector>

#include "paytv/bytes.hpp"
#include "paytv/crypto.hpp"

namespace paytv::wire {

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kEmmHeaderSize = 14;
inline constexpr std::size_t kEcmHeaderSize = 13;

enum class EmmKind : std::uint8_t {
  kBroadcastSenderPk = 1,
  kBroadcastCert = 2,
  kPerReceiverEnroll = 3,
  kPkSetUpdate = 4,
  kCrlUpdate = 5,
  kEntitlement = 6,
};

const char* to_string(EmmKind kind);
// Per-receiver kinds are encrypted under the receiver's unique key.
bool is_confidential(EmmKind kind);

/// Symmetric keys shared by a CA system and one CA client: a group key for
/// ECMs and broadcast EMMs and a unique key for per-receiver EMMs.
struct ChannelKeys {
  Bytes group_key;
  Bytes unique_key;
  friend bool operator==(const ChannelKeys&, const ChannelKeys&) = default;
};

Bytes protect(const crypto::Suite& suite, ByteView key, ByteView plaintext, ByteView aad);
// Throws CryptoError on any tampering of ciphertext or aad, or a wrong key.
Bytes unprotect(const crypto::Suite& suite, ByteView key, ByteView sealed, ByteView aad);

struct Emm {
  std::uint16_t ca_system_id = 0;
  EmmKind kind = EmmKind::kBroadcastSenderPk;
  EntityId addressee = kBroadcastId;
  Bytes payload;
  friend bool operator==(const Emm&, const Emm&) = default;
};

/// An EMM as parsed from the wire, before its seal is checked.
struct SealedEmm {
  std::uint16_t ca_system_id = 0;
  EmmKind kind = EmmKind::kBroadcastSenderPk;
  EntityId addressee = kBroadcastId;
  Bytes clear_body;
  Bytes sealed;

  Bytes header() const;
};

Bytes emm_encode(const crypto::Suite& suite, const Emm& emm, ByteView key);
// Structural parse; throws WireError with the failing offset.
SealedEmm emm_parse(ByteView data);
// Throws CryptoError if the seal does not verify under `key`.
Emm emm_open(const crypto::Suite& suite, const SealedEmm& sealed, ByteView key);
Emm emm_decode(const crypto::Suite& suite, ByteView data, ByteView key);

struct Ecm {
  std::uint16_t ca_system_id = 0;
  std::uint64_t epoch = 0;
  Bytes secret;  // r for hash-binding systems, K otherwise; always n bits
  friend bool operator==(const Ecm&, const Ecm&) = default;
};

struct SealedEcm {
  std::uint16_t ca_system_id = 0;
  std::uint64_t epoch = 0;
  Bytes sealed;

  Bytes header() const;
};

Bytes ecm_encode(const crypto::Suite& suite, const Ecm& ecm, ByteView group_key);
SealedEcm ecm_parse(ByteView data);
Ecm ecm_open(const crypto::Suite& suite, const SealedEcm& sealed, ByteView group_key);
Ecm ecm_decode(const crypto::Suite& suite, ByteView data, ByteView group_key);

// Per-kind payload schemas.
struct EnrollPayload {
  crypto::SignedMessage signed_blob;  // S_SKA(B, E_PKB(LK_B))
  Bytes ltk_copy;                     // LK_B for the CA client
  Bytes encode() const;
  static EnrollPayload decode(ByteView data);
};
Bytes encode_key_payload(ByteView key);
Bytes decode_key_payload(ByteView data);
Bytes encode_key_set(const std::vector<Bytes>& keys);
std::vector<Bytes> decode_key_set(ByteView data);
Bytes encode_entitlement(bool authorized);
bool decode_entitlement(ByteView data);

/// One control-word period on the one-way broadcast channel. There is no
/// field for anything flowing back from decoders.
struct BroadcastFrame {
  std::uint64_t epoch = 0;
  Bytes scrambled_content;
  std::vector<Bytes> ecms;
  std::vector<Bytes> emms;

  Bytes serialize() const;
  static BroadcastFrame parse(ByteView data);
  friend bool operator==(const BroadcastFrame&, const BroadcastFrame&) = default;
};

/// Capture file: "PTVC" | u8 version | frames as lp(FRAME) until end of file.
Bytes encode_capture(const std::vector<BroadcastFrame>& frames);
std::vector<BroadcastFrame> decode_capture(ByteView data);

enum class FileKind { kEmm, kEcm, kFrame, kCapture, kDirectory, kUnknown };
FileKind sniff(ByteView data);

/// Human-readable structural dump used by `paytvctl wire decode`. Throws
/// WireError with the failing offset.
std::string describe(ByteView data);

}  // namespace paytv::wire
