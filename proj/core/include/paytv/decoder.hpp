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

// Decoder = updatable CA client software + content decryption chip. The two
// talk over an in-decoder channel that an attacker can observe and write to,
// so the chip only trusts what passes the protocol checks.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "paytv/binding.hpp"
#include "paytv/bytes.hpp"
#include "paytv/crypto.hpp"
#include "paytv/error.hpp"
#include "paytv/headend.hpp"
#include "paytv/protocol_one.hpp"
#include "paytv/protocol_two.hpp"
#include "paytv/wire.hpp"

namespace paytv::decoder {

enum class ChipMessageKind : std::uint8_t {
  kLoadLtk = 1,       // Phase I bundle
  kDerive = 2,        // e_LK(K), or lp(PK_A) || lp(e_LK(r)); raw K for legacy chips
  kPkSetUpdate = 3,   // sender key set used as h input
  kCrlUpdate = 4,     // TTP revocation list (protocol one only)
};

const char* to_string(ChipMessageKind kind);

/// Message on the CA client -> chip channel: u8 kind | u64 epoch | lp(body).
struct ChipMessage {
  ChipMessageKind kind = ChipMessageKind::kDerive;
  std::uint64_t epoch = 0;
  Bytes body;

  Bytes serialize() const;
  static ChipMessage parse(ByteView data);
  friend bool operator==(const ChipMessage&, const ChipMessage&) = default;
};

Bytes encode_p2_derive(ByteView sender_pk, ByteView ciphertext);

/// Result of one broadcast message at the CA client. `addressed` is false
/// when the message belongs to another CA system or receiver.
struct ClientOutput {
  bool addressed = false;
  std::vector<ChipMessage> messages;
};

class CaClient {
 public:
  CaClient(crypto::Suite suite, headend::ClientProvisioning provisioning);

  /// EMMs for other CA systems or other receivers are ignored. Enrollment
  /// EMMs yield a load_ltk message once the sender certificate or key is
  /// known; key and certificate broadcasts update the client and, for key
  /// sets and revocation lists, the chip. Throws CryptoError or WireError on
  /// a message that fails to parse or authenticate.
  ClientOutput process_emm(ByteView emm);

  /// Extracts r or K from the group-protected ECM and wraps it for the chip
  /// under the stored LK copy. Nothing is emitted when the client is not
  /// entitled or has no LK yet. Throws CryptoError or WireError.
  ClientOutput process_ecm(ByteView ecm);

  EntityId receiver() const { return prov_.receiver; }
  std::uint16_t ca_system_id() const { return prov_.ca_system_id; }
  bool entitled() const { return entitled_; }

  // CA client software is not tamper resistant; the adversary harness reads
  // its secrets through these.
  const wire::ChannelKeys& leak_channel_keys() const { return prov_.keys; }
  const std::map<Bytes, Bytes>& leak_ltk_copies() const { return ltk_copy_; }
  const Bytes& current_sender_pk() const { return sender_pk_; }

 private:
  std::optional<ChipMessage> load_message(std::uint64_t epoch);

  crypto::Suite suite_;
  headend::ClientProvisioning prov_;
  Bytes sender_pk_;
  std::optional<ttp::Certificate> sender_cert_;
  std::optional<wire::EnrollPayload> pending_enroll_;
  std::map<Bytes, Bytes> ltk_copy_;  // sender pk -> LK
  bool entitled_ = false;
  std::uint64_t last_epoch_ = 0;
};

/// Opaque reference to a control word held inside one chip for one epoch.
class ControlWordHandle {
 public:
  std::uint64_t epoch() const { return epoch_; }

 private:
  friend class Chip;
  ControlWordHandle(std::uint64_t chip, std::uint64_t epoch, std::uint64_t slot)
      : chip_(chip), epoch_(epoch), slot_(slot) {}
  std::uint64_t chip_;
  std::uint64_t epoch_;
  std::uint64_t slot_;
};

struct LegacyReceiver {
  friend bool operator==(const LegacyReceiver&, const LegacyReceiver&) = default;
};

/// Content decryption chip. Keys and control words never leave it; derived
/// control words are only usable through descramble().
class Chip {
 public:
  static Chip protocol_one(crypto::Suite suite, EntityId id, Bytes private_key, Bytes trusted_pk_t);
  static Chip protocol_two(crypto::Suite suite, EntityId id, Bytes private_key);
  static Chip legacy(crypto::Suite suite, EntityId id);

  /// Runs the receiver side of the protocol for one message. Throws
  /// ProtocolAbort and leaves the chip unchanged when a check fails.
  std::optional<ControlWordHandle> process(const ChipMessage& msg);

  /// Throws ConfigError for a handle from another chip or one superseded by
  /// a derive message for a different epoch.
  Bytes descramble(const ControlWordHandle& handle, ByteView scrambled) const;

  EntityId id() const { return id_; }
  headend::ProtocolKind kind() const;

  friend bool operator==(const Chip& a, const Chip& b) {
    return a.id_ == b.id_ && a.receiver_ == b.receiver_ && a.words_ == b.words_ &&
           a.latest_epoch_ == b.latest_epoch_ && a.next_slot_ == b.next_slot_;
  }

 private:
  using ReceiverState = std::variant<p1::Receiver, p2::Receiver, LegacyReceiver>;
  Chip(crypto::Suite suite, EntityId id, ReceiverState receiver)
      : suite_(std::move(suite)), id_(id), receiver_(std::move(receiver)) {}

  binding::SharedSecret derive(const ChipMessage& msg) const;

  crypto::Suite suite_;
  EntityId id_;
  ReceiverState receiver_;
  std::map<std::uint64_t, Bytes> words_;  // slot -> K, latest epoch only
  std::uint64_t latest_epoch_ = 0;
  std::uint64_t next_slot_ = 0;
};

enum class MessageStatus : std::uint8_t { kIgnored, kAccepted, kRejected };

const char* to_string(MessageStatus status);

struct Rejection {
  bool at_chip = false;
  std::optional<AbortReason> reason;  // set for chip rejections
  std::string what;
};

/// What happened inside a decoder while it processed one frame. Statuses are
/// indexed like the frame's EMM and ECM lists; a message is rejected when the
/// client or the chip refused it or anything derived from it.
struct FrameTrace {
  std::vector<ChipMessage> chip_messages;  // as delivered to the chip
  std::vector<ControlWordHandle> handles;
  std::vector<Rejection> rejections;
  std::vector<MessageStatus> emm_status;
  std::vector<MessageStatus> ecm_status;
};

class Decoder {
 public:
  // Adversary hook on the CA client -> chip channel. Sees every message and
  // may replace or drop it.
  using ChannelHook = std::function<std::optional<ChipMessage>(const ChipMessage&)>;

  Decoder(EntityId id, CaClient client, Chip chip);

  FrameTrace receive(const wire::BroadcastFrame& frame);
  /// Writes a message straight onto the chip channel.
  FrameTrace inject(const ChipMessage& msg);
  /// Replaces the CA client software; the chip is untouched.
  void swap_client(CaClient client) { client_ = std::move(client); }
  void replace_chip(Chip chip) { chip_ = std::move(chip); }
  void set_hook(ChannelHook hook) { hook_ = std::move(hook); }

  EntityId id() const { return id_; }
  const Chip& chip() const { return chip_; }
  CaClient& client() { return client_; }
  const CaClient& client() const { return client_; }

 private:
  bool deliver(const ChipMessage& msg, FrameTrace& trace);

  EntityId id_;
  CaClient client_;
  Chip chip_;
  ChannelHook hook_;
};

}  // namespace paytv::decoder
