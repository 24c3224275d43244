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

// Sender side of a pay-TV head-end: CA systems (each one protocol sender),
// the shared SimulCrypt components (random number generator and h), the
// content scrambler and a queue of outgoing EMMs. Output is one-way: nothing
// here accepts data from decoders.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <variant>
#include <vector>

#include "paytv/binding.hpp"
#include "paytv/bytes.hpp"
#include "paytv/crypto.hpp"
#include "paytv/drbg.hpp"
#include "paytv/protocol_one.hpp"
#include "paytv/protocol_two.hpp"
#include "paytv/ttp.hpp"
#include "paytv/wire.hpp"

namespace paytv::headend {

enum class ProtocolKind : std::uint8_t { kProtocolOne = 1, kProtocolTwo = 2, kLegacy = 3 };

const char* to_string(ProtocolKind kind);
// Accepts "p1", "p2" and "legacy". Throws ConfigError otherwise.
ProtocolKind parse_protocol(std::string_view name);

/// Everything a CA client needs from its CA system, delivered when the
/// client software is installed or replaced.
struct ClientProvisioning {
  std::uint16_t ca_system_id = 0;
  ProtocolKind kind = ProtocolKind::kProtocolTwo;
  EntityId receiver;
  wire::ChannelKeys keys;
};

struct CaSystemConfig {
  std::uint16_t ca_system_id = 0;
  ProtocolKind kind = ProtocolKind::kProtocolTwo;
  EntityId sender_id;
};

class Headend {
 public:
  Headend(crypto::Suite suite, Drbg rng);

  /// Adds a CA system. PK_T and the receiver directory are taken from `ttp`
  /// (a trusted in-process transfer); only protocol one systems also have
  /// their signature key certified by it. Returns the CA index.
  std::size_t add_ca_system(const CaSystemConfig& config, ttp::TrustedThirdParty& ttp);

  /// Installs a new trusted PK_T for a CA system, e.g. after TTP rotation.
  void set_trusted_ttp_key(std::size_t ca, Bytes pk_t);
  /// Reloads receiver keys from a directory signed under the trusted PK_T.
  void refresh_directory(std::size_t ca, const ttp::Directory& directory);

  /// Channel keys for a receiver's CA client, created on first use.
  ClientProvisioning provision_client(std::size_t ca, EntityId receiver);
  /// Fresh group and unique keys for a CA system, invalidating every
  /// installed CA client; clients must be re-provisioned.
  void rekey_channels(std::size_t ca);

  /// Runs Phase I for the receiver and queues the EMMs carrying it: the
  /// broadcast certificate or sender key, the key set when several hash
  /// binding systems interoperate, and the protected per-receiver EMM with
  /// the signed blob and a copy of LK. Returns the queued EMMs.
  /// Throws ConfigError for an unknown, revoked or unprovisioned receiver.
  std::vector<Bytes> enroll_receiver(std::size_t ca, EntityId receiver);

  /// New sender key pair (certified by `ttp` for protocol one), then Phase I
  /// again for every enrolled receiver. Returns the queued EMMs.
  std::vector<Bytes> rotate_sender_key(std::size_t ca, ttp::TrustedThirdParty* ttp);

  /// Queues an entitlement EMM. Throws ConfigError if not enrolled.
  void authorize(std::size_t ca, EntityId receiver, bool authorized);

  /// Protocol one only: queues the TTP revocation list for the chips.
  std::vector<Bytes> publish_revocation_list(std::size_t ca, const ttp::RevocationList& crl);

  /// One control-word period. With any hash-binding CA system the shared
  /// components draw r and K = h(pk set, r), otherwise K is drawn directly.
  /// Hash-binding systems put r in their ECM, all others put K. Pending EMMs
  /// ride on this frame. Throws ConfigError with no CA system configured.
  wire::BroadcastFrame epoch_tick(ByteView content);
  /// Drains pending EMMs into a frame with no ECM and no content, numbered
  /// with the upcoming epoch. Used for maintenance between periods.
  wire::BroadcastFrame emm_frame();

  std::size_t ca_count() const { return systems_.size(); }
  std::uint64_t next_epoch() const { return epoch_; }
  const std::vector<Bytes>& pk_set() const { return pk_set_; }
  const CaSystemConfig& config(std::size_t ca) const;
  const Bytes& sender_public_key(std::size_t ca) const;
  /// Protocol one systems only; the certificate is broadcast anyway.
  std::optional<ttp::Certificate> sender_certificate(std::size_t ca) const;
  std::optional<Bytes> long_term_key(std::size_t ca, EntityId receiver) const;
  bool is_enrolled(std::size_t ca, EntityId receiver) const;
  bool is_authorized(std::size_t ca, EntityId receiver) const;
  const std::set<EntityId>& authorized(std::size_t ca) const;

  // K and r of the last tick; r is empty without a hash-binding system.
  const binding::SharedSecret& last_control_word() const { return last_k_; }
  const Bytes& last_r() const { return last_r_; }

  // For the adversary harness: a compromise of the CA components.
  const crypto::KeyPair& leak_sender_key(std::size_t ca) const;

 private:
  struct CaSystem {
    CaSystemConfig config;
    crypto::KeyPair signing_key;
    std::variant<std::monostate, p1::Sender, p2::Sender> sender;
    Bytes trusted_pk_t;
    Bytes group_key;
    std::map<EntityId, Bytes> unique_keys;
    std::set<EntityId> enrolled;
    std::set<EntityId> authorized;
  };

  CaSystem& system(std::size_t ca);
  const CaSystem& system(std::size_t ca) const;
  void recompute_pk_set();
  std::size_t hash_binding_count() const;
  std::vector<Bytes> queue_phase_one(CaSystem& sys, EntityId receiver, bool with_broadcast);
  Bytes queue(const CaSystem& sys, wire::Emm emm);

  crypto::Suite suite_;
  Drbg rng_;
  std::vector<CaSystem> systems_;
  std::vector<Bytes> pk_set_;
  std::vector<Bytes> pending_emms_;
  std::uint64_t epoch_ = 0;
  binding::SharedSecret last_k_;
  Bytes last_r_;
};

}  // namespace paytv::headend
