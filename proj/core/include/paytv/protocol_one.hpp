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

// Certificate-based key establishment. Phase I transports a per-receiver
// long-term key LK under the sender's TTP certificate; Phase II transports
// the shared secret K as e_LK(K). Receivers are initialized with PK_T, which
// can never change afterwards.

#include <map>
#include <optional>

#include "paytv/binding.hpp"
#include "paytv/bytes.hpp"
#include "paytv/crypto.hpp"
#include "paytv/drbg.hpp"
#include "paytv/ttp.hpp"

namespace paytv::p1 {

/// What the sender hands to receiver B: the sender certificate
/// S_SKT(A, PK_A) and the signed blob S_SKA(B, E_PKB(LK_B)).
struct Phase1Bundle {
  ttp::Certificate sender_cert;
  crypto::SignedMessage signed_blob;

  Bytes serialize() const;
  static Phase1Bundle parse(ByteView data);
  friend bool operator==(const Phase1Bundle&, const Phase1Bundle&) = default;
};

class Sender {
 public:
  Sender(crypto::Suite suite, EntityId id, crypto::KeyPair signing_key, ttp::Certificate certificate);

  /// Generates a signature key pair and has the TTP certify it.
  static Sender create(crypto::Suite suite, EntityId id, ttp::TrustedThirdParty& ttp, Drbg& rng);

  /// Replaces the receiver database with the non-revoked receivers of a
  /// directory whose key matches `trusted_pk_t`. Throws CryptoError otherwise.
  void load_directory(const ttp::Directory& directory, ByteView trusted_pk_t);

  /// Steps 3a-3d for one receiver: fresh LK, E_PKB(LK), signature.
  /// Throws ConfigError for an unknown or revoked receiver.
  Phase1Bundle phase1(EntityId receiver, Drbg& rng);

  /// e_LK(K) for a receiver that completed Phase I. Throws ConfigError otherwise.
  Bytes phase2(EntityId receiver, const binding::SharedSecret& k) const;

  /// Installs a new key pair and certificate; previously issued LKs are dropped.
  void rekey(crypto::KeyPair signing_key, ttp::Certificate certificate);

  EntityId id() const { return id_; }
  const Bytes& public_key() const { return signing_key_.public_key; }
  const ttp::Certificate& certificate() const { return certificate_; }
  std::optional<Bytes> long_term_key(EntityId receiver) const;
  bool knows_receiver(EntityId receiver) const { return directory_.contains(receiver); }

 private:
  struct ReceiverEntry {
    Bytes public_key;
    bool revoked = false;
  };

  crypto::Suite suite_;
  EntityId id_;
  crypto::KeyPair signing_key_;
  ttp::Certificate certificate_;
  std::map<EntityId, ReceiverEntry> directory_;
  std::map<EntityId, Bytes> ltk_store_;
};

class Receiver {
 public:
  Receiver(crypto::Suite suite, EntityId id, Bytes trusted_pk_t, Bytes private_key);

  /// Steps 3e-3f. Verifies the certificate under the installed PK_T and
  /// against the local revocation list, recovers PK_A, verifies the blob,
  /// checks the recipient and decrypts LK. Throws ProtocolAbort and leaves
  /// the state unchanged if any check fails.
  void phase1(const Phase1Bundle& bundle);

  /// Step 4c: K = d_LK(ct). Throws ProtocolAbort.
  binding::SharedSecret phase2(ByteView ciphertext) const;

  /// Accepts a revocation list only if it verifies under the installed PK_T.
  void apply_revocation_list(const ttp::RevocationList& crl);

  EntityId id() const { return id_; }
  const Bytes& trusted_ttp_key() const { return pk_t_; }
  bool has_long_term_key() const { return ltk_.has_value(); }

  friend bool operator==(const Receiver& a, const Receiver& b) {
    return a.id_ == b.id_ && a.pk_t_ == b.pk_t_ && a.sk_ == b.sk_ && a.ltk_ == b.ltk_ && a.revoked_ == b.revoked_;
  }

 private:
  crypto::Suite suite_;
  EntityId id_;
  Bytes pk_t_;
  Bytes sk_;
  std::optional<Bytes> ltk_;
  std::vector<std::uint64_t> revoked_;
};

}  // namespace paytv::p1
