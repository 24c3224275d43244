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

// Hash-binding key establishment. Phase I sends the bare sender public key
// with S_SKA(B, E_PKB(LK_B)); no certificate and no TTP key on the receiver.
// Phase II transports a random r as e_LK(r) and both ends compute
// K = h(PK set, r), which ties K to the sender key(s).

#include <map>
#include <optional>
#include <vector>

#include "paytv/binding.hpp"
#include "paytv/bytes.hpp"
#include "paytv/crypto.hpp"
#include "paytv/drbg.hpp"
#include "paytv/ttp.hpp"

namespace paytv::p2 {

struct Phase1Bundle {
  Bytes sender_pk;
  crypto::SignedMessage signed_blob;

  Bytes serialize() const;
  static Phase1Bundle parse(ByteView data);
  friend bool operator==(const Phase1Bundle&, const Phase1Bundle&) = default;
};

/// Output of the shared head-end components for one Phase II run.
struct SharedDraw {
  Bytes r;
  binding::SharedSecret k;
};

/// Steps 3-4: fresh n-bit r and K = derive_k({pk_set, r}, n). `pk_set` must
/// already be a canonical key set.
SharedDraw phase2_shared(const crypto::Suite& suite, const std::vector<Bytes>& pk_set, Drbg& rng);

class Sender {
 public:
  Sender(crypto::Suite suite, EntityId id, crypto::KeyPair signing_key);

  /// Loads the non-revoked receiver public keys from a TTP directory whose
  /// current key equals `trusted_pk_t`.
  void load_directory(const ttp::Directory& directory, ByteView trusted_pk_t);

  /// Steps 2a-2d. Throws ConfigError for an unknown or revoked receiver.
  Phase1Bundle phase1(EntityId receiver, Drbg& rng);

  /// Steps 5a-5b: e_LK(r). Throws ConfigError if the receiver has no LK.
  Bytes phase2(EntityId receiver, ByteView r) const;

  /// New key pair; previously issued LKs are dropped.
  void rekey(crypto::KeyPair signing_key);

  EntityId id() const { return id_; }
  const Bytes& public_key() const { return signing_key_.public_key; }
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
  std::map<EntityId, ReceiverEntry> directory_;
  std::map<EntityId, Bytes> ltk_store_;
};

/// Receiver B. Initialized with SK_B only.
class Receiver {
 public:
  Receiver(crypto::Suite suite, EntityId id, Bytes private_key);

  /// Steps 2e-2f. Stores LK under the delivered PK_A, replacing an earlier
  /// LK for the same key. Throws ProtocolAbort leaving state unchanged.
  void phase1(const Phase1Bundle& bundle);

  /// Sets the sorted sender key list used as h input. With an empty set the
  /// sender key named in phase2() is used alone.
  void set_active_keys(std::vector<Bytes> pk_set);

  /// Steps 5c-5d: r = d_LK(ct), K = h(active set, r). Throws ProtocolAbort
  /// when no LK is stored for `sender_pk`, when `sender_pk` is outside a
  /// non-empty active set, or when decryption fails.
  binding::SharedSecret phase2(ByteView sender_pk, ByteView ciphertext) const;

  EntityId id() const { return id_; }
  bool has_long_term_key(ByteView sender_pk) const;
  const std::vector<Bytes>& active_keys() const { return active_; }

  friend bool operator==(const Receiver& a, const Receiver& b) {
    return a.id_ == b.id_ && a.sk_ == b.sk_ && a.ltk_by_sender_ == b.ltk_by_sender_ && a.active_ == b.active_;
  }

 private:
  crypto::Suite suite_;
  EntityId id_;
  Bytes sk_;
  std::map<Bytes, Bytes> ltk_by_sender_;
  std::vector<Bytes> active_;
};

}  // namespace paytv::p2
