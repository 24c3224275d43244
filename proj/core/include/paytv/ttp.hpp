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
#include <map>
#include <optional>
#include <vector>

#include "paytv/bytes.hpp"
#include "paytv/crypto.hpp"
#include "paytv/drbg.hpp"

namespace paytv::ttp {

enum class Role : std::uint8_t { kSender = 1, kReceiver = 2 };

const char* to_string(Role role);

/// Binding of an identity to a public key, signed by the TTP key of
/// `generation`. The signature carries exactly tbs().
struct Certificate {
  std::uint64_t serial = 0;
  EntityId subject;
  Role role = Role::kReceiver;
  Bytes subject_pk;
  std::uint32_t generation = 0;
  crypto::SignedMessage signature;

  // serial || subject || role || lp(subject_pk) || generation
  Bytes tbs() const;
  Bytes serialize() const;
  static Certificate parse(ByteView data);
  friend bool operator==(const Certificate&, const Certificate&) = default;
};

Certificate issue_certificate(const crypto::Suite& suite, ByteView ttp_private_key, std::uint64_t serial,
                              EntityId subject, Role role, Bytes subject_pk, std::uint32_t generation);

/// True iff the signature verifies under `ttp_public_key` and the recovered
/// tuple equals the certificate fields.
bool verify_certificate(const crypto::Suite& suite, const Certificate& cert, ByteView ttp_public_key);

/// Signed list of revoked certificate serials.
struct RevocationList {
  std::uint32_t generation = 0;
  std::vector<std::uint64_t> serials;  // ascending
  crypto::SignedMessage signature;

  bool contains(std::uint64_t serial) const;
  Bytes tbs() const;
  Bytes serialize() const;
  static RevocationList parse(ByteView data);
  friend bool operator==(const RevocationList&, const RevocationList&) = default;
};

bool verify_revocation_list(const crypto::Suite& suite, const RevocationList& crl, ByteView ttp_public_key);

/// Immutable snapshot of the TTP's public state consumed by head-ends.
///
/// Wire layout (all integers big-endian, lp = 4-byte length prefix):
///   "PTVD" | u8 version=1 | u32 generation
///   | u32 count | count x lp(PK_T of generation 1..count)
///   | u32 count | count x lp(receiver certificate)
///   | u32 count | count x lp(sender certificate)
///   | lp(revocation list)
struct Directory {
  std::uint32_t generation = 0;
  std::vector<Bytes> ttp_public_keys;
  std::vector<Certificate> receiver_certs;
  std::vector<Certificate> sender_certs;
  RevocationList crl;

  const Bytes& current_public_key() const;
  // Latest receiver certificate for `id` issued under the current generation.
  std::optional<Certificate> receiver_cert(EntityId id) const;

  // Throws CryptoError unless the CRL and every current-generation receiver
  // certificate verify under `trusted_pk_t`, which must be the current key.
  void verify(const crypto::Suite& suite, ByteView trusted_pk_t) const;

  Bytes serialize() const;
  static Directory parse(ByteView data);
};

/// Trusted third party: certifies receiver and sender public keys, keeps the
/// CRL and can rotate its own key pair. It only ever holds receiver public
/// keys, so rotation never touches anything a chip was initialized with.
class TrustedThirdParty {
 public:
  TrustedThirdParty(crypto::Suite suite, Drbg& rng);

  const Bytes& public_key() const { return keypair_.public_key; }
  std::uint32_t generation() const { return generation_; }

  // Throws ConfigError for an already registered id.
  Certificate register_receiver(EntityId id, Bytes pk_b);
  // Throws ConfigError if the same (id, key) was already certified in this
  // generation. A new key for a known sender gets a new certificate.
  Certificate certify_sender(EntityId id, Bytes pk_a);
  // Idempotent. Throws ConfigError for a serial that was never issued.
  const RevocationList& revoke(std::uint64_t serial);
  bool is_revoked(std::uint64_t serial) const { return crl_.contains(serial); }

  // New (SK_T, PK_T), generation + 1, receiver certificates re-issued under
  // the new key. Sender certificates are not carried over.
  void rotate(Drbg& rng);

  Directory export_directory() const;

  const std::map<EntityId, Bytes>& receiver_registry() const { return registry_; }
  const std::vector<Certificate>& issued() const { return issued_; }
  const RevocationList& crl() const { return crl_; }
  const std::vector<Bytes>& public_key_history() const { return history_; }

  // Number of certify_sender calls served; head-end tests use it to show which
  // protocol needs the TTP online.
  std::size_t sender_certifications() const { return sender_certifications_; }

  // Hands out SK_T; exists so the adversary harness can model a compromise.
  const crypto::KeyPair& leak_signing_key() const { return keypair_; }

  // Full state including SK_T, for the command-line tool.
  Bytes serialize_state() const;
  static TrustedThirdParty parse_state(crypto::Suite suite, ByteView data);

 private:
  TrustedThirdParty(crypto::Suite suite) : suite_(std::move(suite)) {}
  Certificate issue(EntityId subject, Role role, Bytes pk);
  void resign_crl();

  crypto::Suite suite_;
  crypto::KeyPair keypair_;
  std::uint32_t generation_ = 1;
  std::uint64_t next_serial_ = 1;
  std::vector<Bytes> history_;
  std::map<EntityId, Bytes> registry_;
  std::vector<Certificate> issued_;
  RevocationList crl_;
  std::size_t sender_certifications_ = 0;
};

}  // namespace paytv::ttp
