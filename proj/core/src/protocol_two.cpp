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

#include "paytv/protocol_two.hpp"

#include <algorithm>
#include <string>

#include "paytv/codec.hpp"
#include "paytv/error.hpp"
#include "transport.hpp"

namespace paytv::p2 {

Bytes Phase1Bundle::serialize() const {
  return codec::Writer().lp(sender_pk).lp(signed_blob.serialize()).bytes();
}

Phase1Bundle Phase1Bundle::parse(ByteView data) {
  codec::Reader r(data);
  Phase1Bundle b;
  b.sender_pk = r.lp();
  b.signed_blob = crypto::SignedMessage::parse(r.lp());
  r.finish("protocol two bundle");
  return b;
}

SharedDraw phase2_shared(const crypto::Suite& suite, const std::vector<Bytes>& pk_set, Drbg& rng) {
  SharedDraw draw;
  draw.r = rng.generate(suite.secret_bytes());
  draw.k = binding::derive_k(binding::HInput{pk_set, draw.r}, suite.secret_bits());
  return draw;
}

Sender::Sender(crypto::Suite suite, EntityId id, crypto::KeyPair signing_key)
    : suite_(std::move(suite)), id_(id), signing_key_(std::move(signing_key)) {
  if (signing_key_.purpose != crypto::KeyPurpose::kSignature) throw ConfigError("sender needs a signature key");
}

void Sender::load_directory(const ttp::Directory& directory, ByteView trusted_pk_t) {
  directory.verify(suite_, trusted_pk_t);
  std::map<EntityId, ReceiverEntry> entries;
  for (const auto& c : directory.receiver_certs) {
    if (c.generation != directory.generation) continue;
    entries[c.subject] = ReceiverEntry{c.subject_pk, directory.crl.contains(c.serial)};
  }
  directory_ = std::move(entries);
}

Phase1Bundle Sender::phase1(EntityId receiver, Drbg& rng) {
  auto it = directory_.find(receiver);
  if (it == directory_.end()) throw ConfigError("unknown receiver " + std::to_string(receiver.value));
  if (it->second.revoked) throw ConfigError("receiver " + std::to_string(receiver.value) + " is revoked");

  Bytes ltk = rng.generate(suite_.secret_bytes());
  Phase1Bundle bundle{signing_key_.public_key,
                      transport::seal_long_term_key(suite_, signing_key_.private_key, receiver,
                                                    it->second.public_key, ltk, rng)};
  ltk_store_[receiver] = std::move(ltk);
  return bundle;
}

Bytes Sender::phase2(EntityId receiver, ByteView r) const {
  auto it = ltk_store_.find(receiver);
  if (it == ltk_store_.end())
    throw ConfigError("receiver " + std::to_string(receiver.value) + " is not enrolled");
  return crypto::sym_encrypt(suite_, it->second, r);
}

void Sender::rekey(crypto::KeyPair signing_key) {
  if (signing_key.purpose != crypto::KeyPurpose::kSignature) throw ConfigError("sender needs a signature key");
  signing_key_ = std::move(signing_key);
  ltk_store_.clear();
}

std::optional<Bytes> Sender::long_term_key(EntityId receiver) const {
  auto it = ltk_store_.find(receiver);
  if (it == ltk_store_.end()) return std::nullopt;
  return it->second;
}

Receiver::Receiver(crypto::Suite suite, EntityId id, Bytes private_key)
    : suite_(std::move(suite)), id_(id), sk_(std::move(private_key)) {}

void Receiver::phase1(const Phase1Bundle& bundle) {
  if (bundle.sender_pk.size() != suite_.sig().public_key_size())
    throw ProtocolAbort(AbortReason::kMalformedMessage, "sender public key has wrong length");
  Bytes ltk = transport::open_long_term_key(suite_, bundle.sender_pk, bundle.signed_blob, id_, sk_);
  ltk_by_sender_[bundle.sender_pk] = std::move(ltk);
}

void Receiver::set_active_keys(std::vector<Bytes> pk_set) {
  for (const auto& pk : pk_set) {
    if (pk.size() != suite_.sig().public_key_size())
      throw ProtocolAbort(AbortReason::kMalformedMessage, "active key has wrong length");
  }
  active_ = binding::canonical_key_set(std::move(pk_set));
}

binding::SharedSecret Receiver::phase2(ByteView sender_pk, ByteView ciphertext) const {
  Bytes pk(sender_pk.begin(), sender_pk.end());
  auto it = ltk_by_sender_.find(pk);
  if (it == ltk_by_sender_.end())
    throw ProtocolAbort(AbortReason::kNoLongTermKey, "no long-term key for this sender key");
  if (!active_.empty() && !std::binary_search(active_.begin(), active_.end(), pk))
    throw ProtocolAbort(AbortReason::kUnknownSender, "sender key is not in the active set");

  Bytes r;
  try {
    r = crypto::sym_decrypt(suite_, it->second, ciphertext);
  } catch (const CryptoError& e) {
    throw ProtocolAbort(AbortReason::kDecryptionFailure, e.what());
  }
  if (r.size() != suite_.secret_bytes()) throw ProtocolAbort(AbortReason::kMalformedMessage, "r has wrong length");

  std::vector<Bytes> keys = active_.empty() ? std::vector<Bytes>{pk} : active_;
  return binding::derive_k(binding::HInput{std::move(keys), std::move(r)}, suite_.secret_bits());
}

bool Receiver::has_long_term_key(ByteView sender_pk) const {
  return ltk_by_sender_.contains(Bytes(sender_pk.begin(), sender_pk.end()));
}

}  // namespace paytv::p2
