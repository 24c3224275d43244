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

#include "paytv/protocol_one.hpp"

#include <algorithm>
#include <string>

#include "paytv/codec.hpp"
#include "paytv/error.hpp"
#include "transport.hpp"

namespace paytv::p1 {

Bytes Phase1Bundle::serialize() const {
  return codec::Writer().lp(sender_cert.serialize()).lp(signed_blob.serialize()).bytes();
}

Phase1Bundle Phase1Bundle::parse(ByteView data) {
  codec::Reader r(data);
  Phase1Bundle b;
  b.sender_cert = ttp::Certificate::parse(r.lp());
  b.signed_blob = crypto::SignedMessage::parse(r.lp());
  r.finish("protocol one bundle");
  return b;
}

Sender::Sender(crypto::Suite suite, EntityId id, crypto::KeyPair signing_key, ttp::Certificate certificate)
    : suite_(std::move(suite)), id_(id), signing_key_(std::move(signing_key)), certificate_(std::move(certificate)) {
  if (certificate_.subject_pk != signing_key_.public_key || certificate_.role != ttp::Role::kSender ||
      certificate_.subject != id_)
    throw ConfigError("sender certificate does not bind this sender's key");
}

Sender Sender::create(crypto::Suite suite, EntityId id, ttp::TrustedThirdParty& ttp, Drbg& rng) {
  crypto::KeyPair key = crypto::keygen(suite, crypto::KeyPurpose::kSignature, rng);
  ttp::Certificate cert = ttp.certify_sender(id, key.public_key);
  return Sender(std::move(suite), id, std::move(key), std::move(cert));
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
  Phase1Bundle bundle{certificate_,
                      transport::seal_long_term_key(suite_, signing_key_.private_key, receiver,
                                                    it->second.public_key, ltk, rng)};
  ltk_store_[receiver] = std::move(ltk);
  return bundle;
}

Bytes Sender::phase2(EntityId receiver, const binding::SharedSecret& k) const {
  auto it = ltk_store_.find(receiver);
  if (it == ltk_store_.end())
    throw ConfigError("no long-term key for receiver " + std::to_string(receiver.value));
  return crypto::sym_encrypt(suite_, it->second, k.k);
}

void Sender::rekey(crypto::KeyPair signing_key, ttp::Certificate certificate) {
  if (certificate.subject_pk != signing_key.public_key || certificate.role != ttp::Role::kSender ||
      certificate.subject != id_)
    throw ConfigError("sender certificate does not bind the new key");
  signing_key_ = std::move(signing_key);
  certificate_ = std::move(certificate);
  ltk_store_.clear();
}

std::optional<Bytes> Sender::long_term_key(EntityId receiver) const {
  auto it = ltk_store_.find(receiver);
  if (it == ltk_store_.end()) return std::nullopt;
  return it->second;
}

Receiver::Receiver(crypto::Suite suite, EntityId id, Bytes trusted_pk_t, Bytes private_key)
    : suite_(std::move(suite)), id_(id), pk_t_(std::move(trusted_pk_t)), sk_(std::move(private_key)) {}

void Receiver::phase1(const Phase1Bundle& bundle) {
  const ttp::Certificate& cert = bundle.sender_cert;
  if (!ttp::verify_certificate(suite_, cert, pk_t_))
    throw ProtocolAbort(AbortReason::kBadCertificate, "sender certificate does not verify under PK_T");
  if (cert.role != ttp::Role::kSender)
    throw ProtocolAbort(AbortReason::kBadCertificate, "certificate is not a sender certificate");
  if (std::binary_search(revoked_.begin(), revoked_.end(), cert.serial))
    throw ProtocolAbort(AbortReason::kRevokedCertificate, "sender certificate is revoked");

  ltk_ = transport::open_long_term_key(suite_, cert.subject_pk, bundle.signed_blob, id_, sk_);
}

binding::SharedSecret Receiver::phase2(ByteView ciphertext) const {
  if (!ltk_) throw ProtocolAbort(AbortReason::kNoLongTermKey, "phase I has not completed");
  try {
    Bytes k = crypto::sym_decrypt(suite_, *ltk_, ciphertext);
    if (k.size() != suite_.secret_bytes())
      throw ProtocolAbort(AbortReason::kMalformedMessage, "shared secret has wrong length");
    return binding::SharedSecret{std::move(k)};
  } catch (const CryptoError& e) {
    throw ProtocolAbort(AbortReason::kDecryptionFailure, e.what());
  }
}

void Receiver::apply_revocation_list(const ttp::RevocationList& crl) {
  if (!ttp::verify_revocation_list(suite_, crl, pk_t_))
    throw ProtocolAbort(AbortReason::kBadSignature, "revocation list does not verify under PK_T");
  std::vector<std::uint64_t> merged;
  std::set_union(revoked_.begin(), revoked_.end(), crl.serials.begin(), crl.serials.end(),
                 std::back_inserter(merged));
  revoked_ = std::move(merged);
}

}  // namespace paytv::p1
