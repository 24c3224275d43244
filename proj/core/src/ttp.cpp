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

#include "paytv/ttp.hpp"

#include <algorithm>
#include <string>

#include "paytv/codec.hpp"
#include "paytv/error.hpp"

namespace paytv::ttp {

namespace {
constexpr std::uint8_t kDirectoryMagic[] = {'P', 'T', 'V', 'D'};
constexpr std::uint8_t kStateMagic[] = {'P', 'T', 'V', 'S'};
constexpr std::uint8_t kFormatVersion = 1;

Role parse_role(std::uint8_t v, std::size_t offset) {
  if (v != static_cast<std::uint8_t>(Role::kSender) && v != static_cast<std::uint8_t>(Role::kReceiver))
    throw WireError("unknown certificate role " + std::to_string(v), offset);
  return static_cast<Role>(v);
}
}  // namespace

const char* to_string(Role role) { return role == Role::kSender ? "sender" : "receiver"; }

Bytes Certificate::tbs() const {
  return codec::Writer()
      .u64(serial)
      .u64(subject.value)
      .u8(static_cast<std::uint8_t>(role))
      .lp(subject_pk)
      .u32(generation)
      .bytes();
}

Bytes Certificate::serialize() const {
  return codec::Writer().raw(tbs()).lp(signature.serialize()).bytes();
}

Certificate Certificate::parse(ByteView data) {
  codec::Reader r(data);
  Certificate c;
  c.serial = r.u64();
  c.subject = EntityId{r.u64()};
  std::size_t role_at = r.offset();
  c.role = parse_role(r.u8(), role_at);
  c.subject_pk = r.lp();
  c.generation = r.u32();
  c.signature = crypto::SignedMessage::parse(r.lp());
  r.finish("certificate");
  return c;
}

Certificate issue_certificate(const crypto::Suite& suite, ByteView ttp_private_key, std::uint64_t serial,
                              EntityId subject, Role role, Bytes subject_pk, std::uint32_t generation) {
  Certificate c;
  c.serial = serial;
  c.subject = subject;
  c.role = role;
  c.subject_pk = std::move(subject_pk);
  c.generation = generation;
  c.signature = crypto::sign(suite, ttp_private_key, c.tbs());
  return c;
}

bool verify_certificate(const crypto::Suite& suite, const Certificate& cert, ByteView ttp_public_key) {
  try {
    return crypto::verify_recover(suite, ttp_public_key, cert.signature) == cert.tbs();
  } catch (const Error&) {
    return false;
  }
}

bool RevocationList::contains(std::uint64_t serial) const {
  return std::binary_search(serials.begin(), serials.end(), serial);
}

Bytes RevocationList::tbs() const {
  codec::Writer w;
  w.raw(to_bytes("CRL")).u32(generation).u32(static_cast<std::uint32_t>(serials.size()));
  for (auto s : serials) w.u64(s);
  return std::move(w).bytes();
}

Bytes RevocationList::serialize() const { return codec::Writer().raw(tbs()).lp(signature.serialize()).bytes(); }

RevocationList RevocationList::parse(ByteView data) {
  codec::Reader r(data);
  r.expect(to_bytes("CRL"), "revocation list tag");
  RevocationList crl;
  crl.generation = r.u32();
  std::uint32_t count = r.u32();
  if (count > r.remaining() / 8) throw WireError("revocation list count too large", r.offset() - 4);
  for (std::uint32_t i = 0; i < count; ++i) crl.serials.push_back(r.u64());
  crl.signature = crypto::SignedMessage::parse(r.lp());
  r.finish("revocation list");
  return crl;
}

bool verify_revocation_list(const crypto::Suite& suite, const RevocationList& crl, ByteView ttp_public_key) {
  try {
    return std::is_sorted(crl.serials.begin(), crl.serials.end()) &&
           crypto::verify_recover(suite, ttp_public_key, crl.signature) == crl.tbs();
  } catch (const Error&) {
    return false;
  }
}

const Bytes& Directory::current_public_key() const {
  if (ttp_public_keys.empty() || ttp_public_keys.size() != generation)
    throw ConfigError("directory has no key for its generation");
  return ttp_public_keys.back();
}

std::optional<Certificate> Directory::receiver_cert(EntityId id) const {
  std::optional<Certificate> found;
  for (const auto& c : receiver_certs) {
    if (c.subject == id && c.generation == generation) found = c;
  }
  return found;
}

void Directory::verify(const crypto::Suite& suite, ByteView trusted_pk_t) const {
  if (!equal_ct(current_public_key(), trusted_pk_t)) throw CryptoError("directory signed by an untrusted TTP key");
  if (!verify_revocation_list(suite, crl, trusted_pk_t)) throw CryptoError("revocation list signature invalid");
  for (const auto& c : receiver_certs) {
    if (c.generation == generation && !verify_certificate(suite, c, trusted_pk_t))
      throw CryptoError("receiver certificate " + std::to_string(c.serial) + " does not verify");
  }
}

Bytes Directory::serialize() const {
  codec::Writer w;
  w.raw(kDirectoryMagic).u8(kFormatVersion).u32(generation);
  w.u32(static_cast<std::uint32_t>(ttp_public_keys.size()));
  for (const auto& pk : ttp_public_keys) w.lp(pk);
  w.u32(static_cast<std::uint32_t>(receiver_certs.size()));
  for (const auto& c : receiver_certs) w.lp(c.serialize());
  w.u32(static_cast<std::uint32_t>(sender_certs.size()));
  for (const auto& c : sender_certs) w.lp(c.serialize());
  w.lp(crl.serialize());
  return std::move(w).bytes();
}

Directory Directory::parse(ByteView data) {
  codec::Reader r(data);
  r.expect(kDirectoryMagic, "directory magic");
  std::size_t version_at = r.offset();
  if (r.u8() != kFormatVersion) throw WireError("unsupported directory version", version_at);
  Directory d;
  d.generation = r.u32();
  auto count = [&r] {
    std::size_t at = r.offset();
    std::uint32_t n = r.u32();
    if (n > r.remaining() / 4) throw WireError("element count too large", at);
    return n;
  };
  for (std::uint32_t i = 0, n = count(); i < n; ++i) d.ttp_public_keys.push_back(r.lp());
  for (std::uint32_t i = 0, n = count(); i < n; ++i) d.receiver_certs.push_back(Certificate::parse(r.lp()));
  for (std::uint32_t i = 0, n = count(); i < n; ++i) d.sender_certs.push_back(Certificate::parse(r.lp()));
  d.crl = RevocationList::parse(r.lp());
  r.finish("directory");
  return d;
}

TrustedThirdParty::TrustedThirdParty(crypto::Suite suite, Drbg& rng) : suite_(std::move(suite)) {
  keypair_ = crypto::keygen(suite_, crypto::KeyPurpose::kSignature, rng);
  history_.push_back(keypair_.public_key);
  resign_crl();
}

Certificate TrustedThirdParty::issue(EntityId subject, Role role, Bytes pk) {
  Certificate c = issue_certificate(suite_, keypair_.private_key, next_serial_++, subject, role, std::move(pk),
                                    generation_);
  issued_.push_back(c);
  return c;
}

void TrustedThirdParty::resign_crl() {
  crl_.generation = generation_;
  crl_.signature = crypto::sign(suite_, keypair_.private_key, crl_.tbs());
}

Certificate TrustedThirdParty::register_receiver(EntityId id, Bytes pk_b) {
  if (registry_.contains(id)) throw ConfigError("receiver " + std::to_string(id.value) + " already registered");
  if (pk_b.size() != suite_.pke().public_key_size()) throw ConfigError("receiver public key has wrong length");
  registry_.emplace(id, pk_b);
  return issue(id, Role::kReceiver, std::move(pk_b));
}

Certificate TrustedThirdParty::certify_sender(EntityId id, Bytes pk_a) {
  if (pk_a.size() != suite_.sig().public_key_size()) throw ConfigError("sender public key has wrong length");
  for (const auto& c : issued_) {
    if (c.role == Role::kSender && c.subject == id && c.generation == generation_ && c.subject_pk == pk_a)
      throw ConfigError("sender key already certified in this generation");
  }
  ++sender_certifications_;
  return issue(id, Role::kSender, std::move(pk_a));
}

const RevocationList& TrustedThirdParty::revoke(std::uint64_t serial) {
  bool known = std::any_of(issued_.begin(), issued_.end(), [&](const Certificate& c) { return c.serial == serial; });
  if (!known) throw ConfigError("unknown certificate serial " + std::to_string(serial));
  if (!crl_.contains(serial)) {
    crl_.serials.insert(std::upper_bound(crl_.serials.begin(), crl_.serials.end(), serial), serial);
    resign_crl();
  }
  return crl_;
}

void TrustedThirdParty::rotate(Drbg& rng) {
  keypair_ = crypto::keygen(suite_, crypto::KeyPurpose::kSignature, rng);
  ++generation_;
  history_.push_back(keypair_.public_key);
  for (const auto& [id, pk] : registry_) issue(id, Role::kReceiver, pk);
  resign_crl();
}

Directory TrustedThirdParty::export_directory() const {
  Directory d;
  d.generation = generation_;
  d.ttp_public_keys = history_;
  for (const auto& c : issued_) (c.role == Role::kReceiver ? d.receiver_certs : d.sender_certs).push_back(c);
  d.crl = crl_;
  return d;
}

Bytes TrustedThirdParty::serialize_state() const {
  codec::Writer w;
  w.raw(kStateMagic).u8(kFormatVersion).u32(generation_).u64(next_serial_);
  w.lp(keypair_.private_key).lp(keypair_.public_key);
  w.u32(static_cast<std::uint32_t>(history_.size()));
  for (const auto& pk : history_) w.lp(pk);
  w.u32(static_cast<std::uint32_t>(registry_.size()));
  for (const auto& [id, pk] : registry_) w.u64(id.value).lp(pk);
  w.u32(static_cast<std::uint32_t>(issued_.size()));
  for (const auto& c : issued_) w.lp(c.serialize());
  w.lp(crl_.serialize());
  w.u64(sender_certifications_);
  return std::move(w).bytes();
}

TrustedThirdParty TrustedThirdParty::parse_state(crypto::Suite suite, ByteView data) {
  codec::Reader r(data);
  r.expect(kStateMagic, "TTP state magic");
  std::size_t version_at = r.offset();
  if (r.u8() != kFormatVersion) throw WireError("unsupported TTP state version", version_at);
  TrustedThirdParty t(std::move(suite));
  t.generation_ = r.u32();
  t.next_serial_ = r.u64();
  t.keypair_.private_key = r.lp();
  t.keypair_.public_key = r.lp();
  t.keypair_.purpose = crypto::KeyPurpose::kSignature;
  for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) t.history_.push_back(r.lp());
  for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
    EntityId id{r.u64()};
    t.registry_.emplace(id, r.lp());
  }
  for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) t.issued_.push_back(Certificate::parse(r.lp()));
  t.crl_ = RevocationList::parse(r.lp());
  t.sender_certifications_ = r.u64();
  r.finish("TTP state");
  if (!crypto::self_test(t.suite_, t.keypair_)) throw CryptoError("TTP state key pair is inconsistent");
  return t;
}

}  // namespace paytv::ttp
