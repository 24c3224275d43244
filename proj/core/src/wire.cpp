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

#include "paytv/wire.hpp"

#include <sstream>

#include "paytv/codec.hpp"
#include "paytv/error.hpp"
#include "paytv/ttp.hpp"

namespace paytv::wire {

namespace {
constexpr std::uint8_t kEmmMagic[] = {'E', 'M'};
constexpr std::uint8_t kEcmMagic[] = {'E', 'C'};
constexpr std::uint8_t kFrameMagic[] = {'F', 'R'};
constexpr std::uint8_t kCaptureMagic[] = {'P', 'T', 'V', 'C'};
constexpr std::uint8_t kDirectoryMagic[] = {'P', 'T', 'V', 'D'};

void expect_version(codec::Reader& r, const char* what) {
  std::size_t at = r.offset();
  std::uint8_t v = r.u8();
  if (v != kVersion) throw WireError(std::string("unsupported ") + what + " version " + std::to_string(v), at);
}

EmmKind parse_kind(std::uint8_t v, std::size_t offset) {
  if (v < static_cast<std::uint8_t>(EmmKind::kBroadcastSenderPk) || v > static_cast<std::uint8_t>(EmmKind::kEntitlement))
    throw WireError("unknown EMM kind " + std::to_string(v), offset);
  return static_cast<EmmKind>(v);
}

Bytes emm_header(std::uint16_t ca, EmmKind kind, EntityId addressee) {
  return codec::Writer().raw(kEmmMagic).u8(kVersion).u16(ca).u8(static_cast<std::uint8_t>(kind)).u64(addressee.value).bytes();
}

Bytes ecm_header(std::uint16_t ca, std::uint64_t epoch) {
  return codec::Writer().raw(kEcmMagic).u8(kVersion).u16(ca).u64(epoch).bytes();
}

std::uint32_t read_count(codec::Reader& r, std::size_t min_element) {
  std::size_t at = r.offset();
  std::uint32_t n = r.u32();
  if (n > r.remaining() / min_element) throw WireError("element count " + std::to_string(n) + " too large", at);
  return n;
}

bool starts_with(ByteView data, ByteView magic) {
  return data.size() >= magic.size() && std::equal(magic.begin(), magic.end(), data.begin());
}
}  // namespace

const char* to_string(EmmKind kind) {
  switch (kind) {
    case EmmKind::kBroadcastSenderPk: return "broadcast_sender_pk";
    case EmmKind::kBroadcastCert: return "broadcast_cert";
    case EmmKind::kPerReceiverEnroll: return "per_receiver_enroll";
    case EmmKind::kPkSetUpdate: return "pk_set_update";
    case EmmKind::kCrlUpdate: return "crl_update";
    case EmmKind::kEntitlement: return "entitlement";
  }
  return "unknown";
}

bool is_confidential(EmmKind kind) {
  return kind == EmmKind::kPerReceiverEnroll || kind == EmmKind::kEntitlement;
}

Bytes protect(const crypto::Suite& suite, ByteView key, ByteView plaintext, ByteView aad) {
  return crypto::sym_encrypt(suite, key, plaintext, aad);
}

Bytes unprotect(const crypto::Suite& suite, ByteView key, ByteView sealed, ByteView aad) {
  return crypto::sym_decrypt(suite, key, sealed, aad);
}

Bytes SealedEmm::header() const { return emm_header(ca_system_id, kind, addressee); }

Bytes emm_encode(const crypto::Suite& suite, const Emm& emm, ByteView key) {
  const bool confidential = is_confidential(emm.kind);
  if (confidential && emm.addressee == kBroadcastId) throw ConfigError("per-receiver EMM needs an addressee");
  if (!confidential && emm.addressee != kBroadcastId) throw ConfigError("broadcast EMM must be addressed to all");
  Bytes header = emm_header(emm.ca_system_id, emm.kind, emm.addressee);
  Bytes clear = confidential ? Bytes{} : emm.payload;
  Bytes aad = concat(header, clear);
  Bytes sealed = protect(suite, key, confidential ? ByteView(emm.payload) : ByteView{}, aad);
  return codec::Writer().raw(header).lp(clear).lp(sealed).bytes();
}

SealedEmm emm_parse(ByteView data) {
  codec::Reader r(data);
  r.expect(kEmmMagic, "EMM magic");
  expect_version(r, "EMM");
  SealedEmm s;
  s.ca_system_id = r.u16();
  std::size_t kind_at = r.offset();
  s.kind = parse_kind(r.u8(), kind_at);
  s.addressee = EntityId{r.u64()};
  std::size_t body_at = r.offset();
  s.clear_body = r.lp();
  if (is_confidential(s.kind) && !s.clear_body.empty())
    throw WireError("confidential EMM carries a clear body", body_at);
  s.sealed = r.lp();
  r.finish("EMM");
  return s;
}

Emm emm_open(const crypto::Suite& suite, const SealedEmm& s, ByteView key) {
  Bytes opened = unprotect(suite, key, s.sealed, concat(s.header(), s.clear_body));
  Emm emm{s.ca_system_id, s.kind, s.addressee, {}};
  if (is_confidential(s.kind)) {
    emm.payload = std::move(opened);
  } else {
    if (!opened.empty()) throw CryptoError("broadcast EMM seal carries data");
    emm.payload = s.clear_body;
  }
  return emm;
}

Emm emm_decode(const crypto::Suite& suite, ByteView data, ByteView key) {
  return emm_open(suite, emm_parse(data), key);
}

Bytes SealedEcm::header() const { return ecm_header(ca_system_id, epoch); }

Bytes ecm_encode(const crypto::Suite& suite, const Ecm& ecm, ByteView group_key) {
  if (ecm.secret.size() != suite.secret_bytes()) throw ConfigError("ECM secret must be exactly n bits");
  Bytes header = ecm_header(ecm.ca_system_id, ecm.epoch);
  return codec::Writer().raw(header).lp(protect(suite, group_key, ecm.secret, header)).bytes();
}

SealedEcm ecm_parse(ByteView data) {
  codec::Reader r(data);
  r.expect(kEcmMagic, "ECM magic");
  expect_version(r, "ECM");
  SealedEcm s;
  s.ca_system_id = r.u16();
  s.epoch = r.u64();
  s.sealed = r.lp();
  r.finish("ECM");
  return s;
}

Ecm ecm_open(const crypto::Suite& suite, const SealedEcm& s, ByteView group_key) {
  Ecm ecm{s.ca_system_id, s.epoch, unprotect(suite, group_key, s.sealed, s.header())};
  if (ecm.secret.size() != suite.secret_bytes()) throw CryptoError("ECM secret has wrong length");
  return ecm;
}

Ecm ecm_decode(const crypto::Suite& suite, ByteView data, ByteView group_key) {
  return ecm_open(suite, ecm_parse(data), group_key);
}

Bytes EnrollPayload::encode() const { return codec::Writer().lp(signed_blob.serialize()).lp(ltk_copy).bytes(); }

EnrollPayload EnrollPayload::decode(ByteView data) {
  codec::Reader r(data);
  EnrollPayload p;
  p.signed_blob = crypto::SignedMessage::parse(r.lp());
  p.ltk_copy = r.lp();
  r.finish("enroll payload");
  return p;
}

Bytes encode_key_payload(ByteView key) { return codec::length_prefixed(key); }

Bytes decode_key_payload(ByteView data) {
  codec::Reader r(data);
  Bytes key = r.lp();
  r.finish("key payload");
  return key;
}

Bytes encode_key_set(const std::vector<Bytes>& keys) {
  codec::Writer w;
  w.u32(static_cast<std::uint32_t>(keys.size()));
  for (const auto& k : keys) w.lp(k);
  return std::move(w).bytes();
}

std::vector<Bytes> decode_key_set(ByteView data) {
  codec::Reader r(data);
  std::vector<Bytes> keys;
  for (std::uint32_t i = 0, n = read_count(r, 4); i < n; ++i) keys.push_back(r.lp());
  r.finish("key set");
  return keys;
}

Bytes encode_entitlement(bool authorized) { return Bytes{static_cast<std::uint8_t>(authorized ? 1 : 0)}; }

bool decode_entitlement(ByteView data) {
  if (data.size() != 1 || data[0] > 1) throw WireError("bad entitlement payload", 0);
  return data[0] == 1;
}

Bytes BroadcastFrame::serialize() const {
  codec::Writer w;
  w.raw(kFrameMagic).u8(kVersion).u64(epoch).lp(scrambled_content);
  w.u32(static_cast<std::uint32_t>(ecms.size()));
  for (const auto& e : ecms) w.lp(e);
  w.u32(static_cast<std::uint32_t>(emms.size()));
  for (const auto& e : emms) w.lp(e);
  return std::move(w).bytes();
}

BroadcastFrame BroadcastFrame::parse(ByteView data) {
  codec::Reader r(data);
  r.expect(kFrameMagic, "frame magic");
  expect_version(r, "frame");
  BroadcastFrame f;
  f.epoch = r.u64();
  f.scrambled_content = r.lp();
  for (std::uint32_t i = 0, n = read_count(r, 4); i < n; ++i) f.ecms.push_back(r.lp());
  for (std::uint32_t i = 0, n = read_count(r, 4); i < n; ++i) f.emms.push_back(r.lp());
  r.finish("frame");
  return f;
}

Bytes encode_capture(const std::vector<BroadcastFrame>& frames) {
  codec::Writer w;
  w.raw(kCaptureMagic).u8(kVersion);
  for (const auto& f : frames) w.lp(f.serialize());
  return std::move(w).bytes();
}

std::vector<BroadcastFrame> decode_capture(ByteView data) {
  codec::Reader r(data);
  r.expect(kCaptureMagic, "capture magic");
  expect_version(r, "capture");
  std::vector<BroadcastFrame> frames;
  while (!r.done()) {
    std::size_t at = r.offset();
    Bytes raw = r.lp();
    try {
      frames.push_back(BroadcastFrame::parse(raw));
    } catch (const WireError& e) {
      throw WireError(std::string("bad frame: ") + e.what(), at + 4 + e.offset());
    }
  }
  return frames;
}

FileKind sniff(ByteView data) {
  if (starts_with(data, kCaptureMagic)) return FileKind::kCapture;
  if (starts_with(data, kDirectoryMagic)) return FileKind::kDirectory;
  if (starts_with(data, kEmmMagic)) return FileKind::kEmm;
  if (starts_with(data, kEcmMagic)) return FileKind::kEcm;
  if (starts_with(data, kFrameMagic)) return FileKind::kFrame;
  return FileKind::kUnknown;
}

namespace {
void describe_emm(std::ostream& os, const SealedEmm& s, const std::string& indent) {
  os << indent << "emm ca_system_id=" << s.ca_system_id << " kind=" << to_string(s.kind) << " addressee=";
  if (s.addressee == kBroadcastId)
    os << "broadcast";
  else
    os << s.addressee.value;
  os << " clear_body=" << s.clear_body.size() << "B sealed=" << s.sealed.size() << "B\n";
}

void describe_ecm(std::ostream& os, const SealedEcm& s, const std::string& indent) {
  os << indent << "ecm ca_system_id=" << s.ca_system_id << " epoch=" << s.epoch << " sealed=" << s.sealed.size()
     << "B\n";
}

void describe_frame(std::ostream& os, const BroadcastFrame& f) {
  os << "frame epoch=" << f.epoch << " content=" << f.scrambled_content.size() << "B ecms=" << f.ecms.size()
     << " emms=" << f.emms.size() << "\n";
  for (const auto& e : f.ecms) describe_ecm(os, ecm_parse(e), "  ");
  for (const auto& e : f.emms) describe_emm(os, emm_parse(e), "  ");
}
}  // namespace

std::string describe(ByteView data) {
  std::ostringstream os;
  switch (sniff(data)) {
    case FileKind::kEmm: describe_emm(os, emm_parse(data), ""); break;
    case FileKind::kEcm: describe_ecm(os, ecm_parse(data), ""); break;
    case FileKind::kFrame: describe_frame(os, BroadcastFrame::parse(data)); break;
    case FileKind::kCapture: {
      auto frames = decode_capture(data);
      os << "capture frames=" << frames.size() << "\n";
      for (const auto& f : frames) describe_frame(os, f);
      break;
    }
    case FileKind::kDirectory: {
      auto d = ttp::Directory::parse(data);
      os << "directory generation=" << d.generation << " ttp_keys=" << d.ttp_public_keys.size()
         << " receiver_certs=" << d.receiver_certs.size() << " sender_certs=" << d.sender_certs.size()
         << " revoked=" << d.crl.serials.size() << "\n";
      for (const auto& c : d.receiver_certs)
        os << "  cert serial=" << c.serial << " role=receiver subject=" << c.subject.value
           << " generation=" << c.generation << " pk=" << to_hex(c.subject_pk) << "\n";
      for (const auto& c : d.sender_certs)
        os << "  cert serial=" << c.serial << " role=sender subject=" << c.subject.value
           << " generation=" << c.generation << " pk=" << to_hex(c.subject_pk) << "\n";
      break;
    }
    case FileKind::kUnknown: throw WireError("unrecognized magic", 0);
  }
  return os.str();
}

}  // namespace paytv::wire
