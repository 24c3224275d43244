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

#include "paytv/headend.hpp"

#include <algorithm>
#include <string>

#include "paytv/error.hpp"
#include "paytv/scrambler.hpp"

namespace paytv::headend {

const char* to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kProtocolOne: return "p1";
    case ProtocolKind::kProtocolTwo: return "p2";
    case ProtocolKind::kLegacy: return "legacy";
  }
  return "unknown";
}

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "p1") return ProtocolKind::kProtocolOne;
  if (name == "p2") return ProtocolKind::kProtocolTwo;
  if (name == "legacy") return ProtocolKind::kLegacy;
  throw ConfigError("unknown protocol '" + std::string(name) + "'");
}

Headend::Headend(crypto::Suite suite, Drbg rng) : suite_(std::move(suite)), rng_(std::move(rng)) {}

Headend::CaSystem& Headend::system(std::size_t ca) {
  if (ca >= systems_.size()) throw ConfigError("no CA system with index " + std::to_string(ca));
  return systems_[ca];
}

const Headend::CaSystem& Headend::system(std::size_t ca) const {
  if (ca >= systems_.size()) throw ConfigError("no CA system with index " + std::to_string(ca));
  return systems_[ca];
}

std::size_t Headend::add_ca_system(const CaSystemConfig& config, ttp::TrustedThirdParty& ttp) {
  for (const auto& s : systems_) {
    if (s.config.ca_system_id == config.ca_system_id)
      throw ConfigError("duplicate CA system id " + std::to_string(config.ca_system_id));
  }
  CaSystem sys;
  sys.config = config;
  sys.trusted_pk_t = ttp.public_key();
  sys.group_key = rng_.generate(suite_.secret_bytes());
  ttp::Directory directory = ttp.export_directory();

  switch (config.kind) {
    case ProtocolKind::kProtocolOne: {
      sys.signing_key = crypto::keygen(suite_, crypto::KeyPurpose::kSignature, rng_);
      p1::Sender sender(suite_, config.sender_id, sys.signing_key,
                        ttp.certify_sender(config.sender_id, sys.signing_key.public_key));
      sender.load_directory(directory, sys.trusted_pk_t);
      sys.sender = std::move(sender);
      break;
    }
    case ProtocolKind::kProtocolTwo: {
      sys.signing_key = crypto::keygen(suite_, crypto::KeyPurpose::kSignature, rng_);
      p2::Sender sender(suite_, config.sender_id, sys.signing_key);
      sender.load_directory(directory, sys.trusted_pk_t);
      sys.sender = std::move(sender);
      break;
    }
    case ProtocolKind::kLegacy: break;
  }
  systems_.push_back(std::move(sys));
  recompute_pk_set();
  return systems_.size() - 1;
}

void Headend::set_trusted_ttp_key(std::size_t ca, Bytes pk_t) { system(ca).trusted_pk_t = std::move(pk_t); }

void Headend::refresh_directory(std::size_t ca, const ttp::Directory& directory) {
  CaSystem& sys = system(ca);
  if (auto* s = std::get_if<p1::Sender>(&sys.sender)) s->load_directory(directory, sys.trusted_pk_t);
  if (auto* s = std::get_if<p2::Sender>(&sys.sender)) s->load_directory(directory, sys.trusted_pk_t);
}

ClientProvisioning Headend::provision_client(std::size_t ca, EntityId receiver) {
  CaSystem& sys = system(ca);
  auto it = sys.unique_keys.find(receiver);
  if (it == sys.unique_keys.end()) it = sys.unique_keys.emplace(receiver, rng_.generate(suite_.secret_bytes())).first;
  return ClientProvisioning{sys.config.ca_system_id, sys.config.kind, receiver,
                            wire::ChannelKeys{sys.group_key, it->second}};
}

void Headend::rekey_channels(std::size_t ca) {
  CaSystem& sys = system(ca);
  sys.group_key = rng_.generate(suite_.secret_bytes());
  for (auto& [id, key] : sys.unique_keys) key = rng_.generate(suite_.secret_bytes());
}

void Headend::recompute_pk_set() {
  std::vector<Bytes> keys;
  for (const auto& s : systems_) {
    if (s.config.kind == ProtocolKind::kProtocolTwo) keys.push_back(s.signing_key.public_key);
  }
  pk_set_ = binding::canonical_key_set(std::move(keys));
}

std::size_t Headend::hash_binding_count() const {
  return static_cast<std::size_t>(std::count_if(systems_.begin(), systems_.end(), [](const CaSystem& s) {
    return s.config.kind == ProtocolKind::kProtocolTwo;
  }));
}

Bytes Headend::queue(const CaSystem& sys, wire::Emm emm) {
  emm.ca_system_id = sys.config.ca_system_id;
  ByteView key = sys.group_key;
  if (wire::is_confidential(emm.kind)) {
    auto it = sys.unique_keys.find(emm.addressee);
    if (it == sys.unique_keys.end())
      throw ConfigError("receiver " + std::to_string(emm.addressee.value) + " has no provisioned CA client");
    key = it->second;
  }
  Bytes encoded = wire::emm_encode(suite_, emm, key);
  pending_emms_.push_back(encoded);
  return encoded;
}

std::vector<Bytes> Headend::queue_phase_one(CaSystem& sys, EntityId receiver, bool with_broadcast) {
  if (!sys.unique_keys.contains(receiver))
    throw ConfigError("receiver " + std::to_string(receiver.value) + " has no provisioned CA client");
  std::vector<Bytes> out;
  wire::EnrollPayload payload;
  if (auto* s = std::get_if<p1::Sender>(&sys.sender)) {
    p1::Phase1Bundle bundle = s->phase1(receiver, rng_);
    payload = {bundle.signed_blob, *s->long_term_key(receiver)};
    if (with_broadcast) {
      out.push_back(queue(sys, {0, wire::EmmKind::kBroadcastCert, kBroadcastId,
                                wire::encode_key_payload(bundle.sender_cert.serialize())}));
    }
  } else if (auto* s = std::get_if<p2::Sender>(&sys.sender)) {
    p2::Phase1Bundle bundle = s->phase1(receiver, rng_);
    payload = {bundle.signed_blob, *s->long_term_key(receiver)};
    if (with_broadcast) {
      out.push_back(
          queue(sys, {0, wire::EmmKind::kBroadcastSenderPk, kBroadcastId, wire::encode_key_payload(bundle.sender_pk)}));
      if (hash_binding_count() > 1)
        out.push_back(queue(sys, {0, wire::EmmKind::kPkSetUpdate, kBroadcastId, wire::encode_key_set(pk_set_)}));
    }
  } else {
    return out;
  }
  out.push_back(queue(sys, {0, wire::EmmKind::kPerReceiverEnroll, receiver, payload.encode()}));
  return out;
}

std::vector<Bytes> Headend::enroll_receiver(std::size_t ca, EntityId receiver) {
  CaSystem& sys = system(ca);
  if (sys.config.kind == ProtocolKind::kLegacy && !sys.unique_keys.contains(receiver))
    throw ConfigError("receiver " + std::to_string(receiver.value) + " has no provisioned CA client");
  std::vector<Bytes> out = queue_phase_one(sys, receiver, true);
  sys.enrolled.insert(receiver);
  return out;
}

std::vector<Bytes> Headend::rotate_sender_key(std::size_t ca, ttp::TrustedThirdParty* ttp) {
  CaSystem& sys = system(ca);
  switch (sys.config.kind) {
    case ProtocolKind::kLegacy: throw ConfigError("legacy CA systems have no sender key");
    case ProtocolKind::kProtocolOne: {
      if (ttp == nullptr) throw ConfigError("protocol one key rotation needs the TTP");
      crypto::KeyPair key = crypto::keygen(suite_, crypto::KeyPurpose::kSignature, rng_);
      ttp::Certificate cert = ttp->certify_sender(sys.config.sender_id, key.public_key);
      std::get<p1::Sender>(sys.sender).rekey(key, std::move(cert));
      sys.signing_key = std::move(key);
      break;
    }
    case ProtocolKind::kProtocolTwo: {
      crypto::KeyPair key = crypto::keygen(suite_, crypto::KeyPurpose::kSignature, rng_);
      std::get<p2::Sender>(sys.sender).rekey(key);
      sys.signing_key = std::move(key);
      recompute_pk_set();
      break;
    }
  }

  std::vector<Bytes> out;
  bool first = true;
  for (EntityId receiver : sys.enrolled) {
    auto emms = queue_phase_one(sys, receiver, first);
    out.insert(out.end(), emms.begin(), emms.end());
    first = false;
  }
  // Other hash-binding systems' decoders need the new key set too.
  if (sys.config.kind == ProtocolKind::kProtocolTwo && hash_binding_count() > 1) {
    for (auto& other : systems_) {
      if (&other == &sys || other.config.kind != ProtocolKind::kProtocolTwo) continue;
      out.push_back(queue(other, {0, wire::EmmKind::kPkSetUpdate, kBroadcastId, wire::encode_key_set(pk_set_)}));
    }
  }
  return out;
}

void Headend::authorize(std::size_t ca, EntityId receiver, bool authorized) {
  CaSystem& sys = system(ca);
  if (!sys.enrolled.contains(receiver))
    throw ConfigError("receiver " + std::to_string(receiver.value) + " is not enrolled");
  if (authorized)
    sys.authorized.insert(receiver);
  else
    sys.authorized.erase(receiver);
  queue(sys, {0, wire::EmmKind::kEntitlement, receiver, wire::encode_entitlement(authorized)});
}

std::vector<Bytes> Headend::publish_revocation_list(std::size_t ca, const ttp::RevocationList& crl) {
  CaSystem& sys = system(ca);
  if (sys.config.kind != ProtocolKind::kProtocolOne)
    throw ConfigError("revocation information is only distributed by protocol one systems");
  return {queue(sys, {0, wire::EmmKind::kCrlUpdate, kBroadcastId, wire::encode_key_payload(crl.serialize())})};
}

wire::BroadcastFrame Headend::epoch_tick(ByteView content) {
  if (systems_.empty()) throw ConfigError("head-end has no CA system");
  if (hash_binding_count() > 0) {
    p2::SharedDraw draw = p2::phase2_shared(suite_, pk_set_, rng_);
    last_r_ = std::move(draw.r);
    last_k_ = std::move(draw.k);
  } else {
    last_r_.clear();
    last_k_ = binding::SharedSecret{rng_.generate(suite_.secret_bytes())};
  }

  wire::BroadcastFrame frame;
  frame.epoch = epoch_;
  frame.scrambled_content = ContentScrambler(last_k_.k).scramble(epoch_, content);
  for (const auto& sys : systems_) {
    const Bytes& secret = sys.config.kind == ProtocolKind::kProtocolTwo ? last_r_ : last_k_.k;
    frame.ecms.push_back(wire::ecm_encode(suite_, {sys.config.ca_system_id, epoch_, secret}, sys.group_key));
  }
  frame.emms = std::move(pending_emms_);
  pending_emms_.clear();
  ++epoch_;
  return frame;
}

wire::BroadcastFrame Headend::emm_frame() {
  wire::BroadcastFrame frame;
  frame.epoch = epoch_;
  frame.emms = std::move(pending_emms_);
  pending_emms_.clear();
  return frame;
}

const CaSystemConfig& Headend::config(std::size_t ca) const { return system(ca).config; }

const Bytes& Headend::sender_public_key(std::size_t ca) const { return system(ca).signing_key.public_key; }

std::optional<ttp::Certificate> Headend::sender_certificate(std::size_t ca) const {
  if (auto* s = std::get_if<p1::Sender>(&system(ca).sender)) return s->certificate();
  return std::nullopt;
}

std::optional<Bytes> Headend::long_term_key(std::size_t ca, EntityId receiver) const {
  const CaSystem& sys = system(ca);
  if (auto* s = std::get_if<p1::Sender>(&sys.sender)) return s->long_term_key(receiver);
  if (auto* s = std::get_if<p2::Sender>(&sys.sender)) return s->long_term_key(receiver);
  return std::nullopt;
}

bool Headend::is_enrolled(std::size_t ca, EntityId receiver) const { return system(ca).enrolled.contains(receiver); }

bool Headend::is_authorized(std::size_t ca, EntityId receiver) const {
  return system(ca).authorized.contains(receiver);
}

const std::set<EntityId>& Headend::authorized(std::size_t ca) const { return system(ca).authorized; }

const crypto::KeyPair& Headend::leak_sender_key(std::size_t ca) const { return system(ca).signing_key; }

}  // namespace paytv::headend
