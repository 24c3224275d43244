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

#include "paytv/decoder.hpp"

#include <string>

#include "paytv/codec.hpp"
#include "paytv/error.hpp"
#include "paytv/scrambler.hpp"

namespace paytv::decoder {

const char* to_string(ChipMessageKind kind) {
  switch (kind) {
    case ChipMessageKind::kLoadLtk: return "load_ltk";
    case ChipMessageKind::kDerive: return "derive";
    case ChipMessageKind::kPkSetUpdate: return "pk_set_update";
    case ChipMessageKind::kCrlUpdate: return "crl_update";
  }
  return "unknown";
}

Bytes ChipMessage::serialize() const {
  return codec::Writer().u8(static_cast<std::uint8_t>(kind)).u64(epoch).lp(body).bytes();
}

ChipMessage ChipMessage::parse(ByteView data) {
  codec::Reader r(data);
  ChipMessage m;
  std::size_t kind_at = r.offset();
  std::uint8_t kind = r.u8();
  if (kind < 1 || kind > 4) throw WireError("unknown chip message kind", kind_at);
  m.kind = static_cast<ChipMessageKind>(kind);
  m.epoch = r.u64();
  m.body = r.lp();
  r.finish("chip message");
  return m;
}

Bytes encode_p2_derive(ByteView sender_pk, ByteView ciphertext) {
  return codec::Writer().lp(sender_pk).lp(ciphertext).bytes();
}

// ---------------------------------------------------------------------------
// CA client

CaClient::CaClient(crypto::Suite suite, headend::ClientProvisioning provisioning)
    : suite_(std::move(suite)), prov_(std::move(provisioning)) {}

std::optional<ChipMessage> CaClient::load_message(std::uint64_t epoch) {
  if (!pending_enroll_ || sender_pk_.empty()) return std::nullopt;
  ChipMessage msg{ChipMessageKind::kLoadLtk, epoch, {}};
  if (prov_.kind == headend::ProtocolKind::kProtocolOne) {
    if (!sender_cert_) return std::nullopt;
    msg.body = p1::Phase1Bundle{*sender_cert_, pending_enroll_->signed_blob}.serialize();
  } else {
    msg.body = p2::Phase1Bundle{sender_pk_, pending_enroll_->signed_blob}.serialize();
  }
  ltk_copy_[sender_pk_] = pending_enroll_->ltk_copy;
  pending_enroll_.reset();
  return msg;
}

ClientOutput CaClient::process_emm(ByteView data) {
  wire::SealedEmm sealed = wire::emm_parse(data);
  if (sealed.ca_system_id != prov_.ca_system_id) return {};
  const bool confidential = wire::is_confidential(sealed.kind);
  if (confidential && sealed.addressee != prov_.receiver) return {};
  wire::Emm emm = wire::emm_open(suite_, sealed, confidential ? prov_.keys.unique_key : prov_.keys.group_key);

  ClientOutput result{true, {}};
  std::vector<ChipMessage>& out = result.messages;
  auto push_load = [&] {
    if (auto msg = load_message(last_epoch_)) out.push_back(std::move(*msg));
  };
  const bool p1 = prov_.kind == headend::ProtocolKind::kProtocolOne;
  const bool p2 = prov_.kind == headend::ProtocolKind::kProtocolTwo;

  switch (emm.kind) {
    case wire::EmmKind::kEntitlement: entitled_ = wire::decode_entitlement(emm.payload); break;
    case wire::EmmKind::kBroadcastSenderPk:
      if (p2) {
        sender_pk_ = wire::decode_key_payload(emm.payload);
        push_load();
      }
      break;
    case wire::EmmKind::kBroadcastCert:
      if (p1) {
        ttp::Certificate cert = ttp::Certificate::parse(wire::decode_key_payload(emm.payload));
        sender_pk_ = cert.subject_pk;
        sender_cert_ = std::move(cert);
        push_load();
      }
      break;
    case wire::EmmKind::kPerReceiverEnroll:
      if (p1 || p2) {
        pending_enroll_ = wire::EnrollPayload::decode(emm.payload);
        push_load();
      }
      break;
    case wire::EmmKind::kPkSetUpdate:
      if (p2) {
        wire::decode_key_set(emm.payload);
        out.push_back({ChipMessageKind::kPkSetUpdate, last_epoch_, emm.payload});
      }
      break;
    case wire::EmmKind::kCrlUpdate:
      if (p1) out.push_back({ChipMessageKind::kCrlUpdate, last_epoch_, wire::decode_key_payload(emm.payload)});
      break;
  }
  return result;
}

ClientOutput CaClient::process_ecm(ByteView data) {
  wire::SealedEcm sealed = wire::ecm_parse(data);
  if (sealed.ca_system_id != prov_.ca_system_id) return {};
  wire::Ecm ecm = wire::ecm_open(suite_, sealed, prov_.keys.group_key);
  last_epoch_ = ecm.epoch;
  ClientOutput result{true, {}};
  if (!entitled_) return result;

  ChipMessage msg{ChipMessageKind::kDerive, ecm.epoch, {}};
  if (prov_.kind == headend::ProtocolKind::kLegacy) {
    msg.body = ecm.secret;
  } else {
    auto it = ltk_copy_.find(sender_pk_);
    if (it == ltk_copy_.end()) return result;
    Bytes wrapped = crypto::sym_encrypt(suite_, it->second, ecm.secret);
    msg.body = prov_.kind == headend::ProtocolKind::kProtocolTwo ? encode_p2_derive(sender_pk_, wrapped)
                                                                : std::move(wrapped);
  }
  result.messages.push_back(std::move(msg));
  return result;
}

// ---------------------------------------------------------------------------
// Chip

Chip Chip::protocol_one(crypto::Suite suite, EntityId id, Bytes private_key, Bytes trusted_pk_t) {
  p1::Receiver receiver(suite, id, std::move(trusted_pk_t), std::move(private_key));
  return Chip(std::move(suite), id, std::move(receiver));
}

Chip Chip::protocol_two(crypto::Suite suite, EntityId id, Bytes private_key) {
  p2::Receiver receiver(suite, id, std::move(private_key));
  return Chip(std::move(suite), id, std::move(receiver));
}

Chip Chip::legacy(crypto::Suite suite, EntityId id) { return Chip(std::move(suite), id, LegacyReceiver{}); }

headend::ProtocolKind Chip::kind() const {
  if (std::holds_alternative<p1::Receiver>(receiver_)) return headend::ProtocolKind::kProtocolOne;
  if (std::holds_alternative<p2::Receiver>(receiver_)) return headend::ProtocolKind::kProtocolTwo;
  return headend::ProtocolKind::kLegacy;
}

namespace {
[[noreturn]] void unsupported(ChipMessageKind kind) {
  throw ProtocolAbort(AbortReason::kMalformedMessage, std::string("chip does not accept ") + to_string(kind));
}
}  // namespace

binding::SharedSecret Chip::derive(const ChipMessage& msg) const {
  if (const auto* r = std::get_if<p1::Receiver>(&receiver_)) return r->phase2(msg.body);
  if (const auto* r = std::get_if<p2::Receiver>(&receiver_)) {
    Bytes pk, ct;
    try {
      codec::Reader rd(msg.body);
      pk = rd.lp();
      ct = rd.lp();
      rd.finish("derive message");
    } catch (const WireError& e) {
      throw ProtocolAbort(AbortReason::kMalformedMessage, e.what());
    }
    return r->phase2(pk, ct);
  }
  if (msg.body.size() != suite_.secret_bytes())
    throw ProtocolAbort(AbortReason::kMalformedMessage, "control word has wrong length");
  return binding::SharedSecret{msg.body};
}

std::optional<ControlWordHandle> Chip::process(const ChipMessage& msg) {
  try {
    switch (msg.kind) {
      case ChipMessageKind::kLoadLtk:
        if (auto* r = std::get_if<p1::Receiver>(&receiver_)) {
          r->phase1(p1::Phase1Bundle::parse(msg.body));
        } else if (auto* r2 = std::get_if<p2::Receiver>(&receiver_)) {
          r2->phase1(p2::Phase1Bundle::parse(msg.body));
        } else {
          unsupported(msg.kind);
        }
        return std::nullopt;
      case ChipMessageKind::kPkSetUpdate:
        if (auto* r = std::get_if<p2::Receiver>(&receiver_)) {
          r->set_active_keys(wire::decode_key_set(msg.body));
          return std::nullopt;
        }
        unsupported(msg.kind);
      case ChipMessageKind::kCrlUpdate:
        if (auto* r = std::get_if<p1::Receiver>(&receiver_)) {
          r->apply_revocation_list(ttp::RevocationList::parse(msg.body));
          return std::nullopt;
        }
        unsupported(msg.kind);
      case ChipMessageKind::kDerive: {
        binding::SharedSecret k = derive(msg);
        if (msg.epoch != latest_epoch_) {
          words_.clear();
          latest_epoch_ = msg.epoch;
        }
        std::uint64_t slot = next_slot_++;
        words_.emplace(slot, std::move(k.k));
        return ControlWordHandle(id_.value, msg.epoch, slot);
      }
    }
  } catch (const WireError& e) {
    throw ProtocolAbort(AbortReason::kMalformedMessage, e.what());
  }
  unsupported(msg.kind);
}

Bytes Chip::descramble(const ControlWordHandle& handle, ByteView scrambled) const {
  if (handle.chip_ != id_.value) throw ConfigError("control word handle belongs to another chip");
  auto it = words_.find(handle.slot_);
  if (handle.epoch_ != latest_epoch_ || it == words_.end()) throw ConfigError("stale control word handle");
  return ContentScrambler(it->second).descramble(handle.epoch_, scrambled);
}

// ---------------------------------------------------------------------------
// Decoder

Decoder::Decoder(EntityId id, CaClient client, Chip chip)
    : id_(id), client_(std::move(client)), chip_(std::move(chip)) {}

const char* to_string(MessageStatus status) {
  switch (status) {
    case MessageStatus::kIgnored: return "ignored";
    case MessageStatus::kAccepted: return "accepted";
    case MessageStatus::kRejected: return "rejected";
  }
  return "unknown";
}

namespace {

bool run_chip(Chip& chip, const ChipMessage& msg, FrameTrace& trace) {
  trace.chip_messages.push_back(msg);
  try {
    if (auto handle = chip.process(msg)) trace.handles.push_back(*handle);
    return true;
  } catch (const ProtocolAbort& e) {
    trace.rejections.push_back({true, e.reason(), e.what()});
    return false;
  }
}

template <typename Process>
MessageStatus run_client(Process&& process, FrameTrace& trace) {
  try {
    return process() ? MessageStatus::kAccepted : MessageStatus::kIgnored;
  } catch (const Error& e) {
    trace.rejections.push_back({false, std::nullopt, e.what()});
    return MessageStatus::kRejected;
  }
}

}  // namespace

bool Decoder::deliver(const ChipMessage& msg, FrameTrace& trace) {
  std::optional<ChipMessage> delivered = hook_ ? hook_(msg) : std::optional<ChipMessage>(msg);
  if (!delivered) return true;
  return run_chip(chip_, *delivered, trace);
}

FrameTrace Decoder::receive(const wire::BroadcastFrame& frame) {
  FrameTrace trace;
  for (const auto& emm : frame.emms) {
    bool chip_ok = true;
    MessageStatus status = run_client(
        [&] {
          ClientOutput out = client_.process_emm(emm);
          for (const auto& msg : out.messages) chip_ok = deliver(msg, trace) && chip_ok;
          return out.addressed;
        },
        trace);
    trace.emm_status.push_back(chip_ok ? status : MessageStatus::kRejected);
  }
  for (const auto& ecm : frame.ecms) {
    bool chip_ok = true;
    MessageStatus status = run_client(
        [&] {
          ClientOutput out = client_.process_ecm(ecm);
          for (const auto& msg : out.messages) chip_ok = deliver(msg, trace) && chip_ok;
          return out.addressed;
        },
        trace);
    trace.ecm_status.push_back(chip_ok ? status : MessageStatus::kRejected);
  }
  return trace;
}

FrameTrace Decoder::inject(const ChipMessage& msg) {
  FrameTrace trace;
  run_chip(chip_, msg, trace);
  return trace;
}

}  // namespace paytv::decoder
