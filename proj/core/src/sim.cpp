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

#include "paytv/sim.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "paytv/crypto.hpp"
#include "paytv/error.hpp"
#include "paytv/protocol_one.hpp"
#include "paytv/protocol_two.hpp"

namespace paytv::sim {

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kDerived: return "derived";
    case Outcome::kExcluded: return "excluded";
    case Outcome::kRejected: return "rejected";
    case Outcome::kMismatch: return "mismatch";
  }
  return "unknown";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kNotApplicable: return "n/a";
  }
  return "unknown";
}

void BandwidthLedger::add_frame(const wire::BroadcastFrame& frame) {
  content_bytes += frame.scrambled_content.size();
  for (const auto& ecm : frame.ecms) ecm_bytes += ecm.size();
  for (const auto& emm : frame.emms) {
    if (wire::is_confidential(wire::emm_parse(emm).kind))
      emm_per_receiver_bytes += emm.size();
    else
      emm_broadcast_bytes += emm.size();
  }
}

std::set<std::size_t> EpochRecord::with(Outcome outcome) const {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i] == outcome) out.insert(i);
  }
  return out;
}

bool RunReport::all_pass() const {
  return implicit_key_auth != Verdict::kFail && authenticity != Verdict::kFail && recovery_success != Verdict::kFail;
}

std::string RunReport::serialize() const {
  std::ostringstream out;
  out << "report v1\n";
  out << "scenario " << scenario << "\n";
  out << "seed " << seed << "\n";
  out << "secret_bits " << secret_bits << "\n";
  out << "decoders " << decoders << "\n";
  out << "epochs " << epochs.size() << "\n";
  for (std::size_t i = 0; i < cas.size(); ++i)
    out << "ca " << i << " " << headend::to_string(cas[i].kind) << " " << format_decoder_set(cas[i].decoders) << "\n";
  for (const auto& a : actions) {
    out << "action " << a.first_epoch;
    if (a.last_epoch != a.first_epoch) out << ".." << a.last_epoch;
    out << " " << a.describe() << "\n";
  }
  for (const auto& rec : epochs) {
    out << "epoch " << rec.epoch << " authorized=" << format_decoder_set(rec.authorized);
    for (auto o : {Outcome::kDerived, Outcome::kExcluded, Outcome::kRejected, Outcome::kMismatch})
      out << " " << to_string(o) << "=" << format_decoder_set(rec.with(o));
    out << " disrupted=" << format_decoder_set(rec.disrupted) << "\n";
  }
  out << "ledger ecm_bytes " << ledger.ecm_bytes << "\n";
  out << "ledger emm_broadcast_bytes " << ledger.emm_broadcast_bytes << "\n";
  out << "ledger emm_per_receiver_bytes " << ledger.emm_per_receiver_bytes << "\n";
  out << "ledger content_bytes " << ledger.content_bytes << "\n";
  out << "ledger broadcast_total_bytes " << ledger.broadcast_total() << "\n";
  out << "ledger chip_channel_bytes " << ledger.chip_channel_bytes << "\n";
  out << "adversary messages " << adversary.messages << "\n";
  out << "adversary ignored " << adversary.ignored << "\n";
  out << "adversary rejected " << adversary.rejected << "\n";
  out << "adversary accepted " << adversary.accepted << "\n";
  out << "adversary mismatch " << adversary.mismatch << "\n";
  out << "adversary success " << adversary.success << "\n";
  out << "metric decoders_replaced " << decoders_replaced << "\n";
  out << "metric ttp_sender_certifications " << ttp_sender_certifications << "\n";
  out << "verdict implicit_key_auth " << to_string(implicit_key_auth) << "\n";
  out << "verdict authenticity " << to_string(authenticity) << "\n";
  out << "verdict recovery_success " << to_string(recovery_success) << "\n";
  return out.str();
}

void compute_verdicts(RunReport& report) {
  report.implicit_key_auth = Verdict::kPass;
  report.authenticity = Verdict::kPass;
  std::optional<std::uint64_t> recovered_at;
  for (const auto& a : report.actions) {
    if (a.kind == ActionKind::kRecover && (!recovered_at || a.first_epoch < *recovered_at)) recovered_at = a.first_epoch;
  }
  report.recovery_success = recovered_at ? Verdict::kPass : Verdict::kNotApplicable;

  for (const auto& rec : report.epochs) {
    std::set<std::size_t> derived = rec.with(Outcome::kDerived);
    bool sound = std::includes(rec.authorized.begin(), rec.authorized.end(), derived.begin(), derived.end());
    bool complete = true;
    for (std::size_t d : rec.authorized) {
      if (!derived.contains(d) && !rec.disrupted.contains(d)) complete = false;
    }
    if (!sound || !complete) report.implicit_key_auth = Verdict::kFail;
    if (!sound || rec.adversary_success > 0) report.authenticity = Verdict::kFail;
    if (recovered_at && rec.epoch >= *recovered_at && (!sound || !complete || rec.adversary_success > 0))
      report.recovery_success = Verdict::kFail;
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kDecoderIdBase = 0x1000;
constexpr std::uint64_t kSenderIdBase = 0x5000;
constexpr std::uint64_t kRogueSenderId = 0xBAD0;
constexpr std::uint16_t kCaSystemIdBase = 0x0100;

using headend::ProtocolKind;

Bytes flip_bit(ByteView data, std::uint32_t bit) {
  Bytes out(data.begin(), data.end());
  if (out.empty()) return out;
  std::size_t i = bit % (out.size() * 8);
  out[i / 8] ^= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return out;
}

decoder::Chip make_chip(const crypto::Suite& suite, ProtocolKind kind, EntityId id, const Bytes& sk,
                        const Bytes& pk_t) {
  switch (kind) {
    case ProtocolKind::kProtocolOne: return decoder::Chip::protocol_one(suite, id, sk, pk_t);
    case ProtocolKind::kProtocolTwo: return decoder::Chip::protocol_two(suite, id, sk);
    case ProtocolKind::kLegacy: break;
  }
  return decoder::Chip::legacy(suite, id);
}

struct DecoderSlot {
  std::size_t ca;
  EntityId id;
  Bytes chip_sk;  // kept by the manufacturer for chip re-initialization
  decoder::Decoder dec;
  std::vector<decoder::ChipMessage> channel;
  std::optional<decoder::ChipMessage> last_derive;
  std::optional<decoder::ChipMessage> last_load;
};

struct Adversary {
  explicit Adversary(Drbg r) : rng(std::move(r)) {}

  Drbg rng;
  crypto::KeyPair rogue_key;
  std::set<std::size_t> client_cas;            // channel keys known
  std::set<std::size_t> control_word_sources;  // decoders K is extracted from
  std::map<std::size_t, crypto::KeyPair> sender_keys;
  std::map<std::size_t, ttp::Certificate> sender_certs;
  std::optional<crypto::KeyPair> ttp_key;
  std::uint32_t ttp_generation = 0;
};

struct Observation {
  bool derived = false;
  bool mismatch = false;
  bool rejected = false;

  Outcome outcome() const {
    if (derived) return Outcome::kDerived;
    if (mismatch) return Outcome::kMismatch;
    if (rejected) return Outcome::kRejected;
    return Outcome::kExcluded;
  }
};

Drbg master_rng(std::uint64_t seed) { return Drbg::from_u64(seed); }

crypto::SuiteConfig suite_config(std::size_t bits) {
  crypto::SuiteConfig c;
  c.secret_len_bits = bits;
  return c;
}

}  // namespace

struct World::State {
  explicit State(ScenarioConfig c)
      : cfg((c.validate(), std::move(c))),
        suite(suite_config(cfg.secret_bits)),
        ttp_rng(master_rng(cfg.seed).fork("ttp")),
        chip_rng(master_rng(cfg.seed).fork("chips")),
        content_rng(master_rng(cfg.seed).fork("content")),
        ttp(suite, ttp_rng),
        head(suite, master_rng(cfg.seed).fork("headend")),
        adv(master_rng(cfg.seed).fork("adversary")) {}

  ScenarioConfig cfg;
  crypto::Suite suite;
  Drbg ttp_rng;
  Drbg chip_rng;
  Drbg content_rng;
  ttp::TrustedThirdParty ttp;
  headend::Headend head;
  Adversary adv;

  std::vector<DecoderSlot> decoders;
  std::vector<bool> authorized;
  std::vector<Action> queued;
  std::vector<EpochRecord> records;
  std::vector<wire::BroadcastFrame> frames;
  std::map<std::size_t, Bytes> previous_ecm;  // CA index -> ECM of the last frame
  BandwidthLedger ledger;
  AdversaryTally tally;
  std::set<std::size_t> replaced;
  std::set<std::size_t> sticky;  // disrupted until re-enrolled

  // Per-epoch scratch.
  Bytes content;
  Bytes scrambled;
  std::vector<Observation> obs;

  ProtocolKind kind_of(std::size_t ca) const { return cfg.cas[ca].kind; }

  void setup();
  void record_frame(const wire::BroadcastFrame& frame);
  void tap(std::size_t i, const decoder::FrameTrace& trace, bool honest);
  void maintenance(bool replace_chips);
  void apply_authorization(const std::set<std::size_t>& wanted);

  void compromise(const Action& a);
  void recover(bool replace_chips);
  void rotate_ttp();
  void rotate_sender(std::size_t ca);
  void swap_client(std::size_t i);

  struct HandleCheck {
    bool any = false;
    bool ok = false;
  };
  HandleCheck check_handles(std::size_t i, const std::vector<decoder::ControlWordHandle>& handles) const;
  void assess_injection(std::size_t i, const decoder::FrameTrace& trace, bool modified);
  void inject(std::size_t i, const decoder::ChipMessage& msg, bool modified);
  void forge(const Action& a, std::uint64_t epoch, const std::optional<Bytes>& known_r,
             const std::optional<Bytes>& known_k);
  void replay(const Action& a, std::uint64_t epoch);
};

void World::State::setup() {
  const std::size_t n = cfg.decoders;
  std::vector<Bytes> chip_keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (kind_of(cfg.ca_of(i)) == ProtocolKind::kLegacy) continue;
    crypto::KeyPair kp = crypto::keygen(suite, crypto::KeyPurpose::kEncryption, chip_rng);
    ttp.register_receiver(EntityId{kDecoderIdBase + i}, kp.public_key);
    chip_keys[i] = kp.private_key;
  }
  for (std::size_t ca = 0; ca < cfg.cas.size(); ++ca) {
    head.add_ca_system({static_cast<std::uint16_t>(kCaSystemIdBase + ca), kind_of(ca), EntityId{kSenderIdBase + ca}},
                       ttp);
  }
  decoders.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ca = cfg.ca_of(i);
    EntityId id{kDecoderIdBase + i};
    decoder::CaClient client(suite, head.provision_client(ca, id));
    decoder::Chip chip = make_chip(suite, kind_of(ca), id, chip_keys[i], ttp.public_key());
    decoders.push_back(DecoderSlot{ca, id, chip_keys[i], decoder::Decoder(id, std::move(client), std::move(chip)), {},
                                   std::nullopt, std::nullopt});
  }
  for (const auto& slot : decoders) head.enroll_receiver(slot.ca, slot.id);
  authorized.assign(n, false);
  adv.rogue_key = crypto::keygen(suite, crypto::KeyPurpose::kSignature, adv.rng);
}

void World::State::record_frame(const wire::BroadcastFrame& frame) {
  ledger.add_frame(frame);
  frames.push_back(frame);
}

void World::State::tap(std::size_t i, const decoder::FrameTrace& trace, bool honest) {
  DecoderSlot& slot = decoders[i];
  for (const auto& msg : trace.chip_messages) {
    slot.channel.push_back(msg);
    if (!honest) continue;
    ledger.chip_channel_bytes += msg.serialize().size();
    if (msg.kind == decoder::ChipMessageKind::kDerive) slot.last_derive = msg;
    if (msg.kind == decoder::ChipMessageKind::kLoadLtk) slot.last_load = msg;
  }
}

void World::State::maintenance(bool replace_chips) {
  wire::BroadcastFrame frame = head.emm_frame();
  if (frame.emms.empty()) return;
  record_frame(frame);
  std::vector<std::size_t> stale;
  for (std::size_t i = 0; i < decoders.size(); ++i) {
    decoder::FrameTrace trace = decoders[i].dec.receive(frame);
    tap(i, trace, true);
    for (const auto& r : trace.rejections) {
      if (r.at_chip && r.reason == AbortReason::kBadCertificate) {
        stale.push_back(i);
        break;
      }
    }
  }
  if (!replace_chips || stale.empty()) return;

  // The chips pin the old PK_T; the only way back is a new chip.
  for (std::size_t i : stale) {
    DecoderSlot& slot = decoders[i];
    slot.dec.replace_chip(make_chip(suite, kind_of(slot.ca), slot.id, slot.chip_sk, ttp.public_key()));
    replaced.insert(i);
    head.enroll_receiver(slot.ca, slot.id);
  }
  wire::BroadcastFrame again = head.emm_frame();
  record_frame(again);
  for (std::size_t i = 0; i < decoders.size(); ++i) tap(i, decoders[i].dec.receive(again), true);
}

void World::State::apply_authorization(const std::set<std::size_t>& wanted) {
  for (std::size_t i = 0; i < decoders.size(); ++i) {
    bool want = wanted.contains(i);
    if (want == authorized[i]) continue;
    head.authorize(decoders[i].ca, decoders[i].id, want);
    authorized[i] = want;
  }
}

void World::State::compromise(const Action& a) {
  switch (a.component) {
    case Component::kSenderKeys:
      adv.sender_keys[a.ca] = head.leak_sender_key(a.ca);
      if (auto cert = head.sender_certificate(a.ca)) adv.sender_certs[a.ca] = *cert;
      break;
    case Component::kTtpKey:
      adv.ttp_key = ttp.leak_signing_key();
      adv.ttp_generation = ttp.generation();
      break;
    case Component::kCaClient: adv.client_cas.insert(decoders[a.target].ca); break;
    case Component::kControlWord: adv.control_word_sources.insert(a.target); break;
  }
}

void World::State::rotate_ttp() {
  ttp.rotate(ttp_rng);
  for (std::size_t ca = 0; ca < cfg.cas.size(); ++ca) {
    head.set_trusted_ttp_key(ca, ttp.public_key());
    head.refresh_directory(ca, ttp.export_directory());
  }
}

void World::State::recover(bool replace_chips) {
  rotate_ttp();
  for (std::size_t ca = 0; ca < cfg.cas.size(); ++ca) head.rekey_channels(ca);
  for (auto& slot : decoders) slot.dec.swap_client(decoder::CaClient(suite, head.provision_client(slot.ca, slot.id)));
  for (std::size_t ca = 0; ca < cfg.cas.size(); ++ca) {
    if (kind_of(ca) == ProtocolKind::kLegacy) continue;
    head.rotate_sender_key(ca, kind_of(ca) == ProtocolKind::kProtocolOne ? &ttp : nullptr);
  }
  for (std::size_t i = 0; i < decoders.size(); ++i) {
    if (authorized[i]) head.authorize(decoders[i].ca, decoders[i].id, true);
  }
  adv.client_cas.clear();
  maintenance(replace_chips);
  sticky.clear();
}

void World::State::rotate_sender(std::size_t ca) {
  head.rotate_sender_key(ca, kind_of(ca) == ProtocolKind::kProtocolOne ? &ttp : nullptr);
  maintenance(true);
  for (const auto& d : cfg.cas[ca].decoders) sticky.erase(d);
}

void World::State::swap_client(std::size_t i) {
  DecoderSlot& slot = decoders[i];
  slot.dec.swap_client(decoder::CaClient(suite, head.provision_client(slot.ca, slot.id)));
  head.enroll_receiver(slot.ca, slot.id);
  if (authorized[i]) head.authorize(slot.ca, slot.id, true);
  maintenance(true);
  sticky.erase(i);
}

World::State::HandleCheck World::State::check_handles(
    std::size_t i, const std::vector<decoder::ControlWordHandle>& handles) const {
  HandleCheck result;
  for (const auto& h : handles) {
    result.any = true;
    try {
      if (decoders[i].dec.chip().descramble(h, scrambled) == content) result.ok = true;
    } catch (const ConfigError&) {
      // superseded handle
    }
  }
  return result;
}

void World::State::assess_injection(std::size_t i, const decoder::FrameTrace& trace, bool modified) {
  ++tally.messages;
  if (!trace.rejections.empty()) {
    ++tally.rejected;
    obs[i].rejected = true;
    return;
  }
  HandleCheck hc = check_handles(i, trace.handles);
  if (hc.ok) {
    ++tally.success;
    obs[i].derived = true;
  } else if (hc.any) {
    ++tally.mismatch;
    obs[i].mismatch = true;
  } else if (modified) {
    ++tally.success;
  } else {
    ++tally.accepted;
  }
}

void World::State::inject(std::size_t i, const decoder::ChipMessage& msg, bool modified) {
  decoder::FrameTrace trace = decoders[i].dec.inject(msg);
  tap(i, trace, false);
  assess_injection(i, trace, modified);
}

void World::State::forge(const Action& a, std::uint64_t epoch, const std::optional<Bytes>& known_r,
                         const std::optional<Bytes>& known_k) {
  DecoderSlot& slot = decoders[a.target];
  const std::size_t ca = slot.ca;
  crypto::KeyPair key = adv.rogue_key;
  EntityId sender_id{kRogueSenderId};
  if (a.stolen_key) {
    auto it = adv.sender_keys.find(ca);
    if (it == adv.sender_keys.end()) throw ConfigError("forge with a stolen key needs compromised sender keys");
    key = it->second;
    sender_id = head.config(ca).sender_id;
  }
  // The directory is public; the adversary reads it like any sender.
  const ttp::Directory directory = ttp.export_directory();
  decoder::ChipMessage load{decoder::ChipMessageKind::kLoadLtk, epoch, {}};
  decoder::ChipMessage derive{decoder::ChipMessageKind::kDerive, epoch, {}};

  if (kind_of(ca) == ProtocolKind::kProtocolTwo) {
    p2::Sender sender(suite, sender_id, key);
    sender.load_directory(directory, ttp.public_key());
    load.body = sender.phase1(slot.id, adv.rng).serialize();
    Bytes r = known_r ? *known_r : adv.rng.generate(suite.secret_bytes());
    derive.body = decoder::encode_p2_derive(key.public_key, sender.phase2(slot.id, r));
  } else {
    ttp::Certificate cert;
    if (a.stolen_key) {
      cert = adv.sender_certs.at(ca);
    } else {
      // Without the TTP key the best the adversary can do is self-sign.
      const Bytes& signer = adv.ttp_key ? adv.ttp_key->private_key : key.private_key;
      std::uint32_t generation = adv.ttp_key ? adv.ttp_generation : ttp.generation();
      cert = ttp::issue_certificate(suite, signer, adv.rng.next_u64(), sender_id, ttp::Role::kSender, key.public_key,
                                    generation);
    }
    p1::Sender sender(suite, sender_id, key, cert);
    sender.load_directory(directory, ttp.public_key());
    load.body = sender.phase1(slot.id, adv.rng).serialize();
    binding::SharedSecret k{known_k ? *known_k : adv.rng.generate(suite.secret_bytes())};
    derive.body = sender.phase2(slot.id, k);
  }
  inject(a.target, load, false);
  inject(a.target, derive, false);
  sticky.insert(a.target);
}

void World::State::replay(const Action& a, std::uint64_t epoch) {
  const DecoderSlot& src = decoders[a.source];
  switch (a.message_class) {
    case MessageClass::kDerive:
      if (src.last_derive) inject(a.target, *src.last_derive, false);
      break;
    case MessageClass::kLoad:
      if (src.last_load) inject(a.target, *src.last_load, false);
      break;
    case MessageClass::kEcm: {
      auto it = previous_ecm.find(src.ca);
      if (it == previous_ecm.end()) break;
      wire::BroadcastFrame old;
      old.epoch = epoch;
      old.ecms.push_back(it->second);
      decoder::FrameTrace trace = decoders[a.target].dec.receive(old);
      tap(a.target, trace, false);
      if (trace.ecm_status.at(0) == decoder::MessageStatus::kIgnored) {
        ++tally.messages;
        ++tally.ignored;
      } else {
        assess_injection(a.target, trace, false);
      }
      break;
    }
    default: break;
  }
}

// ---------------------------------------------------------------------------

World::World(ScenarioConfig config) : s_(std::make_unique<State>(std::move(config))) { s_->setup(); }
World::~World() = default;
World::World(World&&) noexcept = default;
World& World::operator=(World&&) noexcept = default;

void World::adversary_step(Action action) {
  if (finished()) throw ConfigError("scenario has no epochs left");
  ScenarioConfig probe = s_->cfg;
  action.first_epoch = action.last_epoch = s_->records.size();
  probe.actions = {action};
  probe.validate();
  s_->queued.push_back(action);
}

bool World::finished() const { return s_->records.size() >= s_->cfg.epochs; }

const EpochRecord& World::step() {
  State& s = *s_;
  if (finished()) throw ConfigError("scenario has no epochs left");
  const std::uint64_t e = s.head.next_epoch();
  const std::size_t n = s.decoders.size();

  std::vector<Action> actions;
  for (const auto& a : s.cfg.actions) {
    if (a.active_at(e)) actions.push_back(a);
  }
  actions.insert(actions.end(), s.queued.begin(), s.queued.end());
  s.queued.clear();
  const std::uint64_t success_before = s.tally.success;

  // Control plane first, then this epoch's entitlements.
  for (const auto& a : actions) {
    switch (a.kind) {
      case ActionKind::kCompromise: s.compromise(a); break;
      case ActionKind::kRecover: s.recover(a.replace_chips); break;
      case ActionKind::kRotateTtp: s.rotate_ttp(); break;
      case ActionKind::kRotateSender: s.rotate_sender(a.ca); break;
      case ActionKind::kSwapClient: s.swap_client(a.target); break;
      default: break;
    }
  }
  EpochRecord rec;
  rec.epoch = e;
  rec.authorized = s.cfg.authorized_at(e);
  s.apply_authorization(rec.authorized);

  s.content = s.content_rng.generate(s.cfg.content_bytes);
  wire::BroadcastFrame frame = s.head.epoch_tick(s.content);
  s.record_frame(frame);
  s.scrambled = frame.scrambled_content;
  const Bytes k = s.head.last_control_word().k;

  // What the adversary learns from compromised CA clients: the ECM secret,
  // and K too since the key set is public.
  std::optional<Bytes> known_r;
  std::optional<Bytes> known_k;
  for (std::size_t ca : s.adv.client_cas) {
    if (s.kind_of(ca) == ProtocolKind::kProtocolTwo) known_r = s.head.last_r();
    known_k = k;
  }

  // Broadcast tampering.
  wire::BroadcastFrame view = frame;
  struct Tampered {
    bool ecm;
    std::size_t index;
  };
  std::vector<Tampered> tampered;
  for (const auto& a : actions) {
    if (a.kind != ActionKind::kTamper) continue;
    std::optional<std::size_t> index;
    bool ecm = false;
    if (a.message_class == MessageClass::kEcm) {
      ecm = true;
      index = a.ca;
      for (std::size_t d : s.cfg.cas[a.ca].decoders) rec.disrupted.insert(d);
    } else if (a.message_class == MessageClass::kEmmBroadcast || a.message_class == MessageClass::kEmmEnroll) {
      for (std::size_t j = 0; j < frame.emms.size() && !index; ++j) {
        wire::SealedEmm sealed = wire::emm_parse(frame.emms[j]);
        if (a.message_class == MessageClass::kEmmBroadcast) {
          if (sealed.ca_system_id == kCaSystemIdBase + a.ca && !wire::is_confidential(sealed.kind)) index = j;
        } else if (sealed.kind == wire::EmmKind::kPerReceiverEnroll && sealed.addressee == s.decoders[a.target].id) {
          index = j;
        }
      }
      if (index && a.message_class == MessageClass::kEmmBroadcast) {
        for (std::size_t d : s.cfg.cas[a.ca].decoders) s.sticky.insert(d);
      }
      if (index && a.message_class == MessageClass::kEmmEnroll) s.sticky.insert(a.target);
    } else {
      continue;
    }
    if (!index) continue;
    Bytes& target = ecm ? view.ecms.at(*index) : view.emms.at(*index);
    target = flip_bit(target, a.bit);
    tampered.push_back({ecm, *index});
  }

  // Chip channel tampering: the hook takes the message off the channel and
  // the modified bytes are written back afterwards.
  struct Hooked {
    const Action* action;
    std::shared_ptr<std::optional<decoder::ChipMessage>> captured;
  };
  std::map<std::size_t, Hooked> hooked;
  for (const auto& a : actions) {
    if (a.kind != ActionKind::kTamper) continue;
    if (a.message_class != MessageClass::kLoad && a.message_class != MessageClass::kDerive) continue;
    if (hooked.contains(a.target)) continue;
    auto captured = std::make_shared<std::optional<decoder::ChipMessage>>();
    auto kind = a.message_class == MessageClass::kLoad ? decoder::ChipMessageKind::kLoadLtk
                                                       : decoder::ChipMessageKind::kDerive;
    s.decoders[a.target].dec.set_hook(
        [captured, kind](const decoder::ChipMessage& m) -> std::optional<decoder::ChipMessage> {
          if (!*captured && m.kind == kind) {
            *captured = m;
            return std::nullopt;
          }
          return m;
        });
    hooked.emplace(a.target, Hooked{&a, captured});
  }

  s.obs.assign(n, Observation{});
  for (std::size_t i = 0; i < n; ++i) {
    decoder::FrameTrace trace = s.decoders[i].dec.receive(view);
    s.tap(i, trace, true);
    if (!trace.rejections.empty()) s.obs[i].rejected = true;
    State::HandleCheck hc = s.check_handles(i, trace.handles);
    if (hc.ok) s.obs[i].derived = true;
    if (hc.any && !hc.ok) s.obs[i].mismatch = true;

    for (const auto& t : tampered) {
      decoder::MessageStatus status = t.ecm ? trace.ecm_status.at(t.index) : trace.emm_status.at(t.index);
      ++s.tally.messages;
      switch (status) {
        case decoder::MessageStatus::kIgnored: ++s.tally.ignored; break;
        case decoder::MessageStatus::kRejected: ++s.tally.rejected; break;
        case decoder::MessageStatus::kAccepted: ++s.tally.success; break;
      }
    }

    auto h = hooked.find(i);
    if (h == hooked.end()) continue;
    s.decoders[i].dec.set_hook(nullptr);
    const Action& a = *h->second.action;
    const auto& original = *h->second.captured;
    if (!original) continue;
    if (a.message_class == MessageClass::kLoad)
      s.sticky.insert(i);
    else
      rec.disrupted.insert(i);
    Bytes bytes = flip_bit(original->serialize(), a.bit);
    decoder::ChipMessage modified;
    try {
      modified = decoder::ChipMessage::parse(bytes);
    } catch (const WireError&) {
      // The chip drops channel bytes that do not parse.
      ++s.tally.messages;
      ++s.tally.rejected;
      s.obs[i].rejected = true;
      continue;
    }
    // The epoch of a load message carries no meaning.
    bool changed = modified.kind != original->kind || modified.body != original->body ||
                   (modified.kind == decoder::ChipMessageKind::kDerive && modified.epoch != original->epoch);
    s.inject(i, modified, changed);
  }

  for (std::size_t src : s.adv.control_word_sources) {
    if (s.obs[src].derived) known_k = k;
  }

  for (const auto& a : actions) {
    switch (a.kind) {
      case ActionKind::kReplay: s.replay(a, e); break;
      case ActionKind::kInject: {
        Bytes body = known_k ? *known_k : s.adv.rng.generate(s.suite.secret_bytes());
        s.inject(a.target, {decoder::ChipMessageKind::kDerive, e, std::move(body)}, false);
        break;
      }
      case ActionKind::kForge: s.forge(a, e, known_r, known_k); break;
      default: break;
    }
  }

  for (std::size_t ca = 0; ca < frame.ecms.size(); ++ca) s.previous_ecm[ca] = frame.ecms[ca];
  rec.outcomes.resize(n);
  for (std::size_t i = 0; i < n; ++i) rec.outcomes[i] = s.obs[i].outcome();
  rec.disrupted.insert(s.sticky.begin(), s.sticky.end());
  rec.adversary_success = s.tally.success - success_before;
  s.records.push_back(std::move(rec));
  return s.records.back();
}

RunReport World::report() const {
  const State& s = *s_;
  RunReport r;
  r.scenario = s.cfg.name;
  r.seed = s.cfg.seed;
  r.secret_bits = s.cfg.secret_bits;
  r.decoders = s.cfg.decoders;
  r.cas = s.cfg.cas;
  r.actions = s.cfg.actions;
  r.epochs = s.records;
  r.ledger = s.ledger;
  r.adversary = s.tally;
  r.decoders_replaced = s.replaced.size();
  r.ttp_sender_certifications = s.ttp.sender_certifications();
  compute_verdicts(r);
  return r;
}

const ScenarioConfig& World::config() const { return s_->cfg; }
const headend::Headend& World::headend() const { return s_->head; }
const ttp::TrustedThirdParty& World::ttp() const { return s_->ttp; }
const decoder::Decoder& World::decoder(std::size_t index) const { return s_->decoders.at(index).dec; }
EntityId World::decoder_id(std::size_t index) const { return s_->decoders.at(index).id; }
const std::vector<wire::BroadcastFrame>& World::frames() const { return s_->frames; }
const std::vector<decoder::ChipMessage>& World::chip_channel(std::size_t index) const {
  return s_->decoders.at(index).channel;
}

RunReport run_scenario(const ScenarioConfig& config, std::vector<wire::BroadcastFrame>* capture) {
  World world(config);
  while (!world.finished()) world.step();
  if (capture != nullptr) *capture = world.frames();
  return world.report();
}

}  // namespace paytv::sim
