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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#define DOCTEST_CONFIG_DISABLE

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "paytv/binding.hpp"
#include "paytv/error.hpp"
#include "paytv/protocol_one.hpp"
#include "paytv/protocol_two.hpp"
#include "paytv/sim.hpp"
#include "paytv/wire.hpp"
#include "rig.hpp"
#include "test_support.hpp"
#include "vectors.hpp"

using namespace paytv;
using headend::ProtocolKind;
using sim::ActionKind;
using sim::MessageClass;
using sim::Outcome;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::filesystem::path> shipped_scenarios() {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(PAYTV_SCENARIO_DIR))
    if (entry.path().extension() == ".scn") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

sim::RunReport run_shipped(const std::string& stem) {
  return sim::run_scenario(sim::load_scenario(test::scenario_path(stem + ".scn")));
}

// 1 ------------------------------------------------------------------------

Result strength_grid() {
  const auto start = Clock::now();
  Result r;
  std::size_t cells = 0;
  for (std::uint32_t n : {128u, 192u, 256u, 511u}) {
    for (std::uint32_t k = 10; k <= 40; ++k) {
      const std::uint64_t len = std::uint64_t{1} << k;
      // log2(L / 2^10) is exactly k - 10 on this grid.
      const std::uint32_t want = std::min<std::uint32_t>(n, 512 - (k - 10));
      const std::uint32_t got = binding::second_preimage_strength(n, len);
      ++cells;
      if (got != want) {
        r.pass = false;
        r.detail = "n=" + std::to_string(n) + " L=2^" + std::to_string(k) + " got " + std::to_string(got);
        return r;
      }
      if (n <= 256 && got != n) {
        r.pass = false;
        r.detail = "n=" + std::to_string(n) + " is not full strength at L=2^" + std::to_string(k);
        return r;
      }
    }
  }
  // Largest input the artifact builds: 255 sender keys of 32 bytes after r.
  const std::uint64_t reachable = binding::h_input_bits(255, 32, 256);
  for (std::uint32_t n : {128u, 192u, 256u})
    if (binding::second_preimage_strength(n, reachable) != n) r.pass = false;
  const double secs = seconds_since(start);
  if (secs >= 1.0) r.pass = false;
  std::ostringstream d;
  d << cells << " cells exact, " << secs << " s";
  if (r.detail.empty()) r.detail = d.str();
  return r;
}

// 2 ------------------------------------------------------------------------

Result key_length() {
  Result r;
  const crypto::Suite suite{crypto::SuiteConfig{}};
  if (suite.secret_bits() != 128 || suite.secret_bytes() != 16) {
    return {false, "default secret length is " + std::to_string(suite.secret_bits()) + " bits"};
  }
  if (sim::parse_scenario("decoders 1\nepochs 1\nca p2 all\n").secret_bits != 128)
    return {false, "scenario default is not 128 bits"};

  test::Rig rig({{ProtocolKind::kProtocolOne, 1}, {ProtocolKind::kProtocolTwo, 1}, {ProtocolKind::kLegacy, 1}});
  rig.authorize_all();
  std::size_t checked = 0;
  for (int e = 0; e < 4; ++e) {
    rig.tick();
    const auto& frame = rig.frames.back();
    for (std::size_t ca = 0; ca < frame.ecms.size(); ++ca) {
      const auto keys = rig.head.provision_client(ca, test::Rig::id(ca)).keys;
      const wire::Ecm ecm = wire::ecm_decode(rig.suite, frame.ecms[ca], keys.group_key);
      if (ecm.secret.size() != 16) return {false, "ECM secret of " + std::to_string(ecm.secret.size()) + " bytes"};
      ++checked;
    }
    if (rig.head.last_control_word().k.size() != 16) return {false, "control word is not 16 bytes"};
  }
  r.detail = "n=128, " + std::to_string(checked) + " ECM secrets of 16 bytes";
  return r;
}

// 3 ------------------------------------------------------------------------

Result honest_end_to_end() {
  Result r;
  std::ostringstream d;
  for (const char* stem : {"baseline-p1", "baseline-p2"}) {
    const auto start = Clock::now();
    const auto cfg = sim::load_scenario(test::scenario_path(std::string(stem) + ".scn"));
    if (cfg.decoders != 8 || cfg.epochs != 100) return {false, std::string(stem) + " is not 8 x 100"};
    sim::World world(cfg);
    std::size_t descrambles = 0;
    while (!world.finished()) {
      const auto& rec = world.step();
      if (rec.epoch > 0 && rec.epoch % 10 == 0 && cfg.authorized_at(rec.epoch) == cfg.authorized_at(rec.epoch - 1))
        return {false, std::string(stem) + ": authorized set unchanged at epoch " + std::to_string(rec.epoch)};
      // Derived means the chip's K turned the scrambled content back into C.
      if (rec.with(Outcome::kDerived) != rec.authorized)
        return {false, std::string(stem) + ": epoch " + std::to_string(rec.epoch)};
      descrambles += rec.authorized.size();
    }
    const double secs = seconds_since(start);
    if (secs >= 10.0) r.pass = false;
    d << stem << " " << descrambles << " descrambles " << secs << " s; ";
  }
  r.detail = d.str();
  return r;
}

// 4 ------------------------------------------------------------------------

Result implicit_key_authentication() {
  Result r;
  std::size_t epochs = 0;
  const auto files = shipped_scenarios();
  for (const auto& path : files) {
    const auto report = sim::run_scenario(sim::load_scenario(path.string()));
    for (const auto& rec : report.epochs) {
      if (rec.with(Outcome::kDerived) != rec.authorized) {
        return {false, path.stem().string() + " epoch " + std::to_string(rec.epoch) + ": derived " +
                           sim::format_decoder_set(rec.with(Outcome::kDerived)) + " authorized " +
                           sim::format_decoder_set(rec.authorized)};
      }
      ++epochs;
    }
    if (report.implicit_key_auth != sim::Verdict::kPass) return {false, path.stem().string() + " verdict"};
  }
  r.detail = std::to_string(files.size()) + " scenarios, " + std::to_string(epochs) + " epochs";
  return r;
}

// 5 ------------------------------------------------------------------------

struct FlipTally {
  std::size_t trials = 0;
  std::size_t caught = 0;   // rejected or K mismatch
  std::size_t ignored = 0;  // of `caught`: refused as another CA system's message
  std::size_t unauthorized_descrambles = 0;
};

// Certificate and signed bundle flips, fed straight to the receiver.
template <typename Bundle, typename Recv>
void flip_bundle(const Bytes& wire, const std::vector<std::size_t>& bits, Recv make_receiver, FlipTally& t) {
  for (std::size_t bit : bits) {
    auto recv = make_receiver();
    ++t.trials;
    try {
      recv.phase1(Bundle::parse(test::flip_bit(wire, bit)));
    } catch (const Error&) {
      ++t.caught;
    }
  }
}

std::vector<std::size_t> sample_range(std::size_t first, std::size_t last, std::size_t count, Drbg& rng) {
  std::vector<std::size_t> out;
  for (std::size_t b : test::sample_bits(last - first, count, rng)) out.push_back(first + b);
  return out;
}

void flip_broadcast_pk(ProtocolKind kind, Drbg& rng, FlipTally& t) {
  test::Rig rig({{kind, 1}}, 21);
  const Bytes emm = rig.head.emm_frame().emms.at(0);
  const auto keys = rig.head.provision_client(0, test::Rig::id(0));
  for (std::size_t bit : test::sample_bits(emm.size() * 8, 64, rng)) {
    decoder::CaClient client(rig.suite, keys);
    ++t.trials;
    try {
      const auto out = client.process_emm(test::flip_bit(emm, bit));
      // A flipped CA id or addressee leaves the EMM for someone else.
      if (!out.addressed && out.messages.empty()) {
        ++t.caught;
        ++t.ignored;
      }
    } catch (const Error&) {
      ++t.caught;
    }
  }
}

void flip_in_world(const char* proto, MessageClass cls, Drbg& rng, FlipTally& t) {
  const std::string text = std::string("seed 23\ndecoders 3\nepochs 80\nca ") + proto + " all\nauthorize 0 d0-d1\n";
  sim::World world(sim::parse_scenario(text));
  world.step();
  const std::size_t bits = cls == MessageClass::kEcm ? world.frames().back().ecms.at(0).size() * 8
                                                     : world.chip_channel(0).back().serialize().size() * 8;
  for (std::size_t bit : test::sample_bits(bits, 64, rng)) {
    sim::Action a;
    a.kind = ActionKind::kTamper;
    a.message_class = cls;
    a.bit = static_cast<std::uint32_t>(bit);
    a.ca = 0;
    a.target = 0;
    world.adversary_step(a);
    const std::uint64_t ignored_before = world.report().adversary.ignored;
    const auto& rec = world.step();
    const bool ignored = world.report().adversary.ignored - ignored_before == rec.outcomes.size();
    ++t.trials;
    const Outcome o = rec.outcomes.at(0);
    if (rec.adversary_success == 0) {
      // A flipped CA id names a CA system no decoder belongs to.
      if (o == Outcome::kRejected || o == Outcome::kMismatch) {
        ++t.caught;
      } else if (o == Outcome::kExcluded && ignored) {
        ++t.caught;
        ++t.ignored;
      }
    }
    const auto derived = rec.with(Outcome::kDerived);
    if (!std::includes(rec.authorized.begin(), rec.authorized.end(), derived.begin(), derived.end()))
      ++t.unauthorized_descrambles;
  }
}

Result message_authenticity() {
  Drbg rng = Drbg::from_u64(5005);
  std::map<std::string, FlipTally> tallies;

  {
    test::Universe u(1, 41);
    auto sender = u.p1_sender();
    const Bytes wire = sender.phase1(u.ids[0], u.rng).serialize();
    const std::size_t cert_bits = 8 * (4 + sender.certificate().serialize().size());
    auto recv = [&] { return u.p1_receiver(0); };
    flip_bundle<p1::Phase1Bundle>(wire, sample_range(0, cert_bits, 64, rng), recv, tallies["certificate"]);
    flip_bundle<p1::Phase1Bundle>(wire, sample_range(cert_bits, wire.size() * 8, 64, rng), recv,
                                  tallies["signed bundle"]);
  }
  {
    test::Universe u(1, 42);
    auto sender = u.p2_sender();
    const Bytes wire = sender.phase1(u.ids[0], u.rng).serialize();
    flip_bundle<p2::Phase1Bundle>(wire, test::sample_bits(wire.size() * 8, 64, rng), [&] { return u.p2_receiver(0); },
                                  tallies["signed bundle"]);
  }
  flip_broadcast_pk(ProtocolKind::kProtocolOne, rng, tallies["PK broadcast"]);
  flip_broadcast_pk(ProtocolKind::kProtocolTwo, rng, tallies["PK broadcast"]);
  for (const char* proto : {"p1", "p2"}) {
    flip_in_world(proto, MessageClass::kEcm, rng, tallies["ECM"]);
    flip_in_world(proto, MessageClass::kDerive, rng, tallies["chip derive"]);
  }

  Result r;
  std::ostringstream d;
  for (const auto& [name, t] : tallies) {
    d << name << " " << t.caught << "/" << t.trials;
    if (t.ignored > 0) d << " (" << t.ignored << " ignored as foreign)";
    d << "; ";
    if (t.trials < 64 || t.caught != t.trials || t.unauthorized_descrambles != 0) r.pass = false;
  }
  r.detail = d.str();
  return r;
}

// 6 ------------------------------------------------------------------------

Result redistribution() {
  Result r;
  std::ostringstream d;
  for (const char* stem : {"redistribution-p1", "redistribution-p2"}) {
    const auto report = run_shipped(stem);
    bool knows_k = false;
    for (const auto& a : report.actions)
      if (a.kind == ActionKind::kCompromise && a.component == sim::Component::kControlWord) knows_k = true;
    std::size_t target_derived = 0;
    for (const auto& rec : report.epochs)
      if (!rec.authorized.contains(2) && rec.outcomes.at(2) == Outcome::kDerived) ++target_derived;
    if (!knows_k || report.adversary.success != 0 || target_derived != 0 || report.adversary.messages == 0)
      r.pass = false;
    d << stem << " " << report.adversary.messages << " messages, " << report.adversary.success << " successes; ";
  }
  r.detail = d.str();
  return r;
}

// 7 ------------------------------------------------------------------------

Result cross_sender_binding() {
  auto cfg = sim::load_scenario(test::scenario_path("rogue-sender-p2.scn"));
  std::size_t good = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    // Simulator: a rogue sender with a compromised CA client's r.
    cfg.seed = 1000 + trial;
    const auto report = sim::run_scenario(cfg);
    bool ok = report.adversary.success == 0 && report.adversary.mismatch > 0;

    // Protocol level: the receiver's secret from A' messages against K.
    test::Universe u(1, 2000 + trial);
    auto sender = u.p2_sender();
    auto recv = u.p2_receiver(0);
    recv.phase1(sender.phase1(u.ids[0], u.rng));
    const auto draw = p2::phase2_shared(u.suite, {sender.public_key()}, u.rng);
    Drbg adv = Drbg::from_u64(3000 + trial);
    p2::Sender rogue(u.suite, EntityId{0xBAD0}, crypto::keygen(u.suite, crypto::KeyPurpose::kSignature, adv));
    rogue.load_directory(u.ttp.export_directory(), u.ttp.public_key());
    recv.phase1(rogue.phase1(u.ids[0], adv));
    const auto forged = recv.phase2(rogue.public_key(), rogue.phase2(u.ids[0], draw.r));
    ok = ok && forged != draw.k;
    if (ok) ++good;
  }
  return {good == 100, std::to_string(good) + "/100 trials with K' != K"};
}

// 8 ------------------------------------------------------------------------

Result recovery_contrast() {
  const auto p1 = run_shipped("recovery-p1");
  const auto p2 = run_shipped("recovery-p2");
  std::uint64_t recovered_at = 0;
  for (const auto& a : p2.actions)
    if (a.kind == ActionKind::kRecover) recovered_at = a.first_epoch;
  bool honest_after = recovered_at > 0;
  for (const auto& rec : p2.epochs) {
    if (rec.epoch < recovered_at) continue;
    if (rec.with(Outcome::kDerived) != rec.authorized || rec.adversary_success != 0) honest_after = false;
  }
  // Without replacement, P1 chips pinned to the old TTP key stop working.
  auto cfg = sim::load_scenario(test::scenario_path("recovery-p1.scn"));
  for (auto& a : cfg.actions)
    if (a.kind == ActionKind::kRecover) a.replace_chips = false;
  const auto p1_noreplace = sim::run_scenario(cfg);

  Result r;
  r.pass = p2.decoders_replaced == 0 && honest_after && p2.recovery_success == sim::Verdict::kPass &&
           p1.decoders_replaced == p1.decoders && p1.recovery_success == sim::Verdict::kPass &&
           p1_noreplace.recovery_success == sim::Verdict::kFail;
  std::ostringstream d;
  d << "P2 replaced " << p2.decoders_replaced << ", post-recovery " << (honest_after ? "honest" : "NOT honest")
    << "; P1 replaced " << p1.decoders_replaced << "/" << p1.decoders << ", without replacement recovery "
    << sim::to_string(p1_noreplace.recovery_success);
  r.detail = d.str();
  return r;
}

// 9 ------------------------------------------------------------------------

Result bandwidth_parity() {
  Result r;
  std::ostringstream d;
  for (const char* pair : {"baseline", "recovery"}) {
    const auto p1 = run_shipped(std::string(pair) + "-p1");
    const auto p2 = run_shipped(std::string(pair) + "-p2");
    if (p1.ledger.ecm_bytes != p2.ledger.ecm_bytes || p2.ledger.emm_broadcast_bytes > p1.ledger.emm_broadcast_bytes)
      r.pass = false;
    d << pair << " ECM " << p1.ledger.ecm_bytes << "=" << p2.ledger.ecm_bytes << " EMM broadcast P2 "
      << p2.ledger.emm_broadcast_bytes << " <= P1 " << p1.ledger.emm_broadcast_bytes << "; ";
  }
  r.detail = d.str();
  return r;
}

// 10 -----------------------------------------------------------------------

Result determinism() {
  Result r;
  std::size_t runs = 0;
  for (const auto& path : shipped_scenarios()) {
    const auto cfg = sim::load_scenario(path.string());
    std::vector<wire::BroadcastFrame> fa, fb;
    const std::string a = sim::run_scenario(cfg, &fa).serialize();
    const std::string b = sim::run_scenario(cfg, &fb).serialize();
    auto report_path = path;
    report_path.replace_extension(".report");
    if (a != b || wire::encode_capture(fa) != wire::encode_capture(fb) || a != test::read_text(report_path.string()))
      return {false, path.stem().string() + " is not reproducible"};
    runs += 2;
  }
  if (cli::golden_vectors() != test::read_text(test::data_path("golden_vectors.txt")))
    return {false, "golden vectors differ from the frozen file"};
  r.detail = std::to_string(runs) + " runs byte-identical, golden vectors match";
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"strength formula", strength_grid},
      {"key length", key_length},
      {"honest end-to-end", honest_end_to_end},
      {"implicit key authentication", implicit_key_authentication},
      {"message authenticity", message_authenticity},
      {"redistribution resistance", redistribution},
      {"cross-sender binding", cross_sender_binding},
      {"recovery contrast", recovery_contrast},
      {"bandwidth parity", bandwidth_parity},
      {"determinism and golden vectors", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << r.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
