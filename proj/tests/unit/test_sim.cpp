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

#include <doctest.h>

#include <string>

#include "paytv/error.hpp"
#include "paytv/sim.hpp"
#include "paytv/wire.hpp"
#include "test_support.hpp"

using namespace paytv;
using namespace paytv::sim;

namespace {

ScenarioConfig config(const std::string& text) { return parse_scenario(text, "t"); }

const MessageClass kReplayable[] = {MessageClass::kDerive, MessageClass::kLoad, MessageClass::kEcm};

}  // namespace

TEST_CASE("runs are deterministic in the seed") {
  const auto cfg = parse_scenario(test::read_text(test::scenario_path("simulcrypt-mixed.scn")));
  std::vector<wire::BroadcastFrame> a_frames;
  std::vector<wire::BroadcastFrame> b_frames;
  const auto a = run_scenario(cfg, &a_frames);
  const auto b = run_scenario(cfg, &b_frames);
  CHECK(a.serialize() == b.serialize());
  CHECK(wire::encode_capture(a_frames) == wire::encode_capture(b_frames));

  auto other = cfg;
  other.seed += 1;
  std::vector<wire::BroadcastFrame> c_frames;
  const auto c = run_scenario(other, &c_frames);
  CHECK(c.epochs.size() == a.epochs.size());
  CHECK(wire::encode_capture(c_frames) != wire::encode_capture(a_frames));
}

TEST_CASE("report serialization layout") {
  const auto r = run_scenario(config("seed 2\ndecoders 3\nepochs 2\nca p2 all\nauthorize 0 d1\n"));
  const std::string text = r.serialize();
  CHECK(text.starts_with("report v1\nscenario t\nseed 2\nsecret_bits 128\ndecoders 3\nepochs 2\nca 0 p2 d0-d2\n"));
  CHECK(text.find("epoch 1 authorized=d1 derived=d1 excluded=d0,d2 rejected=none mismatch=none disrupted=none\n") !=
        std::string::npos);
  CHECK(text.find("verdict implicit_key_auth pass\n") != std::string::npos);
  CHECK(text.find("verdict recovery_success n/a\n") != std::string::npos);
  CHECK(r.all_pass());
  CHECK(r.ledger.broadcast_total() ==
        r.ledger.ecm_bytes + r.ledger.emm_broadcast_bytes + r.ledger.emm_per_receiver_bytes + r.ledger.content_bytes);
}

TEST_CASE("replays between decoders never descramble") {
  for (const char* proto : {"p1", "p2"}) {
    for (auto cls : kReplayable) {
      World w(config(std::string("seed 4\ndecoders 4\nepochs 6\nca ") + proto + " all\nauthorize 0 d0-d1\n"));
      w.step();
      while (!w.finished()) {
        for (std::size_t src = 0; src < 4; ++src)
          for (std::size_t dst = 0; dst < 4; ++dst) {
            if (src == dst) continue;
            Action a;
            a.kind = ActionKind::kReplay;
            a.source = src;
            a.target = dst;
            a.message_class = cls;
            w.adversary_step(a);
          }
        const auto& rec = w.step();
        CAPTURE(std::string(proto));
        CAPTURE(std::string(to_string(cls)));
        CHECK(rec.adversary_success == 0);
        CHECK(rec.with(Outcome::kDerived) == std::set<std::size_t>{0, 1});
      }
      const auto r = w.report();
      CHECK(r.adversary.success == 0);
      CHECK(r.adversary.messages > 0);
      CHECK(r.all_pass());
    }
  }
}

TEST_CASE("SimulCrypt: each decoder follows its own CA system") {
  const auto cfg = config(
      "seed 8\ndecoders 6\nepochs 8\n"
      "ca p1 d0-d1\nca p2 d2-d3\nca legacy d4-d5\n"
      "authorize 0 d0,d2,d4\nauthorize 4 d1,d3,d5\n");
  World w(cfg);
  while (!w.finished()) {
    const auto& rec = w.step();
    CHECK(rec.with(Outcome::kDerived) == rec.authorized);
  }
  CHECK(w.frames().front().ecms.size() == 3);
  for (std::size_t i = 0; i < 6; ++i) CHECK(w.decoder(i).chip().kind() == cfg.cas[cfg.ca_of(i)].kind);
  CHECK(w.report().all_pass());
}

TEST_CASE("a tampered ECM is rejected by every compliant decoder of its CA system") {
  for (const char* proto : {"p1", "p2"}) {
    Drbg rng = Drbg::from_u64(31);
    World w(config(std::string("seed 6\ndecoders 3\nepochs 70\nca ") + proto + " all\nauthorize 0 all\n"));
    w.step();
    const std::size_t ecm_bits = w.frames().back().ecms[0].size() * 8;
    for (std::size_t bit : test::sample_bits(ecm_bits, 64, rng)) {
      if (w.finished()) break;
      Action a;
      a.kind = ActionKind::kTamper;
      a.message_class = MessageClass::kEcm;
      a.bit = static_cast<std::uint32_t>(bit);
      w.adversary_step(a);
      const auto& rec = w.step();
      CAPTURE(bit);
      CHECK(rec.with(Outcome::kRejected) == std::set<std::size_t>{0, 1, 2});
      CHECK(rec.adversary_success == 0);
    }
    CHECK(w.report().adversary.rejected == w.report().adversary.messages);
  }
}

TEST_CASE("negative control: P1 recovery without chip replacement fails") {
  const std::string base =
      "seed 3\ndecoders 4\nepochs 20\nca p1 all\nauthorize 0 d0-d1\n"
      "at 5 compromise ttp_key\nat 5 compromise sender_keys ca0\n";
  const auto broken = run_scenario(config(base + "at 10 recover noreplace\n"));
  CHECK(broken.recovery_success == Verdict::kFail);
  CHECK(broken.decoders_replaced == 0);
  const auto fixed = run_scenario(config(base + "at 10 recover\n"));
  CHECK(fixed.recovery_success == Verdict::kPass);
  CHECK(fixed.decoders_replaced == 4);

  const auto p2 = run_scenario(config(
      "seed 3\ndecoders 4\nepochs 20\nca p2 all\nauthorize 0 d0-d1\n"
      "at 5 compromise sender_keys ca0\nat 10 recover noreplace\n"));
  CHECK(p2.recovery_success == Verdict::kPass);
}

TEST_CASE("negative control: legacy chips take raw control words") {
  const std::string tail = " all\nauthorize 0 d0\nat 0 compromise control_word d0\nat 1..9 inject d1 raw_k\n";
  const auto legacy = run_scenario(config("seed 9\ndecoders 2\nepochs 10\nca legacy" + tail));
  CHECK(legacy.adversary.success == 9);
  CHECK(legacy.authenticity == Verdict::kFail);
  for (const char* proto : {"p1", "p2"}) {
    const auto r = run_scenario(config(std::string("seed 9\ndecoders 2\nepochs 10\nca ") + proto + tail));
    CHECK(r.adversary.success == 0);
    CHECK(r.adversary.rejected == 9);
    CHECK(r.all_pass());
  }
}

TEST_CASE("rogue forging never derives the head-end key") {
  const auto r = run_scenario(config(
      "seed 12\ndecoders 3\nepochs 30\nca p2 all\nauthorize 0 d0\n"
      "at 0 compromise ca_client d0\nat 1..29 forge d1 rogue\nat 1..29 forge d2 rogue\n"));
  CHECK(r.adversary.messages == 116);  // load + derive per forge
  CHECK(r.adversary.success == 0);
  CHECK(r.all_pass());
}

TEST_CASE("world API errors") {
  World w(config("decoders 2\nepochs 1\nca p2 all\n"));
  Action bad;
  bad.kind = ActionKind::kSwapClient;
  bad.target = 5;
  CHECK_THROWS_AS(w.adversary_step(bad), ConfigError);
  w.step();
  CHECK(w.finished());
  CHECK_THROWS_AS(w.step(), ConfigError);
  CHECK_THROWS_AS(w.adversary_step(Action{}), ConfigError);
  CHECK(w.decoder_id(1) != w.decoder_id(0));
}

TEST_CASE("capture files round trip") {
  std::vector<wire::BroadcastFrame> frames;
  run_scenario(parse_scenario(test::read_text(test::scenario_path("rotation.scn"))), &frames);
  REQUIRE(frames.size() >= 40);
  const Bytes blob = wire::encode_capture(frames);
  CHECK(wire::sniff(blob) == wire::FileKind::kCapture);
  const auto back = wire::decode_capture(blob);
  REQUIRE(back.size() == frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) CHECK(back[i].serialize() == frames[i].serialize());
  CHECK_THROWS_AS(wire::decode_capture(ByteView(blob.data(), blob.size() - 1)), WireError);
}

TEST_CASE("chip channel transcript covers every delivered message") {
  World w(config("seed 1\ndecoders 2\nepochs 3\nca p2 all\nauthorize 0 all\n"));
  while (!w.finished()) w.step();
  // load_ltk once, then one derive per epoch.
  const auto& channel = w.chip_channel(0);
  REQUIRE(channel.size() == 4);
  CHECK(channel[0].kind == decoder::ChipMessageKind::kLoadLtk);
  for (std::size_t i = 1; i < 4; ++i) CHECK(channel[i].kind == decoder::ChipMessageKind::kDerive);
  std::uint64_t bytes = 0;
  for (std::size_t d = 0; d < 2; ++d)
    for (const auto& m : w.chip_channel(d)) bytes += m.serialize().size();
  CHECK(w.report().ledger.chip_channel_bytes == bytes);
}
