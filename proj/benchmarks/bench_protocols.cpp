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

#include <benchmark/benchmark.h>

#include <vector>

#include "paytv/binding.hpp"
#include "paytv/decoder.hpp"
#include "paytv/headend.hpp"
#include "paytv/protocol_one.hpp"
#include "paytv/protocol_two.hpp"
#include "paytv/sim.hpp"
#include "paytv/ttp.hpp"

using namespace paytv;

namespace {

struct Setup {
  crypto::Suite suite;
  Drbg rng = Drbg::from_u64(1);
  ttp::TrustedThirdParty ttp{suite, rng};
  EntityId receiver{0x1000};
  crypto::KeyPair receiver_key = crypto::keygen(suite, crypto::KeyPurpose::kEncryption, rng);

  Setup() { ttp.register_receiver(receiver, receiver_key.public_key); }
};

void BM_DeriveK(benchmark::State& state) {
  const auto senders = static_cast<std::size_t>(state.range(0));
  Drbg rng = Drbg::from_u64(2);
  binding::HInput in;
  in.r = rng.generate(16);
  for (std::size_t i = 0; i < senders; ++i) in.public_keys.push_back(rng.generate(32));
  in.public_keys = binding::canonical_key_set(in.public_keys);
  for (auto _ : state) benchmark::DoNotOptimize(binding::derive_k(in, 128));
}
BENCHMARK(BM_DeriveK)->Arg(1)->Arg(4)->Arg(16);

void BM_P1Phase1(benchmark::State& state) {
  Setup s;
  auto sender = p1::Sender::create(s.suite, EntityId{0x5000}, s.ttp, s.rng);
  sender.load_directory(s.ttp.export_directory(), s.ttp.public_key());
  p1::Receiver recv(s.suite, s.receiver, s.ttp.public_key(), s.receiver_key.private_key);
  for (auto _ : state) recv.phase1(sender.phase1(s.receiver, s.rng));
}
BENCHMARK(BM_P1Phase1);

void BM_P2Phase1(benchmark::State& state) {
  Setup s;
  p2::Sender sender(s.suite, EntityId{0x5000}, crypto::keygen(s.suite, crypto::KeyPurpose::kSignature, s.rng));
  sender.load_directory(s.ttp.export_directory(), s.ttp.public_key());
  p2::Receiver recv(s.suite, s.receiver, s.receiver_key.private_key);
  for (auto _ : state) recv.phase1(sender.phase1(s.receiver, s.rng));
}
BENCHMARK(BM_P2Phase1);

void BM_P1Phase2(benchmark::State& state) {
  Setup s;
  auto sender = p1::Sender::create(s.suite, EntityId{0x5000}, s.ttp, s.rng);
  sender.load_directory(s.ttp.export_directory(), s.ttp.public_key());
  p1::Receiver recv(s.suite, s.receiver, s.ttp.public_key(), s.receiver_key.private_key);
  recv.phase1(sender.phase1(s.receiver, s.rng));
  const binding::SharedSecret k{s.rng.generate(16)};
  for (auto _ : state) benchmark::DoNotOptimize(recv.phase2(sender.phase2(s.receiver, k)));
}
BENCHMARK(BM_P1Phase2);

void BM_P2Phase2(benchmark::State& state) {
  Setup s;
  p2::Sender sender(s.suite, EntityId{0x5000}, crypto::keygen(s.suite, crypto::KeyPurpose::kSignature, s.rng));
  sender.load_directory(s.ttp.export_directory(), s.ttp.public_key());
  p2::Receiver recv(s.suite, s.receiver, s.receiver_key.private_key);
  recv.phase1(sender.phase1(s.receiver, s.rng));
  for (auto _ : state) {
    const auto draw = p2::phase2_shared(s.suite, {sender.public_key()}, s.rng);
    benchmark::DoNotOptimize(recv.phase2(sender.public_key(), sender.phase2(s.receiver, draw.r)));
  }
}
BENCHMARK(BM_P2Phase2);

void BM_EpochTick(benchmark::State& state) {
  const auto kind = static_cast<headend::ProtocolKind>(state.range(0));
  const auto receivers = static_cast<std::size_t>(state.range(1));
  crypto::Suite suite;
  Drbg rng = Drbg::from_u64(3);
  ttp::TrustedThirdParty ttp(suite, rng);
  headend::Headend head(suite, rng.fork("headend"));
  for (std::size_t i = 0; i < receivers; ++i)
    ttp.register_receiver(EntityId{0x1000 + i}, crypto::keygen(suite, crypto::KeyPurpose::kEncryption, rng).public_key);
  head.add_ca_system({0x0100, kind, EntityId{0x5000}}, ttp);
  for (std::size_t i = 0; i < receivers; ++i) {
    head.provision_client(0, EntityId{0x1000 + i});
    head.enroll_receiver(0, EntityId{0x1000 + i});
    head.authorize(0, EntityId{0x1000 + i}, true);
  }
  const Bytes content(188, 0x47);
  for (auto _ : state) benchmark::DoNotOptimize(head.epoch_tick(content));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EpochTick)->Args({1, 8})->Args({2, 8})->Args({1, 64})->Args({2, 64});

void BM_ScenarioBaseline(benchmark::State& state) {
  const auto cfg = sim::parse_scenario(
      "decoders 8\nepochs 100\nca p2 all\nauthorize 0 d0-d4\nauthorize 50 d3-d7\n");
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(cfg));
}
BENCHMARK(BM_ScenarioBaseline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
