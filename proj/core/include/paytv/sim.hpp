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

#pragma once

// Deterministic scenario runner. One World holds the TTP, the head-end, the
// decoders and the adversary; every epoch it applies the scripted actions,
// broadcasts a frame, lets each decoder process it and records what every
// decoder ended up with.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "paytv/decoder.hpp"
#include "paytv/drbg.hpp"
#include "paytv/headend.hpp"
#include "paytv/scenario.hpp"
#include "paytv/ttp.hpp"
#include "paytv/wire.hpp"

namespace paytv::sim {

/// Per decoder and epoch. kMismatch: the chip produced a control word that
/// does not descramble the content.
enum class Outcome : std::uint8_t { kDerived, kExcluded, kRejected, kMismatch };
const char* to_string(Outcome outcome);

enum class Verdict : std::uint8_t { kPass, kFail, kNotApplicable };
const char* to_string(Verdict verdict);

struct BandwidthLedger {
  std::uint64_t ecm_bytes = 0;
  std::uint64_t emm_broadcast_bytes = 0;
  std::uint64_t emm_per_receiver_bytes = 0;
  std::uint64_t content_bytes = 0;
  // Inside decoders; never part of the broadcast total.
  std::uint64_t chip_channel_bytes = 0;

  std::uint64_t broadcast_total() const {
    return ecm_bytes + emm_broadcast_bytes + emm_per_receiver_bytes + content_bytes;
  }
  void add_frame(const wire::BroadcastFrame& frame);
  friend bool operator==(const BandwidthLedger&, const BandwidthLedger&) = default;
};

/// Fate of adversarial messages, counted per receiving decoder.
struct AdversaryTally {
  std::uint64_t messages = 0;
  std::uint64_t ignored = 0;   // not addressed to the decoder
  std::uint64_t rejected = 0;
  std::uint64_t accepted = 0;  // processed without yielding a control word
  std::uint64_t mismatch = 0;  // yielded a control word other than K
  std::uint64_t success = 0;   // descrambled content, or a modified message was accepted
  friend bool operator==(const AdversaryTally&, const AdversaryTally&) = default;
};

struct EpochRecord {
  std::uint64_t epoch = 0;
  std::set<std::size_t> authorized;
  // Decoders whose honest traffic the adversary altered, dropped or
  // overwrote; they are allowed to miss K.
  std::set<std::size_t> disrupted;
  std::vector<Outcome> outcomes;  // indexed by decoder
  std::uint64_t adversary_success = 0;

  std::set<std::size_t> with(Outcome outcome) const;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t secret_bits = 0;
  std::size_t decoders = 0;
  std::vector<CaSpec> cas;
  std::vector<Action> actions;
  std::vector<EpochRecord> epochs;
  BandwidthLedger ledger;
  AdversaryTally adversary;
  std::size_t decoders_replaced = 0;
  std::size_t ttp_sender_certifications = 0;
  Verdict implicit_key_auth = Verdict::kNotApplicable;
  Verdict authenticity = Verdict::kNotApplicable;
  Verdict recovery_success = Verdict::kNotApplicable;

  bool all_pass() const;
  /// Line-oriented text with a fixed field order.
  std::string serialize() const;
};

/// Computes the three verdicts from the epoch records.
void compute_verdicts(RunReport& report);

class World {
 public:
  explicit World(ScenarioConfig config);
  ~World();
  World(World&&) noexcept;
  World& operator=(World&&) noexcept;

  /// Schedules an extra action for the next epoch. Throws ConfigError if it
  /// references an entity that does not exist.
  void adversary_step(Action action);

  /// Runs one epoch: authorization changes, scripted actions, broadcast,
  /// decoder processing, injections. Throws ConfigError past the last epoch.
  const EpochRecord& step();
  bool finished() const;

  /// Report over the epochs run so far.
  RunReport report() const;

  const ScenarioConfig& config() const;
  const headend::Headend& headend() const;
  const ttp::TrustedThirdParty& ttp() const;
  const decoder::Decoder& decoder(std::size_t index) const;
  EntityId decoder_id(std::size_t index) const;
  /// Every frame broadcast so far, including maintenance frames.
  const std::vector<wire::BroadcastFrame>& frames() const;
  /// Every message on the chip channel of a decoder so far, in order.
  const std::vector<decoder::ChipMessage>& chip_channel(std::size_t index) const;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

RunReport run_scenario(const ScenarioConfig& config, std::vector<wire::BroadcastFrame>* capture = nullptr);

}  // namespace paytv::sim
