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

// Scenario files drive the simulator. One directive per line, '#' starts a
// comment:
//
//   name <word>                    default: file stem
//   seed <u64>                     default: 1
//   decoders <count>
//   epochs <count>
//   content_bytes <count>          default: 188
//   secret_bits <128|192|256>      default: 128
//   ca <p1|p2|legacy> <decoders>   one line per CA system, in order
//   authorize <epoch> <decoders>   authorized set from that epoch on
//   at <epoch>[..<epoch>] <action>
//
// <decoders> is `all`, `none` or a comma list of `dI` and `dI-dJ`.
// Actions:
//   compromise sender_keys caI | ttp_key | ca_client dI | control_word dI
//   recover [noreplace]
//   rotate_ttp
//   rotate_sender caI
//   swap_client dI
//   tamper <ecm|emm_broadcast> <bit> caI
//   tamper emm_enroll <bit> dI
//   tamper <load|derive> <bit> dI
//   replay dI dJ <derive|load|ecm>
//   inject dI raw_k
//   forge dI <rogue|stolen>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "paytv/headend.hpp"

namespace paytv::sim {

enum class ActionKind : std::uint8_t {
  kCompromise,
  kRecover,
  kRotateTtp,
  kRotateSender,
  kSwapClient,
  kTamper,
  kReplay,
  kInject,
  kForge,
};

enum class Component : std::uint8_t { kSenderKeys, kTtpKey, kCaClient, kControlWord };

enum class MessageClass : std::uint8_t { kEcm, kEmmBroadcast, kEmmEnroll, kLoad, kDerive };

const char* to_string(Component component);
const char* to_string(MessageClass cls);

struct Action {
  ActionKind kind = ActionKind::kRecover;
  std::uint64_t first_epoch = 0;
  std::uint64_t last_epoch = 0;
  Component component = Component::kSenderKeys;
  MessageClass message_class = MessageClass::kDerive;
  std::size_t ca = 0;
  std::size_t source = 0;  // decoder index
  std::size_t target = 0;  // decoder index
  std::uint32_t bit = 0;
  bool stolen_key = false;     // forge
  bool replace_chips = true;   // recover

  bool active_at(std::uint64_t epoch) const { return epoch >= first_epoch && epoch <= last_epoch; }
  /// Canonical text of the action without the epoch prefix.
  std::string describe() const;
};

struct CaSpec {
  headend::ProtocolKind kind = headend::ProtocolKind::kProtocolTwo;
  std::set<std::size_t> decoders;
};

struct AuthorizationChange {
  std::uint64_t epoch = 0;
  std::set<std::size_t> decoders;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::size_t decoders = 0;
  std::uint64_t epochs = 0;
  std::size_t content_bytes = 188;
  std::size_t secret_bits = 128;
  std::vector<CaSpec> cas;
  std::vector<AuthorizationChange> authorizations;  // ascending epochs
  std::vector<Action> actions;

  /// Throws ConfigError naming the first problem.
  void validate() const;
  /// CA index of a decoder.
  std::size_t ca_of(std::size_t decoder) const;
  /// Authorized set in force at `epoch`.
  std::set<std::size_t> authorized_at(std::uint64_t epoch) const;
};

/// Parses and validates a scenario. `default_name` is used without a `name`
/// line. Throws ConfigError with the line number on any error.
ScenarioConfig parse_scenario(std::string_view text, std::string_view default_name = "scenario");
ScenarioConfig load_scenario(const std::string& path);

/// Renders a decoder set in the `dI,dJ-dK` form; `none` when empty.
std::string format_decoder_set(const std::set<std::size_t>& decoders);

}  // namespace paytv::sim
