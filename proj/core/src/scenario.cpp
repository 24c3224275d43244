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

#include "paytv/scenario.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "paytv/error.hpp"

namespace paytv::sim {

const char* to_string(Component component) {
  switch (component) {
    case Component::kSenderKeys: return "sender_keys";
    case Component::kTtpKey: return "ttp_key";
    case Component::kCaClient: return "ca_client";
    case Component::kControlWord: return "control_word";
  }
  return "unknown";
}

const char* to_string(MessageClass cls) {
  switch (cls) {
    case MessageClass::kEcm: return "ecm";
    case MessageClass::kEmmBroadcast: return "emm_broadcast";
    case MessageClass::kEmmEnroll: return "emm_enroll";
    case MessageClass::kLoad: return "load";
    case MessageClass::kDerive: return "derive";
  }
  return "unknown";
}

namespace {

std::string dec(std::size_t i) { return "d" + std::to_string(i); }
std::string ca_name(std::size_t i) { return "ca" + std::to_string(i); }

}  // namespace

std::string Action::describe() const {
  switch (kind) {
    case ActionKind::kCompromise: {
      std::string s = std::string("compromise ") + to_string(component);
      if (component == Component::kSenderKeys) s += " " + ca_name(ca);
      if (component == Component::kCaClient || component == Component::kControlWord) s += " " + dec(target);
      return s;
    }
    case ActionKind::kRecover: return replace_chips ? "recover" : "recover noreplace";
    case ActionKind::kRotateTtp: return "rotate_ttp";
    case ActionKind::kRotateSender: return "rotate_sender " + ca_name(ca);
    case ActionKind::kSwapClient: return "swap_client " + dec(target);
    case ActionKind::kTamper: {
      std::string s = std::string("tamper ") + to_string(message_class) + " " + std::to_string(bit) + " ";
      bool by_ca = message_class == MessageClass::kEcm || message_class == MessageClass::kEmmBroadcast;
      return s + (by_ca ? ca_name(ca) : dec(target));
    }
    case ActionKind::kReplay: return "replay " + dec(source) + " " + dec(target) + " " + to_string(message_class);
    case ActionKind::kInject: return "inject " + dec(target) + " raw_k";
    case ActionKind::kForge: return "forge " + dec(target) + (stolen_key ? " stolen" : " rogue");
  }
  return "unknown";
}

std::string format_decoder_set(const std::set<std::size_t>& decoders) {
  if (decoders.empty()) return "none";
  std::string out;
  for (auto it = decoders.begin(); it != decoders.end();) {
    std::size_t first = *it;
    std::size_t last = first;
    ++it;
    while (it != decoders.end() && *it == last + 1) last = *it++;
    if (!out.empty()) out += ",";
    out += dec(first);
    if (last != first) out += "-" + dec(last);
  }
  return out;
}

std::size_t ScenarioConfig::ca_of(std::size_t decoder) const {
  for (std::size_t i = 0; i < cas.size(); ++i) {
    if (cas[i].decoders.contains(decoder)) return i;
  }
  throw ConfigError(dec(decoder) + " belongs to no CA system");
}

std::set<std::size_t> ScenarioConfig::authorized_at(std::uint64_t epoch) const {
  std::set<std::size_t> current;
  for (const auto& change : authorizations) {
    if (change.epoch > epoch) break;
    current = change.decoders;
  }
  return current;
}

void ScenarioConfig::validate() const {
  if (decoders == 0) throw ConfigError("scenario needs at least one decoder");
  if (epochs == 0) throw ConfigError("scenario needs at least one epoch");
  if (content_bytes == 0) throw ConfigError("content_bytes must be positive");
  if (secret_bits != 128 && secret_bits != 192 && secret_bits != 256)
    throw ConfigError("secret_bits must be 128, 192 or 256");
  if (cas.empty()) throw ConfigError("scenario needs at least one CA system");
  if (cas.size() > 0xFF) throw ConfigError("too many CA systems");

  std::vector<int> owner(decoders, -1);
  for (std::size_t i = 0; i < cas.size(); ++i) {
    for (std::size_t d : cas[i].decoders) {
      if (d >= decoders) throw ConfigError(dec(d) + " does not exist");
      if (owner[d] >= 0) throw ConfigError(dec(d) + " is assigned to two CA systems");
      owner[d] = static_cast<int>(i);
    }
  }
  for (std::size_t d = 0; d < decoders; ++d) {
    if (owner[d] < 0) throw ConfigError(dec(d) + " belongs to no CA system");
  }

  for (std::size_t i = 0; i < authorizations.size(); ++i) {
    const auto& change = authorizations[i];
    if (change.epoch >= epochs) throw ConfigError("authorize epoch is past the end of the run");
    if (i > 0 && change.epoch <= authorizations[i - 1].epoch)
      throw ConfigError("authorize lines must have strictly increasing epochs");
    for (std::size_t d : change.decoders) {
      if (d >= decoders) throw ConfigError(dec(d) + " does not exist");
    }
  }

  auto need_decoder = [&](std::size_t d) {
    if (d >= decoders) throw ConfigError(dec(d) + " does not exist");
  };
  auto need_keyed_ca = [&](std::size_t ca) {
    if (ca >= cas.size()) throw ConfigError(ca_name(ca) + " does not exist");
    if (cas[ca].kind == headend::ProtocolKind::kLegacy) throw ConfigError(ca_name(ca) + " is a legacy CA system");
  };
  for (const auto& a : actions) {
    if (a.first_epoch > a.last_epoch) throw ConfigError("empty epoch range");
    if (a.last_epoch >= epochs) throw ConfigError("action epoch is past the end of the run");
    switch (a.kind) {
      case ActionKind::kCompromise:
        if (a.component == Component::kSenderKeys) need_keyed_ca(a.ca);
        if (a.component == Component::kCaClient || a.component == Component::kControlWord) need_decoder(a.target);
        break;
      case ActionKind::kRecover:
      case ActionKind::kRotateTtp: break;
      case ActionKind::kRotateSender: need_keyed_ca(a.ca); break;
      case ActionKind::kSwapClient: need_decoder(a.target); break;
      case ActionKind::kTamper:
        if (a.message_class == MessageClass::kEcm || a.message_class == MessageClass::kEmmBroadcast) {
          if (a.ca >= cas.size()) throw ConfigError(ca_name(a.ca) + " does not exist");
        } else {
          need_decoder(a.target);
        }
        break;
      case ActionKind::kReplay:
        need_decoder(a.source);
        need_decoder(a.target);
        if (a.source == a.target) throw ConfigError("replay needs two different decoders");
        if (a.message_class != MessageClass::kDerive && a.message_class != MessageClass::kLoad &&
            a.message_class != MessageClass::kEcm)
          throw ConfigError("replay supports derive, load and ecm");
        break;
      case ActionKind::kInject: need_decoder(a.target); break;
      case ActionKind::kForge:
        need_decoder(a.target);
        if (cas[ca_of(a.target)].kind == headend::ProtocolKind::kLegacy)
          throw ConfigError("forge needs a decoder of a protocol one or two CA system");
        break;
    }
  }
}

namespace {

class LineParser {
 public:
  LineParser(std::vector<std::string> tokens, std::size_t line) : tokens_(std::move(tokens)), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + what);
  }

  bool done() const { return pos_ == tokens_.size(); }

  const std::string& word(const char* what) {
    if (done()) fail(std::string("missing ") + what);
    return tokens_[pos_++];
  }

  std::optional<std::string> optional_word() {
    if (done()) return std::nullopt;
    return tokens_[pos_++];
  }

  void finish() const {
    if (!done()) fail("unexpected '" + tokens_[pos_] + "'");
  }

  std::uint64_t number(const std::string& text, const char* what) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
      fail(std::string("bad ") + what + " '" + text + "'");
    return v;
  }

  std::uint64_t number(const char* what) { return number(word(what), what); }

  std::size_t prefixed(const std::string& text, std::string_view prefix, const char* what) const {
    if (text.size() <= prefix.size() || text.compare(0, prefix.size(), prefix) != 0)
      fail(std::string("expected ") + what + " as " + std::string(prefix) + "N, got '" + text + "'");
    return static_cast<std::size_t>(number(text.substr(prefix.size()), what));
  }

  std::size_t decoder() { return prefixed(word("decoder"), "d", "decoder"); }
  std::size_t ca() { return prefixed(word("CA system"), "ca", "CA system"); }

  std::set<std::size_t> decoder_set(std::size_t count) {
    const std::string& text = word("decoder set");
    std::set<std::size_t> out;
    if (text == "none") return out;
    if (text == "all") {
      for (std::size_t i = 0; i < count; ++i) out.insert(i);
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto dash = item.find('-');
      if (dash == std::string::npos) {
        out.insert(prefixed(item, "d", "decoder"));
        continue;
      }
      std::size_t first = prefixed(item.substr(0, dash), "d", "decoder");
      std::size_t last = prefixed(item.substr(dash + 1), "d", "decoder");
      if (last < first) fail("decoder range '" + item + "' is reversed");
      for (std::size_t i = first; i <= last; ++i) out.insert(i);
    }
    return out;
  }

  MessageClass message_class() {
    const std::string& text = word("message class");
    for (auto cls : {MessageClass::kEcm, MessageClass::kEmmBroadcast, MessageClass::kEmmEnroll, MessageClass::kLoad,
                     MessageClass::kDerive}) {
      if (text == to_string(cls)) return cls;
    }
    fail("unknown message class '" + text + "'");
  }

 private:
  std::vector<std::string> tokens_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

Action parse_action(LineParser& p) {
  Action a;
  std::string range = p.word("epoch");
  auto dots = range.find("..");
  if (dots == std::string::npos) {
    a.first_epoch = a.last_epoch = p.number(range, "epoch");
  } else {
    a.first_epoch = p.number(range.substr(0, dots), "epoch");
    a.last_epoch = p.number(range.substr(dots + 2), "epoch");
  }

  const std::string verb = p.word("action");
  if (verb == "compromise") {
    a.kind = ActionKind::kCompromise;
    const std::string what = p.word("component");
    if (what == "sender_keys") {
      a.component = Component::kSenderKeys;
      a.ca = p.ca();
    } else if (what == "ttp_key") {
      a.component = Component::kTtpKey;
    } else if (what == "ca_client") {
      a.component = Component::kCaClient;
      a.target = p.decoder();
    } else if (what == "control_word") {
      a.component = Component::kControlWord;
      a.target = p.decoder();
    } else {
      p.fail("unknown component '" + what + "'");
    }
  } else if (verb == "recover") {
    a.kind = ActionKind::kRecover;
    if (auto opt = p.optional_word()) {
      if (*opt != "noreplace") p.fail("unknown recover option '" + *opt + "'");
      a.replace_chips = false;
    }
  } else if (verb == "rotate_ttp") {
    a.kind = ActionKind::kRotateTtp;
  } else if (verb == "rotate_sender") {
    a.kind = ActionKind::kRotateSender;
    a.ca = p.ca();
  } else if (verb == "swap_client") {
    a.kind = ActionKind::kSwapClient;
    a.target = p.decoder();
  } else if (verb == "tamper") {
    a.kind = ActionKind::kTamper;
    a.message_class = p.message_class();
    a.bit = static_cast<std::uint32_t>(p.number("bit"));
    if (a.message_class == MessageClass::kEcm || a.message_class == MessageClass::kEmmBroadcast)
      a.ca = p.ca();
    else
      a.target = p.decoder();
  } else if (verb == "replay") {
    a.kind = ActionKind::kReplay;
    a.source = p.decoder();
    a.target = p.decoder();
    a.message_class = p.message_class();
  } else if (verb == "inject") {
    a.kind = ActionKind::kInject;
    a.target = p.decoder();
    if (p.word("payload") != "raw_k") p.fail("inject supports raw_k only");
  } else if (verb == "forge") {
    a.kind = ActionKind::kForge;
    a.target = p.decoder();
    const std::string key = p.word("key source");
    if (key == "stolen")
      a.stolen_key = true;
    else if (key != "rogue")
      p.fail("forge key source must be rogue or stolen");
  } else {
    p.fail("unknown action '" + verb + "'");
  }
  p.finish();
  return a;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, std::string_view default_name) {
  ScenarioConfig cfg;
  cfg.name = std::string(default_name);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool have_decoders = false;
  // ca and authorize lines may refer to `all`, so they wait for the counts.
  std::vector<std::pair<std::size_t, std::vector<std::string>>> deferred;

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (tokens.empty()) continue;

    LineParser p(tokens, line_no);
    const std::string key = p.word("directive");
    if (key == "name") {
      cfg.name = p.word("name");
    } else if (key == "seed") {
      cfg.seed = p.number("seed");
    } else if (key == "decoders") {
      cfg.decoders = static_cast<std::size_t>(p.number("decoder count"));
      have_decoders = true;
    } else if (key == "epochs") {
      cfg.epochs = p.number("epoch count");
    } else if (key == "content_bytes") {
      cfg.content_bytes = static_cast<std::size_t>(p.number("content size"));
    } else if (key == "secret_bits") {
      cfg.secret_bits = static_cast<std::size_t>(p.number("secret length"));
    } else if (key == "ca" || key == "authorize") {
      deferred.emplace_back(line_no, tokens);
      continue;
    } else if (key == "at") {
      cfg.actions.push_back(parse_action(p));
      continue;
    } else {
      p.fail("unknown directive '" + key + "'");
    }
    p.finish();
  }
  if (!have_decoders) throw ConfigError("scenario has no decoders line");

  for (const auto& [line, tokens] : deferred) {
    LineParser p(tokens, line);
    const std::string key = p.word("directive");
    if (key == "ca") {
      CaSpec spec;
      try {
        spec.kind = headend::parse_protocol(p.word("protocol"));
      } catch (const ConfigError& e) {
        p.fail(e.what());
      }
      spec.decoders = p.decoder_set(cfg.decoders);
      cfg.cas.push_back(std::move(spec));
    } else {
      AuthorizationChange change;
      change.epoch = p.number("epoch");
      change.decoders = p.decoder_set(cfg.decoders);
      cfg.authorizations.push_back(std::move(change));
    }
    p.finish();
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), std::filesystem::path(path).stem().string());
}

}  // namespace paytv::sim
