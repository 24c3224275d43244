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

#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "paytv/binding.hpp"
#include "paytv/error.hpp"
#include "paytv/scenario.hpp"
#include "paytv/sim.hpp"
#include "paytv/ttp.hpp"
#include "paytv/wire.hpp"
#include "vectors.hpp"

namespace paytv::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw ConfigError("write to " + path + " failed");
}

void write_text(const std::string& path, const std::string& text) { write_file(path, to_bytes(text)); }

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv(kSeedVariable);
  if (v == nullptr || *v == '\0') return std::nullopt;
  std::string_view s(v);
  std::uint64_t seed = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError(std::string(kSeedVariable) + " is not an unsigned integer: " + v);
  return seed;
}

std::optional<std::uint64_t> effective_seed(const std::optional<std::uint64_t>& flag) {
  return flag ? flag : seed_from_env();
}

std::size_t first_difference(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  for (std::size_t line = 1;; ++line) {
    bool ha = static_cast<bool>(std::getline(sa, la));
    bool hb = static_cast<bool>(std::getline(sb, lb));
    if (!ha && !hb) return 0;
    if (ha != hb || la != lb) return line;
  }
}

struct RunOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string capture_path;
  std::string expect_path;
};

int do_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  sim::ScenarioConfig cfg = sim::load_scenario(o.scenario);
  if (auto seed = effective_seed(o.seed)) cfg.seed = *seed;
  std::vector<wire::BroadcastFrame> frames;
  sim::RunReport report = sim::run_scenario(cfg, o.capture_path.empty() ? nullptr : &frames);
  const std::string text = report.serialize();
  if (!o.capture_path.empty()) write_file(o.capture_path, wire::encode_capture(frames));
  if (o.out_path.empty())
    out << text;
  else
    write_text(o.out_path, text);

  int rc = kExitOk;
  if (!report.all_pass()) {
    err << "scenario " << cfg.name << ": a verdict failed\n";
    rc = kExitFailure;
  }
  if (!o.expect_path.empty()) {
    Bytes expected = read_file(o.expect_path);
    std::string want(expected.begin(), expected.end());
    if (std::size_t line = first_difference(text, want); line != 0) {
      err << "report differs from " << o.expect_path << " at line " << line << "\n";
      rc = kExitFailure;
    }
  }
  return rc;
}

struct TtpOptions {
  std::string state;
  std::optional<std::uint64_t> seed;
  std::size_t receivers = 0;
  std::string out_path;
};

crypto::Suite default_suite() { return crypto::Suite(crypto::SuiteConfig{}); }

ttp::TrustedThirdParty load_ttp(const std::string& path) {
  return ttp::TrustedThirdParty::parse_state(default_suite(), read_file(path));
}

int do_ttp_init(const TtpOptions& o, std::ostream& out) {
  const crypto::Suite suite = default_suite();
  Drbg rng = Drbg::from_u64(effective_seed(o.seed).value_or(1)).fork("ttp");
  ttp::TrustedThirdParty t(suite, rng);
  Drbg receivers = rng.fork("receivers");
  for (std::size_t i = 0; i < o.receivers; ++i) {
    crypto::KeyPair kp = crypto::keygen(suite, crypto::KeyPurpose::kEncryption, receivers);
    t.register_receiver(EntityId{0x1000 + i}, kp.public_key);
  }
  write_file(o.state, t.serialize_state());
  out << "generation " << t.generation() << "\n";
  out << "pk_t " << to_hex(t.public_key()) << "\n";
  out << "receivers " << t.receiver_registry().size() << "\n";
  return kExitOk;
}

int do_ttp_rotate(const TtpOptions& o, std::ostream& out) {
  ttp::TrustedThirdParty t = load_ttp(o.state);
  Drbg rng = Drbg::from_u64(effective_seed(o.seed).value_or(1)).fork("ttp-rotate-" + std::to_string(t.generation()));
  t.rotate(rng);
  write_file(o.state, t.serialize_state());
  out << "generation " << t.generation() << "\n";
  out << "pk_t " << to_hex(t.public_key()) << "\n";
  return kExitOk;
}

int do_ttp_export(const TtpOptions& o, std::ostream& out) {
  ttp::TrustedThirdParty t = load_ttp(o.state);
  Bytes dir = t.export_directory().serialize();
  if (o.out_path.empty()) {
    out << wire::describe(dir);
  } else {
    write_file(o.out_path, dir);
    out << "wrote " << dir.size() << " bytes to " << o.out_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pay-TV key establishment toolkit", "paytvctl"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and print its report");
  run_cmd->add_option("scenario", run.scenario, "Scenario file")->required();
  run_cmd->add_option("--seed", run.seed, std::string("Seed override; default from ") + kSeedVariable);
  run_cmd->add_option("--out", run.out_path, "Write the report here instead of stdout");
  run_cmd->add_option("--capture", run.capture_path, "Write the broadcast frames as a capture file");
  run_cmd->add_option("--expect", run.expect_path, "Fail unless the report equals this file");

  TtpOptions ttp_opts;
  auto* ttp_cmd = app.add_subcommand("ttp", "Trusted third party state");
  ttp_cmd->require_subcommand(1);
  auto* init_cmd = ttp_cmd->add_subcommand("init", "Create a TTP state file");
  init_cmd->add_option("--state", ttp_opts.state, "State file")->required();
  init_cmd->add_option("--seed", ttp_opts.seed, "Seed");
  init_cmd->add_option("--receivers", ttp_opts.receivers, "Register this many generated receiver keys");
  auto* rotate_cmd = ttp_cmd->add_subcommand("rotate", "Rotate the TTP key pair");
  rotate_cmd->add_option("--state", ttp_opts.state, "State file")->required();
  rotate_cmd->add_option("--seed", ttp_opts.seed, "Seed");
  auto* export_cmd = ttp_cmd->add_subcommand("export", "Export the signed receiver directory");
  export_cmd->add_option("--state", ttp_opts.state, "State file")->required();
  export_cmd->add_option("--out", ttp_opts.out_path, "Write the directory here instead of describing it");

  std::uint32_t n_bits = 0;
  std::uint64_t max_len = 0;
  auto* kdf_cmd = app.add_subcommand("kdf", "Binding function h");
  kdf_cmd->require_subcommand(1);
  auto* strength_cmd = kdf_cmd->add_subcommand("strength", "Second-preimage strength of h in bits");
  strength_cmd->add_option("--n", n_bits, "Output length n in bits")->required()->check(CLI::Range(1u, 512u));
  strength_cmd->add_option("--max-len", max_len, "Maximum input length L in bits (>= 1024)")->required();

  std::string wire_file;
  auto* wire_cmd = app.add_subcommand("wire", "Wire formats");
  wire_cmd->require_subcommand(1);
  auto* decode_cmd = wire_cmd->add_subcommand("decode", "Describe an EMM, ECM, frame, capture or directory file");
  decode_cmd->add_option("file", wire_file, "Input file")->required();

  std::string vectors_out;
  auto* vectors_cmd = app.add_subcommand("vectors", "Known-answer vectors");
  vectors_cmd->require_subcommand(1);
  auto* emit_cmd = vectors_cmd->add_subcommand("emit", "Print the golden vectors");
  emit_cmd->add_option("--out", vectors_out, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run 'paytvctl --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (*run_cmd) return do_run(run, out, err);
    if (*init_cmd) return do_ttp_init(ttp_opts, out);
    if (*rotate_cmd) return do_ttp_rotate(ttp_opts, out);
    if (*export_cmd) return do_ttp_export(ttp_opts, out);
    if (*strength_cmd) {
      out << binding::second_preimage_strength(n_bits, max_len) << "\n";
      return kExitOk;
    }
    if (*decode_cmd) {
      out << wire::describe(read_file(wire_file));
      return kExitOk;
    }
    if (*emit_cmd) {
      std::string text = golden_vectors();
      if (vectors_out.empty())
        out << text;
      else
        write_text(vectors_out, text);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << "usage error: no command\n";
  return kExitUsage;
}

}  // namespace paytv::cli
