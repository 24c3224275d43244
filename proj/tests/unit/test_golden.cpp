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

#include <map>
#include <sstream>
#include <string>

#include "test_support.hpp"
#include "vectors.hpp"

using namespace paytv;

namespace {

std::map<std::string, std::string> parse(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string name, hex;
  while (in >> name >> hex) out[name] = hex;
  return out;
}

}  // namespace

TEST_CASE("implementation matches the frozen oracle vectors") {
  const auto want = parse(test::read_text(test::data_path("golden_vectors.txt")));
  const auto got = parse(cli::golden_vectors());
  REQUIRE(want.size() >= 30);
  CHECK(got.size() == want.size());
  for (const auto& [name, hex] : want) {
    CAPTURE(name);
    REQUIRE(got.contains(name));
    CHECK(got.at(name) == hex);
  }
}
