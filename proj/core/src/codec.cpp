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

#include "paytv/codec.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "paytv/error.hpp"

namespace paytv {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string to_hex(ByteView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

bool equal_ct(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc |= a[i] ^ b[i];
  return acc == 0;
}

bool contains(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

const char* to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::kBadCertificate: return "bad-certificate";
    case AbortReason::kRevokedCertificate: return "revoked-certificate";
    case AbortReason::kBadSignature: return "bad-signature";
    case AbortReason::kWrongRecipient: return "wrong-recipient";
    case AbortReason::kDecryptionFailure: return "decryption-failure";
    case AbortReason::kNoLongTermKey: return "no-long-term-key";
    case AbortReason::kUnknownSender: return "unknown-sender";
    case AbortReason::kMalformedMessage: return "malformed-message";
  }
  return "unknown";
}

namespace codec {

Writer& Writer::u8(std::uint8_t v) {
  buf_.push_back(v);
  return *this;
}

Writer& Writer::u16(std::uint16_t v) {
  buf_.push_back(static_cast<std::uint8_t>(v >> 8));
  buf_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}

Writer& Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::raw(ByteView data) {
  append(buf_, data);
  return *this;
}

Writer& Writer::lp(ByteView data) {
  if (data.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::length_error("field too long for 32-bit length prefix");
  u32(static_cast<std::uint32_t>(data.size()));
  return raw(data);
}

void Reader::need(std::size_t n, std::string_view what) const {
  if (remaining() < n)
    throw WireError("truncated " + std::string(what) + " (need " + std::to_string(n) + " bytes, have " +
                        std::to_string(remaining()) + ")",
                    pos_);
}

std::uint8_t Reader::u8() {
  need(1, "u8");
  return data_[pos_++];
}

std::uint16_t Reader::u16() {
  need(2, "u16");
  std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
  pos_ += 2;
  return v;
}

std::uint32_t Reader::u32() {
  need(4, "u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t Reader::u64() {
  need(8, "u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 8;
  return v;
}

Bytes Reader::raw(std::size_t n) {
  need(n, "field");
  Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
            data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return out;
}

Bytes Reader::lp() {
  std::size_t start = pos_;
  std::uint32_t n = u32();
  if (remaining() < n) {
    throw WireError("length prefix " + std::to_string(n) + " exceeds remaining " +
                        std::to_string(remaining()) + " bytes",
                    start);
  }
  return raw(n);
}

void Reader::expect(ByteView magic, std::string_view what) {
  std::size_t start = pos_;
  need(magic.size(), what);
  if (!std::equal(magic.begin(), magic.end(), data_.begin() + static_cast<std::ptrdiff_t>(pos_)))
    throw WireError("bad " + std::string(what), start);
  pos_ += magic.size();
}

void Reader::finish(std::string_view what) const {
  if (!done())
    throw WireError(std::to_string(remaining()) + " trailing bytes after " + std::string(what), pos_);
}

Bytes length_prefixed(ByteView data) { return Writer().lp(data).bytes(); }

}  // namespace codec
}  // namespace paytv
