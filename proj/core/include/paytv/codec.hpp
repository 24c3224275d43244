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

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>

#include "paytv/bytes.hpp"

namespace paytv::codec {

// Big-endian writer. Variable-length fields are prefixed with a 4-byte
// big-endian length.
class Writer {
 public:
  Writer& u8(std::uint8_t v);
  Writer& u16(std::uint16_t v);
  Writer& u32(std::uint32_t v);
  Writer& u64(std::uint64_t v);
  Writer& raw(ByteView data);
  Writer& lp(ByteView data);

  const Bytes& bytes() const& { return buf_; }
  Bytes bytes() && { return std::move(buf_); }

 private:
  Bytes buf_;
};

// Reader over a borrowed buffer. Every accessor throws WireError naming the
// offset at which the input ran out or was inconsistent.
class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  Bytes raw(std::size_t n);
  Bytes lp();
  void expect(ByteView magic, std::string_view what);

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  // Throws unless the whole buffer was consumed.
  void finish(std::string_view what) const;

 private:
  void need(std::size_t n, std::string_view what) const;

  ByteView data_;
  std::size_t pos_ = 0;
};

Bytes length_prefixed(ByteView data);

}  // namespace paytv::codec
