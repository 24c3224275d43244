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

#include "paytv/scrambler.hpp"

#include <openssl/evp.h>

#include <memory>

#include "paytv/codec.hpp"
#include "paytv/error.hpp"

namespace paytv {

namespace {
const EVP_CIPHER* ctr_for_key(std::size_t len) {
  switch (len) {
    case 16: return EVP_aes_128_ctr();
    case 24: return EVP_aes_192_ctr();
    case 32: return EVP_aes_256_ctr();
    default: throw ConfigError("control word must be 128, 192 or 256 bits");
  }
}
}  // namespace

ContentScrambler::ContentScrambler(Bytes control_word) : key_(std::move(control_word)) { ctr_for_key(key_.size()); }

Bytes ContentScrambler::scramble(std::uint64_t epoch, ByteView content) const {
  Bytes iv = codec::Writer().u64(epoch).u64(0).bytes();
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  Bytes out(content.size());
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), ctr_for_key(key_.size()), nullptr, key_.data(), iv.data()) != 1)
    throw CryptoError("scrambler init failed");
  if (!content.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, content.data(), static_cast<int>(content.size())) != 1)
    throw CryptoError("scrambler failed");
  return out;
}

}  // namespace paytv
