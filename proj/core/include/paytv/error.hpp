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
#include <stdexcept>
#include <string>

namespace paytv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Authenticated decryption, signature verification or key handling failed.
class CryptoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated serialization; `offset` is where parsing stopped.
class WireError : public Error {
 public:
  WireError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Invalid configuration, unknown entity or precondition violation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class AbortReason {
  kBadCertificate,
  kRevokedCertificate,
  kBadSignature,
  kWrongRecipient,
  kDecryptionFailure,
  kNoLongTermKey,
  kUnknownSender,
  kMalformedMessage,
};

const char* to_string(AbortReason reason);

/// A receiver-side protocol check failed. Receiver state is left unchanged.
class ProtocolAbort : public Error {
 public:
  ProtocolAbort(AbortReason reason, const std::string& detail)
      : Error(std::string(to_string(reason)) + ": " + detail), reason_(reason) {}
  AbortReason reason() const noexcept { return reason_; }

 private:
  AbortReason reason_;
};

}  // namespace paytv
