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

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>

#include "paytv/bytes.hpp"
#include "paytv/drbg.hpp"

namespace paytv::crypto {

using Digest = std::array<std::uint8_t, 64>;

// SHA-512 of `data`.
Digest sha512(ByteView data);

enum class PkeSchemeId : std::uint8_t { kX25519AesGcm = 1 };
enum class SigSchemeId : std::uint8_t { kEd25519 = 1 };
enum class SymSchemeId : std::uint8_t { kAesGcmSyntheticNonce = 1 };
enum class HashId : std::uint8_t { kSha512 = 1 };

enum class KeyPurpose : std::uint8_t { kEncryption = 1, kSignature = 2 };

struct SuiteConfig {
  PkeSchemeId pke = PkeSchemeId::kX25519AesGcm;
  SigSchemeId sig = SigSchemeId::kEd25519;
  SymSchemeId sym = SymSchemeId::kAesGcmSyntheticNonce;
  HashId hash = HashId::kSha512;
  // Length n of long-term keys, control words and r. One of 128, 192, 256.
  std::size_t secret_len_bits = 128;

  std::size_t secret_len_bytes() const { return secret_len_bits / 8; }
  // Throws ConfigError on an unsupported length or unregistered scheme id.
  void validate() const;
};

struct KeyPair {
  Bytes public_key;
  Bytes private_key;
  KeyPurpose purpose = KeyPurpose::kEncryption;
};

// Signature with appendix carrying the signed message; verification hands the
// message back, which gives the message-recovery interface the protocols use.
struct SignedMessage {
  Bytes message;
  Bytes signature;

  Bytes serialize() const;
  static SignedMessage parse(ByteView data);
  friend bool operator==(const SignedMessage&, const SignedMessage&) = default;
};

class PublicKeyEncryption {
 public:
  virtual ~PublicKeyEncryption() = default;
  virtual PkeSchemeId id() const = 0;
  virtual std::size_t public_key_size() const = 0;
  virtual KeyPair generate(Drbg& rng) const = 0;
  virtual Bytes encrypt(ByteView public_key, ByteView plaintext, Drbg& rng) const = 0;
  // Throws CryptoError when the ciphertext was not produced for this key.
  virtual Bytes decrypt(ByteView private_key, ByteView ciphertext) const = 0;
};

class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;
  virtual SigSchemeId id() const = 0;
  virtual std::size_t public_key_size() const = 0;
  virtual KeyPair generate(Drbg& rng) const = 0;
  virtual SignedMessage sign(ByteView private_key, ByteView message) const = 0;
  // Returns the carried message, or throws CryptoError.
  virtual Bytes verify_recover(ByteView public_key, const SignedMessage& signed_message) const = 0;
};

// Authenticated symmetric encryption keyed with an n-bit key.
class SymmetricCipher {
 public:
  virtual ~SymmetricCipher() = default;
  virtual SymSchemeId id() const = 0;
  virtual std::size_t overhead() const = 0;
  virtual Bytes encrypt(ByteView key, ByteView plaintext, ByteView aad) const = 0;
  virtual Bytes decrypt(ByteView key, ByteView ciphertext, ByteView aad) const = 0;
};

// Resolved set of primitives for one SuiteConfig. Cheap to copy; the
// implementations are shared and stateless.
class Suite {
 public:
  explicit Suite(const SuiteConfig& config = {});

  const SuiteConfig& config() const { return config_; }
  std::size_t secret_bits() const { return config_.secret_len_bits; }
  std::size_t secret_bytes() const { return config_.secret_len_bytes(); }

  const PublicKeyEncryption& pke() const { return *pke_; }
  const SignatureScheme& sig() const { return *sig_; }
  const SymmetricCipher& sym() const { return *sym_; }
  Digest hash(ByteView data) const;

 private:
  SuiteConfig config_;
  std::shared_ptr<const PublicKeyEncryption> pke_;
  std::shared_ptr<const SignatureScheme> sig_;
  std::shared_ptr<const SymmetricCipher> sym_;
};

KeyPair keygen(const Suite& suite, KeyPurpose purpose, Drbg& rng);
// Round-trips a fixed message through the pair; false if the halves do not match.
bool self_test(const Suite& suite, const KeyPair& pair);

Bytes pke_encrypt(const Suite& suite, ByteView public_key, ByteView plaintext, Drbg& rng);
Bytes pke_decrypt(const Suite& suite, ByteView private_key, ByteView ciphertext);

SignedMessage sign(const Suite& suite, ByteView private_key, ByteView message);
Bytes verify_recover(const Suite& suite, ByteView public_key, const SignedMessage& signed_message);

// Key length must equal the suite's secret length.
Bytes sym_encrypt(const Suite& suite, ByteView key, ByteView plaintext, ByteView aad = {});
Bytes sym_decrypt(const Suite& suite, ByteView key, ByteView ciphertext, ByteView aad = {});

}  // namespace paytv::crypto
