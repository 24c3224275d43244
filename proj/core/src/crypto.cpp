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

#include "paytv/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <memory>
#include <string>

#include "paytv/codec.hpp"
#include "paytv/error.hpp"

namespace paytv::crypto {

namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

constexpr std::size_t kCurveKeySize = 32;
constexpr std::size_t kEd25519SignatureSize = 64;
constexpr std::size_t kGcmNonceSize = 12;
constexpr std::size_t kGcmTagSize = 16;

PkeyPtr raw_private(int type, ByteView sk) {
  if (sk.size() != kCurveKeySize) throw CryptoError("private key has wrong length");
  PkeyPtr key(EVP_PKEY_new_raw_private_key(type, nullptr, sk.data(), sk.size()));
  if (!key) throw CryptoError("cannot load private key");
  return key;
}

PkeyPtr raw_public(int type, ByteView pk) {
  if (pk.size() != kCurveKeySize) throw CryptoError("public key has wrong length");
  PkeyPtr key(EVP_PKEY_new_raw_public_key(type, nullptr, pk.data(), pk.size()));
  if (!key) throw CryptoError("cannot load public key");
  return key;
}

Bytes public_of(const PkeyPtr& key) {
  Bytes out(kCurveKeySize);
  std::size_t len = out.size();
  if (EVP_PKEY_get_raw_public_key(key.get(), out.data(), &len) != 1 || len != kCurveKeySize)
    throw CryptoError("cannot export public key");
  return out;
}

const EVP_CIPHER* gcm_for_key(std::size_t key_len) {
  switch (key_len) {
    case 16: return EVP_aes_128_gcm();
    case 24: return EVP_aes_192_gcm();
    case 32: return EVP_aes_256_gcm();
    default: throw CryptoError("unsupported symmetric key length " + std::to_string(key_len));
  }
}

class AesGcmSyntheticNonce final : public SymmetricCipher {
 public:
  SymSchemeId id() const override { return SymSchemeId::kAesGcmSyntheticNonce; }
  std::size_t overhead() const override { return kGcmNonceSize + kGcmTagSize; }

  // The nonce is the leftmost 96 bits of SHA-512 over (key, aad, plaintext),
  // so distinct plaintexts under one key never share a nonce short of a
  // hash collision, and encryption is a pure function of its inputs.
  Bytes encrypt(ByteView key, ByteView plaintext, ByteView aad) const override {
    const EVP_CIPHER* cipher = gcm_for_key(key.size());
    codec::Writer nonce_input;
    nonce_input.raw(to_bytes("paytv-aead-nonce")).lp(key).lp(aad).lp(plaintext);
    Digest d = sha512(nonce_input.bytes());

    Bytes out(kGcmNonceSize + plaintext.size() + kGcmTagSize);
    std::copy_n(d.begin(), kGcmNonceSize, out.begin());

    CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
    int len = 0;
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmNonceSize, nullptr) != 1 ||
        EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), out.data()) != 1)
      throw CryptoError("AES-GCM init failed");
    if (!aad.empty() &&
        EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
      throw CryptoError("AES-GCM aad failed");
    std::uint8_t* ct = out.data() + kGcmNonceSize;
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), ct, &len, plaintext.data(), static_cast<int>(plaintext.size())) != 1)
      throw CryptoError("AES-GCM encrypt failed");
    if (EVP_EncryptFinal_ex(ctx.get(), ct + plaintext.size(), &len) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagSize, ct + plaintext.size()) != 1)
      throw CryptoError("AES-GCM finalize failed");
    return out;
  }

  Bytes decrypt(ByteView key, ByteView ciphertext, ByteView aad) const override {
    const EVP_CIPHER* cipher = gcm_for_key(key.size());
    if (ciphertext.size() < kGcmNonceSize + kGcmTagSize) throw CryptoError("ciphertext too short");
    const std::size_t body_len = ciphertext.size() - kGcmNonceSize - kGcmTagSize;
    ByteView nonce = ciphertext.first(kGcmNonceSize);
    ByteView body = ciphertext.subspan(kGcmNonceSize, body_len);
    Bytes tag(ciphertext.end() - kGcmTagSize, ciphertext.end());

    Bytes out(body_len);
    CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
    int len = 0;
    if (!ctx || EVP_DecryptInit_ex(ctx.get(), cipher, nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmNonceSize, nullptr) != 1 ||
        EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1)
      throw CryptoError("AES-GCM init failed");
    if (!aad.empty() &&
        EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
      throw CryptoError("AES-GCM aad failed");
    if (body_len > 0 &&
        EVP_DecryptUpdate(ctx.get(), out.data(), &len, body.data(), static_cast<int>(body_len)) != 1)
      throw CryptoError("AES-GCM decrypt failed");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagSize, tag.data()) != 1)
      throw CryptoError("AES-GCM set tag failed");
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + body_len, &len) != 1)
      throw CryptoError("authentication tag mismatch");
    return out;
  }
};

// ECIES-style hybrid: ephemeral X25519 agreement, SHA-512 derived wrap key of
// the suite's secret length, then the authenticated symmetric cipher.
//   ciphertext = eph_pk || aead(wrap_key, plaintext, aad = eph_pk || recipient_pk)
class X25519AesGcm final : public PublicKeyEncryption {
 public:
  explicit X25519AesGcm(std::size_t wrap_key_bytes) : wrap_key_bytes_(wrap_key_bytes) {}

  PkeSchemeId id() const override { return PkeSchemeId::kX25519AesGcm; }
  std::size_t public_key_size() const override { return kCurveKeySize; }

  KeyPair generate(Drbg& rng) const override {
    Bytes sk = rng.generate(kCurveKeySize);
    PkeyPtr key = raw_private(EVP_PKEY_X25519, sk);
    return KeyPair{public_of(key), std::move(sk), KeyPurpose::kEncryption};
  }

  Bytes encrypt(ByteView public_key, ByteView plaintext, Drbg& rng) const override {
    KeyPair eph = generate(rng);
    Bytes shared = agree(eph.private_key, public_key);
    Bytes aad = concat(eph.public_key, public_key);
    Bytes out = eph.public_key;
    append(out, cipher_.encrypt(wrap_key(shared, aad), plaintext, aad));
    return out;
  }

  Bytes decrypt(ByteView private_key, ByteView ciphertext) const override {
    if (ciphertext.size() < kCurveKeySize + cipher_.overhead()) throw CryptoError("ciphertext too short");
    ByteView eph_pk = ciphertext.first(kCurveKeySize);
    PkeyPtr own = raw_private(EVP_PKEY_X25519, private_key);
    Bytes aad = concat(eph_pk, public_of(own));
    Bytes shared = agree(private_key, eph_pk);
    return cipher_.decrypt(wrap_key(shared, aad), ciphertext.subspan(kCurveKeySize), aad);
  }

 private:
  static Bytes agree(ByteView sk, ByteView peer_pk) {
    PkeyPtr own = raw_private(EVP_PKEY_X25519, sk);
    PkeyPtr peer = raw_public(EVP_PKEY_X25519, peer_pk);
    PkeyCtxPtr ctx(EVP_PKEY_CTX_new(own.get(), nullptr));
    Bytes secret(kCurveKeySize);
    std::size_t len = secret.size();
    if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 || EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) != 1 ||
        EVP_PKEY_derive(ctx.get(), secret.data(), &len) != 1 || len != kCurveKeySize)
      throw CryptoError("X25519 key agreement failed");
    return secret;
  }

  Bytes wrap_key(ByteView shared, ByteView transcript) const {
    Bytes input = to_bytes("paytv-pke-wrap");
    append(input, shared);
    append(input, transcript);
    Digest d = sha512(input);
    return Bytes(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(wrap_key_bytes_));
  }

  std::size_t wrap_key_bytes_;
  AesGcmSyntheticNonce cipher_;
};

class Ed25519 final : public SignatureScheme {
 public:
  SigSchemeId id() const override { return SigSchemeId::kEd25519; }
  std::size_t public_key_size() const override { return kCurveKeySize; }

  KeyPair generate(Drbg& rng) const override {
    Bytes seed = rng.generate(kCurveKeySize);
    PkeyPtr key = raw_private(EVP_PKEY_ED25519, seed);
    return KeyPair{public_of(key), std::move(seed), KeyPurpose::kSignature};
  }

  SignedMessage sign(ByteView private_key, ByteView message) const override {
    if (message.empty()) throw ConfigError("cannot sign an empty message");
    PkeyPtr key = raw_private(EVP_PKEY_ED25519, private_key);
    MdCtxPtr ctx(EVP_MD_CTX_new());
    Bytes sig(kEd25519SignatureSize);
    std::size_t len = sig.size();
    if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1 ||
        EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1 ||
        len != kEd25519SignatureSize)
      throw CryptoError("Ed25519 signing failed");
    return SignedMessage{Bytes(message.begin(), message.end()), std::move(sig)};
  }

  Bytes verify_recover(ByteView public_key, const SignedMessage& sm) const override {
    if (sm.signature.size() != kEd25519SignatureSize) throw CryptoError("signature has wrong length");
    PkeyPtr key = raw_public(EVP_PKEY_ED25519, public_key);
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
      throw CryptoError("Ed25519 verify init failed");
    if (EVP_DigestVerify(ctx.get(), sm.signature.data(), sm.signature.size(), sm.message.data(),
                         sm.message.size()) != 1)
      throw CryptoError("signature invalid");
    return sm.message;
  }
};

}  // namespace

Digest sha512(ByteView data) {
  Digest d{};
  SHA512(data.data(), data.size(), d.data());
  return d;
}

void SuiteConfig::validate() const {
  if (secret_len_bits != 128 && secret_len_bits != 192 && secret_len_bits != 256)
    throw ConfigError("secret length must be 128, 192 or 256 bits, got " + std::to_string(secret_len_bits));
  if (pke != PkeSchemeId::kX25519AesGcm) throw ConfigError("unregistered public-key encryption scheme");
  if (sig != SigSchemeId::kEd25519) throw ConfigError("unregistered signature scheme");
  if (sym != SymSchemeId::kAesGcmSyntheticNonce) throw ConfigError("unregistered symmetric scheme");
  if (hash != HashId::kSha512) throw ConfigError("unregistered hash function");
}

Suite::Suite(const SuiteConfig& config) : config_(config) {
  config_.validate();
  pke_ = std::make_shared<X25519AesGcm>(config_.secret_len_bytes());
  sig_ = std::make_shared<Ed25519>();
  sym_ = std::make_shared<AesGcmSyntheticNonce>();
}

Digest Suite::hash(ByteView data) const { return sha512(data); }

Bytes SignedMessage::serialize() const { return codec::Writer().lp(message).lp(signature).bytes(); }

SignedMessage SignedMessage::parse(ByteView data) {
  codec::Reader r(data);
  SignedMessage sm;
  sm.message = r.lp();
  sm.signature = r.lp();
  r.finish("signed message");
  return sm;
}

KeyPair keygen(const Suite& suite, KeyPurpose purpose, Drbg& rng) {
  KeyPair pair = purpose == KeyPurpose::kSignature ? suite.sig().generate(rng) : suite.pke().generate(rng);
  if (!self_test(suite, pair)) throw CryptoError("generated key pair failed self-test");
  return pair;
}

bool self_test(const Suite& suite, const KeyPair& pair) {
  static const Bytes probe = to_bytes("paytv key pair self-test");
  try {
    if (pair.purpose == KeyPurpose::kSignature) {
      return suite.sig().verify_recover(pair.public_key, suite.sig().sign(pair.private_key, probe)) == probe;
    }
    Drbg rng(to_bytes("self-test"));
    return suite.pke().decrypt(pair.private_key, suite.pke().encrypt(pair.public_key, probe, rng)) == probe;
  } catch (const Error&) {
    return false;
  }
}

Bytes pke_encrypt(const Suite& suite, ByteView public_key, ByteView plaintext, Drbg& rng) {
  return suite.pke().encrypt(public_key, plaintext, rng);
}

Bytes pke_decrypt(const Suite& suite, ByteView private_key, ByteView ciphertext) {
  return suite.pke().decrypt(private_key, ciphertext);
}

SignedMessage sign(const Suite& suite, ByteView private_key, ByteView message) {
  return suite.sig().sign(private_key, message);
}

Bytes verify_recover(const Suite& suite, ByteView public_key, const SignedMessage& signed_message) {
  return suite.sig().verify_recover(public_key, signed_message);
}

namespace {
void check_sym_key(const Suite& suite, ByteView key) {
  if (key.size() != suite.secret_bytes())
    throw ConfigError("symmetric key must be " + std::to_string(suite.secret_bits()) + " bits");
}
}  // namespace

Bytes sym_encrypt(const Suite& suite, ByteView key, ByteView plaintext, ByteView aad) {
  check_sym_key(suite, key);
  return suite.sym().encrypt(key, plaintext, aad);
}

Bytes sym_decrypt(const Suite& suite, ByteView key, ByteView ciphertext, ByteView aad) {
  check_sym_key(suite, key);
  return suite.sym().decrypt(key, ciphertext, aad);
}

}  // namespace paytv::crypto
