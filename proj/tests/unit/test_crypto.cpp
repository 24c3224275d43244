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

#include "paytv/crypto.hpp"
#include "paytv/error.hpp"
#include "test_support.hpp"

using namespace paytv;
using crypto::KeyPurpose;
using test::flip_bit;

namespace {

Bytes digest_bytes(const crypto::Digest& d) { return Bytes(d.begin(), d.end()); }

}  // namespace

TEST_CASE("sha512 standard vectors") {
  CHECK(to_hex(digest_bytes(crypto::sha512(Bytes{}))) ==
        "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce"
        "47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e");
  CHECK(to_hex(digest_bytes(crypto::sha512(to_bytes("abc")))) ==
        "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
        "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f");
  Drbg rng = Drbg::from_u64(1);
  for (int i = 0; i < 100; ++i) {
    Bytes m = rng.generate(rng.uniform(100));
    const auto h = crypto::sha512(m);
    m.push_back(0);
    CHECK(crypto::sha512(m) != h);
  }
}

TEST_CASE("suite config validation") {
  for (std::size_t n : {128, 192, 256}) CHECK_NOTHROW(crypto::SuiteConfig{.secret_len_bits = n}.validate());
  for (std::size_t n : {0, 64, 127, 512}) CHECK_THROWS_AS(crypto::SuiteConfig{.secret_len_bits = n}.validate(), ConfigError);
  crypto::SuiteConfig bad;
  bad.sig = static_cast<crypto::SigSchemeId>(9);
  CHECK_THROWS_AS(crypto::Suite{bad}, ConfigError);
  CHECK(crypto::Suite{}.secret_bits() == 128);
}

TEST_CASE("keygen is deterministic and matches the reference keys") {
  const crypto::Suite suite;
  Drbg a = Drbg::from_u64(0);
  Drbg b = Drbg::from_u64(0);
  const auto k0 = crypto::keygen(suite, KeyPurpose::kEncryption, a);
  const auto k1 = crypto::keygen(suite, KeyPurpose::kEncryption, b);
  CHECK(k0.public_key == k1.public_key);
  CHECK(k0.private_key == k1.private_key);
  CHECK(to_hex(k0.public_key) == "d2ea5e3c77018f50b639784902e7357ec91d2847bbe60ec36c286f079f003f3c");

  Drbg c = Drbg::from_u64(0);
  const auto sig = crypto::keygen(suite, KeyPurpose::kSignature, c);
  CHECK(to_hex(sig.public_key) == "1a7c082846cff58ff9a892ba4ba2593151ccf1dba59f37714cc9ed39824af85f");
  CHECK(crypto::self_test(suite, sig));
  CHECK(sig.purpose == KeyPurpose::kSignature);

  Drbg d = Drbg::from_u64(2);
  CHECK(crypto::keygen(suite, KeyPurpose::kEncryption, d).public_key != k0.public_key);
}

TEST_CASE("public key lengths are constant per scheme") {
  const crypto::Suite suite;
  Drbg rng = Drbg::from_u64(4);
  for (int i = 0; i < 20; ++i) {
    CHECK(crypto::keygen(suite, KeyPurpose::kEncryption, rng).public_key.size() == suite.pke().public_key_size());
    CHECK(crypto::keygen(suite, KeyPurpose::kSignature, rng).public_key.size() == suite.sig().public_key_size());
  }
}

TEST_CASE("self test catches mismatched halves") {
  const crypto::Suite suite;
  Drbg rng = Drbg::from_u64(5);
  auto a = crypto::keygen(suite, KeyPurpose::kEncryption, rng);
  const auto b = crypto::keygen(suite, KeyPurpose::kEncryption, rng);
  CHECK(crypto::self_test(suite, a));
  a.public_key = b.public_key;
  CHECK_FALSE(crypto::self_test(suite, a));
}

TEST_CASE("public-key encryption") {
  const crypto::Suite suite;
  Drbg rng = Drbg::from_u64(6);
  const auto alice = crypto::keygen(suite, KeyPurpose::kEncryption, rng);
  const auto bob = crypto::keygen(suite, KeyPurpose::kEncryption, rng);

  SUBCASE("round trips over random plaintexts") {
    for (int i = 0; i < 1000; ++i) {
      const Bytes m = rng.generate(1 + rng.uniform(64));
      CHECK(crypto::pke_decrypt(suite, alice.private_key, crypto::pke_encrypt(suite, alice.public_key, m, rng)) == m);
    }
  }
  SUBCASE("wrong private key fails") {
    const Bytes ct = crypto::pke_encrypt(suite, alice.public_key, test::counting(16), rng);
    CHECK_THROWS_AS(crypto::pke_decrypt(suite, bob.private_key, ct), CryptoError);
  }
  SUBCASE("every sampled bit flip fails") {
    const Bytes ct = crypto::pke_encrypt(suite, alice.public_key, test::counting(16), rng);
    for (std::size_t bit : test::sample_bits(ct.size() * 8, 128, rng))
      CHECK_THROWS_AS(crypto::pke_decrypt(suite, alice.private_key, flip_bit(ct, bit)), CryptoError);
    CHECK_THROWS_AS(crypto::pke_decrypt(suite, alice.private_key, Bytes(ct.begin(), ct.end() - 1)), CryptoError);
  }
  SUBCASE("encryption is randomized") {
    CHECK(crypto::pke_encrypt(suite, alice.public_key, test::counting(16), rng) !=
          crypto::pke_encrypt(suite, alice.public_key, test::counting(16), rng));
  }
}

TEST_CASE("signatures") {
  const crypto::Suite suite;
  Drbg rng = Drbg::from_u64(7);
  const auto a = crypto::keygen(suite, KeyPurpose::kSignature, rng);
  const auto b = crypto::keygen(suite, KeyPurpose::kSignature, rng);

  SUBCASE("round trips") {
    for (int i = 0; i < 1000; ++i) {
      const Bytes m = rng.generate(1 + rng.uniform(80));
      CHECK(crypto::verify_recover(suite, a.public_key, crypto::sign(suite, a.private_key, m)) == m);
    }
  }
  SUBCASE("bit 0 of the signature") {
    auto sm = crypto::sign(suite, a.private_key, to_bytes("msg"));
    sm.signature = flip_bit(sm.signature, 0);
    CHECK_THROWS_AS(crypto::verify_recover(suite, a.public_key, sm), CryptoError);
  }
  SUBCASE("another signer's key") {
    const auto sm = crypto::sign(suite, a.private_key, to_bytes("msg"));
    CHECK_THROWS_AS(crypto::verify_recover(suite, b.public_key, sm), CryptoError);
  }
  SUBCASE("every sampled bit of the serialized form") {
    const Bytes wire = crypto::sign(suite, a.private_key, to_bytes("a signed message body")).serialize();
    for (std::size_t bit : test::sample_bits(wire.size() * 8, 128, rng)) {
      const Bytes bad = flip_bit(wire, bit);
      bool rejected = false;
      try {
        crypto::verify_recover(suite, a.public_key, crypto::SignedMessage::parse(bad));
      } catch (const Error&) {
        rejected = true;
      }
      CHECK_MESSAGE(rejected, "bit " << bit);
    }
  }
  SUBCASE("empty message is refused") {
    CHECK_THROWS_AS(crypto::sign(suite, a.private_key, Bytes{}), ConfigError);
  }
  SUBCASE("serialization round trips") {
    const auto sm = crypto::sign(suite, a.private_key, to_bytes("x"));
    CHECK(crypto::SignedMessage::parse(sm.serialize()) == sm);
  }
}

TEST_CASE("symmetric cipher") {
  for (std::size_t n : {128, 192, 256}) {
    CAPTURE(n);
    const crypto::Suite suite(crypto::SuiteConfig{.secret_len_bits = n});
    Drbg rng = Drbg::from_u64(n);
    const Bytes key = rng.generate(n / 8);
    const Bytes other = rng.generate(n / 8);

    for (int i = 0; i < 1000; ++i) {
      const Bytes pt = rng.generate(rng.uniform(48));
      const Bytes aad = rng.generate(rng.uniform(16));
      const Bytes ct = crypto::sym_encrypt(suite, key, pt, aad);
      REQUIRE(ct.size() == pt.size() + suite.sym().overhead());
      REQUIRE(crypto::sym_decrypt(suite, key, ct, aad) == pt);
    }

    const Bytes pt = test::counting(32);
    const Bytes ct = crypto::sym_encrypt(suite, key, pt, to_bytes("aad"));
    CHECK(crypto::sym_encrypt(suite, key, pt, to_bytes("aad")) == ct);
    CHECK(crypto::sym_encrypt(suite, key, test::counting(32, 1), to_bytes("aad")) != ct);
    CHECK_THROWS_AS(crypto::sym_decrypt(suite, other, ct, to_bytes("aad")), CryptoError);
    CHECK_THROWS_AS(crypto::sym_decrypt(suite, key, ct, to_bytes("aaD")), CryptoError);
    for (std::size_t bit : test::sample_bits(ct.size() * 8, 96, rng))
      CHECK_THROWS_AS(crypto::sym_decrypt(suite, key, flip_bit(ct, bit), to_bytes("aad")), CryptoError);
    CHECK_THROWS_AS(crypto::sym_encrypt(suite, Bytes(n / 8 + 1), pt), ConfigError);
  }
}

TEST_CASE("equal seeds give identical transcripts") {
  auto transcript = [] {
    const crypto::Suite suite;
    Drbg rng = Drbg::from_u64(42);
    const auto enc = crypto::keygen(suite, KeyPurpose::kEncryption, rng);
    const auto sig = crypto::keygen(suite, KeyPurpose::kSignature, rng);
    Bytes out = crypto::pke_encrypt(suite, enc.public_key, test::counting(16), rng);
    append(out, crypto::sign(suite, sig.private_key, out).serialize());
    append(out, crypto::sym_encrypt(suite, test::counting(16), out));
    return out;
  };
  CHECK(transcript() == transcript());
}
