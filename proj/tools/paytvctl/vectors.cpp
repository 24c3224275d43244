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

#include "vectors.hpp"

#include <sstream>

#include "paytv/binding.hpp"
#include "paytv/codec.hpp"
#include "paytv/crypto.hpp"
#include "paytv/decoder.hpp"
#include "paytv/drbg.hpp"
#include "paytv/scrambler.hpp"
#include "paytv/ttp.hpp"
#include "paytv/wire.hpp"

namespace paytv::cli {

namespace {

Bytes counting(std::size_t n, std::uint8_t start = 0) {
  Bytes out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>(start + i);
  return out;
}

crypto::Suite suite_for(std::size_t bits) {
  crypto::SuiteConfig c;
  c.secret_len_bits = bits;
  return crypto::Suite(c);
}

}  // namespace

std::string golden_vectors() {
  std::ostringstream out;
  auto line = [&](const std::string& name, ByteView value) { out << name << " " << to_hex(value) << "\n"; };
  const crypto::Suite suite = suite_for(128);

  {
    Drbg rng = Drbg::from_u64(7);
    line("drbg.seed7.out80", rng.generate(80));
    line("drbg.seed7.fork_child.out32", Drbg::from_u64(7).fork("child").generate(32));
  }
  {
    auto d = crypto::sha512(to_bytes("abc"));
    line("sha512.abc", d);
  }

  const std::vector<Bytes> pks = {Bytes(32, 0x11), Bytes(32, 0x22)};
  for (std::size_t n : {128u, 192u, 256u}) {
    binding::HInput input{pks, counting(n / 8)};
    line("h.n" + std::to_string(n) + ".input", binding::encode_h_input(input, n));
    line("h.n" + std::to_string(n) + ".k", binding::derive_k(input, n).k);
  }

  for (std::size_t n : {128u, 256u}) {
    line("aead.n" + std::to_string(n),
         crypto::sym_encrypt(suite_for(n), counting(n / 8), to_bytes("control word"), to_bytes("header")));
  }
  line("scrambler.n128.epoch5", ContentScrambler(counting(16)).scramble(5, to_bytes("pay-tv content block")));

  Drbg sig_rng = Drbg::from_u64(1);
  const crypto::KeyPair signer = crypto::keygen(suite, crypto::KeyPurpose::kSignature, sig_rng);
  line("ed25519.seed1.pk", signer.public_key);
  line("ed25519.seed1.signed", crypto::sign(suite, signer.private_key, to_bytes("paytv golden message")).serialize());

  Drbg pke_rng = Drbg::from_u64(2);
  const crypto::KeyPair recipient = crypto::keygen(suite, crypto::KeyPurpose::kEncryption, pke_rng);
  line("x25519.seed2.pk", recipient.public_key);
  const Bytes ltk = counting(16, 0xA0);
  Drbg eph_rng = Drbg::from_u64(3);
  const Bytes wrapped = crypto::pke_encrypt(suite, recipient.public_key, ltk, eph_rng);
  line("pke.seed2.eph3", wrapped);

  const EntityId receiver{0x1001};
  const crypto::SignedMessage blob =
      crypto::sign(suite, signer.private_key, codec::Writer().u64(receiver.value).lp(wrapped).bytes());
  line("phase1.signed_blob", blob.serialize());

  const ttp::Certificate cert = ttp::issue_certificate(suite, signer.private_key, 42, receiver, ttp::Role::kReceiver,
                                                       recipient.public_key, 0);
  line("certificate.serial42", cert.serialize());

  const Bytes group_key = counting(16);
  const Bytes unique_key = counting(16, 0x20);
  const Bytes r = counting(16, 0x10);
  const Bytes ecm = wire::ecm_encode(suite, {0x0100, 9, r}, group_key);
  line("ecm.epoch9", ecm);
  const Bytes emm_pk = wire::emm_encode(
      suite, {0x0100, wire::EmmKind::kBroadcastSenderPk, kBroadcastId, wire::encode_key_payload(signer.public_key)},
      group_key);
  line("emm.broadcast_sender_pk", emm_pk);
  line("emm.per_receiver_enroll",
       wire::emm_encode(suite,
                        {0x0100, wire::EmmKind::kPerReceiverEnroll, receiver, wire::EnrollPayload{blob, ltk}.encode()},
                        unique_key));
  line("chip.derive.epoch9",
       decoder::ChipMessage{decoder::ChipMessageKind::kDerive, 9,
                            decoder::encode_p2_derive(signer.public_key, crypto::sym_encrypt(suite, ltk, r))}
           .serialize());

  const Bytes k = binding::derive_k({{signer.public_key}, r}, 128).k;
  line("p2.k.epoch9", k);
  wire::BroadcastFrame frame{9, ContentScrambler(k).scramble(9, to_bytes("pay-tv content block")), {ecm}, {emm_pk}};
  line("frame.epoch9", frame.serialize());

  for (std::uint32_t n : {128u, 256u, 511u}) {
    for (unsigned e : {10u, 20u, 40u}) {
      out << "strength.n" << n << ".L2^" << e << " " << binding::second_preimage_strength(n, 1ull << e) << "\n";
    }
  }
  return out.str();
}

}  // namespace paytv::cli
