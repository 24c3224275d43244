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

#include "transport.hpp"

#include "paytv/codec.hpp"
#include "paytv/error.hpp"

namespace paytv::transport {

Bytes encode_addressed(EntityId recipient, ByteView encrypted_ltk) {
  return codec::Writer().u64(recipient.value).lp(encrypted_ltk).bytes();
}

crypto::SignedMessage seal_long_term_key(const crypto::Suite& suite, ByteView sender_sk, EntityId recipient,
                                         ByteView recipient_pk, ByteView ltk, Drbg& rng) {
  Bytes encrypted = crypto::pke_encrypt(suite, recipient_pk, ltk, rng);
  return crypto::sign(suite, sender_sk, encode_addressed(recipient, encrypted));
}

Bytes open_long_term_key(const crypto::Suite& suite, ByteView sender_pk, const crypto::SignedMessage& blob,
                         EntityId self, ByteView self_sk) {
  Bytes tuple;
  try {
    tuple = crypto::verify_recover(suite, sender_pk, blob);
  } catch (const Error& e) {
    throw ProtocolAbort(AbortReason::kBadSignature, e.what());
  }

  EntityId recipient;
  Bytes encrypted;
  try {
    codec::Reader r(tuple);
    recipient = EntityId{r.u64()};
    encrypted = r.lp();
    r.finish("addressed long-term key");
  } catch (const WireError& e) {
    throw ProtocolAbort(AbortReason::kMalformedMessage, e.what());
  }
  if (recipient != self) throw ProtocolAbort(AbortReason::kWrongRecipient, "addressed to another receiver");

  Bytes ltk;
  try {
    ltk = crypto::pke_decrypt(suite, self_sk, encrypted);
  } catch (const Error& e) {
    throw ProtocolAbort(AbortReason::kDecryptionFailure, e.what());
  }
  if (ltk.size() != suite.secret_bytes())
    throw ProtocolAbort(AbortReason::kMalformedMessage, "long-term key has wrong length");
  return ltk;
}

}  // namespace paytv::transport
