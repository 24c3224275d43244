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

// Phase I long-term key transport shared by both protocols: the sender signs
// (recipient id, E_PK_B(LK)); the receiver verifies, checks it is the
// intended recipient, and decrypts.

#include "paytv/bytes.hpp"
#include "paytv/crypto.hpp"
#include "paytv/drbg.hpp"

namespace paytv::transport {

// u64 recipient || lp(E_PK_B(LK))
Bytes encode_addressed(EntityId recipient, ByteView encrypted_ltk);

crypto::SignedMessage seal_long_term_key(const crypto::Suite& suite, ByteView sender_sk, EntityId recipient,
                                         ByteView recipient_pk, ByteView ltk, Drbg& rng);

// Throws ProtocolAbort (bad-signature, wrong-recipient, decryption-failure).
Bytes open_long_term_key(const crypto::Suite& suite, ByteView sender_pk, const crypto::SignedMessage& blob,
                         EntityId self, ByteView self_sk);

}  // namespace paytv::transport
