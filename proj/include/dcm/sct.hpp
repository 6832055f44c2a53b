// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Signed certificate timestamps — the transparency log's issuance receipts —
// and the submission interface certificate authorities log through.

#pragma once

#include "dcm/common.hpp"
#include "dcm/crypto.hpp"
#include "dcm/trust.hpp"

namespace dcm::ctlog {

/// Leaf hashing uses the 0x00 domain-separation prefix over the serialized
/// certificate; interior nodes use 0x01 (see ctlog.hpp).
Hash32 leaf_hash_of(const trust::Certificate& cert);

struct SignedCertificateTimestamp {
    Fingerprint log_id;  // fingerprint of the log's public key
    uint64_t index = 0;
    Timestamp timestamp = 0;
    crypto::Signature signature;  // over (log_id, index, timestamp, leaf_hash)

    bool operator==(const SignedCertificateTimestamp&) const = default;
};

Bytes sct_signing_payload(const Fingerprint& log_id, uint64_t index, Timestamp timestamp,
                          const Hash32& leaf_hash);

Bytes serialize_sct(const SignedCertificateTimestamp& sct);
Result<SignedCertificateTimestamp> decode_sct(ByteSpan data);

Result<void> verify_sct(const SignedCertificateTimestamp& sct, const trust::Certificate& cert,
                        const crypto::VerifyKey& log_key);

/// Submission endpoint a CA logs through before releasing a certificate.
class CtSubmitter {
  public:
    virtual ~CtSubmitter() = default;
    virtual Result<SignedCertificateTimestamp> submit(const trust::Certificate& cert) = 0;
};

}  // namespace dcm::ctlog
