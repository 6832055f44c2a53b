// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace dcm::crypto {

void ensure_init() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialization failed");
        }
    });
}

Hash32 sha256(ByteSpan data) {
    ensure_init();
    static_assert(crypto_hash_sha256_BYTES == 32);
    Hash32 out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

VerifyKey SigningKey::verify_key() const {
    ensure_init();
    VerifyKey out;
    crypto_sign_ed25519_sk_to_pk(out.bytes.data(), bytes.data());
    return out;
}

KeyPair generate_keypair() {
    ensure_init();
    KeyPair kp;
    crypto_sign_ed25519_keypair(kp.public_key.bytes.data(), kp.secret.bytes.data());
    return kp;
}

KeyPair keypair_from_seed(const Hash32& seed) {
    ensure_init();
    static_assert(crypto_sign_ed25519_SEEDBYTES == 32);
    KeyPair kp;
    crypto_sign_ed25519_seed_keypair(kp.public_key.bytes.data(), kp.secret.bytes.data(), seed.data());
    return kp;
}

Signature sign(ByteSpan message, const SigningKey& key) {
    ensure_init();
    Signature sig;
    crypto_sign_ed25519_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                                 key.bytes.data());
    return sig;
}

bool verify(ByteSpan message, const Signature& signature, const VerifyKey& key) {
    ensure_init();
    return crypto_sign_ed25519_verify_detached(signature.bytes.data(), message.data(),
                                               message.size(), key.bytes.data()) == 0;
}

}  // namespace dcm::crypto
