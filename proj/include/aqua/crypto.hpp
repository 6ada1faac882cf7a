// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "aqua/bytes.hpp"

namespace aqua::crypto {

// Signature/encryption scheme of a key. Pb is the ledger-platform scheme
// (recoverable ECDSA over secp256k1, plus ECIES-style hybrid encryption);
// Tee is the attestation-platform scheme (Ed25519).
enum class Scheme : std::uint8_t { kPb = 0, kTee = 1 };

struct PublicKey {
    Scheme scheme = Scheme::kPb;
    Bytes bytes;  // pb: 33-byte compressed point; tee: 32-byte raw key

    auto operator<=>(const PublicKey&) const = default;
};

struct PrivateKey {
    Scheme scheme = Scheme::kPb;
    Bytes bytes;  // 32 bytes for both schemes
};

struct KeyPair {
    Scheme scheme = Scheme::kPb;
    PrivateKey secret;
    PublicKey pub;
};

// pb: r(32) || s(32) with a recovery hint; tee: 64-byte Ed25519 signature.
struct Signature {
    Bytes bytes;
    std::optional<std::uint8_t> recovery_id;

    Bytes encode() const;
    static Signature decode(ByteView in);
};

// Ephemeral-key hybrid ciphertext: secp256k1 ECDH + AES-256-GCM.
struct Ciphertext {
    Bytes ephemeral_pub;  // 33 bytes
    Bytes nonce;          // 12 bytes
    Bytes payload;        // ciphertext
    Bytes tag;            // 16 bytes

    Bytes encode() const;
    static Ciphertext decode(ByteView in);
};

// Injectable entropy source so whole-stack runs are reproducible from a
// seed. Default-constructed instances pull from the OS.
class Rng {
  public:
    Rng();
    explicit Rng(std::uint64_t seed);

    void fill(std::uint8_t* out, std::size_t n);
    Bytes bytes(std::size_t n);
    std::uint64_t next_u64();

  private:
    std::mt19937_64 gen_;
};

Digest sha256(ByteView data);
Digest sha256(std::initializer_list<ByteView> parts);
Bytes hmac_sha256(ByteView key, ByteView data);

KeyPair keygen(Scheme scheme, Rng& rng);
// Rebuilds the keypair for a known 32-byte secret.
KeyPair keypair_from_secret(Scheme scheme, ByteView secret);

// Deterministic signing (RFC 6979 nonces for pb). The message is hashed
// with SHA-256 before signing under either scheme.
Signature sign(const PrivateKey& key, ByteView message);
bool verify(const PublicKey& key, ByteView message, const Signature& sig);
// Recovers the pb public key from a recoverable signature; nullopt when the
// signature or hint is invalid.
std::optional<PublicKey> recover(ByteView message, const Signature& sig);

Ciphertext encrypt(const PublicKey& key, ByteView plaintext, Rng& rng);
// Throws IntegrityError on authentication failure; never returns garbage.
Bytes decrypt(const PrivateKey& key, const Ciphertext& ct);

// AEAD used for enclave sealing (AES-256-GCM under a raw 32-byte key).
Bytes aead_seal(const Digest& key, ByteView nonce12, ByteView plaintext, ByteView aad);
Bytes aead_open(const Digest& key, ByteView nonce12, ByteView sealed, ByteView aad);

}  // namespace aqua::crypto
