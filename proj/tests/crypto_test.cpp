// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/crypto.hpp"

#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <set>

using namespace aqua;
using namespace aqua::crypto;

namespace {

nlohmann::json load_vectors() {
    std::ifstream in(std::string(AQUA_DATA_DIR) + "/crypto_vectors.json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("sha256 empty-input digest matches the published vector") {
    auto vectors = load_vectors();
    CHECK(sha256(ByteView{}).hex() == vectors["sha256_empty"].get<std::string>());
}

TEST_CASE("sha256 is deterministic and length-extension distinct") {
    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        Bytes x = rng.bytes(1 + rng.next_u64() % 64);
        CHECK(sha256(as_view(x)) == sha256(as_view(x)));
        Bytes extended = x;
        extended.push_back(0x00);
        CHECK(sha256(as_view(x)) != sha256(as_view(extended)));
    }
}

TEST_CASE("pinned sign/verify vector per scheme") {
    auto vectors = load_vectors();
    for (const char* name : {"pb", "tee"}) {
        auto& v = vectors[name];
        Scheme scheme = std::string(name) == "pb" ? Scheme::kPb : Scheme::kTee;
        auto kp = keypair_from_secret(scheme, as_view(from_hex(v["secret"].get<std::string>())));
        CHECK(to_hex(as_view(kp.pub.bytes)) == v["public"].get<std::string>());

        Bytes message = to_bytes(v["message"].get<std::string>());
        Signature sig = sign(kp.secret, as_view(message));
        CHECK(to_hex(as_view(sig.bytes)) == v["signature"].get<std::string>());
        if (scheme == Scheme::kPb)
            CHECK(int(*sig.recovery_id) == v["recovery_id"].get<int>());
        CHECK(verify(kp.pub, as_view(message), sig));
    }
}

TEST_CASE("keygen round-trips and produces distinct keys") {
    Rng rng(3);
    for (Scheme scheme : {Scheme::kPb, Scheme::kTee}) {
        auto kp1 = keygen(scheme, rng);
        auto kp2 = keygen(scheme, rng);
        CHECK(kp1.pub != kp2.pub);

        Bytes msg = to_bytes(std::string_view("round trip"));
        Signature sig = sign(kp1.secret, as_view(msg));
        CHECK(verify(kp1.pub, as_view(msg), sig));
        CHECK_FALSE(verify(kp2.pub, as_view(msg), sig));

        Bytes flipped = msg;
        flipped[0] ^= 0x01;
        CHECK_FALSE(verify(kp1.pub, as_view(flipped), sig));
    }
}

TEST_CASE("malformed signatures verify false instead of throwing") {
    Rng rng(5);
    auto kp = keygen(Scheme::kPb, rng);
    Bytes msg = to_bytes(std::string_view("msg"));
    Signature sig;
    sig.bytes = Bytes(64, 0x00);
    CHECK_FALSE(verify(kp.pub, as_view(msg), sig));
    sig.bytes = rng.bytes(10);
    CHECK_FALSE(verify(kp.pub, as_view(msg), sig));

    auto good = sign(kp.secret, as_view(msg));
    auto high_s = good;
    // Tampered s: any bit flip must fail.
    high_s.bytes[40] ^= 0x01;
    CHECK_FALSE(verify(kp.pub, as_view(msg), high_s));
}

TEST_CASE("recovered public key equals the signer's across 100 messages") {
    Rng rng(7);
    auto kp = keygen(Scheme::kPb, rng);
    for (int i = 0; i < 100; ++i) {
        Bytes msg = rng.bytes(1 + rng.next_u64() % 80);
        Signature sig = sign(kp.secret, as_view(msg));
        auto recovered = recover(as_view(msg), sig);
        REQUIRE(recovered.has_value());
        CHECK(*recovered == kp.pub);
    }
}

TEST_CASE("recovery with a wrong hint yields a different key") {
    Rng rng(9);
    auto kp = keygen(Scheme::kPb, rng);
    Bytes msg = to_bytes(std::string_view("hint matters"));
    Signature sig = sign(kp.secret, as_view(msg));
    Signature wrong = sig;
    *wrong.recovery_id ^= 1;
    auto recovered = recover(as_view(msg), wrong);
    if (recovered) CHECK(*recovered != kp.pub);
}

TEST_CASE("encryption round-trips and authenticates") {
    Rng rng(11);
    auto kp = keygen(Scheme::kPb, rng);
    Bytes plaintext = rng.bytes(300);

    Ciphertext ct = encrypt(kp.pub, as_view(plaintext), rng);
    CHECK(decrypt(kp.secret, ct) == plaintext);

    auto other = keygen(Scheme::kPb, rng);
    CHECK_THROWS_AS((void)decrypt(other.secret, ct), IntegrityError);

    auto tampered = ct;
    tampered.payload[4] ^= 0x01;
    CHECK_THROWS_AS((void)decrypt(kp.secret, tampered), IntegrityError);
    tampered = ct;
    tampered.tag[0] ^= 0x01;
    CHECK_THROWS_AS((void)decrypt(kp.secret, tampered), IntegrityError);
}

TEST_CASE("encrypting the same plaintext twice differs") {
    Rng rng(13);
    auto kp = keygen(Scheme::kPb, rng);
    Bytes plaintext = to_bytes(std::string_view("same bytes"));
    Ciphertext a = encrypt(kp.pub, as_view(plaintext), rng);
    Ciphertext b = encrypt(kp.pub, as_view(plaintext), rng);
    CHECK(a.encode() != b.encode());
    CHECK(decrypt(kp.secret, a) == decrypt(kp.secret, b));
}

TEST_CASE("ciphertext and signature encodings round-trip") {
    Rng rng(15);
    auto kp = keygen(Scheme::kPb, rng);
    Ciphertext ct = encrypt(kp.pub, as_view(to_bytes(std::string_view("wire"))), rng);
    auto ct2 = Ciphertext::decode(as_view(ct.encode()));
    CHECK(decrypt(kp.secret, ct2) == to_bytes(std::string_view("wire")));

    Signature sig = sign(kp.secret, as_view(to_bytes(std::string_view("wire"))));
    auto sig2 = Signature::decode(as_view(sig.encode()));
    CHECK(sig2.bytes == sig.bytes);
    CHECK(sig2.recovery_id == sig.recovery_id);
}

TEST_CASE("seeded rng reproduces its stream") {
    Rng a(42), b(42);
    CHECK(a.bytes(33) == b.bytes(33));
    Rng c(43);
    CHECK(a.bytes(33) != c.bytes(33));
}

TEST_CASE("aead seal/open round-trip and tamper rejection") {
    Digest key = sha256(to_bytes(std::string_view("k")));
    Rng rng(17);
    Bytes nonce = rng.bytes(12);
    Bytes pt = rng.bytes(100);
    Bytes aad = to_bytes(std::string_view("context"));

    Bytes sealed = aead_seal(key, as_view(nonce), as_view(pt), as_view(aad));
    CHECK(aead_open(key, as_view(nonce), as_view(sealed), as_view(aad)) == pt);

    Bytes bad = sealed;
    bad[0] ^= 1;
    CHECK_THROWS_AS((void)aead_open(key, as_view(nonce), as_view(bad), as_view(aad)),
                    IntegrityError);
    CHECK_THROWS_AS(
        (void)aead_open(key, as_view(nonce), as_view(sealed), as_view(to_bytes(std::string_view("other")))),
        IntegrityError);
}
