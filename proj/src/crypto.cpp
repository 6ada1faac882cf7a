// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#include "aqua/crypto.hpp"

#include <memory>
#include <mutex>
#include <random>

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>

namespace aqua::crypto {

namespace {

struct BnDeleter {
    void operator()(BIGNUM* p) const { BN_free(p); }
};
struct BnCtxDeleter {
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct PointDeleter {
    void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

struct CryptoError : std::runtime_error {
    explicit CryptoError(const std::string& what) : std::runtime_error(what) {}
};

const EC_GROUP* secp256k1() {
    static EC_GROUP* group = [] {
        EC_GROUP* g = EC_GROUP_new_by_curve_name(NID_secp256k1);
        if (!g) throw CryptoError("secp256k1 group unavailable");
        return g;
    }();
    return group;
}

const BIGNUM* curve_order() {
    static const BIGNUM* n = EC_GROUP_get0_order(secp256k1());
    return n;
}

BnPtr bn_from(ByteView v) {
    BnPtr bn(BN_bin2bn(v.data(), static_cast<int>(v.size()), nullptr));
    if (!bn) throw CryptoError("BN_bin2bn failed");
    return bn;
}

Bytes bn_to_32(const BIGNUM* bn) {
    Bytes out(32, 0);
    if (BN_bn2binpad(bn, out.data(), 32) != 32) throw CryptoError("BN_bn2binpad failed");
    return out;
}

Bytes point_compress(const EC_POINT* p, BN_CTX* ctx) {
    Bytes out(33, 0);
    std::size_t n = EC_POINT_point2oct(secp256k1(), p, POINT_CONVERSION_COMPRESSED, out.data(),
                                       out.size(), ctx);
    if (n != 33) throw CryptoError("point compression failed");
    return out;
}

PointPtr point_decompress(ByteView in, BN_CTX* ctx) {
    PointPtr p(EC_POINT_new(secp256k1()));
    if (!p || in.size() != 33 ||
        EC_POINT_oct2point(secp256k1(), p.get(), in.data(), in.size(), ctx) != 1)
        return nullptr;
    return p;
}

// Deterministic nonce per RFC 6979 (HMAC-SHA256), for the secp256k1 order.
BnPtr rfc6979_nonce(ByteView secret32, const Digest& msg_hash) {
    const BIGNUM* n = curve_order();
    BnPtr h_int = bn_from(as_view(msg_hash));
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr h_mod(BN_new());
    if (BN_mod(h_mod.get(), h_int.get(), n, ctx.get()) != 1) throw CryptoError("BN_mod failed");
    Bytes h_oct = bn_to_32(h_mod.get());

    Bytes V(32, 0x01), K(32, 0x00);
    auto step = [&](std::uint8_t sep, bool with_material) {
        ByteWriter w;
        w.put_bytes(as_view(V));
        w.put_u8(sep);
        if (with_material) {
            w.put_bytes(secret32);
            w.put_bytes(as_view(h_oct));
        }
        K = hmac_sha256(as_view(K), as_view(w.data()));
        V = hmac_sha256(as_view(K), as_view(V));
    };
    step(0x00, true);
    step(0x01, true);

    for (;;) {
        V = hmac_sha256(as_view(K), as_view(V));
        BnPtr k = bn_from(as_view(V));
        if (!BN_is_zero(k.get()) && BN_cmp(k.get(), n) < 0) return k;
        ByteWriter w;
        w.put_bytes(as_view(V));
        w.put_u8(0x00);
        K = hmac_sha256(as_view(K), as_view(w.data()));
        V = hmac_sha256(as_view(K), as_view(V));
    }
}

Signature ecdsa_sign(ByteView secret32, const Digest& msg_hash) {
    const EC_GROUP* g = secp256k1();
    const BIGNUM* n = curve_order();
    BnCtxPtr ctx(BN_CTX_new());

    BnPtr d = bn_from(secret32);
    BnPtr z = bn_from(as_view(msg_hash));
    BnPtr k = rfc6979_nonce(secret32, msg_hash);

    PointPtr R(EC_POINT_new(g));
    if (EC_POINT_mul(g, R.get(), k.get(), nullptr, nullptr, ctx.get()) != 1)
        throw CryptoError("EC_POINT_mul failed");
    BnPtr rx(BN_new()), ry(BN_new());
    if (EC_POINT_get_affine_coordinates(g, R.get(), rx.get(), ry.get(), ctx.get()) != 1)
        throw CryptoError("affine coords failed");

    BnPtr r(BN_new());
    if (BN_mod(r.get(), rx.get(), n, ctx.get()) != 1) throw CryptoError("BN_mod failed");
    if (BN_is_zero(r.get())) throw CryptoError("degenerate nonce");

    std::uint8_t recid = BN_is_odd(ry.get()) ? 1 : 0;
    if (BN_cmp(rx.get(), n) >= 0) recid |= 2;

    // s = k^-1 (z + r*d) mod n
    BnPtr kinv(BN_new()), tmp(BN_new()), s(BN_new());
    if (!BN_mod_inverse(kinv.get(), k.get(), n, ctx.get())) throw CryptoError("no inverse");
    if (BN_mod_mul(tmp.get(), r.get(), d.get(), n, ctx.get()) != 1 ||
        BN_mod_add(tmp.get(), tmp.get(), z.get(), n, ctx.get()) != 1 ||
        BN_mod_mul(s.get(), kinv.get(), tmp.get(), n, ctx.get()) != 1)
        throw CryptoError("s computation failed");
    if (BN_is_zero(s.get())) throw CryptoError("degenerate s");

    // Low-S normalization; flips the parity of the recovered point.
    BnPtr half(BN_dup(n));
    BN_rshift1(half.get(), half.get());
    if (BN_cmp(s.get(), half.get()) > 0) {
        BN_sub(s.get(), n, s.get());
        recid ^= 1;
    }

    Signature sig;
    sig.bytes = bn_to_32(r.get());
    Bytes sb = bn_to_32(s.get());
    sig.bytes.insert(sig.bytes.end(), sb.begin(), sb.end());
    sig.recovery_id = recid;
    return sig;
}

bool ecdsa_verify(ByteView pub33, const Digest& msg_hash, ByteView rs64) {
    if (rs64.size() != 64) return false;
    const EC_GROUP* g = secp256k1();
    const BIGNUM* n = curve_order();
    BnCtxPtr ctx(BN_CTX_new());

    PointPtr Q = point_decompress(pub33, ctx.get());
    if (!Q) return false;

    BnPtr r = bn_from(rs64.subspan(0, 32));
    BnPtr s = bn_from(rs64.subspan(32, 32));
    if (BN_is_zero(r.get()) || BN_is_zero(s.get())) return false;
    if (BN_cmp(r.get(), n) >= 0 || BN_cmp(s.get(), n) >= 0) return false;
    BnPtr half(BN_dup(n));
    BN_rshift1(half.get(), half.get());
    if (BN_cmp(s.get(), half.get()) > 0) return false;  // reject malleable high-S

    BnPtr z = bn_from(as_view(msg_hash));
    BnPtr sinv(BN_new()), u1(BN_new()), u2(BN_new());
    if (!BN_mod_inverse(sinv.get(), s.get(), n, ctx.get())) return false;
    if (BN_mod_mul(u1.get(), z.get(), sinv.get(), n, ctx.get()) != 1) return false;
    if (BN_mod_mul(u2.get(), r.get(), sinv.get(), n, ctx.get()) != 1) return false;

    PointPtr P(EC_POINT_new(g));
    if (EC_POINT_mul(g, P.get(), u1.get(), Q.get(), u2.get(), ctx.get()) != 1) return false;
    if (EC_POINT_is_at_infinity(g, P.get())) return false;

    BnPtr px(BN_new());
    if (EC_POINT_get_affine_coordinates(g, P.get(), px.get(), nullptr, ctx.get()) != 1)
        return false;
    BnPtr px_mod(BN_new());
    if (BN_mod(px_mod.get(), px.get(), n, ctx.get()) != 1) return false;
    return BN_cmp(px_mod.get(), r.get()) == 0;
}

std::optional<Bytes> ecdsa_recover(const Digest& msg_hash, ByteView rs64, std::uint8_t recid) {
    if (rs64.size() != 64 || recid > 3) return std::nullopt;
    const EC_GROUP* g = secp256k1();
    const BIGNUM* n = curve_order();
    BnCtxPtr ctx(BN_CTX_new());

    BnPtr r = bn_from(rs64.subspan(0, 32));
    BnPtr s = bn_from(rs64.subspan(32, 32));
    if (BN_is_zero(r.get()) || BN_is_zero(s.get())) return std::nullopt;
    if (BN_cmp(r.get(), n) >= 0 || BN_cmp(s.get(), n) >= 0) return std::nullopt;

    // x = r + (recid >> 1) * n, must be a valid field element.
    BnPtr p(BN_new()), a(BN_new()), b(BN_new());
    if (EC_GROUP_get_curve(g, p.get(), a.get(), b.get(), ctx.get()) != 1) return std::nullopt;
    BnPtr x(BN_dup(r.get()));
    if (recid & 2) {
        if (BN_add(x.get(), x.get(), n) != 1) return std::nullopt;
    }
    if (BN_cmp(x.get(), p.get()) >= 0) return std::nullopt;

    PointPtr R(EC_POINT_new(g));
    if (EC_POINT_set_compressed_coordinates(g, R.get(), x.get(), recid & 1, ctx.get()) != 1)
        return std::nullopt;
    if (EC_POINT_is_on_curve(g, R.get(), ctx.get()) != 1) return std::nullopt;

    // Q = r^-1 (s*R - z*G)
    BnPtr rinv(BN_new());
    if (!BN_mod_inverse(rinv.get(), r.get(), n, ctx.get())) return std::nullopt;
    BnPtr z = bn_from(as_view(msg_hash));
    BnPtr zneg(BN_new());
    BN_zero(zneg.get());
    if (BN_mod_sub(zneg.get(), zneg.get(), z.get(), n, ctx.get()) != 1) return std::nullopt;
    BnPtr u1(BN_new()), u2(BN_new());
    if (BN_mod_mul(u1.get(), zneg.get(), rinv.get(), n, ctx.get()) != 1) return std::nullopt;
    if (BN_mod_mul(u2.get(), s.get(), rinv.get(), n, ctx.get()) != 1) return std::nullopt;

    PointPtr Q(EC_POINT_new(g));
    if (EC_POINT_mul(g, Q.get(), u1.get(), R.get(), u2.get(), ctx.get()) != 1)
        return std::nullopt;
    if (EC_POINT_is_at_infinity(g, Q.get())) return std::nullopt;
    return point_compress(Q.get(), ctx.get());
}

PkeyPtr ed25519_private(ByteView seed32) {
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed32.data(),
                                             seed32.size()));
    if (!key) throw CryptoError("ed25519 key import failed");
    return key;
}

}  // namespace
}  // namespace aqua::crypto

namespace aqua {

std::string Digest::hex() const { return to_hex(as_view(*this)); }

Bytes from_hex(std::string_view hex) {
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ParseError("invalid hex character");
    };
    if (hex.size() % 2 != 0) throw ParseError("odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>((nib(hex[i]) << 4) | nib(hex[i + 1])));
    return out;
}

std::string to_hex(ByteView data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

}  // namespace aqua

namespace aqua::crypto {

Digest sha256(ByteView data) { return sha256({data}); }

Digest sha256(std::initializer_list<ByteView> parts) {
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    if (EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw CryptoError("sha256 init failed");
    for (const auto& p : parts)
        if (EVP_DigestUpdate(ctx.get(), p.data(), p.size()) != 1)
            throw CryptoError("sha256 update failed");
    Digest d;
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), d.bytes.data(), &len) != 1 || len != 32)
        throw CryptoError("sha256 final failed");
    return d;
}

Bytes hmac_sha256(ByteView key, ByteView data) {
    Bytes out(32, 0);
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
              out.data(), &len) ||
        len != 32)
        throw CryptoError("HMAC failed");
    return out;
}

Rng::Rng() {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    gen_.seed(seq);
}

Rng::Rng(std::uint64_t seed) : gen_(seed) {}

void Rng::fill(std::uint8_t* out, std::size_t n) {
    while (n >= 8) {
        std::uint64_t v = gen_();
        for (int i = 7; i >= 0; --i) *out++ = static_cast<std::uint8_t>(v >> (8 * i));
        n -= 8;
    }
    if (n > 0) {
        std::uint64_t v = gen_();
        for (std::size_t i = 0; i < n; ++i) *out++ = static_cast<std::uint8_t>(v >> (8 * (7 - i)));
    }
}

Bytes Rng::bytes(std::size_t n) {
    Bytes out(n, 0);
    fill(out.data(), n);
    return out;
}

std::uint64_t Rng::next_u64() { return gen_(); }

Bytes Signature::encode() const {
    ByteWriter w;
    w.put_u8(recovery_id ? 1 : 0);
    if (recovery_id) w.put_u8(*recovery_id);
    w.put_var(as_view(bytes));
    return std::move(w).data();
}

Signature Signature::decode(ByteView in) {
    ByteReader r(in);
    Signature sig;
    if (r.get_u8() != 0) sig.recovery_id = r.get_u8();
    sig.bytes = r.get_var();
    r.expect_done();
    return sig;
}

Bytes Ciphertext::encode() const {
    ByteWriter w;
    w.put_var(as_view(ephemeral_pub));
    w.put_var(as_view(nonce));
    w.put_var(as_view(payload));
    w.put_var(as_view(tag));
    return std::move(w).data();
}

Ciphertext Ciphertext::decode(ByteView in) {
    ByteReader r(in);
    Ciphertext ct;
    ct.ephemeral_pub = r.get_var();
    ct.nonce = r.get_var();
    ct.payload = r.get_var();
    ct.tag = r.get_var();
    r.expect_done();
    return ct;
}

KeyPair keygen(Scheme scheme, Rng& rng) {
    if (scheme == Scheme::kTee) {
        Bytes seed = rng.bytes(32);
        return keypair_from_secret(scheme, as_view(seed));
    }
    const BIGNUM* n = curve_order();
    for (;;) {
        Bytes secret = rng.bytes(32);
        BnPtr d = bn_from(as_view(secret));
        if (BN_is_zero(d.get()) || BN_cmp(d.get(), n) >= 0) continue;
        return keypair_from_secret(scheme, as_view(secret));
    }
}

KeyPair keypair_from_secret(Scheme scheme, ByteView secret) {
    if (secret.size() != 32) throw CryptoError("secret must be 32 bytes");
    KeyPair kp;
    kp.scheme = scheme;
    kp.secret = PrivateKey{scheme, to_bytes(secret)};
    if (scheme == Scheme::kTee) {
        PkeyPtr key = ed25519_private(secret);
        Bytes pub(32, 0);
        std::size_t len = 32;
        if (EVP_PKEY_get_raw_public_key(key.get(), pub.data(), &len) != 1 || len != 32)
            throw CryptoError("ed25519 public key derivation failed");
        kp.pub = PublicKey{scheme, std::move(pub)};
        return kp;
    }
    const EC_GROUP* g = secp256k1();
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr d = bn_from(secret);
    if (BN_is_zero(d.get()) || BN_cmp(d.get(), curve_order()) >= 0)
        throw CryptoError("secret out of range");
    PointPtr Q(EC_POINT_new(g));
    if (EC_POINT_mul(g, Q.get(), d.get(), nullptr, nullptr, ctx.get()) != 1)
        throw CryptoError("public derivation failed");
    kp.pub = PublicKey{scheme, point_compress(Q.get(), ctx.get())};
    return kp;
}

Signature sign(const PrivateKey& key, ByteView message) {
    Digest h = sha256(message);
    if (key.scheme == Scheme::kPb) return ecdsa_sign(as_view(key.bytes), h);

    PkeyPtr pkey = ed25519_private(as_view(key.bytes));
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    Signature sig;
    sig.bytes.resize(64);
    std::size_t len = 64;
    if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1 ||
        EVP_DigestSign(ctx.get(), sig.bytes.data(), &len, h.bytes.data(), h.bytes.size()) != 1 ||
        len != 64)
        throw CryptoError("ed25519 signing failed");
    return sig;
}

bool verify(const PublicKey& key, ByteView message, const Signature& sig) {
    Digest h = sha256(message);
    if (key.scheme == Scheme::kPb) {
        if (key.bytes.size() != 33) return false;
        return ecdsa_verify(as_view(key.bytes), h, as_view(sig.bytes));
    }
    if (key.bytes.size() != 32 || sig.bytes.size() != 64) return false;
    PkeyPtr pkey(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, key.bytes.data(),
                                             key.bytes.size()));
    if (!pkey) return false;
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1) return false;
    return EVP_DigestVerify(ctx.get(), sig.bytes.data(), sig.bytes.size(), h.bytes.data(),
                            h.bytes.size()) == 1;
}

std::optional<PublicKey> recover(ByteView message, const Signature& sig) {
    if (!sig.recovery_id) return std::nullopt;
    Digest h = sha256(message);
    auto pub = ecdsa_recover(h, as_view(sig.bytes), *sig.recovery_id);
    if (!pub) return std::nullopt;
    return PublicKey{Scheme::kPb, std::move(*pub)};
}

namespace {

Digest ecies_key(ByteView ephemeral_pub, const EC_POINT* shared, BN_CTX* ctx) {
    Bytes shared_oct = point_compress(shared, ctx);
    return sha256({ephemeral_pub, as_view(shared_oct)});
}

}  // namespace

Ciphertext encrypt(const PublicKey& key, ByteView plaintext, Rng& rng) {
    if (key.scheme != Scheme::kPb) throw CryptoError("encryption needs a pb key");
    const EC_GROUP* g = secp256k1();
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr Q = point_decompress(as_view(key.bytes), ctx.get());
    if (!Q) throw CryptoError("invalid recipient key");

    KeyPair eph = keygen(Scheme::kPb, rng);
    BnPtr e = bn_from(as_view(eph.secret.bytes));
    PointPtr S(EC_POINT_new(g));
    if (EC_POINT_mul(g, S.get(), nullptr, Q.get(), e.get(), ctx.get()) != 1)
        throw CryptoError("ECDH failed");

    Digest aead = ecies_key(as_view(eph.pub.bytes), S.get(), ctx.get());
    Ciphertext ct;
    ct.ephemeral_pub = eph.pub.bytes;
    ct.nonce = rng.bytes(12);
    Bytes sealed = aead_seal(aead, as_view(ct.nonce), plaintext, as_view(ct.ephemeral_pub));
    ct.tag = Bytes(sealed.end() - 16, sealed.end());
    ct.payload = Bytes(sealed.begin(), sealed.end() - 16);
    return ct;
}

Bytes decrypt(const PrivateKey& key, const Ciphertext& ct) {
    if (key.scheme != Scheme::kPb) throw CryptoError("decryption needs a pb key");
    const EC_GROUP* g = secp256k1();
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr E = point_decompress(as_view(ct.ephemeral_pub), ctx.get());
    if (!E) throw IntegrityError("ciphertext: bad ephemeral key");

    BnPtr d = bn_from(as_view(key.bytes));
    PointPtr S(EC_POINT_new(g));
    if (EC_POINT_mul(g, S.get(), nullptr, E.get(), d.get(), ctx.get()) != 1)
        throw IntegrityError("ciphertext: ECDH failed");

    Digest aead = ecies_key(as_view(ct.ephemeral_pub), S.get(), ctx.get());
    Bytes sealed = ct.payload;
    sealed.insert(sealed.end(), ct.tag.begin(), ct.tag.end());
    return aead_open(aead, as_view(ct.nonce), as_view(sealed), as_view(ct.ephemeral_pub));
}

Bytes aead_seal(const Digest& key, ByteView nonce12, ByteView plaintext, ByteView aad) {
    std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes.data(),
                           nonce12.data()) != 1)
        throw CryptoError("AEAD init failed");
    int len = 0;
    if (!aad.empty() &&
        EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
        throw CryptoError("AEAD aad failed");
    Bytes out(plaintext.size() + 16, 0);
    int ct_len = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &ct_len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
        throw CryptoError("AEAD encrypt failed");
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + ct_len, &fin) != 1)
        throw CryptoError("AEAD finalize failed");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, 16, out.data() + ct_len + fin) != 1)
        throw CryptoError("AEAD tag failed");
    out.resize(ct_len + fin + 16);
    return out;
}

Bytes aead_open(const Digest& key, ByteView nonce12, ByteView sealed, ByteView aad) {
    if (sealed.size() < 16) throw IntegrityError("sealed blob too short");
    std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes.data(),
                           nonce12.data()) != 1)
        throw CryptoError("AEAD init failed");
    int len = 0;
    if (!aad.empty() &&
        EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
        throw CryptoError("AEAD aad failed");
    Bytes out(sealed.size() - 16, 0);
    int pt_len = 0;
    if (EVP_DecryptUpdate(ctx.get(), out.data(), &pt_len, sealed.data(),
                          static_cast<int>(sealed.size() - 16)) != 1)
        throw IntegrityError("authentication failed");
    Bytes tag(sealed.end() - 16, sealed.end());
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, 16, tag.data()) != 1)
        throw CryptoError("AEAD tag set failed");
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + pt_len, &fin) != 1)
        throw IntegrityError("authentication failed");
    out.resize(pt_len + fin);
    return out;
}

}  // namespace aqua::crypto
