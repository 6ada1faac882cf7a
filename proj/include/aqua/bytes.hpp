// Copyright 2026 The Aquareum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aqua {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Thrown when decoding malformed or truncated input.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a protocol-level integrity check fails (bad proof, stale
// state, tampered ciphertext). Distinguishable from ParseError downstream.
struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

// 32-byte hash value. Equality is byte equality.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    bool is_zero() const {
        for (auto b : bytes)
            if (b != 0) return false;
        return true;
    }
    std::string hex() const;
};

inline constexpr std::size_t kDigestSize = 32;

Bytes from_hex(std::string_view hex);
std::string to_hex(ByteView data);

inline Bytes to_bytes(ByteView v) { return Bytes(v.begin(), v.end()); }
inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}
inline ByteView as_view(const Bytes& b) { return ByteView(b.data(), b.size()); }
inline ByteView as_view(const Digest& d) { return ByteView(d.bytes.data(), d.bytes.size()); }

// Canonical serialization helpers. All integers big-endian, all
// variable-length fields 4-byte length-prefixed.
class ByteWriter {
  public:
    void put_u8(std::uint8_t v) { out_.push_back(v); }
    void put_u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void put_u32(std::uint32_t v) {
        for (int i = 3; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void put_u64(std::uint64_t v) {
        for (int i = 7; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void put_bytes(ByteView v) { out_.insert(out_.end(), v.begin(), v.end()); }
    void put_digest(const Digest& d) { put_bytes(as_view(d)); }
    void put_var(ByteView v) {
        put_u32(static_cast<std::uint32_t>(v.size()));
        put_bytes(v);
    }
    void put_bool(bool b) { put_u8(b ? 1 : 0); }

    const Bytes& data() const& { return out_; }
    Bytes&& data() && { return std::move(out_); }

  private:
    Bytes out_;
};

class ByteReader {
  public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t get_u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t get_u16() {
        need(2);
        std::uint16_t v = (std::uint16_t(data_[pos_]) << 8) | data_[pos_ + 1];
        pos_ += 2;
        return v;
    }
    std::uint32_t get_u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 4;
        return v;
    }
    std::uint64_t get_u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
        pos_ += 8;
        return v;
    }
    Bytes get_bytes(std::size_t n) {
        need(n);
        Bytes v(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return v;
    }
    Digest get_digest() {
        need(kDigestSize);
        Digest d;
        std::memcpy(d.bytes.data(), data_.data() + pos_, kDigestSize);
        pos_ += kDigestSize;
        return d;
    }
    Bytes get_var() {
        std::uint32_t n = get_u32();
        if (n > remaining()) throw ParseError("length prefix exceeds input");
        return get_bytes(n);
    }
    bool get_bool() { return get_u8() != 0; }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const {
        if (!done()) throw ParseError("trailing bytes after value");
    }

  private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw ParseError("unexpected end of input");
    }
    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace aqua
