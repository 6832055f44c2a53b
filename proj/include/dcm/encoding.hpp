// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0
//
// Canonical wire encoding shared by every signed or persisted structure.
// The format is deliberately small so two encodings of equal values are
// byte-identical:
//
//   u8 / u32 / u64    fixed width, big-endian
//   i64               two's complement, big-endian
//   bytes             u32 length prefix + raw bytes
//   string            u32 length prefix + UTF-8 bytes
//   optional<X>       one presence byte (0 or 1), then X when present
//   array<u8, N>      raw bytes, no prefix (size is part of the schema)

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dcm/common.hpp"

namespace dcm::enc {

class Encoder {
  public:
    void u8(uint8_t v) { out_.push_back(v); }
    void u32(uint32_t v);
    void u64(uint64_t v);
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void raw(ByteSpan data) { out_.insert(out_.end(), data.begin(), data.end()); }

    template <size_t N>
    void fixed(const std::array<uint8_t, N>& data) {
        out_.insert(out_.end(), data.begin(), data.end());
    }

    void bytes(ByteSpan data);
    void str(std::string_view text);
    void opt_str(const std::optional<std::string>& text);

    [[nodiscard]] const Bytes& view() const { return out_; }
    Bytes take() { return std::move(out_); }

  private:
    Bytes out_;
};

/// Cursor over an encoded buffer. Any underrun latches the failed flag and
/// subsequent reads return zeroed values; callers check failed() once at the end.
class Decoder {
  public:
    explicit Decoder(ByteSpan data) : in_(data) {}

    uint8_t u8();
    uint32_t u32();
    uint64_t u64();
    int64_t i64() { return static_cast<int64_t>(u64()); }

    template <size_t N>
    std::array<uint8_t, N> fixed() {
        std::array<uint8_t, N> out{};
        if (!take(N)) {
            return out;
        }
        std::copy_n(in_.begin() + static_cast<ptrdiff_t>(pos_ - N), N, out.begin());
        return out;
    }

    Bytes bytes();
    std::string str();
    std::optional<std::string> opt_str();

    [[nodiscard]] bool failed() const { return failed_; }
    [[nodiscard]] size_t remaining() const { return in_.size() - pos_; }
    /// True when the whole buffer was consumed without error.
    [[nodiscard]] bool done() const { return !failed_ && pos_ == in_.size(); }

  private:
    bool take(size_t n);

    ByteSpan in_;
    size_t pos_ = 0;
    bool failed_ = false;
};

}  // namespace dcm::enc
