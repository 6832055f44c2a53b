// Copyright 2026 dcm contributors
// SPDX-License-Identifier: Apache-2.0

#include "dcm/encoding.hpp"

namespace dcm::enc {

void Encoder::u32(uint32_t v) {
    out_.push_back(static_cast<uint8_t>(v >> 24));
    out_.push_back(static_cast<uint8_t>(v >> 16));
    out_.push_back(static_cast<uint8_t>(v >> 8));
    out_.push_back(static_cast<uint8_t>(v));
}

void Encoder::u64(uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out_.push_back(static_cast<uint8_t>(v >> shift));
    }
}

void Encoder::bytes(ByteSpan data) {
    u32(static_cast<uint32_t>(data.size()));
    raw(data);
}

void Encoder::str(std::string_view text) {
    u32(static_cast<uint32_t>(text.size()));
    out_.insert(out_.end(), text.begin(), text.end());
}

void Encoder::opt_str(const std::optional<std::string>& text) {
    u8(text.has_value() ? 1 : 0);
    if (text) {
        str(*text);
    }
}

bool Decoder::take(size_t n) {
    if (failed_ || in_.size() - pos_ < n) {
        failed_ = true;
        return false;
    }
    pos_ += n;
    return true;
}

uint8_t Decoder::u8() {
    if (!take(1)) {
        return 0;
    }
    return in_[pos_ - 1];
}

uint32_t Decoder::u32() {
    if (!take(4)) {
        return 0;
    }
    uint32_t v = 0;
    for (size_t i = pos_ - 4; i < pos_; ++i) {
        v = (v << 8) | in_[i];
    }
    return v;
}

uint64_t Decoder::u64() {
    if (!take(8)) {
        return 0;
    }
    uint64_t v = 0;
    for (size_t i = pos_ - 8; i < pos_; ++i) {
        v = (v << 8) | in_[i];
    }
    return v;
}

Bytes Decoder::bytes() {
    uint32_t n = u32();
    if (!take(n)) {
        return {};
    }
    return Bytes(in_.begin() + static_cast<ptrdiff_t>(pos_ - n),
                 in_.begin() + static_cast<ptrdiff_t>(pos_));
}

std::string Decoder::str() {
    uint32_t n = u32();
    if (!take(n)) {
        return {};
    }
    return std::string(reinterpret_cast<const char*>(in_.data()) + pos_ - n, n);
}

std::optional<std::string> Decoder::opt_str() {
    uint8_t present = u8();
    if (failed_ || present == 0) {
        return std::nullopt;
    }
    if (present != 1) {
        failed_ = true;
        return std::nullopt;
    }
    return str();
}

}  // namespace dcm::enc
