// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_UTIL_SERIALIZE_H
#define SHARDPOW_UTIL_SERIALIZE_H

#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shardpow {

struct DeserializeError : std::runtime_error {
    explicit DeserializeError(const std::string& what) : std::runtime_error(what) {}
};

// Canonical encoding: little-endian fixed-width integers, LEB128 varints,
// length-prefixed variable fields.
class Writer {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
    }
    void u128(unsigned __int128 v) {
        for (int i = 0; i < 16; ++i) buf_.push_back(uint8_t(v >> (8 * i)));
    }
    void varint(uint64_t v) {
        while (true) {
            uint8_t b = v & 0x7f;
            v >>= 7;
            buf_.push_back(v ? (b | 0x80) : b);
            if (!v) break;
        }
    }
    void bytes(const uint8_t* p, size_t n) { buf_.insert(buf_.end(), p, p + n); }
    void bytes(std::span<const uint8_t> s) { bytes(s.data(), s.size()); }
    void var_bytes(std::span<const uint8_t> s) {
        varint(s.size());
        bytes(s);
    }
    void var_string(const std::string& s) {
        varint(s.size());
        bytes(reinterpret_cast<const uint8_t*>(s.data()), s.size());
    }

    const std::vector<uint8_t>& data() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

private:
    std::vector<uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() { return take(1)[0]; }
    uint32_t u32() {
        const uint8_t* p = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        const uint8_t* p = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
        return v;
    }
    unsigned __int128 u128() {
        const uint8_t* p = take(16);
        unsigned __int128 v = 0;
        for (int i = 0; i < 16; ++i) v |= (unsigned __int128)(p[i]) << (8 * i);
        return v;
    }
    uint64_t varint() {
        uint64_t v = 0;
        int shift = 0;
        while (true) {
            if (shift > 63) throw DeserializeError("varint overflow");
            uint8_t b = u8();
            v |= uint64_t(b & 0x7f) << shift;
            if (!(b & 0x80)) return v;
            shift += 7;
        }
    }
    std::vector<uint8_t> bytes(size_t n) {
        const uint8_t* p = take(n);
        return std::vector<uint8_t>(p, p + n);
    }
    void bytes_into(uint8_t* out, size_t n) { std::memcpy(out, take(n), n); }
    std::vector<uint8_t> var_bytes() { return bytes(varint()); }
    std::string var_string() {
        auto b = var_bytes();
        return std::string(b.begin(), b.end());
    }

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const {
        if (!done()) throw DeserializeError("trailing bytes");
    }

private:
    const uint8_t* take(size_t n) {
        if (data_.size() - pos_ < n) throw DeserializeError("input truncated");
        const uint8_t* p = data_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

} // namespace shardpow

#endif // SHARDPOW_UTIL_SERIALIZE_H
