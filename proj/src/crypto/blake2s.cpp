// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "crypto/blake2s.h"

#include <cstring>

namespace shardpow {

namespace {

constexpr uint32_t IV[8] = {
    0x6A09E667u, 0xBB67AE85u, 0x3C6EF372u, 0xA54FF53Au,
    0x510E527Fu, 0x9B05688Cu, 0x1F83D9ABu, 0x5BE0CD19u,
};

constexpr uint8_t SIGMA[10][16] = {
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15},
    {14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3},
    {11, 8, 12, 0, 5, 2, 15, 13, 10, 14, 3, 6, 7, 1, 9, 4},
    {7, 9, 3, 1, 13, 12, 11, 14, 2, 6, 5, 10, 4, 0, 15, 8},
    {9, 0, 5, 7, 2, 4, 10, 15, 14, 1, 11, 12, 6, 8, 3, 13},
    {2, 12, 6, 10, 0, 11, 8, 3, 4, 13, 7, 5, 15, 14, 1, 9},
    {12, 5, 1, 15, 14, 13, 4, 10, 0, 7, 6, 3, 9, 2, 8, 11},
    {13, 11, 7, 14, 12, 1, 3, 9, 5, 0, 15, 4, 8, 6, 2, 10},
    {6, 15, 14, 9, 11, 3, 0, 8, 12, 2, 13, 7, 1, 4, 10, 5},
    {10, 2, 8, 4, 7, 6, 1, 5, 15, 11, 9, 14, 3, 12, 13, 0},
};

inline uint32_t rotr32(uint32_t x, unsigned n) { return (x >> n) | (x << (32 - n)); }

inline uint32_t load32(const uint8_t* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}

inline void g(uint32_t& a, uint32_t& b, uint32_t& c, uint32_t& d, uint32_t x, uint32_t y) {
    a = a + b + x;
    d = rotr32(d ^ a, 16);
    c = c + d;
    b = rotr32(b ^ c, 12);
    a = a + b + y;
    d = rotr32(d ^ a, 8);
    c = c + d;
    b = rotr32(b ^ c, 7);
}

} // namespace

Blake2s::Blake2s() { reset(); }

void Blake2s::reset() {
    std::memcpy(h_, IV, sizeof(h_));
    h_[0] ^= 0x01010000u ^ 32u; // digest length 32, no key
    bytes_fed_ = 0;
    buf_len_ = 0;
}

void Blake2s::compress(const uint8_t block[64], bool last) {
    uint32_t m[16];
    for (int i = 0; i < 16; ++i) m[i] = load32(block + 4 * i);

    uint32_t v[16];
    std::memcpy(v, h_, 32);
    std::memcpy(v + 8, IV, 32);
    v[12] ^= uint32_t(bytes_fed_);
    v[13] ^= uint32_t(bytes_fed_ >> 32);
    if (last) v[14] = ~v[14];

    for (int r = 0; r < 10; ++r) {
        const uint8_t* s = SIGMA[r];
        g(v[0], v[4], v[8], v[12], m[s[0]], m[s[1]]);
        g(v[1], v[5], v[9], v[13], m[s[2]], m[s[3]]);
        g(v[2], v[6], v[10], v[14], m[s[4]], m[s[5]]);
        g(v[3], v[7], v[11], v[15], m[s[6]], m[s[7]]);
        g(v[0], v[5], v[10], v[15], m[s[8]], m[s[9]]);
        g(v[1], v[6], v[11], v[12], m[s[10]], m[s[11]]);
        g(v[2], v[7], v[8], v[13], m[s[12]], m[s[13]]);
        g(v[3], v[4], v[9], v[14], m[s[14]], m[s[15]]);
    }
    for (int i = 0; i < 8; ++i) h_[i] ^= v[i] ^ v[i + 8];
}

Blake2s& Blake2s::write(const uint8_t* data, size_t len) {
    while (len > 0) {
        if (buf_len_ == 64) {
            bytes_fed_ += 64;
            compress(buf_, false);
            buf_len_ = 0;
        }
        size_t take = 64 - buf_len_;
        if (take > len) take = len;
        std::memcpy(buf_ + buf_len_, data, take);
        buf_len_ += take;
        data += take;
        len -= take;
    }
    return *this;
}

void Blake2s::finalize(uint8_t out[32]) {
    bytes_fed_ += buf_len_;
    std::memset(buf_ + buf_len_, 0, 64 - buf_len_);
    compress(buf_, true);
    for (int i = 0; i < 8; ++i) {
        out[4 * i + 0] = uint8_t(h_[i]);
        out[4 * i + 1] = uint8_t(h_[i] >> 8);
        out[4 * i + 2] = uint8_t(h_[i] >> 16);
        out[4 * i + 3] = uint8_t(h_[i] >> 24);
    }
}

std::array<uint8_t, 32> Blake2s::hash(const uint8_t* data, size_t len) {
    std::array<uint8_t, 32> out;
    Blake2s ctx;
    ctx.write(data, len);
    ctx.finalize(out.data());
    return out;
}

} // namespace shardpow
