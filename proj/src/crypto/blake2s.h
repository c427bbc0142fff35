// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_CRYPTO_BLAKE2S_H
#define SHARDPOW_CRYPTO_BLAKE2S_H

#include <array>
#include <cstddef>
#include <cstdint>

namespace shardpow {

/** Incremental BLAKE2s-256 (RFC 7693, unkeyed, 32-byte digest). */
class Blake2s {
public:
    Blake2s();
    Blake2s& write(const uint8_t* data, size_t len);
    void finalize(uint8_t out[32]);
    void reset();

    static std::array<uint8_t, 32> hash(const uint8_t* data, size_t len);

private:
    void compress(const uint8_t block[64], bool last);

    uint32_t h_[8];
    uint64_t bytes_fed_;
    uint8_t buf_[64];
    size_t buf_len_;
};

} // namespace shardpow

#endif // SHARDPOW_CRYPTO_BLAKE2S_H
