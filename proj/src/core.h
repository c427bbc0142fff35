// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_CORE_H
#define SHARDPOW_CORE_H

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "util/serialize.h"

namespace shardpow {

using uint256 = boost::multiprecision::uint256_t;
using uint512 = boost::multiprecision::uint512_t;
using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// Hash256

struct Hash256 {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const Hash256&) const = default;
    bool is_zero() const {
        for (uint8_t b : bytes)
            if (b) return false;
        return true;
    }
    std::string hex() const;
    static Hash256 from_hex(const std::string& s);

    // Hash bytes read as a big-endian 256-bit integer.
    uint256 to_uint256() const;
};

/** The all-zero value substituted for unmined subtrees in the shard tree. */
inline Hash256 magic_hash() { return Hash256{}; }

Hash256 blake2s(std::span<const uint8_t> data);
Hash256 blake2s(std::span<const uint8_t> a, std::span<const uint8_t> b);

// ---------------------------------------------------------------------------
// Target and compact bits

struct Target {
    uint256 value = 0;

    auto operator<=>(const Target&) const = default;
    static Target from_compact(uint32_t compact) ;
    uint32_t to_compact() const;
};

/** Exponent/mantissa compact form. Throws std::invalid_argument on T = 0 or
 * T >= 2^256 (unrepresentable). decode(encode(T)) <= T, relative error < 2^-15. */
uint32_t encode_compact(const uint256& target);
uint256 decode_compact(uint32_t compact);

/** Exact D = 2^space_bits / T, returned as a Q.64 fixed-point raw value
 * (i.e. floor(2^(space_bits+64) / T)) in a 512-bit integer. */
uint512 difficulty_q64_exact(const uint256& target, unsigned space_bits = 256);

// ---------------------------------------------------------------------------
// Difficulty: Q64.64 fixed point in 128 bits. Covers every desk-scale
// configuration; from_target throws if the value exceeds 2^64.

class Difficulty {
public:
    Difficulty() : raw_(0) {}
    static Difficulty from_raw(u128 raw) {
        Difficulty d;
        d.raw_ = raw;
        return d;
    }
    static Difficulty from_int(uint64_t d) { return from_raw(u128(d) << 64); }
    static Difficulty from_double(double d);
    static Difficulty from_target(const Target& t, unsigned space_bits);
    /** Inverse map: largest target whose difficulty is >= *this. */
    Target to_target(unsigned space_bits) const;

    u128 raw() const { return raw_; }
    double to_double() const;
    bool is_zero() const { return raw_ == 0; }

    Difficulty operator+(const Difficulty& o) const;
    Difficulty operator-(const Difficulty& o) const;
    Difficulty& operator+=(const Difficulty& o) { return *this = *this + o; }
    bool operator==(const Difficulty& o) const { return raw_ == o.raw_; }
    auto operator<=>(const Difficulty& o) const { return raw_ <=> o.raw_; }

    /** this * num / den with a 256-bit intermediate, rounded down. */
    Difficulty mul_div(uint64_t num, uint64_t den) const;

    /** Nearest whole number of 2^-48-coin quanta for a reward of D * 2^-48
     * coins split n ways (i.e. round(D / n) in quantum units). */
    uint64_t reward_quanta(uint32_t split) const;

    std::string to_string() const; // decimal, for reports

private:
    u128 raw_;
};

using Weight = Difficulty; // subchain weight is measured in difficulty units

// ---------------------------------------------------------------------------
// Coin amounts: 64-bit fixed point, 2^-48 coin per quantum.

struct CoinAmount {
    uint64_t quanta = 0;

    static constexpr uint64_t kQuantaPerCoin = uint64_t(1) << 48;
    static CoinAmount from_coins(double coins);
    double to_coins() const { return double(quanta) / double(kQuantaPerCoin); }

    CoinAmount operator+(CoinAmount o) const;
    CoinAmount& operator+=(CoinAmount o) { return *this = *this + o; }
    auto operator<=>(const CoinAmount&) const = default;
};

// ---------------------------------------------------------------------------
// Bit strings (tree encodings). MSB-first when packed into bytes.

struct BitString {
    std::vector<uint8_t> bits; // one element per bit, values 0/1

    size_t size() const { return bits.size(); }
    bool empty() const { return bits.empty(); }
    void push_back(bool b) { bits.push_back(b ? 1 : 0); }
    uint8_t operator[](size_t i) const { return bits[i]; }

    std::vector<uint8_t> to_bytes() const; // padded with zero bits
    static BitString from_bytes(std::span<const uint8_t> bytes, size_t bit_len);
    std::string to_string() const; // "0101..."
    static BitString from_string(const std::string& s);
    bool operator==(const BitString&) const = default;

    void serialize(Writer& w) const; // varint bit length + packed bytes
    static BitString deserialize(Reader& r);
};

// ---------------------------------------------------------------------------
// Block records

struct BCHeader {
    uint32_t version = 1;
    Hash256 prev_commitment; // MMR root over previous blocks (the PBC)
    Hash256 tx_merkle_root;
    uint32_t shard_count = 1;
    bool vote_flag = false; // packed as the last bit of the shard-count field
    BitString tree_encoding;
    Hash256 shard_tree_root;
    uint64_t timestamp = 0;
    uint32_t bits = 0;
    uint64_t nonce = 0;

    void serialize(Writer& w) const;
    static BCHeader deserialize(Reader& r);
    std::vector<uint8_t> serialized() const;
    bool operator==(const BCHeader&) const = default;
};

struct SCHeader {
    uint32_t version = 1;
    Hash256 prev_commitment; // shard MMR root
    Hash256 tx_merkle_root;
    uint32_t mm_number = 1; // merged-mining count claim; no nonce by design
    uint64_t timestamp = 0;
    uint32_t bits = 0;

    void serialize(Writer& w) const;
    static SCHeader deserialize(Reader& r);
    std::vector<uint8_t> serialized() const;
    bool operator==(const SCHeader&) const = default;
};

struct Transaction {
    std::string sender;
    std::string receiver;
    CoinAmount amount;
    CoinAmount fee;
    uint32_t shard_id = 0; // 0 = beacon; prevents cross-chain replay

    void serialize(Writer& w) const;
    static Transaction deserialize(Reader& r);
    bool operator==(const Transaction&) const = default;
};

/** Transaction part of any block body is limited to 24 KiB. */
constexpr size_t kMaxTxBytes = 24 * 1024;

struct BCBody {
    std::vector<Transaction> transactions;

    void serialize(Writer& w) const; // varint count + records
    static BCBody deserialize(Reader& r);
    size_t tx_bytes() const;
    bool operator==(const BCBody&) const = default;
};

// ---------------------------------------------------------------------------
// Hashing

/** BLAKE2s-256 of the canonical serialization. */
Hash256 header_hash(const BCHeader& h);
Hash256 header_hash(const SCHeader& h);

/** Mining hash: domain-separated BLAKE2s over the canonical serialization. */
Hash256 mining_hash(const BCHeader& h);
Hash256 mining_hash(std::span<const uint8_t> serialized_header);

/** Value a mining hash takes in a scaled 2^space_bits space: the top
 * space_bits bits of the hash. A block clears target T iff value < T. */
uint256 scaled_hash_value(const Hash256& h, unsigned space_bits);

// JSON debug rendering.
std::string debug_json(const BCHeader& h);
std::string debug_json(const SCHeader& h);
std::string debug_json(const Transaction& t);

// Misc helpers.
std::string to_hex(std::span<const uint8_t> data);
std::vector<uint8_t> from_hex(const std::string& s);
u128 u128_from_le(const uint8_t b[16]);
void u128_to_le(u128 v, uint8_t out[16]);
std::string u128_to_string(u128 v);

/** ceil(log2(n)) for n >= 1. */
unsigned ceil_log2(uint64_t n);

} // namespace shardpow

#endif // SHARDPOW_CORE_H
