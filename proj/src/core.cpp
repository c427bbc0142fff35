// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "core.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "crypto/blake2s.h"

namespace shardpow {

// ---------------------------------------------------------------------------
// Hash256

std::string Hash256::hex() const { return to_hex(bytes); }

Hash256 Hash256::from_hex(const std::string& s) {
    auto v = shardpow::from_hex(s);
    if (v.size() != 32) throw std::invalid_argument("hash hex must be 32 bytes");
    Hash256 h;
    std::copy(v.begin(), v.end(), h.bytes.begin());
    return h;
}

uint256 Hash256::to_uint256() const {
    uint256 v = 0;
    for (uint8_t b : bytes) v = (v << 8) | b;
    return v;
}

Hash256 blake2s(std::span<const uint8_t> data) {
    Hash256 h;
    Blake2s ctx;
    ctx.write(data.data(), data.size());
    ctx.finalize(h.bytes.data());
    return h;
}

Hash256 blake2s(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    Hash256 h;
    Blake2s ctx;
    ctx.write(a.data(), a.size());
    ctx.write(b.data(), b.size());
    ctx.finalize(h.bytes.data());
    return h;
}

// ---------------------------------------------------------------------------
// Compact bits

uint32_t encode_compact(const uint256& target) {
    if (target == 0) throw std::invalid_argument("target must be positive");
    // Size in bytes of the big-endian representation.
    unsigned size = 0;
    for (uint256 t = target; t != 0; t >>= 8) ++size;
    uint32_t mantissa;
    if (size <= 3) {
        mantissa = uint32_t(target << (8 * (3 - size)));
    } else {
        mantissa = uint32_t(target >> (8 * (size - 3)));
    }
    // Avoid the sign bit of the mantissa (Bitcoin convention).
    if (mantissa & 0x00800000u) {
        mantissa >>= 8;
        ++size;
    }
    return (uint32_t(size) << 24) | mantissa;
}

uint256 decode_compact(uint32_t compact) {
    uint32_t size = compact >> 24;
    uint256 mantissa = compact & 0x007fffffu;
    if (size <= 3) return mantissa >> (8 * (3 - size));
    if (size > 34) throw std::invalid_argument("compact exponent overflows 256 bits");
    uint256 v = mantissa << (8 * (size - 3));
    if ((v >> (8 * (size - 3))) != mantissa) throw std::invalid_argument("compact overflows 256 bits");
    return v;
}

Target Target::from_compact(uint32_t compact) { return Target{decode_compact(compact)}; }
uint32_t Target::to_compact() const { return encode_compact(value); }

uint512 difficulty_q64_exact(const uint256& target, unsigned space_bits) {
    if (target == 0) throw std::invalid_argument("target must be positive");
    if (space_bits < 1 || space_bits > 256) throw std::invalid_argument("space_bits out of range");
    // floor(2^(space_bits + 64) / T); numerator needs up to 321 bits.
    boost::multiprecision::uint1024_t num = 1;
    num <<= (space_bits + 64);
    boost::multiprecision::uint1024_t q = num / boost::multiprecision::uint1024_t(target);
    return uint512(q);
}

// ---------------------------------------------------------------------------
// Difficulty

Difficulty Difficulty::from_double(double d) {
    if (d < 0 || !std::isfinite(d)) throw std::invalid_argument("bad difficulty");
    long double scaled = (long double)d * 18446744073709551616.0L; // 2^64
    u128 raw = 0;
    if (scaled >= 1.0L) {
        long double hi = std::floor(scaled / 18446744073709551616.0L);
        long double lo = scaled - hi * 18446744073709551616.0L;
        raw = (u128)(uint64_t)hi << 64 | (u128)(uint64_t)lo;
    }
    return from_raw(raw);
}

Difficulty Difficulty::from_target(const Target& t, unsigned space_bits) {
    uint512 q = difficulty_q64_exact(t.value, space_bits);
    if (q >> 128 != 0) throw std::out_of_range("difficulty exceeds 2^64");
    u128 raw = (u128)uint64_t(q >> 64) << 64 | (u128)uint64_t(q & 0xffffffffffffffffULL);
    return from_raw(raw);
}

Target Difficulty::to_target(unsigned space_bits) const {
    if (raw_ == 0) throw std::invalid_argument("zero difficulty has no target");
    boost::multiprecision::uint1024_t num = 1;
    num <<= (space_bits + 64);
    boost::multiprecision::uint1024_t den = boost::multiprecision::uint1024_t(uint64_t(raw_ >> 64));
    den <<= 64;
    den |= uint64_t(raw_);
    boost::multiprecision::uint1024_t t = num / den;
    if (t == 0) t = 1;
    boost::multiprecision::uint1024_t cap = (boost::multiprecision::uint1024_t(1) << space_bits) - 1;
    if (t > cap) t = cap;
    return Target{uint256(t)};
}

double Difficulty::to_double() const {
    return double(uint64_t(raw_ >> 64)) + double(uint64_t(raw_)) / 18446744073709551616.0;
}

Difficulty Difficulty::operator+(const Difficulty& o) const {
    u128 s = raw_ + o.raw_;
    if (s < raw_) throw std::overflow_error("difficulty sum overflow");
    return from_raw(s);
}

Difficulty Difficulty::operator-(const Difficulty& o) const {
    if (o.raw_ > raw_) throw std::underflow_error("difficulty underflow");
    return from_raw(raw_ - o.raw_);
}

Difficulty Difficulty::mul_div(uint64_t num, uint64_t den) const {
    if (den == 0) throw std::invalid_argument("division by zero");
    uint256 wide = uint256(uint64_t(raw_ >> 64));
    wide <<= 64;
    wide |= uint64_t(raw_);
    wide *= num;
    wide /= den;
    if (wide >> 128 != 0) throw std::overflow_error("difficulty scale overflow");
    return from_raw((u128)uint64_t(wide >> 64) << 64 | (u128)uint64_t(wide & 0xffffffffffffffffULL));
}

uint64_t Difficulty::reward_quanta(uint32_t split) const {
    if (split == 0) throw std::invalid_argument("zero split");
    // round(raw / (split * 2^64)) in integer arithmetic
    u128 den_half = (u128)split << 63;
    u128 v = raw_ + den_half;
    if (v < raw_) throw std::overflow_error("reward overflow");
    u128 q = v / ((u128)split << 64);
    return uint64_t(q);
}

std::string Difficulty::to_string() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", to_double());
    return buf;
}

// ---------------------------------------------------------------------------
// CoinAmount

CoinAmount CoinAmount::from_coins(double coins) {
    if (coins < 0 || !std::isfinite(coins)) throw std::invalid_argument("bad coin amount");
    return CoinAmount{uint64_t(std::llround(coins * double(kQuantaPerCoin)))};
}

CoinAmount CoinAmount::operator+(CoinAmount o) const {
    uint64_t s = quanta + o.quanta;
    if (s < quanta) throw std::overflow_error("coin amount overflow");
    return CoinAmount{s};
}

// ---------------------------------------------------------------------------
// BitString

std::vector<uint8_t> BitString::to_bytes() const {
    std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i / 8] |= uint8_t(0x80 >> (i % 8));
    return out;
}

BitString BitString::from_bytes(std::span<const uint8_t> bytes, size_t bit_len) {
    if (bytes.size() != (bit_len + 7) / 8) throw DeserializeError("bit length mismatch");
    BitString s;
    s.bits.reserve(bit_len);
    for (size_t i = 0; i < bit_len; ++i)
        s.bits.push_back((bytes[i / 8] >> (7 - i % 8)) & 1);
    // Padding bits must be zero so the encoding stays canonical.
    for (size_t i = bit_len; i < bytes.size() * 8; ++i)
        if ((bytes[i / 8] >> (7 - i % 8)) & 1) throw DeserializeError("nonzero padding bit");
    return s;
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (uint8_t b : bits) s.push_back(b ? '1' : '0');
    return s;
}

BitString BitString::from_string(const std::string& in) {
    BitString s;
    for (char c : in) {
        if (c == '0')
            s.bits.push_back(0);
        else if (c == '1')
            s.bits.push_back(1);
        else if (!std::isspace((unsigned char)c))
            throw std::invalid_argument("bit string may contain only 0 and 1");
    }
    return s;
}

void BitString::serialize(Writer& w) const {
    w.varint(bits.size());
    auto b = to_bytes();
    w.bytes(b);
}

BitString BitString::deserialize(Reader& r) {
    uint64_t n = r.varint();
    if (n > 1u << 20) throw DeserializeError("bit string too long");
    auto b = r.bytes((n + 7) / 8);
    return from_bytes(b, n);
}

// ---------------------------------------------------------------------------
// Headers, transactions, bodies

void BCHeader::serialize(Writer& w) const {
    w.u32(version);
    w.bytes(prev_commitment.bytes);
    w.bytes(tx_merkle_root.bytes);
    w.u64((uint64_t(shard_count) << 1) | (vote_flag ? 1 : 0));
    tree_encoding.serialize(w);
    w.bytes(shard_tree_root.bytes);
    w.u64(timestamp);
    w.u32(bits);
    w.u64(nonce);
}

BCHeader BCHeader::deserialize(Reader& r) {
    BCHeader h;
    h.version = r.u32();
    r.bytes_into(h.prev_commitment.bytes.data(), 32);
    r.bytes_into(h.tx_merkle_root.bytes.data(), 32);
    uint64_t field = r.u64();
    h.shard_count = uint32_t(field >> 1);
    h.vote_flag = field & 1;
    h.tree_encoding = BitString::deserialize(r);
    r.bytes_into(h.shard_tree_root.bytes.data(), 32);
    h.timestamp = r.u64();
    h.bits = r.u32();
    h.nonce = r.u64();
    return h;
}

std::vector<uint8_t> BCHeader::serialized() const {
    Writer w;
    serialize(w);
    return w.take();
}

void SCHeader::serialize(Writer& w) const {
    w.u32(version);
    w.bytes(prev_commitment.bytes);
    w.bytes(tx_merkle_root.bytes);
    w.u32(mm_number);
    w.u64(timestamp);
    w.u32(bits);
}

SCHeader SCHeader::deserialize(Reader& r) {
    SCHeader h;
    h.version = r.u32();
    r.bytes_into(h.prev_commitment.bytes.data(), 32);
    r.bytes_into(h.tx_merkle_root.bytes.data(), 32);
    h.mm_number = r.u32();
    h.timestamp = r.u64();
    h.bits = r.u32();
    return h;
}

std::vector<uint8_t> SCHeader::serialized() const {
    Writer w;
    serialize(w);
    return w.take();
}

void Transaction::serialize(Writer& w) const {
    w.var_string(sender);
    w.var_string(receiver);
    w.u64(amount.quanta);
    w.u64(fee.quanta);
    w.u32(shard_id);
}

Transaction Transaction::deserialize(Reader& r) {
    Transaction t;
    t.sender = r.var_string();
    t.receiver = r.var_string();
    t.amount.quanta = r.u64();
    t.fee.quanta = r.u64();
    t.shard_id = r.u32();
    return t;
}

void BCBody::serialize(Writer& w) const {
    w.varint(transactions.size());
    for (const auto& t : transactions) t.serialize(w);
}

BCBody BCBody::deserialize(Reader& r) {
    BCBody b;
    uint64_t n = r.varint();
    if (n > 1u << 20) throw DeserializeError("transaction count too large");
    b.transactions.reserve(n);
    for (uint64_t i = 0; i < n; ++i) b.transactions.push_back(Transaction::deserialize(r));
    return b;
}

size_t BCBody::tx_bytes() const {
    Writer w;
    serialize(w);
    return w.data().size();
}

// ---------------------------------------------------------------------------
// Hashing

Hash256 header_hash(const BCHeader& h) { return blake2s(h.serialized()); }
Hash256 header_hash(const SCHeader& h) { return blake2s(h.serialized()); }

static constexpr uint8_t kMiningPrefix[8] = {'S', 'P', 'W', 'M', 'I', 'N', 'E', 0x01};

Hash256 mining_hash(std::span<const uint8_t> serialized_header) {
    return blake2s(std::span<const uint8_t>(kMiningPrefix, 8), serialized_header);
}

Hash256 mining_hash(const BCHeader& h) { return mining_hash(h.serialized()); }

uint256 scaled_hash_value(const Hash256& h, unsigned space_bits) {
    if (space_bits < 1 || space_bits > 256) throw std::invalid_argument("space_bits out of range");
    return h.to_uint256() >> (256 - space_bits);
}

// ---------------------------------------------------------------------------
// Debug JSON

static nlohmann::json header_json(const BCHeader& h) {
    return {
        {"version", h.version},
        {"prev_commitment", h.prev_commitment.hex()},
        {"tx_merkle_root", h.tx_merkle_root.hex()},
        {"shard_count", h.shard_count},
        {"vote_flag", h.vote_flag},
        {"tree_encoding", h.tree_encoding.to_string()},
        {"shard_tree_root", h.shard_tree_root.hex()},
        {"timestamp", h.timestamp},
        {"bits", h.bits},
        {"nonce", h.nonce},
    };
}

std::string debug_json(const BCHeader& h) { return header_json(h).dump(); }

std::string debug_json(const SCHeader& h) {
    nlohmann::json j = {
        {"version", h.version},
        {"prev_commitment", h.prev_commitment.hex()},
        {"tx_merkle_root", h.tx_merkle_root.hex()},
        {"mm_number", h.mm_number},
        {"timestamp", h.timestamp},
        {"bits", h.bits},
    };
    return j.dump();
}

std::string debug_json(const Transaction& t) {
    nlohmann::json j = {
        {"sender", t.sender},     {"receiver", t.receiver},
        {"amount", t.amount.to_coins()}, {"fee", t.fee.to_coins()},
        {"shard_id", t.shard_id},
    };
    return j.dump();
}

// ---------------------------------------------------------------------------
// Helpers

std::string to_hex(std::span<const uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (uint8_t b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

std::vector<uint8_t> from_hex(const std::string& s) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (s.size() % 2) throw std::invalid_argument("odd hex length");
    std::vector<uint8_t> out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i < s.size(); i += 2) {
        int hi = nibble(s[i]), lo = nibble(s[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
        out.push_back(uint8_t(hi << 4 | lo));
    }
    return out;
}

u128 u128_from_le(const uint8_t b[16]) {
    u128 v = 0;
    for (int i = 0; i < 16; ++i) v |= (u128)b[i] << (8 * i);
    return v;
}

void u128_to_le(u128 v, uint8_t out[16]) {
    for (int i = 0; i < 16; ++i) out[i] = uint8_t(v >> (8 * i));
}

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v) {
        s.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    return std::string(s.rbegin(), s.rend());
}

unsigned ceil_log2(uint64_t n) {
    if (n == 0) throw std::invalid_argument("ceil_log2(0)");
    unsigned h = 0;
    while ((uint64_t(1) << h) < n) ++h;
    return h;
}

} // namespace shardpow
