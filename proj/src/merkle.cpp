// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "merkle.h"

#include <stdexcept>

#include "crypto/blake2s.h"

namespace shardpow {

void MerkleProof::serialize(Writer& w) const {
    w.u8(tree_height);
    w.varint(leaf_index);
    for (const auto& h : path) w.bytes(h.bytes);
}

MerkleProof MerkleProof::deserialize(Reader& r) {
    MerkleProof p;
    p.tree_height = r.u8();
    p.leaf_index = r.varint();
    if (p.tree_height > 63 || p.leaf_index >= (uint64_t(1) << p.tree_height))
        throw DeserializeError("merkle proof index out of range");
    p.path.resize(p.tree_height);
    for (auto& h : p.path) r.bytes_into(h.bytes.data(), 32);
    return p;
}

Hash256 MerkleTree::hash_leaf(std::span<const uint8_t> data) {
    static constexpr uint8_t prefix = 0x00;
    return blake2s(std::span<const uint8_t>(&prefix, 1), data);
}

Hash256 MerkleTree::hash_node(const Hash256& l, const Hash256& r) {
    uint8_t buf[65];
    buf[0] = 0x01;
    std::copy(l.bytes.begin(), l.bytes.end(), buf + 1);
    std::copy(r.bytes.begin(), r.bytes.end(), buf + 33);
    return blake2s(std::span<const uint8_t>(buf, 65));
}

MerkleTree::MerkleTree(const std::vector<std::vector<uint8_t>>& leaves) {
    if (leaves.empty()) throw std::invalid_argument("empty leaf set");
    std::vector<Hash256> hashes;
    hashes.reserve(leaves.size());
    for (const auto& l : leaves) hashes.push_back(hash_leaf(l));
    build(std::move(hashes));
}

MerkleTree MerkleTree::from_leaf_hashes(std::vector<Hash256> leaf_hashes) {
    if (leaf_hashes.empty()) throw std::invalid_argument("empty leaf set");
    MerkleTree t;
    t.build(std::move(leaf_hashes));
    return t;
}

void MerkleTree::build(std::vector<Hash256> leaf_hashes) {
    leaf_count_ = leaf_hashes.size();
    unsigned h = ceil_log2(leaf_count_);
    size_t width = size_t(1) << h;
    while (leaf_hashes.size() < width) leaf_hashes.push_back(leaf_hashes.back());
    levels_.clear();
    levels_.push_back(std::move(leaf_hashes));
    while (levels_.back().size() > 1) {
        const auto& below = levels_.back();
        std::vector<Hash256> up;
        up.reserve(below.size() / 2);
        for (size_t i = 0; i < below.size(); i += 2) up.push_back(hash_node(below[i], below[i + 1]));
        levels_.push_back(std::move(up));
    }
}

Hash256 MerkleTree::root() const { return levels_.back()[0]; }

MerkleProof MerkleTree::prove(uint64_t index) const {
    if (index >= leaf_count_) throw std::out_of_range("leaf index out of range");
    MerkleProof p;
    p.tree_height = height();
    p.leaf_index = index;
    uint64_t pos = index;
    for (size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
        p.path.push_back(levels_[lvl][pos ^ 1]);
        pos >>= 1;
    }
    return p;
}

bool MerkleTree::verify(const Hash256& root, const Hash256& leaf_hash, const MerkleProof& proof) {
    if (proof.path.size() != proof.tree_height) return false;
    if (proof.tree_height > 63 || proof.leaf_index >= (uint64_t(1) << proof.tree_height)) return false;
    Hash256 acc = leaf_hash;
    uint64_t pos = proof.leaf_index;
    for (const auto& sib : proof.path) {
        acc = (pos & 1) ? hash_node(sib, acc) : hash_node(acc, sib);
        pos >>= 1;
    }
    return acc == root;
}

Hash256 fold_plain(const Hash256& leaf, uint64_t index, std::span<const Hash256> path) {
    Hash256 acc = leaf;
    uint64_t pos = index;
    for (const auto& sib : path) {
        acc = (pos & 1) ? blake2s(sib.bytes, acc.bytes) : blake2s(acc.bytes, sib.bytes);
        pos >>= 1;
    }
    return acc;
}

} // namespace shardpow
