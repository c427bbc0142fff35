// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_MERKLE_H
#define SHARDPOW_MERKLE_H

#include <span>
#include <vector>

#include "core.h"

namespace shardpow {

/** Inclusion proof: sibling hashes bottom-up, exactly tree_height of them. */
struct MerkleProof {
    uint8_t tree_height = 0;
    uint64_t leaf_index = 0;
    std::vector<Hash256> path;

    void serialize(Writer& w) const; // height byte, index varint, 32-byte path
    static MerkleProof deserialize(Reader& r);
    bool operator==(const MerkleProof&) const = default;
};

/** Plain binary Merkle tree over data chunks. Leaf and interior hashing are
 * domain separated (0x00 / 0x01 prefixes). Short leaf sets are padded by
 * duplicating the last leaf hash up to 2^h, h = ceil(log2(count)); a single
 * leaf makes an h = 0 tree whose root is the leaf hash itself. */
class MerkleTree {
public:
    static Hash256 hash_leaf(std::span<const uint8_t> data);
    static Hash256 hash_node(const Hash256& l, const Hash256& r);

    explicit MerkleTree(const std::vector<std::vector<uint8_t>>& leaves);
    static MerkleTree from_leaf_hashes(std::vector<Hash256> leaf_hashes);

    Hash256 root() const;
    uint8_t height() const { return uint8_t(levels_.size() - 1); }
    size_t leaf_count() const { return leaf_count_; }

    MerkleProof prove(uint64_t index) const; // throws std::out_of_range
    static bool verify(const Hash256& root, const Hash256& leaf_hash, const MerkleProof& proof);

private:
    MerkleTree() = default;
    void build(std::vector<Hash256> leaf_hashes);
    std::vector<std::vector<Hash256>> levels_; // levels_[0] = padded leaves
    size_t leaf_count_ = 0;
};

/** Fold a proof path with plain concatenation hashing (no domain prefixes).
 * This is how the shard Merkle tree combines nodes. */
Hash256 fold_plain(const Hash256& leaf, uint64_t index, std::span<const Hash256> path);

} // namespace shardpow

#endif // SHARDPOW_MERKLE_H
