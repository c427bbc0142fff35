// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_SHARD_TREE_H
#define SHARDPOW_SHARD_TREE_H

#include <map>
#include <optional>
#include <string>

#include "core.h"
#include "merkle.h"
#include "tree_encoding.h"

namespace shardpow {

/** Proof that at most claimed_mm_number shards were merge-mined: the orange
 * subtree encoding plus the hashes sitting at its regular nodes. */
struct MergedMiningProof {
    BitString orange_encoding;
    std::vector<Hash256> regular_hashes; // left-to-right
    uint32_t claimed_mm_number = 0;      // carried in the SC header, not on the wire

    void serialize(Writer& w) const; // encoding bits, hash-count varint, hashes
    static MergedMiningProof deserialize(Reader& r);
    std::vector<uint8_t> serialized() const;
    bool operator==(const MergedMiningProof& o) const {
        return orange_encoding == o.orange_encoding && regular_hashes == o.regular_hashes;
    }
};

/** Merged-mining Merkle tree: leaf i holds the hash of shard i's candidate
 * header (0-indexed), absent leaves are undefined. A parent with exactly one
 * undefined child substitutes the all-zero magic hash; a parent of two
 * undefined children is undefined. Node hashing is plain concatenation. */
class ShardMerkleTree {
public:
    explicit ShardMerkleTree(uint32_t shard_count);
    static ShardMerkleTree build(const std::map<uint32_t, SCHeader>& shard_headers, uint32_t shard_count);
    static ShardMerkleTree build_from_hashes(const std::map<uint32_t, Hash256>& leaves, uint32_t shard_count);

    uint32_t shard_count() const { return shard_count_; }
    unsigned height() const { return height_; }
    uint32_t slot_count() const { return uint32_t(1) << height_; }

    /** Define or redefine a leaf (builder-style mutation). */
    void set_leaf(uint32_t leaf_index, const Hash256& header_hash);
    /** Value-style update of an already-mined leaf; throws std::invalid_argument
     * when the leaf is not in the mined set. */
    ShardMerkleTree update_leaf(uint32_t leaf_index, const Hash256& header_hash) const;

    bool is_defined(uint32_t leaf_index) const;
    std::optional<Hash256> leaf_hash(uint32_t leaf_index) const;

    /** Defined iff at least one leaf is defined. */
    std::optional<Hash256> root() const;

    /** Sum of m_i * 2^i over magic nodes; requires a defined root. */
    uint32_t not_mined_count() const;
    /** 2^h - not_mined_count, capped at shard_count; requires a defined root. */
    uint32_t mined_upper_bound() const;

    /** Inclusion path for a mined leaf, magic hashes substituted where the
     * sibling subtree is undefined. Verifies with fold_plain. */
    MerkleProof prove_leaf_path(uint32_t leaf_index) const;

    /** Full orange subtree of the current tree; nullopt when the root is
     * fully mined (empty orange subtree) . Throws when nothing is mined. */
    std::optional<OrangeSubtree> orange() const;

    MergedMiningProof prove_merged_mining(uint32_t leaf_index) const;

private:
    void rebuild_path(uint32_t leaf_index);
    uint32_t shard_count_;
    unsigned height_;
    std::vector<std::vector<std::optional<Hash256>>> levels_; // [0] leaves .. [height_] root
    std::vector<uint8_t> full_; // per node, all leaves beneath defined (same layout)
    bool node_full(unsigned level, uint32_t index) const;
};

/** Checks a merged-mining proof against a committed root: reconstructs the
 * orange subtree, fills magic hashes, recombines regular hashes, compares
 * the root, checks the shard's prescribed leaf position descends from a
 * regular node, and checks mm_number covers the bound the encoding proves.
 * `why` (optional) receives the failure reason. */
bool verify_merged_mining(const Hash256& root, const MergedMiningProof& proof, uint32_t leaf_index,
                          uint32_t mm_number, uint32_t shard_count, std::string* why = nullptr);

/** Shard block body: the BC_header container, the proof the header was mined
 * in its slot, the merged-mining proof, and the transactions. */
struct SCBody {
    BCHeader bc_container;
    MerkleProof shard_proof;
    MergedMiningProof mm_proof;
    std::vector<Transaction> transactions;

    void serialize(Writer& w) const;
    static SCBody deserialize(Reader& r);
    std::vector<uint8_t> serialized() const;
    size_t tx_bytes() const;
    bool operator==(const SCBody&) const = default;
};

} // namespace shardpow

#endif // SHARDPOW_SHARD_TREE_H
