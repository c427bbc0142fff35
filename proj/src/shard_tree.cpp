// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "shard_tree.h"

#include <functional>
#include <stdexcept>

namespace shardpow {

void MergedMiningProof::serialize(Writer& w) const {
    orange_encoding.serialize(w);
    w.varint(regular_hashes.size());
    for (const auto& h : regular_hashes) w.bytes(h.bytes);
}

MergedMiningProof MergedMiningProof::deserialize(Reader& r) {
    MergedMiningProof p;
    p.orange_encoding = BitString::deserialize(r);
    uint64_t n = r.varint();
    if (n > 1u << 16) throw DeserializeError("too many proof hashes");
    p.regular_hashes.resize(n);
    for (auto& h : p.regular_hashes) r.bytes_into(h.bytes.data(), 32);
    return p;
}

std::vector<uint8_t> MergedMiningProof::serialized() const {
    Writer w;
    serialize(w);
    return w.take();
}

ShardMerkleTree::ShardMerkleTree(uint32_t shard_count) : shard_count_(shard_count) {
    if (shard_count == 0) throw std::invalid_argument("shard count must be positive");
    height_ = ceil_log2(shard_count);
    levels_.resize(height_ + 1);
    size_t nodes_total = 0;
    for (unsigned lvl = 0; lvl <= height_; ++lvl) {
        levels_[lvl].resize(size_t(1) << (height_ - lvl));
        nodes_total += levels_[lvl].size();
    }
    full_.assign(nodes_total, 0);
}

ShardMerkleTree ShardMerkleTree::build(const std::map<uint32_t, SCHeader>& shard_headers, uint32_t shard_count) {
    std::map<uint32_t, Hash256> leaves;
    for (const auto& [id, hdr] : shard_headers) leaves[id] = header_hash(hdr);
    return build_from_hashes(leaves, shard_count);
}

ShardMerkleTree ShardMerkleTree::build_from_hashes(const std::map<uint32_t, Hash256>& leaves, uint32_t shard_count) {
    ShardMerkleTree t(shard_count);
    for (const auto& [id, h] : leaves) t.set_leaf(id, h);
    return t;
}

bool ShardMerkleTree::node_full(unsigned level, uint32_t index) const {
    size_t off = 0;
    for (unsigned l = 0; l < level; ++l) off += size_t(1) << (height_ - l);
    return full_[off + index];
}

void ShardMerkleTree::set_leaf(uint32_t leaf_index, const Hash256& header_hash) {
    if (leaf_index >= shard_count_) throw std::invalid_argument("shard id out of range");
    levels_[0][leaf_index] = header_hash;
    rebuild_path(leaf_index);
}

void ShardMerkleTree::rebuild_path(uint32_t leaf_index) {
    // full_ bookkeeping for level 0
    size_t off = 0;
    full_[leaf_index] = levels_[0][leaf_index].has_value();
    uint32_t pos = leaf_index;
    for (unsigned lvl = 1; lvl <= height_; ++lvl) {
        off += size_t(1) << (height_ - lvl + 1);
        pos >>= 1;
        const auto& l = levels_[lvl - 1][2 * pos];
        const auto& r = levels_[lvl - 1][2 * pos + 1];
        auto& up = levels_[lvl][pos];
        if (!l && !r) {
            up = std::nullopt;
        } else {
            Hash256 lh = l ? *l : magic_hash();
            Hash256 rh = r ? *r : magic_hash();
            up = blake2s(lh.bytes, rh.bytes);
        }
        size_t prev_off = off - (size_t(1) << (height_ - lvl + 1));
        full_[off + pos] = full_[prev_off + 2 * pos] && full_[prev_off + 2 * pos + 1];
    }
}

ShardMerkleTree ShardMerkleTree::update_leaf(uint32_t leaf_index, const Hash256& header_hash) const {
    if (leaf_index >= slot_count() || !levels_[0][leaf_index])
        throw std::invalid_argument("shard not in the mined set");
    ShardMerkleTree t = *this;
    t.set_leaf(leaf_index, header_hash);
    return t;
}

bool ShardMerkleTree::is_defined(uint32_t leaf_index) const {
    return leaf_index < slot_count() && levels_[0][leaf_index].has_value();
}

std::optional<Hash256> ShardMerkleTree::leaf_hash(uint32_t leaf_index) const {
    if (leaf_index >= slot_count()) return std::nullopt;
    return levels_[0][leaf_index];
}

std::optional<Hash256> ShardMerkleTree::root() const { return levels_[height_][0]; }

uint32_t ShardMerkleTree::not_mined_count() const {
    if (!root()) throw std::logic_error("root undefined");
    // Magic nodes are undefined nodes whose sibling is defined.
    uint32_t total = 0;
    for (unsigned lvl = 0; lvl < height_; ++lvl) {
        for (size_t i = 0; i < levels_[lvl].size(); ++i) {
            if (!levels_[lvl][i] && levels_[lvl][i ^ 1]) total += uint32_t(1) << lvl;
        }
    }
    return total;
}

uint32_t ShardMerkleTree::mined_upper_bound() const {
    uint32_t bound = slot_count() - not_mined_count();
    return std::min(bound, shard_count_);
}

MerkleProof ShardMerkleTree::prove_leaf_path(uint32_t leaf_index) const {
    if (!is_defined(leaf_index)) throw std::invalid_argument("shard not in the mined set");
    MerkleProof p;
    p.tree_height = uint8_t(height_);
    p.leaf_index = leaf_index;
    uint32_t pos = leaf_index;
    for (unsigned lvl = 0; lvl < height_; ++lvl) {
        const auto& sib = levels_[lvl][pos ^ 1];
        p.path.push_back(sib ? *sib : magic_hash());
        pos >>= 1;
    }
    return p;
}

std::optional<OrangeSubtree> ShardMerkleTree::orange() const {
    if (!root()) throw std::logic_error("nothing mined");
    if (node_full(height_, 0)) return std::nullopt; // fully mined root

    // DFS from the root over mixed nodes; magic and regular children become
    // the leaves of the full orange subtree.
    std::vector<uint8_t> magic_flags;
    std::function<TreeShape(unsigned, uint32_t)> dfs = [&](unsigned level, uint32_t index) -> TreeShape {
        bool defined = levels_[level][index].has_value();
        bool full = node_full(level, index);
        if (!defined) { // magic node
            magic_flags.push_back(1);
            return TreeShape::leaf();
        }
        if (full) { // regular node
            magic_flags.push_back(0);
            return TreeShape::leaf();
        }
        TreeShape l = dfs(level - 1, 2 * index);
        TreeShape r = dfs(level - 1, 2 * index + 1);
        return TreeShape::node(l, r);
    };
    OrangeSubtree o;
    o.shape = dfs(height_, 0);
    o.leaf_is_magic = std::move(magic_flags);
    return o;
}

MergedMiningProof ShardMerkleTree::prove_merged_mining(uint32_t leaf_index) const {
    if (!is_defined(leaf_index)) throw std::invalid_argument("shard not in the mined set");
    MergedMiningProof proof;
    proof.claimed_mm_number = mined_upper_bound();
    auto o = orange();
    proof.orange_encoding = encode_orange(o);
    if (!o) return proof; // fully mined: empty proof
    // Collect regular-node hashes in the DFS (left-to-right) leaf order.
    std::function<void(unsigned, uint32_t)> collect = [&](unsigned level, uint32_t index) {
        bool defined = levels_[level][index].has_value();
        if (!defined) return; // magic leaf
        if (node_full(level, index)) {
            proof.regular_hashes.push_back(*levels_[level][index]);
            return;
        }
        collect(level - 1, 2 * index);
        collect(level - 1, 2 * index + 1);
    };
    collect(height_, 0);
    return proof;
}

bool verify_merged_mining(const Hash256& root, const MergedMiningProof& proof, uint32_t leaf_index,
                          uint32_t mm_number, uint32_t shard_count, std::string* why) {
    auto fail = [&](const char* reason) {
        if (why) *why = reason;
        return false;
    };
    if (shard_count == 0) return fail("shard count must be positive");
    if (leaf_index >= shard_count) return fail("shard position out of range");
    unsigned h = ceil_log2(shard_count);
    uint32_t slots = uint32_t(1) << h;

    if (root.is_zero()) return fail("container committed a magic root: no shard was merge-mined");

    std::optional<OrangeSubtree> orange;
    try {
        orange = decode_orange(proof.orange_encoding, h);
    } catch (const EncodingError& e) {
        return fail(e.what());
    }

    bool fully_mined_root = !orange || (orange->shape.is_single() && !orange->leaf_is_magic[0]);
    if (orange && orange->shape.is_single() && orange->leaf_is_magic[0])
        return fail("container committed a magic root: no shard was merge-mined");

    if (fully_mined_root) {
        // Empty proof: every slot claimed mined, only sound for power-of-two
        // shard counts where phantom slots cannot hide inside the claim.
        if (!proof.regular_hashes.empty()) return fail("fully-mined proof must carry no hashes");
        if (shard_count != slots) return fail("fully-mined claim requires a power-of-two shard count");
        if (mm_number < slots) return fail("mm_number below the proven merged-mining bound");
        if (mm_number > shard_count) return fail("mm_number exceeds shard count");
        return true;
    }

    const auto& shape = orange->shape;
    size_t regular_count = orange->regular_count();
    if (proof.regular_hashes.size() != regular_count) return fail("regular hash count mismatch");
    for (const auto& rh : proof.regular_hashes)
        if (rh.is_zero()) return fail("regular hash may not equal the magic hash");

    // Reconstruct the committed root from the orange structure.
    auto nodes = shape.links();
    const auto& pre = shape.preorder();
    std::vector<int> leaf_ordinal(pre.size(), -1);
    {
        int ord = 0;
        for (size_t i = 0; i < pre.size(); ++i)
            if (!pre[i]) leaf_ordinal[i] = ord++;
    }
    // Node depths (preorder walk with an ancestor stack).
    std::vector<unsigned> node_depth(pre.size(), 0);
    {
        std::vector<std::pair<int, int>> st; // (node, children seen)
        for (int i = 0; i < int(pre.size()); ++i) {
            node_depth[i] = st.empty() ? 0 : node_depth[st.back().first] + 1;
            if (!st.empty() && ++st.back().second == 2) st.pop_back();
            if (pre[i]) st.push_back({i, 0});
        }
    }
    // Fill leaves: magic positions get the zero hash, regular positions take
    // the supplied hashes in left-to-right order. Combine bottom-up; in
    // preorder both children sit after their parent, so a reverse walk
    // evaluates children first.
    std::vector<Hash256> value(pre.size());
    uint32_t not_mined = 0;
    size_t next_hash = 0;
    for (size_t i = 0; i < pre.size(); ++i) {
        if (pre[i]) continue;
        if (orange->leaf_is_magic[leaf_ordinal[i]]) {
            value[i] = magic_hash();
            not_mined += uint32_t(1) << (h - node_depth[i]);
        } else {
            value[i] = proof.regular_hashes[next_hash++];
        }
    }
    for (int i = int(pre.size()) - 1; i >= 0; --i)
        if (pre[i]) value[i] = blake2s(value[nodes[i].left].bytes, value[nodes[i].right].bytes);
    if (value[0] != root) return fail("reconstructed root does not match the commitment");

    // The shard's prescribed leaf must sit beneath a regular node.
    {
        int cur = 0;
        unsigned depth = 0;
        while (pre[cur]) {
            bool go_right = (leaf_index >> (h - 1 - depth)) & 1;
            cur = go_right ? nodes[cur].right : nodes[cur].left;
            ++depth;
        }
        if (orange->leaf_is_magic[leaf_ordinal[cur]])
            return fail("shard position descends from a magic node");
    }

    uint32_t bound = std::min(slots - not_mined, shard_count);
    if (mm_number < bound) return fail("mm_number below the proven merged-mining bound");
    if (mm_number > shard_count) return fail("mm_number exceeds shard count");
    return true;
}

void SCBody::serialize(Writer& w) const {
    bc_container.serialize(w);
    shard_proof.serialize(w);
    mm_proof.serialize(w);
    w.varint(transactions.size());
    for (const auto& t : transactions) t.serialize(w);
}

SCBody SCBody::deserialize(Reader& r) {
    SCBody b;
    b.bc_container = BCHeader::deserialize(r);
    b.shard_proof = MerkleProof::deserialize(r);
    b.mm_proof = MergedMiningProof::deserialize(r);
    uint64_t n = r.varint();
    if (n > 1u << 20) throw DeserializeError("transaction count too large");
    b.transactions.reserve(n);
    for (uint64_t i = 0; i < n; ++i) b.transactions.push_back(Transaction::deserialize(r));
    return b;
}

std::vector<uint8_t> SCBody::serialized() const {
    Writer w;
    serialize(w);
    return w.take();
}

size_t SCBody::tx_bytes() const {
    Writer w;
    w.varint(transactions.size());
    for (const auto& t : transactions) t.serialize(w);
    return w.data().size();
}

} // namespace shardpow
