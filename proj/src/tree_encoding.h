// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_TREE_ENCODING_H
#define SHARDPOW_TREE_ENCODING_H

#include <optional>
#include <stdexcept>
#include <vector>

#include "core.h"

namespace shardpow {

struct EncodingError : std::runtime_error {
    explicit EncodingError(const std::string& what) : std::runtime_error(what) {}
};

/** Shape of a full binary tree (every node has 0 or 2 children) with n
 * internal nodes and n+1 leaves, stored as its preorder word
 * (1 = internal, 0 = leaf; 2n+1 symbols). */
class TreeShape {
public:
    TreeShape() : pre_{0} {} // single leaf
    static TreeShape leaf();
    static TreeShape node(const TreeShape& l, const TreeShape& r);
    static std::optional<TreeShape> from_preorder(std::vector<uint8_t> pre);

    const std::vector<uint8_t>& preorder() const { return pre_; }
    size_t internal_count() const { return (pre_.size() - 1) / 2; } // n
    size_t leaf_count() const { return internal_count() + 1; }
    bool is_single() const { return pre_.size() == 1; }
    unsigned depth() const; // edge depth of the deepest node

    struct Node {
        int left = -1, right = -1; // preorder positions; -1 for leaves
    };
    /** Child links per preorder position. */
    std::vector<Node> links() const;

    bool operator==(const TreeShape&) const = default;

private:
    std::vector<uint8_t> pre_;
};

/** Preorder word minus its two fixed trailing zeros: 2n-1 bits, empty for a
 * single-node tree. Bijective over shapes. */
BitString encode_shape(const TreeShape& tree);

/** Inverse of encode_shape. Throws EncodingError on unbalanced or overlong
 * input (internal count above expected_max_n). */
TreeShape decode_shape(const BitString& bits, size_t expected_max_n);

/** Full orange subtree: orange nodes are internal, magic and regular nodes
 * are its leaves. leaf_is_magic holds one flag per leaf, left to right. */
struct OrangeSubtree {
    TreeShape shape; // single node = empty orange subtree (the 1-bit form)
    std::vector<uint8_t> leaf_is_magic;

    size_t magic_count() const;
    size_t regular_count() const { return leaf_is_magic.size() - magic_count(); }
    bool operator==(const OrangeSubtree&) const = default;
};

/** 3n bits for n >= 1 (2n-1 shape bits plus n+1 position bits); the empty
 * subtree encodes to 0 bits. std::nullopt stands for the empty subtree. */
BitString encode_orange(const std::optional<OrangeSubtree>& orange);

/** Inverse of encode_orange. merkle_height bounds both the size limit
 * (n <= 6h) and the structural fit (shape depth <= h). Accepts the 1-bit
 * single-node form. Throws EncodingError on malformed or oversized input. */
std::optional<OrangeSubtree> decode_orange(const BitString& bits, unsigned merkle_height);

/** Maximum orange subtree internal-node count admitted by a height-h tree. */
inline size_t orange_size_limit(unsigned merkle_height) { return size_t(6) * merkle_height; }

/** Nesting depth of the shape's encoding word: the deepest point of the
 * +1/-1 walk over the preorder bits. */
unsigned encoding_nesting_depth(const TreeShape& tree);

/** Exact number of full binary tree shapes with n internal nodes whose
 * encoding nesting depth is at most h (reflection-principle alternating
 * binomial sum; reduces to the n-th Catalan number once h >= n). */
boost::multiprecision::cpp_int count_bounded_trees(unsigned n, unsigned h);

boost::multiprecision::cpp_int catalan(unsigned n);

} // namespace shardpow

#endif // SHARDPOW_TREE_ENCODING_H
