// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "tree_encoding.h"

namespace shardpow {

using boost::multiprecision::cpp_int;

TreeShape TreeShape::leaf() {
    TreeShape t;
    t.pre_ = {0};
    return t;
}

TreeShape TreeShape::node(const TreeShape& l, const TreeShape& r) {
    TreeShape t;
    t.pre_.clear();
    t.pre_.reserve(1 + l.pre_.size() + r.pre_.size());
    t.pre_.push_back(1);
    t.pre_.insert(t.pre_.end(), l.pre_.begin(), l.pre_.end());
    t.pre_.insert(t.pre_.end(), r.pre_.begin(), r.pre_.end());
    return t;
}

std::optional<TreeShape> TreeShape::from_preorder(std::vector<uint8_t> pre) {
    if (pre.empty() || pre.size() % 2 == 0) return std::nullopt;
    // One pending slot at the start; each internal node consumes a slot and
    // opens two, each leaf consumes one. Valid iff slots hit zero exactly at
    // the end.
    size_t pending = 1;
    for (size_t i = 0; i < pre.size(); ++i) {
        if (pending == 0) return std::nullopt;
        if (pre[i] > 1) return std::nullopt;
        pending += pre[i] ? 1 : 0;
        if (!pre[i]) --pending;
    }
    if (pending != 0) return std::nullopt;
    TreeShape t;
    t.pre_ = std::move(pre);
    return t;
}

std::vector<TreeShape::Node> TreeShape::links() const {
    std::vector<Node> nodes(pre_.size());
    // Iterative preorder parse: stack of parents waiting for children.
    std::vector<std::pair<int, int>> stack; // (parent index, children seen)
    for (int i = 0; i < int(pre_.size()); ++i) {
        if (!stack.empty()) {
            auto& [p, seen] = stack.back();
            if (seen == 0) {
                nodes[p].left = i;
                seen = 1;
            } else {
                nodes[p].right = i;
                stack.pop_back();
            }
        }
        if (pre_[i]) stack.push_back({i, 0});
    }
    return nodes;
}

unsigned TreeShape::depth() const {
    unsigned max_d = 0;
    // Depth of a node = number of unfinished ancestors when it is visited.
    std::vector<std::pair<unsigned, int>> stack; // (depth, children left)
    for (uint8_t sym : pre_) {
        unsigned d = stack.empty() ? 0 : stack.back().first + 1;
        if (d > max_d) max_d = d;
        if (sym) {
            stack.push_back({d, 2});
        } else {
            while (!stack.empty() && --stack.back().second == 0) stack.pop_back();
        }
    }
    return max_d;
}

BitString encode_shape(const TreeShape& tree) {
    BitString out;
    const auto& pre = tree.preorder();
    if (pre.size() <= 1) return out; // single node: 0 bits
    // The last two symbols of any full-tree preorder word are leaves.
    for (size_t i = 0; i + 2 < pre.size(); ++i) out.push_back(pre[i]);
    return out;
}

TreeShape decode_shape(const BitString& bits, size_t expected_max_n) {
    if (bits.empty()) return TreeShape::leaf();
    if (bits.size() % 2 == 0) throw EncodingError("shape bit count must be odd");
    size_t n = (bits.size() + 1) / 2;
    if (n > expected_max_n) throw EncodingError("shape exceeds size limit");
    std::vector<uint8_t> pre;
    pre.reserve(bits.size() + 2);
    for (size_t i = 0; i < bits.size(); ++i) pre.push_back(bits[i]);
    pre.push_back(0);
    pre.push_back(0);
    auto t = TreeShape::from_preorder(std::move(pre));
    if (!t) throw EncodingError("unbalanced shape encoding");
    return *t;
}

size_t OrangeSubtree::magic_count() const {
    size_t c = 0;
    for (uint8_t b : leaf_is_magic) c += b ? 1 : 0;
    return c;
}

BitString encode_orange(const std::optional<OrangeSubtree>& orange) {
    BitString out;
    if (!orange) return out;
    out = encode_shape(orange->shape);
    if (orange->leaf_is_magic.size() != orange->shape.leaf_count())
        throw EncodingError("one position bit per leaf required");
    for (uint8_t b : orange->leaf_is_magic) out.push_back(b);
    return out;
}

std::optional<OrangeSubtree> decode_orange(const BitString& bits, unsigned merkle_height) {
    if (bits.empty()) return std::nullopt;

    OrangeSubtree o;
    if (bits.size() == 1) {
        // Single-node form: empty shape plus one position bit.
        o.shape = TreeShape::leaf();
        o.leaf_is_magic = {bits[0]};
        return o;
    }
    if (bits.size() % 3 != 0) throw EncodingError("orange encoding length must be 3n bits");
    size_t n = bits.size() / 3;
    if (n > orange_size_limit(merkle_height)) throw EncodingError("orange subtree exceeds size limit");

    BitString shape_bits;
    for (size_t i = 0; i < 2 * n - 1; ++i) shape_bits.push_back(bits[i]);
    o.shape = decode_shape(shape_bits, n);
    if (o.shape.internal_count() != n) throw EncodingError("orange shape size mismatch");
    if (o.shape.depth() > merkle_height) throw EncodingError("orange subtree deeper than the tree");
    for (size_t i = 2 * n - 1; i < bits.size(); ++i) o.leaf_is_magic.push_back(bits[i]);

    // Canonical form: siblings that are both leaves must pair one magic hash
    // with one regular hash, otherwise their parent could not be orange.
    auto nodes = o.shape.links();
    const auto& pre = o.shape.preorder();
    std::vector<int> leaf_ordinal(pre.size(), -1);
    int ord = 0;
    for (size_t i = 0; i < pre.size(); ++i)
        if (!pre[i]) leaf_ordinal[i] = ord++;
    for (size_t i = 0; i < pre.size(); ++i) {
        if (!pre[i]) continue;
        int l = nodes[i].left, r = nodes[i].right;
        if (!pre[l] && !pre[r]) {
            if (o.leaf_is_magic[leaf_ordinal[l]] == o.leaf_is_magic[leaf_ordinal[r]])
                throw EncodingError("sibling leaves must pair magic with regular");
        }
    }
    return o;
}

unsigned encoding_nesting_depth(const TreeShape& tree) {
    int depth = 0, max_depth = 0;
    const auto& pre = tree.preorder();
    // Walk over the Dyck part (all but the final symbol).
    for (size_t i = 0; i + 1 < pre.size(); ++i) {
        depth += pre[i] ? 1 : -1;
        if (depth > max_depth) max_depth = depth;
    }
    return unsigned(max_depth);
}

cpp_int catalan(unsigned n) {
    cpp_int num = 1, den = 1;
    for (unsigned k = 2; k <= n; ++k) {
        num *= (n + k);
        den *= k;
    }
    return num / den;
}

static cpp_int binom(unsigned n, long long k) {
    if (k < 0 || k > (long long)n) return 0;
    cpp_int r = 1;
    for (long long i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);
    }
    return r;
}

cpp_int count_bounded_trees(unsigned n, unsigned h) {
    if (n == 0) return 1;
    if (h == 0) return 0;
    // Reflection principle: walks of length 2n from 0 to 0 staying within
    // [0, h]. Summed over all reflections with period h+2.
    cpp_int total = 0;
    long long period = (long long)h + 2;
    for (long long k = -((long long)(2 * n) / period) - 1; k * period <= (long long)(2 * n); ++k) {
        total += binom(2 * n, (long long)n - k * period);
        total -= binom(2 * n, (long long)n - k * period - 1);
    }
    return total;
}

} // namespace shardpow
