// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_MMR_H
#define SHARDPOW_MMR_H

#include <functional>
#include <optional>
#include <vector>

#include "core.h"

namespace shardpow {

/** Parent hash commits both child hashes and both child weights. */
Hash256 mmr_combine(const Hash256& lh, Weight lw, const Hash256& rh, Weight rw);

/** Leaf payloads: shard chains commit the SC header concatenated with the
 * hash of its BC_header container; the beacon chain commits its own header. */
std::vector<uint8_t> sc_leaf_payload(const SCHeader& h, const Hash256& container_hash);
std::vector<uint8_t> bc_leaf_payload(const BCHeader& h);

/** Append-only Merkle Mountain Range carrying subchain weights. Keeps only
 * the peaks, so copies are cheap and snapshots are free. The root bags the
 * peaks right to left; an empty range has the zero root. */
class WeightedMmr {
public:
    struct Peak {
        Hash256 hash;
        Weight weight;
        unsigned height;
        bool operator==(const Peak&) const = default;
    };

    void append(const Hash256& leaf_hash, Weight weight);
    uint64_t leaf_count() const { return leaf_count_; }
    Weight total_weight() const { return total_; }
    Hash256 root() const;
    const std::vector<Peak>& peaks() const { return peaks_; }
    bool operator==(const WeightedMmr&) const = default;

private:
    std::vector<Peak> peaks_;
    uint64_t leaf_count_ = 0;
    Weight total_;
};

/** One sampled leaf with its inclusion path of (hash, weight) pairs. Sibling
 * sides are a pure function of (mmr_leaf_count, leaf_index) and are not
 * carried on the wire. */
struct WeightProofSample {
    uint64_t mmr_leaf_count = 0;
    uint64_t leaf_index = 0;
    Hash256 leaf_hash;
    Weight leaf_weight;
    std::vector<uint8_t> leaf_payload; // optional preimage of leaf_hash
    struct Elem {
        Hash256 hash;
        Weight weight;
        bool operator==(const Elem&) const = default;
    };
    std::vector<Elem> path;

    void serialize(Writer& w) const;
    static WeightProofSample deserialize(Reader& r);
    std::vector<uint8_t> serialized() const;
    bool operator==(const WeightProofSample&) const = default;
};

/** Recomputes the root and checks every internal weight equals the sum of
 * its children along the path. When the sample carries a payload it must
 * hash to the leaf. `offset_out` (optional) receives the cumulative weight
 * of everything left of the sampled leaf. */
bool verify_inclusion(const Hash256& root, Weight total_weight, const WeightProofSample& sample,
                      Weight* offset_out = nullptr);

/** Full structure over the leaf sequence; builds proofs. */
class MmrProver {
public:
    void append(const Hash256& leaf_hash, Weight weight, std::vector<uint8_t> payload = {});
    uint64_t leaf_count() const { return leaves_.size(); }
    Weight total_weight() const;
    Hash256 root() const;

    WeightProofSample prove(uint64_t index) const; // throws std::out_of_range

    /** Non-interactive chain-weight proof: sample indices are drawn by
     * cumulative-weight inverse sampling from a hash stream seeded with
     * (root, total weight, seed, counter). */
    std::vector<WeightProofSample> prove_chain_weight(uint32_t sample_count, uint64_t seed = 0) const;

    // Export format: leaf-count varint, then per leaf a 32-byte hash and a
    // 16-byte little-endian fixed-point weight. Payloads are not exported.
    void save(Writer& w) const;
    static MmrProver load(Reader& r);

private:
    struct Entry {
        Hash256 hash;
        Weight weight;
    };
    std::vector<Entry> leaves_;
    std::vector<std::vector<uint8_t>> payloads_;
    std::vector<std::vector<Entry>> levels_; // levels_[l][i] covers leaves [i*2^l, (i+1)*2^l)
};

/** Extra per-sample validation hook (e.g. leaf weight must equal the
 * difficulty encoded in the leaf's header). */
using LeafValidator = std::function<bool(const WeightProofSample&)>;

/** Verifies a chain-weight claim: recomputes the sampled draw sequence,
 * checks each sample's inclusion, weight interval, and validator. */
bool verify_chain_weight(const Hash256& root, Weight claimed_weight, uint32_t sample_count, uint64_t seed,
                         const std::vector<WeightProofSample>& samples,
                         const LeafValidator& validate_leaf = nullptr);

/** Light-client difficulty cap: true iff sc_difficulty <= (num/den) * max of
 * the window. Throws std::invalid_argument on an empty window. */
bool rule1_check(Difficulty sc_difficulty, std::span<const Difficulty> bc_window_difficulties,
                 uint32_t coeff_num = 1, uint32_t coeff_den = 20);

} // namespace shardpow

#endif // SHARDPOW_MMR_H
