// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "mmr.h"

#include <algorithm>
#include <stdexcept>

namespace shardpow {

Hash256 mmr_combine(const Hash256& lh, Weight lw, const Hash256& rh, Weight rw) {
    uint8_t buf[96];
    std::copy(lh.bytes.begin(), lh.bytes.end(), buf);
    std::copy(rh.bytes.begin(), rh.bytes.end(), buf + 32);
    u128_to_le(lw.raw(), buf + 64);
    u128_to_le(rw.raw(), buf + 80);
    return blake2s(std::span<const uint8_t>(buf, 96));
}

std::vector<uint8_t> sc_leaf_payload(const SCHeader& h, const Hash256& container_hash) {
    std::vector<uint8_t> p = h.serialized();
    p.insert(p.end(), container_hash.bytes.begin(), container_hash.bytes.end());
    return p;
}

std::vector<uint8_t> bc_leaf_payload(const BCHeader& h) { return h.serialized(); }

// ---------------------------------------------------------------------------
// WeightedMmr (peaks only)

void WeightedMmr::append(const Hash256& leaf_hash, Weight weight) {
    Peak p{leaf_hash, weight, 0};
    while (!peaks_.empty() && peaks_.back().height == p.height) {
        const Peak& l = peaks_.back();
        p = Peak{mmr_combine(l.hash, l.weight, p.hash, p.weight), l.weight + p.weight, p.height + 1};
        peaks_.pop_back();
    }
    peaks_.push_back(p);
    ++leaf_count_;
    total_ += weight;
}

Hash256 WeightedMmr::root() const {
    if (peaks_.empty()) return Hash256{};
    Hash256 h = peaks_.back().hash;
    Weight w = peaks_.back().weight;
    for (size_t i = peaks_.size() - 1; i-- > 0;) {
        h = mmr_combine(peaks_[i].hash, peaks_[i].weight, h, w);
        w += peaks_[i].weight;
    }
    return h;
}

// ---------------------------------------------------------------------------
// WeightProofSample

void WeightProofSample::serialize(Writer& w) const {
    w.varint(mmr_leaf_count);
    w.varint(leaf_index);
    w.bytes(leaf_hash.bytes);
    w.u128(leaf_weight.raw());
    w.var_bytes(leaf_payload);
    w.varint(path.size());
    for (const auto& e : path) {
        w.bytes(e.hash.bytes);
        w.u128(e.weight.raw());
    }
}

WeightProofSample WeightProofSample::deserialize(Reader& r) {
    WeightProofSample s;
    s.mmr_leaf_count = r.varint();
    s.leaf_index = r.varint();
    r.bytes_into(s.leaf_hash.bytes.data(), 32);
    s.leaf_weight = Weight::from_raw(r.u128());
    s.leaf_payload = r.var_bytes();
    uint64_t n = r.varint();
    if (n > 256) throw DeserializeError("proof path too long");
    s.path.resize(n);
    for (auto& e : s.path) {
        r.bytes_into(e.hash.bytes.data(), 32);
        e.weight = Weight::from_raw(r.u128());
    }
    return s;
}

std::vector<uint8_t> WeightProofSample::serialized() const {
    Writer w;
    serialize(w);
    return w.take();
}

// Peak heights for a given leaf count: binary decomposition, high bit first.
static std::vector<unsigned> peak_heights(uint64_t leaf_count) {
    std::vector<unsigned> hs;
    for (int b = 63; b >= 0; --b)
        if (leaf_count & (uint64_t(1) << b)) hs.push_back(unsigned(b));
    return hs;
}

static bool verify_inclusion_impl(const Hash256& root, Weight total_weight, const WeightProofSample& sample,
                                  Weight* offset_out) {
    if (sample.mmr_leaf_count == 0 || sample.leaf_index >= sample.mmr_leaf_count) return false;
    if (!sample.leaf_payload.empty() && blake2s(sample.leaf_payload) != sample.leaf_hash) return false;

    // Locate the peak holding this leaf.
    auto heights = peak_heights(sample.mmr_leaf_count);
    size_t peak_idx = 0;
    uint64_t offset_leaves = 0;
    for (;; ++peak_idx) {
        uint64_t size = uint64_t(1) << heights[peak_idx];
        if (sample.leaf_index < offset_leaves + size) break;
        offset_leaves += size;
    }
    unsigned mountain_h = heights[peak_idx];
    size_t expected_len = mountain_h + (peak_idx + 1 < heights.size() ? 1 : 0) + peak_idx;
    if (sample.path.size() != expected_len) return false;

    Hash256 acc = sample.leaf_hash;
    Weight acc_w = sample.leaf_weight;
    Weight offset; // cumulative weight strictly left of the leaf
    size_t step = 0;
    uint64_t pos = sample.leaf_index - offset_leaves;
    for (unsigned l = 0; l < mountain_h; ++l, ++step) {
        const auto& e = sample.path[step];
        if (pos & 1) {
            acc = mmr_combine(e.hash, e.weight, acc, acc_w);
            offset += e.weight;
        } else {
            acc = mmr_combine(acc, acc_w, e.hash, e.weight);
        }
        acc_w += e.weight;
        pos >>= 1;
    }
    if (peak_idx + 1 < heights.size()) { // bag of the peaks to our right
        const auto& e = sample.path[step++];
        acc = mmr_combine(acc, acc_w, e.hash, e.weight);
        acc_w += e.weight;
    }
    for (size_t i = peak_idx; i-- > 0;) { // peaks to our left, nearest first
        const auto& e = sample.path[step++];
        acc = mmr_combine(e.hash, e.weight, acc, acc_w);
        offset += e.weight;
        acc_w += e.weight;
    }
    if (acc != root || !(acc_w == total_weight)) return false;
    if (offset_out) *offset_out = offset;
    return true;
}

bool verify_inclusion(const Hash256& root, Weight total_weight, const WeightProofSample& sample,
                      Weight* offset_out) {
    try {
        return verify_inclusion_impl(root, total_weight, sample, offset_out);
    } catch (const std::exception&) {
        return false; // weight overflow in a hostile proof
    }
}

// ---------------------------------------------------------------------------
// MmrProver

void MmrProver::append(const Hash256& leaf_hash, Weight weight, std::vector<uint8_t> payload) {
    leaves_.push_back({leaf_hash, weight});
    payloads_.push_back(std::move(payload));
    if (levels_.empty()) levels_.emplace_back();
    levels_[0].push_back({leaf_hash, weight});
    // Extend complete interior nodes.
    size_t lvl = 0;
    while (levels_[lvl].size() >= 2) {
        size_t below = levels_[lvl].size();
        if (below % 2) break;
        if (lvl + 1 == levels_.size()) levels_.emplace_back();
        if (levels_[lvl + 1].size() == below / 2) break; // already up to date
        const auto& l = levels_[lvl][below - 2];
        const auto& r = levels_[lvl][below - 1];
        levels_[lvl + 1].push_back({mmr_combine(l.hash, l.weight, r.hash, r.weight), l.weight + r.weight});
        ++lvl;
    }
}

Weight MmrProver::total_weight() const {
    Weight t;
    for (const auto& l : leaves_) t += l.weight;
    return t;
}

Hash256 MmrProver::root() const {
    WeightedMmr m;
    for (const auto& l : leaves_) m.append(l.hash, l.weight);
    return m.root();
}

WeightProofSample MmrProver::prove(uint64_t index) const {
    if (index >= leaves_.size()) throw std::out_of_range("leaf index out of range");
    WeightProofSample s;
    s.mmr_leaf_count = leaves_.size();
    s.leaf_index = index;
    s.leaf_hash = leaves_[index].hash;
    s.leaf_weight = leaves_[index].weight;
    s.leaf_payload = payloads_[index];

    auto heights = peak_heights(leaves_.size());
    size_t peak_idx = 0;
    uint64_t offset_leaves = 0;
    for (;; ++peak_idx) {
        uint64_t size = uint64_t(1) << heights[peak_idx];
        if (index < offset_leaves + size) break;
        offset_leaves += size;
    }
    unsigned mountain_h = heights[peak_idx];
    // Mountain siblings: node (l, i) covers leaves [i*2^l, (i+1)*2^l), and
    // peaks are aligned so global level indexes work directly.
    uint64_t pos = index;
    for (unsigned l = 0; l < mountain_h; ++l) {
        const auto& e = levels_[l][pos ^ 1];
        s.path.push_back({e.hash, e.weight});
        pos >>= 1;
    }
    // Peak entries (hash, weight) per peak.
    std::vector<Entry> peaks;
    uint64_t off = 0;
    for (unsigned h : heights) {
        peaks.push_back(levels_[h][off >> h]);
        off += uint64_t(1) << h;
    }
    if (peak_idx + 1 < peaks.size()) {
        // Bag of everything to the right, folded right to left.
        Entry bag = peaks.back();
        for (size_t i = peaks.size() - 1; i-- > peak_idx + 1;) {
            bag = {mmr_combine(peaks[i].hash, peaks[i].weight, bag.hash, bag.weight),
                   peaks[i].weight + bag.weight};
        }
        s.path.push_back({bag.hash, bag.weight});
    }
    for (size_t i = peak_idx; i-- > 0;) s.path.push_back({peaks[i].hash, peaks[i].weight});
    return s;
}

// Uniform draw over [0, total) from the Fiat-Shamir hash stream.
static u128 fs_draw(const Hash256& root, Weight total, uint64_t seed, uint64_t& counter) {
    u128 range = total.raw();
    u128 limit = range == 0 ? 0 : (~(u128)0) - ((~(u128)0) % range + 1) % range;
    while (true) {
        Writer w;
        w.bytes(root.bytes);
        w.u128(total.raw());
        w.u64(seed);
        w.u64(counter++);
        Hash256 d = blake2s(w.data());
        u128 v = u128_from_le(d.bytes.data());
        if (v <= limit) return v % range;
    }
}

std::vector<WeightProofSample> MmrProver::prove_chain_weight(uint32_t sample_count, uint64_t seed) const {
    if (sample_count == 0) throw std::invalid_argument("sample count must be positive");
    if (leaves_.empty()) throw std::invalid_argument("empty range");
    // Cumulative weights for inverse sampling.
    std::vector<u128> cum(leaves_.size() + 1, 0);
    for (size_t i = 0; i < leaves_.size(); ++i) cum[i + 1] = cum[i] + leaves_[i].weight.raw();
    Weight total = total_weight();
    Hash256 rt = root();
    std::vector<WeightProofSample> out;
    out.reserve(sample_count);
    uint64_t counter = 0;
    for (uint32_t j = 0; j < sample_count; ++j) {
        u128 u = fs_draw(rt, total, seed, counter);
        size_t idx = size_t(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()) - 1;
        out.push_back(prove(idx));
    }
    return out;
}

bool verify_chain_weight(const Hash256& root, Weight claimed_weight, uint32_t sample_count, uint64_t seed,
                         const std::vector<WeightProofSample>& samples, const LeafValidator& validate_leaf) {
    if (samples.size() != sample_count || sample_count == 0) return false;
    if (claimed_weight.is_zero()) return false;
    uint64_t counter = 0;
    for (const auto& s : samples) {
        u128 u = fs_draw(root, claimed_weight, seed, counter);
        Weight offset;
        if (!verify_inclusion(root, claimed_weight, s, &offset)) return false;
        // The draw must land inside this leaf's weight interval.
        if (u < offset.raw() || u >= offset.raw() + s.leaf_weight.raw()) return false;
        if (validate_leaf && !validate_leaf(s)) return false;
    }
    return true;
}

void MmrProver::save(Writer& w) const {
    w.varint(leaves_.size());
    for (const auto& l : leaves_) {
        w.bytes(l.hash.bytes);
        w.u128(l.weight.raw());
    }
}

MmrProver MmrProver::load(Reader& r) {
    MmrProver p;
    uint64_t n = r.varint();
    if (n > (uint64_t(1) << 32)) throw DeserializeError("leaf count too large");
    for (uint64_t i = 0; i < n; ++i) {
        Hash256 h;
        r.bytes_into(h.bytes.data(), 32);
        Weight w = Weight::from_raw(r.u128());
        p.append(h, w);
    }
    return p;
}

bool rule1_check(Difficulty sc_difficulty, std::span<const Difficulty> bc_window_difficulties,
                 uint32_t coeff_num, uint32_t coeff_den) {
    if (bc_window_difficulties.empty()) throw std::invalid_argument("empty difficulty window");
    if (coeff_den == 0) throw std::invalid_argument("zero denominator");
    Difficulty max_d;
    for (const auto& d : bc_window_difficulties)
        if (d > max_d) max_d = d;
    auto widen = [](u128 v) {
        uint256 w = uint64_t(v >> 64);
        w <<= 64;
        w |= uint64_t(v);
        return w;
    };
    return widen(sc_difficulty.raw()) * coeff_den <= widen(max_d.raw()) * coeff_num;
}

} // namespace shardpow
