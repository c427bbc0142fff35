// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "chain.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace shardpow {

void ProtocolParams::serialize(Writer& w) const {
    w.u8(uint8_t(space_bits));
    w.u8(uint8_t(mining));
    w.u8(uint8_t(daa));
    w.u64(uint64_t(bc_block_time));
    w.u64(uint64_t(sc_block_time));
    w.u32(bc_epoch_len);
    w.u32(sc_epoch_len);
    w.u32(mining_epoch_len);
    w.u32(sc_blocks_per_bc);
    w.u128(min_difficulty.raw());
    w.u64(min_fee_quanta);
    w.u64(uint64_t(bc_time_window));
    w.u64(uint64_t(sc_time_window));
    w.u32(bc_mpt_window);
    w.u32(sc_mpt_window);
}

ProtocolParams ProtocolParams::deserialize(Reader& r) {
    ProtocolParams p;
    p.space_bits = r.u8();
    p.mining = MiningMode(r.u8());
    p.daa = DaaMode(r.u8());
    p.bc_block_time = int64_t(r.u64());
    p.sc_block_time = int64_t(r.u64());
    p.bc_epoch_len = r.u32();
    p.sc_epoch_len = r.u32();
    p.mining_epoch_len = r.u32();
    p.sc_blocks_per_bc = r.u32();
    p.min_difficulty = Difficulty::from_raw(r.u128());
    p.min_fee_quanta = r.u64();
    p.bc_time_window = int64_t(r.u64());
    p.sc_time_window = int64_t(r.u64());
    p.bc_mpt_window = r.u32();
    p.sc_mpt_window = r.u32();
    return p;
}

int64_t desired_timestamp(const ProtocolParams& p, ChainKind kind, uint64_t bc_genesis_index, uint64_t n) {
    if (kind == ChainKind::Beacon) return p.bc_block_time * int64_t(n);
    return p.bc_block_time * int64_t(bc_genesis_index) + p.sc_block_time * int64_t(n);
}

uint64_t mining_epoch(const ProtocolParams& p, ChainKind kind, uint64_t bc_genesis_index, uint64_t height) {
    uint64_t L = p.mining_epoch_len;
    if (kind == ChainKind::Beacon) {
        if (height == 0) return 1;
        return (height - 1) / L + 1;
    }
    uint64_t position = uint64_t(p.sc_blocks_per_bc) * bc_genesis_index + height;
    if (position == 0) return 1;
    return (position - 1) / (uint64_t(p.sc_blocks_per_bc) * L) + 1;
}

// ---------------------------------------------------------------------------
// Difficulty adjustment

static int64_t median_of(std::span<const int64_t> v) {
    std::vector<int64_t> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s[s.size() / 2];
}

Adjustment adjust_difficulty(const EpochTimings& epoch, Difficulty prev_difficulty, const ProtocolParams& p,
                             ChainKind kind, uint64_t bc_genesis_index, DaaMode mode) {
    if (epoch.block_count < 10) throw std::invalid_argument("epoch must have at least 10 blocks");
    if (epoch.first_five.size() < 1 || epoch.last_five.size() < 1)
        throw std::invalid_argument("missing epoch timestamps");

    Adjustment adj;
    int64_t tau1 = median_of(epoch.first_five);
    int64_t tau2 = median_of(epoch.last_five);
    if (tau2 <= tau1) {
        // Degenerate epoch: keep the previous difficulty unchanged.
        adj.degenerate = true;
        adj.next_difficulty = prev_difficulty;
        adj.next_target = prev_difficulty.to_target(p.space_bits);
        adj.t_next_num = p.block_time(kind);
        adj.t_next_den = 1;
        return adj;
    }

    const int64_t T = p.block_time(kind);
    const int64_t N = epoch.block_count;
    const int64_t d_n = epoch.last_timestamp - desired_timestamp(p, kind, bc_genesis_index, epoch.last_height);

    // Next expected block time, clamped to [0.8T, 1.2T].
    int64_t x = mode == DaaMode::PaperLiteral ? d_n + N * T : N * T - d_n;
    int64_t num, den;
    if (5 * x <= 4 * T * N) {
        num = 4 * T;
        den = 5;
    } else if (5 * x >= 6 * T * N) {
        num = 6 * T;
        den = 5;
    } else {
        num = x;
        den = N;
    }
    adj.t_next_num = num;
    adj.t_next_den = den;

    // AHR = (N-5) * D_prev / (tau2 - tau1); D_next = AHR * T_next.
    uint64_t scale_num = uint64_t(N - 5) * uint64_t(num);
    uint64_t scale_den = uint64_t(tau2 - tau1) * uint64_t(den);
    Difficulty next = prev_difficulty.mul_div(scale_num, scale_den);
    if (next < p.min_difficulty) next = p.min_difficulty;

    // Round through the compact form so stored difficulty matches the bits.
    Target t = next.to_target(p.space_bits);
    t = Target::from_compact(t.to_compact());
    adj.next_target = t;
    adj.next_difficulty = Difficulty::from_target(t, p.space_bits);
    return adj;
}

// ---------------------------------------------------------------------------
// Timestamps

int64_t median_past_time(std::span<const int64_t> prev_timestamps, uint32_t window) {
    size_t n = std::min<size_t>(window, prev_timestamps.size());
    if (n == 0) throw std::invalid_argument("no prior timestamps");
    return median_of(prev_timestamps.subspan(prev_timestamps.size() - n, n));
}

TimestampVerdict validate_timestamp(std::span<const int64_t> prev_timestamps, uint32_t mpt_window,
                                    int64_t future_window, int64_t timestamp,
                                    std::optional<int64_t> peer_median) {
    if (!prev_timestamps.empty()) {
        if (timestamp <= median_past_time(prev_timestamps, mpt_window)) return TimestampVerdict::RejectMedianPast;
    }
    if (peer_median && timestamp >= *peer_median + future_window) return TimestampVerdict::RejectTooFarInFuture;
    return TimestampVerdict::Accept;
}

// ---------------------------------------------------------------------------
// Coin-creation management

const double kLambda = std::exp(std::log(0.8) / 144.0); // 0.99845159...

double next_coefficient(double k_prev, double d_total, double d_epoch) {
    if (k_prev >= 1.0) return 1.0;
    if (k_prev <= 0.0 || d_total <= 0 || d_epoch < 0 || d_epoch > d_total)
        throw std::invalid_argument("bad coefficient inputs");
    double ratio = (d_total - d_epoch) / d_total;
    if (ratio >= std::pow(kLambda, 2.0) * std::pow(k_prev, 1.5))
        return std::min(1.0, k_prev * std::pow(kLambda, -2.0));
    return k_prev; // covers both the paper's first case and its silent middle band
}

int next_coefficient_exponent(int e_prev, double d_total, double d_epoch) {
    if (e_prev <= 0) return 0;
    double k_prev = std::pow(kLambda, e_prev);
    double ratio = (d_total - d_epoch) / d_total;
    if (d_total > 0 && ratio >= std::pow(kLambda, 2.0) * std::pow(k_prev, 1.5)) return std::max(0, e_prev - 2);
    return e_prev;
}

void CoefficientTracker::close_epoch(Difficulty epoch_aggregate) {
    aggregates_.push_back(epoch_aggregate);
    total_ += epoch_aggregate;
    if (exponents_.empty()) {
        exponents_.push_back(12); // k_1 = lambda^12
        return;
    }
    int e = next_coefficient_exponent(exponents_.back(), total_.to_double(), epoch_aggregate.to_double());
    exponents_.push_back(e);
}

void CoefficientTracker::reopen_last_epoch() {
    if (exponents_.empty()) throw std::logic_error("no closed epoch");
    exponents_.pop_back();
    total_ = total_ - aggregates_.back();
    aggregates_.pop_back();
}

double CoefficientTracker::k(size_t i) const { return std::pow(kLambda, exponents_.at(i - 1)); }

int64_t CoefficientTracker::reward_exponent(uint64_t epoch_m) const {
    int64_t total = 0;
    int last = exponents_.empty() ? 12 : exponents_.back();
    for (uint64_t i = 1; i + 1 <= epoch_m; ++i)
        total += i <= exponents_.size() ? exponents_[i - 1] : last;
    return total;
}

uint64_t block_reward_quanta(Difficulty difficulty, uint32_t mm_number, int64_t reward_exponent) {
    if (mm_number == 0) throw std::invalid_argument("mm_number must be positive");
    if (reward_exponent == 0) return difficulty.reward_quanta(mm_number);
    long double factor = std::pow((long double)kLambda, (long double)reward_exponent);
    long double hi = (long double)(uint64_t)(difficulty.raw() >> 64) * 18446744073709551616.0L;
    long double lo = (long double)(uint64_t)difficulty.raw();
    long double quanta = (hi + lo) * factor / ((long double)mm_number * 18446744073709551616.0L);
    return uint64_t(llroundl(quanta));
}

double monetary_creation(uint64_t supply_n_quanta, uint64_t supply_m_quanta) {
    if (supply_n_quanta == 0) throw std::invalid_argument("zero supply at the base height");
    return double(supply_m_quanta) / double(supply_n_quanta) - 1.0;
}

// ---------------------------------------------------------------------------
// Genesis

BCHeader make_bc_genesis(uint32_t initial_shards, uint32_t bits, int64_t timestamp) {
    BCHeader h;
    h.version = 1;
    h.shard_count = initial_shards;
    h.vote_flag = false;
    h.timestamp = uint64_t(timestamp);
    h.bits = bits;
    h.nonce = 0;
    return h;
}

SCHeader make_sc_genesis(const Hash256& bc_ref_hash, uint32_t bits, uint64_t bc_genesis_index,
                         const ProtocolParams& p) {
    SCHeader h;
    h.version = 1;
    h.prev_commitment = bc_ref_hash; // direct anchor to the beacon block
    h.mm_number = 1;
    h.timestamp = uint64_t(desired_timestamp(p, ChainKind::Shard, bc_genesis_index, 0));
    h.bits = bits;
    return h;
}

// ---------------------------------------------------------------------------
// ChainState

ChainState::ChainState(const ChainConfig& cfg, const ProtocolParams& params)
    : cfg_(cfg), params_(&params), daa_mode_(params.daa) {
    Target t = cfg.genesis_difficulty.to_target(params.space_bits);
    t = Target::from_compact(t.to_compact());
    epoch_targets_.push_back({t, Difficulty::from_target(t, params.space_bits)});
}

Target ChainState::required_target(uint64_t height) const {
    uint64_t epoch = height / params_->epoch_len(cfg_.kind);
    return epoch_targets_.at(std::min<uint64_t>(epoch, epoch_targets_.size() - 1)).first;
}

Difficulty ChainState::required_difficulty(uint64_t height) const {
    uint64_t epoch = height / params_->epoch_len(cfg_.kind);
    return epoch_targets_.at(std::min<uint64_t>(epoch, epoch_targets_.size() - 1)).second;
}

Hash256 ChainState::mmr_root_at(uint64_t height) const {
    if (blocks_.empty()) throw std::out_of_range("empty chain");
    if (height == tip_height()) return mmr_.root();
    if (height < snapshot_base_ || height >= snapshot_base_ + mmr_snapshots_.size())
        throw std::out_of_range("height outside the snapshot window");
    return mmr_snapshots_[height - snapshot_base_].root();
}

Weight ChainState::weight_at(uint64_t height) const {
    if (height == tip_height()) return mmr_.total_weight();
    if (height < snapshot_base_ || height >= snapshot_base_ + mmr_snapshots_.size())
        throw std::out_of_range("height outside the snapshot window");
    return mmr_snapshots_[height - snapshot_base_].total_weight();
}

std::vector<int64_t> ChainState::recent_timestamps(uint32_t window, uint64_t up_to_height) const {
    std::vector<int64_t> out;
    if (blocks_.empty()) return out;
    uint64_t last = std::min<uint64_t>(up_to_height, tip_height());
    uint64_t n = std::min<uint64_t>(window, last + 1);
    out.reserve(n);
    for (uint64_t h = last + 1 - n; h <= last; ++h) out.push_back(blocks_[h].timestamp);
    return out;
}

void ChainState::append_block(const BlockRec& rec, const Hash256& mmr_leaf_hash) {
    blocks_.push_back(rec);
    supply_ += rec.reward_quanta;
    mmr_.append(mmr_leaf_hash, rec.difficulty);
    mmr_snapshots_.push_back(mmr_);
    if (mmr_snapshots_.size() > kSnapshotWindow) {
        mmr_snapshots_.pop_front();
        ++snapshot_base_;
    }
    recent_hashes_[rec.hash] = tip_height();
    if (recent_hashes_.size() > 2 * kSnapshotWindow) {
        // Drop the oldest tracked hash.
        uint64_t cutoff = tip_height() - 2 * kSnapshotWindow;
        for (auto it = recent_hashes_.begin(); it != recent_hashes_.end();) {
            it = it->second <= cutoff ? recent_hashes_.erase(it) : std::next(it);
        }
    }

    if (cfg_.kind == ChainKind::Beacon) {
        open_epoch_aggregate_ += rec.difficulty;
        uint64_t h = tip_height();
        uint64_t L = params_->mining_epoch_len;
        if (h > 0 && h % L == 0) { // block #(L*m) closes mining epoch m
            coeffs_.close_epoch(open_epoch_aggregate_);
            open_epoch_aggregate_ = Difficulty();
        }
    }

    // Close a difficulty epoch when its last block arrives.
    uint32_t N = params_->epoch_len(cfg_.kind);
    if (blocks_.size() % N == 0) close_difficulty_epoch();
}

void ChainState::close_difficulty_epoch() {
    uint32_t N = params_->epoch_len(cfg_.kind);
    uint64_t epoch = blocks_.size() / N - 1; // the epoch just completed
    uint64_t start = uint64_t(epoch) * N;
    std::vector<int64_t> first5, last5;
    for (uint64_t i = 0; i < 5 && start + i < blocks_.size(); ++i) first5.push_back(blocks_[start + i].timestamp);
    for (uint64_t i = std::max<uint64_t>(start + N, 5) - 5; i < start + N; ++i)
        last5.push_back(blocks_[i].timestamp);
    EpochTimings timings{first5, last5, blocks_.back().timestamp, tip_height(), N};
    Adjustment adj = adjust_difficulty(timings, epoch_targets_[epoch].second, *params_, cfg_.kind,
                                       cfg_.bc_genesis_index, daa_mode_);
    if (epoch_targets_.size() == epoch + 1) {
        epoch_targets_.push_back({adj.next_target, adj.next_difficulty});
    } else {
        epoch_targets_[epoch + 1] = {adj.next_target, adj.next_difficulty};
    }
}

void ChainState::rollback(uint64_t new_tip_height) {
    if (new_tip_height >= tip_height()) return;
    if (new_tip_height < snapshot_base_) throw std::out_of_range("rollback beyond the snapshot window");
    uint32_t N = params_->epoch_len(cfg_.kind);
    uint64_t L = params_->mining_epoch_len;
    while (tip_height() > new_tip_height) {
        const BlockRec& rec = blocks_.back();
        uint64_t h = tip_height();
        supply_ -= rec.reward_quanta;
        recent_hashes_.erase(rec.hash);
        if (cfg_.kind == ChainKind::Beacon) {
            if (h > 0 && h % L == 0) {
                open_epoch_aggregate_ = coeffs_.epoch_aggregates().back();
                coeffs_.reopen_last_epoch();
            }
            open_epoch_aggregate_ = open_epoch_aggregate_ - rec.difficulty;
        }
        if (blocks_.size() % N == 0) {
            // The epoch this block completed is no longer complete; its
            // published retarget stays in epoch_targets_ and will be
            // recomputed identically when the epoch refills.
        }
        blocks_.pop_back();
        mmr_snapshots_.pop_back();
    }
    uint64_t completed_epochs = blocks_.size() / N;
    epoch_targets_.resize(completed_epochs + 1);
    mmr_ = mmr_snapshots_.back();
}

std::vector<Difficulty> ChainState::rule1_window() const {
    uint32_t N = params_->epoch_len(cfg_.kind);
    std::vector<Difficulty> out;
    if (blocks_.size() >= N) {
        uint64_t last_complete = blocks_.size() / N; // epochs completed
        uint64_t start = (last_complete - 1) * N;
        out.reserve(N);
        for (uint64_t i = start; i < start + N; ++i) out.push_back(blocks_[i].difficulty);
    } else {
        for (const auto& b : blocks_) out.push_back(b.difficulty);
    }
    return out;
}

std::optional<uint64_t> ChainState::height_of(const Hash256& block_hash) const {
    auto it = recent_hashes_.find(block_hash);
    if (it == recent_hashes_.end()) return std::nullopt;
    return it->second;
}

std::string ChainState::stats_json() const {
    nlohmann::json out = nlohmann::json::array();
    uint32_t N = params_->epoch_len(cfg_.kind);
    uint64_t running_supply = 0;
    uint64_t next_epoch_mark = N - 1;
    for (uint64_t h = 0; h < blocks_.size(); ++h) {
        running_supply += blocks_[h].reward_quanta;
        bool boundary = h == next_epoch_mark || h + 1 == blocks_.size();
        if (!boundary) continue;
        if (h == next_epoch_mark) next_epoch_mark += N;
        uint64_t m = mining_epoch(*params_, cfg_.kind, cfg_.bc_genesis_index, h);
        double k = 1.0;
        if (cfg_.kind == ChainKind::Beacon && coeffs_.closed_epochs() > 0)
            k = coeffs_.k(std::min<uint64_t>(m, coeffs_.closed_epochs()));
        out.push_back({
            {"height", h},
            {"supply_quanta", running_supply},
            {"supply_coins", double(running_supply) / double(CoinAmount::kQuantaPerCoin)},
            {"k", k},
            {"difficulty", blocks_[h].difficulty.to_double()},
            {"timestamp", blocks_[h].timestamp},
        });
    }
    return out.dump();
}

} // namespace shardpow
