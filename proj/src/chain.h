// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_CHAIN_H
#define SHARDPOW_CHAIN_H

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>

#include "core.h"
#include "mmr.h"

namespace shardpow {

enum class ChainKind : uint8_t { Beacon = 0, Shard = 1 };
enum class DaaMode : uint8_t { PaperLiteral = 0, GoalConsistent = 1 };
enum class MiningMode : uint8_t { Analytic = 0, RealHash = 1 };

struct ProtocolParams {
    unsigned space_bits = 32; // scaled mining space
    MiningMode mining = MiningMode::Analytic;
    DaaMode daa = DaaMode::PaperLiteral;
    int64_t bc_block_time = 600;
    int64_t sc_block_time = 15;
    uint32_t bc_epoch_len = 2048; // difficulty epochs
    uint32_t sc_epoch_len = 5760;
    uint32_t mining_epoch_len = 4096; // L
    uint32_t sc_blocks_per_bc = 40;
    Difficulty min_difficulty = Difficulty::from_int(1); // D_0
    uint64_t min_fee_quanta = CoinAmount::kQuantaPerCoin / 10000; // 0.0001 coin
    int64_t bc_time_window = 2 * 60 * 60;
    int64_t sc_time_window = 6 * 60;
    uint32_t bc_mpt_window = 11;
    uint32_t sc_mpt_window = 23;

    int64_t block_time(ChainKind k) const { return k == ChainKind::Beacon ? bc_block_time : sc_block_time; }
    uint32_t epoch_len(ChainKind k) const { return k == ChainKind::Beacon ? bc_epoch_len : sc_epoch_len; }
    uint32_t mpt_window(ChainKind k) const { return k == ChainKind::Beacon ? bc_mpt_window : sc_mpt_window; }
    int64_t time_window(ChainKind k) const { return k == ChainKind::Beacon ? bc_time_window : sc_time_window; }

    void serialize(Writer& w) const;
    static ProtocolParams deserialize(Reader& r);
};

// ---------------------------------------------------------------------------
// Schedule arithmetic

/** Desired timestamp of block n: 600n on the beacon; 600m + 15n on a shard
 * whose genesis is beacon block m. */
int64_t desired_timestamp(const ProtocolParams& p, ChainKind kind, uint64_t bc_genesis_index, uint64_t n);

/** Mining epoch of a block by height (block number; genesis = 0, epoch 1). */
uint64_t mining_epoch(const ProtocolParams& p, ChainKind kind, uint64_t bc_genesis_index, uint64_t height);

// ---------------------------------------------------------------------------
// Difficulty adjustment

struct EpochTimings {
    std::span<const int64_t> first_five; // timestamps of the first 5 epoch blocks
    std::span<const int64_t> last_five;  // timestamps of the last 5 epoch blocks
    int64_t last_timestamp = 0;          // tau_n
    uint64_t last_height = 0;            // n (block number of the epoch's last block)
    uint32_t block_count = 0;            // N
};

struct Adjustment {
    Difficulty next_difficulty;
    Target next_target;
    int64_t t_next_num = 0; // next expected block time, seconds, as a fraction
    int64_t t_next_den = 1;
    bool degenerate = false; // non-monotone epoch, difficulty kept
};

/** One retarget step: estimates the epoch's average hash rate from the
 * median timestamps, picks the next block time (clamped to [0.8T, 1.2T])
 * and derives the next difficulty. The next target is rounded through the
 * compact encoding so headers commit exactly what verification recomputes. */
Adjustment adjust_difficulty(const EpochTimings& epoch, Difficulty prev_difficulty, const ProtocolParams& p,
                             ChainKind kind, uint64_t bc_genesis_index, DaaMode mode);

// ---------------------------------------------------------------------------
// Timestamp validation

enum class TimestampVerdict { Accept, RejectMedianPast, RejectTooFarInFuture };

/** prev_timestamps: most recent last; fewer than the window uses all
 * available. peer_median absent skips the future check (cold replay). */
TimestampVerdict validate_timestamp(std::span<const int64_t> prev_timestamps, uint32_t mpt_window,
                                    int64_t future_window, int64_t timestamp,
                                    std::optional<int64_t> peer_median);

/** Median-past-time over the most recent `window` entries. */
int64_t median_past_time(std::span<const int64_t> prev_timestamps, uint32_t window);

// ---------------------------------------------------------------------------
// Coin-creation management

/** lambda = exp(ln(0.8)/144). Adjustment coefficients are exact powers of
 * lambda, tracked by integer exponent: k_1 = lambda^12, and each epoch either
 * keeps the exponent or lowers it by 2 (raising k), absorbing at 0 (k = 1). */
extern const double kLambda;

/** The paper's case rule with the conservative middle band: returns k_prev
 * unless the pre-epoch share (D_total - D_epoch)/D_total reached
 * lambda^2 * k_prev^(3/2) and k_prev < 1, in which case k grows by
 * lambda^-2 (capped at 1). k_prev = 1 is absorbing. */
double next_coefficient(double k_prev, double d_total, double d_epoch);

/** Exponent form of the same rule (e maps to k = lambda^e, e >= 0). */
int next_coefficient_exponent(int e_prev, double d_total, double d_epoch);

class CoefficientTracker {
public:
    /** Closes mining epoch i (1-based, in order) with its aggregate beacon
     * difficulty. Epoch 1's coefficient is pinned at lambda^12. */
    void close_epoch(Difficulty epoch_aggregate);
    void reopen_last_epoch(); // rollback support

    size_t closed_epochs() const { return exponents_.size(); }
    double k(size_t i) const; // k_i, 1-based; i must be closed
    int exponent(size_t i) const { return exponents_.at(i - 1); }

    /** Product over i = 1..m-1 of k_i as a lambda exponent; epochs beyond the
     * closed horizon repeat the last known exponent. */
    int64_t reward_exponent(uint64_t epoch_m) const;

    const std::vector<Difficulty>& epoch_aggregates() const { return aggregates_; }

private:
    std::vector<int> exponents_;
    std::vector<Difficulty> aggregates_;
    Difficulty total_;
};

/** Block reward in 2^-48-coin quanta: D * lambda^reward_exponent / mm_number,
 * rounded to the nearest quantum. */
uint64_t block_reward_quanta(Difficulty difficulty, uint32_t mm_number, int64_t reward_exponent);

/** Relative supply growth between two heights: supply(m)/supply(n) - 1.
 * Throws std::invalid_argument when supply_n is zero. */
double monetary_creation(uint64_t supply_n_quanta, uint64_t supply_m_quanta);

// ---------------------------------------------------------------------------
// Genesis construction

BCHeader make_bc_genesis(uint32_t initial_shards, uint32_t bits, int64_t timestamp = 0);
SCHeader make_sc_genesis(const Hash256& bc_ref_hash, uint32_t bits, uint64_t bc_genesis_index,
                         const ProtocolParams& p);

// ---------------------------------------------------------------------------
// Per-chain state

struct ChainConfig {
    ChainKind kind = ChainKind::Beacon;
    uint32_t chain_id = 0;            // 0 = beacon, shards 1..N
    uint64_t bc_genesis_index = 0;    // shard genesis anchor on the beacon
    Difficulty genesis_difficulty;    // also the first epoch's difficulty
};

/** Linear per-chain state: compact block records, the weighted MMR, supply
 * ledger, difficulty epochs, and (on the beacon) mining-epoch coefficients.
 * Owned single-threaded; copies act as snapshots. */
class ChainState {
public:
    struct BlockRec {
        Hash256 hash; // header hash
        int64_t timestamp = 0;
        Difficulty difficulty;
        uint64_t reward_quanta = 0;
        uint32_t miner = 0;
        uint32_t mm_number = 0;    // shard blocks
        uint32_t shard_count = 0;  // beacon blocks
        bool vote = false;         // beacon blocks
    };

    ChainState(const ChainConfig& cfg, const ProtocolParams& params);

    const ChainConfig& config() const { return cfg_; }
    uint64_t block_count() const { return blocks_.size(); }
    uint64_t tip_height() const { return blocks_.size() - 1; }
    const BlockRec& block(uint64_t height) const { return blocks_.at(height); }
    const BlockRec& tip() const { return blocks_.back(); }

    /** Required target/difficulty for the block at the given height. */
    Target required_target(uint64_t height) const;
    Difficulty required_difficulty(uint64_t height) const;

    /** MMR root over blocks 0..height (prev_commitment of block height+1).
     * Heights older than the snapshot window are unavailable. */
    Hash256 mmr_root_at(uint64_t height) const;
    Hash256 mmr_root() const { return mmr_.root(); }
    Weight total_weight() const { return mmr_.total_weight(); }
    Weight weight_at(uint64_t height) const;

    uint64_t supply_quanta() const { return supply_; }

    std::vector<int64_t> recent_timestamps(uint32_t window, uint64_t up_to_height) const;

    /** Appends a verified block. mmr_leaf_hash is the chain's MMR leaf for
     * this block (H(header) on the beacon, H(ser(SC header) || container
     * hash) on shards). Closes difficulty and mining epochs as needed. */
    void append_block(const BlockRec& rec, const Hash256& mmr_leaf_hash);

    /** Drops blocks above new_tip_height. Throws if the MMR snapshot window
     * cannot reach back that far. */
    void rollback(uint64_t new_tip_height);

    const CoefficientTracker& coefficients() const { return coeffs_; }
    /** Difficulties of the latest fully completed difficulty epoch (Rule 1
     * window); falls back to everything available during the first epoch. */
    std::vector<Difficulty> rule1_window() const;

    std::optional<uint64_t> height_of(const Hash256& block_hash) const; // recent blocks only

    std::string stats_json() const; // per-epoch records: height, supply, k, difficulty, timestamp

    DaaMode daa_mode() const { return daa_mode_; }
    void set_daa_mode(DaaMode m) { daa_mode_ = m; }

private:
    void close_difficulty_epoch();
    ChainConfig cfg_;
    const ProtocolParams* params_;
    DaaMode daa_mode_;
    std::vector<BlockRec> blocks_;
    WeightedMmr mmr_;
    std::deque<WeightedMmr> mmr_snapshots_; // mmr after each recent block
    uint64_t snapshot_base_ = 0;            // height of mmr_snapshots_.front()
    std::vector<std::pair<Target, Difficulty>> epoch_targets_; // per difficulty epoch
    uint64_t supply_ = 0;
    CoefficientTracker coeffs_;       // beacon only
    Difficulty open_epoch_aggregate_; // beacon only
    std::map<Hash256, uint64_t> recent_hashes_; // recent block hash -> height
    static constexpr size_t kSnapshotWindow = 512;
};

} // namespace shardpow

#endif // SHARDPOW_CHAIN_H
