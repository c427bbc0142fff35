// Copyright (c) 2026 The shardpow developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef SHARDPOW_CONSENSUS_H
#define SHARDPOW_CONSENSUS_H

#include <map>
#include <optional>
#include <string>

#include "chain.h"
#include "shard_tree.h"

namespace shardpow {

/** step mirrors the shard verification list: 1 structure/size/timestamps,
 * 2 proof of work, 3 shard-count inequality / expansion rules, 4 body-to-
 * header linkage, 5 merged-mining proof, 6 transactions. Beacon blocks use
 * steps 1, 2, 3 and 6. Exactly the first failing step is reported. */
struct VerificationError {
    int step = 0;
    std::string detail;
};
using VerifyResult = std::optional<VerificationError>; // nullopt = ok

std::string verify_result_json(const VerifyResult& r);

/** Merkle root of a transaction list; the zero hash for an empty list. */
Hash256 tx_root(std::span<const Transaction> txs);

/** Scaled proof-of-work check. Analytic mode reads the nonce as the sampled
 * hash value; real-hash mode evaluates the mining hash over the container. */
bool proof_of_work_ok(const BCHeader& container, const Target& target, const ProtocolParams& p);

struct BeaconContext {
    const ChainState* chain = nullptr;
    uint32_t expected_shard_count = 1;
    std::optional<int64_t> peer_median_time;
};

struct ShardContext {
    const ChainState* chain = nullptr; // the shard's chain
    uint32_t shard_id = 0;             // 1-based network id
    uint32_t current_shard_count = 1;  // per the expansion protocol
    std::optional<int64_t> peer_median_time;
};

VerifyResult verify_bc_block(const BeaconContext& ctx, const BCHeader& header, const BCBody& body,
                             const ProtocolParams& p);
VerifyResult verify_sc_block(const ShardContext& ctx, const SCHeader& header, const SCBody& body,
                             const ProtocolParams& p);

// ---------------------------------------------------------------------------
// Shard expansion

constexpr uint32_t kVoteWindow = 1024;
constexpr uint32_t kVoteThreshold = 768; // strictly more ones than this
constexpr uint32_t kActivationDelay = 10;
constexpr uint32_t kExpansionTargetFactor = 80;

/** dN = max(1, 2^(ceil(log2 N) - 9)). */
uint32_t expansion_dn(uint32_t shard_count);

/** Window rule over the previous kVoteWindow blocks (newest last): more than
 * kVoteThreshold votes and a constant shard count. */
std::optional<uint32_t> expansion_check(std::span<const uint8_t> votes, std::span<const uint32_t> counts);

/** Evaluates the window ending at the parent of the block at `height`. */
std::optional<uint32_t> expansion_check(const ChainState& beacon, uint64_t height);

// ---------------------------------------------------------------------------
// Fork choice

/** Index of the heaviest tip; first-seen (lowest index) wins ties. */
size_t fork_choice(std::span<const Weight> tip_weights);

// ---------------------------------------------------------------------------
// Network state: beacon + shards + expansion bookkeeping

struct ExpansionEvent {
    uint64_t trigger_height = 0; // first beacon block carrying the raised count
    uint32_t previous_count = 0;
    uint32_t new_count = 0;
};

class NetworkState {
public:
    NetworkState(const ProtocolParams& params, uint32_t initial_shards, Difficulty genesis_difficulty);

    const ProtocolParams& params() const { return *params_; }
    ChainState& beacon() { return beacon_; }
    const ChainState& beacon() const { return beacon_; }
    ChainState& shard(uint32_t id) { return shards_.at(id); }
    const ChainState& shard(uint32_t id) const { return shards_.at(id); }
    bool has_shard(uint32_t id) const { return shards_.count(id) != 0; }

    uint32_t current_shard_count() const { return beacon_.tip().shard_count; }
    /** Count the next beacon block must carry (applies the vote rule). */
    uint32_t expected_shard_count_next() const;
    /** Shards that may be merge-mined right now. */
    std::vector<uint32_t> active_shards() const;

    const BCHeader& bc_genesis_header() const { return bc_genesis_; }
    const SCHeader& sc_genesis_header(uint32_t id) const { return sc_genesis_.at(id); }
    const std::vector<ExpansionEvent>& expansions() const { return expansions_; }

    /** Verify-and-append. On success the record lands on the chain and any
     * expansion bookkeeping runs. miner is sim bookkeeping (0 on replay). */
    VerifyResult submit_bc_block(const BCHeader& header, const BCBody& body, uint32_t miner,
                                 std::optional<int64_t> peer_median_time);
    VerifyResult submit_sc_block(uint32_t shard_id, const SCHeader& header, const SCBody& body, uint32_t miner,
                                 std::optional<int64_t> peer_median_time);

    /** Rollback for fork resolution. Beacon rollbacks across a shard-creation
     * boundary are refused (returns false). */
    bool rollback_beacon(uint64_t new_tip_height);
    void rollback_shard(uint32_t id, uint64_t new_tip_height);

private:
    void maybe_create_shards();
    const ProtocolParams* params_;
    ChainState beacon_;
    std::map<uint32_t, ChainState> shards_;
    BCHeader bc_genesis_;
    std::map<uint32_t, SCHeader> sc_genesis_;
    std::map<uint32_t, uint64_t> mineable_from_; // shard id -> beacon height gate
    std::vector<ExpansionEvent> expansions_;
    uint64_t last_creation_height_ = 0;
};

// ---------------------------------------------------------------------------
// Chain files: canonical binary block streams

struct BeaconChainFile {
    ProtocolParams params;
    uint32_t initial_shards = 1;
    Difficulty genesis_difficulty;
    std::vector<std::pair<BCHeader, BCBody>> blocks; // heights 1..n

    void save(Writer& w) const;
    static BeaconChainFile load(Reader& r);
};

struct ShardChainFile {
    ProtocolParams params;
    uint32_t shard_id = 1;
    uint64_t bc_genesis_index = 0;
    Hash256 genesis_prev;
    uint32_t genesis_bits = 0;
    std::vector<std::pair<uint64_t, uint32_t>> count_schedule; // (first sc height, network count)
    std::vector<std::pair<SCHeader, SCBody>> blocks;           // heights 1..n

    uint32_t count_at(uint64_t height) const;
    void save(Writer& w) const;
    static ShardChainFile load(Reader& r);
};

enum class ChainFileKind : uint8_t { Beacon = 0, Shard = 1 };

struct ChainFileInfo {
    ChainFileKind kind;
    uint32_t shard_id;
    uint64_t block_count;
};

void save_chain_file(const std::string& path, const BeaconChainFile& f);
void save_chain_file(const std::string& path, const ShardChainFile& f);
ChainFileInfo peek_chain_file(const std::string& path);

struct ReplayFailure {
    uint64_t height;
    int step;
    std::string detail;
};

struct ReplayReport {
    ChainFileKind kind = ChainFileKind::Beacon;
    uint32_t shard_id = 0;
    uint64_t blocks_checked = 0;
    std::vector<ReplayFailure> failures;
    bool ok() const { return failures.empty(); }
    std::string to_json() const;
};

/** Cold replay of an exported chain: rebuilds the chain from genesis and
 * verifies every block. Throws DeserializeError on malformed files. */
ReplayReport replay_chain_file(const std::string& path);

} // namespace shardpow

#endif // SHARDPOW_CONSENSUS_H
