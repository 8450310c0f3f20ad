#pragma once

// Sandwich-pattern detection over decoded swap-event datasets: atomic
// arbitrage pre-filtering, per-(chain, block, pool) partitioning, actor
// attribution through shared entrypoints, triple matching, and the
// economic-consistency metrics (strong signatures, PnL decomposition,
// per-chain summary tables, bot efficiency).

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sandwich/amm.hpp"

namespace sandwich::detect {

struct SwapEvent {
    std::string chain;
    long long block_number = 0;
    std::string tx_hash;
    long tx_index = 0;
    long log_index = 0;  // order of legs inside one transaction
    std::string pool_address;
    bool router_pool = false;   // router-style venue: events carry the pair
    std::string currency_pair;  // "TOKA/TOKB", required when router_pool
    std::string tx_from;
    std::string tx_to;
    std::string taker;  // diagnostic only; attribution ignores it
    amm::Direction direction = amm::Direction::x_to_y;
    double amount_in_usd = 0.0;
    double amount_out_usd = 0.0;
    std::optional<double> gas_cost_usd;

    void validate() const;
};

struct ActorRegistry {
    std::set<std::string> system_contracts;
    std::set<std::string> shared_routers;

    bool is_shared_entrypoint(const std::string& address) const;
};

// tx_from when the callee is shared infrastructure, tx_to otherwise.
std::string resolve_actor_id(const SwapEvent& event, const ActorRegistry& registry);

// Drops every transaction whose swap legs contain a directed token cycle
// (output of one leg feeding back around to an earlier input). Removed tx
// hashes are appended to removed_txs when given.
std::vector<SwapEvent> filter_atomic_arbitrage(const std::vector<SwapEvent>& events,
                                               std::vector<std::string>* removed_txs = nullptr);

struct GroupKey {
    std::string chain;
    long long block_number = 0;
    std::string pool_address;
    std::string currency_pair;  // empty unless the pool is router-style

    auto operator<=>(const GroupKey&) const = default;
};

// Groups by (chain, block, pool[, currency pair for router pools]), each
// group sorted by (tx_index, log_index).
std::map<GroupKey, std::vector<SwapEvent>> partition(const std::vector<SwapEvent>& events);

struct PnlBreakdown {
    double gross = 0.0;
    double net_slippage = 0.0;
    double net = 0.0;
};

struct TripleMetrics {
    std::optional<double> back_front_ratio;  // empty when the front size is 0
    bool strong_signature = false;
    std::optional<PnlBreakdown> pnl;  // empty without pool context
};

struct CandidateTriple {
    SwapEvent front;
    std::vector<SwapEvent> victims;  // ordered, non-empty
    SwapEvent back;
    std::string actor_id;
    TripleMetrics metrics;

    double victim_total_usd() const;
};

// Matches triples within one sorted group: each reverse-direction swap
// pairs with the nearest preceding same-actor forward swap, victims are the
// other-actor forward swaps in between, and no event fronts or backs more
// than one triple.
std::vector<CandidateTriple> find_triples(const std::vector<SwapEvent>& group,
                                          const ActorRegistry& registry);

// Back size within `tolerance` (relative) of the front size.
bool strong_signature(const CandidateTriple& triple, double tolerance = 0.10);

struct PoolContext {
    double depth = 0.0;  // active-tick liquidity, USD
    double fee = 0.0;
    int tick_width = 1;
};

// Gross captures the victims' price impact on the frontrun notional,
// net_slippage removes the attacker's own quadratic impact, net further
// removes fees and gas.
PnlBreakdown triple_pnl(const CandidateTriple& triple, const PoolContext& context,
                        double gas_cost);

struct ChainSummary {
    std::string chain;
    long count = 0;
    std::optional<double> front_median, victim_median, back_median;
    std::optional<double> front_q1, front_q3, victim_q1, victim_q3, back_q1, back_q3;
    std::optional<double> strong_signature_share;
    std::optional<double> ratio_median, ratio_q1, ratio_q3;
    std::optional<double> corr_victim_front, corr_victim_back, corr_front_back;
    std::optional<double> pnl_gross_median, pnl_gross_q1, pnl_gross_q3;
    std::optional<double> pnl_net_slippage_median, pnl_net_slippage_q1, pnl_net_slippage_q3;
    std::optional<double> pnl_net_median, pnl_net_q1, pnl_net_q3;
};

// Per-chain medians/IQRs of leg sizes (victim size is the summed victim
// input), strong-signature share, back/front ratio stats, Pearson
// correlations, and PnL stats over the triples that carry PnL. Chains named
// in `chains` appear even when they have no triples (zero-count rows).
std::vector<ChainSummary> summary_stats(const std::vector<CandidateTriple>& triples,
                                        const std::vector<std::string>& chains = {});

struct ActorActivity {
    std::string chain;
    std::string actor_id;
    double total_tx = 0.0;
    double days = 1.0;
};

struct EfficiencyRecord {
    std::string chain;
    std::string actor_id;
    long sandwich_count = 0;
    std::optional<double> total_tx;  // empty when the actor is missing from activity data
    std::optional<double> avg_daily_tx;
    std::optional<double> efficiency;  // sandwiches / total transactions
};

struct ChainBotSummary {
    std::string chain;
    long bot_count = 0;
    long sandwich_min = 0, sandwich_max = 0;
    double sandwich_median = 0.0;
    std::optional<double> daily_tx_min, daily_tx_median, daily_tx_max;
};

struct EfficiencyReport {
    std::vector<EfficiencyRecord> actors;
    std::vector<ChainBotSummary> chains;
};

EfficiencyReport bot_efficiency(const std::vector<CandidateTriple>& triples,
                                const std::vector<ActorActivity>& activity);

struct SnapshotEntry {
    std::string chain;
    std::string pool_address;
    long long block_start = 0;
    long long block_end = 0;  // inclusive
    PoolContext context;
};

struct DetectOptions {
    double strong_signature_tolerance = 0.10;
    double default_gas_cost = 0.45;  // per triple when legs carry no gas
};

struct DetectResult {
    std::vector<CandidateTriple> triples;
    std::vector<std::string> removed_arbitrage_txs;
    std::vector<std::string> warnings;
};

// Full pipeline: validate, pre-filter arbitrage, partition, attribute,
// match, and enrich with metrics. Output order is canonical regardless of
// input permutation.
DetectResult run_detection(std::vector<SwapEvent> events, const ActorRegistry& registry,
                           const std::vector<SnapshotEntry>& snapshots,
                           const DetectOptions& options = {});

}  // namespace sandwich::detect
