#include "sandwich/detect.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "sandwich/stats.hpp"

namespace sandwich::detect {

namespace {

std::pair<std::string, std::string> leg_tokens(const SwapEvent& e) {
    std::string token_x;
    std::string token_y;
    const auto slash = e.currency_pair.find('/');
    if (slash != std::string::npos && slash > 0 && slash + 1 < e.currency_pair.size()) {
        token_x = e.currency_pair.substr(0, slash);
        token_y = e.currency_pair.substr(slash + 1);
    } else {
        // Without token names a pool still defines a two-sided venue, which
        // is enough to recognise same-pool round trips.
        token_x = e.pool_address + "#x";
        token_y = e.pool_address + "#y";
    }
    if (e.direction == amm::Direction::x_to_y) return {token_x, token_y};
    return {token_y, token_x};
}

// Directed-cycle test over the legs' token graph (DFS three-colour).
bool has_token_cycle(const std::vector<const SwapEvent*>& legs) {
    std::unordered_map<std::string, std::vector<std::string>> adjacency;
    for (const SwapEvent* leg : legs) {
        auto [in_token, out_token] = leg_tokens(*leg);
        adjacency[in_token].push_back(out_token);
        adjacency.try_emplace(out_token);
    }
    std::unordered_map<std::string, int> colour;  // 0 white, 1 grey, 2 black
    std::vector<std::pair<std::string, size_t>> stack;
    for (const auto& [start, _] : adjacency) {
        if (colour[start] != 0) continue;
        stack.emplace_back(start, 0);
        colour[start] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            const auto& edges = adjacency[node];
            if (next < edges.size()) {
                const std::string& to = edges[next++];
                if (colour[to] == 1) return true;
                if (colour[to] == 0) {
                    colour[to] = 1;
                    stack.emplace_back(to, 0);
                }
            } else {
                colour[node] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

std::tuple<const std::string&, long long, const std::string&, const std::string&, long, long,
           const std::string&>
event_sort_key(const SwapEvent& e) {
    return {e.chain, e.block_number, e.pool_address, e.currency_pair, e.tx_index, e.log_index,
            e.tx_hash};
}

std::optional<PoolContext> lookup_context(const std::vector<SnapshotEntry>& snapshots,
                                          const SwapEvent& front) {
    for (const SnapshotEntry& s : snapshots) {
        if (!s.chain.empty() && s.chain != front.chain) continue;
        if (s.pool_address != front.pool_address) continue;
        if (front.block_number < s.block_start || front.block_number > s.block_end) continue;
        return s.context;
    }
    return std::nullopt;
}

std::optional<double> opt_quantile(const std::vector<double>& xs, double p) {
    if (xs.empty()) return std::nullopt;
    return stats::quantile(xs, p);
}

}  // namespace

void SwapEvent::validate() const {
    if (chain.empty()) throw ValidationError("event missing chain");
    if (tx_hash.empty()) throw ValidationError("event missing tx_hash");
    if (pool_address.empty()) throw ValidationError("event missing pool_address");
    if (!std::isfinite(amount_in_usd) || amount_in_usd < 0.0) {
        throw ValidationError("amount_in_usd must be finite and non-negative");
    }
    if (!std::isfinite(amount_out_usd) || amount_out_usd < 0.0) {
        throw ValidationError("amount_out_usd must be finite and non-negative");
    }
    if (gas_cost_usd && (!std::isfinite(*gas_cost_usd) || *gas_cost_usd < 0.0)) {
        throw ValidationError("gas_cost_usd must be finite and non-negative");
    }
    if (router_pool && currency_pair.empty()) {
        throw ValidationError("router-style pool events need a currency_pair");
    }
}

bool ActorRegistry::is_shared_entrypoint(const std::string& address) const {
    return system_contracts.count(address) > 0 || shared_routers.count(address) > 0;
}

std::string resolve_actor_id(const SwapEvent& event, const ActorRegistry& registry) {
    if (event.tx_to.empty()) {
        throw AttributionError("event " + event.tx_hash + " has no tx_to");
    }
    if (registry.is_shared_entrypoint(event.tx_to)) {
        if (event.tx_from.empty()) {
            throw AttributionError("event " + event.tx_hash +
                                   " routed through shared infrastructure has no tx_from");
        }
        return event.tx_from;
    }
    return event.tx_to;
}

std::vector<SwapEvent> filter_atomic_arbitrage(const std::vector<SwapEvent>& events,
                                               std::vector<std::string>* removed_txs) {
    std::map<std::pair<std::string, std::string>, std::vector<const SwapEvent*>> by_tx;
    for (const SwapEvent& e : events) {
        by_tx[{e.chain, e.tx_hash}].push_back(&e);
    }
    std::set<std::pair<std::string, std::string>> cyclic;
    for (const auto& [key, legs] : by_tx) {
        if (legs.size() >= 2 && has_token_cycle(legs)) {
            cyclic.insert(key);
            if (removed_txs) removed_txs->push_back(key.second);
        }
    }
    std::vector<SwapEvent> kept;
    kept.reserve(events.size());
    for (const SwapEvent& e : events) {
        if (!cyclic.count({e.chain, e.tx_hash})) kept.push_back(e);
    }
    return kept;
}

std::map<GroupKey, std::vector<SwapEvent>> partition(const std::vector<SwapEvent>& events) {
    std::map<GroupKey, std::vector<SwapEvent>> groups;
    for (const SwapEvent& e : events) {
        GroupKey key{e.chain, e.block_number, e.pool_address,
                     e.router_pool ? e.currency_pair : std::string{}};
        groups[key].push_back(e);
    }
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(), [](const SwapEvent& a, const SwapEvent& b) {
            return event_sort_key(a) < event_sort_key(b);
        });
    }
    return groups;
}

double CandidateTriple::victim_total_usd() const {
    double total = 0.0;
    for (const SwapEvent& v : victims) total += v.amount_in_usd;
    return total;
}

std::vector<CandidateTriple> find_triples(const std::vector<SwapEvent>& group,
                                          const ActorRegistry& registry) {
    const size_t n = group.size();
    std::vector<CandidateTriple> out;
    if (n < 3) return out;

    std::vector<std::string> actor(n);
    std::vector<char> resolvable(n, 1);
    for (size_t i = 0; i < n; ++i) {
        try {
            actor[i] = resolve_actor_id(group[i], registry);
        } catch (const AttributionError&) {
            resolvable[i] = 0;
        }
    }

    std::vector<char> used(n, 0);  // consumed as front or back
    for (size_t j = 0; j < n; ++j) {
        if (!resolvable[j] || used[j]) continue;
        const amm::Direction back_dir = group[j].direction;
        const amm::Direction forward = amm::reverse(back_dir);

        // Nearest preceding same-actor forward swap; an intervening one that
        // is already consumed blocks the pairing.
        size_t front_idx = n;
        for (size_t i = j; i-- > 0;) {
            if (!resolvable[i] || actor[i] != actor[j]) continue;
            if (group[i].direction == forward) {
                front_idx = i;
                break;
            }
        }
        if (front_idx == n || used[front_idx]) continue;
        if (group[front_idx].tx_index >= group[j].tx_index) continue;

        std::vector<SwapEvent> victims;
        for (size_t k = front_idx + 1; k < j; ++k) {
            if (!resolvable[k]) continue;  // unattributable events are excluded
            if (actor[k] == actor[j]) continue;
            if (group[k].direction != forward) continue;
            if (group[k].tx_index <= group[front_idx].tx_index ||
                group[k].tx_index >= group[j].tx_index) {
                continue;
            }
            victims.push_back(group[k]);
        }
        if (victims.empty()) continue;

        CandidateTriple triple;
        triple.front = group[front_idx];
        triple.victims = std::move(victims);
        triple.back = group[j];
        triple.actor_id = actor[j];
        out.push_back(std::move(triple));
        used[front_idx] = 1;
        used[j] = 1;
    }
    return out;
}

bool strong_signature(const CandidateTriple& triple, double tolerance) {
    const double front = triple.front.amount_in_usd;
    if (front <= 0.0) return false;  // undefined ratio
    return std::abs(triple.back.amount_in_usd - front) / front <= tolerance;
}

PnlBreakdown triple_pnl(const CandidateTriple& triple, const PoolContext& context,
                        double gas_cost) {
    if (!std::isfinite(context.depth) || context.depth <= 0.0) {
        throw InvalidDepth("pool context depth must be positive");
    }
    const double keep = 1.0 - context.fee;
    const double eps = std::pow(1.0001, context.tick_width) - 1.0;
    const double v_f = triple.front.amount_in_usd;
    const double victim_total = triple.victim_total_usd();
    const double unit = keep * keep * eps / context.depth;
    PnlBreakdown pnl;
    pnl.gross = unit * v_f * victim_total;
    pnl.net_slippage = pnl.gross - unit * v_f * v_f;
    pnl.net = pnl.net_slippage - 2.0 * v_f * context.fee - gas_cost;
    return pnl;
}

std::vector<ChainSummary> summary_stats(const std::vector<CandidateTriple>& triples,
                                        const std::vector<std::string>& chains) {
    std::map<std::string, std::vector<const CandidateTriple*>> by_chain;
    for (const std::string& c : chains) by_chain[c];
    for (const CandidateTriple& t : triples) by_chain[t.front.chain].push_back(&t);

    std::vector<ChainSummary> rows;
    for (const auto& [chain, members] : by_chain) {
        ChainSummary row;
        row.chain = chain;
        row.count = static_cast<long>(members.size());
        if (members.empty()) {
            rows.push_back(row);
            continue;
        }
        std::vector<double> fronts, victims, backs, ratios, gross, net_slip, net;
        long strong = 0;
        for (const CandidateTriple* t : members) {
            fronts.push_back(t->front.amount_in_usd);
            victims.push_back(t->victim_total_usd());
            backs.push_back(t->back.amount_in_usd);
            if (t->metrics.back_front_ratio) ratios.push_back(*t->metrics.back_front_ratio);
            if (t->metrics.strong_signature) ++strong;
            if (t->metrics.pnl) {
                gross.push_back(t->metrics.pnl->gross);
                net_slip.push_back(t->metrics.pnl->net_slippage);
                net.push_back(t->metrics.pnl->net);
            }
        }
        row.front_median = opt_quantile(fronts, 0.5);
        row.front_q1 = opt_quantile(fronts, 0.25);
        row.front_q3 = opt_quantile(fronts, 0.75);
        row.victim_median = opt_quantile(victims, 0.5);
        row.victim_q1 = opt_quantile(victims, 0.25);
        row.victim_q3 = opt_quantile(victims, 0.75);
        row.back_median = opt_quantile(backs, 0.5);
        row.back_q1 = opt_quantile(backs, 0.25);
        row.back_q3 = opt_quantile(backs, 0.75);
        row.strong_signature_share = static_cast<double>(strong) / static_cast<double>(members.size());
        row.ratio_median = opt_quantile(ratios, 0.5);
        row.ratio_q1 = opt_quantile(ratios, 0.25);
        row.ratio_q3 = opt_quantile(ratios, 0.75);
        row.corr_victim_front = stats::pearson(victims, fronts);
        row.corr_victim_back = stats::pearson(victims, backs);
        row.corr_front_back = stats::pearson(fronts, backs);
        row.pnl_gross_median = opt_quantile(gross, 0.5);
        row.pnl_gross_q1 = opt_quantile(gross, 0.25);
        row.pnl_gross_q3 = opt_quantile(gross, 0.75);
        row.pnl_net_slippage_median = opt_quantile(net_slip, 0.5);
        row.pnl_net_slippage_q1 = opt_quantile(net_slip, 0.25);
        row.pnl_net_slippage_q3 = opt_quantile(net_slip, 0.75);
        row.pnl_net_median = opt_quantile(net, 0.5);
        row.pnl_net_q1 = opt_quantile(net, 0.25);
        row.pnl_net_q3 = opt_quantile(net, 0.75);
        rows.push_back(row);
    }
    return rows;
}

EfficiencyReport bot_efficiency(const std::vector<CandidateTriple>& triples,
                                const std::vector<ActorActivity>& activity) {
    std::map<std::pair<std::string, std::string>, long> sandwich_counts;
    for (const CandidateTriple& t : triples) {
        ++sandwich_counts[{t.front.chain, t.actor_id}];
    }
    std::map<std::pair<std::string, std::string>, const ActorActivity*> activity_index;
    for (const ActorActivity& a : activity) {
        activity_index.emplace(std::make_pair(a.chain, a.actor_id), &a);
    }

    // Actors in the activity data but without any matched triple still get
    // a record (zero sandwiches, zero efficiency); the per-chain bot
    // aggregates below cover actual initiators only.
    std::set<std::pair<std::string, std::string>> actors;
    for (const auto& [key, count] : sandwich_counts) actors.insert(key);
    for (const ActorActivity& a : activity) actors.insert({a.chain, a.actor_id});

    EfficiencyReport report;
    std::map<std::string, std::vector<double>> chain_sandwiches;
    std::map<std::string, std::vector<double>> chain_daily;
    for (const auto& key : actors) {
        EfficiencyRecord rec;
        rec.chain = key.first;
        rec.actor_id = key.second;
        const auto counted = sandwich_counts.find(key);
        rec.sandwich_count = counted != sandwich_counts.end() ? counted->second : 0;
        auto it = activity_index.find(key);
        if (it != activity_index.end()) {
            const ActorActivity& a = *it->second;
            rec.total_tx = a.total_tx;
            if (a.days > 0.0) rec.avg_daily_tx = a.total_tx / a.days;
            if (a.total_tx > 0.0) {
                rec.efficiency = static_cast<double>(rec.sandwich_count) / a.total_tx;
            }
        }
        if (rec.sandwich_count > 0) {
            chain_sandwiches[rec.chain].push_back(static_cast<double>(rec.sandwich_count));
            if (rec.avg_daily_tx) chain_daily[rec.chain].push_back(*rec.avg_daily_tx);
        }
        report.actors.push_back(std::move(rec));
    }

    for (const auto& [chain, counts] : chain_sandwiches) {
        ChainBotSummary row;
        row.chain = chain;
        row.bot_count = static_cast<long>(counts.size());
        row.sandwich_min = static_cast<long>(*std::min_element(counts.begin(), counts.end()));
        row.sandwich_max = static_cast<long>(*std::max_element(counts.begin(), counts.end()));
        row.sandwich_median = stats::median(counts);
        const auto daily = chain_daily.find(chain);
        if (daily != chain_daily.end() && !daily->second.empty()) {
            row.daily_tx_min = *std::min_element(daily->second.begin(), daily->second.end());
            row.daily_tx_max = *std::max_element(daily->second.begin(), daily->second.end());
            row.daily_tx_median = stats::median(daily->second);
        }
        report.chains.push_back(row);
    }
    return report;
}

DetectResult run_detection(std::vector<SwapEvent> events, const ActorRegistry& registry,
                           const std::vector<SnapshotEntry>& snapshots,
                           const DetectOptions& options) {
    DetectResult result;

    std::vector<SwapEvent> valid;
    valid.reserve(events.size());
    for (SwapEvent& e : events) {
        try {
            e.validate();
            resolve_actor_id(e, registry);
        } catch (const Error& err) {
            result.warnings.push_back(std::string("skipping event: ") + err.what());
            continue;
        }
        valid.push_back(std::move(e));
    }

    std::sort(valid.begin(), valid.end(), [](const SwapEvent& a, const SwapEvent& b) {
        return event_sort_key(a) < event_sort_key(b);
    });

    const std::vector<SwapEvent> surviving =
        filter_atomic_arbitrage(valid, &result.removed_arbitrage_txs);

    for (const auto& [key, group] : partition(surviving)) {
        for (CandidateTriple& triple : find_triples(group, registry)) {
            const double front = triple.front.amount_in_usd;
            if (front > 0.0) {
                triple.metrics.back_front_ratio = triple.back.amount_in_usd / front;
            }
            triple.metrics.strong_signature =
                strong_signature(triple, options.strong_signature_tolerance);
            if (auto context = lookup_context(snapshots, triple.front)) {
                double gas = options.default_gas_cost;
                if (triple.front.gas_cost_usd && triple.back.gas_cost_usd) {
                    gas = *triple.front.gas_cost_usd + *triple.back.gas_cost_usd;
                }
                triple.metrics.pnl = triple_pnl(triple, *context, gas);
            }
            result.triples.push_back(std::move(triple));
        }
    }

    std::sort(result.triples.begin(), result.triples.end(),
              [](const CandidateTriple& a, const CandidateTriple& b) {
                  return event_sort_key(a.front) < event_sort_key(b.front);
              });
    return result;
}

}  // namespace sandwich::detect
