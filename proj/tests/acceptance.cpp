// Acceptance suite: one check per shipped guarantee, each printing a
// single [PASS]/[FAIL] line. Run `acceptance` for all or `acceptance N`
// for one criterion; the exit code reflects failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sandwich/detect.hpp"
#include "sandwich/econ.hpp"
#include "sandwich/io.hpp"
#include "sandwich/seq.hpp"
#include "sandwich/stats.hpp"

using namespace sandwich;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

// ---- 1: half-rule ---------------------------------------------------------

Outcome half_rule() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int within = 0;
    const int trials = 50;
    for (int i = 0; i < trials; ++i) {
        const double depth = 1e5 * std::pow(10.0, 2.0 * u(rng));
        const double alpha = 1e-4 * std::pow(10.0, u(rng));  // up to 1e-3
        const double victim = alpha * depth;
        const amm::CpmmPool pool{depth, depth * (0.5 + u(rng)), 0.0};

        const double step = victim / 2000.0;
        double best_profit = -1e300;
        double best_size = 0.0;
        for (int g = 0; g <= 2000; ++g) {
            const double size = step * static_cast<double>(g);
            const double profit = econ::exact_sandwich_profit(pool, size, victim, 0.0, 0.0);
            if (profit > best_profit) {
                best_profit = profit;
                best_size = size;
            }
        }
        const double deviation = std::abs(best_size - victim / 2.0) / (victim / 2.0);
        worst = std::max(worst, deviation);
        if (deviation <= 0.01) ++within;
    }

    const double elapsed = seconds_since(start);
    Outcome out;
    out.passed = within == trials && elapsed < 10.0;
    std::ostringstream detail;
    detail << within << "/" << trials << " scenarios within 1% of half the victim size, worst "
              "deviation "
           << fmt(worst) << ", " << fmt(elapsed) << " s";
    if (!out.passed && worst > 0.5) {
        detail << "; exact replay profit rises monotonically in the frontrun, the grid argmax "
                  "sits at the victim size (quadratic-model optimum not reproduced; see README "
                  "model notes)";
    }
    out.detail = detail.str();
    return out;
}

// ---- 2: tick-gap case analysis --------------------------------------------

Outcome gap_cases() {
    const auto start = std::chrono::steady_clock::now();
    auto make_pool = [](double liq0, double liq1) {
        amm::ClmmPool pool;
        pool.tick_boundaries = {1.0, 1.0201, 1.1025};
        pool.tick_liquidity = {liq0, liq1};
        pool.sqrt_price = 1.0;
        pool.fee = 0.0;
        return pool;
    };
    econ::SandwichScenario scenario;
    scenario.victim_input = 30000.0;
    scenario.depth = 5e6;
    scenario.fee = 0.0;

    const amm::ClmmPool thin = make_pool(5e6, 5e5);
    const econ::AttackPlan thin_plan = econ::optimal_frontrun_clmm(thin, scenario);
    const double gap_profit = econ::exact_sandwich_profit(
        thin, thin_plan.frontrun_size, scenario.victim_input, 0.0, 0.0);
    const double in_tick_profit = econ::exact_sandwich_profit(
        thin, scenario.victim_input / 2.0, scenario.victim_input, 0.0, 0.0);
    const bool thin_ok =
        thin_plan.regime == econ::Regime::gap_crossing && gap_profit > in_tick_profit;

    const amm::ClmmPool uniform = make_pool(5e6, 5e6);
    const econ::AttackPlan uniform_plan = econ::optimal_frontrun_clmm(uniform, scenario);
    const bool uniform_ok =
        uniform_plan.regime == econ::Regime::in_tick &&
        std::abs(uniform_plan.frontrun_size - scenario.victim_input / 2.0) < 1e-9;

    econ::SandwichScenario capped = scenario;
    capped.frontrun_cap = 9000.0;
    const econ::AttackPlan capped_plan = econ::optimal_frontrun_clmm(uniform, capped);
    const bool capped_ok = capped_plan.frontrun_size == 9000.0;

    const double elapsed = seconds_since(start);
    Outcome out;
    out.passed = thin_ok && uniform_ok && capped_ok && elapsed < 5.0;
    std::ostringstream detail;
    detail << "thin tick: regime " << econ::to_string(thin_plan.regime) << ", gap profit "
           << fmt(gap_profit) << " vs in-tick " << fmt(in_tick_profit)
           << "; uniform: frontrun " << fmt(uniform_plan.frontrun_size) << "; capped: "
           << fmt(capped_plan.frontrun_size) << "; " << fmt(elapsed) << " s";
    out.detail = detail.str();
    return out;
}

// ---- 3: approximation-error scaling ----------------------------------------

Outcome error_scaling() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int in_band = 0;
    const int trials = 20;
    double lo_seen = 1e300;
    double hi_seen = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double depth = 1e5 * std::pow(10.0, 2.0 * u(rng));
        const double victim = depth * (1e-3 + 9e-3 * u(rng));
        const double front = victim * (0.3 + 0.4 * u(rng));
        const amm::CpmmPool pool{depth, depth, 0.0};
        auto gap = [&](double scale) {
            const double quad =
                econ::incremental_profit_quadratic(front * scale, victim * scale, 0.0, depth);
            const double oracle =
                econ::exact_sandwich_profit(pool, front * scale, victim * scale, 0.0, 0.0);
            return std::abs(quad - oracle);
        };
        const double ratio = gap(1.0) / gap(0.5);
        lo_seen = std::min(lo_seen, ratio);
        hi_seen = std::max(hi_seen, ratio);
        if (ratio >= 6.0 && ratio <= 10.0) ++in_band;
    }
    Outcome out;
    out.passed = in_band == trials;
    std::ostringstream detail;
    detail << in_band << "/" << trials << " halvings shrink |quadratic - replay| by a factor in "
              "[6, 10]; observed ["
           << fmt(lo_seen) << ", " << fmt(hi_seen) << "]";
    if (!out.passed && hi_seen < 5.0) {
        detail << "; the gap scales quadratically (factor ~4), the quadratic model and the "
                  "replay disagree at second order (see README model notes)";
    }
    out.detail = detail.str();
    return out;
}

// ---- 4: co-inclusion feasibility band --------------------------------------

Outcome feasibility_band() {
    int central = 0;
    int inside = 0;
    double lo = 1.0;
    double hi = 0.0;
    for (const seq::SweepRow& row : seq::central_parameter_sweep()) {
        if (!row.central) continue;
        ++central;
        const double p = row.report.p_co_inclusion;
        lo = std::min(lo, p);
        hi = std::max(hi, p);
        if (p >= 0.05 && p <= 0.20) ++inside;
    }
    Outcome out;
    out.passed = central > 0 && inside == central;
    std::ostringstream detail;
    detail << inside << "/" << central << " central configurations in [0.05, 0.20], range ["
           << fmt(lo) << ", " << fmt(hi) << "]";
    out.detail = detail.str();
    return out;
}

// ---- 5: Monte Carlo agreement ----------------------------------------------

std::string serialize_report(const seq::CoInclusionReport& r) {
    char buffer[200];
    std::snprintf(buffer, sizeof(buffer), "%.17g|%.17g|%.17g|%.17g|%.17g|%s", r.p_batch,
                  r.p_priority, r.p_arrival, r.p_co_inclusion, r.std_error, r.method.c_str());
    return buffer;
}

Outcome monte_carlo_agreement() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const long trials = 100000;
    int agreements = 0;
    int checks = 0;
    bool deterministic = true;

    auto run_case = [&](const seq::AttackerStrategy& st, const seq::SequencerConfig& cfg,
                        std::uint64_t seed) {
        const seq::CoInclusionReport analytic = seq::co_inclusion(st, cfg);
        const seq::CoInclusionReport mc = seq::simulate_co_inclusion(st, cfg, trials, seed, 2);
        const seq::CoInclusionReport again = seq::simulate_co_inclusion(st, cfg, trials, seed, 4);
        if (serialize_report(mc) != serialize_report(again)) deterministic = false;
        ++checks;
        if (std::abs(mc.p_co_inclusion - analytic.p_co_inclusion) <= 3.0 * mc.std_error) {
            ++agreements;
        }
    };

    for (int i = 0; i < 10; ++i) {  // FCFS draws with a non-negligible analytic value
        seq::SequencerConfig cfg;
        seq::AttackerStrategy st;
        st.tip_front = 1.0;
        st.tip_back = 0.5;
        do {
            cfg = seq::SequencerConfig{};
            cfg.policy = seq::Policy::fcfs;
            cfg.batch_window = 0.3 + 0.5 * u(rng);
            cfg.background_rate = 1.0 + 5.0 * u(rng);
            cfg.latency_std = 0.03 + 0.05 * u(rng);
            st.delay = 0.02 + 0.1 * u(rng);
        } while (seq::co_inclusion(st, cfg).p_co_inclusion < 0.02);
        run_case(st, cfg, 1000 + static_cast<std::uint64_t>(i));
    }

    for (int i = 0; i < 10; ++i) {  // PGA draws
        seq::SequencerConfig cfg;
        seq::AttackerStrategy st;
        do {
            cfg = seq::SequencerConfig{};
            cfg.policy = seq::Policy::pga;
            cfg.batch_window = 0.3 + 0.5 * u(rng);
            cfg.background_rate = 1.0 + 5.0 * u(rng);
            cfg.tip_distribution = seq::Distribution::exponential(0.6 + 0.9 * u(rng));
            st.delay = 0.0;
            st.tip_back = 0.1 + 0.4 * u(rng);
            st.tip_front = 1.2 + 1.8 * u(rng);
            st.victim_tip_prior = (i % 2 == 0)
                                      ? seq::Distribution::point(0.8 + 0.4 * u(rng))
                                      : seq::Distribution::lognormal(0.0, 0.3 + 0.3 * u(rng));
        } while (seq::co_inclusion(st, cfg).p_co_inclusion < 0.02);
        run_case(st, cfg, 2000 + static_cast<std::uint64_t>(i));
    }

    const double elapsed = seconds_since(start);
    Outcome out;
    out.passed = agreements >= 19 && deterministic && elapsed < 60.0;
    std::ostringstream detail;
    detail << agreements << "/" << checks << " within 3 standard errors at " << trials
           << " trials; reports " << (deterministic ? "byte-identical" : "NON-DETERMINISTIC")
           << " across repeats and thread counts; " << fmt(elapsed) << " s";
    out.detail = detail.str();
    return out;
}

// ---- 6: expected-value threshold --------------------------------------------

Outcome threshold_consistency() {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int zeroed = 0;
    const int trials = 100;
    for (int i = 0; i < trials; ++i) {
        const double depth = 1e4 * std::pow(10.0, 2.0 * u(rng));
        const double gas = 0.05 + u(rng);
        const double slip = 0.5 * u(rng);
        const double prob = 0.02 + 0.96 * u(rng);
        const double threshold = econ::min_victim_size(depth, gas, slip, prob);
        econ::SandwichScenario s;
        s.victim_input = threshold;
        s.depth = depth;
        s.gas_cost = gas;
        s.slippage_cost = slip;
        s.success_prob = prob;
        const double ev = econ::expected_value(s, threshold / 2.0);
        if (std::abs(ev) <= 1e-9 * (gas + slip)) ++zeroed;
    }

    // Threshold grid over the documented central ranges.
    double grid_lo = 1e300;
    double grid_hi = 0.0;
    for (double depth : {5e4, 1e5, 2e5, 3e5}) {
        for (double prob : {0.05, 0.1, 0.2}) {
            for (double cost : {0.2, 0.45, 0.7}) {
                const double v = econ::min_victim_size(depth, cost, 0.0, prob);
                grid_lo = std::min(grid_lo, v);
                grid_hi = std::max(grid_hi, v);
            }
        }
    }
    const bool brackets = grid_lo <= 1500.0 && grid_hi >= 3000.0;

    Outcome out;
    out.passed = zeroed == trials && brackets;
    std::ostringstream detail;
    detail << zeroed << "/" << trials
           << " break-even at the threshold within 1e-9; central grid spans [" << fmt(grid_lo)
           << ", " << fmt(grid_hi) << "] USD, bracketing 1.5k-3k: " << (brackets ? "yes" : "no");
    out.detail = detail.str();
    return out;
}

// ---- 7: detection fixture ----------------------------------------------------

std::string serialize_triples(const std::vector<detect::CandidateTriple>& triples) {
    std::ostringstream out;
    for (const detect::CandidateTriple& t : triples) {
        out << t.front.chain << '|' << t.front.block_number << '|' << t.front.pool_address << '|'
            << t.actor_id << '|' << t.front.tx_hash << '|';
        for (const detect::SwapEvent& v : t.victims) out << v.tx_hash << ',';
        out << '|' << t.back.tx_hash << '|' << t.metrics.strong_signature << '\n';
    }
    return out.str();
}

bool triple_invariants_hold(const detect::CandidateTriple& t, const detect::ActorRegistry& reg) {
    if (t.victims.empty()) return false;
    long prev = t.front.tx_index;
    for (const detect::SwapEvent& v : t.victims) {
        if (v.tx_index <= t.front.tx_index || v.tx_index >= t.back.tx_index) return false;
        if (v.tx_index < prev) return false;
        prev = v.tx_index;
        if (detect::resolve_actor_id(v, reg) == t.actor_id) return false;
        if (v.direction != t.front.direction) return false;
    }
    if (detect::resolve_actor_id(t.front, reg) != t.actor_id) return false;
    if (detect::resolve_actor_id(t.back, reg) != t.actor_id) return false;
    return t.back.direction == amm::reverse(t.front.direction);
}

Outcome detection_fixture() {
    const std::string dir = FIXTURE_DIR;
    const io::EventLoadResult loaded = io::load_events(dir + "/events_block12.csv");
    const detect::ActorRegistry registry = io::load_registry(dir + "/registry.json");
    const std::vector<detect::SnapshotEntry> snapshots = io::load_snapshots(dir + "/snapshots.json");

    if (loaded.events.size() != 12 || loaded.skipped_rows != 0) {
        return {false, "fixture did not load as 12 clean events"};
    }

    std::mt19937_64 rng(109);
    std::string reference;
    bool stable = true;
    bool invariants = true;
    bool count_ok = true;
    std::vector<detect::SwapEvent> events = loaded.events;
    for (int round = 0; round < 20; ++round) {
        std::shuffle(events.begin(), events.end(), rng);
        const detect::DetectResult result = detect::run_detection(events, registry, snapshots, {});
        if (result.triples.size() != 2) count_ok = false;
        for (const detect::CandidateTriple& t : result.triples) {
            if (!triple_invariants_hold(t, registry)) invariants = false;
        }
        const std::string serialized = serialize_triples(result.triples);
        if (round == 0) {
            reference = serialized;
        } else if (serialized != reference) {
            stable = false;
        }
    }

    Outcome out;
    out.passed = count_ok && invariants && stable;
    std::ostringstream detail;
    detail << "12-event block under 20 permutations: "
           << (count_ok ? "2 triples each" : "WRONG triple count") << ", invariants "
           << (invariants ? "hold" : "VIOLATED") << ", output "
           << (stable ? "permutation-stable" : "UNSTABLE");
    out.detail = detail.str();
    return out;
}

// ---- 8: pnl sign --------------------------------------------------------------

Outcome pnl_sign() {
    detect::CandidateTriple t;
    t.front.amount_in_usd = 600.0;
    detect::SwapEvent victim;
    victim.amount_in_usd = 1200.0;
    t.victims.push_back(victim);
    t.back.amount_in_usd = 610.0;
    const detect::PnlBreakdown pnl =
        detect::triple_pnl(t, detect::PoolContext{1e5, 0.0005, 1}, 0.45);
    Outcome out;
    out.passed = pnl.gross > 0.0 && pnl.gross <= 5e-3 && pnl.net < 0.0;
    std::ostringstream detail;
    detail << "gross " << fmt(pnl.gross) << " USD (sub-cent), net " << fmt(pnl.net)
           << " USD (negative)";
    out.detail = detail.str();
    return out;
}

// ---- 9: statistics oracle ------------------------------------------------------

Outcome statistics_oracle() {
    std::mt19937_64 rng(111);
    std::lognormal_distribution<double> size(6.5, 1.2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<detect::CandidateTriple> triples;
    const std::vector<std::string> chains = {"arbitrum", "base", "optimism", "unichain"};
    for (int i = 0; i < 1000; ++i) {
        detect::CandidateTriple t;
        t.front.chain = chains[static_cast<size_t>(i) % chains.size()];
        t.front.amount_in_usd = size(rng);
        detect::SwapEvent victim;
        victim.amount_in_usd = size(rng);
        t.victims.push_back(victim);
        t.back.amount_in_usd = size(rng);
        t.metrics.back_front_ratio = t.back.amount_in_usd / t.front.amount_in_usd;
        detect::PnlBreakdown pnl;
        pnl.gross = u(rng) * 1e-3;
        pnl.net_slippage = pnl.gross * 0.5;
        pnl.net = pnl.net_slippage - 1.0;
        t.metrics.pnl = pnl;
        triples.push_back(std::move(t));
    }

    auto oracle_quantile = [](std::vector<double> xs, double p) {
        std::sort(xs.begin(), xs.end());
        const double pos = p * (static_cast<double>(xs.size()) - 1.0);
        const size_t lo = static_cast<size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= xs.size()) return xs.back();
        return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
    };
    auto oracle_pearson = [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const double n = static_cast<double>(xs.size());
        double mx = 0.0, my = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= n;
        my /= n;
        double cxy = 0.0, cxx = 0.0, cyy = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            cxy += (xs[i] - mx) * (ys[i] - my);
            cxx += (xs[i] - mx) * (xs[i] - mx);
            cyy += (ys[i] - my) * (ys[i] - my);
        }
        return cxy / std::sqrt(cxx * cyy);
    };

    double worst = 0.0;
    const std::vector<detect::ChainSummary> rows = detect::summary_stats(triples);
    for (const detect::ChainSummary& row : rows) {
        std::vector<double> fronts, victims, backs, ratios, gross, net;
        for (const detect::CandidateTriple& t : triples) {
            if (t.front.chain != row.chain) continue;
            fronts.push_back(t.front.amount_in_usd);
            victims.push_back(t.victim_total_usd());
            backs.push_back(t.back.amount_in_usd);
            ratios.push_back(*t.metrics.back_front_ratio);
            gross.push_back(t.metrics.pnl->gross);
            net.push_back(t.metrics.pnl->net);
        }
        auto track = [&](double got, double want) {
            worst = std::max(worst, std::abs(got - want));
        };
        track(*row.front_median, oracle_quantile(fronts, 0.5));
        track(*row.front_q1, oracle_quantile(fronts, 0.25));
        track(*row.front_q3, oracle_quantile(fronts, 0.75));
        track(*row.victim_median, oracle_quantile(victims, 0.5));
        track(*row.back_median, oracle_quantile(backs, 0.5));
        track(*row.ratio_median, oracle_quantile(ratios, 0.5));
        track(*row.ratio_q1, oracle_quantile(ratios, 0.25));
        track(*row.ratio_q3, oracle_quantile(ratios, 0.75));
        track(*row.pnl_gross_median, oracle_quantile(gross, 0.5));
        track(*row.pnl_net_median, oracle_quantile(net, 0.5));
        track(*row.corr_victim_front, oracle_pearson(victims, fronts));
        track(*row.corr_victim_back, oracle_pearson(victims, backs));
        track(*row.corr_front_back, oracle_pearson(fronts, backs));
    }

    Outcome out;
    out.passed = rows.size() == chains.size() && worst <= 1e-12;
    std::ostringstream detail;
    detail << "1000 synthetic triples across " << rows.size()
           << " chains; worst |stat - oracle| = " << fmt(worst);
    out.detail = detail.str();
    return out;
}

struct Criterion {
    const char* name;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"half-rule grid argmax on exact replay", half_rule},
    {"tick-gap case analysis", gap_cases},
    {"quadratic-vs-replay error scaling", error_scaling},
    {"co-inclusion feasibility band", feasibility_band},
    {"Monte Carlo vs analytic agreement", monte_carlo_agreement},
    {"expected-value threshold consistency", threshold_consistency},
    {"bundled detection fixture", detection_fixture},
    {"synthetic sandwich PnL sign", pnl_sign},
    {"summary statistics oracle", statistics_oracle},
};

}  // namespace

int main(int argc, char** argv) {
    int first = 0;
    int last = 9;
    if (argc > 1) {
        const int which = std::atoi(argv[1]);
        if (which < 1 || which > 9) {
            std::fprintf(stderr, "usage: %s [1-9]\n", argv[0]);
            return 2;
        }
        first = which - 1;
        last = which;
    }
    bool all_passed = true;
    for (int i = first; i < last; ++i) {
        const Outcome outcome = kCriteria[i].run();
        std::printf("[%s] criterion %d: %s -- %s\n", outcome.passed ? "PASS" : "FAIL", i + 1,
                    kCriteria[i].name, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.passed) all_passed = false;
    }
    return all_passed ? 0 : 1;
}
