#pragma once

// Attacker profit models and optimal frontrun sizing: the quadratic
// small-trade approximation, exact three-leg replay on pool math, the
// tick-gap strategy for concentrated liquidity, expected value under
// probabilistic inclusion, and the minimum viable victim size.

#include <limits>

#include "sandwich/amm.hpp"

namespace sandwich::econ {

struct SandwichScenario {
    double victim_input = 0.0;   // V_v, USD
    double frontrun_cap = std::numeric_limits<double>::infinity();  // from victim slippage
    double fee = 0.0;            // proportional swap fee
    double depth = 0.0;          // effective liquidity L, USD
    int tick_width = 1;          // active tick width in 1.0001-spaced tick units
    double gas_cost = 0.0;       // USD, both attacker legs combined
    double slippage_cost = 0.0;  // USD, attacker's own round-trip impact
    double success_prob = 1.0;   // co-inclusion probability

    void validate() const;
    // Relative tick width: 1.0001^tick_width - 1.
    double tick_epsilon() const;
};

enum class Regime { in_tick, gap_crossing, capped };

const char* to_string(Regime r);

struct AttackPlan {
    double frontrun_size = 0.0;
    Regime regime = Regime::in_tick;
    // Value of the objective the plan was chosen by: the quadratic model
    // for CPMM plans, the exact replay for CLMM plans.
    double expected_profit = 0.0;
};

// (1-fee)^2/depth * (v_f*v_v - v_f^2) - 2*fee*v_f.
double incremental_profit_quadratic(double v_f, double v_v, double fee, double depth);

// Quadratic-model optimum min(v_v/2, cap).
AttackPlan optimal_frontrun_cpmm(const SandwichScenario& scenario);

// Replays frontrun (X->Y), victim (X->Y), backrun (Y->X selling exactly the
// frontrun's Y output) on exact pool operations with the given fee override;
// returns backrun X output - v_f - gas_cost. Propagates depletion and
// range-exhausted errors from the pool layer.
double exact_sandwich_profit(const amm::CpmmPool& pool, double v_f, double v_v,
                             double fee, double gas_cost);
double exact_sandwich_profit(const amm::ClmmPool& pool, double v_f, double v_v,
                             double fee, double gas_cost);
double exact_sandwich_profit(const amm::Pool& pool, double v_f, double v_v,
                             double fee, double gas_cost);

// Smallest frontrun such that the combined effective flow
// (1-fee)*(v_f + victim_input) lifts the price to the active tick's upper
// boundary; 0 if the victim alone crosses. Bisection on the exact swap end
// price to relative 1e-9.
double gap_frontrun(const amm::ClmmPool& pool, double victim_input);

// Case analysis over the in-tick candidate and the gap-crossing candidate
// (the latter only when the next tick upward is thinner), decided on the
// exact replay. Ties go to the smaller frontrun.
AttackPlan optimal_frontrun_clmm(const amm::ClmmPool& pool, const SandwichScenario& scenario);

// Tick-width-scaled profit before gas:
// (1-fee)^2 * eps/depth * (v_f*v_v - v_f^2) - 2*v_f*fee.
double empirical_pnl(const SandwichScenario& scenario, double v_f);

// success_prob * (v_f*v_v - v_f^2)/depth - gas_cost - slippage_cost.
// At v_f = v_v/2 this is success_prob * v_v^2/(4*depth) minus costs.
double expected_value(const SandwichScenario& scenario, double v_f);

// 2*sqrt(depth*(gas_cost+slippage_cost)/success_prob).
double min_victim_size(double depth, double gas_cost, double slippage_cost,
                       double success_prob);

// Cost of the attacker's own two legs with no victim present: fees plus
// any unrecovered self-impact, from the exact replay. Used to derive the
// slippage cost when a scenario does not supply one.
double attacker_roundtrip_cost(const amm::Pool& pool, double v_f, double fee);

struct SlippageCap {
    double cap = 0.0;
    // True when the pool's price range, not the tolerance, bounds the cap.
    bool capacity_bounded = false;
};

// Largest frontrun under which the victim still receives at least
// (1-tolerance) of its untouched-pool quote. Bisection to relative 1e-9.
SlippageCap slippage_cap(const amm::CpmmPool& pool, double victim_input, double tolerance);
SlippageCap slippage_cap(const amm::ClmmPool& pool, double victim_input, double tolerance);
SlippageCap slippage_cap(const amm::Pool& pool, double victim_input, double tolerance);

}  // namespace sandwich::econ
