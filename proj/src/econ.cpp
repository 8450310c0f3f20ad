#include "sandwich/econ.hpp"

#include <algorithm>
#include <cmath>

namespace sandwich::econ {

namespace {

constexpr int kMaxBisectIter = 200;
constexpr double kBisectRelTol = 1e-9;
constexpr double kTieRelTol = 1e-12;

void require_nonnegative(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw InvalidInput(std::string(what) + " must be finite and non-negative");
    }
}

}  // namespace

void SandwichScenario::validate() const {
    if (!std::isfinite(victim_input) || victim_input < 0.0) {
        throw ValidationError("victim_input must be finite and non-negative");
    }
    if (std::isnan(frontrun_cap) || frontrun_cap < 0.0) {
        throw ValidationError("frontrun_cap must be non-negative");
    }
    if (!std::isfinite(fee) || fee < 0.0 || fee >= 1.0) {
        throw ValidationError("fee must lie in [0, 1)");
    }
    if (!std::isfinite(depth) || depth <= 0.0) {
        throw ValidationError("depth must be positive");
    }
    if (tick_width < 1) throw ValidationError("tick_width must be >= 1");
    require_nonnegative(gas_cost, "gas_cost");
    require_nonnegative(slippage_cost, "slippage_cost");
    if (!std::isfinite(success_prob) || success_prob < 0.0 || success_prob > 1.0) {
        throw ValidationError("success_prob must lie in [0, 1]");
    }
}

double SandwichScenario::tick_epsilon() const {
    return std::pow(1.0001, tick_width) - 1.0;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::in_tick: return "in-tick";
        case Regime::gap_crossing: return "gap-crossing";
        case Regime::capped: return "capped";
    }
    return "unknown";
}

double incremental_profit_quadratic(double v_f, double v_v, double fee, double depth) {
    if (!std::isfinite(depth) || depth <= 0.0) throw InvalidDepth("depth must be positive");
    require_nonnegative(v_f, "frontrun size");
    require_nonnegative(v_v, "victim size");
    const double keep = 1.0 - fee;
    return keep * keep / depth * (v_f * v_v - v_f * v_f) - 2.0 * fee * v_f;
}

AttackPlan optimal_frontrun_cpmm(const SandwichScenario& scenario) {
    scenario.validate();
    const double interior = scenario.victim_input / 2.0;
    const bool capped = scenario.frontrun_cap < interior;
    const double size = capped ? scenario.frontrun_cap : interior;
    AttackPlan plan;
    plan.frontrun_size = size;
    plan.regime = capped ? Regime::capped : Regime::in_tick;
    plan.expected_profit =
        incremental_profit_quadratic(size, scenario.victim_input, scenario.fee, scenario.depth);
    return plan;
}

double exact_sandwich_profit(const amm::CpmmPool& pool, double v_f, double v_v,
                             double fee, double gas_cost) {
    require_nonnegative(v_f, "frontrun size");
    require_nonnegative(v_v, "victim size");
    amm::CpmmPool p0 = pool;
    p0.fee = fee;
    const amm::SwapQuote front = amm::cpmm_swap_exact_in(p0, v_f, amm::Direction::x_to_y);
    const amm::CpmmPool p1 = amm::cpmm_apply_swap(p0, v_f, amm::Direction::x_to_y);
    const amm::CpmmPool p2 = amm::cpmm_apply_swap(p1, v_v, amm::Direction::x_to_y);
    const amm::SwapQuote back = amm::cpmm_swap_exact_in(p2, front.amount_out, amm::Direction::y_to_x);
    return back.amount_out - v_f - gas_cost;
}

double exact_sandwich_profit(const amm::ClmmPool& pool, double v_f, double v_v,
                             double fee, double gas_cost) {
    require_nonnegative(v_f, "frontrun size");
    require_nonnegative(v_v, "victim size");
    amm::ClmmPool p0 = pool;
    p0.fee = fee;
    const amm::SwapQuote front = amm::clmm_swap_exact_in(p0, v_f, amm::Direction::x_to_y);
    const amm::ClmmPool p1 = amm::clmm_apply_swap(p0, v_f, amm::Direction::x_to_y);
    const amm::ClmmPool p2 = amm::clmm_apply_swap(p1, v_v, amm::Direction::x_to_y);
    const amm::SwapQuote back = amm::clmm_swap_exact_in(p2, front.amount_out, amm::Direction::y_to_x);
    return back.amount_out - v_f - gas_cost;
}

double exact_sandwich_profit(const amm::Pool& pool, double v_f, double v_v,
                             double fee, double gas_cost) {
    return std::visit(
        [&](const auto& p) { return exact_sandwich_profit(p, v_f, v_v, fee, gas_cost); }, pool);
}

double gap_frontrun(const amm::ClmmPool& pool, double victim_input) {
    pool.validate();
    require_nonnegative(victim_input, "victim size");
    const double keep = 1.0 - pool.fee;

    // Upper boundary of the tick the upward flow consumes next.
    int tick = pool.active_tick();
    if (pool.sqrt_price >= pool.sqrt_boundary(tick + 1)) ++tick;
    if (tick >= pool.tick_count()) {
        throw amm::RangeExhausted("no tick above the current price",
                                  amm::SwapQuote{0.0, 0.0, 0, pool.sqrt_price});
    }
    const double target = pool.sqrt_boundary(tick + 1);
    const double target_floor = target * (1.0 - 1e-12);

    auto reaches = [&](double v_f) {
        try {
            const amm::SwapQuote q = amm::clmm_swap_exact_in(pool, v_f + victim_input,
                                                             amm::Direction::x_to_y);
            return q.end_sqrt_price >= target_floor;
        } catch (const amm::RangeExhausted& e) {
            // Ran off the top of the grid, which lies at or above the target.
            return e.partial.end_sqrt_price >= target_floor;
        }
    };

    if (reaches(0.0)) return 0.0;

    // Closed-form capacity of the remaining segment gives a tight bracket.
    const double needed =
        pool.tick_liquidity[static_cast<size_t>(tick)] * (target - pool.sqrt_price);
    double hi = std::max((needed / keep - victim_input) * (1.0 + 1e-6), 1e-12);
    for (int guard = 0; !reaches(hi) && guard < 64; ++guard) hi *= 2.0;
    if (!reaches(hi)) {
        throw amm::RangeExhausted("tick boundary unreachable with available liquidity",
                                  amm::SwapQuote{0.0, 0.0, 0, pool.sqrt_price});
    }

    double lo = 0.0;
    for (int it = 0; it < kMaxBisectIter && (hi - lo) > kBisectRelTol * std::max(hi, 1.0); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (reaches(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

AttackPlan optimal_frontrun_clmm(const amm::ClmmPool& pool, const SandwichScenario& scenario) {
    pool.validate();
    scenario.validate();
    const double v_v = scenario.victim_input;
    const double cap = scenario.frontrun_cap;
    const double interior = v_v / 2.0;
    const double in_tick_candidate = std::min(interior, cap);

    auto profit_at = [&](double v_f) {
        return exact_sandwich_profit(pool, v_f, v_v, pool.fee, scenario.gas_cost);
    };

    double best_size = in_tick_candidate;
    double best_profit = profit_at(in_tick_candidate);
    Regime regime = cap < interior ? Regime::capped : Regime::in_tick;

    const int tick = pool.active_tick();
    const bool has_next = tick + 1 < pool.tick_count();
    if (has_next &&
        pool.tick_liquidity[static_cast<size_t>(tick + 1)] <
            pool.tick_liquidity[static_cast<size_t>(tick)]) {
        const double gap = gap_frontrun(pool, v_v);
        const double gap_candidate = std::min(gap, cap);
        const double gap_profit = profit_at(gap_candidate);
        const double tie_scale = kTieRelTol * std::max({1.0, std::abs(best_profit), std::abs(gap_profit)});
        const bool better = gap_profit > best_profit + tie_scale;
        const bool tied = std::abs(gap_profit - best_profit) <= tie_scale;
        if (better || (tied && gap_candidate < best_size)) {
            best_size = gap_candidate;
            best_profit = gap_profit;
            regime = gap <= cap ? Regime::gap_crossing : Regime::capped;
        }
    }

    return {best_size, regime, best_profit};
}

double empirical_pnl(const SandwichScenario& scenario, double v_f) {
    scenario.validate();
    require_nonnegative(v_f, "frontrun size");
    const double keep = 1.0 - scenario.fee;
    const double eps = scenario.tick_epsilon();
    const double v_v = scenario.victim_input;
    return keep * keep * eps / scenario.depth * (v_f * v_v - v_f * v_f) -
           2.0 * v_f * scenario.fee;
}

double attacker_roundtrip_cost(const amm::Pool& pool, double v_f, double fee) {
    return -exact_sandwich_profit(pool, v_f, 0.0, fee, 0.0);
}

double expected_value(const SandwichScenario& scenario, double v_f) {
    scenario.validate();
    require_nonnegative(v_f, "frontrun size");
    const double v_v = scenario.victim_input;
    const double gross = (v_f * v_v - v_f * v_f) / scenario.depth;
    return scenario.success_prob * gross - scenario.gas_cost - scenario.slippage_cost;
}

double min_victim_size(double depth, double gas_cost, double slippage_cost,
                       double success_prob) {
    if (!std::isfinite(depth) || depth <= 0.0) throw InvalidDepth("depth must be positive");
    require_nonnegative(gas_cost, "gas_cost");
    require_nonnegative(slippage_cost, "slippage_cost");
    if (!std::isfinite(success_prob) || success_prob <= 0.0 || success_prob > 1.0) {
        throw InfeasibleError("success probability must be positive");
    }
    return 2.0 * std::sqrt(depth * (gas_cost + slippage_cost) / success_prob);
}

namespace {

template <typename PoolT, typename ApplyFn, typename QuoteFn>
SlippageCap slippage_cap_impl(const PoolT& pool, double victim_input, double tolerance,
                              ApplyFn apply, QuoteFn quote, double feasible_max) {
    pool.validate();
    if (!std::isfinite(victim_input) || victim_input <= 0.0) {
        throw InvalidInput("victim size must be positive");
    }
    if (!std::isfinite(tolerance) || tolerance <= 0.0 || tolerance >= 1.0) {
        throw InvalidInput("tolerance must lie in (0, 1)");
    }

    const double quoted = quote(pool, victim_input).amount_out;
    const double floor = (1.0 - tolerance) * quoted;
    auto victim_ok = [&](double v_f) {
        const PoolT bumped = apply(pool, v_f, amm::Direction::x_to_y);
        return quote(bumped, victim_input).amount_out >= floor;
    };

    double hi = std::max(victim_input, 1.0);
    bool bounded = false;
    while (true) {
        if (std::isfinite(feasible_max) && hi >= feasible_max) {
            hi = feasible_max;
            if (victim_ok(hi)) {
                bounded = true;  // tolerance never binds inside the range
            }
            break;
        }
        if (!victim_ok(hi)) break;
        hi *= 2.0;
    }
    if (bounded) return {hi, true};

    double lo = 0.0;
    for (int it = 0; it < kMaxBisectIter && (hi - lo) > kBisectRelTol * std::max(hi, 1.0); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (victim_ok(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, false};
}

}  // namespace

SlippageCap slippage_cap(const amm::CpmmPool& pool, double victim_input, double tolerance) {
    return slippage_cap_impl(
        pool, victim_input, tolerance,
        [](const amm::CpmmPool& p, double v, amm::Direction d) { return amm::cpmm_apply_swap(p, v, d); },
        [](const amm::CpmmPool& p, double v) { return amm::cpmm_swap_exact_in(p, v, amm::Direction::x_to_y); },
        std::numeric_limits<double>::infinity());
}

SlippageCap slippage_cap(const amm::ClmmPool& pool, double victim_input, double tolerance) {
    // Combined frontrun + victim flow must fit below the top of the grid.
    double capacity = 0.0;
    double s = pool.sqrt_price;
    for (int i = 0; i < pool.tick_count(); ++i) {
        const double top = pool.sqrt_boundary(i + 1);
        if (top <= s) continue;
        const double from = std::max(s, pool.sqrt_boundary(i));
        capacity += pool.tick_liquidity[static_cast<size_t>(i)] * (top - from);
    }
    const double keep = 1.0 - pool.fee;
    const double feasible_max =
        std::max(0.0, capacity / keep - victim_input) * (1.0 - 1e-12);
    return slippage_cap_impl(
        pool, victim_input, tolerance,
        [](const amm::ClmmPool& p, double v, amm::Direction d) { return amm::clmm_apply_swap(p, v, d); },
        [](const amm::ClmmPool& p, double v) { return amm::clmm_swap_exact_in(p, v, amm::Direction::x_to_y); },
        feasible_max);
}

SlippageCap slippage_cap(const amm::Pool& pool, double victim_input, double tolerance) {
    return std::visit(
        [&](const auto& p) { return slippage_cap(p, victim_input, tolerance); }, pool);
}

}  // namespace sandwich::econ
