#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "sandwich/econ.hpp"

using namespace sandwich;
using amm::ClmmPool;
using amm::CpmmPool;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fee-free three-leg profit in closed form, derived by composing the
// constant-product legs algebraically: with reserves (x, y) the backrun
// output is f*(x+f+v)^2 / ((x+f)^2 + f*v), independent of y.
double replay_profit_closed_form(double x0, double f, double v) {
    const double back_out = f * (x0 + f + v) * (x0 + f + v) / ((x0 + f) * (x0 + f) + f * v);
    return back_out - f;
}

econ::SandwichScenario scenario(double victim, double cap, double fee, double depth) {
    econ::SandwichScenario s;
    s.victim_input = victim;
    s.frontrun_cap = cap;
    s.fee = fee;
    s.depth = depth;
    return s;
}

ClmmPool gap_pool(double liq0, double liq1, double fee = 0.0) {
    ClmmPool pool;
    pool.tick_boundaries = {1.0, 1.0201, 1.1025};
    pool.tick_liquidity = {liq0, liq1};
    pool.sqrt_price = 1.0;
    pool.fee = fee;
    return pool;
}

}  // namespace

TEST_CASE("quadratic incremental profit") {
    CHECK(econ::incremental_profit_quadratic(500.0, 1000.0, 0.0, 1e6) ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK(econ::incremental_profit_quadratic(500.0, 1000.0, 0.0005, 1e6) ==
          doctest::Approx(-0.2502499375).epsilon(1e-12));
    // The quadratic term vanishes when the frontrun matches the victim.
    CHECK(econ::incremental_profit_quadratic(750.0, 750.0, 0.002, 1e6) ==
          doctest::Approx(-2.0 * 0.002 * 750.0).epsilon(1e-12));
    CHECK_THROWS_AS(econ::incremental_profit_quadratic(1.0, 1.0, 0.0, 0.0), InvalidDepth);
}

TEST_CASE("quadratic profit is concave in the frontrun size") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double depth = 1e4 + u(rng) * 1e7;
        const double victim = u(rng) * depth * 0.1;
        const double fee = u(rng) * 0.01;
        const double a = u(rng) * victim;
        const double h = u(rng) * victim * 0.2 + 1e-9;
        const double left = econ::incremental_profit_quadratic(a, victim, fee, depth);
        const double mid = econ::incremental_profit_quadratic(a + h, victim, fee, depth);
        const double right = econ::incremental_profit_quadratic(a + 2 * h, victim, fee, depth);
        CHECK(right - 2 * mid + left <= 1e-9 * (std::abs(mid) + 1.0));
    }
}

TEST_CASE("optimal cpmm frontrun follows the half rule with a cap") {
    econ::AttackPlan plan = econ::optimal_frontrun_cpmm(scenario(1000.0, kInf, 0.0, 1e6));
    CHECK(plan.frontrun_size == doctest::Approx(500.0));
    CHECK(plan.regime == econ::Regime::in_tick);

    plan = econ::optimal_frontrun_cpmm(scenario(1000.0, 200.0, 0.0, 1e6));
    CHECK(plan.frontrun_size == doctest::Approx(200.0));
    CHECK(plan.regime == econ::Regime::capped);

    plan = econ::optimal_frontrun_cpmm(scenario(0.0, kInf, 0.0, 1e6));
    CHECK(plan.frontrun_size == 0.0);
}

TEST_CASE("exact replay matches its closed form and ignores the far reserve") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double x0 = 1e5 * std::pow(10.0, 2.0 * u(rng));
        const double v = x0 * (1e-4 + 0.02 * u(rng));
        const double f = v * (0.1 + 0.9 * u(rng));
        const CpmmPool pool_a{x0, x0, 0.0};
        const CpmmPool pool_b{x0, 17.0 * x0, 0.0};
        const double profit_a = econ::exact_sandwich_profit(pool_a, f, v, 0.0, 0.0);
        const double profit_b = econ::exact_sandwich_profit(pool_b, f, v, 0.0, 0.0);
        const double closed = replay_profit_closed_form(x0, f, v);
        CHECK(profit_a == doctest::Approx(closed).epsilon(1e-9));
        CHECK(profit_b == doctest::Approx(closed).epsilon(1e-9));
    }
}

TEST_CASE("exact replay edge cases") {
    const CpmmPool pool{1e6, 1e6, 0.0};
    CHECK(econ::exact_sandwich_profit(pool, 0.0, 1000.0, 0.0, 0.45) == doctest::Approx(-0.45));
    CHECK(econ::exact_sandwich_profit(pool, 0.0, 1000.0, 0.0, 0.0) == 0.0);
    // Round trip with no victim and no fee returns exactly the input.
    CHECK(std::abs(econ::exact_sandwich_profit(pool, 500.0, 0.0, 0.0, 0.0)) < 1e-12 * 500.0);
    // Fees only hurt.
    CHECK(econ::exact_sandwich_profit(pool, 500.0, 1000.0, 0.003, 0.0) <
          econ::exact_sandwich_profit(pool, 500.0, 1000.0, 0.0, 0.0));
}

TEST_CASE("attacker round-trip cost is the fee drag") {
    const amm::Pool pool = CpmmPool{1e6, 1e6, 0.0};
    // Fee-free round trips recapture their own impact.
    CHECK(std::abs(econ::attacker_roundtrip_cost(pool, 500.0, 0.0)) < 1e-9);
    // With a fee the cost is (2*fee - fee^2) per unit, at leading order.
    const double fee = 0.003;
    const double cost = econ::attacker_roundtrip_cost(pool, 500.0, fee);
    CHECK(cost == doctest::Approx((2.0 * fee - fee * fee) * 500.0).epsilon(1e-2));
    CHECK(cost > 0.0);
}

TEST_CASE("replay profit equals the victim's execution shortfall at zero fee") {
    // Whatever the attacker gains, the victim pays: the quoted-vs-realised
    // gap of the victim trade converts to X units at the spot rate.
    const double x0 = 2e6;
    const CpmmPool pool{x0, 3e6, 0.0};
    const double v = 1500.0;
    const double f = 600.0;
    const double quoted = amm::cpmm_swap_exact_in(pool, v, amm::Direction::x_to_y).amount_out;
    const CpmmPool bumped = amm::cpmm_apply_swap(pool, f, amm::Direction::x_to_y);
    const double realized = amm::cpmm_swap_exact_in(bumped, v, amm::Direction::x_to_y).amount_out;
    const double victim_loss_x = (quoted - realized) * pool.reserve_x / pool.reserve_y;
    const double profit = econ::exact_sandwich_profit(pool, f, v, 0.0, 0.0);
    CHECK(profit == doctest::Approx(victim_loss_x).epsilon(0.01));
}

TEST_CASE("gap frontrun inverts the remaining tick capacity") {
    const ClmmPool pool = gap_pool(5e6, 5e5);
    const double capacity = pool.tick_liquidity[0] * (pool.sqrt_boundary(1) - pool.sqrt_price);

    // Victim consumes half the tick: the gap is the other half.
    CHECK(econ::gap_frontrun(pool, capacity / 2.0) ==
          doctest::Approx(capacity / 2.0).epsilon(1e-9));
    // No victim: the attacker must cover the whole tick.
    CHECK(econ::gap_frontrun(pool, 0.0) == doctest::Approx(capacity).epsilon(1e-9));
    // Victim alone already reaches the boundary.
    CHECK(econ::gap_frontrun(pool, capacity) == 0.0);
    CHECK(econ::gap_frontrun(pool, capacity * 2.0) == 0.0);

    ClmmPool fed = gap_pool(5e6, 5e5, 0.003);
    const double gross = econ::gap_frontrun(fed, 1000.0);
    CHECK(gross == doctest::Approx(capacity / 0.997 - 1000.0).epsilon(1e-9));
}

TEST_CASE("optimal clmm frontrun case analysis") {
    const double victim = 30000.0;

    SUBCASE("uniform liquidity keeps the in-tick rule") {
        const ClmmPool pool = gap_pool(5e6, 5e6);
        const econ::AttackPlan plan =
            econ::optimal_frontrun_clmm(pool, scenario(victim, kInf, 0.0, 5e6));
        CHECK(plan.frontrun_size == doctest::Approx(victim / 2.0));
        CHECK(plan.regime == econ::Regime::in_tick);
    }

    SUBCASE("thicker next tick keeps the in-tick rule") {
        const ClmmPool pool = gap_pool(5e6, 8e6);
        const econ::AttackPlan plan =
            econ::optimal_frontrun_clmm(pool, scenario(victim, kInf, 0.0, 5e6));
        CHECK(plan.frontrun_size == doctest::Approx(victim / 2.0));
        CHECK(plan.regime == econ::Regime::in_tick);
    }

    SUBCASE("thin next tick switches to the gap plan when it pays") {
        const ClmmPool pool = gap_pool(5e6, 5e5);
        const double gap = econ::gap_frontrun(pool, victim);
        const econ::AttackPlan plan =
            econ::optimal_frontrun_clmm(pool, scenario(victim, kInf, 0.0, 5e6));
        CHECK(plan.regime == econ::Regime::gap_crossing);
        CHECK(plan.frontrun_size == doctest::Approx(gap).epsilon(1e-9));
        const double at_gap = econ::exact_sandwich_profit(pool, gap, victim, 0.0, 0.0);
        const double in_tick =
            econ::exact_sandwich_profit(pool, victim / 2.0, victim, 0.0, 0.0);
        CHECK(at_gap > in_tick);
    }

    SUBCASE("the cap binds both candidates") {
        const ClmmPool pool = gap_pool(5e6, 5e5);
        const econ::AttackPlan plan =
            econ::optimal_frontrun_clmm(pool, scenario(victim, 9000.0, 0.0, 5e6));
        CHECK(plan.frontrun_size == doctest::Approx(9000.0));
        CHECK(plan.regime == econ::Regime::capped);
    }
}

TEST_CASE("replay profit is continuous at the boundary when the next tick is as deep") {
    const ClmmPool pool = gap_pool(5e6, 5e6);
    const double victim = 30000.0;
    const double gap = econ::gap_frontrun(pool, victim);
    const double step = victim * 1e-6;
    const double left = econ::exact_sandwich_profit(pool, gap - step, victim, 0.0, 0.0);
    const double right = econ::exact_sandwich_profit(pool, gap + step, victim, 0.0, 0.0);
    CHECK(std::abs(right - left) < 1e-3 * (std::abs(left) + 1.0));
}

TEST_CASE("empirical pnl formula") {
    econ::SandwichScenario s = scenario(1200.0, kInf, 0.0005, 1e5);
    s.tick_width = 1;
    const double eps = std::pow(1.0001, 1) - 1.0;
    const double keep = 1.0 - 0.0005;
    const double gross = keep * keep * eps / 1e5 * (600.0 * 1200.0 - 600.0 * 600.0);
    CHECK(gross == doctest::Approx(3.5964009e-4).epsilon(1e-9));
    CHECK(econ::empirical_pnl(s, 600.0) == doctest::Approx(gross - 0.6).epsilon(1e-9));
    CHECK(econ::empirical_pnl(s, 600.0) == doctest::Approx(-0.59964036).epsilon(1e-6));

    // Frontrun equal to the victim leaves only the fee drag.
    CHECK(econ::empirical_pnl(s, 1200.0) == doctest::Approx(-2.0 * 1200.0 * 0.0005).epsilon(1e-12));

    // With one tick and no fee this is the 1e-4 reduction.
    econ::SandwichScenario flat = scenario(1200.0, kInf, 0.0, 1e5);
    const double reduced = 600.0 * (1200.0 - 600.0) / 1e5 * 1e-4;
    CHECK(econ::empirical_pnl(flat, 600.0) == doctest::Approx(reduced).epsilon(1e-10));
}

TEST_CASE("expected value and the minimum victim size") {
    econ::SandwichScenario s = scenario(1200.0, kInf, 0.0005, 1e5);
    s.gas_cost = 0.45;
    s.slippage_cost = 0.05;
    s.success_prob = 0.0;
    CHECK(econ::expected_value(s, 600.0) == doctest::Approx(-0.5).epsilon(1e-12));

    s.success_prob = 0.1;
    CHECK(econ::expected_value(s, 600.0) == doctest::Approx(-0.14).epsilon(1e-9));

    CHECK(econ::min_victim_size(1e5, 0.5, 0.0, 0.1) ==
          doctest::Approx(1414.2135623730951).epsilon(1e-12));
    CHECK(econ::min_victim_size(1e5, 0.0, 0.0, 0.1) == 0.0);
    CHECK_THROWS_AS(econ::min_victim_size(1e5, 0.5, 0.0, 0.0), InfeasibleError);

    // Break-even at the threshold size.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double depth = 1e4 + u(rng) * 1e6;
        const double gas = 0.1 + u(rng);
        const double slip = u(rng) * 0.5;
        const double prob = 0.01 + 0.98 * u(rng);
        const double threshold = econ::min_victim_size(depth, gas, slip, prob);
        econ::SandwichScenario t = scenario(threshold, kInf, 0.0, depth);
        t.gas_cost = gas;
        t.slippage_cost = slip;
        t.success_prob = prob;
        CHECK(std::abs(econ::expected_value(t, threshold / 2.0)) <= 1e-9 * (gas + slip));
    }
}

TEST_CASE("slippage cap") {
    const CpmmPool pool{1e6, 1e6, 0.0};

    SUBCASE("first order the cap is tolerance times half the depth") {
        const econ::SlippageCap cap = econ::slippage_cap(pool, 1.0, 1e-4);
        CHECK_FALSE(cap.capacity_bounded);
        CHECK(2.0 * cap.cap / (1e-4 * 1e6) == doctest::Approx(1.0).epsilon(0.01));
    }

    SUBCASE("monotone in the tolerance") {
        double previous = 0.0;
        for (double tol : {1e-4, 1e-3, 1e-2, 0.1}) {
            const double cap = econ::slippage_cap(pool, 500.0, tol).cap;
            CHECK(cap > previous);
            previous = cap;
        }
    }

    SUBCASE("vanishes with the tolerance") {
        CHECK(econ::slippage_cap(pool, 500.0, 1e-8).cap < 0.01);
    }

    SUBCASE("narrow clmm ranges bound the cap by capacity") {
        ClmmPool narrow;
        narrow.tick_boundaries = {1.0, 1.0001};
        narrow.tick_liquidity = {1e6};
        narrow.sqrt_price = 1.0;
        narrow.fee = 0.0;
        const econ::SlippageCap cap = econ::slippage_cap(narrow, 10.0, 0.5);
        CHECK(cap.capacity_bounded);
        const double capacity =
            narrow.tick_liquidity[0] * (narrow.sqrt_boundary(1) - narrow.sqrt_price);
        CHECK(cap.cap == doctest::Approx(capacity - 10.0).epsilon(1e-6));
    }

    SUBCASE("rejects degenerate tolerances") {
        CHECK_THROWS_AS(econ::slippage_cap(pool, 500.0, 0.0), InvalidInput);
        CHECK_THROWS_AS(econ::slippage_cap(pool, 500.0, 1.0), InvalidInput);
    }
}
