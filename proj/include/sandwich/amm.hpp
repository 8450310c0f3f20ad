#pragma once

// Exact swap math for constant-product and concentrated-liquidity pools.
// All amounts are USD-equivalent doubles. Fees are proportional, deducted
// from the input before the pool invariant applies, and leave the system
// (they do not accrue to reserves).

#include <variant>
#include <vector>

#include "sandwich/errors.hpp"

namespace sandwich::amm {

enum class Direction { x_to_y, y_to_x };

Direction reverse(Direction d);
const char* to_string(Direction d);

// Result of quoting a swap. For CPMM pools end_sqrt_price is the square
// root of the post-trade marginal price y/x and ticks_crossed is 0.
struct SwapQuote {
    double amount_in = 0.0;
    double amount_out = 0.0;
    int ticks_crossed = 0;
    double end_sqrt_price = 0.0;
};

// Thrown when a CLMM swap runs out of price range in the swap direction.
// Carries the partially filled quote: amount_in is the gross input actually
// consumed, amount_out what it bought, end_sqrt_price the range edge.
struct RangeExhausted : Error {
    RangeExhausted(std::string what, SwapQuote partial_quote)
        : Error(std::move(what)), partial(partial_quote) {}
    SwapQuote partial;
};

struct CpmmPool {
    double reserve_x = 0.0;
    double reserve_y = 0.0;
    double fee = 0.0;  // proportional fee in [0, 1)

    void validate() const;
};

// Piecewise-constant liquidity over a strictly increasing price grid.
// tick_boundaries has n+1 prices; tick_liquidity[i] covers
// [tick_boundaries[i], tick_boundaries[i+1]].
//
// Direction convention: an X->Y swap consumes X input and moves sqrt_price
// up through the grid; Y->X moves it down. The X input needed to lift the
// price across tick i is L_i*(sqrt(P_{i+1}) - sqrt(P_i)) and it buys
// L_i*(1/sqrt(P_i) - 1/sqrt(P_{i+1})) of Y.
struct ClmmPool {
    std::vector<double> tick_boundaries;
    std::vector<double> tick_liquidity;
    double sqrt_price = 0.0;
    double fee = 0.0;

    void validate() const;

    // Tick containing sqrt_price. Lower-closed except the topmost tick,
    // which also owns its upper boundary.
    int active_tick() const;
    int tick_count() const { return static_cast<int>(tick_liquidity.size()); }
    double sqrt_boundary(int i) const;
};

using Pool = std::variant<CpmmPool, ClmmPool>;

// Output for a given input per the constant-product rule with the fee
// taken off the input. Pure; the pool is not mutated.
SwapQuote cpmm_swap_exact_in(const CpmmPool& pool, double amount_in, Direction dir);

// Post-trade pool: effective input added to the in-reserve, quoted output
// removed from the out-reserve.
CpmmPool cpmm_apply_swap(const CpmmPool& pool, double amount_in, Direction dir);

// Consumes the input tick by tick using square-root-price segments.
// Throws RangeExhausted (with the partial fill) when the input would push
// the price past the end of the grid.
SwapQuote clmm_swap_exact_in(const ClmmPool& pool, double amount_in, Direction dir);

ClmmPool clmm_apply_swap(const ClmmPool& pool, double amount_in, Direction dir);

// Price-impact slope 2*P^(3/2)/L_i of the active tick at the current price.
double clmm_marginal_impact(const ClmmPool& pool);

// Effective depth L used by the economic model: the X reserve for CPMM
// pools, L_i/P of the active tick for CLMM pools.
double effective_depth(const CpmmPool& pool);
double effective_depth(const ClmmPool& pool);
double effective_depth(const Pool& pool);

double pool_fee(const Pool& pool);

struct NormalizedTrade {
    double alpha = 0.0;
    bool small_trade = false;
};

// alpha = (1-fee)*value/depth; small_trade flags alpha below the threshold.
NormalizedTrade normalized_size(double value_usd, double fee, double depth,
                                double small_trade_threshold = 1e-2);

}  // namespace sandwich::amm
