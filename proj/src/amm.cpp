#include "sandwich/amm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sandwich::amm {

namespace {

void require_amount(double amount_in) {
    if (!std::isfinite(amount_in) || amount_in < 0.0) {
        throw InvalidInput("swap amount must be finite and non-negative");
    }
}

void require_fee(double fee) {
    if (!std::isfinite(fee) || fee < 0.0 || fee >= 1.0) {
        throw ValidationError("fee must lie in [0, 1)");
    }
}

// Tick whose remaining upward capacity is consumed next when the price
// rises from s. Returns tick_count() when s sits at (or above) the top.
int upward_segment(const ClmmPool& pool, double s) {
    int n = pool.tick_count();
    if (s >= pool.sqrt_boundary(n)) return n;
    for (int i = n - 1; i >= 0; --i) {
        if (s >= pool.sqrt_boundary(i)) return i;
    }
    return 0;
}

// Tick consumed next when the price falls from s. Returns -1 at the bottom.
int downward_segment(const ClmmPool& pool, double s) {
    if (s <= pool.sqrt_boundary(0)) return -1;
    int n = pool.tick_count();
    for (int i = n - 1; i >= 0; --i) {
        if (pool.sqrt_boundary(i) < s) return i;
    }
    return -1;
}

}  // namespace

Direction reverse(Direction d) {
    return d == Direction::x_to_y ? Direction::y_to_x : Direction::x_to_y;
}

const char* to_string(Direction d) {
    return d == Direction::x_to_y ? "XtoY" : "YtoX";
}

void CpmmPool::validate() const {
    if (!std::isfinite(reserve_x) || !std::isfinite(reserve_y) || reserve_x <= 0.0 || reserve_y <= 0.0) {
        throw ValidationError("CPMM reserves must be finite and positive");
    }
    require_fee(fee);
}

void ClmmPool::validate() const {
    if (tick_boundaries.size() < 2 || tick_liquidity.size() + 1 != tick_boundaries.size()) {
        throw ValidationError("CLMM needs n+1 boundaries for n tick liquidities");
    }
    double prev = 0.0;
    for (double b : tick_boundaries) {
        if (!std::isfinite(b) || b <= prev) {
            throw ValidationError("tick boundaries must be positive and strictly increasing");
        }
        prev = b;
    }
    for (double l : tick_liquidity) {
        if (!std::isfinite(l) || l < 0.0) {
            throw ValidationError("tick liquidity must be finite and non-negative");
        }
    }
    if (!std::isfinite(sqrt_price) || sqrt_price < sqrt_boundary(0) ||
        sqrt_price > sqrt_boundary(tick_count())) {
        throw ValidationError("sqrt price must lie inside the tick range");
    }
    require_fee(fee);
}

int ClmmPool::active_tick() const {
    int n = tick_count();
    if (sqrt_price >= sqrt_boundary(n)) return n - 1;
    for (int i = n - 1; i >= 0; --i) {
        if (sqrt_price >= sqrt_boundary(i)) return i;
    }
    return 0;
}

double ClmmPool::sqrt_boundary(int i) const {
    return std::sqrt(tick_boundaries[static_cast<size_t>(i)]);
}

SwapQuote cpmm_swap_exact_in(const CpmmPool& pool, double amount_in, Direction dir) {
    pool.validate();
    require_amount(amount_in);
    const double in_reserve = dir == Direction::x_to_y ? pool.reserve_x : pool.reserve_y;
    const double out_reserve = dir == Direction::x_to_y ? pool.reserve_y : pool.reserve_x;
    const double effective = (1.0 - pool.fee) * amount_in;
    const double out = out_reserve * effective / (in_reserve + effective);
    const double x_after = dir == Direction::x_to_y ? in_reserve + effective : out_reserve - out;
    const double y_after = dir == Direction::x_to_y ? out_reserve - out : in_reserve + effective;
    return {amount_in, out, 0, std::sqrt(y_after / x_after)};
}

CpmmPool cpmm_apply_swap(const CpmmPool& pool, double amount_in, Direction dir) {
    SwapQuote q = cpmm_swap_exact_in(pool, amount_in, dir);
    const double effective = (1.0 - pool.fee) * amount_in;
    CpmmPool next = pool;
    if (dir == Direction::x_to_y) {
        if (q.amount_out >= pool.reserve_y) throw DepletionError("swap would drain the Y reserve");
        next.reserve_x += effective;
        next.reserve_y -= q.amount_out;
    } else {
        if (q.amount_out >= pool.reserve_x) throw DepletionError("swap would drain the X reserve");
        next.reserve_y += effective;
        next.reserve_x -= q.amount_out;
    }
    return next;
}

SwapQuote clmm_swap_exact_in(const ClmmPool& pool, double amount_in, Direction dir) {
    pool.validate();
    require_amount(amount_in);
    const double keep = 1.0 - pool.fee;
    double remaining = keep * amount_in;
    double s = pool.sqrt_price;
    double out = 0.0;
    int crossed = 0;

    auto partial = [&](double consumed_effective) {
        return SwapQuote{consumed_effective / keep, out, crossed, s};
    };
    const double total_effective = remaining;

    if (dir == Direction::x_to_y) {
        while (remaining > 0.0) {
            int i = upward_segment(pool, s);
            if (i >= pool.tick_count()) {
                throw RangeExhausted("input exhausts liquidity above the current price",
                                     partial(total_effective - remaining));
            }
            const double liq = pool.tick_liquidity[static_cast<size_t>(i)];
            const double top = pool.sqrt_boundary(i + 1);
            if (liq <= 0.0) {  // empty tick: no capacity, price jumps through
                s = top;
                ++crossed;
                continue;
            }
            const double capacity = liq * (top - s);
            if (remaining < capacity) {
                const double s_next = s + remaining / liq;
                out += liq * (1.0 / s - 1.0 / s_next);
                s = s_next;
                remaining = 0.0;
            } else {
                out += liq * (1.0 / s - 1.0 / top);
                remaining -= capacity;
                s = top;
                ++crossed;
            }
        }
    } else {
        while (remaining > 0.0) {
            int i = downward_segment(pool, s);
            if (i < 0) {
                throw RangeExhausted("input exhausts liquidity below the current price",
                                     partial(total_effective - remaining));
            }
            const double liq = pool.tick_liquidity[static_cast<size_t>(i)];
            const double bottom = pool.sqrt_boundary(i);
            if (liq <= 0.0) {
                s = bottom;
                ++crossed;
                continue;
            }
            const double capacity = liq * (1.0 / bottom - 1.0 / s);
            if (remaining < capacity) {
                const double s_next = 1.0 / (1.0 / s + remaining / liq);
                out += liq * (s - s_next);
                s = s_next;
                remaining = 0.0;
            } else {
                out += liq * (s - bottom);
                remaining -= capacity;
                s = bottom;
                ++crossed;
            }
        }
    }
    return {amount_in, out, crossed, s};
}

ClmmPool clmm_apply_swap(const ClmmPool& pool, double amount_in, Direction dir) {
    SwapQuote q = clmm_swap_exact_in(pool, amount_in, dir);
    ClmmPool next = pool;
    next.sqrt_price = q.end_sqrt_price;
    return next;
}

double clmm_marginal_impact(const ClmmPool& pool) {
    pool.validate();
    const double liq = pool.tick_liquidity[static_cast<size_t>(pool.active_tick())];
    if (liq <= 0.0) throw ZeroLiquidity("active tick has no liquidity");
    const double price = pool.sqrt_price * pool.sqrt_price;
    return 2.0 * std::pow(price, 1.5) / liq;
}

double effective_depth(const CpmmPool& pool) {
    pool.validate();
    return pool.reserve_x;
}

double effective_depth(const ClmmPool& pool) {
    pool.validate();
    const double liq = pool.tick_liquidity[static_cast<size_t>(pool.active_tick())];
    return liq / (pool.sqrt_price * pool.sqrt_price);
}

double effective_depth(const Pool& pool) {
    return std::visit([](const auto& p) { return effective_depth(p); }, pool);
}

double pool_fee(const Pool& pool) {
    return std::visit([](const auto& p) { return p.fee; }, pool);
}

NormalizedTrade normalized_size(double value_usd, double fee, double depth,
                                double small_trade_threshold) {
    if (!std::isfinite(depth) || depth <= 0.0) throw InvalidDepth("depth must be positive");
    require_amount(value_usd);
    require_fee(fee);
    const double alpha = (1.0 - fee) * value_usd / depth;
    return {alpha, alpha < small_trade_threshold};
}

}  // namespace sandwich::amm
