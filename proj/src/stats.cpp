#include "sandwich/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sandwich/errors.hpp"

namespace sandwich::stats {

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) throw InvalidInput("quantile of empty data");
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw InvalidInput("quantile level outside [0, 1]");
    std::sort(xs.begin(), xs.end());
    const double h = (static_cast<double>(xs.size()) - 1.0) * p;
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = h - std::floor(h);
    return xs[lo] + frac * (xs[hi] - xs[lo]);
}

double median(const std::vector<double>& xs) {
    return quantile(xs, 0.5);
}

Iqr iqr(const std::vector<double>& xs) {
    return {quantile(xs, 0.25), quantile(xs, 0.75)};
}

std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw InvalidInput("pearson needs series of equal length");
    const size_t n = xs.size();
    if (n < 2) return std::nullopt;
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace sandwich::stats
