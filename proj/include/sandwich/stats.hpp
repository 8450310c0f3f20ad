#pragma once

#include <optional>
#include <vector>

namespace sandwich::stats {

// Quantile with linear interpolation between order statistics
// (h = (n-1)p convention). Throws InvalidInput on empty data or p outside
// [0, 1].
double quantile(std::vector<double> xs, double p);

double median(const std::vector<double>& xs);

struct Iqr {
    double lower = 0.0;  // 25th percentile
    double upper = 0.0;  // 75th percentile
};

Iqr iqr(const std::vector<double>& xs);

// Sample Pearson correlation; empty when fewer than two points or either
// series has zero variance. Throws on length mismatch.
std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace sandwich::stats
