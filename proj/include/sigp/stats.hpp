#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sigp {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slopeStderr = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs >= 2 distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Median of a copy; NaN for an empty input.
double median(std::vector<double> v);

double mean(std::span<const double> v);

/// Runs fn(i) for i in [0, count) on up to `threads` worker threads.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

} // namespace sigp
