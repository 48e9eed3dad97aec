#pragma once

// Small helpers shared by the test programs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fracsub/core/rng.hpp"

namespace testing_support {

// sup_x |F_n(x) - F(x)| evaluated at every sample point (both one-sided
// limits), for a reference CDF that is cheap to call.
inline double ks_exact(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
    }
    return d;
}

// Same statistic restricted to a grid of probe points; used when the
// reference CDF is expensive.  A grid with spacing small against the
// reference density gives a value within O(spacing * max density) of the
// exact statistic.
inline double ks_on_probes(std::vector<double> samples, const std::vector<double>& probes,
                           const std::vector<double>& cdf_at_probes) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto upper = std::upper_bound(samples.begin(), samples.end(), probes[k]);
        const auto lower = std::lower_bound(samples.begin(), samples.end(), probes[k]);
        const double right = static_cast<double>(upper - samples.begin()) / n;
        const double left = static_cast<double>(lower - samples.begin()) / n;
        d = std::max({d, std::abs(right - cdf_at_probes[k]), std::abs(left - cdf_at_probes[k])});
    }
    return d;
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

// Seeded parameter generator for property tests.
struct ParamGen {
    fracsub::RngStream rng;
    explicit ParamGen(std::uint64_t seed) : rng(seed, 0) {}

    double uniform(double lo, double hi) { return rng.uniform(lo, hi); }

    // Valid Feller pair (alpha, theta).
    std::pair<double, double> stable_pair(double alpha_lo = 0.2, double alpha_hi = 2.0) {
        const double a = uniform(alpha_lo, alpha_hi);
        const double bound = std::min(a, 2.0 - a);
        return {a, uniform(-bound, bound)};
    }
};

} // namespace testing_support
