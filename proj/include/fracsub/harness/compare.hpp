#pragma once

// Statistical comparison of an ensemble of terminal values with the analytic
// Green function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fracsub/core/error.hpp"
#include "fracsub/core/grid.hpp"
#include "fracsub/diffusion_params.hpp"
#include "fracsub/harness/ensemble.hpp"
#include "fracsub/subordination.hpp"

namespace fracsub::harness {

struct ComparisonReport {
    double ks_distance = 0.0;
    // 1.36/sqrt(N) + 0.005; advisory, the caller decides whether to enforce it.
    double ks_threshold = 0.0;
    double sup_norm_density_gap = 0.0;
    std::vector<Moment> sample_moments;
    std::string analytic_reference;
    std::size_t n_samples = 0;
    double t = 0.0;
    // Reference CDF at the first and last grid node.
    double reference_cdf_left = 0.0;
    double reference_cdf_right = 0.0;
    std::vector<double> x;
    std::vector<double> u_analytic;
    std::vector<double> u_empirical;
    std::vector<double> cdf_analytic;
    std::vector<double> cdf_empirical;

    bool ks_within_threshold() const { return ks_distance < ks_threshold; }
};

inline double ks_threshold(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)) + 0.005; }

namespace detail {

// Empirical CDF at each probe: fraction of samples <= probe.  Also returns
// the left limits in `left`.
inline std::vector<double> empirical_cdf(const std::vector<double>& sorted, const std::vector<double>& probes,
                                         std::vector<double>* left = nullptr) {
    const double n = static_cast<double>(sorted.size());
    std::vector<double> out(probes.size());
    if (left) left->resize(probes.size());
    for (std::size_t k = 0; k < probes.size(); ++k) {
        out[k] = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), probes[k]) - sorted.begin()) / n;
        if (left) (*left)[k] = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), probes[k]) - sorted.begin()) / n;
    }
    return out;
}

// Histogram on cells centred at the grid nodes, normalized by N and the step.
inline std::vector<double> histogram_density(const std::vector<double>& samples, const UniformGrid& grid) {
    std::vector<double> counts(grid.size, 0.0);
    const double h = grid.step;
    for (double v : samples) {
        const double k = std::floor((v - grid.start) / h + 0.5);
        if (k < 0.0 || k >= static_cast<double>(grid.size)) continue;
        counts[static_cast<std::size_t>(k)] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(samples.size()) * h);
    for (double& c : counts) c *= norm;
    return counts;
}

} // namespace detail

// KS distance between the empirical CDF of `samples` and the CDF of u(., t)
// integrated from the Fourier route, both taken at the grid nodes (with the
// empirical left and right limits), plus a histogram-vs-density sup-norm gap
// over the finite density values and the sample mean and variance.
inline ComparisonReport compare_to_analytic(const std::vector<double>& samples, const DiffusionParams& params, double t,
                                            const UniformGrid& x_grid) {
    fracsub::detail::require(!samples.empty(), "compare_to_analytic: ensemble is empty");
    fracsub::detail::require(t > 0.0, "compare_to_analytic: t must be > 0");
    fracsub::detail::require(x_grid.size >= 2, "compare_to_analytic: grid needs at least 2 points");

    ComparisonReport r;
    r.n_samples = samples.size();
    r.t = t;
    r.ks_threshold = ks_threshold(samples.size());
    r.analytic_reference = "green_function_fourier";
    r.x.resize(x_grid.size);
    for (std::size_t i = 0; i < x_grid.size; ++i) r.x[i] = x_grid[i];

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> left;
    r.cdf_empirical = detail::empirical_cdf(sorted, r.x, &left);
    r.cdf_analytic = green_function_cdf(params, x_grid, t);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        r.ks_distance = std::max({r.ks_distance, std::abs(r.cdf_empirical[i] - r.cdf_analytic[i]),
                                  std::abs(left[i] - r.cdf_analytic[i])});
    }
    r.reference_cdf_left = r.cdf_analytic.front();
    r.reference_cdf_right = r.cdf_analytic.back();

    r.u_analytic = green_function_fourier(params, x_grid, t).values;
    r.u_empirical = detail::histogram_density(samples, x_grid);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        if (!std::isfinite(r.u_analytic[i])) continue;
        r.sup_norm_density_gap = std::max(r.sup_norm_density_gap, std::abs(r.u_analytic[i] - r.u_empirical[i]));
    }
    if (samples.size() >= 2) r.sample_moments = sample_moments(samples);
    return r;
}

} // namespace fracsub::harness
