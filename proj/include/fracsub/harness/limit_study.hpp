#pragma once

// Diffusion-limit study of a CTRW: the sup-norm gap between the rescaled
// Montroll-Weiss transform and the limit symbol on a fixed probe set, as
// tau decreases with h tied to tau by rho(h, tau) = 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "fracsub/core/error.hpp"
#include "fracsub/ctrw.hpp"
#include "fracsub/diffusion_params.hpp"

namespace fracsub::harness {

struct LimitRow {
    double tau = 0.0;
    double h = 0.0;
    double gap = 0.0;
};

inline const std::vector<double>& limit_probe_kappas() {
    static const std::vector<double> k{-4.0, -1.0, -0.25, 0.25, 0.5, 1.0, 2.0, 4.0};
    return k;
}

inline const std::vector<cplx>& limit_probe_s() {
    static const std::vector<cplx> s{{0.25, 0.0}, {1.0, 0.0}, {4.0, 0.0}, {1.0, 1.0}, {1.0, -2.0}};
    return s;
}

inline std::vector<LimitRow> ctrw_limit_study(const CtrwSpec& spec, const DiffusionParams& params,
                                              const std::vector<double>& taus) {
    fracsub::detail::require(!taus.empty(), "ctrw_limit_study: tau sequence is empty");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        fracsub::detail::require(taus[i] > 0.0, "ctrw_limit_study: tau must be > 0");
        fracsub::detail::require(i == 0 || taus[i] < taus[i - 1], "ctrw_limit_study: tau sequence must be decreasing");
    }
    std::vector<LimitRow> rows;
    rows.reserve(taus.size());
    for (double tau : taus) {
        const CtrwSpec scaled = spec.well_scaled(tau);
        double gap = 0.0;
        for (double kappa : limit_probe_kappas()) {
            for (const cplx& s : limit_probe_s()) {
                gap = std::max(gap, std::abs(montroll_weiss(scaled, kappa, s) - diffusion_limit_symbol(params, kappa, s)));
            }
        }
        rows.push_back({tau, scaled.h, gap});
    }
    return rows;
}

// gap(tau_{i+1}) <= gap(tau_i) + slack for every consecutive pair.
inline bool gaps_nonincreasing(const std::vector<LimitRow>& rows, double slack = 1e-12) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].gap > rows[i - 1].gap + slack) return false;
    }
    return true;
}

} // namespace fracsub::harness
