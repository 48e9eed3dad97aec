#pragma once

// Zolotarev-Kanter representation of the positive beta-stable law S with
// Laplace transform exp(-s^beta), 0 < beta < 1:
//
//   S = (A(U) / E)^((1-beta)/beta),  U ~ U(0, pi),  E ~ Exp(1),
//   A(u) = sin(beta u)^(beta/(1-beta)) sin((1-beta) u) / sin(u)^(1/(1-beta)).
//
// A is increasing on (0, pi), so every functional of S reduces to a
// non-oscillatory integral over u of a function of w(u) = A(u) * c.

#include <cmath>
#include <numbers>
#include <vector>

#include "fracsub/core/quadrature.hpp"

namespace fracsub::detail {

inline double log_zolotarev_a(double beta, double u) {
    const double k = beta / (1.0 - beta);
    return k * std::log(std::sin(beta * u)) + std::log(std::sin((1.0 - beta) * u)) -
           std::log(std::sin(u)) / (1.0 - beta);
}

// u in (0, pi) with log A(u) + log_c == level, or 0 when the level lies
// below log A(0+).
inline double zolotarev_level(double beta, double log_c, double level) {
    double lo = 0.0;
    double hi = std::numbers::pi;
    const double lo_value = beta / (1.0 - beta) * std::log(beta) + std::log1p(-beta) + log_c;
    if (lo_value >= level) return 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (log_zolotarev_a(beta, mid) + log_c < level) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

enum class ZolotarevKernel {
    exp_minus_w,       // exp(-w)
    one_minus_exp,     // 1 - exp(-w)
    w_exp_minus_w,     // w exp(-w)
};

// Integral over (0, pi) of the kernel evaluated at w(u) = exp(log A(u) + log_c).
inline quad::Result zolotarev_integral(double beta, double log_c, ZolotarevKernel kernel) {
    constexpr double pi = std::numbers::pi;
    // Beyond log w = 4.0 every kernel except 1 - exp(-w) is below e^-50.
    const double u_top = zolotarev_level(beta, log_c, 4.0);
    std::vector<double> breaks;
    for (double level : {-40.0, -12.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        breaks.push_back(zolotarev_level(beta, log_c, level));
    }
    const double hi = (u_top > 0.0) ? u_top : 0.0;
    auto pieces = quad::clean_breaks(breaks, 0.0, hi);

    auto f = [&](double u) {
        const double lw = log_zolotarev_a(beta, u) + log_c;
        if (lw > 700.0) return kernel == ZolotarevKernel::one_minus_exp ? 1.0 : 0.0;
        const double w = std::exp(lw);
        switch (kernel) {
        case ZolotarevKernel::exp_minus_w: return std::exp(-w);
        case ZolotarevKernel::one_minus_exp: return -std::expm1(-w);
        case ZolotarevKernel::w_exp_minus_w: return w * std::exp(-w);
        }
        return 0.0;
    };
    quad::Result r = (hi > 0.0) ? quad::piecewise(f, pieces, 1e-13) : quad::Result{};
    if (kernel == ZolotarevKernel::one_minus_exp) r.value += pi - hi;
    return r;
}

} // namespace fracsub::detail
