#pragma once

// Mittag-Leffler function E_beta on the negative real axis, the M-Wright
// function M_beta, and a product-integration Riemann-Liouville integral.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "fracsub/core/error.hpp"
#include "fracsub/core/grid.hpp"
#include "fracsub/core/quadrature.hpp"
#include "fracsub/detail/zolotarev.hpp"

namespace fracsub::special {

namespace detail {

// sin(pi f) for f in (0, 1), accurate near both ends.
inline long double sin_pi_frac(long double f) {
    return std::sin(std::numbers::pi_v<long double> * std::min(f, 1.0L - f));
}

// 1/Gamma(x), exact zero at the poles.
inline long double rgamma(long double x) {
    if (x > 0.0L) return 1.0L / std::tgamma(x);
    const long double frac = x - std::floor(x);
    if (frac == 0.0L) return 0.0L;
    // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    const long double sign = (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1.0L : -1.0L;
    return sign * sin_pi_frac(frac) * std::tgamma(1.0L - x) / std::numbers::pi_v<long double>;
}

// log|1/Gamma(x)| and its sign, usable where Gamma overflows.
struct LogValue {
    long double log_abs = -std::numeric_limits<long double>::infinity();
    int sign = 0;
};

inline LogValue log_rgamma(long double x) {
    if (x > 0.0L) return {-std::lgamma(x), 1};
    const long double fl = std::floor(x);
    const long double frac = x - fl;
    if (frac == 0.0L) return {};
    // sin(pi x) = (-1)^floor(x) sin(pi frac)
    const long double s = sin_pi_frac(frac);
    const int sign = (static_cast<long long>(fl) % 2 == 0) ? 1 : -1;
    return {std::lgamma(1.0L - x) + std::log(s) - std::log(std::numbers::pi_v<long double>), sign};
}

inline double ml_series(double beta, double z) {
    long double sum = 0.0L;
    long double comp = 0.0L;  // Kahan compensation
    long double power = 1.0L;
    for (int n = 0; n < 400; ++n) {
        const long double term = power * rgamma(static_cast<long double>(beta) * n + 1.0L);
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (n > 3 && std::abs(term) < 1e-22L) break;
        power *= z;
    }
    return static_cast<double>(sum);
}

// E_beta(-x) = sin(beta pi)/(pi beta) * int_0^inf exp(-w^(1/beta)) x / (w^2 + 2 w x cos(beta pi) + x^2) dw
inline quad::Result ml_integral(double beta, double x) {
    constexpr double pi = std::numbers::pi;
    const double c = std::cos(beta * pi);
    const double s = std::sin(beta * pi);
    const double cutoff = std::pow(46.0, beta);
    auto f = [&](double w) {
        return std::exp(-std::pow(w, 1.0 / beta)) * x / (w * w + 2.0 * w * x * c + x * x);
    };
    const double w0 = std::max(0.0, -x * c);
    std::vector<double> breaks{w0, 1.0};
    for (double k : {1.0, 4.0, 16.0}) {
        breaks.push_back(w0 - k * x * s);
        breaks.push_back(w0 + k * x * s);
    }
    auto pieces = quad::clean_breaks(breaks, 0.0, cutoff);
    auto r = quad::piecewise(f, pieces, 1e-13);
    const double scale = s / (pi * beta);
    return {scale * r.value, scale * r.error};
}

// log of the bound x^-n Gamma(beta n) / pi >= |x^-n / Gamma(1 - beta n)|
inline long double asymptotic_envelope(double beta, long double log_x, int n) {
    return -n * log_x + std::lgamma(static_cast<long double>(beta) * n) - std::log(std::numbers::pi_v<long double>);
}

inline double ml_asymptotic(double beta, double x) {
    const long double log_x = std::log(static_cast<long double>(x));
    long double sum = 0.0L;
    long double inv = 1.0L;
    long double previous = std::numeric_limits<long double>::infinity();
    for (int n = 1; n < 200; ++n) {
        inv /= x;
        const long double envelope = asymptotic_envelope(beta, log_x, n);
        if (envelope > previous) break;  // optimal truncation
        previous = envelope;
        sum += ((n % 2 == 1) ? 1.0L : -1.0L) * inv * rgamma(1.0L - static_cast<long double>(beta) * n);
        if (std::exp(envelope) < 1e-21L * std::abs(sum)) break;
    }
    return static_cast<double>(sum);
}

// Power series of M_beta; returns NaN when it cannot be summed without
// heavy cancellation.
inline double m_wright_series(double beta, double z) {
    if (z == 0.0) return static_cast<double>(rgamma(1.0L - beta));
    const long double lz = std::log(static_cast<long double>(z));
    long double sum = 0.0L;
    long double max_term = 0.0L;
    for (int n = 0; n < 800; ++n) {
        const LogValue rg = log_rgamma(1.0L - static_cast<long double>(beta) * (n + 1));
        long double term = 0.0L;
        if (rg.sign != 0) {
            const long double lt = n * lz - std::lgamma(static_cast<long double>(n) + 1.0L) + rg.log_abs;
            term = ((n % 2 == 0) ? 1.0L : -1.0L) * rg.sign * std::exp(lt);
            max_term = std::max(max_term, std::abs(term));
            if (max_term > 1e3L) return std::numeric_limits<double>::quiet_NaN();
        }
        sum += term;
        // |1/Gamma(1 - y)| <= Gamma(y) / pi bounds the terms away from the poles
        const long double envelope = n * lz - std::lgamma(static_cast<long double>(n) + 1.0L) +
                                     std::lgamma(static_cast<long double>(beta) * (n + 1)) -
                                     std::log(std::numbers::pi_v<long double>);
        if (n > 10 && envelope < std::log(1e-22L)) return static_cast<double>(sum);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline double m_wright_integral(double beta, double z) {
    const auto r = fracsub::detail::zolotarev_integral(beta, std::log(z) / (1.0 - beta),
                                                       fracsub::detail::ZolotarevKernel::w_exp_minus_w);
    return r.value / (std::numbers::pi * (1.0 - beta) * z);
}

// E_beta(z) for complex z with Re z <= 0, used by the Fourier route when the
// skewness makes the characteristic function complex.  Accuracy ~1e-9.
inline std::complex<double> mittag_leffler_complex(double beta, std::complex<double> z) {
    if (beta == 1.0) return std::exp(z);
    const double r = std::abs(z);
    if (r == 0.0) return 1.0;
    using cld = std::complex<long double>;
    if (std::pow(r, 1.0 / beta) <= 23.0) {
        cld sum = 0.0L;
        cld power = 1.0L;
        const cld zl(z.real(), z.imag());
        for (int n = 0; n < 2000; ++n) {
            const cld term = power * rgamma(static_cast<long double>(beta) * n + 1.0L);
            sum += term;
            if (n > 5 && std::abs(term) < 1e-22L * std::max(1.0L, std::abs(sum))) break;
            power *= zl;
        }
        return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
    }
    std::complex<double> sum = 0.0;
    std::complex<double> inv = 1.0;
    const long double log_r = std::log(static_cast<long double>(r));
    long double previous = std::numeric_limits<long double>::infinity();
    for (int n = 1; n < 200; ++n) {
        inv /= z;
        const long double envelope = asymptotic_envelope(beta, log_r, n);
        if (envelope > previous) break;
        previous = envelope;
        sum -= inv * static_cast<double>(rgamma(1.0L - static_cast<long double>(beta) * n));
        if (std::exp(envelope) < 1e-18L * std::abs(sum)) break;
    }
    if (std::abs(std::arg(z)) < 0.75 * beta * std::numbers::pi) {
        sum += std::exp(std::pow(z, 1.0 / beta)) / beta;
    }
    return sum;
}

} // namespace detail

// E_beta(z) = sum_n z^n / Gamma(beta n + 1) for 0 < beta <= 1 and z <= 0.
// Absolute accuracy ~1e-12.
inline double mittag_leffler(double beta, double z) {
    fracsub::detail::require(beta > 0.0 && beta <= 1.0, "mittag_leffler: beta must lie in (0, 1]");
    fracsub::detail::require(z <= 0.0, "mittag_leffler: z must be <= 0");
    if (beta == 1.0) return std::exp(z);
    const double x = -z;
    if (x <= 1.0) return detail::ml_series(beta, z);
    if (x >= 50.0) return detail::ml_asymptotic(beta, x);
    return detail::ml_integral(beta, x).value;
}

// M-Wright function M_beta(z) = sum_n (-z)^n / (n! Gamma(1 - beta - beta n)),
// 0 < beta < 1, z >= 0.  It is the density of the inverse beta-stable
// subordinator at unit time.
inline double m_wright(double beta, double z) {
    fracsub::detail::require(beta > 0.0 && beta < 1.0, "m_wright: beta must lie in (0, 1)");
    fracsub::detail::require(z >= 0.0, "m_wright: z must be >= 0");
    if (z == 0.0 || z < 1e-8) {
        const double s = detail::m_wright_series(beta, z);
        if (!std::isnan(s)) return s;
    }
    if (z <= 3.0) {
        const double s = detail::m_wright_series(beta, z);
        if (!std::isnan(s)) return std::max(s, 0.0);
    }
    return detail::m_wright_integral(beta, z);
}

// (J^gamma f)(t) = 1/Gamma(gamma) int_0^t (t - s)^(gamma-1) f(s) ds by product
// integration with f frozen at the left node of each cell (first order).
inline GridFunction riemann_liouville_integral(const GridFunction& f, double gamma) {
    fracsub::detail::require(gamma > 0.0, "riemann_liouville_integral: gamma must be > 0");
    fracsub::detail::require(f.start == 0.0, "riemann_liouville_integral: grid must start at 0");
    const std::size_t n = f.size();
    std::vector<double> weights(n);  // m^gamma - (m-1)^gamma, m = 1..n-1
    for (std::size_t m = 1; m < n; ++m) {
        weights[m] = std::pow(static_cast<double>(m), gamma) - std::pow(static_cast<double>(m - 1), gamma);
    }
    const double scale = std::pow(f.step, gamma) / std::tgamma(gamma + 1.0);
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += f.values[j] * weights[k - j];
        out[k] = scale * acc;
    }
    return {f.start, f.step, std::move(out)};
}

} // namespace fracsub::special
