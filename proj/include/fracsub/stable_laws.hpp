#pragma once

// Stable laws in the Feller parametrization (alpha, theta).  The Fourier
// convention is g^(kappa) = int e^{+i kappa x} g(x) dx, so a law has
// characteristic function E exp(i kappa X) = exp(-psi(kappa)) with the
// Riesz-Feller symbol psi(kappa) = |kappa|^alpha exp(i sgn(kappa) theta pi / 2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fracsub/core/error.hpp"
#include "fracsub/core/quadrature.hpp"
#include "fracsub/core/rng.hpp"
#include "fracsub/detail/zolotarev.hpp"

namespace fracsub {

class StableLaw {
public:
    StableLaw(double alpha, double theta) : alpha_(alpha), theta_(theta) {
        detail::require(alpha > 0.0 && alpha <= 2.0, "stable law: alpha must lie in (0, 2]");
        detail::require(std::isfinite(theta) && std::abs(theta) <= std::min(alpha, 2.0 - alpha) + 1e-15,
                        "stable law: |theta| must be <= min(alpha, 2 - alpha)");
    }

    double alpha() const { return alpha_; }
    double theta() const { return theta_; }

    // Law of -X.
    StableLaw mirrored() const { return {alpha_, -theta_}; }

private:
    double alpha_;
    double theta_;
};

// Right-extremal law L_beta^{-beta} on t >= 0, Laplace transform exp(-s^beta).
class ExtremalStableLaw {
public:
    explicit ExtremalStableLaw(double beta) : beta_(beta) {
        detail::require(beta > 0.0 && beta <= 1.0, "extremal stable law: beta must lie in (0, 1]");
    }

    double beta() const { return beta_; }
    bool degenerate() const { return beta_ == 1.0; }
    StableLaw as_stable() const { return {beta_, -beta_}; }

private:
    double beta_;
};

inline std::complex<double> riesz_feller_symbol(const StableLaw& law, double kappa) {
    if (kappa == 0.0) return 0.0;
    const double mag = std::pow(std::abs(kappa), law.alpha());
    const double phase = (kappa > 0.0 ? 1.0 : -1.0) * law.theta() * std::numbers::pi / 2.0;
    return std::polar(mag, phase);
}

// Standard (Samorodnitsky-Taqqu S1) form: E exp(i k X) =
// exp(-scale^a |k|^a (1 - i skew sgn(k) tan(pi a / 2))) for a != 1.  Matching
// with exp(-|k|^a (cos(theta pi/2) + i sgn(k) sin(theta pi/2))) gives
//   scale = cos(theta pi / 2)^(1/a),  skew = -tan(theta pi / 2) / tan(a pi / 2).
// For a = 1 the law is Cauchy with scale cos(theta pi/2) and location
// -sin(theta pi/2), which is reported in `location` with skew = 0.
struct StandardForm {
    double alpha = 2.0;
    double skew = 0.0;
    double scale = 1.0;
    double location = 0.0;
};

inline StandardForm standard_form(const StableLaw& law) {
    constexpr double pi = std::numbers::pi;
    const double a = law.alpha();
    const double half_theta = law.theta() * pi / 2.0;
    if (a == 1.0) return {1.0, 0.0, std::cos(half_theta), -std::sin(half_theta)};
    if (law.theta() == 0.0) return {a, 0.0, 1.0, 0.0};
    return {a, -std::tan(half_theta) / std::tan(a * pi / 2.0), std::pow(std::cos(half_theta), 1.0 / a), 0.0};
}

namespace detail {

constexpr double inv_sqrt_pi = 0.56418958354775628695;

// Density and right tail of a law with x >= 0 by integrating the Fourier
// inversion integral along the ray kappa = r exp(-i phi), on which the
// integrand decays exponentially.  Returns {density, survival}.
struct RayIntegrals {
    quad::Result density;
    quad::Result survival;
};

inline RayIntegrals ray_inversion(double alpha, double theta, double x, bool want_density, bool want_survival) {
    constexpr double pi = std::numbers::pi;
    const double phi_max = std::min(pi / 2.0, (pi / 2.0) * (1.0 + theta) / alpha);
    const double phi = 0.5 * phi_max;
    const double c = theta * pi / 2.0 - alpha * phi;
    const double sin_phi = std::sin(phi);
    const double cos_phi = std::cos(phi);
    const double cos_c = std::cos(c);
    const double sin_c = std::sin(c);

    // exp(re) < e^-45 beyond r_max
    double r_max = std::pow(45.0 / cos_c, 1.0 / alpha);
    if (x > 0.0) r_max = std::min(r_max, 45.0 / (x * sin_phi));

    std::vector<double> breaks;
    for (double r = r_max; r > 1e-14 * r_max; r *= 0.5) breaks.push_back(r);
    // one break per 2 pi of phase
    const double phase_end = x * r_max * cos_phi + std::pow(r_max, alpha) * std::abs(sin_c);
    const int cycles = static_cast<int>(phase_end / (2.0 * pi));
    for (int k = 1; k <= std::min(cycles, 4000); ++k) {
        // phase is monotone in r; invert by bisection
        const double target = 2.0 * pi * k;
        double lo = 0.0;
        double hi = r_max;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double ph = x * mid * cos_phi + std::pow(mid, alpha) * std::abs(sin_c);
            (ph < target ? lo : hi) = mid;
        }
        breaks.push_back(0.5 * (lo + hi));
    }
    const auto pieces = quad::clean_breaks(std::move(breaks), 0.0, r_max);

    RayIntegrals out;
    if (want_density) {
        auto f = [&](double r) {
            if (r == 0.0) return std::cos(phi);
            const double ra = std::pow(r, alpha);
            const double re = -x * r * sin_phi - ra * cos_c;
            const double im = -x * r * cos_phi - ra * sin_c;
            return std::exp(re) * std::cos(im - phi);
        };
        const auto r = quad::piecewise(f, pieces, 1e-13);
        out.density = {r.value / pi, r.error / pi};
    }
    if (want_survival) {
        auto g = [&](double r) {
            if (r == 0.0) return 0.0;
            const double ra = std::pow(r, alpha);
            const double re = -x * r * sin_phi - ra * cos_c;
            const double im = -x * r * cos_phi - ra * sin_c;
            return std::exp(re) * std::sin(im) / r;
        };
        const auto r = quad::piecewise(g, pieces, 1e-13);
        out.survival = {0.5 - phi / pi + r.value / pi, r.error / pi};
    }
    return out;
}

inline double cauchy_scale(double theta) { return std::cos(theta * std::numbers::pi / 2.0); }
inline double cauchy_location(double theta) { return -std::sin(theta * std::numbers::pi / 2.0); }

} // namespace detail

// L_alpha^theta(x) together with an absolute error estimate.
inline quad::Result stable_density_with_error(const StableLaw& law, double x) {
    const double a = law.alpha();
    const double th = law.theta();
    if (!std::isfinite(x)) return {0.0, 0.0};
    if (a == 2.0) return {0.5 * detail::inv_sqrt_pi * std::exp(-0.25 * x * x), 0.0};
    if (a == 1.0) {
        const double gamma = detail::cauchy_scale(th);
        if (gamma <= 1e-15) throw DegenerateLaw("stable law with alpha = 1, |theta| = 1 is a point mass");
        const double z = (x - detail::cauchy_location(th)) / gamma;
        return {1.0 / (std::numbers::pi * gamma * (1.0 + z * z)), 0.0};
    }
    if (x < 0.0) return stable_density_with_error(law.mirrored(), -x);
    const auto r = detail::ray_inversion(a, th, x, true, false).density;
    return {std::max(r.value, 0.0), r.error};
}

inline double stable_density(const StableLaw& law, double x) {
    const auto r = stable_density_with_error(law, x);
    if (!(r.error <= 1e-7)) {
        throw NumericalError("stable_density: quadrature did not converge", r.error,
                             "alpha=" + std::to_string(law.alpha()) + " theta=" + std::to_string(law.theta()) +
                                 " x=" + std::to_string(x));
    }
    return r.value;
}

// P(X > x).
inline double stable_survival(const StableLaw& law, double x) {
    const double a = law.alpha();
    const double th = law.theta();
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    if (x == -std::numeric_limits<double>::infinity()) return 1.0;
    if (a == 2.0) return 0.5 * std::erfc(0.5 * x);
    if (a == 1.0) {
        const double gamma = detail::cauchy_scale(th);
        const double mu = detail::cauchy_location(th);
        if (gamma <= 1e-15) return x < mu ? 1.0 : 0.0;
        const double z = (x - mu) / gamma;
        // atan-based tails lose digits for large |z|; use the complementary form
        return z > 0.0 ? std::atan(1.0 / z) / std::numbers::pi : 0.5 - std::atan(z) / std::numbers::pi;
    }
    if (x < 0.0) return 1.0 - stable_survival(law.mirrored(), -x);
    const auto r = detail::ray_inversion(a, th, x, false, true).survival;
    if (!(r.error <= 1e-7)) {
        throw NumericalError("stable_survival: quadrature did not converge", r.error);
    }
    return std::clamp(r.value, 0.0, 1.0);
}

// P(X <= x).
inline double stable_cdf(const StableLaw& law, double x) {
    if (x < 0.0 && law.alpha() != 1.0 && law.alpha() != 2.0) return stable_survival(law.mirrored(), -x);
    return 1.0 - stable_survival(law, x);
}

// Density of L_beta^{-beta}; zero for t <= 0.
inline double extremal_stable_density(const ExtremalStableLaw& law, double t) {
    if (law.degenerate()) throw DegenerateLaw("extremal stable law with beta = 1 is the unit point mass");
    if (!(t > 0.0)) return 0.0;
    return stable_density(law.as_stable(), t);
}

// P(T <= t) and P(T > t) from the Zolotarev-Kanter representation.
inline double extremal_stable_cdf(const ExtremalStableLaw& law, double t) {
    if (!(t > 0.0)) return 0.0;
    if (law.degenerate()) return t >= 1.0 ? 1.0 : 0.0;
    if (std::isinf(t)) return 1.0;
    const double b = law.beta();
    const auto r = detail::zolotarev_integral(b, -b / (1.0 - b) * std::log(t), detail::ZolotarevKernel::exp_minus_w);
    return std::clamp(r.value / std::numbers::pi, 0.0, 1.0);
}

inline double extremal_stable_survival(const ExtremalStableLaw& law, double t) {
    if (!(t > 0.0)) return 1.0;
    if (law.degenerate()) return t >= 1.0 ? 0.0 : 1.0;
    if (std::isinf(t)) return 0.0;
    const double b = law.beta();
    const auto r = detail::zolotarev_integral(b, -b / (1.0 - b) * std::log(t), detail::ZolotarevKernel::one_minus_exp);
    return std::clamp(r.value / std::numbers::pi, 0.0, 1.0);
}

// Chambers-Mallows-Stuck transformation in Weron's form, applied to the
// standard form of the law.
inline double sample_stable(const StableLaw& law, RngStream& rng) {
    constexpr double pi = std::numbers::pi;
    const StandardForm sf = standard_form(law);
    const double v = pi * (rng.uniform() - 0.5);
    const double w = rng.exponential();
    if (sf.alpha == 1.0) return sf.scale * std::tan(v) + sf.location;
    const double a = sf.alpha;
    const double zeta = sf.skew * std::tan(pi * a / 2.0);
    const double b_shift = std::atan(zeta) / a;
    const double s_factor = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * a));
    const double arg = a * (v + b_shift);
    const double x = s_factor * std::sin(arg) / std::pow(std::cos(v), 1.0 / a) *
                     std::pow(std::cos(v - arg) / w, (1.0 - a) / a);
    return sf.scale * x;
}

// Kanter's representation; beta = 1 returns exactly 1.
inline double sample_extremal_stable(const ExtremalStableLaw& law, RngStream& rng) {
    if (law.degenerate()) return 1.0;
    const double b = law.beta();
    const double u = std::numbers::pi * rng.uniform();
    const double e = rng.exponential();
    return std::exp((1.0 - b) / b * (detail::log_zolotarev_a(b, u) - std::log(e)));
}

} // namespace fracsub
