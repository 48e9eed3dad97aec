#pragma once

// Green function of the space-time fractional diffusion equation by two
// independent routes: the subordination integral
//   u(x, t) = int_0^inf f_{alpha,theta}(x, t*) q(t*, t) dt*
// and Fourier inversion of u^(kappa, t) = E_beta(-psi(kappa) t^beta).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "fracsub/core/error.hpp"
#include "fracsub/core/grid.hpp"
#include "fracsub/core/quadrature.hpp"
#include "fracsub/detail/stable_table.hpp"
#include "fracsub/diffusion_params.hpp"
#include "fracsub/special_functions.hpp"
#include "fracsub/stable_laws.hpp"

namespace fracsub {

// ---------------------------------------------------------------------------
// Directing process t*(t): the inverse of the beta-stable subordinator.

// q(t*, t) = t^-beta M_beta(t* / t^beta).  Pseudo-time t* comes first.
inline double directing_density(double beta, double t_star, double t) {
    detail::require(beta > 0.0 && beta <= 1.0, "directing_density: beta must lie in (0, 1]");
    detail::require(t > 0.0, "directing_density: t must be > 0");
    detail::require(t_star >= 0.0, "directing_density: t_star must be >= 0");
    if (beta == 1.0) throw DegenerateLaw("directing_density: beta = 1 gives the point mass at t_star = t");
    const double scale = std::pow(t, beta);
    return special::m_wright(beta, t_star / scale) / scale;
}

// P(t*(t) > t_star) = P(leading(t_star) < t) = F_S(t t_star^(-1/beta)).
inline double directing_survival(double beta, double t_star, double t) {
    detail::require(beta > 0.0 && beta <= 1.0, "directing_survival: beta must lie in (0, 1]");
    detail::require(t > 0.0, "directing_survival: t must be > 0");
    if (t_star <= 0.0) return 1.0;
    if (beta == 1.0) return t_star < t ? 1.0 : 0.0;
    return extremal_stable_cdf(ExtremalStableLaw(beta), t * std::pow(t_star, -1.0 / beta));
}

inline double directing_cdf(double beta, double t_star, double t) {
    detail::require(beta > 0.0 && beta <= 1.0, "directing_cdf: beta must lie in (0, 1]");
    detail::require(t > 0.0, "directing_cdf: t must be > 0");
    if (t_star <= 0.0) return 0.0;
    if (beta == 1.0) return t_star < t ? 0.0 : 1.0;
    return extremal_stable_survival(ExtremalStableLaw(beta), t * std::pow(t_star, -1.0 / beta));
}

inline double directing_quantile(double beta, double p, double t) {
    detail::require(p > 0.0 && p < 1.0, "directing_quantile: p must lie in (0, 1)");
    detail::require(t > 0.0, "directing_quantile: t must be > 0");
    if (beta == 1.0) return t;
    // work with the smaller of the two tail probabilities
    auto g = [&](double log_ts) {
        const double ts = std::exp(log_ts);
        return p < 0.5 ? directing_cdf(beta, ts, t) - p : (1.0 - p) - directing_survival(beta, ts, t);
    };
    const double mid = beta * std::log(t);
    double lo = mid - 1.0;
    double hi = mid + 1.0;
    while (g(lo) > 0.0) lo -= 2.0;
    while (g(hi) < 0.0) hi += 1.0;
    std::uintmax_t iterations = 200;
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iterations);
    return std::exp(0.5 * (r.first + r.second));
}

// ---------------------------------------------------------------------------
// Parent process y(t*): alpha-stable Levy motion in operational time.

namespace detail {

// f(x, t*) = t*^(-1/alpha) L(x t*^(-1/alpha)) with a cached interpolant of L
// where one is available.
class ParentEvaluator {
public:
    explicit ParentEvaluator(const StableLaw& law) : law_(law) {
        if (StableTable::suitable(law)) table_ = StableTable::get(law);
    }

    double density(double x, double t_star) const {
        const double c = std::pow(t_star, -1.0 / law_.alpha());
        const double y = x * c;
        if (!std::isfinite(y)) return 0.0;  // far tail, where L(y) ~ |y|^(-alpha-1)
        if (!std::isfinite(c)) return x == 0.0 ? c : 0.0;
        return c * standard_density(y);
    }
    double cdf(double x, double t_star) const {
        const double y = x * std::pow(t_star, -1.0 / law_.alpha());
        return table_ ? table_->cdf(y) : stable_cdf(law_, y);
    }
    double survival(double x, double t_star) const {
        const double y = x * std::pow(t_star, -1.0 / law_.alpha());
        return table_ ? table_->survival(y) : stable_survival(law_, y);
    }

private:
    double standard_density(double y) const {
        if (table_) return table_->density(y);
        if (!std::isfinite(y)) return 0.0;
        return stable_density(law_, y);
    }

    StableLaw law_;
    std::shared_ptr<const StableTable> table_;
};

} // namespace detail

inline double parent_density(const StableLaw& law, double x, double t_star) {
    detail::require(t_star > 0.0, "parent_density: t_star must be > 0");
    const double c = std::pow(t_star, -1.0 / law.alpha());
    return c * stable_density(law, x * c);
}

inline double parent_cdf(const StableLaw& law, double x, double t_star) {
    detail::require(t_star > 0.0, "parent_cdf: t_star must be > 0");
    return stable_cdf(law, x * std::pow(t_star, -1.0 / law.alpha()));
}

// ---------------------------------------------------------------------------
// Subordination integral.

namespace detail {

struct SubordinationQuadrature {
    double beta;
    double t;
    std::vector<double> breaks;  // in t*, first piece is [0, breaks[1]]
    double neglected;            // directing mass beyond breaks.back()

    SubordinationQuadrature(double beta_, double t_) : beta(beta_), t(t_) {
        breaks.push_back(0.0);
        for (double p : {1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-7, 1.0 - 1e-10}) {
            breaks.push_back(directing_quantile(beta, p, t));
        }
        neglected = directing_survival(beta, breaks.back(), t);
    }

    // int_0^T* g(t*) q(t*, t) dt*; tanh-sinh on the first piece where the
    // parent density may carry a t*^(-1/alpha) singularity.
    template <class G>
    quad::Result integrate(G&& g, double extra_break) const {
        auto f = [&](double ts) { return ts > 0.0 ? g(ts) * directing_density(beta, ts, t) : 0.0; };
        std::vector<double> b = breaks;
        if (extra_break > 0.0) b.push_back(extra_break);
        b = quad::clean_breaks(std::move(b), 0.0, breaks.back());
        quad::Result r = quad::tanh_sinh(f, b[0], b[1], 1e-11);
        r += quad::piecewise(f, std::span(b).subspan(1), 1e-10, 200, 1e-15);
        return r;
    }
};

} // namespace detail

// u(x, t) on the grid by adaptive quadrature in t*.  Mass outside the grid is
// computed by subordinating the parent distribution function.
inline GridDensity subordinate_density(const DiffusionParams& params, const UniformGrid& x_grid, double t) {
    detail::require(t > 0.0, "subordinate_density: t must be > 0");
    detail::require(x_grid.size >= 2, "subordinate_density: grid needs at least 2 points");
    const StableLaw& law = params.space_law();
    const double beta = params.beta();
    const double alpha = params.alpha();
    const detail::ParentEvaluator parent(law);

    GridDensity out;
    out.grid = x_grid;
    out.values.resize(x_grid.size);

    if (beta == 1.0) {
        for (std::size_t i = 0; i < x_grid.size; ++i) out.values[i] = parent.density(x_grid[i], t);
        out.tail_mass_left = parent.cdf(x_grid.front(), t);
        out.tail_mass_right = parent.survival(x_grid.back(), t);
        out.interior_mass = 1.0 - out.tail_mass_left - out.tail_mass_right;
        return out;
    }

    const detail::SubordinationQuadrature quadrature(beta, t);
    const bool symmetric = params.theta() == 0.0;
    std::map<double, double> cache;
    double worst = 0.0;
    for (std::size_t i = 0; i < x_grid.size; ++i) {
        const double x = symmetric ? std::abs(x_grid[i]) : x_grid[i];
        if (symmetric) {
            // reuse mirrored nodes so that u(-x) == u(x) exactly
            const auto it = cache.lower_bound(x - 1e-12 * std::max(1.0, x));
            if (it != cache.end() && std::abs(it->first - x) <= 1e-12 * std::max(1.0, x)) {
                out.values[i] = it->second;
                continue;
            }
        }
        if (x == 0.0 && alpha <= 1.0) {
            // int t*^(-1/alpha) q dt* diverges at the origin
            out.values[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        // the parent density peaks in t* where |x| t*^(-1/alpha) ~ 1
        const auto r = quadrature.integrate([&](double ts) { return parent.density(x, ts); }, std::pow(std::abs(x), alpha));
        worst = std::max(worst, r.error);
        if (!(r.error <= 1e-7)) {
            throw NumericalError("subordinate_density: quadrature did not converge", r.error, "x=" + std::to_string(x));
        }
        out.values[i] = std::max(r.value, 0.0);
        if (symmetric) cache.emplace(x, out.values[i]);
    }

    const double lo = x_grid.front();
    const double hi = x_grid.back();
    const auto left = quadrature.integrate([&](double ts) { return parent.cdf(lo, ts); }, std::pow(std::abs(lo), alpha));
    const auto right = quadrature.integrate([&](double ts) { return parent.survival(hi, ts); }, std::pow(std::abs(hi), alpha));
    const auto inside = quadrature.integrate(
        [&](double ts) { return std::max(0.0, 1.0 - parent.cdf(lo, ts) - parent.survival(hi, ts)); }, -1.0);
    out.tail_mass_left = left.value;
    out.tail_mass_right = right.value;
    out.interior_mass = inside.value;
    out.error_estimate = std::max({worst, left.error, right.error, inside.error});
    out.neglected_mass = quadrature.neglected;
    return out;
}

// ---------------------------------------------------------------------------
// Fourier route.

namespace detail {

// Inverts u^(kappa) = E_beta(-psi(kappa)) (t = 1) by composite Gauss-Legendre
// on [0, K] and the algebraic expansion of E_beta beyond K, whose terms are
// integrated along a contour rotated into the decaying half-plane.
class FourierInverter {
public:
    static constexpr double max_panels = 1e5;

    FourierInverter(const DiffusionParams& params, double x_max) : params_(params) {
        const double alpha = params.alpha();
        const double beta = params.beta();
        const double theta = params.theta();
        const double half_pi = std::numbers::pi / 2.0;

        if (beta == 1.0) {
            const double c = std::cos(theta * half_pi);
            if (c < 1e-12) throw DegenerateLaw("green_function_fourier: the law is a point mass");
            cutoff_ = std::pow(40.0 / c, 1.0 / alpha);
        } else {
            // E_beta(-w) ~ sum_k (-1)^(k+1) w^-k / Gamma(1 - beta k), w = kappa^alpha e^(i theta pi/2)
            constexpr double w_min = 100.0;
            cutoff_ = std::max(1.0, std::pow(w_min, 1.0 / alpha));
            const long double log_w = std::log(static_cast<long double>(w_min));
            long double previous = std::numeric_limits<long double>::infinity();
            for (int k = 1; k <= 12; ++k) {
                const long double envelope = special::detail::asymptotic_envelope(beta, log_w, k);
                if (envelope > previous) break;
                previous = envelope;
                const double sign = (k % 2) ? 1.0 : -1.0;
                const double g = static_cast<double>(special::detail::rgamma(1.0L - static_cast<long double>(beta) * k));
                tail_.push_back({sign * g * std::polar(1.0, -k * theta * half_pi), k * alpha});
                // the first omitted term bounds the remainder; integrated over [K, inf)
                const double next = std::exp(static_cast<double>(special::detail::asymptotic_envelope(beta, log_w, k + 1)));
                truncation_ = next * cutoff_ / std::max((k + 1) * alpha - 1.0, 1e-3) / std::numbers::pi;
                if (next < 1e-16) break;
            }
        }

        std::vector<double> breaks{0.0};
        const double first = std::min(1.0, cutoff_);
        for (int j = 48; j >= 1; --j) breaks.push_back(first * std::ldexp(1.0, -j));
        const double width = std::min(0.5, 2.5 / std::max(1.0, x_max));
        const double needed = std::ceil((cutoff_ - first) / width);
        if (needed > max_panels) {
            // small alpha: the characteristic function decays too slowly to resolve the oscillations
            throw NumericalError("green_function_fourier: cutoff too large for oscillatory quadrature", needed,
                                 "cutoff=" + std::to_string(cutoff_));
        }
        const auto panels = static_cast<std::size_t>(needed);
        for (std::size_t p = 0; p <= panels; ++p) breaks.push_back(first + (cutoff_ - first) * p / std::max<std::size_t>(panels, 1));
        breaks = quad::clean_breaks(std::move(breaks), 0.0, cutoff_);
        nodes_ = quad::gauss_legendre_panels(breaks);
        phi_.resize(nodes_.nodes.size());
        for (std::size_t j = 0; j < phi_.size(); ++j) phi_[j] = characteristic(nodes_.nodes[j]);
    }

    double density(double x) const {
        std::complex<double> sum = 0.0;
        for (std::size_t j = 0; j < phi_.size(); ++j) sum += nodes_.weights[j] * std::polar(1.0, -nodes_.nodes[j] * x) * phi_[j];
        for (const auto& term : tail_) {
            if (term.coeff == 0.0) continue;
            if (x == 0.0 && term.power <= 1.0) return std::numeric_limits<double>::infinity();
            sum += term.coeff * tail_integral(x, term.power);
        }
        return std::max(sum.real() / std::numbers::pi, 0.0);
    }

    // Gil-Pelaez: F(x) = 1/2 - (1/pi) int_0^inf Im(e^(-i kappa x) u^(kappa)) / kappa dkappa
    double cdf(double x) const {
        double sum = 0.0;
        for (std::size_t j = 0; j < phi_.size(); ++j) {
            sum += nodes_.weights[j] * (std::polar(1.0, -nodes_.nodes[j] * x) * phi_[j]).imag() / nodes_.nodes[j];
        }
        for (const auto& term : tail_) {
            if (term.coeff == 0.0) continue;
            sum += (term.coeff * tail_integral(x, term.power + 1.0)).imag();
        }
        return std::clamp(0.5 - sum / std::numbers::pi, 0.0, 1.0);
    }

    double truncation_error() const { return truncation_; }
    double cutoff() const { return cutoff_; }

private:
    struct TailTerm {
        std::complex<double> coeff;
        double power;
    };

    std::complex<double> characteristic(double kappa) const {
        const auto psi = riesz_feller_symbol(params_.space_law(), kappa);
        const double beta = params_.beta();
        if (beta == 1.0) return std::exp(-psi);
        if (params_.theta() == 0.0) return special::mittag_leffler(beta, -psi.real());
        return special::detail::mittag_leffler_complex(beta, -psi);
    }

    // int_K^inf e^(-i kappa x) kappa^-p dkappa, rotated to kappa = K -+ i v/|x|.
    std::complex<double> tail_integral(double x, double p) const {
        const double k = cutoff_;
        if (x == 0.0) return std::pow(k, 1.0 - p) / (p - 1.0);
        const double ax = std::abs(x);
        const std::complex<double> dir(0.0, x > 0.0 ? -1.0 : 1.0);
        std::vector<double> breaks{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 45.0};
        for (double m : {0.25, 1.0, 4.0}) breaks.push_back(m * k * ax);
        breaks = quad::clean_breaks(std::move(breaks), 0.0, 45.0);
        const auto set = quad::gauss_legendre_panels(breaks);
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < set.nodes.size(); ++j) {
            const double v = set.nodes[j];
            s += set.weights[j] * std::exp(-v) * std::pow(k + dir * (v / ax), -p);
        }
        return dir * std::polar(1.0, -k * x) * s / ax;
    }

    DiffusionParams params_;
    double cutoff_ = 1.0;
    double truncation_ = 0.0;
    std::vector<TailTerm> tail_;
    quad::NodeSet nodes_;
    std::vector<std::complex<double>> phi_;
};

} // namespace detail

// u(x, t) on the grid by Fourier inversion of the Mittag-Leffler
// characteristic function, using u(x, t) = t^(-beta/alpha) u(x t^(-beta/alpha), 1).
inline GridDensity green_function_fourier(const DiffusionParams& params, const UniformGrid& x_grid, double t) {
    detail::require(t > 0.0, "green_function_fourier: t must be > 0");
    detail::require(x_grid.size >= 2, "green_function_fourier: grid needs at least 2 points");
    const double scale = std::pow(t, -params.beta() / params.alpha());
    const detail::FourierInverter inverter(params, x_grid.max_abs() * scale);
    if (inverter.truncation_error() > 1e-5) {
        throw NumericalError("green_function_fourier: characteristic-function tail too slow", inverter.truncation_error());
    }
    GridDensity out;
    out.grid = x_grid;
    out.values.resize(x_grid.size);
    for (std::size_t i = 0; i < x_grid.size; ++i) out.values[i] = scale * inverter.density(x_grid[i] * scale);
    const double f_lo = inverter.cdf(x_grid.front() * scale);
    const double f_hi = inverter.cdf(x_grid.back() * scale);
    out.tail_mass_left = f_lo;
    out.tail_mass_right = 1.0 - f_hi;
    out.interior_mass = f_hi - f_lo;
    out.error_estimate = inverter.truncation_error();
    return out;
}

// Distribution function of u(., t) at the grid nodes, by the Fourier route.
inline std::vector<double> green_function_cdf(const DiffusionParams& params, const UniformGrid& x_grid, double t) {
    detail::require(t > 0.0, "green_function_cdf: t must be > 0");
    const double scale = std::pow(t, -params.beta() / params.alpha());
    const detail::FourierInverter inverter(params, x_grid.max_abs() * scale);
    std::vector<double> out(x_grid.size);
    for (std::size_t i = 0; i < x_grid.size; ++i) out[i] = inverter.cdf(x_grid[i] * scale);
    return out;
}

// ---------------------------------------------------------------------------
// q(t*, t) = (J^(1-beta) r)(t) with r(t, t*) = t*^(-1/beta) L_beta^-beta(t t*^(-1/beta)),
// the density of the leading process at pseudo-time t*.  Returns the largest
// deviation from directing_density over the grid nodes t > 0.
inline double verify_q_via_rl_integral(double beta, const UniformGrid& t_grid, double t_star) {
    detail::require(beta > 0.0 && beta < 1.0, "verify_q_via_rl_integral: beta must lie in (0, 1)");
    detail::require(t_star > 0.0, "verify_q_via_rl_integral: t_star must be > 0");
    detail::require(t_grid.start == 0.0, "verify_q_via_rl_integral: time grid must start at 0");
    const ExtremalStableLaw law(beta);
    const double c = std::pow(t_star, -1.0 / beta);
    std::vector<double> r(t_grid.size);
    for (std::size_t k = 0; k < t_grid.size; ++k) r[k] = c * extremal_stable_density(law, t_grid[k] * c);
    const auto q = special::riemann_liouville_integral(GridFunction(0.0, t_grid.step, std::move(r)), 1.0 - beta);
    double worst = 0.0;
    for (std::size_t k = 1; k < t_grid.size; ++k) {
        worst = std::max(worst, std::abs(q.values[k] - directing_density(beta, t_star, t_grid[k])));
    }
    return worst;
}

} // namespace fracsub
