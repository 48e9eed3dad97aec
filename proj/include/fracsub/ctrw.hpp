#pragma once

// Uncoupled continuous-time random walk: waiting and jump laws, the series
// solution p(x, t) = sum_n v_n(t) w_n(x), the compound Poisson special case,
// and the Montroll-Weiss transform with the well-scaled rescaling.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fracsub/core/error.hpp"
#include "fracsub/core/grid.hpp"
#include "fracsub/core/quadrature.hpp"
#include "fracsub/diffusion_params.hpp"
#include "fracsub/special_functions.hpp"
#include "fracsub/stable_laws.hpp"

namespace fracsub {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Waiting-time laws

struct ExponentialWaiting {
    double rate = 1.0;
};
// Survival E_beta(-t^beta).
struct MittagLefflerWaiting {
    double beta = 1.0;
};
struct ExtremalStableWaiting {
    double beta = 1.0;
};
struct DeterministicUnitWaiting {};

class WaitingLaw {
public:
    using Kind = std::variant<ExponentialWaiting, MittagLefflerWaiting, ExtremalStableWaiting, DeterministicUnitWaiting>;

    static WaitingLaw exponential(double rate) {
        detail::require(rate > 0.0, "exponential waiting: rate must be > 0");
        return WaitingLaw(ExponentialWaiting{rate}, 1.0 / rate, 1.0);
    }
    static WaitingLaw mittag_leffler(double beta) {
        detail::require(beta > 0.0 && beta <= 1.0, "Mittag-Leffler waiting: beta must lie in (0, 1]");
        return WaitingLaw(MittagLefflerWaiting{beta}, 1.0, beta);
    }
    static WaitingLaw extremal_stable(double beta) {
        detail::require(beta > 0.0 && beta <= 1.0, "extremal stable waiting: beta must lie in (0, 1]");
        return WaitingLaw(ExtremalStableWaiting{beta}, 1.0, beta);
    }
    static WaitingLaw deterministic_unit() { return WaitingLaw(DeterministicUnitWaiting{}, 1.0, 1.0); }

    const Kind& kind() const { return kind_; }
    // Declared asymptotics 1 - phi~(s) ~ lambda s^beta.
    double lambda_coeff() const { return lambda_; }
    double beta() const { return beta_; }

    // Psi(t) = P(T > t).
    double survival(double t) const {
        detail::require(t >= 0.0, "survival: t must be >= 0");
        return std::visit(
            [&](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ExponentialWaiting>) return std::exp(-k.rate * t);
                else if constexpr (std::is_same_v<K, MittagLefflerWaiting>)
                    return special::mittag_leffler(k.beta, -std::pow(t, k.beta));
                else if constexpr (std::is_same_v<K, ExtremalStableWaiting>)
                    return extremal_stable_survival(ExtremalStableLaw(k.beta), t);
                else return t < 1.0 ? 1.0 : 0.0;
            },
            kind_);
    }

    // phi(t); the deterministic law has no density.
    double density(double t) const {
        if (t < 0.0) return 0.0;
        return std::visit(
            [&](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ExponentialWaiting>) return k.rate * std::exp(-k.rate * t);
                else if constexpr (std::is_same_v<K, MittagLefflerWaiting>) return ml_density(k.beta, t);
                else if constexpr (std::is_same_v<K, ExtremalStableWaiting>) {
                    if (k.beta == 1.0) throw DegenerateLaw("extremal waiting with beta = 1 is deterministic");
                    return extremal_stable_density(ExtremalStableLaw(k.beta), t);
                } else {
                    throw DegenerateLaw("deterministic waiting time has no density");
                }
            },
            kind_);
    }

    // phi~(s) = E exp(-s T), Re s > 0 (principal branch of s^beta).
    cplx laplace(cplx s) const {
        return std::visit(
            [&](const auto& k) -> cplx {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ExponentialWaiting>) return k.rate / (k.rate + s);
                else if constexpr (std::is_same_v<K, MittagLefflerWaiting>) return 1.0 / (1.0 + std::pow(s, k.beta));
                else if constexpr (std::is_same_v<K, ExtremalStableWaiting>) return std::exp(-std::pow(s, k.beta));
                else return std::exp(-s);
            },
            kind_);
    }

    std::string name() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ExponentialWaiting>) return "exponential";
                else if constexpr (std::is_same_v<K, MittagLefflerWaiting>) return "mittag-leffler";
                else if constexpr (std::is_same_v<K, ExtremalStableWaiting>) return "extremal-stable";
                else return "deterministic";
            },
            kind_);
    }

private:
    WaitingLaw(Kind kind, double lambda, double beta) : kind_(kind), lambda_(lambda), beta_(beta) {}

    // -d/dt E_beta(-t^beta) from the spectral representation
    // Psi(t) = int_0^inf exp(-r t) K(r) dr,
    // K(r) = sin(beta pi) r^(beta-1) / (pi (r^(2 beta) + 2 r^beta cos(beta pi) + 1)).
    static double ml_density(double beta, double t) {
        if (beta == 1.0) return std::exp(-t);
        if (t == 0.0) return std::numeric_limits<double>::infinity();
        constexpr double pi = std::numbers::pi;
        const double sb = std::sin(beta * pi);
        const double cb = std::cos(beta * pi);
        auto f = [&](double u) {
            // r = u / t
            const double r = u / t;
            const double rb = std::pow(r, beta);
            return std::exp(-u) * rb * sb / (pi * (rb * rb + 2.0 * rb * cb + 1.0));
        };
        std::vector<double> breaks{0.0, 1e-8, 1e-4, 0.01, 0.1, t, 1.0, 4.0, 16.0, 40.0};
        const auto pieces = quad::clean_breaks(breaks, 0.0, 45.0);
        return quad::piecewise(f, pieces, 1e-12, 200, 1e-15).value / t;
    }

    Kind kind_;
    double lambda_;
    double beta_;
};

// ---------------------------------------------------------------------------
// Jump laws

struct StableJump {
    StableLaw law{2.0, 0.0};
};
struct GaussianJump {
    double variance = 1.0;
};
// Density tabulated on a uniform grid, linear in between and zero outside.
struct GridJump {
    GridFunction density;
    double alpha = 2.0;
    double theta = 0.0;
};

class JumpLaw {
public:
    using Kind = std::variant<StableJump, GaussianJump, GridJump>;

    static JumpLaw stable(const StableLaw& law) { return JumpLaw(StableJump{law}, 1.0, law.alpha(), law.theta()); }
    static JumpLaw gaussian(double variance) {
        detail::require(variance > 0.0, "gaussian jump: variance must be > 0");
        // 1 - exp(-v k^2 / 2) ~ (v/2) k^2
        return JumpLaw(GaussianJump{variance}, variance / 2.0, 2.0, 0.0);
    }
    // The asymptotic coefficients of a tabulated law are declared, not estimated.
    static JumpLaw from_grid(GridFunction density, double mu, double alpha, double theta) {
        detail::require(mu > 0.0, "grid jump: mu must be > 0");
        StableLaw check(alpha, theta);
        (void)check;
        for (double v : density.values) detail::require(v >= 0.0, "grid jump: density must be nonnegative");
        return JumpLaw(GridJump{std::move(density), alpha, theta}, mu, alpha, theta);
    }

    const Kind& kind() const { return kind_; }
    double mu_coeff() const { return mu_; }
    double alpha() const { return alpha_; }
    double theta() const { return theta_; }

    double density(double x) const {
        return std::visit(
            [&](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, StableJump>) return stable_density(k.law, x);
                else if constexpr (std::is_same_v<K, GaussianJump>)
                    return std::exp(-x * x / (2.0 * k.variance)) / std::sqrt(2.0 * std::numbers::pi * k.variance);
                else {
                    const auto& g = k.density;
                    const double u = (x - g.start) / g.step;
                    if (u < 0.0 || u > static_cast<double>(g.size() - 1)) return 0.0;
                    const auto i = std::min(static_cast<std::size_t>(u), g.size() - 2);
                    const double frac = u - static_cast<double>(i);
                    return (1.0 - frac) * g.values[i] + frac * g.values[i + 1];
                }
            },
            kind_);
    }

    // w^(kappa) = int exp(i kappa x) w(x) dx.
    cplx fourier(double kappa) const {
        return std::visit(
            [&](const auto& k) -> cplx {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, StableJump>) return std::exp(-riesz_feller_symbol(k.law, kappa));
                else if constexpr (std::is_same_v<K, GaussianJump>) return std::exp(-0.5 * k.variance * kappa * kappa);
                else {
                    // trapezoid sum of the piecewise-linear interpolant's samples
                    const auto& g = k.density;
                    cplx sum = 0.0;
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        const double wgt = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
                        sum += wgt * g.values[i] * std::polar(1.0, kappa * g.abscissa(i));
                    }
                    return sum * g.step;
                }
            },
            kind_);
    }

    // Density of X_1 + ... + X_n for the laws with a closed-form n-fold
    // convolution; nullopt for tabulated laws.
    std::optional<double> n_fold_density(int n, double x) const {
        if (const auto* s = std::get_if<StableJump>(&kind_)) {
            // sum of n iid strictly stable variables ~ n^(1/alpha) X
            const double c = std::pow(static_cast<double>(n), 1.0 / s->law.alpha());
            return stable_density(s->law, x / c) / c;
        }
        if (const auto* g = std::get_if<GaussianJump>(&kind_)) {
            const double v = g->variance * n;
            return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
        }
        return std::nullopt;
    }

    // Probability mass outside [lo, hi] of the n-fold law, when available.
    std::optional<std::pair<double, double>> n_fold_tails(int n, double lo, double hi) const {
        if (const auto* s = std::get_if<StableJump>(&kind_)) {
            const double c = std::pow(static_cast<double>(n), 1.0 / s->law.alpha());
            return std::pair{stable_cdf(s->law, lo / c), stable_survival(s->law, hi / c)};
        }
        if (const auto* g = std::get_if<GaussianJump>(&kind_)) {
            const double sd = std::sqrt(g->variance * n);
            return std::pair{0.5 * std::erfc(-lo / (sd * std::numbers::sqrt2)), 0.5 * std::erfc(hi / (sd * std::numbers::sqrt2))};
        }
        return std::nullopt;
    }

private:
    JumpLaw(Kind kind, double mu, double alpha, double theta) : kind_(std::move(kind)), mu_(mu), alpha_(alpha), theta_(theta) {}

    Kind kind_;
    double mu_;
    double alpha_;
    double theta_;
};

// ---------------------------------------------------------------------------
// CTRW specification with rescaling factors tau (time) and h (space).

struct CtrwSpec {
    WaitingLaw waiting;
    JumpLaw jump;
    double tau = 1.0;
    double h = 1.0;

    CtrwSpec(WaitingLaw w, JumpLaw j, double tau_ = 1.0, double h_ = 1.0)
        : waiting(std::move(w)), jump(std::move(j)), tau(tau_), h(h_) {
        detail::require(tau > 0.0, "ctrw spec: tau must be > 0");
        detail::require(h > 0.0, "ctrw spec: h must be > 0");
    }

    // rho(h, tau) = mu h^alpha / (lambda tau^beta)
    double rho() const {
        return jump.mu_coeff() * std::pow(h, jump.alpha()) / (waiting.lambda_coeff() * std::pow(tau, waiting.beta()));
    }

    // Same laws with h chosen so that rho = 1.
    CtrwSpec well_scaled(double new_tau) const {
        detail::require(new_tau > 0.0, "well_scaled: tau must be > 0");
        const double new_h = std::pow(waiting.lambda_coeff() * std::pow(new_tau, waiting.beta()) / jump.mu_coeff(),
                                      1.0 / jump.alpha());
        return CtrwSpec(waiting, jump, new_tau, new_h);
    }
};

// Psi(t) of the law, as a free function.
inline double survival(const WaitingLaw& waiting, double t) { return waiting.survival(t); }

namespace detail {

// v_n(t) = P(N(t) = n) for n = 0..n_max, unit-scaled waiting law.
inline std::vector<double> renewal_probabilities(const WaitingLaw& waiting, double t, int n_max) {
    std::vector<double> v(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (t == 0.0) {
        v[0] = 1.0;
        return v;
    }
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ExponentialWaiting>) {
                const double mt = k.rate * t;
                for (int n = 0; n <= n_max; ++n) {
                    v[n] = std::exp(n * std::log(mt) - mt - std::lgamma(n + 1.0));
                }
            } else if constexpr (std::is_same_v<K, MittagLefflerWaiting>) {
                if (k.beta == 1.0) {
                    for (int n = 0; n <= n_max; ++n) v[n] = std::exp(n * std::log(t) - t - std::lgamma(n + 1.0));
                    return;
                }
                // fractional Poisson: Poisson counts at the inverse-stable clock,
                // v_n(t) = int_0^inf e^-y y^n / n! t^-beta M_beta(y / t^beta) dy
                const double scale = std::pow(t, k.beta);
                for (int n = 0; n <= n_max; ++n) {
                    auto f = [&](double z) {
                        const double y = z * scale;
                        const double lp = (n == 0 ? 0.0 : n * std::log(y)) - y - std::lgamma(n + 1.0);
                        return std::exp(lp) * special::m_wright(k.beta, z);
                    };
                    std::vector<double> breaks{0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
                    const double peak = (n + 0.0) / scale;  // Poisson factor peaks at y = n
                    for (double m : {0.5, 1.0, 2.0}) breaks.push_back(peak * m);
                    const auto pieces = quad::clean_breaks(breaks, 0.0, 60.0);
                    v[n] = quad::piecewise(f, pieces, 1e-12, 200, 1e-16).value;
                }
            } else if constexpr (std::is_same_v<K, ExtremalStableWaiting>) {
                const ExtremalStableLaw law(k.beta);
                // P(N(t) >= n) = P(T_1 + ... + T_n <= t) = F_S(t n^(-1/beta))
                auto at_least = [&](int n) {
                    return n == 0 ? 1.0 : extremal_stable_cdf(law, t * std::pow(static_cast<double>(n), -1.0 / k.beta));
                };
                double current = at_least(0);
                for (int n = 0; n <= n_max; ++n) {
                    const double next = at_least(n + 1);
                    v[n] = std::max(current - next, 0.0);
                    current = next;
                }
            } else {
                const auto n = static_cast<long long>(std::floor(t));
                if (n <= n_max) v[static_cast<std::size_t>(n)] = 1.0;
            }
        },
        waiting.kind());
    return v;
}

// Lattice values k*dx, k = -half..half, of a density.
struct Lattice {
    double dx = 1.0;
    long half = 0;
    std::vector<double> values;  // size 2 * half + 1

    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * dx;
    }
};

// Full linear convolution a * b (trapezoid in the convolution integral),
// cut back to the lattice of a; returns the mass cut off on each side.
inline std::pair<double, double> convolve_into(const Lattice& a, const Lattice& b, Lattice& out) {
    const long na = static_cast<long>(a.values.size());
    const long nb = static_cast<long>(b.values.size());
    std::vector<double> full(static_cast<std::size_t>(na + nb - 1), 0.0);
    for (long i = 0; i < na; ++i) {
        const double ai = a.values[i];
        if (ai == 0.0) continue;
        double* dst = full.data() + i;
        for (long j = 0; j < nb; ++j) dst[j] += ai * b.values[j];
    }
    // full index m corresponds to lattice point m - a.half - b.half
    out.dx = a.dx;
    out.half = a.half;
    out.values.assign(a.values.size(), 0.0);
    double cut_left = 0.0;
    double cut_right = 0.0;
    for (long m = 0; m < static_cast<long>(full.size()); ++m) {
        const long k = m - a.half - b.half;
        const double v = full[m] * a.dx;
        if (k < -a.half) cut_left += v * a.dx;
        else if (k > a.half) cut_right += v * a.dx;
        else out.values[static_cast<std::size_t>(k + a.half)] = v;
    }
    return {cut_left, cut_right};
}

} // namespace detail

// Truncated series p(x, t) = sum_{n <= n_max} v_n(t) w_n(x) for the rescaled
// walk of `spec`, evaluated on `x_grid`.  The n = 0 term is an atom at x = 0
// of mass Psi(t / tau).  n-fold jump densities come from discrete convolution
// on a lattice with spacing x_grid.step, which therefore must contain 0.
// Throws NumericalError when the neglected mass 1 - sum v_n exceeds
// `mass_tolerance`.
inline GridDensity ctrw_series_density(const CtrwSpec& spec, const UniformGrid& x_grid, double t, int n_max,
                                       double mass_tolerance = 1e-6) {
    detail::require(n_max >= 0, "ctrw_series_density: n_max must be >= 0");
    detail::require(t >= 0.0, "ctrw_series_density: t must be >= 0");
    detail::require(x_grid.size >= 2, "ctrw_series_density: grid needs at least 2 points");
    const double dx = x_grid.step;
    const double offset = x_grid.start / dx;
    detail::require(std::abs(offset - std::round(offset)) < 1e-9, "ctrw_series_density: grid must contain the lattice through 0");

    const auto v = detail::renewal_probabilities(spec.waiting, t / spec.tau, n_max);
    double captured = 0.0;
    for (double p : v) captured += p;

    GridDensity out;
    out.grid = x_grid;
    out.values.assign(x_grid.size, 0.0);
    out.atoms.push_back({0.0, v[0]});
    out.neglected_mass = std::max(0.0, 1.0 - captured);
    if (out.neglected_mass > mass_tolerance) {
        throw NumericalError("ctrw_series_density: series truncated too early (increase n_max)", out.neglected_mass,
                             "n_max=" + std::to_string(n_max));
    }

    int last = n_max;
    while (last > 0 && v[static_cast<std::size_t>(last)] < 1e-16) --last;
    if (last == 0) return out;

    // Lattice wide enough for the output grid and for the spread of w_last.
    const long grid_lo = std::lround(x_grid.start / dx);
    const long grid_hi = grid_lo + static_cast<long>(x_grid.size) - 1;
    long half = std::max(std::abs(grid_lo), std::abs(grid_hi)) + 1;
    auto jump_density = [&](double x) { return spec.jump.density(x / spec.h) / spec.h; };

    // jump-law mass outside the lattice, when the law knows its tails
    auto w1_tail = [&](long hw) {
        const auto tails = spec.jump.n_fold_tails(1, -(hw + 0.5) * dx / spec.h, (hw + 0.5) * dx / spec.h);
        return tails ? tails->first + tails->second : 0.0;
    };

    constexpr long max_half = 1L << 12;
    while (true) {
        detail::Lattice w1;
        w1.dx = dx;
        w1.half = half;
        w1.values.resize(static_cast<std::size_t>(2 * half + 1));
        for (long k = -half; k <= half; ++k) w1.values[static_cast<std::size_t>(k + half)] = jump_density(k * dx);

        std::vector<double> acc(x_grid.size, 0.0);
        double cut_max = w1_tail(half);
        double lost = v[1] * cut_max;
        double tail_left = 0.0;
        double tail_right = 0.0;
        detail::Lattice wn = w1;
        for (int n = 1; n <= last; ++n) {
            const double vn = v[static_cast<std::size_t>(n)];
            if (n > 1) {
                detail::Lattice next;
                const auto [cl, cr] = detail::convolve_into(wn, w1, next);
                cut_max = std::max(cut_max, cl + cr);
                wn = std::move(next);
                lost += vn * (1.0 - wn.mass());
            }
            double left = 0.0;
            double right = 0.0;
            for (long k = -half; k <= half; ++k) {
                const double val = wn.values[static_cast<std::size_t>(k + half)];
                if (k < grid_lo) left += val;
                else if (k > grid_hi) right += val;
                else acc[static_cast<std::size_t>(k - grid_lo)] += vn * val;
            }
            tail_left += vn * left * dx;
            tail_right += vn * right * dx;
        }
        if (cut_max < 1e-8 || half >= max_half) {
            out.values = std::move(acc);
            for (auto& x : out.values) x = std::max(x, 0.0);
            // the outer half-cells of the trapezoid rule are lattice mass too
            out.tail_mass_left = tail_left + 0.5 * out.values.front() * dx;
            out.tail_mass_right = tail_right + 0.5 * out.values.back() * dx;
            out.error_estimate = std::max(lost, 0.0);
            return out;
        }
        half *= 2;
    }
}

// Kolmogorov-Feller solution e^(-mt) sum (mt)^n / n! w_n(x) with closed-form
// n-fold jump densities where the law has them, truncated once the Poisson
// tail drops below 1e-12 (or at n_max).
inline GridDensity compound_poisson_density(double m, const JumpLaw& jump, const UniformGrid& x_grid, double t, int n_max) {
    detail::require(m > 0.0, "compound_poisson_density: rate must be > 0");
    detail::require(t >= 0.0, "compound_poisson_density: t must be >= 0");
    detail::require(n_max >= 0, "compound_poisson_density: n_max must be >= 0");
    const double mt = m * t;

    GridDensity out;
    out.grid = x_grid;
    out.values.assign(x_grid.size, 0.0);
    out.atoms.push_back({0.0, std::exp(-mt)});
    if (t == 0.0) return out;

    if (!jump.n_fold_density(1, 0.0)) {
        // tabulated jumps: lattice convolution
        CtrwSpec spec(WaitingLaw::exponential(m), jump);
        return ctrw_series_density(spec, x_grid, t, n_max, 1.0);
    }

    double captured = std::exp(-mt);
    double tail_left = 0.0;
    double tail_right = 0.0;
    const double lo = x_grid.front();
    const double hi = x_grid.back();
    for (int n = 1; n <= n_max && 1.0 - captured >= 1e-12; ++n) {
        const double pn = std::exp(n * std::log(mt) - mt - std::lgamma(n + 1.0));
        captured += pn;
        for (std::size_t i = 0; i < x_grid.size; ++i) out.values[i] += pn * *jump.n_fold_density(n, x_grid[i]);
        const auto tails = *jump.n_fold_tails(n, lo, hi);
        tail_left += pn * tails.first;
        tail_right += pn * tails.second;
    }
    out.tail_mass_left = tail_left;
    out.tail_mass_right = tail_right;
    out.neglected_mass = std::max(0.0, 1.0 - captured);
    return out;
}

// Montroll-Weiss transform of the rescaled walk:
// (1 - phi~(tau s)) / s / (1 - w^(h kappa) phi~(tau s)).
inline cplx montroll_weiss(const CtrwSpec& spec, double kappa, cplx s) {
    detail::require(s.real() > 0.0, "montroll_weiss: Re(s) must be > 0");
    const cplx phi = spec.waiting.laplace(spec.tau * s);
    const cplx w = spec.jump.fourier(spec.h * kappa);
    return (1.0 - phi) / s / (1.0 - w * phi);
}

// s^(beta-1) / (s^beta + |kappa|^alpha i^(theta sgn kappa)).
inline cplx diffusion_limit_symbol(const DiffusionParams& params, double kappa, cplx s) {
    detail::require(s.real() > 0.0, "diffusion_limit_symbol: Re(s) must be > 0");
    const double beta = params.beta();
    const cplx sb = std::pow(s, beta);
    return sb / s / (sb + riesz_feller_symbol(params.space_law(), kappa));
}

} // namespace fracsub
