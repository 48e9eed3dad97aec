#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace fracsub::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;

    Result& operator+=(const Result& other) {
        value += other.value;
        error += other.error;
        return *this;
    }
};

namespace detail {

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
    double abs_value = 0.0;  // integral of |f|
};

// 31-point Kronrod rule with the QUADPACK error estimate.
template <class F>
Panel kronrod31(F& f, double a, double b) {
    using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto& x = rule::abscissa();
    const auto& wk = rule::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 15>::weights();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    std::array<double, 16> fp{};
    std::array<double, 16> fm{};
    const double f0 = f(mid);
    double k = f0 * wk[0];
    double g = 0.0;  // Gauss-15 nodes are the even Kronrod indices, center included
    double resabs = std::abs(k);
    for (std::size_t i = 1; i < x.size(); ++i) {
        fp[i] = f(mid + half * x[i]);
        fm[i] = f(mid - half * x[i]);
        k += wk[i] * (fp[i] + fm[i]);
        resabs += wk[i] * (std::abs(fp[i]) + std::abs(fm[i]));
        if (i % 2 == 0) g += wg[i / 2] * (fp[i] + fm[i]);
    }
    g += wg[0] * f0;
    const double mean = 0.5 * k;
    double resasc = wk[0] * std::abs(f0 - mean);
    for (std::size_t i = 1; i < x.size(); ++i) resasc += wk[i] * (std::abs(fp[i] - mean) + std::abs(fm[i] - mean));
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    double err = std::abs((k - g) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, k * half, err, resabs};
}

} // namespace detail

// Globally adaptive 31-point Gauss-Kronrod on [a, b].  Stops when the error
// estimate is below tol times the integral of |f| (or below abs_tol), or
// after max_panels bisections.
template <class F>
Result gauss_kronrod(F&& f, double a, double b, double tol = 1e-13, unsigned max_panels = 200, double abs_tol = 0.0) {
    if (!(b > a)) return {};
    auto cmp = [](const detail::Panel& p, const detail::Panel& q) { return p.error < q.error; };
    std::vector<detail::Panel> heap{detail::kronrod31(f, a, b)};
    double value = heap.front().value;
    double error = heap.front().error;
    double l1 = heap.front().abs_value;
    for (unsigned n = 0; n < max_panels && error > std::max(abs_tol, tol * l1); ++n) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        const detail::Panel worst = heap.back();
        heap.pop_back();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), cmp);
            break;
        }
        const detail::Panel left = detail::kronrod31(f, worst.a, m);
        const detail::Panel right = detail::kronrod31(f, m, worst.b);
        value += left.value + right.value - worst.value;
        l1 += left.abs_value + right.abs_value - worst.abs_value;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), cmp);
        // re-sum to avoid drift in the running error
        error = 0.0;
        for (const auto& p : heap) error += p.error;
    }
    return {value, error};
}

// Adaptive Gauss-Kronrod over consecutive pieces [breaks[i], breaks[i+1]].
template <class F>
Result piecewise(F&& f, std::span<const double> breaks, double tol = 1e-13, unsigned max_panels = 200,
                 double abs_tol = 0.0) {
    Result total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        total += gauss_kronrod(f, breaks[i], breaks[i + 1], tol, max_panels, abs_tol);
    }
    return total;
}

// Double-exponential rule for integrands with endpoint singularities.
template <class F>
Result tanh_sinh(F&& f, double a, double b, double tol = 1e-12) {
    if (!(b > a)) return {};
    // integrate() grows its tables lazily, so one instance per thread
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
    double err = 0.0;
    double l1 = 0.0;
    const double v = integrator.integrate(f, a, b, tol, &err, &l1);
    return {v, err};
}

// Sorted, de-duplicated breakpoints restricted to [lo, hi] with both ends present.
inline std::vector<double> clean_breaks(std::vector<double> points, double lo, double hi) {
    points.push_back(lo);
    points.push_back(hi);
    std::erase_if(points, [&](double p) { return !(p >= lo && p <= hi) || !std::isfinite(p); });
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end(),
                             [](double x, double y) { return std::abs(x - y) <= 1e-15 * std::max(1.0, std::abs(x)); }),
                 points.end());
    return points;
}

// Fixed composite Gauss-Legendre nodes over the panels given by `breaks`.
struct NodeSet {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline NodeSet gauss_legendre_panels(std::span<const double> breaks) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& abscissa = rule::abscissa();
    const auto& weights = rule::weights();
    NodeSet set;
    set.nodes.reserve(breaks.size() * 20);
    set.weights.reserve(breaks.size() * 20);
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double half = 0.5 * (breaks[p + 1] - breaks[p]);
        const double mid = 0.5 * (breaks[p + 1] + breaks[p]);
        for (std::size_t k = 0; k < abscissa.size(); ++k) {
            set.nodes.push_back(mid - half * abscissa[k]);
            set.weights.push_back(half * weights[k]);
            if (abscissa[k] != 0.0) {
                set.nodes.push_back(mid + half * abscissa[k]);
                set.weights.push_back(half * weights[k]);
            }
        }
    }
    return set;
}

} // namespace fracsub::quad
