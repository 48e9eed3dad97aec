#pragma once

// Cached piecewise-Chebyshev interpolant of a two-sided stable density and
// distribution function on [-Y, Y], continued outside by the algebraic tail
// series.  Used where one law is evaluated at very many abscissae.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "fracsub/stable_laws.hpp"

namespace fracsub::detail {

class StableTable {
public:
    static constexpr double half_width = 40.0;
    static constexpr double panel = 0.5;
    static constexpr int order = 16;

    // Whether the law's density is analytic on the whole line (two-sided, not Gaussian or Cauchy).
    static bool suitable(const StableLaw& law) {
        const double a = law.alpha();
        if (a == 2.0 || a == 1.0) return false;
        return !(a < 1.0 && std::abs(law.theta()) == a);
    }

    explicit StableTable(const StableLaw& law) : law_(law) {
        // uniform panels, graded geometrically towards 0 where the peak of a
        // small-alpha density sharpens
        std::vector<double> right;
        for (double y = half_width; y > 1.0 + 1e-12; y -= panel) right.push_back(y);
        for (double y = 1.0; y > 1e-4; y *= 0.6) right.push_back(y);
        for (auto it = right.begin(); it != right.end(); ++it) breaks_.push_back(-*it);
        breaks_.push_back(0.0);
        for (auto it = right.rbegin(); it != right.rend(); ++it) breaks_.push_back(*it);

        const std::size_t panels = breaks_.size() - 1;
        density_.resize(panels * order);
        cdf_.resize(density_.size());
        for (std::size_t p = 0; p < panels; ++p) {
            const double lo = breaks_[p];
            const double width = breaks_[p + 1] - lo;
            for (int j = 0; j < order; ++j) {
                const double y = lo + 0.5 * width * (1.0 + node(j));
                density_[p * order + j] = stable_density(law, y);
                cdf_[p * order + j] = y < 0.0 ? stable_cdf(law, y) : -stable_survival(law, y);
            }
        }
    }

    double density(double y) const {
        if (std::abs(y) >= half_width) return tail_density(y);
        return interpolate(density_, y);
    }

    // For y >= 0 the table holds -survival so that the right half keeps full
    // relative accuracy.
    double cdf(double y) const {
        if (y <= -half_width) return tail_mass(-y, -law_.theta());
        if (y >= half_width) return 1.0 - tail_mass(y, law_.theta());
        const double v = interpolate(cdf_, y);
        return y < 0.0 ? v : 1.0 + v;
    }

    double survival(double y) const {
        if (y >= half_width) return tail_mass(y, law_.theta());
        if (y <= -half_width) return 1.0 - tail_mass(-y, -law_.theta());
        const double v = interpolate(cdf_, y);
        return y < 0.0 ? 1.0 - v : -v;
    }

    // Shared instance per law.
    static std::shared_ptr<const StableTable> get(const StableLaw& law) {
        static std::mutex mutex;
        static std::map<std::pair<double, double>, std::shared_ptr<const StableTable>> cache;
        const std::lock_guard lock(mutex);
        auto& slot = cache[{law.alpha(), law.theta()}];
        if (!slot) slot = std::make_shared<const StableTable>(law);
        return slot;
    }

private:
    static double node(int j) { return std::cos(std::numbers::pi * (j + 0.5) / order); }

    double interpolate(const std::vector<double>& table, double y) const {
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), y);
        const std::size_t p = std::clamp<std::size_t>(static_cast<std::size_t>(it - breaks_.begin()), 1, breaks_.size() - 1) - 1;
        const double lo = breaks_[p];
        const double u = 2.0 * (y - lo) / (breaks_[p + 1] - lo) - 1.0;
        // barycentric formula for first-kind Chebyshev points
        double num = 0.0;
        double den = 0.0;
        for (int j = 0; j < order; ++j) {
            const double d = u - node(j);
            const double w = ((j % 2) ? -1.0 : 1.0) * std::sin(std::numbers::pi * (j + 0.5) / order);
            if (d == 0.0) return table[p * order + j];
            num += w / d * table[p * order + j];
            den += w / d;
        }
        return num / den;
    }

    // L(y) = 1/(pi y) sum_k (-y^-alpha)^k Gamma(1 + k alpha)/k! sin(k pi (theta - alpha)/2), y > 0;
    // the negative half uses the mirrored law.
    double tail_density(double y) const {
        const double theta = y > 0.0 ? law_.theta() : -law_.theta();
        return tail_sum(std::abs(y), theta, false) / (std::numbers::pi * std::abs(y));
    }

    // int_y^inf of the same series, y > 0.
    double tail_mass(double y, double theta) const { return tail_sum(y, theta, true) / std::numbers::pi; }

    double tail_sum(double y, double theta, bool integrated) const {
        const double a = law_.alpha();
        const double log_y = std::log(y);
        double sum = 0.0;
        double previous = INFINITY;
        for (int k = 1; k <= 60; ++k) {
            const double log_mag = std::lgamma(1.0 + k * a) - std::lgamma(k + 1.0) - k * a * log_y;
            const double mag = std::exp(log_mag) / (integrated ? k * a : 1.0);
            if (mag > previous) break;  // asymptotic series: stop at the smallest term
            previous = mag;
            const double sign = (k % 2) ? -1.0 : 1.0;
            const double term = sign * mag * std::sin(k * std::numbers::pi * (theta - a) / 2.0);
            sum += term;
            if (mag < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }

    StableLaw law_;
    std::vector<double> breaks_;
    std::vector<double> density_;
    std::vector<double> cdf_;
};

} // namespace fracsub::detail
