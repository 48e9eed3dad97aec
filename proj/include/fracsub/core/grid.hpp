#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fracsub/core/error.hpp"

namespace fracsub {

// Uniform grid start + i * step, i = 0 .. size - 1.
struct UniformGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t size = 0;

    static UniformGrid from_range(double min, double max, std::size_t points) {
        detail::require(points >= 2, "grid needs at least 2 points");
        detail::require(min < max, "grid min must be < max");
        return {min, (max - min) / static_cast<double>(points - 1), points};
    }

    double operator[](std::size_t i) const { return start + static_cast<double>(i) * step; }
    double front() const { return start; }
    double back() const { return (*this)[size - 1]; }

    double max_abs() const { return std::max(std::abs(front()), std::abs(back())); }
};

// Discretized function of t on a uniform grid.
struct GridFunction {
    double start = 0.0;
    double step = 1.0;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(double start_, double step_, std::vector<double> values_)
        : start(start_), step(step_), values(std::move(values_)) {
        detail::require(step > 0.0, "GridFunction step must be positive");
        for (double v : values) detail::require(std::isfinite(v), "GridFunction values must be finite");
    }

    double abscissa(std::size_t i) const { return start + static_cast<double>(i) * step; }
    std::size_t size() const { return values.size(); }
};

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

// A probability density sampled on a grid, with point masses and the mass
// that lies outside the grid carried explicitly so the total is auditable.
struct GridDensity {
    UniformGrid grid;
    std::vector<double> values;
    std::vector<Atom> atoms;
    double tail_mass_left = 0.0;
    double tail_mass_right = 0.0;
    double error_estimate = 0.0;
    double neglected_mass = 0.0;
    // Mass on [front, back] when the producer computed it more accurately
    // than the trapezoid rule (cusps, integrable singularities); NaN if not.
    double interior_mass = std::numeric_limits<double>::quiet_NaN();

    double continuous_mass() const { return std::isnan(interior_mass) ? trapezoid_mass() : interior_mass; }

    double trapezoid_mass() const {
        if (values.size() < 2) return 0.0;
        double sum = 0.5 * (values.front() + values.back());
        for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
        return sum * grid.step;
    }

    double atom_mass() const {
        double m = 0.0;
        for (const auto& a : atoms) m += a.mass;
        return m;
    }

    double total_mass() const { return continuous_mass() + atom_mass() + tail_mass_left + tail_mass_right; }
};

} // namespace fracsub
