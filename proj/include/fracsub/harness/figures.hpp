#pragma once

// Figure data for the three case studies: the leading process (fig 1), the
// parent process (fig 2) and the subordinated path built from both (fig 3).
// Left: alpha = 2, beta = 0.8.  Right: alpha = 1.5, beta = 0.9.  Each figure
// uses 10000 steps at tau* = 1 drawn from streams 0 (time) and 1 (space),
// and its data is checked statistically before anything is emitted.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "fracsub/core/error.hpp"
#include "fracsub/core/rng.hpp"
#include "fracsub/diffusion_params.hpp"
#include "fracsub/harness/compare.hpp"
#include "fracsub/paths.hpp"
#include "fracsub/stable_laws.hpp"

namespace fracsub::harness {

enum class Side { left, right };

inline DiffusionParams figure_params(Side side) {
    return side == Side::left ? DiffusionParams(2.0, 0.0, 0.8) : DiffusionParams(1.5, 0.0, 0.9);
}

inline constexpr int figure_steps = 10000;

struct FigureData {
    std::string name;     // e.g. "fig1_left"
    std::string csv;
    std::string gnuplot;
    double check_statistic = 0.0;  // KS of the increments (0 for fig 3)
    double check_threshold = 0.0;
};

class FigureCheckFailed : public NumericalError {
public:
    FigureCheckFailed(const std::string& what, double statistic) : NumericalError(what, statistic, "reproduce_figures") {}
};

namespace detail {

inline double increments_ks(const SamplePath& p, double scale, const auto& cdf) {
    std::vector<double> inc(p.values.size() - 1);
    for (std::size_t n = 1; n < p.values.size(); ++n) inc[n - 1] = (p.values[n] - p.values[n - 1]) / scale;
    std::sort(inc.begin(), inc.end());
    const double m = static_cast<double>(inc.size());
    double d = 0.0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
        const double f = cdf(inc[i]);
        d = std::max({d, std::abs((i + 1) / m - f), std::abs(i / m - f)});
    }
    return d;
}

inline std::string two_column_csv(const char* header, const SamplePath& p) {
    std::ostringstream os;
    os << std::setprecision(17) << header << '\n';
    for (std::size_t i = 0; i < p.size(); ++i) os << i << ',' << p.epochs[i] << ',' << p.values[i] << '\n';
    return os.str();
}

inline std::string gnuplot_script(const std::string& name, const std::string& title, const std::string& xlabel,
                                  const std::string& ylabel, int xcol, int ycol) {
    std::ostringstream os;
    os << "# gnuplot script for " << name << ".csv\n"
       << "set datafile separator ','\n"
       << "set key off\n"
       << "set title '" << title << "'\n"
       << "set xlabel '" << xlabel << "'\n"
       << "set ylabel '" << ylabel << "'\n"
       << "set terminal pngcairo size 800,600\n"
       << "set output '" << name << ".png'\n"
       << "plot '" << name << ".csv' skip 1 using " << xcol << ':' << ycol << " with steps lw 1\n";
    return os.str();
}

} // namespace detail

inline FigureData reproduce_figure(int figure, Side side, std::uint64_t seed) {
    fracsub::detail::require(figure >= 1 && figure <= 3, "reproduce_figures: figure must be 1, 2 or 3");
    const DiffusionParams params = figure_params(side);
    const RefinementLevel level(1.0);
    RngStream time_rng(seed, time_stream(0));
    RngStream space_rng(seed, space_stream(0));
    const auto tag = std::string(side == Side::left ? "left" : "right");
    const auto caption = [&] {
        std::ostringstream os;
        os << "alpha = " << params.alpha() << ", beta = " << params.beta();
        return os.str();
    }();

    FigureData out;
    out.name = "fig" + std::to_string(figure) + "_" + tag;
    out.check_threshold = ks_threshold(figure_steps);

    if (figure == 1) {
        const auto lead = leading_path(params.beta(), figure_steps, level, time_rng);
        for (std::size_t n = 1; n < lead.size(); ++n) {
            if (!(lead.values[n] >= lead.values[n - 1])) throw FigureCheckFailed("fig1: leading path is not monotone", 0.0);
        }
        const ExtremalStableLaw law(params.beta());
        out.check_statistic = detail::increments_ks(lead, level.waiting_scale(params.beta()),
                                                    [&](double s) { return extremal_stable_cdf(law, s); });
        if (out.check_statistic >= out.check_threshold) throw FigureCheckFailed("fig1: waiting-time KS check failed", out.check_statistic);
        out.csv = detail::two_column_csv("index,operational_time,physical_time", lead);
        out.gnuplot = detail::gnuplot_script(out.name, "leading process, " + caption, "t_*", "t", 2, 3);
        return out;
    }

    if (figure == 2) {
        const auto parent = parent_path(params.space_law(), figure_steps, level, space_rng);
        const StableLaw law = params.space_law();
        out.check_statistic = detail::increments_ks(parent, level.jump_scale(params.alpha()),
                                                    [&](double x) { return stable_cdf(law, x); });
        if (out.check_statistic >= out.check_threshold) throw FigureCheckFailed("fig2: jump KS check failed", out.check_statistic);
        out.csv = detail::two_column_csv("index,operational_time,x", parent);
        out.gnuplot = detail::gnuplot_script(out.name, "parent process, " + caption, "t_*", "x", 2, 3);
        return out;
    }

    // fig 3 plots the points (t_n, x_n) of the fig 1 and fig 2 data.
    const auto lead = leading_path(params.beta(), figure_steps, level, time_rng);
    const auto parent = parent_path(params.space_law(), figure_steps, level, space_rng);
    RngStream time_again(seed, time_stream(0));
    RngStream space_again(seed, space_stream(0));
    const auto path = subordinated_path(params, figure_steps, level, time_again, space_again);
    // every emitted point is some (t_n, x_n) with the largest n for its t_n
    std::size_t n = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto k = static_cast<std::size_t>(path.operational[i] / level.tau_star() + 0.5);
        const bool later_ok = k + 1 >= lead.size() || lead.values[k + 1] > lead.values[k];
        if (k < n || k >= lead.size() || path.epochs[i] != lead.values[k] || path.values[i] != parent.values[k] || !later_ok) {
            throw FigureCheckFailed("fig3: path is not the composition of the leading and parent paths", 0.0);
        }
        n = k + 1;
    }
    if (n != lead.size()) throw FigureCheckFailed("fig3: composition does not reach the last step", 0.0);
    std::ostringstream os;
    write_path_csv(os, path);
    out.csv = os.str();
    out.gnuplot = detail::gnuplot_script(out.name, "subordinated process, " + caption, "t", "x", 3, 4);
    return out;
}

} // namespace fracsub::harness
