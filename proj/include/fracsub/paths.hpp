#pragma once

// Sample paths by parametric subordination.  In operational time t* = n tau*
// the leading walk t_n (waiting times) and the parent walk x_n (jumps) are
// generated independently; the subordinated path plots (t_n, x_n).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "fracsub/core/error.hpp"
#include "fracsub/core/rng.hpp"
#include "fracsub/diffusion_params.hpp"
#include "fracsub/stable_laws.hpp"

namespace fracsub {

class RefinementLevel {
public:
    explicit RefinementLevel(double tau_star) : tau_star_(tau_star) {
        detail::require(tau_star > 0.0 && tau_star <= 1.0, "refinement level: tau_star must lie in (0, 1]");
    }
    double tau_star() const { return tau_star_; }
    // Increments are tau*^(1/beta) S and tau*^(1/alpha) X.
    double waiting_scale(double beta) const { return std::pow(tau_star_, 1.0 / beta); }
    double jump_scale(double alpha) const { return std::pow(tau_star_, 1.0 / alpha); }

private:
    double tau_star_;
};

// Jump points of a right-continuous step function.  `operational` holds the
// operational time of each point when the epochs are physical time (empty
// otherwise).
struct SamplePath {
    std::vector<double> epochs;
    std::vector<double> values;
    std::vector<double> operational;

    std::size_t size() const { return epochs.size(); }
};

// x(t) = x_n for t_n <= t < t_(n+1); the last value beyond the last epoch.
inline double evaluate_path(const SamplePath& path, double t) {
    detail::require(t >= 0.0, "evaluate_path: t must be >= 0");
    detail::require(!path.epochs.empty(), "evaluate_path: empty path");
    const auto it = std::upper_bound(path.epochs.begin(), path.epochs.end(), t);
    const auto i = static_cast<std::size_t>(it - path.epochs.begin());
    return i == 0 ? path.values.front() : path.values[i - 1];
}

// t_n = sum_k tau*^(1/beta) S_k at epochs n tau*.
inline SamplePath leading_path(double beta, int n_steps, const RefinementLevel& level, RngStream& rng) {
    detail::require(n_steps >= 1, "leading_path: n_steps must be >= 1");
    const ExtremalStableLaw law(beta);
    const double scale = level.waiting_scale(beta);
    SamplePath p;
    p.epochs.resize(static_cast<std::size_t>(n_steps) + 1);
    p.values.resize(p.epochs.size());
    double t = 0.0;
    for (std::size_t n = 0; n < p.epochs.size(); ++n) {
        p.epochs[n] = static_cast<double>(n) * level.tau_star();
        if (n > 0) t += scale * sample_extremal_stable(law, rng);
        // beta = 1: t(t*) = t* exactly, not an accumulated sum
        p.values[n] = law.degenerate() ? p.epochs[n] : t;
    }
    return p;
}

// x_n = sum_k tau*^(1/alpha) X_k at epochs n tau*.
inline SamplePath parent_path(const StableLaw& law, int n_steps, const RefinementLevel& level, RngStream& rng) {
    detail::require(n_steps >= 1, "parent_path: n_steps must be >= 1");
    const double scale = level.jump_scale(law.alpha());
    SamplePath p;
    p.epochs.resize(static_cast<std::size_t>(n_steps) + 1);
    p.values.resize(p.epochs.size());
    double x = 0.0;
    for (std::size_t n = 0; n < p.epochs.size(); ++n) {
        p.epochs[n] = static_cast<double>(n) * level.tau_star();
        if (n > 0) x += scale * sample_stable(law, rng);
        p.values[n] = x;
    }
    return p;
}

namespace detail {

// Append a point at physical time t; a tie with the previous epoch keeps the
// later index, so t*(t) = tau* max{n : t_n <= t}.
inline void push_point(SamplePath& p, double t, double value, double operational) {
    if (!p.epochs.empty() && t <= p.epochs.back()) {
        p.values.back() = value;
        if (!p.operational.empty()) p.operational.back() = operational;
        return;
    }
    p.epochs.push_back(t);
    p.values.push_back(value);
    p.operational.push_back(operational);
}

} // namespace detail

// Generalized inverse t*(t) = tau* max{n : t_n <= t} of a leading path.
inline SamplePath directing_path_from_leading(const SamplePath& leading) {
    detail::require(!leading.values.empty(), "directing_path_from_leading: empty path");
    for (std::size_t i = 1; i < leading.values.size(); ++i) {
        detail::require(leading.values[i] >= leading.values[i - 1], "directing_path_from_leading: leading path must be nondecreasing");
    }
    SamplePath d;
    for (std::size_t n = 0; n < leading.values.size(); ++n) detail::push_point(d, leading.values[n], leading.epochs[n], leading.epochs[n]);
    d.operational.clear();
    return d;
}

// Stream ids of the walks that make up path `index` of an ensemble.
inline std::uint64_t time_stream(std::uint64_t index) { return 2 * index; }
inline std::uint64_t space_stream(std::uint64_t index) { return 2 * index + 1; }

// (t_n, x_n) for n = 0..n_steps from independent time and space streams.
inline SamplePath subordinated_path(const DiffusionParams& params, int n_steps, const RefinementLevel& level,
                                    RngStream& time_rng, RngStream& space_rng) {
    const auto lead = leading_path(params.beta(), n_steps, level, time_rng);
    const auto parent = parent_path(params.space_law(), n_steps, level, space_rng);
    SamplePath p;
    p.epochs.reserve(lead.size());
    p.values.reserve(lead.size());
    p.operational.reserve(lead.size());
    for (std::size_t n = 0; n < lead.size(); ++n) detail::push_point(p, lead.values[n], parent.values[n], lead.epochs[n]);
    return p;
}

inline SamplePath subordinated_path(const DiffusionParams& params, int n_steps, const RefinementLevel& level,
                                    std::uint64_t master_seed, std::uint64_t index) {
    RngStream time_rng(master_seed, time_stream(index));
    RngStream space_rng(master_seed, space_stream(index));
    return subordinated_path(params, n_steps, level, time_rng, space_rng);
}

// ---------------------------------------------------------------------------
// Streaming walkers for ensembles: they draw the same deviates, in the same
// order, as the path builders above, but stop as soon as the leading walk
// passes the requested physical times.

// Walks one subordinated path forward in physical time.  The next waiting
// time is drawn ahead and held until the walk passes it; a jump is drawn only
// when its epoch is reached.
class SubordinatedWalker {
public:
    SubordinatedWalker(const DiffusionParams& params, const RefinementLevel& level, RngStream& time_rng, RngStream& space_rng)
        : waiting_(params.beta()), jump_(params.space_law()), tau_star_(level.tau_star()),
          waiting_scale_(level.waiting_scale(params.beta())), jump_scale_(level.jump_scale(params.alpha())),
          time_rng_(time_rng), space_rng_(&space_rng) {
        t_next_ = draw_next();
    }

    // Directing process only: no jumps are drawn.
    SubordinatedWalker(double beta, const RefinementLevel& level, RngStream& time_rng)
        : waiting_(beta), jump_(2.0, 0.0), tau_star_(level.tau_star()), waiting_scale_(level.waiting_scale(beta)),
          jump_scale_(0.0), time_rng_(time_rng), space_rng_(nullptr) {
        t_next_ = draw_next();
    }

    // Advance to physical time t (nondecreasing across calls).
    void advance_to(double t) {
        detail::require(t >= t_last_, "SubordinatedWalker: times must be nondecreasing");
        t_last_ = t;
        while (t_next_ <= t) {
            ++n_;
            t_ = t_next_;
            if (space_rng_) x_ += jump_scale_ * sample_stable(jump_, *space_rng_);
            t_next_ = draw_next();
        }
    }

    double position() const { return x_; }
    double operational_time() const { return static_cast<double>(n_) * tau_star_; }
    std::uint64_t steps() const { return n_; }

private:
    double draw_next() {
        if (waiting_.degenerate()) return static_cast<double>(n_ + 1) * tau_star_;
        return t_ + waiting_scale_ * sample_extremal_stable(waiting_, time_rng_);
    }

    ExtremalStableLaw waiting_;
    StableLaw jump_;
    double tau_star_;
    double waiting_scale_;
    double jump_scale_;
    RngStream& time_rng_;
    RngStream* space_rng_;
    std::uint64_t n_ = 0;
    double t_ = 0.0;
    double x_ = 0.0;
    double t_next_ = 0.0;
    double t_last_ = 0.0;
};

// ---------------------------------------------------------------------------
// CSV: index, operational_time, physical_time, x; one row per jump point.

inline void write_path_csv(std::ostream& os, const SamplePath& path) {
    detail::require(path.operational.size() == path.size(), "write_path_csv: path carries no operational times");
    std::ostringstream buf;
    buf << std::setprecision(17);
    buf << "index,operational_time,physical_time,x\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        buf << i << ',' << path.operational[i] << ',' << path.epochs[i] << ',' << path.values[i] << '\n';
    }
    os << buf.str();
}

} // namespace fracsub
