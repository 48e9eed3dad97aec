#pragma once

// Monte-Carlo ensembles of subordinated paths observed at fixed physical
// times.  Path i is a pure function of (master_seed, i), so results do not
// depend on how paths are spread over workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <new>
#include <string>
#include <thread>
#include <vector>

#include "fracsub/core/error.hpp"
#include "fracsub/core/grid.hpp"
#include "fracsub/core/rng.hpp"
#include "fracsub/diffusion_params.hpp"
#include "fracsub/paths.hpp"

namespace fracsub::harness {

struct GridSpec {
    double min = -10.0;
    double max = 10.0;
    std::size_t points = 401;

    UniformGrid grid() const { return UniformGrid::from_range(min, max, points); }
};

struct RunConfig {
    DiffusionParams params{2.0, 0.0, 1.0};
    std::size_t n_paths = 1000;
    int n_steps = 10000;
    double tau_star = 0.01;
    std::uint64_t master_seed = 1;
    std::vector<double> observation_times{1.0};
    GridSpec x_grid;
    std::string output_dir = "run";

    void validate() const {
        detail::require(n_paths >= 1, "run config: n_paths must be >= 1");
        detail::require(n_steps >= 1, "run config: n_steps must be >= 1");
        RefinementLevel check(tau_star);
        (void)check;
        detail::require(!observation_times.empty(), "run config: at least one observation time");
        for (std::size_t i = 0; i < observation_times.size(); ++i) {
            detail::require(observation_times[i] > 0.0, "run config: observation times must be > 0");
            detail::require(i == 0 || observation_times[i] > observation_times[i - 1], "run config: observation times must be sorted");
        }
        detail::require(x_grid.min < x_grid.max, "run config: grid min must be < max");
        detail::require(x_grid.points >= 2, "run config: grid needs at least 2 points");
    }
};

// values[k][i]: position of path i at observation_times[k].
struct Ensemble {
    std::vector<double> times;
    std::vector<std::vector<double>> values;
};

// Thrown when memory runs out mid-run; `completed` paths (a prefix by index)
// were finished.
class ResourceExhausted : public std::runtime_error {
public:
    ResourceExhausted(const std::string& what, std::size_t completed)
        : std::runtime_error(what), completed_(completed) {}
    std::size_t completed() const noexcept { return completed_; }

private:
    std::size_t completed_;
};

// Positions of path `index` at the sorted times; the walk continues past
// n_steps when a time lies beyond the stored path, which leaves the law
// unchanged.
inline std::vector<double> observe_path(const RunConfig& config, std::uint64_t index) {
    RngStream time_rng(config.master_seed, time_stream(index));
    RngStream space_rng(config.master_seed, space_stream(index));
    SubordinatedWalker walker(config.params, RefinementLevel(config.tau_star), time_rng, space_rng);
    std::vector<double> out;
    out.reserve(config.observation_times.size());
    for (double t : config.observation_times) {
        walker.advance_to(t);
        out.push_back(walker.position());
    }
    return out;
}

inline Ensemble run_ensemble(const RunConfig& config, unsigned workers = 1) {
    config.validate();
    const std::size_t n = config.n_paths;
    const std::size_t m = config.observation_times.size();
    Ensemble e;
    e.times = config.observation_times;
    try {
        e.values.assign(m, std::vector<double>(n));
    } catch (const std::bad_alloc&) {
        throw ResourceExhausted("run_ensemble: cannot allocate the ensemble", 0);
    }

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(n, 1024))));
    // Fixed contiguous blocks: path i always lands in slot i.
    std::vector<std::size_t> done(workers, 0);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](unsigned w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        try {
            for (std::size_t i = lo; i < hi; ++i) {
                const auto obs = observe_path(config, i);
                for (std::size_t k = 0; k < m; ++k) e.values[k][i] = obs[k];
                done[w] = i + 1 - lo;
            }
        } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::bad_alloc&) {
            // the finished prefix is the first block's progress plus any complete blocks before it
            std::size_t prefix = 0;
            for (unsigned w = 0; w < workers; ++w) {
                prefix += done[w];
                if (done[w] < n * (w + 1) / workers - n * w / workers) break;
            }
            throw ResourceExhausted("run_ensemble: out of memory", prefix);
        }
    }
    return e;
}

// Sample mean and variance with standard errors.
struct Moment {
    int order = 0;
    double value = 0.0;
    double standard_error = 0.0;
};

inline std::vector<Moment> sample_moments(const std::vector<double>& x) {
    detail::require(x.size() >= 2, "sample_moments: need at least 2 samples");
    const double n = static_cast<double>(x.size());
    long double s1 = 0.0L;
    for (double v : x) s1 += v;
    const double mean = static_cast<double>(s1 / n);
    long double m2 = 0.0L;
    long double m4 = 0.0L;
    for (double v : x) {
        const long double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double var = static_cast<double>(m2 / (n - 1.0));
    const double mu4 = static_cast<double>(m4 / n);
    const double var_se = std::sqrt(std::max(0.0, (mu4 - var * var * (n - 3.0) / (n - 1.0)) / n));
    return {{1, mean, std::sqrt(var / n)}, {2, var, var_se}};
}

// Least-squares slope of log(variance) against log(t).
inline double fit_power_exponent(const std::vector<double>& t, const std::vector<double>& v) {
    detail::require(t.size() == v.size() && t.size() >= 2, "fit_power_exponent: need matching series of length >= 2");
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    const double n = static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x = std::log(t[i]);
        const double y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace fracsub::harness
