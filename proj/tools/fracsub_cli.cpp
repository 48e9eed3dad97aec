// fracsub: command-line front end for densities, path ensembles, limit
// studies and figure data.
//
// Exit codes: 0 success, 2 invalid parameters, 3 numerical accuracy failure
// (diagnostic JSON on stderr).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracsub/ctrw.hpp"
#include "fracsub/harness.hpp"
#include "fracsub/subordination.hpp"

namespace {

using namespace fracsub;

constexpr int exit_invalid = 2;
constexpr int exit_numerical = 3;

struct Law {
    double alpha = 2.0;
    double theta = 0.0;
    double beta = 1.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "space order, 0 < alpha <= 2")->capture_default_str();
        cmd->add_option("--theta", theta, "skewness, |theta| <= min(alpha, 2 - alpha)")->capture_default_str();
        cmd->add_option("--beta", beta, "time order, 0 < beta <= 1")->capture_default_str();
    }
    DiffusionParams params() const { return {alpha, theta, beta}; }
};

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidParameter(std::string(what) + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw InvalidParameter(std::string(what) + ": empty list");
    return out;
}

std::string fmt(double v) { return harness::fmt17(v); }

int run_density(const Law& law, double t, double xmin, double xmax, std::size_t points, const std::string& method) {
    const auto params = law.params();
    detail::require(xmin < xmax, "density: xmin must be < xmax");
    detail::require(points >= 2, "density: points must be >= 2");
    const auto grid = UniformGrid::from_range(xmin, xmax, points);
    std::ostringstream os;
    if (method == "both") {
        const auto a = subordinate_density(params, grid, t);
        const auto b = green_function_fourier(params, grid, t);
        double gap = 0.0;
        os << "x,u_subordination,u_fourier\n";
        for (std::size_t i = 0; i < points; ++i) {
            if (std::isfinite(a.values[i]) && std::isfinite(b.values[i])) gap = std::max(gap, std::abs(a.values[i] - b.values[i]));
            os << fmt(grid[i]) << ',' << fmt(a.values[i]) << ',' << fmt(b.values[i]) << '\n';
        }
        std::cout << os.str();
        std::cerr << "sup_norm_gap=" << fmt(gap) << '\n';
        return 0;
    }
    const auto d = method == "fourier" ? green_function_fourier(params, grid, t) : subordinate_density(params, grid, t);
    os << "x,u\n";
    for (std::size_t i = 0; i < points; ++i) os << fmt(grid[i]) << ',' << fmt(d.values[i]) << '\n';
    std::cout << os.str();
    return 0;
}

int run_simulate(harness::RunConfig config, unsigned workers, std::size_t full_paths) {
    config.validate();
    const auto ensemble = harness::run_ensemble(config, workers);
    const auto grid = config.x_grid.grid();
    std::vector<harness::ComparisonReport> reports;
    for (std::size_t k = 0; k < ensemble.times.size(); ++k) {
        reports.push_back(harness::compare_to_analytic(ensemble.values[k], config.params, ensemble.times[k], grid));
    }
    harness::write_run(config, ensemble, reports, full_paths);
    std::cout << config.output_dir << '\n';
    return 0;
}

int run_convergence(harness::RunConfig config, const std::vector<double>& taus, unsigned workers) {
    std::ostringstream os;
    os << "tau_star,n_paths,t,ks_distance,ks_threshold\n";
    const auto grid = config.x_grid.grid();
    for (double tau : taus) {
        config.tau_star = tau;
        config.validate();
        const auto e = harness::run_ensemble(config, workers);
        const auto r = harness::compare_to_analytic(e.values.back(), config.params, e.times.back(), grid);
        os << fmt(tau) << ',' << config.n_paths << ',' << fmt(e.times.back()) << ',' << fmt(r.ks_distance) << ','
           << fmt(r.ks_threshold) << '\n';
    }
    std::cout << os.str();
    return 0;
}

int run_ctrw_limit(const std::string& waiting, double rate, const Law& law, const std::vector<double>& taus) {
    std::optional<CtrwSpec> spec;
    std::optional<DiffusionParams> limit;
    const auto params = law.params();
    if (waiting == "exp") {
        // exponential waiting with Gaussian jumps: classical diffusion limit
        spec.emplace(WaitingLaw::exponential(rate), JumpLaw::gaussian(2.0));
        limit.emplace(2.0, 0.0, 1.0);
    } else {
        auto w = waiting == "ml" ? WaitingLaw::mittag_leffler(params.beta()) : WaitingLaw::extremal_stable(params.beta());
        spec.emplace(std::move(w), JumpLaw::stable(params.space_law()));
        limit.emplace(params);
    }
    const auto rows = harness::ctrw_limit_study(*spec, *limit, taus);
    std::ostringstream os;
    os << "tau,h,gap\n";
    for (const auto& r : rows) os << fmt(r.tau) << ',' << fmt(r.h) << ',' << fmt(r.gap) << '\n';
    std::cout << os.str();
    if (!harness::gaps_nonincreasing(rows)) std::cerr << "warning: transform gap increased along the tau sequence\n";
    return 0;
}

int run_figures(int figure, const std::string& side, std::uint64_t seed, const std::string& out_dir) {
    const auto s = side == "left" ? harness::Side::left : harness::Side::right;
    const auto fig = harness::reproduce_figure(figure, s, seed);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    harness::write_text(dir / (fig.name + ".csv"), fig.csv);
    harness::write_text(dir / (fig.name + ".gp"), fig.gnuplot);
    std::cout << (dir / (fig.name + ".csv")).string() << '\n';
    return 0;
}

void print_numerical(const NumericalError& e) {
    nlohmann::json j{{"error", "numerical"}, {"message", e.what()}, {"achieved_error", e.achieved_error()}};
    if (!e.context().empty()) j["context"] = e.context();
    std::cerr << j.dump() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracsub: space-time fractional diffusion by parametric subordination"};
    app.require_subcommand(1);

    Law law;
    double t = 1.0;
    double xmin = -10.0;
    double xmax = 10.0;
    std::size_t points = 401;
    std::string method = "subordination";
    auto* density = app.add_subcommand("density", "Green function u(x, t) on a grid, as CSV on stdout");
    law.add_to(density);
    density->add_option("--t", t, "time")->capture_default_str();
    density->add_option("--xmin", xmin)->capture_default_str();
    density->add_option("--xmax", xmax)->capture_default_str();
    density->add_option("--points", points)->capture_default_str();
    density->add_option("--method", method)->check(CLI::IsMember({"subordination", "fourier", "both"}))->capture_default_str();

    harness::RunConfig config;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::size_t full_paths = 5;
    std::string times = "1";
    std::string out_dir = "run";
    std::size_t n_paths = 1000;
    int n_steps = 10000;
    double tau_star = 0.01;
    auto* simulate = app.add_subcommand("simulate-paths", "Path ensemble, comparison report and run directory");
    law.add_to(simulate);
    simulate->add_option("--n-steps", n_steps, "steps of each stored path")->capture_default_str();
    simulate->add_option("--tau-star", tau_star)->capture_default_str();
    simulate->add_option("--n-paths", n_paths)->capture_default_str();
    simulate->add_option("--seed", seed)->capture_default_str();
    simulate->add_option("--out", out_dir, "run directory")->capture_default_str();
    simulate->add_option("--t-list", times, "observation times, comma separated")->capture_default_str();
    simulate->add_option("--xmin", xmin)->capture_default_str();
    simulate->add_option("--xmax", xmax)->capture_default_str();
    simulate->add_option("--points", points)->capture_default_str();
    simulate->add_option("--workers", workers, "threads; results do not depend on it")->capture_default_str();
    simulate->add_option("--keep-paths", full_paths, "number of full paths written to paths/")->capture_default_str();

    std::string tau_list = "1e-1,1e-2,1e-3";
    auto* convergence = app.add_subcommand("convergence", "Ensemble KS distance against tau_star, as CSV");
    law.add_to(convergence);
    convergence->add_option("--tau-list", tau_list)->capture_default_str();
    convergence->add_option("--seed", seed)->capture_default_str();
    convergence->add_option("--n-paths", n_paths)->capture_default_str();
    convergence->add_option("--t", t)->capture_default_str();
    convergence->add_option("--xmin", xmin)->capture_default_str();
    convergence->add_option("--xmax", xmax)->capture_default_str();
    convergence->add_option("--points", points)->capture_default_str();
    convergence->add_option("--workers", workers)->capture_default_str();

    std::string waiting = "exp";
    double rate = 1.0;
    auto* limit = app.add_subcommand("ctrw-limit", "Montroll-Weiss transform gap against tau, as CSV");
    law.add_to(limit);
    limit->add_option("--waiting", waiting)->check(CLI::IsMember({"exp", "ml", "stable"}))->capture_default_str();
    limit->add_option("--rate", rate, "rate of exponential waiting")->capture_default_str();
    limit->add_option("--tau-list", tau_list)->capture_default_str();

    int figure = 1;
    std::string side = "left";
    std::string fig_dir = ".";
    auto* figures = app.add_subcommand("reproduce-figures", "Figure data CSV and gnuplot script");
    figures->add_option("--figure", figure)->check(CLI::IsMember({1, 2, 3}))->capture_default_str();
    figures->add_option("--side", side)->check(CLI::IsMember({"left", "right"}))->capture_default_str();
    figures->add_option("--seed", seed)->capture_default_str();
    figures->add_option("--out", fig_dir, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_invalid;
    }

    try {
        if (density->parsed()) return run_density(law, t, xmin, xmax, points, method);
        if (simulate->parsed()) {
            config.params = law.params();
            config.n_paths = n_paths;
            config.n_steps = n_steps;
            config.tau_star = tau_star;
            config.master_seed = seed;
            config.observation_times = parse_list(times, "--t-list");
            config.x_grid = {xmin, xmax, points};
            config.output_dir = out_dir;
            return run_simulate(config, workers, full_paths);
        }
        if (convergence->parsed()) {
            config.params = law.params();
            config.n_paths = n_paths;
            config.master_seed = seed;
            config.observation_times = {t};
            config.x_grid = {xmin, xmax, points};
            return run_convergence(config, parse_list(tau_list, "--tau-list"), workers);
        }
        if (limit->parsed()) return run_ctrw_limit(waiting, rate, law, parse_list(tau_list, "--tau-list"));
        if (figures->parsed()) return run_figures(figure, side, seed, fig_dir);
    } catch (const InvalidParameter& e) {
        std::cerr << nlohmann::json{{"error", "invalid_parameter"}, {"message", e.what()}}.dump() << '\n';
        return exit_invalid;
    } catch (const DegenerateLaw& e) {
        std::cerr << nlohmann::json{{"error", "invalid_parameter"}, {"message", e.what()}}.dump() << '\n';
        return exit_invalid;
    } catch (const NumericalError& e) {
        print_numerical(e);
        return exit_numerical;
    } catch (const harness::ResourceExhausted& e) {
        std::cerr << nlohmann::json{{"error", "resource_exhausted"}, {"message", e.what()}, {"completed_paths", e.completed()}}.dump()
                  << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}
