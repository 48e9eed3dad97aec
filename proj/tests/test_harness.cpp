#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fracsub/harness.hpp"
#include "fracsub/subordination.hpp"

using namespace fracsub;
using namespace fracsub::harness;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RunConfig config_for(double alpha, double theta, double beta, std::size_t n, std::vector<double> times,
                     std::uint64_t seed = 2024) {
    RunConfig c;
    c.params = DiffusionParams(alpha, theta, beta);
    c.n_paths = n;
    c.n_steps = 100;
    c.tau_star = 1e-2;
    c.master_seed = seed;
    c.observation_times = std::move(times);
    return c;
}

double variance(const std::vector<double>& x) { return sample_moments(x)[1].value; }

// Second moment of u(., t) for alpha = 2 as 2 E[t*(t)], with E[t*(t)] integrated
// from directing_density by Gauss-Kronrod.
double variance_oracle(double beta, double t) {
    auto f = [&](double ts) { return ts > 0.0 ? ts * directing_density(beta, ts, t) : 0.0; };
    const double hi = 40.0 * std::pow(t, beta);
    return 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, hi, 15, 1e-12);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

int run_cli(const std::string& args) {
    const char* cli = std::getenv("FRACSUB_CLI");
    REQUIRE(cli != nullptr);
    const int status = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("RunConfig validation") {
    auto c = config_for(2.0, 0.0, 1.0, 10, {1.0});
    CHECK_NOTHROW(c.validate());
    c.n_paths = 0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = config_for(2.0, 0.0, 1.0, 10, {2.0, 1.0});
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = config_for(2.0, 0.0, 1.0, 10, {0.0});
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = config_for(2.0, 0.0, 1.0, 10, {1.0});
    c.x_grid = {1.0, 1.0, 11};
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("run_ensemble is deterministic and independent of the worker count") {
    const auto c = config_for(1.5, 0.2, 0.9, 257, {0.5, 1.0, 3.0});
    const auto a = run_ensemble(c, 1);
    const auto b = run_ensemble(c, 4);
    const auto again = run_ensemble(c, 1);
    REQUIRE(a.values.size() == 3);
    CHECK(a.values == b.values);
    CHECK(a.values == again.values);

    const auto single = run_ensemble(config_for(2.0, 0.0, 0.7, 1, {1.0}), 3);
    CHECK(single.values[0] == run_ensemble(config_for(2.0, 0.0, 0.7, 1, {1.0}), 1).values[0]);

    // observing more times does not change the value at a shared time
    const auto only_one = run_ensemble(config_for(1.5, 0.2, 0.9, 257, {1.0}), 2);
    CHECK(only_one.values[0] == a.values[1]);
}

TEST_CASE("ensemble values equal evaluate_path on the stored path") {
    auto c = config_for(2.0, 0.0, 0.8, 20, {0.3, 1.0});
    c.n_steps = 2000;
    const auto e = run_ensemble(c);
    const RefinementLevel level(c.tau_star);
    for (std::size_t i = 0; i < c.n_paths; ++i) {
        const auto path = subordinated_path(c.params, c.n_steps, level, c.master_seed, i);
        REQUIRE(path.epochs.back() > 1.0);
        CHECK(e.values[0][i] == evaluate_path(path, 0.3));
        CHECK(e.values[1][i] == evaluate_path(path, 1.0));
    }
}

TEST_CASE("Brownian ensemble has variance 2t") {
    const auto e = run_ensemble(config_for(2.0, 0.0, 1.0, 100000, {1.0}));
    CHECK_THAT(variance(e.values[0]), WithinAbs(2.0, 0.03));
}

TEST_CASE("variance oracle from the directing density") {
    for (double beta : {0.5, 0.8, 0.9}) {
        for (double t : {1.0, 2.0, 4.0}) {
            CHECK_THAT(variance_oracle(beta, t), WithinRel(2.0 * std::pow(t, beta) / std::tgamma(1.0 + beta), 1e-8));
        }
    }
}

TEST_CASE("time-fractional ensemble: variance scaling, weak convergence and controls") {
    const std::vector<double> times{1.0, 2.0, 4.0};
    const auto c = config_for(2.0, 0.0, 0.8, 100000, times);
    const auto e = run_ensemble(c, 2);

    std::vector<double> v;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto m = sample_moments(e.values[k]);
        v.push_back(m[1].value);
        CHECK(std::abs(m[1].value - variance_oracle(0.8, times[k])) < 4.0 * m[1].standard_error);
    }
    CHECK_THAT(fit_power_exponent(times, v), WithinAbs(0.8, 0.05));

    const auto grid = UniformGrid::from_range(-10.0, 10.0, 401);
    const auto matched = compare_to_analytic(e.values[0], c.params, 1.0, grid);
    CHECK(matched.ks_distance < 0.02);
    CHECK(matched.ks_within_threshold());
    CHECK(matched.analytic_reference == "green_function_fourier");
    CHECK_THAT(matched.ks_threshold, WithinAbs(1.36 / std::sqrt(1e5) + 0.005, 1e-15));
    CHECK_THAT(matched.reference_cdf_left, WithinAbs(0.0, 1e-3));
    CHECK_THAT(matched.reference_cdf_right, WithinAbs(1.0, 1e-3));
    CHECK(matched.sup_norm_density_gap < 0.05);
    for (std::size_t i = 1; i < matched.cdf_empirical.size(); ++i) {
        CHECK(matched.cdf_empirical[i] >= matched.cdf_empirical[i - 1]);
    }

    // the wrong time order is detected above the sampling band
    const auto mismatched = compare_to_analytic(e.values[0], DiffusionParams(2.0, 0.0, 1.0), 1.0, grid);
    CHECK(mismatched.ks_distance > mismatched.ks_threshold);
    CHECK(mismatched.ks_distance > 3.0 * matched.ks_distance);
}

TEST_CASE("negative control reaches KS 0.1", "[!shouldfail]") {
    // The beta = 0.8 and beta = 1 laws (alpha = 2) differ by at most ~0.015 in CDF,
    // so this bound cannot hold for any ensemble size.
    const auto e = run_ensemble(config_for(2.0, 0.0, 0.8, 100000, {1.0}));
    const auto grid = UniformGrid::from_range(-10.0, 10.0, 401);
    CHECK(compare_to_analytic(e.values[0], DiffusionParams(2.0, 0.0, 1.0), 1.0, grid).ks_distance > 0.1);
}

TEST_CASE("compare_to_analytic bookkeeping") {
    const auto grid = UniformGrid::from_range(-3.0, 3.0, 61);
    CHECK_THROWS_AS(compare_to_analytic({}, DiffusionParams(2.0, 0.0, 1.0), 1.0, grid), InvalidParameter);
    // histogram integrates to the in-grid fraction
    const std::vector<double> samples{-5.0, -1.0, 0.0, 0.02, 0.5, 2.96, 4.0};
    const auto r = compare_to_analytic(samples, DiffusionParams(2.0, 0.0, 1.0), 1.0, grid);
    double mass = 0.0;
    for (double u : r.u_empirical) mass += u * grid.step;
    CHECK_THAT(mass, WithinAbs(5.0 / 7.0, 1e-12));
    CHECK(r.cdf_empirical.front() == 1.0 / 7.0);
    CHECK(r.cdf_empirical.back() == 6.0 / 7.0);
}

TEST_CASE("sample moments and exponent fit") {
    const auto m = sample_moments({1.0, 2.0, 3.0, 4.0});
    CHECK(m[0].order == 1);
    CHECK_THAT(m[0].value, WithinAbs(2.5, 1e-15));
    CHECK_THAT(m[1].value, WithinAbs(5.0 / 3.0, 1e-15));
    CHECK_THAT(fit_power_exponent({1.0, 2.0, 4.0}, {3.0, 3.0 * std::pow(2.0, 0.7), 3.0 * std::pow(4.0, 0.7)}),
               WithinAbs(0.7, 1e-12));
}

TEST_CASE("CTRW limit study") {
    SECTION("exponential waiting, Gaussian jumps") {
        const CtrwSpec spec(WaitingLaw::exponential(1.0), JumpLaw::gaussian(1.0));
        const auto rows = ctrw_limit_study(spec, DiffusionParams(2.0, 0.0, 1.0), {1e-1, 1e-2, 1e-3});
        REQUIRE(rows.size() == 3);
        CHECK(gaps_nonincreasing(rows));
        CHECK(rows[2].gap < rows[0].gap);
        for (const auto& r : rows) CHECK_THAT(spec.well_scaled(r.tau).rho(), WithinAbs(1.0, 1e-14));
        CHECK_THAT(rows[1].h, WithinRel(std::sqrt(2e-2), 1e-14));
    }
    SECTION("Mittag-Leffler waiting, stable jumps: gap shrinks like tau^beta") {
        const DiffusionParams p(1.5, 0.3, 0.7);
        const CtrwSpec spec(WaitingLaw::mittag_leffler(0.7), JumpLaw::stable(p.space_law()));
        const auto rows = ctrw_limit_study(spec, p, {1e-2, 1e-3, 1e-4});
        CHECK(gaps_nonincreasing(rows));
        CHECK_THAT(rows[2].gap / rows[1].gap, WithinRel(std::pow(10.0, -0.7), 0.05));
    }
    SECTION("single tau gives one row; sequence must decrease") {
        const CtrwSpec spec(WaitingLaw::extremal_stable(0.9), JumpLaw::stable(StableLaw(1.5, 0.0)));
        CHECK(ctrw_limit_study(spec, DiffusionParams(1.5, 0.0, 0.9), {0.1}).size() == 1);
        CHECK_THROWS_AS(ctrw_limit_study(spec, DiffusionParams(1.5, 0.0, 0.9), {0.1, 0.1}), InvalidParameter);
        CHECK_THROWS_AS(ctrw_limit_study(spec, DiffusionParams(1.5, 0.0, 0.9), {}), InvalidParameter);
    }
}

TEST_CASE("figure data") {
    const auto f1 = reproduce_figure(1, Side::left, 11);
    const auto f2 = reproduce_figure(2, Side::left, 11);
    const auto f3 = reproduce_figure(3, Side::left, 11);
    CHECK(f1.name == "fig1_left");
    const auto lead = parse_csv(f1.csv);
    const auto parent = parse_csv(f2.csv);
    const auto sub = parse_csv(f3.csv);
    REQUIRE(lead.size() == 10001);
    REQUIRE(parent.size() == 10001);
    CHECK(lead.back()[1] == 10000.0);
    for (std::size_t n = 1; n < lead.size(); ++n) CHECK((lead[n][2] >= lead[n - 1][2]));
    CHECK(f1.check_statistic < f1.check_threshold);
    CHECK(f2.check_statistic < f2.check_threshold);

    // fig 3 points are (t_n, x_n) of figs 1 and 2
    REQUIRE(!sub.empty());
    for (const auto& row : sub) {
        const auto n = static_cast<std::size_t>(row[1]);
        CHECK(row[2] == lead[n][2]);
        CHECK(row[3] == parent[n][2]);
    }
    CHECK(f3.gnuplot.find("fig3_left.csv") != std::string::npos);

    const auto right = reproduce_figure(2, Side::right, 11);
    CHECK(right.gnuplot.find("alpha = 1.5, beta = 0.9") != std::string::npos);
    CHECK_THROWS_AS(reproduce_figure(4, Side::left, 1), InvalidParameter);
}

TEST_CASE("run directory layout") {
    auto c = config_for(2.0, 0.0, 0.8, 300, {0.5, 1.0});
    const auto dir = std::filesystem::temp_directory_path() / "fracsub_layout_test";
    std::filesystem::remove_all(dir);
    c.output_dir = dir.string();
    c.x_grid = {-5.0, 5.0, 101};
    const auto e = run_ensemble(c);
    std::vector<ComparisonReport> reports;
    for (std::size_t k = 0; k < e.times.size(); ++k) reports.push_back(compare_to_analytic(e.values[k], c.params, e.times[k], c.x_grid.grid()));
    write_run(c, e, reports, 2);
    CHECK(std::filesystem::exists(dir / "config.json"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "paths" / "terminal.csv"));
    CHECK(std::filesystem::exists(dir / "paths" / "path_00001.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "paths" / "path_00002.csv"));
    const auto density = read_file(dir / "densities" / "t_1.csv");
    CHECK(density.rfind("x,u_analytic,u_empirical\n", 0) == 0);
    CHECK(parse_csv(density).size() == 101);
    const auto config = nlohmann::json::parse(read_file(dir / "config.json"));
    CHECK(config["beta"].get<double>() == 0.8);
    CHECK(config["n_paths"].get<std::size_t>() == 300);
    const auto report = nlohmann::json::parse(read_file(dir / "report.json"));
    CHECK(report["reports"].size() == 2);
    CHECK(report["reports"][1]["ks_distance"].get<double>() == reports[1].ks_distance);
    std::filesystem::remove_all(dir);
}

TEST_CASE("CLI: exit codes and byte-identical reruns") {
    const auto root = std::filesystem::temp_directory_path() / "fracsub_cli_test";
    std::filesystem::remove_all(root);
    const std::string common = "simulate-paths --alpha 1.5 --theta 0.1 --beta 0.9 --n-steps 500 --tau-star 0.01 "
                               "--n-paths 400 --seed 5 --t-list 0.5,2 ";
    REQUIRE(run_cli(common + "--workers 1 --out " + (root / "a").string()) == 0);
    REQUIRE(run_cli(common + "--workers 3 --out " + (root / "b").string()) == 0);
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = std::filesystem::relative(entry.path(), root / "a");
        CHECK(read_file(entry.path()) == read_file(root / "b" / rel));
    }

    CHECK(run_cli("density --alpha 2.5 --beta 0.5") == 2);
    CHECK(run_cli("density --alpha 1.5 --theta 0.9 --beta 0.5") == 2);
    CHECK(run_cli("density --alpha 1.5 --beta 0.5 --points nope") == 2);
    CHECK(run_cli("ctrw-limit --waiting exp --tau-list 0.1,0.2") == 2);
    CHECK(run_cli("density --method fourier --alpha 0.3 --beta 0.5 --points 11") == 3);
    CHECK(run_cli("ctrw-limit --waiting ml --alpha 1.5 --beta 0.9") == 0);
    std::filesystem::remove_all(root);
}
