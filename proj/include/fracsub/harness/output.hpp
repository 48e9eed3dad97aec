#pragma once

// Run directory layout:
//   config.json          echo of the RunConfig (less the directory itself)
//   paths/terminal.csv   value of every path at every observation time
//   paths/path_*.csv     full jump-point data of the first few paths
//   densities/t_*.csv    x, u_analytic, u_empirical per observation time
//   report.json          ComparisonReport fields per observation time
// Files are written by a single thread after aggregation; contents depend on
// the config only.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsub/harness/compare.hpp"
#include "fracsub/harness/ensemble.hpp"
#include "fracsub/paths.hpp"

namespace fracsub::harness {

inline nlohmann::json to_json(const RunConfig& c) {
    return {
        {"alpha", c.params.alpha()},
        {"theta", c.params.theta()},
        {"beta", c.params.beta()},
        {"n_paths", c.n_paths},
        {"n_steps", c.n_steps},
        {"tau_star", c.tau_star},
        {"master_seed", c.master_seed},
        {"observation_times", c.observation_times},
        {"x_grid", {{"min", c.x_grid.min}, {"max", c.x_grid.max}, {"points", c.x_grid.points}}},
    };
}

inline nlohmann::json to_json(const ComparisonReport& r) {
    nlohmann::json moments = nlohmann::json::array();
    for (const auto& m : r.sample_moments) {
        moments.push_back({{"order", m.order}, {"value", m.value}, {"standard_error", m.standard_error}});
    }
    return {
        {"t", r.t},
        {"n_samples", r.n_samples},
        {"ks_distance", r.ks_distance},
        {"ks_threshold", r.ks_threshold},
        {"ks_within_threshold", r.ks_within_threshold()},
        {"sup_norm_density_gap", r.sup_norm_density_gap},
        {"sample_moments", moments},
        {"analytic_reference", r.analytic_reference},
        {"reference_cdf_left", r.reference_cdf_left},
        {"reference_cdf_right", r.reference_cdf_right},
    };
}

// Fixed "%.17g" formatting, independent of the stream locale.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed: " + file.string());
}

inline std::string terminal_csv(const Ensemble& e) {
    std::ostringstream os;
    os << "index";
    for (std::size_t k = 0; k < e.times.size(); ++k) os << ",x_t" << k;
    os << '\n';
    const std::size_t n = e.values.empty() ? 0 : e.values.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        os << i;
        for (const auto& column : e.values) os << ',' << fmt17(column[i]);
        os << '\n';
    }
    return os.str();
}

inline std::string density_csv(const ComparisonReport& r) {
    std::ostringstream os;
    os << "x,u_analytic,u_empirical\n";
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        os << fmt17(r.x[i]) << ',' << fmt17(r.u_analytic[i]) << ',' << fmt17(r.u_empirical[i]) << '\n';
    }
    return os.str();
}

inline void write_run(const RunConfig& config, const Ensemble& ensemble, const std::vector<ComparisonReport>& reports,
                      std::size_t full_paths = 5) {
    namespace fs = std::filesystem;
    const fs::path root(config.output_dir);
    fs::create_directories(root / "paths");
    fs::create_directories(root / "densities");

    write_text(root / "config.json", to_json(config).dump(2) + "\n");
    write_text(root / "paths" / "terminal.csv", terminal_csv(ensemble));
    const RefinementLevel level(config.tau_star);
    for (std::size_t i = 0; i < std::min(full_paths, config.n_paths); ++i) {
        std::ostringstream os;
        write_path_csv(os, subordinated_path(config.params, config.n_steps, level, config.master_seed, i));
        char name[32];
        std::snprintf(name, sizeof name, "path_%05zu.csv", i);
        write_text(root / "paths" / name, os.str());
    }
    nlohmann::json all = nlohmann::json::array();
    for (std::size_t k = 0; k < reports.size(); ++k) {
        write_text(root / "densities" / ("t_" + std::to_string(k) + ".csv"), density_csv(reports[k]));
        all.push_back(to_json(reports[k]));
    }
    write_text(root / "report.json", nlohmann::json{{"reports", all}}.dump(2) + "\n");
}

} // namespace fracsub::harness
