#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlfm/app/config.hpp"
#include "nlfm/app/runner.hpp"
#include "nlfm/error.hpp"

namespace {

using nlfm::ErrorKind;
using namespace nlfm::app;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NumericalFailure:
    case ErrorKind::DegenerateMainlobe: return 3;
    case ErrorKind::Io: return 4;
    default: return 2;
    }
}

int report_error(const std::string& kind, const std::string& message, int code) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit_code"] = code;
    std::cerr << j.dump() << "\n";
    return code;
}

/// Flags shared by all commands; each one overrides the matching config key.
struct Overrides {
    std::map<std::string, std::string> values;

    void add(CLI::App* cmd) {
        static const std::vector<std::pair<std::string, std::string>> flags{
            {"window", "gaussian | taylor | lfm"},
            {"k", "Gaussian shape parameter"},
            {"nbar", "Taylor nbar"},
            {"eta", "Taylor sidelobe level in dB"},
            {"T", "pulse length, e.g. 2.5us"},
            {"B", "bandwidth, e.g. 100MHz"},
            {"fs", "sample rate, e.g. 500MHz"},
            {"method", "polynomial | spline"},
            {"lambda", "smoothing spline lambda (SI units)"},
            {"degree", "polynomial degree"},
            {"n-points", "group-delay samples used for the fit"},
            {"oversample", "ACF interpolation factor"},
            {"plot-half-span", "half width of the ACF plot window, e.g. 1us"},
        };
        for (const auto& [name, help] : flags) cmd->add_option("--" + name, values[name], help);
    }

    void apply(DesignConfig& cfg) const {
        for (const auto& [key, value] : values) {
            if (!value.empty()) apply_setting(cfg, key, value);
        }
    }
};

std::vector<double> to_doubles(const std::string& s) { return parse_list(s); }

template <typename T>
std::vector<T> to_integers(const std::string& s) {
    std::vector<T> out;
    for (double v : parse_list(s)) {
        if (v != static_cast<double>(static_cast<long>(v))) throw nlfm::Error(ErrorKind::InvalidParameter, "expected integers in '" + s + "'");
        out.push_back(static_cast<T>(v));
    }
    return out;
}

void fill_grid(SweepGrid& grid, const std::string& key, const std::string& value) {
    if (key == "k") grid.k = to_doubles(value);
    else if (key == "nbar") grid.nbar = to_integers<int>(value);
    else if (key == "eta" || key == "eta_db") grid.eta_db = to_doubles(value);
    else if (key == "lambda") grid.lambda = to_doubles(value);
    else if (key == "degree") grid.degree = to_integers<int>(value);
    else if (key == "n-points" || key == "n_points") grid.n_points = to_integers<std::size_t>(value);
    else if (key == "weight" || key == "nmlw_weight") grid.nmlw_weight = parse_quantity(value);
    else throw nlfm::Error(ErrorKind::InvalidParameter, "unknown sweep key '" + key + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"NLFM waveform design toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    std::string design_config;
    std::string design_out;
    Overrides design_over;
    auto* design = app.add_subcommand("design", "design, synthesize and measure one waveform");
    design->add_option("--config", design_config, "key = value config file");
    design->add_option("--out", design_out, "output directory");
    design_over.add(design);

    std::vector<std::string> compare_configs;
    std::string compare_out;
    Overrides compare_over;
    auto* compare = app.add_subcommand("compare", "PSL / NMLW table over several configs");
    compare->add_option("--config", compare_configs, "config file (repeat for each design)");
    compare->add_option("--out", compare_out, "output directory");
    compare_over.add(compare);

    std::string sweep_config;
    std::string sweep_out;
    unsigned threads = 0;
    std::string objective = "psl";
    std::map<std::string, std::string> sweep_lists;
    Overrides sweep_over;
    auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid and report the best points");
    sweep->add_option("--config", sweep_config, "config file; sweep.<key> = list entries define the grid");
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
    sweep->add_option("--objective", objective, "objective printed on stdout: psl | weighted")
        ->check(CLI::IsMember({"psl", "weighted"}));
    for (const char* key : {"k", "nbar", "eta", "lambda", "degree", "n-points", "weight"}) {
        sweep->add_option(std::string("--sweep-") + key, sweep_lists[key], std::string("comma-separated ") + key + " values");
    }
    sweep_over.add(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report_error("usage", e.what(), 2);
    }

    try {
        if (design->parsed()) {
            DesignConfig cfg = design_config.empty() ? DesignConfig{} : load_config_file(design_config);
            design_over.apply(cfg);
            if (!design_out.empty()) cfg.out_dir = design_out;
            const DesignResult r = run_design(cfg);
            std::cout << report_json(r).dump(2) << "\n";
        } else if (compare->parsed()) {
            if (compare_configs.empty()) return report_error("usage", "compare needs at least one --config", 2);
            std::vector<DesignConfig> configs;
            for (const auto& path : compare_configs) {
                DesignConfig cfg = load_config_file(path);
                compare_over.apply(cfg);
                configs.push_back(cfg);
            }
            const std::string out = compare_out.empty() ? configs.front().out_dir : compare_out;
            const CompareTable table = run_compare(configs, out);
            std::cout << compare_csv(table);
        } else if (sweep->parsed()) {
            std::map<std::string, std::string> entries;
            DesignConfig base = sweep_config.empty() ? DesignConfig{} : load_config_file(sweep_config, &entries);
            sweep_over.apply(base);
            if (!sweep_out.empty()) base.out_dir = sweep_out;
            SweepGrid grid;
            for (const auto& [key, value] : entries) fill_grid(grid, key, value);
            for (const auto& [key, value] : sweep_lists) {
                if (!value.empty()) fill_grid(grid, key, value);
            }
            const SweepResult result = run_sweep(base, grid, threads, base.out_dir);
            const auto best = sweep_best_json(result, grid);
            std::cout << best["best"][objective].dump(2) << "\n";
        }
    } catch (const nlfm::Error& e) {
        return report_error(std::string(nlfm::to_string(e.kind())), e.what(), exit_code_for(e.kind()));
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), 3);
    }
    return 0;
}
