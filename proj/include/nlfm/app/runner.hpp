#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "nlfm/acf.hpp"
#include "nlfm/app/config.hpp"
#include "nlfm/app/io.hpp"
#include "nlfm/error.hpp"
#include "nlfm/waveform.hpp"

namespace nlfm::app {

inline constexpr const char* tool_version = "1.0.0";

/// Everything computed for one design, before anything is written.
struct DesignResult {
    DesignConfig config;
    Waveform waveform;
    AcfReport report;
    bool monotone = true;
    bool band_overshoot = false;
    double asymmetry = 0.0;
    std::vector<std::string> diagnostics;
};

namespace detail {

inline void check_finite(const Waveform& w) {
    for (const cplx& s : w.samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw Error(ErrorKind::NumericalFailure, "non-finite waveform sample");
        }
    }
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace detail

/// Designs, synthesizes and measures one configuration. `lfm_reference` may be passed in to
/// avoid recomputing it; it must match the config's T, B and fs.
inline DesignResult evaluate_design(const DesignConfig& cfg, const Waveform* lfm_reference = nullptr) {
    validate(cfg);
    DesignResult result;
    result.config = cfg;
    std::optional<Waveform> own_reference;
    if (lfm_reference == nullptr) {
        own_reference = synthesize_lfm(cfg.pulse_length, cfg.bandwidth, cfg.sample_rate);
        lfm_reference = &*own_reference;
    }
    if (cfg.window == WindowKind::Lfm) {
        result.waveform = *lfm_reference;
    } else {
        const FrequencyModel model = design_frequency_function(window_spec(cfg), fit_method(cfg), cfg.n_points);
        result.monotone = model.monotone;
        result.band_overshoot = model.band_overshoot;
        result.diagnostics = model.diagnostics;
        result.waveform = synthesize_nlfm(model, cfg.sample_rate);
    }
    detail::check_finite(result.waveform);
    result.asymmetry = time_reversal_asymmetry(result.waveform);
    result.report = measure(result.waveform, *lfm_reference, cfg.oversample);
    if (!result.report.psl_db) result.diagnostics.emplace_back("autocorrelation has no sidelobes (degenerate design)");
    return result;
}

inline nlohmann::ordered_json report_json(const DesignResult& r) {
    nlohmann::ordered_json j;
    j["label"] = r.report.label;
    j["config"] = to_json(r.config);
    j["samples"] = r.waveform.size();
    j["psl_db"] = detail::optional_json(r.report.psl_db);
    j["mlw_s"] = r.report.mlw_seconds;
    j["nmlw"] = r.report.nmlw;
    j["raw"] = {
        {"psl_db", detail::optional_json(r.report.psl_db_raw)},
        {"mlw_s", r.report.mlw_seconds_raw},
        {"nmlw", r.report.nmlw_raw},
    };
    j["mlw_level_db"] = default_mlw_level_db;
    j["monotone_flag"] = r.monotone;
    j["band_overshoot_flag"] = r.band_overshoot;
    j["time_reversal_asymmetry"] = r.asymmetry;
    j["diagnostics"] = r.diagnostics;
    return j;
}

inline nlohmann::ordered_json manifest_json(const std::string& command, const nlohmann::ordered_json& config_echo,
                                            double wall_seconds) {
    nlohmann::ordered_json j;
    j["tool"] = "nlfm";
    j["version"] = tool_version;
    j["command"] = command;
    j["config"] = config_echo;
    j["wall_time_s"] = wall_seconds;
    return j;
}

/// Writes every data artifact of one design into `dir`. The manifest is written separately.
inline void write_design_artifacts(const DesignResult& r, const std::filesystem::path& dir) {
    ensure_directory(dir);
    write_text_file(dir / "waveform.csv", waveform_csv(r.waveform));
    write_text_file(dir / "waveform.iq", waveform_iq(r.waveform));
    write_text_file(dir / "waveform.meta.json", waveform_meta(r.waveform).dump(2) + "\n");
    write_text_file(dir / "acf.csv", acf_csv(r.report.curve));
    write_text_file(dir / "report.json", report_json(r).dump(2) + "\n");
    write_text_file(dir / "acf.svg", acf_svg(r.report.curve, r.report.psl_db, r.config.plot_half_span, r.report.label));
}

inline DesignResult run_design(const DesignConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    DesignResult r = evaluate_design(cfg);
    write_design_artifacts(r, cfg.out_dir);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text_file(std::filesystem::path(cfg.out_dir) / "manifest.json",
                    manifest_json("design", to_json(cfg), wall).dump(2) + "\n");
    return r;
}

// ---------------------------------------------------------------------------
// compare

struct CompareRow {
    std::string window;
    double pulse_length = 0.0;
    std::string method;
    std::optional<double> psl_db;
    double mlw_s = 0.0;
    double nmlw = 0.0;
    bool reference = false;
    std::string label;
};

struct CompareTable {
    std::vector<CompareRow> rows;
};

inline std::string method_column(const DesignConfig& cfg) {
    if (cfg.window == WindowKind::Lfm) return "lfm";
    return cfg.method == MethodKind::Polynomial ? "polynomial" : "smoothing_spline";
}

/// One row per config, plus an LFM reference row for every pulse length that lacks one.
/// Configs sharing (window, T) must share B and fs.
inline CompareTable evaluate_compare(const std::vector<DesignConfig>& configs) {
    if (configs.empty()) throw Error(ErrorKind::InvalidParameter, "compare needs at least one config");
    std::map<std::pair<std::string, double>, std::pair<double, double>> groups;
    std::map<double, std::pair<double, double>> by_length;
    for (const auto& cfg : configs) {
        validate(cfg);
        const auto key = std::make_pair(std::string(to_string(cfg.window)), cfg.pulse_length);
        const auto rates = std::make_pair(cfg.bandwidth, cfg.sample_rate);
        if (auto [it, inserted] = groups.emplace(key, rates); !inserted && it->second != rates) {
            throw Error(ErrorKind::InvalidComparison,
                        "configs for window " + key.first + " at T=" + format_double(key.second) +
                            " differ in B or fs");
        }
        by_length.emplace(cfg.pulse_length, rates);
    }

    CompareTable table;
    std::map<std::tuple<double, double, double>, Waveform> references;
    auto reference_for = [&](const DesignConfig& cfg) -> const Waveform& {
        const auto key = std::make_tuple(cfg.pulse_length, cfg.bandwidth, cfg.sample_rate);
        auto it = references.find(key);
        if (it == references.end()) {
            it = references.emplace(key, synthesize_lfm(cfg.pulse_length, cfg.bandwidth, cfg.sample_rate)).first;
        }
        return it->second;
    };
    auto to_row = [](const DesignResult& r, bool reference) {
        return CompareRow{std::string(to_string(r.config.window)), r.config.pulse_length, method_column(r.config),
                          r.report.psl_db, r.report.mlw_seconds, r.report.nmlw, reference, r.report.label};
    };

    for (const auto& cfg : configs) table.rows.push_back(to_row(evaluate_design(cfg, &reference_for(cfg)), false));

    for (const auto& [length, rates] : by_length) {
        if (groups.contains({"lfm", length})) continue;
        const auto it = std::find_if(configs.begin(), configs.end(),
                                     [&](const DesignConfig& c) { return c.pulse_length == length; });
        DesignConfig lfm = *it;
        lfm.window = WindowKind::Lfm;
        table.rows.push_back(to_row(evaluate_design(lfm, &reference_for(lfm)), true));
    }
    return table;
}

inline std::string compare_csv(const CompareTable& t) {
    std::string out = "window,T_s,method,psl_db,mlw_s,nmlw,reference\n";
    for (const auto& r : t.rows) {
        out += r.window + "," + format_double(r.pulse_length) + "," + r.method + ",";
        out += (r.psl_db ? format_double(*r.psl_db) : std::string()) + ",";
        out += format_double(r.mlw_s) + "," + format_double(r.nmlw) + "," + (r.reference ? "1" : "0") + "\n";
    }
    return out;
}

/// Rows keyed by (window, T) with one column per method, for PSL and NMLW separately.
inline nlohmann::ordered_json compare_json(const CompareTable& t) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"window", r.window},
                        {"T_s", r.pulse_length},
                        {"method", r.method},
                        {"psl_db", detail::optional_json(r.psl_db)},
                        {"mlw_s", r.mlw_s},
                        {"nmlw", r.nmlw},
                        {"reference", r.reference},
                        {"label", r.label}});
    }
    auto pivot = [&](bool psl) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        std::vector<std::pair<std::string, double>> order;
        for (const auto& r : t.rows) {
            const auto key = std::make_pair(r.window, r.pulse_length);
            if (std::find(order.begin(), order.end(), key) == order.end()) order.push_back(key);
        }
        for (const auto& key : order) {
            nlohmann::ordered_json row{{"window", key.first}, {"T_s", key.second}};
            for (const auto& r : t.rows) {
                if (r.window == key.first && r.pulse_length == key.second) {
                    row[r.method] = psl ? detail::optional_json(r.psl_db) : nlohmann::ordered_json(r.nmlw);
                }
            }
            out.push_back(row);
        }
        return out;
    };
    nlohmann::ordered_json j;
    j["rows"] = rows;
    j["psl_db_table"] = pivot(true);
    j["nmlw_table"] = pivot(false);
    return j;
}

inline CompareTable run_compare(const std::vector<DesignConfig>& configs, const std::filesystem::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    CompareTable table = evaluate_compare(configs);
    ensure_directory(out_dir);
    write_text_file(out_dir / "compare.csv", compare_csv(table));
    write_text_file(out_dir / "compare.json", compare_json(table).dump(2) + "\n");
    nlohmann::ordered_json echo = nlohmann::ordered_json::array();
    for (const auto& c : configs) echo.push_back(to_json(c));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text_file(out_dir / "manifest.json", manifest_json("compare", echo, wall).dump(2) + "\n");
    return table;
}

// ---------------------------------------------------------------------------
// sweep

enum class Objective { Psl, Weighted };

/// Value lists for the swept parameters. An empty list keeps the base config's value.
/// Degrees and lambdas form one method axis: each degree is a polynomial point and each
/// lambda a spline point.
struct SweepGrid {
    std::vector<double> k;
    std::vector<int> nbar;
    std::vector<double> eta_db;
    std::vector<double> lambda;
    std::vector<int> degree;
    std::vector<std::size_t> n_points;
    /// Score of the weighted objective: psl_db + nmlw_weight * (nmlw - 1).
    double nmlw_weight = 10.0;
};

struct SweepRow {
    DesignConfig config;
    bool ok = false;
    std::optional<double> psl_db;
    double mlw_s = 0.0;
    double nmlw = 0.0;
    bool monotone = false;
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<std::size_t> best_psl;
    std::optional<std::size_t> best_weighted;
};

/// Grid points in a fixed nesting order: k, nbar, eta_db, method, n_points (last varies fastest).
inline std::vector<DesignConfig> expand_grid(const DesignConfig& base, const SweepGrid& grid) {
    auto or_base = [](const auto& list, auto value) {
        using T = std::decay_t<decltype(value)>;
        return list.empty() ? std::vector<T>{value} : std::vector<T>(list.begin(), list.end());
    };
    const auto ks = or_base(grid.k, base.k);
    const auto nbars = or_base(grid.nbar, base.nbar);
    const auto etas = or_base(grid.eta_db, base.eta_db);
    const auto npts = or_base(grid.n_points, base.n_points);

    std::vector<std::pair<MethodKind, double>> methods;
    for (int d : grid.degree) methods.emplace_back(MethodKind::Polynomial, d);
    for (double l : grid.lambda) methods.emplace_back(MethodKind::Spline, l);
    const bool base_method = methods.empty();
    if (base_method) methods.emplace_back(base.method, 0.0);

    std::vector<DesignConfig> out;
    for (double k : ks) {
        for (int nbar : nbars) {
            for (double eta : etas) {
                for (const auto& [kind, value] : methods) {
                    for (std::size_t n : npts) {
                        DesignConfig c = base;
                        c.k = k;
                        c.nbar = nbar;
                        c.eta_db = eta;
                        c.n_points = n;
                        if (!base_method) {
                            c.method = kind;
                            if (kind == MethodKind::Polynomial) c.degree = static_cast<int>(value);
                            else c.lambda = value;
                        }
                        out.push_back(std::move(c));
                    }
                }
            }
        }
    }
    return out;
}

inline double weighted_score(const SweepRow& row, double weight) {
    return row.psl_db.value_or(0.0) + weight * (row.nmlw - 1.0);
}

/// Evaluates every grid point on `threads` workers. Rows come back in grid order.
inline SweepResult evaluate_sweep(const DesignConfig& base, const SweepGrid& grid, unsigned threads = 0) {
    {
        // Physical parameters are shared by every point; bad ones fail the whole sweep.
        DesignConfig probe = base;
        probe.window = WindowKind::Lfm;
        validate(probe);
    }
    const std::vector<DesignConfig> points = expand_grid(base, grid);
    if (points.empty()) throw Error(ErrorKind::InvalidParameter, "sweep grid is empty");
    const Waveform reference = synthesize_lfm(base.pulse_length, base.bandwidth, base.sample_rate);

    SweepResult result;
    result.rows.resize(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            SweepRow row;
            row.config = points[i];
            try {
                const DesignResult r = evaluate_design(points[i], &reference);
                row.ok = true;
                row.psl_db = r.report.psl_db;
                row.mlw_s = r.report.mlw_seconds;
                row.nmlw = r.report.nmlw;
                row.monotone = r.monotone;
            } catch (const Error& e) {
                row.error = std::string(to_string(e.kind())) + ": " + e.what();
            }
            result.rows[i] = std::move(row);
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, points.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Ties go to the earliest grid point so the choice does not depend on scheduling.
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const SweepRow& row = result.rows[i];
        if (!row.ok || !row.psl_db) continue;
        if (!result.best_psl || *row.psl_db < *result.rows[*result.best_psl].psl_db) result.best_psl = i;
        if (!result.best_weighted ||
            weighted_score(row, grid.nmlw_weight) < weighted_score(result.rows[*result.best_weighted], grid.nmlw_weight)) {
            result.best_weighted = i;
        }
    }
    return result;
}

inline std::string sweep_csv(const SweepResult& s) {
    std::string out = "index,window,k,nbar,eta_db,method,degree,lambda,n_points,status,psl_db,mlw_s,nmlw,monotone,error\n";
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        const SweepRow& r = s.rows[i];
        const DesignConfig& c = r.config;
        const bool poly = c.method == MethodKind::Polynomial;
        out += std::to_string(i) + "," + std::string(to_string(c.window)) + ",";
        out += (c.window == WindowKind::Gaussian ? format_double(c.k) : std::string()) + ",";
        out += (c.window == WindowKind::Taylor ? std::to_string(c.nbar) : std::string()) + ",";
        out += (c.window == WindowKind::Taylor ? format_double(c.eta_db) : std::string()) + ",";
        out += method_column(c) + ",";
        out += (poly ? std::to_string(c.degree) : std::string()) + ",";
        out += (!poly && c.lambda ? format_double(*c.lambda) : std::string()) + ",";
        out += std::to_string(c.n_points) + ",";
        out += r.ok ? "ok," : "failed,";
        if (r.ok) {
            out += (r.psl_db ? format_double(*r.psl_db) : std::string()) + ",";
            out += format_double(r.mlw_s) + "," + format_double(r.nmlw) + "," + (r.monotone ? "1" : "0") + ",";
        } else {
            out += ",,,,";
        }
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += err + "\n";
    }
    return out;
}

inline nlohmann::ordered_json sweep_best_json(const SweepResult& s, const SweepGrid& grid) {
    auto entry = [&](const std::optional<std::size_t>& idx) {
        if (!idx) return nlohmann::ordered_json(nullptr);
        const SweepRow& r = s.rows[*idx];
        nlohmann::ordered_json j;
        j["index"] = *idx;
        j["config"] = to_json(r.config);
        j["psl_db"] = detail::optional_json(r.psl_db);
        j["mlw_s"] = r.mlw_s;
        j["nmlw"] = r.nmlw;
        j["weighted_score"] = weighted_score(r, grid.nmlw_weight);
        return j;
    };
    std::size_t failed = 0;
    for (const auto& r : s.rows) failed += r.ok ? 0 : 1;
    nlohmann::ordered_json j;
    j["points"] = s.rows.size();
    j["failed"] = failed;
    j["nmlw_weight"] = grid.nmlw_weight;
    j["best"] = {{"psl", entry(s.best_psl)}, {"weighted", entry(s.best_weighted)}};
    return j;
}

inline SweepResult run_sweep(const DesignConfig& base, const SweepGrid& grid, unsigned threads,
                             const std::filesystem::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    SweepResult result = evaluate_sweep(base, grid, threads);
    ensure_directory(out_dir);
    write_text_file(out_dir / "sweep.csv", sweep_csv(result));
    write_text_file(out_dir / "best.json", sweep_best_json(result, grid).dump(2) + "\n");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::ordered_json echo = to_json(base);
    echo["grid_points"] = result.rows.size();
    echo["threads"] = threads;
    write_text_file(out_dir / "manifest.json", manifest_json("sweep", echo, wall).dump(2) + "\n");
    return result;
}

} // namespace nlfm::app
