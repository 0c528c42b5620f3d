#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nlfm/acf.hpp"
#include "nlfm/error.hpp"
#include "nlfm/waveform.hpp"
#include "nlfm/window.hpp"

namespace nlfm::app {

enum class WindowKind { Gaussian, Taylor, Lfm };
enum class MethodKind { Polynomial, Spline };

/// One design. Defaults follow the 2.5 us / 100 MHz / 500 MHz parameter set.
struct DesignConfig {
    WindowKind window = WindowKind::Gaussian;
    double k = default_gaussian_k;
    int nbar = default_taylor_nbar;
    double eta_db = default_taylor_eta_db;
    double pulse_length = 2.5e-6;
    double bandwidth = 100e6;
    double sample_rate = 500e6;
    MethodKind method = MethodKind::Spline;
    int degree = default_polynomial_degree;
    std::optional<double> lambda;
    std::size_t n_points = default_group_delay_points;
    std::size_t oversample = default_oversample;
    double plot_half_span = 1e-6;
    std::string out_dir = "out";
};

inline std::string_view to_string(WindowKind w) {
    switch (w) {
    case WindowKind::Gaussian: return "gaussian";
    case WindowKind::Taylor: return "taylor";
    case WindowKind::Lfm: return "lfm";
    }
    return "gaussian";
}

inline std::string_view to_string(MethodKind m) { return m == MethodKind::Polynomial ? "polynomial" : "spline"; }

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

[[noreturn]] inline void config_error(const std::string& msg) { throw Error(ErrorKind::InvalidParameter, msg); }

} // namespace detail

/// Parses a number with an optional unit suffix into SI units.
///
/// Time: s, ms, us (or the micro sign), ns. Frequency: Hz, kHz, MHz, GHz. A bare number is taken as SI.
inline double parse_quantity(std::string_view text) {
    const std::string s = detail::trim(text);
    if (s.empty()) detail::config_error("empty numeric value");
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) detail::config_error("not a number: '" + s + "'");
    const std::string suffix = detail::trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
    // Sub-unit suffixes divide so that e.g. 2.5us gives the correctly rounded 2.5e-6.
    static const std::map<std::string, std::pair<double, double>> scale{
        {"", {1.0, 1.0}},  {"s", {1.0, 1.0}},   {"ms", {1.0, 1e3}},  {"us", {1.0, 1e6}},  {"\xC2\xB5s", {1.0, 1e6}},
        {"\xCE\xBCs", {1.0, 1e6}}, {"ns", {1.0, 1e9}}, {"hz", {1.0, 1.0}}, {"khz", {1e3, 1.0}}, {"mhz", {1e6, 1.0}},
        {"ghz", {1e9, 1.0}},
    };
    const auto it = scale.find(detail::lower(suffix));
    if (it == scale.end()) detail::config_error("unknown unit suffix '" + suffix + "' in '" + s + "'");
    if (!std::isfinite(value)) detail::config_error("non-finite value: '" + s + "'");
    return value * it->second.first / it->second.second;
}

inline long parse_integer(std::string_view text) {
    const std::string s = detail::trim(text);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) detail::config_error("not an integer: '" + s + "'");
    return value;
}

/// Comma-separated list of quantities.
inline std::vector<double> parse_list(std::string_view text) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss{std::string(text)};
    while (std::getline(ss, item, ',')) {
        if (!detail::trim(item).empty()) out.push_back(parse_quantity(item));
    }
    if (out.empty()) detail::config_error("empty list");
    return out;
}

/// Applies one key = value setting. Keys match the long CLI flags without the leading dashes.
inline void apply_setting(DesignConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = detail::lower(detail::trim(raw_key));
    const std::string value = detail::trim(raw_value);
    if (key == "window") {
        const std::string v = detail::lower(value);
        if (v == "gaussian") cfg.window = WindowKind::Gaussian;
        else if (v == "taylor") cfg.window = WindowKind::Taylor;
        else if (v == "lfm") cfg.window = WindowKind::Lfm;
        else detail::config_error("unknown window '" + value + "'");
    } else if (key == "k") {
        cfg.k = parse_quantity(value);
    } else if (key == "nbar") {
        cfg.nbar = static_cast<int>(parse_integer(value));
    } else if (key == "eta" || key == "eta_db" || key == "eta-db") {
        std::string v = value;
        if (detail::lower(v).ends_with("db")) v.resize(v.size() - 2);
        cfg.eta_db = parse_quantity(v);
    } else if (key == "t" || key == "pulse_length") {
        cfg.pulse_length = parse_quantity(value);
    } else if (key == "b" || key == "bandwidth") {
        cfg.bandwidth = parse_quantity(value);
    } else if (key == "fs" || key == "sample_rate") {
        cfg.sample_rate = parse_quantity(value);
    } else if (key == "method") {
        const std::string v = detail::lower(value);
        if (v == "polynomial" || v == "poly") cfg.method = MethodKind::Polynomial;
        else if (v == "spline" || v == "smoothing_spline") cfg.method = MethodKind::Spline;
        else detail::config_error("unknown method '" + value + "'");
    } else if (key == "degree") {
        cfg.degree = static_cast<int>(parse_integer(value));
    } else if (key == "lambda") {
        cfg.lambda = parse_quantity(value);
    } else if (key == "n-points" || key == "n_points") {
        const long n = parse_integer(value);
        if (n < 0) detail::config_error("n_points must be >= 2");
        cfg.n_points = static_cast<std::size_t>(n);
    } else if (key == "oversample") {
        const long n = parse_integer(value);
        if (n < 1) detail::config_error("oversample must be >= 1");
        cfg.oversample = static_cast<std::size_t>(n);
    } else if (key == "plot-half-span" || key == "plot_half_span") {
        cfg.plot_half_span = parse_quantity(value);
    } else if (key == "out" || key == "out_dir") {
        cfg.out_dir = value;
    } else {
        detail::config_error("unknown config key '" + raw_key + "'");
    }
}

/// Flat key = value text; '#' starts a comment. Keys starting with "sweep." are returned in
/// `sweep_entries` for the sweep command instead of being applied.
inline DesignConfig parse_config_text(std::string_view text, std::map<std::string, std::string>* sweep_entries = nullptr,
                                      DesignConfig base = {}) {
    std::stringstream ss{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        if (detail::trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            detail::config_error("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.starts_with("sweep.")) {
            if (sweep_entries == nullptr) detail::config_error("sweep keys are only valid for the sweep command");
            (*sweep_entries)[key.substr(6)] = value;
            continue;
        }
        apply_setting(base, key, value);
    }
    return base;
}

inline DesignConfig load_config_file(const std::string& path, std::map<std::string, std::string>* sweep_entries = nullptr) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), sweep_entries);
}

/// Checks the physical parameters and method settings; throws a config-class error.
inline void validate(const DesignConfig& cfg) {
    auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) detail::config_error(std::string(name) + " must be > 0");
    };
    positive(cfg.pulse_length, "T");
    positive(cfg.bandwidth, "B");
    positive(cfg.sample_rate, "fs");
    positive(cfg.plot_half_span, "plot_half_span");
    if (!(cfg.sample_rate > cfg.bandwidth)) throw Error(ErrorKind::Aliasing, "fs must exceed B");
    if (pulse_sample_count(cfg.pulse_length, cfg.sample_rate) < 3) {
        detail::config_error("pulse must span at least 3 samples");
    }
    if (cfg.oversample < 1) detail::config_error("oversample must be >= 1");
    if (cfg.window == WindowKind::Lfm) return;
    if (cfg.window == WindowKind::Gaussian) positive(cfg.k, "k");
    if (cfg.window == WindowKind::Taylor) {
        if (cfg.nbar < 1) detail::config_error("nbar must be >= 1");
        positive(cfg.eta_db, "eta_db");
    }
    if (cfg.n_points < 2) detail::config_error("n_points must be >= 2");
    if (cfg.method == MethodKind::Spline) {
        if (!cfg.lambda) detail::config_error("spline designs need an explicit lambda");
        if (!(std::isfinite(*cfg.lambda) && *cfg.lambda >= 0.0)) detail::config_error("lambda must be >= 0");
    } else if (cfg.degree < 0) {
        detail::config_error("degree must be >= 0");
    }
}

inline WindowSpec window_spec(const DesignConfig& cfg) {
    if (cfg.window == WindowKind::Taylor) return WindowSpec::taylor(cfg.nbar, cfg.eta_db, cfg.bandwidth, cfg.pulse_length);
    return WindowSpec::gaussian(cfg.k, cfg.bandwidth, cfg.pulse_length);
}

inline FitMethod fit_method(const DesignConfig& cfg) {
    if (cfg.method == MethodKind::Polynomial) return PolynomialMethod{cfg.degree};
    return SplineMethod{cfg.lambda.value_or(0.0)};
}

/// Window family and parameters as reported in JSON outputs.
inline nlohmann::ordered_json window_json(const DesignConfig& cfg) {
    nlohmann::ordered_json j;
    j["family"] = std::string(to_string(cfg.window));
    if (cfg.window == WindowKind::Gaussian) j["k"] = cfg.k;
    if (cfg.window == WindowKind::Taylor) {
        j["nbar"] = cfg.nbar;
        j["eta_db"] = cfg.eta_db;
    }
    return j;
}

inline nlohmann::ordered_json method_json(const DesignConfig& cfg) {
    nlohmann::ordered_json j;
    if (cfg.window == WindowKind::Lfm) {
        j["kind"] = "closed_form";
        return j;
    }
    j["kind"] = cfg.method == MethodKind::Polynomial ? "polynomial" : "smoothing_spline";
    if (cfg.method == MethodKind::Polynomial) j["degree"] = cfg.degree;
    else j["lambda"] = cfg.lambda ? nlohmann::ordered_json(*cfg.lambda) : nlohmann::ordered_json(nullptr);
    return j;
}

inline nlohmann::ordered_json to_json(const DesignConfig& cfg) {
    nlohmann::ordered_json j;
    j["window"] = window_json(cfg);
    j["method"] = method_json(cfg);
    j["T"] = cfg.pulse_length;
    j["B"] = cfg.bandwidth;
    j["fs"] = cfg.sample_rate;
    j["n_points"] = cfg.n_points;
    j["oversample"] = cfg.oversample;
    return j;
}

} // namespace nlfm::app
