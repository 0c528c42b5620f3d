#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlfm/acf.hpp"
#include "nlfm/error.hpp"
#include "nlfm/waveform.hpp"

namespace nlfm::app {

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::Io, "cannot create output directory '" + dir.string() + "'");
    }
}

/// index,t_seconds,re,im
inline std::string waveform_csv(const Waveform& w) {
    std::string out = "index,t_seconds,re,im\n";
    const auto t = pulse_time_grid(w.pulse_length, w.sample_rate);
    for (std::size_t i = 0; i < w.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(i < t.size() ? t[i] : 0.0);
        out += ',';
        out += format_double(w.samples[i].real());
        out += ',';
        out += format_double(w.samples[i].imag());
        out += '\n';
    }
    return out;
}

/// Reads the samples back from waveform CSV text; sample rate and pulse length come from metadata.
inline std::vector<cplx> parse_waveform_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    std::vector<cplx> samples;
    if (!std::getline(ss, line) || line.rfind("index,t_seconds,re,im", 0) != 0) {
        throw Error(ErrorKind::InvalidInput, "waveform csv: missing header");
    }
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell[4];
        for (auto& c : cell) {
            if (!std::getline(row, c, ',')) throw Error(ErrorKind::InvalidInput, "waveform csv: short row");
        }
        samples.emplace_back(std::stod(cell[2]), std::stod(cell[3]));
    }
    return samples;
}

/// Interleaved little-endian float64 I/Q pairs.
inline std::string waveform_iq(const Waveform& w) {
    std::string out(w.size() * 16, '\0');
    auto put = [&](std::size_t offset, double v) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            out[offset + static_cast<std::size_t>(b)] = static_cast<char>(bits & 0xffu);
            bits >>= 8;
        }
    };
    for (std::size_t i = 0; i < w.size(); ++i) {
        put(16 * i, w.samples[i].real());
        put(16 * i + 8, w.samples[i].imag());
    }
    return out;
}

inline std::vector<cplx> parse_waveform_iq(const std::string& bytes) {
    if (bytes.size() % 16 != 0) throw Error(ErrorKind::InvalidInput, "iq file size is not a multiple of 16 bytes");
    auto get = [&](std::size_t offset) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) {
            bits = (bits << 8) | static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(b)]);
        }
        return std::bit_cast<double>(bits);
    };
    std::vector<cplx> out(bytes.size() / 16);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {get(16 * i), get(16 * i + 8)};
    return out;
}

inline nlohmann::ordered_json waveform_meta(const Waveform& w) {
    nlohmann::ordered_json j;
    j["fs"] = w.sample_rate;
    j["T"] = w.pulse_length;
    j["label"] = w.label;
    j["samples"] = w.size();
    j["format"] = "interleaved little-endian float64 I/Q";
    return j;
}

/// lag_seconds,magnitude,db
inline std::string acf_csv(const AcfCurve& curve) {
    std::string out = "lag_seconds,magnitude,db\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out += format_double(curve.lags[i]);
        out += ',';
        out += format_double(curve.magnitude[i]);
        out += ',';
        out += format_double(curve.db[i]);
        out += '\n';
    }
    return out;
}

struct AcfRow {
    double lag = 0.0;
    double magnitude = 0.0;
    double db = 0.0;
};

inline std::vector<AcfRow> parse_acf_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    std::vector<AcfRow> rows;
    if (!std::getline(ss, line) || line.rfind("lag_seconds,magnitude,db", 0) != 0) {
        throw Error(ErrorKind::InvalidInput, "acf csv: missing header");
    }
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        rows.push_back({std::stod(a), std::stod(b), std::stod(c)});
    }
    return rows;
}

/// Line plot of the dB curve over [-half_span, half_span], with the PSL level marked.
inline std::string acf_svg(const AcfCurve& curve, std::optional<double> psl_db, double half_span,
                           const std::string& title) {
    constexpr double width = 800.0;
    constexpr double height = 480.0;
    constexpr double left = 70.0;
    constexpr double right = 20.0;
    constexpr double top = 40.0;
    constexpr double bottom = 50.0;
    constexpr double db_min = -80.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto sx = [&](double lag) { return left + (lag + half_span) / (2.0 * half_span) * plot_w; };
    auto sy = [&](double db) { return top + (0.0 - std::max(db, db_min)) / (0.0 - db_min) * plot_h; };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" viewBox=\"0 0 800 480\">\n";
    s += "<rect width=\"800\" height=\"480\" fill=\"white\"/>\n";
    s += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
    s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int db = 0; db >= static_cast<int>(db_min); db -= 10) {
        const double y = sy(db);
        s += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" + num(y) +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(db) + "</text>\n";
    }
    for (int tick = -4; tick <= 4; ++tick) {
        const double lag = half_span * tick / 4.0;
        const double x = sx(lag);
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(top + plot_h + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(x) + "\" y=\"" + num(top + plot_h + 18) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num(lag * 1e6) + "</text>\n";
    }
    s += "<text x=\"400\" y=\"" + num(height - 8) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">lag (us)</text>\n";
    s += "<text x=\"16\" y=\"" + num(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num(top + plot_h / 2) + ")\">|ACF| (dB)</text>\n";

    s += "<polyline fill=\"none\" stroke=\"#1f4e9a\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (std::abs(curve.lags[i]) > half_span) continue;
        s += num(sx(curve.lags[i])) + "," + num(sy(curve.db[i])) + " ";
    }
    s += "\"/>\n";
    if (psl_db) {
        const double y = sy(*psl_db);
        s += "<line x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" + num(y) +
             "\" stroke=\"#c0392b\" stroke-dasharray=\"6,4\"/>\n";
        s += "<text x=\"" + num(left + plot_w - 4) + "\" y=\"" + num(y - 5) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#c0392b\">PSL " + num(*psl_db) +
             " dB</text>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace nlfm::app
