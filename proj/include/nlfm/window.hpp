#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlfm/erf.hpp"
#include "nlfm/error.hpp"

namespace nlfm {

/// Edge taper of -40 dB: exp(-k/16) = 0.01.
inline const double default_gaussian_k = 16.0 * std::log(100.0);
inline constexpr int default_taylor_nbar = 5;
inline constexpr double default_taylor_eta_db = 40.0;
inline constexpr std::size_t default_group_delay_points = 1001;

struct GaussianWindow {
    double k = default_gaussian_k;
};

struct TaylorWindow {
    int nbar = default_taylor_nbar;
    double eta_db = default_taylor_eta_db;
};

using WindowFamily = std::variant<GaussianWindow, TaylorWindow>;

/// F_1 .. F_{nbar-1} of the cosine series w(f) = 1 + sum_m F_m cos(2 pi m f / B).
struct TaylorCoefficients {
    std::vector<double> values;
};

/// Computes the Taylor weighting coefficients from the classic product formula.
///
/// A = acosh(10^(eta/20)) / pi, sigma^2 = nbar^2 / (A^2 + (nbar - 1/2)^2) and
///
///   F_m = (-1)^(m+1) prod_i (1 - m^2 / (sigma^2 (A^2 + (i - 1/2)^2))) / prod_{i != m} (1 - m^2 / i^2)
///
/// The result is twice the usual half-amplitude coefficient because the series here has no factor 2.
inline TaylorCoefficients taylor_coefficients(int nbar, double eta_db) {
    require(nbar >= 1, ErrorKind::InvalidParameter, "taylor nbar must be >= 1");
    require(std::isfinite(eta_db) && eta_db > 0.0, ErrorKind::InvalidParameter, "taylor eta_db must be > 0");

    const double a = std::acosh(std::pow(10.0, eta_db / 20.0)) / std::numbers::pi;
    const double a2 = a * a;
    const double half = nbar - 0.5;
    const double sigma2 = static_cast<double>(nbar) * nbar / (a2 + half * half);

    TaylorCoefficients out;
    out.values.reserve(static_cast<std::size_t>(nbar - 1));
    for (int m = 1; m < nbar; ++m) {
        const double m2 = static_cast<double>(m) * m;
        double numerator = 1.0;
        double denominator = 1.0;
        for (int i = 1; i < nbar; ++i) {
            const double shifted = i - 0.5;
            numerator *= 1.0 - m2 / (sigma2 * (a2 + shifted * shifted));
            if (i != m) denominator *= 1.0 - m2 / (static_cast<double>(i) * i);
        }
        const double sign = (m % 2 == 1) ? 1.0 : -1.0;
        out.values.push_back(sign * numerator / denominator);
    }
    return out;
}

/// Window family plus the band and pulse it is designed for.
///
/// Construction validates every parameter; for the Taylor family it also rejects parameter pairs
/// whose cosine series is not strictly positive across the band, since a non-positive weight
/// breaks the monotonicity of the group delay.
class WindowSpec {
public:
    WindowSpec(WindowFamily family, double bandwidth_hz, double pulse_length_s)
        : family_(std::move(family)), bandwidth_(bandwidth_hz), pulse_length_(pulse_length_s) {
        require(std::isfinite(bandwidth_) && bandwidth_ > 0.0, ErrorKind::InvalidParameter, "bandwidth must be > 0");
        require(std::isfinite(pulse_length_) && pulse_length_ > 0.0, ErrorKind::InvalidParameter,
                "pulse length must be > 0");
        if (const auto* g = std::get_if<GaussianWindow>(&family_)) {
            require(std::isfinite(g->k) && g->k > 0.0, ErrorKind::InvalidParameter, "gaussian k must be > 0");
            erf_edge_ = nlfm::erf(std::sqrt(g->k) / 4.0);
        } else {
            const auto& t = std::get<TaylorWindow>(family_);
            taylor_ = taylor_coefficients(t.nbar, t.eta_db);
            require(min_taylor_weight() > 0.0, ErrorKind::InvalidParameter,
                    "taylor parameters yield a non-positive window");
        }
    }

    static WindowSpec gaussian(double k, double bandwidth_hz, double pulse_length_s) {
        return {GaussianWindow{k}, bandwidth_hz, pulse_length_s};
    }
    static WindowSpec taylor(int nbar, double eta_db, double bandwidth_hz, double pulse_length_s) {
        return {TaylorWindow{nbar, eta_db}, bandwidth_hz, pulse_length_s};
    }

    [[nodiscard]] const WindowFamily& family() const noexcept { return family_; }
    [[nodiscard]] bool is_gaussian() const noexcept { return std::holds_alternative<GaussianWindow>(family_); }
    [[nodiscard]] double bandwidth() const noexcept { return bandwidth_; }
    [[nodiscard]] double pulse_length() const noexcept { return pulse_length_; }
    /// Empty for the Gaussian family.
    [[nodiscard]] const TaylorCoefficients& taylor() const noexcept { return taylor_; }
    /// erf(sqrt(k)/4) for the Gaussian family, the group-delay normalizer.
    [[nodiscard]] double gaussian_erf_edge() const noexcept { return erf_edge_; }

    [[nodiscard]] std::string label() const {
        char buf[96];
        if (const auto* g = std::get_if<GaussianWindow>(&family_)) {
            std::snprintf(buf, sizeof buf, "gaussian(k=%.10g)", g->k);
        } else {
            const auto& t = std::get<TaylorWindow>(family_);
            std::snprintf(buf, sizeof buf, "taylor(nbar=%d,eta_db=%.10g)", t.nbar, t.eta_db);
        }
        return buf;
    }

private:
    // Dense scan of the cosine series over one half band (the series is even).
    [[nodiscard]] double min_taylor_weight() const {
        constexpr int steps = 10000;
        double lowest = 1.0;
        for (int j = 0; j <= steps; ++j) {
            const double u = 0.5 * j / steps;
            double w = 1.0;
            for (std::size_t m = 0; m < taylor_.values.size(); ++m) {
                w += taylor_.values[m] * std::cos(2.0 * std::numbers::pi * static_cast<double>(m + 1) * u);
            }
            lowest = std::min(lowest, w);
        }
        return lowest;
    }

    WindowFamily family_;
    double bandwidth_;
    double pulse_length_;
    TaylorCoefficients taylor_;
    double erf_edge_ = 0.0;
};

namespace detail {
inline void require_in_band(const WindowSpec& spec, double f) {
    const double half = 0.5 * spec.bandwidth();
    require(std::isfinite(f) && f >= -half && f <= half, ErrorKind::OutOfBand, "frequency outside [-B/2, B/2]");
}
} // namespace detail

/// Relative PSD weight at baseband frequency f.
inline double window_weight(const WindowSpec& spec, double f) {
    detail::require_in_band(spec, f);
    const double b = spec.bandwidth();
    if (const auto* g = std::get_if<GaussianWindow>(&spec.family())) {
        const double r = f / (2.0 * b);
        return std::exp(-g->k * r * r);
    }
    double w = 1.0;
    const auto& coeffs = spec.taylor().values;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        w += coeffs[m] * std::cos(2.0 * std::numbers::pi * static_cast<double>(m + 1) * f / b);
    }
    return w;
}

/// Time at which the instantaneous frequency passes through f; the normalized running integral
/// of the window, pinned to -T/2, 0 and T/2 at -B/2, 0 and B/2.
inline double group_delay(const WindowSpec& spec, double f) {
    detail::require_in_band(spec, f);
    const double b = spec.bandwidth();
    const double t = spec.pulse_length();
    const double half = 0.5 * b;
    // Exact boundary values; the closed forms reach them only up to rounding.
    if (f == half) return 0.5 * t;
    if (f == -half) return -0.5 * t;

    if (const auto* g = std::get_if<GaussianWindow>(&spec.family())) {
        return t / (2.0 * spec.gaussian_erf_edge()) * nlfm::erf(f * std::sqrt(g->k) / (2.0 * b));
    }
    double series = 0.0;
    const auto& coeffs = spec.taylor().values;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double m = static_cast<double>(i + 1);
        series += coeffs[i] / m * std::sin(2.0 * std::numbers::pi * m * f / b);
    }
    return t * (f / b + series / (2.0 * std::numbers::pi));
}

/// Ordered (t, f) samples of the group delay; the dataset whose inverse is fitted.
struct GroupDelaySamples {
    std::vector<double> t;
    std::vector<double> f;

    [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
};

/// Evaluates the group delay on the uniform inclusive grid f_j = -B/2 + j B / (n - 1).
inline GroupDelaySamples sample_group_delay(const WindowSpec& spec, std::size_t n_points = default_group_delay_points) {
    require(n_points >= 2, ErrorKind::InvalidParameter, "n_points must be >= 2");
    const double b = spec.bandwidth();
    const double half = 0.5 * b;
    const auto last = static_cast<double>(n_points - 1);

    GroupDelaySamples out;
    out.t.resize(n_points);
    out.f.resize(n_points);
    for (std::size_t j = 0; j < n_points; ++j) {
        // Symmetric construction keeps (-t, -f) an exact mirror of (t, f).
        const auto mirrored = n_points - 1 - j;
        double f = 0.0;
        if (j == 0) {
            f = -half;
        } else if (j == n_points - 1) {
            f = half;
        } else if (2 * j < n_points - 1) {
            f = -half + b * static_cast<double>(j) / last;
        } else if (2 * j > n_points - 1) {
            f = half - b * static_cast<double>(mirrored) / last;
        }
        out.f[j] = f;
    }
    for (std::size_t j = 0; j < n_points; ++j) {
        const auto mirrored = n_points - 1 - j;
        if (mirrored < j) {
            out.t[j] = -out.t[mirrored];
        } else {
            out.t[j] = group_delay(spec, out.f[j]);
        }
    }
    for (std::size_t j = 1; j < n_points; ++j) {
        require(out.t[j] > out.t[j - 1], ErrorKind::NumericalFailure, "group delay samples are not strictly increasing");
    }
    return out;
}

} // namespace nlfm
