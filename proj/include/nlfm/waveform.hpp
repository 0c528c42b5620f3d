#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlfm/curve_fit.hpp"
#include "nlfm/error.hpp"
#include "nlfm/fft.hpp"
#include "nlfm/window.hpp"

namespace nlfm {

inline constexpr int default_polynomial_degree = 9;
inline constexpr std::size_t monotone_scan_points = 10000;

struct PolynomialMethod {
    int degree = default_polynomial_degree;
};

/// No default for lambda: the smoothing parameter must always be chosen explicitly.
struct SplineMethod {
    double lambda;
};

using FitMethod = std::variant<PolynomialMethod, SplineMethod>;

inline std::string method_label(const FitMethod& method) {
    char buf[64];
    if (const auto* p = std::get_if<PolynomialMethod>(&method)) {
        std::snprintf(buf, sizeof buf, "polynomial(degree=%d)", p->degree);
    } else {
        std::snprintf(buf, sizeof buf, "smoothing_spline(lambda=%.10g)", std::get<SplineMethod>(method).lambda);
    }
    return buf;
}

/// Fitted inverse of the group delay: instantaneous frequency as a function of time.
struct FrequencyModel {
    FittedModel fit;
    WindowSpec spec;
    FitMethod method;
    /// f strictly increasing on a dense grid over [-T/2, T/2].
    bool monotone = false;
    /// max |f(+-T/2)| exceeds B/2 by more than 1% of B.
    bool band_overshoot = false;
    std::vector<std::string> diagnostics;

    [[nodiscard]] double operator()(double t) const { return eval_model(fit, t); }
    [[nodiscard]] std::string label() const { return spec.label() + " " + method_label(method); }
};

/// Samples the group delay, fits t -> f with the chosen method and checks the result.
inline FrequencyModel design_frequency_function(const WindowSpec& spec, const FitMethod& method,
                                                std::size_t n_points = default_group_delay_points) {
    const GroupDelaySamples samples = sample_group_delay(spec, n_points);
    const DataSet data(samples.t, samples.f);
    FittedModel fit = std::holds_alternative<PolynomialMethod>(method)
                          ? FittedModel{fit_polynomial(data, std::get<PolynomialMethod>(method).degree)}
                          : FittedModel{fit_smoothing_spline(data, std::get<SplineMethod>(method).lambda)};

    FrequencyModel model{std::move(fit), spec, method, true, false, {}};
    const double half_t = 0.5 * spec.pulse_length();
    double previous = model(-half_t);
    for (std::size_t j = 1; j < monotone_scan_points; ++j) {
        const double t = j + 1 == monotone_scan_points
                             ? half_t
                             : -half_t + spec.pulse_length() * static_cast<double>(j) /
                                             static_cast<double>(monotone_scan_points - 1);
        const double f = model(t);
        if (!(f > previous)) model.monotone = false;
        previous = f;
    }
    if (!model.monotone) model.diagnostics.emplace_back("fitted frequency is not strictly increasing");

    const double edge = std::max(std::abs(model(-half_t)), std::abs(model(half_t)));
    if (edge > 0.5 * spec.bandwidth() + 0.01 * spec.bandwidth()) {
        model.band_overshoot = true;
        model.diagnostics.emplace_back("fitted frequency overshoots the band by more than 1% of B");
    }
    return model;
}

/// Constant-envelope complex baseband pulse.
struct Waveform {
    std::vector<cplx> samples;
    double sample_rate = 0.0;
    double pulse_length = 0.0;
    std::string label;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
};

inline std::size_t pulse_sample_count(double pulse_length, double fs) {
    return static_cast<std::size_t>(std::llround(pulse_length * fs));
}

/// Midpoint grid t_i = -T/2 + (i + 1/2)/fs, strictly inside [-T/2, T/2].
inline std::vector<double> pulse_time_grid(double pulse_length, double fs) {
    const std::size_t n = pulse_sample_count(pulse_length, fs);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = -0.5 * pulse_length + (static_cast<double>(i) + 0.5) / fs;
    return t;
}

/// exp(j phase) adjusted by at most a few ulps so that std::abs returns exactly 1.
inline cplx unit_phasor(double phase) {
    double c = std::cos(phase);
    double s = std::sin(phase);
    for (int attempt = 0; attempt < 16; ++attempt) {
        const double r = std::abs(cplx{c, s});
        if (r == 1.0) break;
        double& big = std::abs(c) >= std::abs(s) ? c : s;
        const double toward = r > 1.0 ? 0.0 : 2.0 * big;
        big = std::nextafter(big, toward);
    }
    return {c, s};
}

/// phi(t_i) = 2 pi * cumulative trapezoid of f from t_0, with phi(t_0) = 0.
template <typename FrequencyFn>
std::vector<double> integrate_phase(const FrequencyFn& frequency, double pulse_length, double fs) {
    require(std::isfinite(fs) && fs > 0.0, ErrorKind::InvalidParameter, "sample rate must be > 0");
    const std::vector<double> t = pulse_time_grid(pulse_length, fs);
    std::vector<double> phase(t.size(), 0.0);
    if (t.empty()) return phase;
    const double step = std::numbers::pi / fs;
    double prev_f = frequency(t[0]);
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double f = frequency(t[i]);
        acc += step * (prev_f + f);
        phase[i] = acc;
        prev_f = f;
    }
    return phase;
}

inline std::vector<double> integrate_phase(const FrequencyModel& model, double fs) {
    return integrate_phase(model, model.spec.pulse_length(), fs);
}

inline Waveform waveform_from_phase(const std::vector<double>& phase, double fs, double pulse_length,
                                    std::string label) {
    Waveform w{{}, fs, pulse_length, std::move(label)};
    w.samples.reserve(phase.size());
    for (double p : phase) {
        require(std::isfinite(p), ErrorKind::NumericalFailure, "non-finite phase");
        w.samples.push_back(unit_phasor(p));
    }
    return w;
}

/// x(t) = exp(j phi(t)) with phi integrated from the fitted frequency law.
inline Waveform synthesize_nlfm(const FrequencyModel& model, double fs) {
    require(std::isfinite(fs) && fs > model.spec.bandwidth(), ErrorKind::Aliasing,
            "sample rate must exceed the bandwidth");
    return waveform_from_phase(integrate_phase(model, fs), fs, model.spec.pulse_length(), model.label());
}

/// Linear chirp f(t) = (B/T) t with closed-form phase pi (B/T) (t^2 - t_0^2).
inline Waveform synthesize_lfm(double pulse_length, double bandwidth, double fs) {
    require(std::isfinite(pulse_length) && pulse_length > 0.0, ErrorKind::InvalidParameter, "pulse length must be > 0");
    require(std::isfinite(bandwidth) && bandwidth > 0.0, ErrorKind::InvalidParameter, "bandwidth must be > 0");
    require(std::isfinite(fs) && fs > bandwidth, ErrorKind::Aliasing, "sample rate must exceed the bandwidth");
    const std::vector<double> t = pulse_time_grid(pulse_length, fs);
    const double rate = bandwidth / pulse_length;
    std::vector<double> phase(t.size(), 0.0);
    if (!t.empty()) {
        const double t0 = t.front();
        // (t^2 - t0^2) factored to avoid cancellation.
        for (std::size_t i = 0; i < t.size(); ++i) phase[i] = std::numbers::pi * rate * (t[i] - t0) * (t[i] + t0);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "lfm(T=%.10g,B=%.10g)", pulse_length, bandwidth);
    return waveform_from_phase(phase, fs, pulse_length, buf);
}

/// max_i |x[N-1-i] - x[i]|; zero for a pulse whose frequency law is odd about the centre.
inline double time_reversal_asymmetry(const Waveform& w) {
    double worst = 0.0;
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(w.samples[n - 1 - i] - w.samples[i]));
    return worst;
}

} // namespace nlfm
