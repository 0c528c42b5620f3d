#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nlfm/error.hpp"
#include "nlfm/fft.hpp"
#include "nlfm/waveform.hpp"

namespace nlfm {

inline constexpr double default_mlw_level_db = -4.0;
inline constexpr std::size_t default_oversample = 4;
inline constexpr double db_floor = -200.0;

inline double magnitude_to_db(double magnitude) {
    return magnitude < 1e-10 ? db_floor : 20.0 * std::log10(magnitude);
}

/// Complex autocorrelation R(k) = sum_n x[n] conj(x[n - k]) at lags -(N-1)..(N-1), in that order.
///
/// Computed from the zero-padded power spectrum; negative lags are the conjugates of positive ones.
inline std::vector<cplx> autocorrelation_sequence(const Waveform& w) {
    const std::size_t n = w.size();
    require(n >= 1, ErrorKind::InvalidInput, "autocorrelation of an empty waveform");
    const std::size_t len = next_power_of_two(2 * n - 1);
    std::vector<cplx> spectrum(len, cplx{});
    std::copy(w.samples.begin(), w.samples.end(), spectrum.begin());
    fft_radix2(spectrum);
    for (auto& v : spectrum) v = std::norm(v);
    fft_radix2(spectrum, true);
    const double scale = 1.0 / static_cast<double>(len);

    std::vector<cplx> out(2 * n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx r = spectrum[k] * scale;
        out[n - 1 + k] = r;
        out[n - 1 - k] = std::conj(r);
    }
    out[n - 1] = {out[n - 1].real(), 0.0};
    return out;
}

/// Normalized autocorrelation magnitude on a symmetric lag axis.
struct AcfCurve {
    std::vector<double> lags;      ///< seconds
    std::vector<double> magnitude; ///< 1 at lag 0
    std::vector<double> db;
    std::size_t oversample = 1;
    double step = 0.0; ///< seconds between lags

    [[nodiscard]] std::size_t size() const noexcept { return lags.size(); }
    [[nodiscard]] std::size_t center() const noexcept { return lags.size() / 2; }
    [[nodiscard]] double lag_step() const noexcept { return step; }
};

namespace detail {

inline AcfCurve curve_from_magnitude(std::vector<double> mag, double lag_step, std::size_t oversample) {
    AcfCurve curve;
    const std::size_t count = mag.size();
    const std::size_t c = count / 2;
    const double peak = mag[c];
    require(peak > 0.0 && std::isfinite(peak), ErrorKind::NumericalFailure, "autocorrelation peak is not positive");
    curve.lags.resize(count);
    curve.db.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double m = i == c ? 1.0 : mag[i] / peak;
        require(std::isfinite(m), ErrorKind::NumericalFailure, "non-finite autocorrelation value");
        mag[i] = m;
        curve.lags[i] = (static_cast<double>(i) - static_cast<double>(c)) * lag_step;
        curve.db[i] = magnitude_to_db(m);
    }
    curve.magnitude = std::move(mag);
    curve.oversample = oversample;
    curve.step = lag_step;
    return curve;
}

} // namespace detail

/// Autocorrelation magnitude, optionally refined by zero-padding the power spectrum so that the
/// lag spacing becomes 1 / (oversample * fs).
inline AcfCurve autocorrelation(const Waveform& w, std::size_t oversample = 1) {
    require(oversample >= 1, ErrorKind::InvalidParameter, "oversample factor must be >= 1");
    const std::size_t n = w.size();
    require(n >= 1, ErrorKind::InvalidInput, "autocorrelation of an empty waveform");
    require(w.sample_rate > 0.0, ErrorKind::InvalidInput, "waveform has no sample rate");
    const double step = 1.0 / (static_cast<double>(oversample) * w.sample_rate);

    if (oversample == 1) {
        const auto r = autocorrelation_sequence(w);
        std::vector<double> mag(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) mag[i] = std::abs(r[i]);
        return detail::curve_from_magnitude(std::move(mag), step, 1);
    }

    const std::size_t len = next_power_of_two(2 * n - 1);
    std::vector<cplx> spectrum(len, cplx{});
    std::copy(w.samples.begin(), w.samples.end(), spectrum.begin());
    fft_radix2(spectrum);

    const std::size_t big = len * oversample;
    std::vector<cplx> padded(big, cplx{});
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) padded[k] = std::norm(spectrum[k]);
    for (std::size_t k = half + 1; k < len; ++k) padded[big - len + k] = std::norm(spectrum[k]);
    if (len >= 2) {
        // Split the Nyquist bin so the interpolated sequence stays Hermitian.
        const double nyquist = std::norm(spectrum[half]);
        padded[half] = 0.5 * nyquist;
        padded[big - half] += 0.5 * nyquist;
    } else {
        padded[0] = std::norm(spectrum[0]);
    }
    fft_radix2(padded, true);

    const std::size_t reach = (n - 1) * oversample;
    std::vector<double> mag(2 * reach + 1);
    for (std::size_t k = 0; k <= reach; ++k) {
        const double m = std::abs(padded[k]);
        mag[reach + k] = m;
        mag[reach - k] = m;
    }
    return detail::curve_from_magnitude(std::move(mag), step, oversample);
}

/// Zero-frequency-centred power spectrum |DFT(x padded to nfft)|^2.
struct Spectrum {
    std::vector<double> frequency; ///< Hz, ascending over [-fs/2, fs/2)
    std::vector<double> power;
};

inline Spectrum psd(const Waveform& w, std::size_t nfft) {
    require(nfft >= w.size() && nfft >= 1, ErrorKind::InvalidParameter, "nfft must be >= the waveform length");
    std::vector<cplx> padded(nfft, cplx{});
    std::copy(w.samples.begin(), w.samples.end(), padded.begin());
    const auto bins = dft(padded);
    Spectrum out;
    out.frequency.resize(nfft);
    out.power.resize(nfft);
    const std::size_t shift = nfft / 2;
    for (std::size_t j = 0; j < nfft; ++j) {
        const std::size_t k = (j + nfft - shift) % nfft;
        out.frequency[j] = (static_cast<double>(j) - static_cast<double>(shift)) * w.sample_rate / static_cast<double>(nfft);
        out.power[j] = std::norm(bins[k]);
    }
    return out;
}

/// Index of the first strict local minimum walking away from the centre, if any.
inline std::optional<std::size_t> first_null(const AcfCurve& curve, bool rightward) {
    const auto& m = curve.magnitude;
    const std::size_t c = curve.center();
    if (rightward) {
        for (std::size_t i = c + 1; i + 1 < m.size(); ++i) {
            if (m[i] < m[i - 1] && m[i] < m[i + 1]) return i;
        }
    } else {
        for (std::size_t i = c - 1; i >= 1 && i < m.size(); --i) {
            if (m[i] < m[i + 1] && m[i] < m[i - 1]) return i;
        }
    }
    return std::nullopt;
}

/// Peak sidelobe level in dB: the largest magnitude beyond the first null on either side of the
/// mainlobe. Empty when the curve decays without a local minimum.
inline std::optional<double> psl(const AcfCurve& curve) {
    if (curve.size() < 3) return std::nullopt;
    const auto right = first_null(curve, true);
    const auto left = first_null(curve, false);
    if (!right && !left) return std::nullopt;
    double peak = 0.0;
    if (right) {
        for (std::size_t i = *right; i < curve.size(); ++i) peak = std::max(peak, curve.magnitude[i]);
    }
    if (left) {
        for (std::size_t i = 0; i <= *left; ++i) peak = std::max(peak, curve.magnitude[i]);
    }
    return magnitude_to_db(peak);
}

/// Mainlobe width at level_db, from linear interpolation in dB between lag samples.
inline double mlw(const AcfCurve& curve, double level_db = default_mlw_level_db) {
    require(level_db < 0.0, ErrorKind::InvalidParameter, "mainlobe level must be below 0 dB");
    const auto& db = curve.db;
    const std::size_t c = curve.center();
    auto crossing = [&](int dir) -> double {
        std::size_t prev = c;
        while (true) {
            if ((dir > 0 && prev + 1 >= db.size()) || (dir < 0 && prev == 0)) {
                throw Error(ErrorKind::DegenerateMainlobe, "autocorrelation never falls below the mainlobe level");
            }
            const std::size_t i = dir > 0 ? prev + 1 : prev - 1;
            if (db[i] < level_db) {
                const double frac = (db[prev] - level_db) / (db[prev] - db[i]);
                return static_cast<double>(dir) * (std::abs(static_cast<double>(prev) - static_cast<double>(c)) + frac);
            }
            prev = i;
        }
    };
    return (crossing(+1) - crossing(-1)) * curve.lag_step();
}

inline double nmlw(const AcfCurve& nlfm_curve, const AcfCurve& lfm_curve) {
    return mlw(nlfm_curve) / mlw(lfm_curve);
}

/// Metrics for one design: refined values from the oversampled curve and raw values at fs.
struct AcfReport {
    std::optional<double> psl_db;
    std::optional<double> psl_db_raw;
    double mlw_seconds = 0.0;
    double mlw_seconds_raw = 0.0;
    double nmlw = 0.0;
    double nmlw_raw = 0.0;
    AcfCurve curve;
    std::string label;
};

/// Measures a waveform against the same-(T, B) LFM reference.
inline AcfReport measure(const Waveform& w, const Waveform& lfm_reference, std::size_t oversample = default_oversample) {
    AcfReport report;
    report.label = w.label;
    const AcfCurve raw = autocorrelation(w, 1);
    const AcfCurve lfm_raw = autocorrelation(lfm_reference, 1);
    report.curve = autocorrelation(w, oversample);
    const AcfCurve lfm_fine = autocorrelation(lfm_reference, oversample);
    report.psl_db = psl(report.curve);
    report.psl_db_raw = psl(raw);
    report.mlw_seconds = mlw(report.curve);
    report.mlw_seconds_raw = mlw(raw);
    report.nmlw = report.mlw_seconds / mlw(lfm_fine);
    report.nmlw_raw = report.mlw_seconds_raw / mlw(lfm_raw);
    return report;
}

} // namespace nlfm
