#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "nlfm/error.hpp"

namespace nlfm {

using cplx = std::complex<double>;

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 transform. Forward uses exp(-2 pi i k n / N); inverse is unscaled.
inline void fft_radix2(std::span<cplx> data, bool inverse = false) {
    const std::size_t n = data.size();
    require(is_power_of_two(n), ErrorKind::InvalidParameter, "radix-2 transform needs a power-of-two length");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        // Twiddles from direct evaluation rather than recurrence, so error does not accumulate.
        std::vector<cplx> twiddle(half);
        for (std::size_t k = 0; k < half; ++k) {
            const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            twiddle[k] = {std::cos(angle), std::sin(angle)};
        }
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx a = data[start + k];
                const cplx b = data[start + k + half] * twiddle[k];
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
    }
}

/// DFT of any length; radix-2 directly, otherwise Bluestein's chirp-z on a power-of-two grid.
inline std::vector<cplx> dft(std::span<const cplx> input, bool inverse = false) {
    const std::size_t n = input.size();
    std::vector<cplx> out(input.begin(), input.end());
    if (n <= 1) return out;
    if (is_power_of_two(n)) {
        fft_radix2(out, inverse);
        return out;
    }
    const double sign = inverse ? 1.0 : -1.0;
    const std::size_t m = next_power_of_two(2 * n - 1);
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the angle argument small.
        const auto k2 = static_cast<double>((k * k) % (2 * n));
        const double angle = sign * std::numbers::pi * k2 / static_cast<double>(n);
        chirp[k] = {std::cos(angle), std::sin(angle)};
    }
    std::vector<cplx> a(m, cplx{});
    std::vector<cplx> b(m, cplx{});
    for (std::size_t k = 0; k < n; ++k) a[k] = input[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
    fft_radix2(a);
    fft_radix2(b);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_radix2(a, true);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
    return out;
}

} // namespace nlfm
