#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nlfm/error.hpp"

namespace nlfm {

/// Symmetric positive-definite matrix stored by its lower diagonals.
///
/// band(i, d) is the entry at row i, column i - d, for d = 0..half_bandwidth.
class SymmetricBandMatrix {
public:
    SymmetricBandMatrix(std::size_t n, std::size_t half_bandwidth)
        : n_(n), width_(half_bandwidth + 1), data_(n * (half_bandwidth + 1), 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t half_bandwidth() const noexcept { return width_ - 1; }

    double& band(std::size_t i, std::size_t d) { return data_[i * width_ + d]; }
    [[nodiscard]] double band(std::size_t i, std::size_t d) const { return data_[i * width_ + d]; }

    /// Entry (i, j) of the full matrix; zero outside the band.
    [[nodiscard]] double at(std::size_t i, std::size_t j) const {
        const std::size_t hi = i > j ? i : j;
        const std::size_t d = i > j ? i - j : j - i;
        return d < width_ ? band(hi, d) : 0.0;
    }

    /// Solves A x = rhs by banded LDL^T factorization. Throws on a non-positive pivot.
    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const {
        require(rhs.size() == n_, ErrorKind::InvalidInput, "band solve: rhs size mismatch");
        const std::size_t p = width_ - 1;
        // l(i, d): unit lower factor at row i, column i - d.
        std::vector<double> l(n_ * width_, 0.0);
        std::vector<double> diag(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t first = i > p ? i - p : 0;
            for (std::size_t j = first; j <= i; ++j) {
                double sum = band(i, i - j);
                const std::size_t kfirst = std::max(first, j > p ? j - p : std::size_t{0});
                for (std::size_t k = kfirst; k < j; ++k) {
                    sum -= l[i * width_ + (i - k)] * l[j * width_ + (j - k)] * diag[k];
                }
                if (j == i) {
                    require(sum > 0.0 && std::isfinite(sum), ErrorKind::NumericalFailure,
                            "band solve: matrix is not positive definite");
                    diag[i] = sum;
                    l[i * width_] = 1.0;
                } else {
                    l[i * width_ + (i - j)] = sum / diag[j];
                }
            }
        }
        std::vector<double> x(rhs.begin(), rhs.end());
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t first = i > p ? i - p : 0;
            for (std::size_t k = first; k < i; ++k) x[i] -= l[i * width_ + (i - k)] * x[k];
        }
        for (std::size_t i = 0; i < n_; ++i) x[i] /= diag[i];
        for (std::size_t ii = n_; ii-- > 0;) {
            const std::size_t last = std::min(n_ - 1, ii + p);
            for (std::size_t k = ii + 1; k <= last; ++k) x[ii] -= l[k * width_ + (k - ii)] * x[k];
        }
        return x;
    }

private:
    std::size_t n_;
    std::size_t width_;
    std::vector<double> data_;
};

} // namespace nlfm
