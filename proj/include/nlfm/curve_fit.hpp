#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nlfm/banded.hpp"
#include "nlfm/error.hpp"

namespace nlfm {

/// Observations (x_i, y_i) with strictly increasing, finite x and finite y.
class DataSet {
public:
    DataSet(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        require(x_.size() == y_.size(), ErrorKind::InvalidInput, "dataset: x and y differ in length");
        require(x_.size() >= 2, ErrorKind::InsufficientData, "dataset: need at least 2 points");
        for (std::size_t i = 0; i < x_.size(); ++i) {
            require(std::isfinite(x_[i]) && std::isfinite(y_[i]), ErrorKind::InvalidInput, "dataset: non-finite value");
            if (i > 0) {
                require(x_[i] > x_[i - 1], ErrorKind::InvalidInput, "dataset: x must be strictly increasing");
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return x_.size(); }
    [[nodiscard]] std::span<const double> x() const noexcept { return x_; }
    [[nodiscard]] std::span<const double> y() const noexcept { return y_; }
    [[nodiscard]] double x_min() const noexcept { return x_.front(); }
    [[nodiscard]] double x_max() const noexcept { return x_.back(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
};

/// u = (x - offset) / scale.
struct AffineMap {
    double offset = 0.0;
    double scale = 1.0;

    [[nodiscard]] double apply(double x) const noexcept { return (x - offset) / scale; }
};

struct Domain {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// y = y_scale * sum_p a_p u^p with u = x_map(x), valid on `domain`.
class PolynomialModel {
public:
    PolynomialModel(std::vector<double> coefficients, Domain domain, AffineMap x_map = {}, double y_scale = 1.0)
        : coefficients_(std::move(coefficients)), domain_(domain), x_map_(x_map), y_scale_(y_scale) {
        require(!coefficients_.empty(), ErrorKind::InvalidParameter, "polynomial: no coefficients");
        require(domain_.lo <= domain_.hi, ErrorKind::InvalidParameter, "polynomial: empty domain");
        require(x_map_.scale != 0.0 && y_scale_ != 0.0, ErrorKind::InvalidParameter, "polynomial: zero scale");
    }

    [[nodiscard]] int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
    /// Coefficients in the conditioned coordinate u.
    [[nodiscard]] std::span<const double> coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
    [[nodiscard]] const AffineMap& x_map() const noexcept { return x_map_; }
    [[nodiscard]] double y_scale() const noexcept { return y_scale_; }

    [[nodiscard]] double operator()(double x) const {
        require(domain_.contains(x), ErrorKind::OutOfDomain, "polynomial: x outside model domain");
        const double u = x_map_.apply(x);
        double acc = 0.0;
        for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * u + *it;
        return y_scale_ * acc;
    }

private:
    std::vector<double> coefficients_;
    Domain domain_;
    AffineMap x_map_;
    double y_scale_;
};

/// Natural cubic spline stored as knot values and knot second derivatives.
class SplineModel {
public:
    SplineModel(std::vector<double> knots, std::vector<double> values, std::vector<double> second_derivatives,
                double lambda)
        : knots_(std::move(knots)), values_(std::move(values)), second_(std::move(second_derivatives)),
          lambda_(lambda) {
        require(knots_.size() >= 2, ErrorKind::InsufficientData, "spline: need at least 2 knots");
        require(values_.size() == knots_.size() && second_.size() == knots_.size(), ErrorKind::InvalidInput,
                "spline: knot arrays differ in length");
        require(lambda_ >= 0.0, ErrorKind::InvalidParameter, "spline: lambda must be >= 0");
    }

    [[nodiscard]] std::span<const double> knots() const noexcept { return knots_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const double> second_derivatives() const noexcept { return second_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] Domain domain() const noexcept { return {knots_.front(), knots_.back()}; }

    [[nodiscard]] double operator()(double x) const {
        require(domain().contains(x), ErrorKind::OutOfDomain, "spline: x outside knot range");
        const std::size_t i = segment(x);
        const double h = knots_[i + 1] - knots_[i];
        const double a = (knots_[i + 1] - x) / h;
        const double b = 1.0 - a;
        return a * values_[i] + b * values_[i + 1] +
               ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * h * h / 6.0;
    }

    /// f'' is linear on each segment.
    [[nodiscard]] double second_derivative(double x) const {
        require(domain().contains(x), ErrorKind::OutOfDomain, "spline: x outside knot range");
        const std::size_t i = segment(x);
        const double a = (knots_[i + 1] - x) / (knots_[i + 1] - knots_[i]);
        return a * second_[i] + (1.0 - a) * second_[i + 1];
    }

private:
    [[nodiscard]] std::size_t segment(double x) const {
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
        const auto idx = static_cast<std::size_t>(it - knots_.begin());
        return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, knots_.size() - 2);
    }

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> second_;
    double lambda_;
};

using FittedModel = std::variant<PolynomialModel, SplineModel>;

inline double eval_model(const PolynomialModel& model, double x) { return model(x); }
inline double eval_model(const SplineModel& model, double x) { return model(x); }
inline double eval_model(const FittedModel& model, double x) {
    return std::visit([x](const auto& m) { return m(x); }, model);
}

inline Domain model_domain(const FittedModel& model) {
    return std::visit([](const auto& m) { return Domain{m.domain()}; }, model);
}

/// Least-squares polynomial of the given degree.
///
/// x is mapped affinely onto [-1, 1] and y divided by max|y| before a Householder QR solve of the
/// Vandermonde system; both maps are stored in the model.
inline PolynomialModel fit_polynomial(const DataSet& data, int degree) {
    require(degree >= 0, ErrorKind::InvalidParameter, "polynomial degree must be >= 0");
    const std::size_t n = data.size();
    const auto cols = static_cast<std::size_t>(degree) + 1;
    require(cols <= n, ErrorKind::Underdetermined, "polynomial degree must be below the number of points");

    const AffineMap x_map{0.5 * (data.x_min() + data.x_max()), 0.5 * (data.x_max() - data.x_min())};
    double y_scale = 0.0;
    for (double v : data.y()) y_scale = std::max(y_scale, std::abs(v));
    if (y_scale == 0.0) y_scale = 1.0;

    // Column-major Vandermonde matrix.
    std::vector<double> a(n * cols);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = x_map.apply(data.x()[i]);
        double power = 1.0;
        for (std::size_t j = 0; j < cols; ++j) {
            a[j * n + i] = power;
            power *= u;
        }
        rhs[i] = data.y()[i] / y_scale;
    }

    std::vector<double> rdiag(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        double* col = &a[j * n];
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm = std::hypot(norm, col[i]);
        require(norm > 0.0, ErrorKind::Underdetermined, "polynomial fit: rank-deficient design");
        const double alpha = col[j] > 0.0 ? -norm : norm;
        // v = col[j..] - alpha e_j, stored in place.
        col[j] -= alpha;
        const double vnorm2 = (col[j] * col[j]) + [&] {
            double s = 0.0;
            for (std::size_t i = j + 1; i < n; ++i) s += col[i] * col[i];
            return s;
        }();
        rdiag[j] = alpha;
        auto reflect = [&](double* target) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += col[i] * target[i];
            const double factor = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) target[i] -= factor * col[i];
        };
        for (std::size_t k = j + 1; k < cols; ++k) reflect(&a[k * n]);
        reflect(rhs.data());
    }

    std::vector<double> coeffs(cols);
    for (std::size_t jj = cols; jj-- > 0;) {
        double s = rhs[jj];
        for (std::size_t k = jj + 1; k < cols; ++k) s -= a[k * n + jj] * coeffs[k];
        coeffs[jj] = s / rdiag[jj];
    }
    return PolynomialModel(std::move(coeffs), Domain{data.x_min(), data.x_max()}, x_map, y_scale);
}

/// Natural cubic spline minimizing lambda * int f''^2 dx + sum (f(x_i) - y_i)^2.
///
/// Reinsch formulation: with h_i the knot spacings, Q the n x (n-2) second-difference matrix and
/// R the (n-2) x (n-2) tridiagonal Gram matrix of the hat functions, the interior second
/// derivatives solve the pentadiagonal system (R + lambda Q^T Q) gamma = Q^T y, and the fitted
/// values are y - lambda Q gamma. Solved in coordinates where x spans [0, 1] and |y| <= 1, which
/// rescales lambda by span^3.
inline SplineModel fit_smoothing_spline(const DataSet& data, double lambda) {
    require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::InvalidParameter, "spline lambda must be >= 0");
    const std::size_t n = data.size();
    require(lambda == 0.0 || n >= 3, ErrorKind::InsufficientData, "smoothing needs at least 3 points");

    std::vector<double> knots(data.x().begin(), data.x().end());
    std::vector<double> values(data.y().begin(), data.y().end());
    std::vector<double> second(n, 0.0);
    if (n == 2) return SplineModel(std::move(knots), std::move(values), std::move(second), lambda);

    const double x0 = data.x_min();
    const double span = data.x_max() - x0;
    double y_scale = 0.0;
    for (double v : data.y()) y_scale = std::max(y_scale, std::abs(v));
    if (y_scale == 0.0) y_scale = 1.0;
    const double alpha = lambda / (span * span * span);

    std::vector<double> u(n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = (data.x()[i] - x0) / span;
        v[i] = data.y()[i] / y_scale;
    }
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = u[i + 1] - u[i];

    // Column j (0-based, interior knot j+1) of Q has entries at rows j, j+1, j+2.
    const std::size_t m = n - 2;
    std::vector<double> q_lo(m);
    std::vector<double> q_mid(m);
    std::vector<double> q_hi(m);
    for (std::size_t j = 0; j < m; ++j) {
        q_lo[j] = 1.0 / h[j];
        q_mid[j] = -1.0 / h[j] - 1.0 / h[j + 1];
        q_hi[j] = 1.0 / h[j + 1];
    }

    SymmetricBandMatrix system(m, 2);
    std::vector<double> rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
        system.band(j, 0) = (h[j] + h[j + 1]) / 3.0 +
                            alpha * (q_lo[j] * q_lo[j] + q_mid[j] * q_mid[j] + q_hi[j] * q_hi[j]);
        if (j >= 1) {
            // Columns j-1 and j overlap on rows j and j+1.
            system.band(j, 1) = h[j] / 6.0 + alpha * (q_mid[j - 1] * q_lo[j] + q_hi[j - 1] * q_mid[j]);
        }
        if (j >= 2) {
            // Columns j-2 and j overlap on row j.
            system.band(j, 2) = alpha * q_hi[j - 2] * q_lo[j];
        }
        rhs[j] = q_lo[j] * v[j] + q_mid[j] * v[j + 1] + q_hi[j] * v[j + 2];
    }
    const std::vector<double> gamma = system.solve(rhs);

    if (alpha > 0.0) {
        std::vector<double> q_gamma(n, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            q_gamma[j] += q_lo[j] * gamma[j];
            q_gamma[j + 1] += q_mid[j] * gamma[j];
            q_gamma[j + 2] += q_hi[j] * gamma[j];
        }
        for (std::size_t i = 0; i < n; ++i) values[i] = y_scale * (v[i] - alpha * q_gamma[i]);
    }
    const double to_physical = y_scale / (span * span);
    for (std::size_t j = 0; j < m; ++j) second[j + 1] = gamma[j] * to_physical;
    return SplineModel(std::move(knots), std::move(values), std::move(second), lambda);
}

/// Sum of squared residuals of the model over the data.
template <typename Model>
double sse(const Model& model, const DataSet& data) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = data.y()[i] - eval_model(model, data.x()[i]);
        total += r * r;
    }
    return total;
}

/// Exact integral of f''(x)^2 over the knot range; f'' is piecewise linear.
inline double roughness(const SplineModel& model) {
    const auto knots = model.knots();
    const auto g = model.second_derivatives();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double h = knots[i + 1] - knots[i];
        total += h * (g[i] * g[i] + g[i] * g[i + 1] + g[i + 1] * g[i + 1]) / 3.0;
    }
    return total;
}

/// The smoothing-spline objective lambda * roughness + sse.
inline double penalized_objective(const SplineModel& model, const DataSet& data, double lambda) {
    return lambda * roughness(model) + sse(model, data);
}

} // namespace nlfm
