#pragma once

// Independent reference computations used only by the test suites. Nothing here calls into the
// library's numerical paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Alternating Maclaurin series of erf summed in binary128 until terms vanish.
inline double erf_maclaurin(double xd) {
    using q = __float128;
    const q x = xd;
    const q x2 = x * x;
    q term = x; // (-1)^n x^(2n+1) / n!
    q sum = x;
    for (int n = 1; n < 400; ++n) {
        term *= -x2 / n;
        const q add = term / (2 * n + 1);
        sum += add;
        const q mag = add < 0 ? -add : add;
        if (mag < static_cast<q>(1e-30L) && n > 2 * static_cast<int>(xd * xd) + 5) break;
    }
    // 2/sqrt(pi) to 36 digits.
    const q two_over_sqrt_pi = static_cast<q>(1.128379167095512573896158903121545172L);
    return static_cast<double>(two_over_sqrt_pi * sum);
}

/// Taylor weighting coefficients by direct transcription of the product formula in long double.
inline std::vector<long double> taylor_coefficients(int nbar, long double eta_db) {
    const long double pi = std::numbers::pi_v<long double>;
    const long double r = std::pow(10.0L, eta_db / 20.0L);
    const long double a = std::log(r + std::sqrt(r * r - 1.0L)) / pi;
    const long double s2 = static_cast<long double>(nbar) * nbar / (a * a + (nbar - 0.5L) * (nbar - 0.5L));
    std::vector<long double> out;
    for (int m = 1; m < nbar; ++m) {
        long double num = 1.0L;
        for (int i = 1; i < nbar; ++i) num *= 1.0L - static_cast<long double>(m) * m / (s2 * (a * a + (i - 0.5L) * (i - 0.5L)));
        long double den = 1.0L;
        for (int i = 1; i < nbar; ++i) {
            if (i != m) den *= 1.0L - static_cast<long double>(m) * m / (static_cast<long double>(i) * i);
        }
        // Classic half-amplitude coefficient, doubled for a series written without the factor 2.
        const long double classic = ((m % 2) ? 0.5L : -0.5L) * num / den;
        out.push_back(2.0L * classic);
    }
    return out;
}

/// Adaptive Simpson quadrature in long double.
inline long double integrate(const std::function<long double(long double)>& f, long double a, long double b,
                             long double tol = 1e-15L) {
    std::function<long double(long double, long double, long double, long double, long double, long double, int)> rec;
    rec = [&](long double lo, long double hi, long double flo, long double fmid, long double fhi, long double whole,
              int depth) -> long double {
        const long double mid = 0.5L * (lo + hi);
        const long double lm = 0.5L * (lo + mid);
        const long double rm = 0.5L * (mid + hi);
        const long double flm = f(lm);
        const long double frm = f(rm);
        const long double left = (mid - lo) / 6.0L * (flo + 4.0L * flm + fmid);
        const long double right = (hi - mid) / 6.0L * (fmid + 4.0L * frm + fhi);
        const long double diff = left + right - whole;
        if (depth > 40 || std::abs(diff) <= 15.0L * tol) return left + right + diff / 15.0L;
        return rec(lo, mid, flo, flm, fmid, left, depth + 1) + rec(mid, hi, fmid, frm, fhi, right, depth + 1);
    };
    const long double fa = f(a);
    const long double fb = f(b);
    const long double fm = f(0.5L * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0L * (fa + 4.0L * fm + fb), 0);
}

/// Solves a dense square system by Gaussian elimination with partial pivoting (long double).
inline std::vector<long double> gauss_solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<long double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Least-squares polynomial by the normal equations on x mapped to [-1, 1] and y divided by max|y|.
/// Returns coefficients in that conditioned coordinate.
inline std::vector<double> polyfit_normal_equations(const std::vector<double>& x, const std::vector<double>& y,
                                                    int degree) {
    const std::size_t n = x.size();
    const long double center = 0.5L * (static_cast<long double>(x.front()) + x.back());
    const long double half = 0.5L * (static_cast<long double>(x.back()) - x.front());
    long double ys = 0.0L;
    for (double v : y) ys = std::max(ys, std::abs(static_cast<long double>(v)));
    if (ys == 0.0L) ys = 1.0L;
    const auto m = static_cast<std::size_t>(degree) + 1;
    std::vector<std::vector<long double>> ata(m, std::vector<long double>(m, 0.0L));
    std::vector<long double> aty(m, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        const long double u = (x[i] - center) / half;
        std::vector<long double> p(m);
        p[0] = 1.0L;
        for (std::size_t j = 1; j < m; ++j) p[j] = p[j - 1] * u;
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < m; ++c) ata[r][c] += p[r] * p[c];
            aty[r] += p[r] * (y[i] / ys);
        }
    }
    const auto sol = gauss_solve(ata, aty);
    return {sol.begin(), sol.end()};
}

/// Finite-difference discretization of the smoothing-spline objective.
///
/// f lives on a uniform grid of `grid` nodes over [x_1, x_n]; data values are read by linear
/// interpolation between nodes; the penalty is lambda * sum (second difference / h^2)^2 * h. The
/// stationarity system is banded (second differences couple 5 nodes, interpolation 2), and is
/// solved by unpivoted elimination restricted to the band. Returns the fitted values at the data x.
inline std::vector<double> spline_fd_qp(const std::vector<double>& x, const std::vector<double>& y, double lambda,
                                        std::size_t grid = 3000) {
    const std::size_t n = x.size();
    const long double x0 = x.front();
    const long double h = (static_cast<long double>(x.back()) - x0) / static_cast<long double>(grid - 1);
    const std::size_t bw = 2;
    // Full rows stored densely over the band [i - bw, i + bw].
    std::vector<std::vector<long double>> a(grid, std::vector<long double>(2 * bw + 1, 0.0L));
    std::vector<long double> b(grid, 0.0L);
    auto add = [&](std::size_t r, std::size_t c, long double v) { a[r][c + bw - r] += v; };

    const long double w = static_cast<long double>(lambda) * h / (h * h * h * h);
    for (std::size_t k = 0; k + 2 < grid; ++k) {
        const std::size_t idx[3] = {k, k + 1, k + 2};
        const long double coef[3] = {1.0L, -2.0L, 1.0L};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) add(idx[r], idx[c], w * coef[r] * coef[c]);
        }
    }
    std::vector<std::size_t> cell(n);
    std::vector<long double> frac(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long double pos = (x[i] - x0) / h;
        auto j = static_cast<std::size_t>(std::floor(pos));
        if (j > grid - 2) j = grid - 2;
        cell[i] = j;
        frac[i] = pos - static_cast<long double>(j);
        const long double c0 = 1.0L - frac[i];
        const long double c1 = frac[i];
        add(j, j, c0 * c0);
        add(j, j + 1, c0 * c1);
        add(j + 1, j, c1 * c0);
        add(j + 1, j + 1, c1 * c1);
        b[j] += c0 * y[i];
        b[j + 1] += c1 * y[i];
    }
    for (std::size_t col = 0; col < grid; ++col) {
        const long double piv = a[col][bw];
        for (std::size_t r = col + 1; r <= std::min(grid - 1, col + bw); ++r) {
            const long double f = a[r][col + bw - r] / piv;
            for (std::size_t c = col; c <= std::min(grid - 1, col + bw); ++c) a[r][c + bw - r] -= f * a[col][c + bw - col];
            b[r] -= f * b[col];
        }
    }
    std::vector<long double> f(grid);
    for (std::size_t i = grid; i-- > 0;) {
        long double s = b[i];
        for (std::size_t c = i + 1; c <= std::min(grid - 1, i + bw); ++c) s -= a[i][c + bw - i] * f[c];
        f[i] = s / a[i][bw];
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<double>((1.0L - frac[i]) * f[cell[i]] + frac[i] * f[cell[i] + 1]);
    }
    return out;
}

/// Textbook natural cubic interpolating spline (moment equations solved by the Thomas algorithm).
struct NaturalCubic {
    std::vector<double> x, y, m;

    NaturalCubic(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)), m(x.size(), 0.0) {
        const std::size_t n = x.size();
        if (n < 3) return;
        std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1];
            const double h1 = x[i + 1] - x[i];
            sub[i] = h0;
            diag[i] = 2.0 * (h0 + h1);
            sup[i] = h1;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        for (std::size_t i = 1; i < n; ++i) {
            const double f = sub[i] / diag[i - 1];
            diag[i] -= f * sup[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    }

    double operator()(double t) const {
        std::size_t i = 0;
        while (i + 2 < x.size() && t > x[i + 1]) ++i;
        const double h = x[i + 1] - x[i];
        const double d0 = x[i + 1] - t;
        const double d1 = t - x[i];
        return m[i] * d0 * d0 * d0 / (6 * h) + m[i + 1] * d1 * d1 * d1 / (6 * h) + (y[i] / h - m[i] * h / 6) * d0 +
               (y[i + 1] / h - m[i + 1] * h / 6) * d1;
    }
};

/// R(k) = sum_n x[n] conj(x[n - k]) for k = -(N-1)..(N-1), by the definition.
inline std::vector<cplx> direct_autocorrelation(const std::vector<cplx>& x) {
    const auto n = static_cast<long>(x.size());
    std::vector<cplx> out(static_cast<std::size_t>(2 * n - 1));
    for (long k = -(n - 1); k <= n - 1; ++k) {
        std::complex<long double> acc{};
        for (long i = 0; i < n; ++i) {
            const long j = i - k;
            if (j < 0 || j >= n) continue;
            acc += std::complex<long double>(x[static_cast<std::size_t>(i)]) *
                   std::conj(std::complex<long double>(x[static_cast<std::size_t>(j)]));
        }
        out[static_cast<std::size_t>(k + n - 1)] = cplx(acc);
    }
    return out;
}

/// O(N^2) DFT with exp(-2 pi i k n / N).
inline std::vector<cplx> direct_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<long double> acc{};
        for (std::size_t i = 0; i < n; ++i) {
            const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * i) % n) / n;
            acc += std::complex<long double>(x[i]) * std::complex<long double>(std::cos(angle), std::sin(angle));
        }
        out[k] = cplx(acc);
    }
    return out;
}

} // namespace oracle
