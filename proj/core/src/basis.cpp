#include "mmb/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mmb/errors.hpp"

namespace mmb {

BasisSpec build_spec(double x_min, double x_max, int nseg, int degree) {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw InvalidArgument("empty domain: x_min must be < x_max");
    }
    if (degree != 2 && degree != 3) {
        throw InvalidArgument("unsupported degree " + std::to_string(degree) +
                              " (expected 2 or 3)");
    }
    if (nseg < 3) {
        throw InvalidArgument("nseg must be >= 3");
    }
    return BasisSpec{x_min, x_max, nseg, degree};
}

SparseBasis::SparseBasis(std::size_t rows, std::size_t cols, int degree)
    : rows_(rows),
      cols_(cols),
      degree_(degree),
      first_(rows, 0),
      values_(rows * (static_cast<std::size_t>(degree) + 1), 0.0) {}

std::vector<double> SparseBasis::multiply(std::span<const double> coef) const {
    if (coef.size() != cols_) {
        throw DimensionMismatch("coefficient length does not match basis columns");
    }
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        auto v = values(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) acc += v[k] * coef[first_[i] + k];
        out[i] = acc;
    }
    return out;
}

std::vector<double> SparseBasis::transpose_multiply(std::span<const double> y) const {
    if (y.size() != rows_) {
        throw DimensionMismatch("vector length does not match basis rows");
    }
    std::vector<double> out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        auto v = values(i);
        for (std::size_t k = 0; k < v.size(); ++k) out[first_[i] + k] += v[k] * y[i];
    }
    return out;
}

namespace detail {

// Two-term de Boor recursion on integer knots ..., -1, 0, 1, 2, ... with the
// evaluation segment at [0, 1].
void uniform_segment_values(int degree, double u, std::span<double> out) {
    constexpr int kMaxDegree = 8;
    std::array<double, kMaxDegree + 1> left{};
    std::array<double, kMaxDegree + 1> right{};
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = u - 1.0 + j;
        right[j] = j - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = out[r] / j;  // right[r+1] + left[j-r] == j
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

double uniform_basis_function(double x_min, double h, int degree, long index,
                              double x) {
    const double t = (x - x_min) / h - static_cast<double>(index - degree);
    if (!(t >= 0.0) || !(t < degree + 1.0)) return 0.0;
    const int s = static_cast<int>(std::floor(t));
    std::array<double, 9> vals{};
    uniform_segment_values(degree, t - s, std::span<double>(vals.data(), degree + 1));
    return vals[degree - s];
}

}  // namespace detail

SparseBasis eval_basis(const BasisSpec& spec, std::span<const double> x) {
    const double h = spec.h();
    const int q = spec.degree;
    SparseBasis basis(x.size(), static_cast<std::size_t>(spec.m()), q);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (!(xi >= spec.x_min && xi <= spec.x_max)) {
            throw DomainError("x[" + std::to_string(i) + "] = " + std::to_string(xi) +
                                  " lies outside [x_min, x_max]",
                              i);
        }
        const double t = (xi - spec.x_min) / h;
        int s = static_cast<int>(std::floor(t));
        s = std::clamp(s, 0, spec.nseg - 1);
        const double u = std::clamp(t - s, 0.0, 1.0);
        basis.set_first(i, static_cast<std::size_t>(s));
        detail::uniform_segment_values(q, u, basis.values(i));
    }
    return basis;
}

double check_second_derivative_identity(const BasisSpec& spec,
                                        std::span<const double> x,
                                        double fd_step) {
    // Validates the points against the domain.
    (void)eval_basis(BasisSpec{spec.x_min, spec.x_max, spec.nseg, 2}, x);

    const double h = spec.h();
    const long quartic_count = spec.nseg + 4;
    double worst = 0.0;
    for (double xi : x) {
        for (long j = 0; j < quartic_count; ++j) {
            auto quartic = [&](double at) {
                return detail::uniform_basis_function(spec.x_min, h, 4, j, at);
            };
            const double second =
                (quartic(xi + fd_step) - 2.0 * quartic(xi) + quartic(xi - fd_step)) /
                (fd_step * fd_step);
            auto quad = [&](long k) {
                return detail::uniform_basis_function(spec.x_min, h, 2, k, xi);
            };
            const double diff = quad(j - 2) - 2.0 * quad(j - 1) + quad(j);
            worst = std::max(worst, std::abs(h * h * second - diff));
        }
    }
    return worst;
}

}  // namespace mmb
