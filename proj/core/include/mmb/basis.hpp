#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmb {

/// Equidistant-knot B-spline basis on [x_min, x_max].
///
/// The knot vector is the open uniform extension of the domain grid: q extra
/// knots of spacing h on each side, so the basis has m = nseg + q functions
/// and the first one is supported on [x_min - q h, x_min + h].
struct BasisSpec {
    double x_min = 0.0;
    double x_max = 1.0;
    int nseg = 10;
    int degree = 2;

    [[nodiscard]] double h() const noexcept { return (x_max - x_min) / nseg; }
    [[nodiscard]] int m() const noexcept { return nseg + degree; }
};

/// Validates and returns a spec. Degree must be 2 or 3 and nseg >= 3.
BasisSpec build_spec(double x_min, double x_max, int nseg, int degree = 2);

/// Row-sparse n x m matrix of basis values. Row i holds degree+1 consecutive
/// nonzeros starting at column first(i) (0-based).
class SparseBasis {
public:
    SparseBasis() = default;
    SparseBasis(std::size_t rows, std::size_t cols, int degree);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] std::size_t width() const noexcept { return static_cast<std::size_t>(degree_) + 1; }

    [[nodiscard]] std::size_t first(std::size_t row) const { return first_[row]; }
    [[nodiscard]] std::span<const double> values(std::size_t row) const {
        return {values_.data() + row * width(), width()};
    }
    std::span<double> values(std::size_t row) {
        return {values_.data() + row * width(), width()};
    }
    void set_first(std::size_t row, std::size_t col) { first_[row] = col; }

    /// B * a
    [[nodiscard]] std::vector<double> multiply(std::span<const double> coef) const;
    /// B' * y
    [[nodiscard]] std::vector<double> transpose_multiply(std::span<const double> y) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    int degree_ = 0;
    std::vector<std::size_t> first_;
    std::vector<double> values_;
};

/// Cox-de Boor evaluation at every x. Throws DomainError naming the first
/// point outside [x_min, x_max]. At x_max the last segment is used.
SparseBasis eval_basis(const BasisSpec& spec, std::span<const double> x);

namespace detail {

/// Nonzero values of the degree-q uniform basis on segment `segment` at local
/// coordinate u in [0, 1]. Writes q+1 values; works for any q >= 0.
void uniform_segment_values(int degree, double u, std::span<double> out);

/// Value at x of the uniform B-spline of the given degree supported on
/// [x_min + (index - degree) h, x_min + (index + 1) h]. Indices may fall
/// outside the basis of any particular domain.
double uniform_basis_function(double x_min, double h, int degree, long index,
                              double x);

}  // namespace detail

/// Largest |h^2 B''_{j,4}(x) - (B_{j,2} - 2 B_{j+1,2} + B_{j+2,2})(x)| over
/// all quartic indices j and all x, with B'' from central differences of
/// step `fd_step`. Uses the knots of `spec` (its degree is ignored).
double check_second_derivative_identity(const BasisSpec& spec,
                                        std::span<const double> x,
                                        double fd_step = 1e-4);

}  // namespace mmb
