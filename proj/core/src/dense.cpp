#include "mmb/dense.hpp"

#include <cmath>

#include "mmb/errors.hpp"

namespace mmb {

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != cols_) throw DimensionMismatch("dense multiply: length mismatch");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const auto r = row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * x[j];
        out[i] = acc;
    }
    return out;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseCholesky::DenseCholesky(const DenseMatrix& a) : lower_(a.rows(), a.rows()) {
    if (a.rows() != a.cols()) throw DimensionMismatch("cholesky: matrix is not square");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double* li = &lower_(i, 0);
        for (std::size_t j = 0; j <= i; ++j) {
            const double* lj = &lower_(j, 0);
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) throw NotPositiveDefinite(i);
                li[i] = std::sqrt(s);
                log_det_ += 2.0 * std::log(li[i]);
            } else {
                li[j] = s / lj[j];
            }
        }
    }
}

std::vector<double> DenseCholesky::solve(std::span<const double> rhs) const {
    const std::size_t n = dim();
    if (rhs.size() != n) throw DimensionMismatch("cholesky solve: length mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        const auto li = lower_.row(i);
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= li[k] * x[k];
        x[i] = s / li[i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= lower_(k, i) * x[k];
        x[i] = s / lower_(i, i);
    }
    return x;
}

}  // namespace mmb
