#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmb {

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
    [[nodiscard]] DenseMatrix transpose() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Unblocked dense Cholesky A = L L' of a symmetric positive definite matrix.
/// Only the lower triangle of the input is read. O(n^3 / 3) flops.
class DenseCholesky {
public:
    explicit DenseCholesky(const DenseMatrix& a);

    [[nodiscard]] std::size_t dim() const noexcept { return lower_.rows(); }
    [[nodiscard]] const DenseMatrix& lower() const noexcept { return lower_; }
    /// log|A| = 2 sum log L_ii
    [[nodiscard]] double log_det() const noexcept { return log_det_; }

    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

private:
    DenseMatrix lower_;
    double log_det_ = 0.0;
};

}  // namespace mmb
