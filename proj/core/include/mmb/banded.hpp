#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmb/dense.hpp"

namespace mmb {

/// Symmetric band matrix: the diagonal plus `bandwidth` sub-diagonals.
/// Row i stores entries (i, i-w) .. (i, i) contiguously; positions left of
/// column 0 are padding and stay zero.
class BandSymMatrix {
public:
    BandSymMatrix() = default;
    BandSymMatrix(std::size_t dim, std::size_t bandwidth);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t bandwidth() const noexcept { return w_; }

    /// Lower-triangle element, i >= j and i - j <= bandwidth.
    double& lower(std::size_t i, std::size_t j) { return data_[i * (w_ + 1) + j + w_ - i]; }
    [[nodiscard]] double lower(std::size_t i, std::size_t j) const {
        return data_[i * (w_ + 1) + j + w_ - i];
    }

    /// Symmetric element access; zero outside the band.
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const;

    /// Row i of the lower band, columns i-w .. i (leading padding included).
    [[nodiscard]] std::span<const double> band_row(std::size_t i) const {
        return {data_.data() + i * (w_ + 1), w_ + 1};
    }

    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;

    /// Largest |i - j| holding a nonzero entry (a structural scan).
    [[nodiscard]] std::size_t occupied_bandwidth() const;

    [[nodiscard]] DenseMatrix to_dense() const;

    /// Returns this + scale * other. Bandwidth is the larger of the two.
    [[nodiscard]] BandSymMatrix plus_scaled(const BandSymMatrix& other, double scale) const;

private:
    std::size_t dim_ = 0;
    std::size_t w_ = 0;
    std::vector<double> data_;
};

/// Cholesky factor L (lower, same bandwidth) of a banded SPD matrix.
/// Cost O(dim * w^2).
class BandCholesky {
public:
    BandCholesky() = default;
    explicit BandCholesky(const BandSymMatrix& a);

    [[nodiscard]] std::size_t dim() const noexcept { return l_.dim(); }
    [[nodiscard]] const BandSymMatrix& factor() const noexcept { return l_; }
    [[nodiscard]] double log_det() const noexcept { return log_det_; }

    /// Solves L z = b in place.
    void forward(std::span<double> b) const;
    /// Solves L' x = z in place.
    void backward(std::span<double> z) const;

    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

private:
    BandSymMatrix l_;  // lower() holds L(i, j)
    double log_det_ = 0.0;
};

/// [[band, border], [border', corner]] with a small dense border of width p.
struct BorderedBandMatrix {
    BandSymMatrix band;
    DenseMatrix border;  // dim x p
    DenseMatrix corner;  // p x p, lower triangle read

    [[nodiscard]] std::size_t band_dim() const noexcept { return band.dim(); }
    [[nodiscard]] std::size_t border_size() const noexcept { return corner.rows(); }
    [[nodiscard]] std::size_t size() const noexcept { return band_dim() + border_size(); }

    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
    [[nodiscard]] DenseMatrix to_dense() const;
};

/// Cholesky factor of a bordered band matrix:
///
///     [ Lb   0  ]   with  Lb Lb' = band,  W = Lb^{-1} border,
///     [ W'   Lc ]         Lc Lc' = corner - W'W.
///
/// Band fill stays inside the band, so the cost is O(dim w^2 + dim p^2).
class BorderedCholesky {
public:
    explicit BorderedCholesky(const BorderedBandMatrix& a);

    [[nodiscard]] std::size_t size() const noexcept { return band_.dim() + corner_.dim(); }
    [[nodiscard]] double log_det() const noexcept { return band_.log_det() + corner_.log_det(); }

    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

    /// Dense lower factor, mostly for tests.
    [[nodiscard]] DenseMatrix lower_dense() const;

private:
    BandCholesky band_;
    DenseMatrix w_;  // dim x p
    DenseCholesky corner_;
};

}  // namespace mmb
