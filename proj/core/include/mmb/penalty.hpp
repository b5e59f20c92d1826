#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmb/banded.hpp"

namespace mmb {

/// (m-2) x m second-order difference operator: row k is (1, -2, 1) at
/// columns k, k+1, k+2.
class DiffOp {
public:
    explicit DiffOp(std::size_t m);

    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] std::size_t rows() const noexcept { return m_ - 2; }

    /// D a, length m-2
    [[nodiscard]] std::vector<double> apply(std::span<const double> a) const;
    /// D' u, length m
    [[nodiscard]] std::vector<double> apply_transpose(std::span<const double> u) const;

    [[nodiscard]] DenseMatrix to_dense() const;
    /// DD' (pentadiagonal, built from integers).
    [[nodiscard]] BandSymMatrix gram() const;
    /// D'D (pentadiagonal, m x m).
    [[nodiscard]] BandSymMatrix penalty() const;

private:
    std::size_t m_;
};

/// m x 2 fixed-effect design G = [1, (1..m)].
class FixedDesign {
public:
    static constexpr std::size_t p = 2;

    explicit FixedDesign(std::size_t m);

    [[nodiscard]] std::size_t m() const noexcept { return m_; }
    [[nodiscard]] double operator()(std::size_t row, std::size_t col) const {
        return col == 0 ? 1.0 : static_cast<double>(row + 1);
    }
    /// G b
    [[nodiscard]] std::vector<double> apply(std::span<const double> b) const;
    [[nodiscard]] DenseMatrix to_dense() const;

private:
    std::size_t m_;
};

DiffOp build_D(std::size_t m);
FixedDesign build_G(std::size_t m);

enum class PrecisionKind {
    identity,      // Q = I (Currie-Durban)
    squared_gram,  // Q = (DD')^2 (mixed model B-splines)
};

/// Random-effect precision, stored banded. For the squared-gram kind log|Q|
/// is 2 log|DD'| from the banded Cholesky factor of DD'.
struct Precision {
    PrecisionKind kind = PrecisionKind::identity;
    BandSymMatrix matrix;
    double log_det = 0.0;
};

Precision build_Q(std::size_t m, PrecisionKind kind);

}  // namespace mmb
