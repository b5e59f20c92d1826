#include "mmb/penalty.hpp"

#include <array>
#include <cstdint>
#include <string>

#include "mmb/errors.hpp"

namespace mmb {

namespace {

void require_size(std::size_t m) {
    if (m < 3) throw InvalidArgument("need m >= 3 coefficients, got " + std::to_string(m));
}

constexpr std::array<std::int64_t, 3> kStencil{1, -2, 1};

}  // namespace

DiffOp::DiffOp(std::size_t m) : m_(m) { require_size(m); }

std::vector<double> DiffOp::apply(std::span<const double> a) const {
    if (a.size() != m_) throw DimensionMismatch("D a: length mismatch");
    std::vector<double> out(rows());
    for (std::size_t k = 0; k < rows(); ++k) out[k] = a[k] - 2.0 * a[k + 1] + a[k + 2];
    return out;
}

std::vector<double> DiffOp::apply_transpose(std::span<const double> u) const {
    if (u.size() != rows()) throw DimensionMismatch("D' u: length mismatch");
    std::vector<double> out(m_, 0.0);
    for (std::size_t k = 0; k < rows(); ++k) {
        out[k] += u[k];
        out[k + 1] -= 2.0 * u[k];
        out[k + 2] += u[k];
    }
    return out;
}

DenseMatrix DiffOp::to_dense() const {
    DenseMatrix d(rows(), m_);
    for (std::size_t k = 0; k < rows(); ++k)
        for (std::size_t t = 0; t < 3; ++t) d(k, k + t) = static_cast<double>(kStencil[t]);
    return d;
}

BandSymMatrix DiffOp::gram() const {
    // (DD')_{k,k+s} = sum_t c_t c_{t-s}; every row of D has the full stencil.
    std::array<std::int64_t, 3> diag{};
    for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t t = s; t < 3; ++t) diag[s] += kStencil[t] * kStencil[t - s];
    BandSymMatrix g(rows(), 2);
    for (std::size_t i = 0; i < rows(); ++i)
        for (std::size_t s = 0; s <= 2 && s <= i; ++s)
            g.lower(i, i - s) = static_cast<double>(diag[s]);
    return g;
}

BandSymMatrix DiffOp::penalty() const {
    BandSymMatrix p(m_, 2);
    for (std::size_t k = 0; k < rows(); ++k) {
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b <= a; ++b)
                p.lower(k + a, k + b) += static_cast<double>(kStencil[a] * kStencil[b]);
    }
    return p;
}

FixedDesign::FixedDesign(std::size_t m) : m_(m) { require_size(m); }

std::vector<double> FixedDesign::apply(std::span<const double> b) const {
    if (b.size() != p) throw DimensionMismatch("G b: expected 2 fixed effects");
    std::vector<double> out(m_);
    for (std::size_t j = 0; j < m_; ++j) out[j] = b[0] + b[1] * static_cast<double>(j + 1);
    return out;
}

DenseMatrix FixedDesign::to_dense() const {
    DenseMatrix g(m_, p);
    for (std::size_t j = 0; j < m_; ++j) {
        g(j, 0) = 1.0;
        g(j, 1) = static_cast<double>(j + 1);
    }
    return g;
}

DiffOp build_D(std::size_t m) { return DiffOp(m); }
FixedDesign build_G(std::size_t m) { return FixedDesign(m); }

Precision build_Q(std::size_t m, PrecisionKind kind) {
    require_size(m);
    const std::size_t dim = m - 2;
    Precision q;
    q.kind = kind;
    if (kind == PrecisionKind::identity) {
        q.matrix = BandSymMatrix(dim, 0);
        for (std::size_t i = 0; i < dim; ++i) q.matrix.lower(i, i) = 1.0;
        q.log_det = 0.0;
        return q;
    }

    // Square the integer pentadiagonal DD' = tridiagonal stencil (1,-4,6,-4,1).
    std::vector<std::int64_t> k(dim * 5, 0);  // row i, offset -2..2
    auto kat = [&](std::size_t i, std::size_t j) -> std::int64_t {
        const auto d = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
        if (d < -2 || d > 2) return 0;
        return k[i * 5 + static_cast<std::size_t>(d + 2)];
    };
    const BandSymMatrix g = DiffOp(m).gram();
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = (i > 2 ? i - 2 : 0); j < dim && j <= i + 2; ++j)
            k[i * 5 + (j + 2 - i)] = static_cast<std::int64_t>(g(i, j));

    q.matrix = BandSymMatrix(dim, 4);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = (i > 4 ? i - 4 : 0); j <= i; ++j) {
            std::int64_t acc = 0;
            const std::size_t t0 = i > 2 ? i - 2 : 0;
            for (std::size_t t = t0; t < dim && t <= j + 2; ++t) acc += kat(i, t) * kat(t, j);
            q.matrix.lower(i, j) = static_cast<double>(acc);
        }
    }
    // Q = (DD')^2 squares the condition number of DD'; take log|Q| from the
    // factor of DD' instead.
    q.log_det = 2.0 * BandCholesky(g).log_det();
    return q;
}

}  // namespace mmb
