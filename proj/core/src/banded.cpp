#include "mmb/banded.hpp"

#include <algorithm>
#include <cmath>

#include "mmb/errors.hpp"

namespace mmb {

BandSymMatrix::BandSymMatrix(std::size_t dim, std::size_t bandwidth)
    : dim_(dim), w_(bandwidth), data_(dim * (bandwidth + 1), 0.0) {}

double BandSymMatrix::operator()(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    if (i - j > w_) return 0.0;
    return lower(i, j);
}

std::vector<double> BandSymMatrix::multiply(std::span<const double> x) const {
    if (x.size() != dim_) throw DimensionMismatch("band multiply: length mismatch");
    std::vector<double> out(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t j0 = i > w_ ? i - w_ : 0;
        for (std::size_t j = j0; j < i; ++j) {
            const double v = lower(i, j);
            out[i] += v * x[j];
            out[j] += v * x[i];
        }
        out[i] += lower(i, i) * x[i];
    }
    return out;
}

std::size_t BandSymMatrix::occupied_bandwidth() const {
    std::size_t widest = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t j0 = i > w_ ? i - w_ : 0;
        for (std::size_t j = j0; j < i; ++j) {
            if (lower(i, j) != 0.0) {
                widest = std::max(widest, i - j);
                break;
            }
        }
    }
    return widest;
}

DenseMatrix BandSymMatrix::to_dense() const {
    DenseMatrix d(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t j0 = i > w_ ? i - w_ : 0;
        for (std::size_t j = j0; j <= i; ++j) {
            d(i, j) = lower(i, j);
            d(j, i) = lower(i, j);
        }
    }
    return d;
}

BandSymMatrix BandSymMatrix::plus_scaled(const BandSymMatrix& other, double scale) const {
    if (other.dim_ != dim_) throw DimensionMismatch("band add: dimension mismatch");
    const std::size_t w = std::max(w_, other.w_);
    BandSymMatrix out(dim_, w);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = 0; k <= std::min(w_, i); ++k) out.lower(i, i - k) += lower(i, i - k);
        for (std::size_t k = 0; k <= std::min(other.w_, i); ++k)
            out.lower(i, i - k) += scale * other.lower(i, i - k);
    }
    return out;
}

BandCholesky::BandCholesky(const BandSymMatrix& a) : l_(a.dim(), a.bandwidth()) {
    const std::size_t n = a.dim();
    const std::size_t w = a.bandwidth();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k0 = i > w ? i - w : 0;
        for (std::size_t j = k0; j <= i; ++j) {
            double s = a.lower(i, j);
            for (std::size_t k = k0; k < j; ++k) s -= l_.lower(i, k) * l_.lower(j, k);
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) throw NotPositiveDefinite(i);
                l_.lower(i, i) = std::sqrt(s);
                log_det_ += 2.0 * std::log(l_.lower(i, i));
            } else {
                l_.lower(i, j) = s / l_.lower(j, j);
            }
        }
    }
}

void BandCholesky::forward(std::span<double> b) const {
    const std::size_t n = dim();
    const std::size_t w = l_.bandwidth();
    if (b.size() != n) throw DimensionMismatch("band solve: length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k0 = i > w ? i - w : 0;
        double s = b[i];
        for (std::size_t k = k0; k < i; ++k) s -= l_.lower(i, k) * b[k];
        b[i] = s / l_.lower(i, i);
    }
}

void BandCholesky::backward(std::span<double> z) const {
    const std::size_t n = dim();
    const std::size_t w = l_.bandwidth();
    if (z.size() != n) throw DimensionMismatch("band solve: length mismatch");
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t k1 = std::min(n - 1, i + w);
        double s = z[i];
        for (std::size_t k = i + 1; k <= k1; ++k) s -= l_.lower(k, i) * z[k];
        z[i] = s / l_.lower(i, i);
    }
}

std::vector<double> BandCholesky::solve(std::span<const double> rhs) const {
    std::vector<double> x(rhs.begin(), rhs.end());
    forward(x);
    backward(x);
    return x;
}

std::vector<double> BorderedBandMatrix::multiply(std::span<const double> x) const {
    const std::size_t n = band_dim();
    const std::size_t p = border_size();
    if (x.size() != n + p) throw DimensionMismatch("bordered multiply: length mismatch");
    std::vector<double> out = band.multiply(x.first(n));
    out.resize(n + p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < p; ++c) {
            out[i] += border(i, c) * x[n + c];
            out[n + c] += border(i, c) * x[i];
        }
    }
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c)
            out[n + r] += (r >= c ? corner(r, c) : corner(c, r)) * x[n + c];
    return out;
}

DenseMatrix BorderedBandMatrix::to_dense() const {
    const std::size_t n = band_dim();
    const std::size_t p = border_size();
    DenseMatrix d(n + p, n + p);
    const DenseMatrix b = band.to_dense();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d(i, j) = b(i, j);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < p; ++c) {
            d(i, n + c) = border(i, c);
            d(n + c, i) = border(i, c);
        }
    }
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c) d(n + r, n + c) = r >= c ? corner(r, c) : corner(c, r);
    return d;
}

namespace {

DenseMatrix border_solve(const BandCholesky& band, const DenseMatrix& border) {
    const std::size_t n = band.dim();
    const std::size_t p = border.cols();
    if (border.rows() != n) throw DimensionMismatch("border rows must equal band dimension");
    DenseMatrix w(n, p);
    std::vector<double> col(n);
    for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t i = 0; i < n; ++i) col[i] = border(i, c);
        band.forward(col);
        for (std::size_t i = 0; i < n; ++i) w(i, c) = col[i];
    }
    return w;
}

DenseMatrix schur_corner(const DenseMatrix& corner, const DenseMatrix& w) {
    const std::size_t p = corner.rows();
    if (corner.cols() != p || w.cols() != p) throw DimensionMismatch("corner must be p x p");
    DenseMatrix s(p, p);
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c <= r; ++c) {
            double acc = corner(r, c);
            for (std::size_t i = 0; i < w.rows(); ++i) acc -= w(i, r) * w(i, c);
            s(r, c) = acc;
            s(c, r) = acc;
        }
    }
    return s;
}

}  // namespace

BorderedCholesky::BorderedCholesky(const BorderedBandMatrix& a)
    : band_(a.band),
      w_(border_solve(band_, a.border)),
      corner_([&] {
          try {
              return DenseCholesky(schur_corner(a.corner, w_));
          } catch (const NotPositiveDefinite& e) {
              throw NotPositiveDefinite(a.band_dim() + e.pivot());
          }
      }()) {}

std::vector<double> BorderedCholesky::solve(std::span<const double> rhs) const {
    const std::size_t n = band_.dim();
    const std::size_t p = corner_.dim();
    if (rhs.size() != n + p) throw DimensionMismatch("bordered solve: length mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());
    std::span<double> top(x.data(), n);
    std::span<double> tail(x.data() + n, p);

    band_.forward(top);
    for (std::size_t c = 0; c < p; ++c) {
        double s = tail[c];
        for (std::size_t i = 0; i < n; ++i) s -= w_(i, c) * top[i];
        tail[c] = s;
    }
    const auto& lc = corner_.lower();
    for (std::size_t r = 0; r < p; ++r) {
        double s = tail[r];
        for (std::size_t k = 0; k < r; ++k) s -= lc(r, k) * tail[k];
        tail[r] = s / lc(r, r);
    }

    for (std::size_t r = p; r-- > 0;) {
        double s = tail[r];
        for (std::size_t k = r + 1; k < p; ++k) s -= lc(k, r) * tail[k];
        tail[r] = s / lc(r, r);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = top[i];
        for (std::size_t c = 0; c < p; ++c) s -= w_(i, c) * tail[c];
        top[i] = s;
    }
    band_.backward(top);
    return x;
}

DenseMatrix BorderedCholesky::lower_dense() const {
    const std::size_t n = band_.dim();
    const std::size_t p = corner_.dim();
    DenseMatrix l(n + p, n + p);
    const auto& lb = band_.factor();
    const std::size_t w = lb.bandwidth();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = i > w ? i - w : 0;
        for (std::size_t j = j0; j <= i; ++j) l(i, j) = lb.lower(i, j);
    }
    for (std::size_t c = 0; c < p; ++c)
        for (std::size_t i = 0; i < n; ++i) l(n + c, i) = w_(i, c);
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c <= r; ++c) l(n + r, n + c) = corner_.lower()(r, c);
    return l;
}

}  // namespace mmb
