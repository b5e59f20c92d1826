#include "mmb/reml.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mmb/errors.hpp"

namespace mmb {

std::string_view to_string(Transform kind) {
    return kind == Transform::mmb ? "mmb" : "cd";
}

Transform parse_transform(std::string_view name) {
    if (name == "mmb") return Transform::mmb;
    if (name == "cd" || name == "currie_durban") return Transform::currie_durban;
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected mmb or cd)");
}

namespace {

constexpr std::array<double, 3> kStencil{1.0, -2.0, 1.0};

ModelBlocks assemble_mmb(const SparseBasis& basis, std::span<const double> y,
                         const BasisSpec& spec) {
    const std::size_t n = basis.rows();
    const std::size_t m = basis.cols();
    const std::size_t r = m - 2;
    const int q = spec.degree;
    const std::size_t zw = static_cast<std::size_t>(q) + 2;

    ModelBlocks blocks;
    blocks.kind = Transform::mmb;
    blocks.n = n;
    blocks.m = m;
    blocks.xtx = DenseMatrix(2, 2);
    blocks.xtz = DenseMatrix(2, r);
    blocks.xty.assign(2, 0.0);
    blocks.zty.assign(r, 0.0);
    blocks.btb = BandSymMatrix(m, static_cast<std::size_t>(q));
    blocks.bty.assign(m, 0.0);
    BandSymMatrix ztz(r, zw);

    // Row i of Z = B D' is D b_i; nonzero only for k in [first-2, first+q].
    std::vector<double> zloc(zw + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = basis.values(i);
        const auto f = static_cast<std::ptrdiff_t>(basis.first(i));
        const double yi = y[i];

        double x0 = 0.0;
        double x1 = 0.0;
        const auto fu = static_cast<std::size_t>(f);
        for (std::size_t t = 0; t < v.size(); ++t) {
            for (std::size_t t2 = 0; t2 <= t; ++t2) blocks.btb.lower(fu + t, fu + t2) += v[t] * v[t2];
            blocks.bty[fu + t] += v[t] * yi;
            x0 += v[t];
            x1 += v[t] * static_cast<double>(f + static_cast<std::ptrdiff_t>(t) + 1);
        }

        const std::ptrdiff_t k0 = f - 2;
        for (std::size_t l = 0; l <= zw; ++l) {
            const std::ptrdiff_t k = k0 + static_cast<std::ptrdiff_t>(l);
            double acc = 0.0;
            for (std::size_t t = 0; t < 3; ++t) {
                const std::ptrdiff_t j = k + static_cast<std::ptrdiff_t>(t) - f;
                if (j >= 0 && j < static_cast<std::ptrdiff_t>(v.size()))
                    acc += kStencil[t] * v[static_cast<std::size_t>(j)];
            }
            zloc[l] = acc;
        }

        for (std::size_t l = 0; l <= zw; ++l) {
            const std::ptrdiff_t k = k0 + static_cast<std::ptrdiff_t>(l);
            if (k < 0 || k >= static_cast<std::ptrdiff_t>(r) || zloc[l] == 0.0) continue;
            const auto ku = static_cast<std::size_t>(k);
            for (std::size_t l2 = 0; l2 <= l; ++l2) {
                const std::ptrdiff_t k2 = k0 + static_cast<std::ptrdiff_t>(l2);
                if (k2 < 0) continue;
                ztz.lower(ku, static_cast<std::size_t>(k2)) += zloc[l] * zloc[l2];
            }
            blocks.xtz(0, ku) += x0 * zloc[l];
            blocks.xtz(1, ku) += x1 * zloc[l];
            blocks.zty[ku] += zloc[l] * yi;
        }

        blocks.xtx(0, 0) += x0 * x0;
        blocks.xtx(1, 0) += x1 * x0;
        blocks.xtx(1, 1) += x1 * x1;
        blocks.xty[0] += x0 * yi;
        blocks.xty[1] += x1 * yi;
        blocks.yty += yi * yi;
    }
    blocks.xtx(0, 1) = blocks.xtx(1, 0);
    blocks.ztz = std::move(ztz);
    blocks.q = build_Q(m, PrecisionKind::squared_gram);
    return blocks;
}

// Z_cd = Z_mmb (DD')^{-1}; every block picks up one factor of (DD')^{-1} per Z.
ModelBlocks to_currie_durban(ModelBlocks mmb) {
    const std::size_t r = mmb.random_effects();
    const BandCholesky gram(DiffOp(mmb.m).gram());

    const auto& band = std::get<BandSymMatrix>(mmb.ztz);
    DenseMatrix half(r, r);  // rows of Z_mmb'Z_mmb (DD')^{-1}
    std::vector<double> col(r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) col[j] = band(i, j);
        gram.forward(col);
        gram.backward(col);
        std::copy(col.begin(), col.end(), half.row(i).begin());
    }
    DenseMatrix ztz(r, r);
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < r; ++i) col[i] = half(i, j);
        gram.forward(col);
        gram.backward(col);
        for (std::size_t i = 0; i < r; ++i) ztz(i, j) = col[i];
    }
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double s = 0.5 * (ztz(i, j) + ztz(j, i));
            ztz(i, j) = s;
            ztz(j, i) = s;
        }

    for (std::size_t c = 0; c < 2; ++c) {
        auto row = mmb.xtz.row(c);
        std::vector<double> v(row.begin(), row.end());
        v = gram.solve(v);
        std::copy(v.begin(), v.end(), row.begin());
    }
    mmb.zty = gram.solve(mmb.zty);
    mmb.ztz = std::move(ztz);
    mmb.q = build_Q(mmb.m, PrecisionKind::identity);
    mmb.kind = Transform::currie_durban;
    return mmb;
}

}  // namespace

ModelBlocks assemble(const SparseBasis& basis, std::span<const double> y,
                     const BasisSpec& spec, Transform kind) {
    if (basis.rows() != y.size())
        throw DimensionMismatch("basis has " + std::to_string(basis.rows()) + " rows but y has " +
                                std::to_string(y.size()) + " values");
    if (basis.cols() != static_cast<std::size_t>(spec.m()) || basis.degree() != spec.degree)
        throw DimensionMismatch("basis does not match spec");
    if (basis.cols() < 3) throw InvalidArgument("need m >= 3 coefficients");
    if (y.size() <= 2) throw InvalidArgument("need n > p = 2 observations");

    ModelBlocks blocks = assemble_mmb(basis, y, spec);
    if (kind == Transform::currie_durban) return to_currie_durban(std::move(blocks));
    return blocks;
}

BorderedBandMatrix mixed_model_matrix(const ModelBlocks& blocks, double lambda) {
    if (blocks.kind != Transform::mmb)
        throw InvalidArgument("banded mixed model matrix requires the mmb transform");
    const auto& ztz = std::get<BandSymMatrix>(blocks.ztz);
    BorderedBandMatrix c;
    c.band = ztz.plus_scaled(blocks.q.matrix, lambda);
    c.border = blocks.xtz.transpose();
    c.corner = blocks.xtx;
    return c;
}

DenseMatrix mixed_model_matrix_dense(const ModelBlocks& blocks, double lambda) {
    if (blocks.kind == Transform::mmb) return mixed_model_matrix(blocks, lambda).to_dense();

    const std::size_t r = blocks.random_effects();
    const std::size_t p = blocks.p;
    const auto& ztz = std::get<DenseMatrix>(blocks.ztz);
    DenseMatrix c(r + p, r + p);
    for (std::size_t i = 0; i < r; ++i) {
        std::copy(ztz.row(i).begin(), ztz.row(i).end(), c.row(i).begin());
        c(i, i) += lambda * blocks.q.matrix.lower(i, i);
        for (std::size_t k = 0; k < p; ++k) {
            c(i, r + k) = blocks.xtz(k, i);
            c(r + k, i) = blocks.xtz(k, i);
        }
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) c(r + a, r + b) = blocks.xtx(a, b);
    return c;
}

ProfilePoint profile_loglik(const ModelBlocks& blocks, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("lambda must be positive and finite");

    const std::size_t r = blocks.random_effects();
    const std::size_t p = blocks.p;
    std::vector<double> rhs(blocks.zty);
    rhs.insert(rhs.end(), blocks.xty.begin(), blocks.xty.end());

    ProfilePoint pt;
    pt.kind = blocks.kind;
    pt.lambda = lambda;
    std::vector<double> theta;
    if (blocks.kind == Transform::mmb) {
        const BorderedCholesky factor(mixed_model_matrix(blocks, lambda));
        theta = factor.solve(rhs);
        pt.log_det_c = factor.log_det();
    } else {
        const DenseCholesky factor(mixed_model_matrix_dense(blocks, lambda));
        theta = factor.solve(rhs);
        pt.log_det_c = factor.log_det();
    }
    pt.u_hat.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(r));
    pt.b_hat.assign(theta.begin() + static_cast<std::ptrdiff_t>(r), theta.end());

    // Penalized RSS |y - B a|^2 + lambda |D a|^2 (note D a = DD'u for mmb and
    // u for cd). Algebraically this is y'y - b'X'y - u'Z'y, but that form is
    // first order in the solve error, which is large along the ill-conditioned
    // directions of C; this one is stationary at the solution.
    const auto a = coefficients(pt, blocks.kind);
    const auto ba = blocks.btb.multiply(a);
    double rss = blocks.yty;
    for (std::size_t j = 0; j < a.size(); ++j) rss += a[j] * (ba[j] - 2.0 * blocks.bty[j]);
    for (double v : DiffOp(blocks.m).apply(a)) rss += lambda * v * v;

    const double slack = kDegenerateSlack * blocks.yty;
    const auto dof = static_cast<double>(blocks.n - p);
    if (rss < -slack) {
        throw DegenerateFit("residual variance is negative (" + std::to_string(rss / dof) +
                            "); data are degenerate");
    }
    double sigma2_for_lik = rss / dof;
    if (rss <= slack) {
        pt.degenerate = true;
        sigma2_for_lik = std::max(slack, std::numeric_limits<double>::min()) / dof;
    }
    pt.sigma2_hat = std::max(rss, 0.0) / dof;

    const auto free_coef = static_cast<double>(blocks.m - p);
    const double constant = dof - blocks.q.log_det;
    pt.loglik = -0.5 * (pt.log_det_c - free_coef * std::log(lambda) +
                        dof * std::log(sigma2_for_lik) + constant);
    return pt;
}

std::vector<double> coefficients(const ProfilePoint& point, Transform kind) {
    if (point.kind != kind) throw InvalidArgument("profile point was computed for another transform");
    if (point.b_hat.size() != 2) throw DimensionMismatch("expected two fixed effects");
    const std::size_t m = point.u_hat.size() + 2;
    const DiffOp d(m);
    std::vector<double> u = point.u_hat;
    if (kind == Transform::currie_durban) u = BandCholesky(d.gram()).solve(u);
    std::vector<double> a = d.apply_transpose(u);
    const std::vector<double> trend = FixedDesign(m).apply(point.b_hat);
    for (std::size_t j = 0; j < m; ++j) a[j] += trend[j];
    return a;
}

std::vector<double> direct_pspline_solve(const SparseBasis& basis,
                                         std::span<const double> y,
                                         const DiffOp& d, double lambda) {
    if (basis.rows() != y.size()) throw DimensionMismatch("basis rows must equal length of y");
    if (basis.cols() != d.m()) throw DimensionMismatch("difference operator size mismatch");
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");

    BandSymMatrix btb(basis.cols(), static_cast<std::size_t>(basis.degree()));
    for (std::size_t i = 0; i < basis.rows(); ++i) {
        const auto v = basis.values(i);
        const std::size_t f = basis.first(i);
        for (std::size_t a = 0; a < v.size(); ++a)
            for (std::size_t b = 0; b <= a; ++b) btb.lower(f + a, f + b) += v[a] * v[b];
    }
    const BandCholesky factor(btb.plus_scaled(d.penalty(), lambda));
    return factor.solve(basis.transpose_multiply(y));
}

}  // namespace mmb
