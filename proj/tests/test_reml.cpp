#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mmb/errors.hpp"
#include "mmb/reml.hpp"
#include "oracles.hpp"

using namespace mmb;

namespace {

struct Instance {
    BasisSpec spec;
    std::vector<double> x;
    std::vector<double> y;
    SparseBasis basis;
};

Instance make_instance(std::size_t n, int nseg, int degree, std::uint64_t seed,
                       double noise = 0.3) {
    std::mt19937_64 rng(seed);
    Instance in;
    in.spec = build_spec(0.0, 5.0, nseg, degree);
    std::uniform_real_distribution<double> unif(0.0, 5.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = unif(rng);
        in.x.push_back(x);
        in.y.push_back(1.0 + 0.4 * x + std::sin(2.0 * x) + noise * gauss(rng));
    }
    in.basis = eval_basis(in.spec, in.x);
    return in;
}

Eigen::MatrixXd to_eigen(const DenseMatrix& d) {
    Eigen::MatrixXd e(d.rows(), d.cols());
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) e(i, j) = d(i, j);
    return e;
}

Eigen::MatrixXd ztz_dense(const ModelBlocks& b) {
    if (b.kind == Transform::mmb) return to_eigen(std::get<BandSymMatrix>(b.ztz).to_dense());
    return to_eigen(std::get<DenseMatrix>(b.ztz));
}

double max_rel(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

std::vector<double> fitted(const Instance& in, const std::vector<double>& a) {
    return in.basis.multiply(a);
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return worst / scale;
}

}  // namespace

TEST_CASE("mmb cross-product has bandwidth q + 2") {
    for (int q : {2, 3}) {
        const auto in = make_instance(300, 25, q, 1);
        const auto blocks = assemble(in.basis, in.y, in.spec, Transform::mmb);
        const auto& ztz = std::get<BandSymMatrix>(blocks.ztz);
        CHECK(ztz.occupied_bandwidth() <= static_cast<std::size_t>(q + 2));
        CHECK(mixed_model_matrix(blocks, 2.0).band.occupied_bandwidth() <= 4u + (q == 3));
    }
}

TEST_CASE("zero response gives zero right-hand sides") {
    auto in = make_instance(50, 8, 2, 2);
    std::fill(in.y.begin(), in.y.end(), 0.0);
    for (auto kind : {Transform::mmb, Transform::currie_durban}) {
        const auto b = assemble(in.basis, in.y, in.spec, kind);
        CHECK(b.yty == 0.0);
        for (double v : b.xty) CHECK(v == 0.0);
        for (double v : b.zty) CHECK(v == 0.0);

        const auto pt = profile_loglik(b, 1.0);
        CHECK(pt.degenerate);
        CHECK(pt.sigma2_hat == 0.0);
        for (double v : pt.b_hat) CHECK(v == 0.0);
        for (double v : pt.u_hat) CHECK(v == 0.0);
    }
}

TEST_CASE("assembled blocks match dense products") {
    const auto in = make_instance(50, 8, 2, 3);  // m = 10
    const Eigen::MatrixXd bd = oracle::dense_basis(in.spec, in.x);
    const Eigen::VectorXd y = oracle::to_eigen(in.y);
    for (bool mmb : {true, false}) {
        const auto kind = mmb ? Transform::mmb : Transform::currie_durban;
        const auto blocks = assemble(in.basis, in.y, in.spec, kind);
        const auto mdl = oracle::dense_model(bd, mmb);
        const double tol = mmb ? 1e-12 : 1e-10;
        CHECK(max_rel(to_eigen(blocks.xtx), mdl.X.transpose() * mdl.X) < tol);
        CHECK(max_rel(to_eigen(blocks.xtz), mdl.X.transpose() * mdl.Z) < tol);
        CHECK(max_rel(ztz_dense(blocks), mdl.Z.transpose() * mdl.Z) < tol);
        CHECK(max_rel(oracle::to_eigen(blocks.xty), mdl.X.transpose() * y) < tol);
        CHECK(max_rel(oracle::to_eigen(blocks.zty), mdl.Z.transpose() * y) < tol);
        CHECK(blocks.yty == doctest::Approx(y.squaredNorm()));
        CHECK(max_rel(to_eigen(blocks.q.matrix.to_dense()), mdl.Q) < 1e-12);
        CHECK(max_rel(to_eigen(blocks.btb.to_dense()), bd.transpose() * bd) < 1e-12);
        CHECK(max_rel(oracle::to_eigen(blocks.bty), bd.transpose() * y) < 1e-12);
    }
}

TEST_CASE("assemble rejects inconsistent input") {
    const auto in = make_instance(20, 5, 2, 4);
    std::vector<double> short_y(in.y.begin(), in.y.end() - 1);
    CHECK_THROWS_AS(assemble(in.basis, short_y, in.spec, Transform::mmb), DimensionMismatch);
    const auto other = build_spec(0, 5, 6, 2);
    CHECK_THROWS_AS(assemble(in.basis, in.y, other, Transform::mmb), DimensionMismatch);
    const auto tiny = make_instance(2, 5, 2, 4);
    CHECK_THROWS_AS(assemble(tiny.basis, tiny.y, tiny.spec, Transform::mmb), InvalidArgument);
    CHECK_THROWS_AS(profile_loglik(assemble(in.basis, in.y, in.spec, Transform::mmb), 0.0),
                    InvalidArgument);
}

TEST_CASE("profile point against the dense mixed model equations") {
    const auto in = make_instance(40, 6, 2, 5);  // m = 8
    const Eigen::MatrixXd bd = oracle::dense_basis(in.spec, in.x);
    const Eigen::VectorXd y = oracle::to_eigen(in.y);
    for (bool mmb : {true, false}) {
        const auto blocks = assemble(in.basis, in.y, in.spec, mmb ? Transform::mmb : Transform::currie_durban);
        const auto mdl = oracle::dense_model(bd, mmb);
        for (double lambda : {1e-3, 0.7, 1.0, 1e3}) {
            // textbook order (b, u)
            const int r = static_cast<int>(mdl.Z.cols());
            Eigen::MatrixXd c(r + 2, r + 2);
            c << mdl.X.transpose() * mdl.X, mdl.X.transpose() * mdl.Z,
                 mdl.Z.transpose() * mdl.X, mdl.Z.transpose() * mdl.Z + lambda * mdl.Q;
            Eigen::VectorXd rhs(r + 2);
            rhs << mdl.X.transpose() * y, mdl.Z.transpose() * y;
            const Eigen::VectorXd sol = c.ldlt().solve(rhs);

            const auto pt = profile_loglik(blocks, lambda);
            const double scale = std::max(1.0, sol.cwiseAbs().maxCoeff());
            for (int k = 0; k < 2; ++k) CHECK(std::abs(pt.b_hat[k] - sol(k)) < 1e-10 * scale);
            for (int k = 0; k < r; ++k) CHECK(std::abs(pt.u_hat[k] - sol(2 + k)) < 1e-10 * scale);
            CHECK(std::abs(pt.log_det_c - oracle::log_det_spd(c)) < 1e-8);
        }
    }
}

TEST_CASE("profile likelihood equals the marginal REML likelihood up to a constant") {
    const auto in = make_instance(60, 7, 2, 6);
    const Eigen::MatrixXd bd = oracle::dense_basis(in.spec, in.x);
    const Eigen::VectorXd y = oracle::to_eigen(in.y);
    for (bool mmb : {true, false}) {
        const auto blocks = assemble(in.basis, in.y, in.spec, mmb ? Transform::mmb : Transform::currie_durban);
        const auto mdl = oracle::dense_model(bd, mmb);
        std::vector<double> offsets;
        for (double lambda : {0.01, 1.0, 100.0})
            offsets.push_back(profile_loglik(blocks, lambda).loglik -
                              oracle::reml_marginal(mdl, y, lambda));
        CHECK(std::abs(offsets[1] - offsets[0]) < 1e-8);
        CHECK(std::abs(offsets[2] - offsets[0]) < 1e-8);
    }
}

TEST_CASE("likelihood shape is the same for both transforms") {
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        const auto in = make_instance(120, 20, 2, seed);
        const auto bm = assemble(in.basis, in.y, in.spec, Transform::mmb);
        const auto bc = assemble(in.basis, in.y, in.spec, Transform::currie_durban);
        const double d01 = profile_loglik(bm, 0.1).loglik - profile_loglik(bc, 0.1).loglik;
        const double d10 = profile_loglik(bm, 10.0).loglik - profile_loglik(bc, 10.0).loglik;
        CHECK(std::abs(d01 - d10) < 1e-6);
    }
}

// (DD')^2 has condition number ~ m^8; the residual sum of squares must not
// inherit it through the solve error in u.
TEST_CASE("transforms agree across the whole search range at m = 40") {
    const auto in = make_instance(300, 38, 2, 77);
    const auto bm = assemble(in.basis, in.y, in.spec, Transform::mmb);
    const auto bc = assemble(in.basis, in.y, in.spec, Transform::currie_durban);
    std::vector<double> gaps;
    for (double lambda : {1e-8, 1e-4, 1e-2, 1.0, 1e2, 1e4, 1e8})
        gaps.push_back(profile_loglik(bm, lambda).loglik - profile_loglik(bc, lambda).loglik);
    for (double g : gaps) CHECK(std::abs(g - gaps.front()) < 1e-6);
}

TEST_CASE("coefficient reconstruction") {
    ProfilePoint pt;
    pt.kind = Transform::mmb;
    pt.b_hat = {2.5, 0.0};
    pt.u_hat.assign(4, 0.0);
    for (double a : coefficients(pt, Transform::mmb)) CHECK(a == 2.5);

    pt.b_hat = {0.0, 0.0};
    pt.u_hat = {1.0, 0.0, 0.0};
    const auto a = coefficients(pt, Transform::mmb);
    const std::vector<double> want{1, -2, 1, 0, 0};
    CHECK(a == want);

    CHECK_THROWS_AS(coefficients(pt, Transform::currie_durban), InvalidArgument);
}

TEST_CASE("both transforms reproduce the direct P-spline solution") {
    const auto in = make_instance(200, 10, 2, 10);  // m = 12
    const auto d = build_D(in.spec.m());
    for (double lambda : {1e-2, 1.0, 1e2}) {
        const auto direct = direct_pspline_solve(in.basis, in.y, d, lambda);
        const auto am = coefficients(profile_loglik(assemble(in.basis, in.y, in.spec, Transform::mmb), lambda),
                                     Transform::mmb);
        const auto ac = coefficients(
            profile_loglik(assemble(in.basis, in.y, in.spec, Transform::currie_durban), lambda),
            Transform::currie_durban);
        CHECK(max_rel_diff(am, ac) < 1e-8);
        CHECK(max_rel_diff(fitted(in, am), fitted(in, direct)) < 1e-8);
        CHECK(max_rel_diff(fitted(in, ac), fitted(in, direct)) < 1e-8);
    }
}

TEST_CASE("direct solve against the dense normal equations") {
    const auto in = make_instance(90, 9, 3, 11);
    const Eigen::MatrixXd bd = oracle::dense_basis(in.spec, in.x);
    const Eigen::MatrixXd dd = oracle::diff_matrix(in.spec.m());
    const double lambda = 3.0;
    const Eigen::VectorXd want =
        (bd.transpose() * bd + lambda * dd.transpose() * dd).ldlt().solve(bd.transpose() * oracle::to_eigen(in.y));
    const auto got = direct_pspline_solve(in.basis, in.y, build_D(in.spec.m()), lambda);
    for (int j = 0; j < in.spec.m(); ++j) CHECK(std::abs(got[j] - want(j)) < 1e-10);
}

TEST_CASE("direct solve: constant and linear data lie in the null space") {
    auto in = make_instance(80, 12, 2, 12);
    const auto d = build_D(in.spec.m());
    std::fill(in.y.begin(), in.y.end(), 4.2);
    for (double lambda : {1e-3, 1.0, 1e4}) {
        for (double a : direct_pspline_solve(in.basis, in.y, d, lambda)) CHECK(a == doctest::Approx(4.2).epsilon(1e-10));
    }
    for (std::size_t i = 0; i < in.x.size(); ++i) in.y[i] = -1.0 + 0.75 * in.x[i];
    for (double lambda : {1e-3, 1.0, 1e4}) {
        const auto f = fitted(in, direct_pspline_solve(in.basis, in.y, d, lambda));
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i] - in.y[i]) < 1e-10);
    }
}

TEST_CASE("sigma^2 shrinks as lambda shrinks") {
    const auto in = make_instance(150, 15, 2, 13);
    const auto blocks = assemble(in.basis, in.y, in.spec, Transform::mmb);
    double prev = std::numeric_limits<double>::infinity();
    for (double t = 4.0; t >= -4.0; t -= 0.5) {
        const auto pt = profile_loglik(blocks, std::pow(10.0, t));
        CHECK(pt.sigma2_hat >= 0.0);
        CHECK(pt.sigma2_hat <= prev * (1 + 1e-12));
        prev = pt.sigma2_hat;
    }
}

TEST_CASE("linear data: random effects vanish under a huge penalty") {
    auto in = make_instance(100, 10, 2, 14);
    for (std::size_t i = 0; i < in.x.size(); ++i) in.y[i] = 2.0 + 3.0 * in.x[i];
    for (auto kind : {Transform::mmb, Transform::currie_durban}) {
        const auto blocks = assemble(in.basis, in.y, in.spec, kind);
        const auto pt = profile_loglik(blocks, 1e8);
        for (double u : pt.u_hat) CHECK(std::abs(u) < 1e-8);
        const auto f = fitted(in, coefficients(pt, kind));
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i] - in.y[i]) < 1e-8);
    }
}

TEST_CASE("determinant identity across lambda") {
    const auto in = make_instance(70, 12, 2, 15);
    const auto blocks = assemble(in.basis, in.y, in.spec, Transform::mmb);
    for (double lambda : {1e-3, 1.0, 1e3}) {
        const auto dense = to_eigen(mixed_model_matrix_dense(blocks, lambda));
        CHECK(std::abs(profile_loglik(blocks, lambda).log_det_c - oracle::log_det_spd(dense)) < 1e-8);
    }
}

TEST_CASE("transform names") {
    CHECK(parse_transform("mmb") == Transform::mmb);
    CHECK(parse_transform("cd") == Transform::currie_durban);
    CHECK(parse_transform("currie_durban") == Transform::currie_durban);
    CHECK(to_string(Transform::currie_durban) == "cd");
    CHECK_THROWS_AS(parse_transform("sparse"), InvalidArgument);
}
