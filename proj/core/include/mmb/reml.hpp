#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mmb/banded.hpp"
#include "mmb/basis.hpp"
#include "mmb/dense.hpp"
#include "mmb/penalty.hpp"

namespace mmb {

/// Reparameterization of the spline coefficients a into fixed effects b and
/// random effects u.
enum class Transform {
    mmb,            // a = G b + D' u,            Q = (DD')^2, banded
    currie_durban,  // a = G b + D'(DD')^{-1} u,  Q = I, dense
};

std::string_view to_string(Transform kind);
/// Accepts "mmb", "cd" and "currie_durban".
Transform parse_transform(std::string_view name);

/// Lambda-independent inner products of the mixed model equations.
struct ModelBlocks {
    Transform kind = Transform::mmb;
    std::size_t n = 0;  // observations
    std::size_t m = 0;  // spline coefficients
    std::size_t p = 2;  // fixed effects

    DenseMatrix xtx;                                // p x p
    DenseMatrix xtz;                                // p x (m-2)
    std::variant<BandSymMatrix, DenseMatrix> ztz;   // band for mmb, dense for cd
    Precision q;
    std::vector<double> xty;
    std::vector<double> zty;
    double yty = 0.0;

    // Basis cross products, used to evaluate the penalized residual sum of
    // squares on the spline coefficients a, which stay O(|y|) where u does not.
    BandSymMatrix btb;  // m x m, bandwidth q
    std::vector<double> bty;

    [[nodiscard]] std::size_t random_effects() const noexcept { return m - 2; }
};

ModelBlocks assemble(const SparseBasis& basis, std::span<const double> y,
                     const BasisSpec& spec, Transform kind);

/// C_lambda with unknowns ordered (u, b): Z'Z + lambda Q is the band and X'Z
/// the border. Only valid for Transform::mmb.
BorderedBandMatrix mixed_model_matrix(const ModelBlocks& blocks, double lambda);

/// Dense C_lambda in (u, b) order, for either transform.
DenseMatrix mixed_model_matrix_dense(const ModelBlocks& blocks, double lambda);

/// One evaluation of the REML profile log-likelihood.
struct ProfilePoint {
    Transform kind = Transform::mmb;
    double lambda = 0.0;
    double loglik = 0.0;
    double sigma2_hat = 0.0;
    double log_det_c = 0.0;   // log|C_lambda| = 2 log|U_lambda|
    bool degenerate = false;  // residual sum of squares at rounding level
    std::vector<double> b_hat;
    std::vector<double> u_hat;
};

/// Relative slack on y'y below which the penalized residual sum of squares is
/// treated as rounding noise.
inline constexpr double kDegenerateSlack = 1e-12;

ProfilePoint profile_loglik(const ModelBlocks& blocks, double lambda);

/// Spline coefficients a = G b + D' u (mmb) or G b + D'(DD')^{-1} u (cd).
std::vector<double> coefficients(const ProfilePoint& point, Transform kind);

/// Minimizer of |y - B a|^2 + lambda |D a|^2 via the banded normal equations
/// (B'B + lambda D'D) a = B'y.
std::vector<double> direct_pspline_solve(const SparseBasis& basis,
                                         std::span<const double> y,
                                         const DiffOp& d, double lambda);

}  // namespace mmb
