#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mmb/basis.hpp"
#include "mmb/optimizer.hpp"
#include "mmb/reml.hpp"

namespace mmb {

struct FitResult {
    BasisSpec spec;
    Transform kind = Transform::mmb;
    double lambda = 0.0;
    bool lambda_fixed = false;
    std::vector<double> a_hat;
    std::vector<double> b_hat;
    std::vector<double> u_hat;
    std::vector<double> fitted;  // B a_hat at the input x
    double sigma2_hat = 0.0;
    double loglik = 0.0;
    bool degenerate = false;
    int evaluations = 0;
    bool converged = true;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double timing_seconds = 0.0;    // lambda search (or the single evaluation)
    double assembly_seconds = 0.0;  // basis evaluation and block assembly
    std::size_t n = 0;
};

/// Fits a P-spline through its mixed model form. With `lambda` set the
/// likelihood is evaluated once at that value; otherwise lambda maximizes the
/// REML profile likelihood over `search`.
FitResult fit(std::span<const double> x, std::span<const double> y, const BasisSpec& spec,
              Transform kind, std::optional<double> lambda = std::nullopt,
              const SearchOptions& search = {});

enum class PredictMode {
    full,    // B(x0) a
    linear,  // B(x0) G b, the fixed-effect trend
};

std::vector<double> predict(const FitResult& fit, std::span<const double> x0,
                            PredictMode mode = PredictMode::full);

}  // namespace mmb
