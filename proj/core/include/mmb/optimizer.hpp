#pragma once

#include <functional>
#include <vector>

namespace mmb {

/// Inverse golden ratio, (sqrt(5) - 1) / 2.
inline constexpr double kInvGolden = 0.61803398874989484820;

struct OptResult {
    double lambda_max = 0.0;
    double loglik_max = 0.0;
    int evaluations = 0;
    int iterations = 0;
    bool converged = false;  // false when the maximum sits on the bracket edge
    double bracket_lo = 0.0; // final bracket, log10 lambda
    double bracket_hi = 0.0;
};

struct SearchOptions {
    double lo_log10 = -8.0;
    double hi_log10 = 8.0;
    double tol = 1e-4;
};

/// Golden-section maximization of eval(lambda) over t = log10(lambda) in
/// [lo, hi], shrinking the bracket by kInvGolden per iteration until its width
/// drops below tol. Throws NonFiniteLikelihood if any probe is not finite.
///
/// `on_iteration`, when set, receives the bracket (lo, hi) after every
/// iteration.
OptResult maximize(const std::function<double(double)>& eval, const SearchOptions& options,
                   const std::function<void(double, double)>& on_iteration = {});

}  // namespace mmb
