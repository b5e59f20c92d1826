#include "mmb/smoother.hpp"

#include <chrono>

#include "mmb/errors.hpp"
#include "mmb/penalty.hpp"

namespace mmb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

FitResult fit(std::span<const double> x, std::span<const double> y, const BasisSpec& spec,
              Transform kind, std::optional<double> lambda, const SearchOptions& search) {
    if (x.size() != y.size()) throw DimensionMismatch("x and y differ in length");
    if (x.size() < 3) throw InvalidArgument("need at least 3 observations");

    const auto t0 = Clock::now();
    const SparseBasis basis = eval_basis(spec, x);
    const ModelBlocks blocks = assemble(basis, y, spec, kind);

    FitResult res;
    res.spec = spec;
    res.kind = kind;
    res.n = x.size();
    res.assembly_seconds = seconds_since(t0);

    const auto t1 = Clock::now();
    ProfilePoint best;
    if (lambda) {
        best = profile_loglik(blocks, *lambda);
        res.lambda_fixed = true;
        res.evaluations = 1;
        res.converged = true;
    } else {
        bool have_best = false;
        const OptResult opt = maximize(
            [&](double lam) {
                ProfilePoint pt = profile_loglik(blocks, lam);
                const double value = pt.loglik;
                if (!have_best || value > best.loglik) {
                    best = std::move(pt);
                    have_best = true;
                }
                return value;
            },
            search);
        res.evaluations = opt.evaluations;
        res.converged = opt.converged;
        res.bracket_lo = opt.bracket_lo;
        res.bracket_hi = opt.bracket_hi;
    }
    res.timing_seconds = seconds_since(t1);

    res.lambda = best.lambda;
    res.loglik = best.loglik;
    res.sigma2_hat = best.sigma2_hat;
    res.degenerate = best.degenerate;
    res.b_hat = best.b_hat;
    res.u_hat = best.u_hat;
    res.a_hat = coefficients(best, kind);
    res.fitted = basis.multiply(res.a_hat);
    return res;
}

std::vector<double> predict(const FitResult& fit, std::span<const double> x0, PredictMode mode) {
    const SparseBasis basis = eval_basis(fit.spec, x0);
    if (mode == PredictMode::full) return basis.multiply(fit.a_hat);
    return basis.multiply(FixedDesign(fit.a_hat.size()).apply(fit.b_hat));
}

}  // namespace mmb
