#include "mmb/optimizer.hpp"

#include <cmath>
#include <string>

#include "mmb/errors.hpp"

namespace mmb {

OptResult maximize(const std::function<double(double)>& eval, const SearchOptions& options,
                   const std::function<void(double, double)>& on_iteration) {
    if (!(options.lo_log10 < options.hi_log10))
        throw InvalidArgument("search bracket must satisfy lo < hi");
    if (!(options.tol > 0.0)) throw InvalidArgument("tolerance must be positive");

    OptResult res;
    auto probe = [&](double t) {
        const double value = eval(std::pow(10.0, t));
        ++res.evaluations;
        if (!std::isfinite(value))
            throw NonFiniteLikelihood("non-finite log-likelihood at log10(lambda) = " +
                                      std::to_string(t));
        return value;
    };

    double a = options.lo_log10;
    double b = options.hi_log10;
    double c = b - kInvGolden * (b - a);
    double d = a + kInvGolden * (b - a);
    double fc = probe(c);
    double fd = probe(d);

    do {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvGolden * (b - a);
            fc = probe(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvGolden * (b - a);
            fd = probe(d);
        }
        ++res.iterations;
        if (on_iteration) on_iteration(a, b);
    } while (b - a >= options.tol);

    const double best_t = fc >= fd ? c : d;
    res.lambda_max = std::pow(10.0, best_t);
    res.loglik_max = fc >= fd ? fc : fd;
    res.bracket_lo = a;
    res.bracket_hi = b;
    res.converged = best_t - options.lo_log10 > options.tol &&
                    options.hi_log10 - best_t > options.tol;
    return res;
}

}  // namespace mmb
