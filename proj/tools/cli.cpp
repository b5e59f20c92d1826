#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <new>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

namespace mmb::cli {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t line) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || field.empty())
        throw ParseError("cannot parse '" + field + "' as a number", line);
    if (!std::isfinite(v)) throw ParseError("non-finite value '" + field + "'", line);
    return v;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Dataset read_dataset(std::istream& in, bool require_y) {
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    bool has_y = false;
    Dataset data;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (!have_header) {
            if (fields.size() >= 2 && fields[0] == "x" && fields[1] == "y") {
                has_y = true;
            } else if (fields.size() >= 1 && fields[0] == "x" && !require_y) {
                has_y = false;
            } else {
                throw ParseError(require_y ? "expected header \"x,y\"" : "expected header \"x\"",
                                 lineno);
            }
            have_header = true;
            continue;
        }
        const std::size_t want = has_y ? 2 : 1;
        if (fields.size() < want)
            throw ParseError("expected " + std::to_string(want) + " fields", lineno);
        data.x.push_back(parse_number(fields[0], lineno));
        if (has_y) data.y.push_back(parse_number(fields[1], lineno));
    }
    if (!have_header) throw ParseError("empty input", 0);
    return data;
}

Dataset read_dataset(const std::filesystem::path& path, bool require_y) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open '" + path.string() + "'");
    return read_dataset(in, require_y);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    out << "x,y\n";
    for (std::size_t i = 0; i < data.x.size(); ++i)
        out << format_double(data.x[i]) << ',' << format_double(data.y[i]) << '\n';
}

double SimRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SimRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double true_curve(double x) { return 3.0 + 0.1 * x + std::sin(2.0 * std::numbers::pi * x); }

Dataset simulate(const SimulateOptions& options) {
    if (options.n < 1) throw InvalidArgument("n must be >= 1");
    if (!(options.noise_sd >= 0.0)) throw InvalidArgument("noise sd must be >= 0");
    if (!(options.x_min < options.x_max)) throw InvalidArgument("x_min must be < x_max");
    SimRng rng(options.seed);
    Dataset data;
    data.x.resize(options.n);
    data.y.resize(options.n);
    const double width = options.x_max - options.x_min;
    for (auto& xi : data.x) xi = std::min(options.x_min + width * rng.uniform(), options.x_max);
    for (std::size_t i = 0; i < options.n; ++i)
        data.y[i] = true_curve(data.x[i]) + options.noise_sd * rng.normal();
    return data;
}

std::vector<double> grid(double x_min, double x_max, double step) {
    if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
    if (!(x_min <= x_max)) throw InvalidArgument("grid requires x_min <= x_max");
    const auto count = static_cast<std::size_t>(std::floor((x_max - x_min) / step + 1e-9)) + 1;
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) g[i] = std::min(x_min + step * static_cast<double>(i), x_max);
    return g;
}

nlohmann::json fit_summary(const FitResult& fit) {
    nlohmann::json j;
    j["schema_version"] = kSummarySchemaVersion;
    j["method"] = std::string(to_string(fit.kind));
    j["spec"] = {{"x_min", fit.spec.x_min}, {"x_max", fit.spec.x_max}, {"nseg", fit.spec.nseg},
                 {"degree", fit.spec.degree}, {"m", fit.spec.m()},     {"h", fit.spec.h()}};
    j["n"] = fit.n;
    j["lambda"] = fit.lambda;
    j["log10_lambda"] = std::log10(fit.lambda);
    j["lambda_fixed"] = fit.lambda_fixed;
    j["loglik"] = fit.loglik;
    j["sigma2"] = fit.sigma2_hat;
    j["evaluations"] = fit.evaluations;
    j["converged"] = fit.converged;
    j["degenerate"] = fit.degenerate;
    j["timing_seconds"] = fit.timing_seconds;
    j["assembly_seconds"] = fit.assembly_seconds;
    j["b_hat"] = fit.b_hat;
    j["a_hat"] = fit.a_hat;
    return j;
}

FitResult fit_from_summary(const nlohmann::json& summary) {
    try {
        if (summary.at("schema_version").get<int>() != kSummarySchemaVersion)
            throw ParseError("unsupported fit summary schema_version", 0);
        FitResult fit;
        const auto& s = summary.at("spec");
        fit.spec = build_spec(s.at("x_min").get<double>(), s.at("x_max").get<double>(),
                              s.at("nseg").get<int>(), s.at("degree").get<int>());
        fit.kind = parse_transform(summary.at("method").get<std::string>());
        fit.lambda = summary.at("lambda").get<double>();
        fit.a_hat = summary.at("a_hat").get<std::vector<double>>();
        fit.b_hat = summary.at("b_hat").get<std::vector<double>>();
        if (fit.a_hat.size() != static_cast<std::size_t>(fit.spec.m()) || fit.b_hat.size() != 2)
            throw ParseError("coefficient vectors do not match the basis", 0);
        return fit;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad fit summary: ") + e.what(), 0);
    }
}

void write_predictions(std::ostream& out, std::span<const double> x0,
                       std::span<const double> yhat, std::span<const double> ylin) {
    out << "x0,yhat,ylin\n";
    for (std::size_t i = 0; i < x0.size(); ++i)
        out << format_double(x0[i]) << ',' << format_double(yhat[i]) << ','
            << format_double(ylin[i]) << '\n';
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

void check_dense_memory(int m) {
    // Assembly holds two m x m dense matrices and each evaluation a third.
    constexpr double kLimitBytes = 4.0 * 1024 * 1024 * 1024;
    const double bytes = 3.0 * 8.0 * static_cast<double>(m) * static_cast<double>(m);
    if (bytes > kLimitBytes) {
        throw InvalidArgument("the cd method needs about " +
                              std::to_string(static_cast<long long>(bytes / (1 << 20))) +
                              " MiB of dense storage at m = " + std::to_string(m) +
                              "; use method mmb or a smaller m");
    }
}

std::pair<double, int> time_cell(const Dataset& data, const BasisSpec& spec, Transform method,
                                 int evaluations) {
    if (evaluations <= 0) {
        const FitResult f = fit(data.x, data.y, spec, method);
        return {f.timing_seconds, f.evaluations};
    }
    const ModelBlocks blocks = assemble(eval_basis(spec, data.x), data.y, spec, method);
    const SearchOptions range;
    const auto t0 = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (int k = 0; k < evaluations; ++k) {
        const double t = range.lo_log10 +
                         (range.hi_log10 - range.lo_log10) * (k + 0.5) / static_cast<double>(evaluations);
        sink += profile_loglik(blocks, std::pow(10.0, t)).loglik;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!std::isfinite(sink)) throw NonFiniteLikelihood("non-finite likelihood during bench");
    return {secs, evaluations};
}

std::vector<BenchRecord> run_bench(const BenchOptions& options, std::ostream* progress) {
    if (options.m_list.empty()) throw InvalidArgument("m list is empty");
    if (!std::is_sorted(options.m_list.begin(), options.m_list.end()))
        throw InvalidArgument("m list must be ascending");
    if (options.repeats < 1) throw InvalidArgument("repeats must be >= 1");
    if (!(options.n_per_segment > 0.0)) throw InvalidArgument("n per segment must be positive");

    std::vector<BenchRecord> records;
    for (Transform method : options.methods) {
        for (int m : options.m_list) {
            const int nseg = m - options.degree;
            if (nseg < 3) throw InvalidArgument("m = " + std::to_string(m) + " is too small");
            if (method == Transform::currie_durban) check_dense_memory(m);
            const BasisSpec spec = build_spec(0.0, options.h * nseg, nseg, options.degree);

            SimulateOptions sim;
            sim.n = static_cast<std::size_t>(std::llround(options.n_per_segment * nseg));
            sim.x_min = spec.x_min;
            sim.x_max = spec.x_max;
            sim.seed = options.seed + static_cast<std::uint64_t>(m);
            const Dataset data = simulate(sim);

            BenchRecord rec;
            rec.m = m;
            rec.method = method;
            rec.n = sim.n;
            rec.n_per_segment = options.n_per_segment;
            rec.reml_search = options.evaluations <= 0;
            for (int r = 0; r < options.repeats; ++r) {
                try {
                    const auto [secs, evals] = time_cell(data, spec, method, options.evaluations);
                    rec.samples.push_back(secs);
                    rec.evaluations = evals;
                } catch (const std::bad_alloc&) {
                    throw InvalidArgument("out of memory at m = " + std::to_string(m) + " for method " +
                                          std::string(to_string(method)) +
                                          "; the cd method stores dense m x m matrices");
                }
            }
            rec.seconds = median(rec.samples);
            if (progress) {
                *progress << to_string(method) << " m=" << m << " n=" << rec.n
                          << " seconds=" << rec.seconds << '\n';
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

void write_bench(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "m,method,seconds,n,evaluations,n_per_segment,search\n";
    for (const auto& r : records) {
        out << r.m << ',' << to_string(r.method) << ',' << format_double(r.seconds) << ',' << r.n
            << ',' << r.evaluations << ',' << format_double(r.n_per_segment) << ','
            << (r.reml_search ? "reml" : "fixed") << '\n';
    }
}

namespace {

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    auto out = open_output(path);
    fn(out);
    if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& f : split(text, ',')) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || ptr != f.data() + f.size() || f.empty())
            throw InvalidArgument("bad integer '" + f + "' in list");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Penalized B-spline smoothing with REML-selected penalty"};
    app.require_subcommand(1);

    // simulate
    SimulateOptions sim;
    std::string sim_out;
    auto* simulate_cmd = app.add_subcommand("simulate", "Write a simulated x,y dataset");
    simulate_cmd->add_option("--n", sim.n, "Number of observations")->capture_default_str();
    simulate_cmd->add_option("--xmin", sim.x_min, "Domain lower bound")->capture_default_str();
    simulate_cmd->add_option("--xmax", sim.x_max, "Domain upper bound")->capture_default_str();
    simulate_cmd->add_option("--noise", sim.noise_sd, "Noise standard deviation")->capture_default_str();
    simulate_cmd->add_option("--seed", sim.seed, "Generator seed")->capture_default_str();
    simulate_cmd->add_option("--out", sim_out, "Output CSV (default stdout)");

    // fit
    std::string fit_input;
    std::string fit_out;
    std::string pred_out;
    std::optional<double> fit_xmin;
    std::optional<double> fit_xmax;
    int nseg = 100;
    int degree = 2;
    std::string method = "mmb";
    std::optional<double> lambda;
    double grid_step = 0.01;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a dataset and write a JSON summary");
    fit_cmd->add_option("input", fit_input, "Input CSV with header x,y")->required();
    fit_cmd->add_option("--xmin", fit_xmin, "Domain lower bound (default: min x)");
    fit_cmd->add_option("--xmax", fit_xmax, "Domain upper bound (default: max x)");
    fit_cmd->add_option("--nseg", nseg, "Number of segments")->capture_default_str();
    fit_cmd->add_option("--degree", degree, "Spline degree (2 or 3)")->capture_default_str();
    fit_cmd->add_option("--method", method, "mmb or cd")->capture_default_str();
    fit_cmd->add_option("--lambda", lambda, "Fixed penalty (default: REML search)");
    fit_cmd->add_option("--grid-step", grid_step, "Prediction grid step")->capture_default_str();
    fit_cmd->add_option("--out", fit_out, "Summary JSON (default stdout)");
    fit_cmd->add_option("--pred-out", pred_out, "Prediction CSV on the grid");

    // predict
    std::string pred_fit;
    std::string pred_input;
    std::string pred_dest;
    double pred_step = 0.01;
    auto* predict_cmd = app.add_subcommand("predict", "Evaluate a saved fit on a grid or x values");
    predict_cmd->add_option("--fit", pred_fit, "Fit summary JSON")->required();
    predict_cmd->add_option("--input", pred_input, "CSV with an x column (default: grid)");
    predict_cmd->add_option("--grid-step", pred_step, "Grid step")->capture_default_str();
    predict_cmd->add_option("--out", pred_dest, "Output CSV (default stdout)");

    // bench
    std::string m_list = "1000,2000,4000,8000";
    std::string methods = "mmb,cd";
    BenchOptions bench;
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Time REML fits of both transforms against m");
    bench_cmd->add_option("--m-list", m_list, "Ascending comma-separated m values")->capture_default_str();
    bench_cmd->add_option("--method", methods, "Comma-separated methods")->capture_default_str();
    bench_cmd->add_option("--n-per-segment", bench.n_per_segment, "Observations per segment")
        ->capture_default_str();
    bench_cmd->add_option("--repeats", bench.repeats, "Timings per cell (median reported)")
        ->capture_default_str();
    bench_cmd->add_option("--evaluations", bench.evaluations,
                          "Fixed likelihood evaluations per cell (0: full REML search)")
        ->capture_default_str();
    bench_cmd->add_option("--degree", bench.degree, "Spline degree")->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "Generator seed")->capture_default_str();
    bench_cmd->add_option("--out", bench_out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*simulate_cmd) {
            const Dataset data = simulate(sim);
            with_output(sim_out, [&](std::ostream& os) { write_dataset(os, data); });
        } else if (*fit_cmd) {
            const Dataset data = read_dataset(std::filesystem::path(fit_input));
            if (data.x.size() < 3) throw InvalidArgument("need at least 3 observations");
            const auto [lo, hi] = std::minmax_element(data.x.begin(), data.x.end());
            const BasisSpec spec = build_spec(fit_xmin.value_or(*lo), fit_xmax.value_or(*hi), nseg, degree);
            const FitResult result = fit(data.x, data.y, spec, parse_transform(method), lambda);
            with_output(fit_out, [&](std::ostream& os) { os << fit_summary(result).dump(2) << '\n'; });
            if (!pred_out.empty()) {
                const auto x0 = grid(spec.x_min, spec.x_max, grid_step);
                const auto yhat = predict(result, x0, PredictMode::full);
                const auto ylin = predict(result, x0, PredictMode::linear);
                with_output(pred_out, [&](std::ostream& os) { write_predictions(os, x0, yhat, ylin); });
            }
        } else if (*predict_cmd) {
            std::ifstream in(pred_fit);
            if (!in) throw std::ios_base::failure("cannot open '" + pred_fit + "'");
            nlohmann::json summary;
            try {
                summary = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(std::string("bad fit summary: ") + e.what(), 0);
            }
            const FitResult result = fit_from_summary(summary);
            const std::vector<double> x0 =
                pred_input.empty() ? grid(result.spec.x_min, result.spec.x_max, pred_step)
                                   : read_dataset(std::filesystem::path(pred_input), false).x;
            const auto yhat = predict(result, x0, PredictMode::full);
            const auto ylin = predict(result, x0, PredictMode::linear);
            with_output(pred_dest, [&](std::ostream& os) { write_predictions(os, x0, yhat, ylin); });
        } else if (*bench_cmd) {
            bench.m_list = parse_int_list(m_list);
            bench.methods.clear();
            for (const auto& name : split(methods, ',')) bench.methods.push_back(parse_transform(name));
            const auto records = run_bench(bench, &std::cerr);
            with_output(bench_out, [&](std::ostream& os) { write_bench(os, records); });
        }
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace mmb::cli
