#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmb/errors.hpp"
#include "mmb/smoother.hpp"

namespace mmb::cli {

/// Malformed CSV or JSON input; line is 1-based (0 when not applicable).
class ParseError : public InvalidArgument {
public:
    ParseError(const std::string& what, std::size_t line)
        : InvalidArgument(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Dataset {
    std::vector<double> x;
    std::vector<double> y;
};

/// CSV with header "x,y". A file holding only an "x" column is accepted when
/// `require_y` is false (prediction grids).
Dataset read_dataset(std::istream& in, bool require_y = true);
Dataset read_dataset(const std::filesystem::path& path, bool require_y = true);
void write_dataset(std::ostream& out, const Dataset& data);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// mt19937_64 with uniforms from the top 53 bits and Box-Muller normals, so
/// streams are identical on every platform.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}
    double uniform();  // [0, 1)
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// 3 + 0.1 x + sin(2 pi x)
double true_curve(double x);

struct SimulateOptions {
    std::size_t n = 1000;
    double x_min = 0.0;
    double x_max = 10.0;
    double noise_sd = 0.5;
    std::uint64_t seed = 949030;
};

Dataset simulate(const SimulateOptions& options);

/// x_min, x_min + step, ... up to x_max (inclusive, up to rounding).
std::vector<double> grid(double x_min, double x_max, double step);

inline constexpr int kSummarySchemaVersion = 1;

nlohmann::json fit_summary(const FitResult& fit);
/// Rebuilds the parts of a FitResult that predict() needs.
FitResult fit_from_summary(const nlohmann::json& summary);

void write_predictions(std::ostream& out, std::span<const double> x0,
                       std::span<const double> yhat, std::span<const double> ylin);

struct BenchOptions {
    std::vector<int> m_list;
    std::vector<Transform> methods{Transform::mmb, Transform::currie_durban};
    double n_per_segment = 10.0;
    int repeats = 1;
    int evaluations = 0;  // 0: full REML search, otherwise a fixed lambda grid
    int degree = 2;
    double h = 0.1;
    std::uint64_t seed = 949030;
};

struct BenchRecord {
    int m = 0;
    Transform method = Transform::mmb;
    double seconds = 0.0;  // median over repeats
    std::size_t n = 0;
    int evaluations = 0;
    double n_per_segment = 0.0;
    bool reml_search = true;
    std::vector<double> samples;
};

/// Dense storage guard for the Currie-Durban path; throws InvalidArgument
/// with guidance when m is too large to hold several m x m matrices.
void check_dense_memory(int m);

/// Times one (m, method) cell once; returns seconds and evaluation count.
std::pair<double, int> time_cell(const Dataset& data, const BasisSpec& spec, Transform method,
                                 int evaluations);

std::vector<BenchRecord> run_bench(const BenchOptions& options, std::ostream* progress = nullptr);
void write_bench(std::ostream& out, const std::vector<BenchRecord>& records);

double median(std::vector<double> values);

/// Entry point for the mmbspline executable; returns the process exit code.
int run(int argc, char** argv);

}  // namespace mmb::cli
