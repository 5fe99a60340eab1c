#pragma once

#include "cdpep/pep_core.hpp"
#include "cdpep/rcd_pep.hpp"
#include "cdpep/sdp.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace cdpep::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kSolver = 2,
    kValidation = 3,
};

/// Bad flags or parameters; reported with exit code 1.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Range {
    int first = 1;
    int last = 1;
};

/// "7" or "1..30"
Range parse_range(const std::string& text);
/// "1,0.5,2"
std::vector<double> parse_list(const std::string& text);

enum class SweepMethod { rcd, rcd_quad, ccd, ccd_ex, ccd_quad, gs };

SweepMethod parse_method(const std::string& name);
std::string_view to_string(SweepMethod m);

struct SweepSpec {
    SweepMethod method = SweepMethod::rcd;
    Range range;  // N for rcd methods, cycles otherwise
    int n = 0;
    std::optional<double> L;
    double mu = 0.0;
    std::vector<double> ell;
    std::optional<double> ell_max;
    std::optional<double> step;
    std::vector<double> steps;
    double delta = 1.0;
    rcd::InitialKind initial = rcd::InitialKind::distance;
    std::optional<double> lambda_max;
    sdp::SolverConfig solver;
    int jobs = 1;
    bool timing = true;
};

struct SweepRow {
    int index = 0;
    double pep_bound = 0.0;
    std::optional<double> theory_bound;
    sdp::Status status = sdp::Status::optimal;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double gap = 0.0;
    double solve_ms = 0.0;
};

/// Throws UsageError when the spec does not describe a valid sweep.
void check_spec(const SweepSpec& spec);

/// SDP bound at one sweep index.
pep::BoundResult sweep_point(const SweepSpec& spec, int index);
/// Matching closed-form bound, if one applies to the parameters.
std::optional<double> theory_point(const SweepSpec& spec, int index);

/// Rows in index order; points run on up to spec.jobs threads.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

inline constexpr const char* kCsvHeader = "index,pep_bound,theory_bound,status,primal_res,dual_res,gap,solve_ms";
std::string format_row(const SweepRow& row, bool timing);
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool timing);

/// Parses sweep flags (everything after `sweep`) into a spec.
SweepSpec parse_sweep_args(const std::vector<std::string>& args);

/// Sweep flags bound to a CLI11 (sub)command; call finish() after parsing.
struct SweepFlags {
    SweepSpec spec;
    std::string method, N, cycles, ell, steps, initial = "distance", algorithm = "ipm";
    std::optional<int> max_iter;
    std::uint64_t seed = 0;
    std::string out;
    bool no_timing = false;

    void attach(CLI::App& app);
    void finish();
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidateOptions {
    std::uint64_t seed = 1;
    std::string data_dir;
    sdp::SolverConfig solver;
    std::string only_figure;  // figures suite: restrict to one figure
};

inline const std::vector<std::string> kSuites = {"sandwich", "monotonicity", "homogeneity", "n1-exact", "figures"};

/// Runs one named suite; throws UsageError for unknown names.
std::vector<Check> run_suite(const std::string& suite, const ValidateOptions& opts);

/// Default location of the regression fixtures.
std::string default_data_dir();

/// Entry point of the `cdpep` tool.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cdpep::cli
