#include "cdpep/ccd_pep.hpp"
#include "cdpep/cli.hpp"
#include "cdpep/kernels.hpp"
#include "cdpep/theory_bounds.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

namespace cdpep::cli {

namespace {

bool is_rcd(SweepMethod m) { return m == SweepMethod::rcd || m == SweepMethod::rcd_quad; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

int parse_int(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw UsageError(fmt::format("invalid {} '{}'", what, s));
    }
    return v;
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v)) throw UsageError(fmt::format("invalid number '{}'", s));
    return v;
}

double ell_max_of(const SweepSpec& s) {
    if (s.ell_max) return *s.ell_max;
    return *std::max_element(s.ell.begin(), s.ell.end());
}

int iterations(const SweepSpec& s, int index) { return is_rcd(s.method) ? index : s.n * index; }

std::vector<double> steps_for(const SweepSpec& s, int N) {
    if (!s.steps.empty()) return {s.steps.begin(), s.steps.begin() + N};
    const double t = s.step ? *s.step : 1.0 / ell_max_of(s);
    return std::vector<double>(static_cast<std::size_t>(N), t);
}

// The closed forms are stated for the step 1/ell_max.
bool reference_steps(const SweepSpec& s, int N) {
    const double t = 1.0 / ell_max_of(s);
    const auto steps = steps_for(s, N);
    return std::all_of(steps.begin(), steps.end(), [&](double v) { return std::abs(v - t) <= 1e-12 * t; });
}

} // namespace

Range parse_range(const std::string& text) {
    const auto dots = text.find("..");
    Range r;
    if (dots == std::string::npos) {
        r.first = r.last = parse_int(text, "range");
    } else {
        r.first = parse_int(text.substr(0, dots), "range start");
        r.last = parse_int(text.substr(dots + 2), "range end");
    }
    if (r.first < 1) throw UsageError(fmt::format("range '{}' must start at 1 or later", text));
    if (r.last < r.first) throw UsageError(fmt::format("range '{}' is empty", text));
    return r;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        out.push_back(parse_double(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

SweepMethod parse_method(const std::string& name) {
    if (name == "rcd") return SweepMethod::rcd;
    if (name == "rcd-quad") return SweepMethod::rcd_quad;
    if (name == "ccd") return SweepMethod::ccd;
    if (name == "ccd-ex") return SweepMethod::ccd_ex;
    if (name == "ccd-quad") return SweepMethod::ccd_quad;
    if (name == "gs") return SweepMethod::gs;
    throw UsageError(fmt::format("unknown method '{}' (expected rcd, rcd-quad, ccd, ccd-ex, ccd-quad or gs)", name));
}

std::string_view to_string(SweepMethod m) {
    switch (m) {
    case SweepMethod::rcd: return "rcd";
    case SweepMethod::rcd_quad: return "rcd-quad";
    case SweepMethod::ccd: return "ccd";
    case SweepMethod::ccd_ex: return "ccd-ex";
    case SweepMethod::ccd_quad: return "ccd-quad";
    case SweepMethod::gs: return "gs";
    }
    return "unknown";
}

void check_spec(const SweepSpec& s) {
    auto fail = [](const std::string& msg) { throw UsageError(msg); };
    if (s.n < 1) fail("--n is required and must be positive");
    if (s.range.last < s.range.first || s.range.first < 1) fail("empty sweep range");
    if (s.jobs < 1) fail("--jobs must be positive");
    if (!(s.delta > 0.0)) fail("--delta must be positive");
    if (s.step && !s.steps.empty()) fail("give either --step or --steps, not both");
    if (s.method == SweepMethod::gs) {
        if (!s.lambda_max) fail("--lambda-max is required for gs");
        if (s.L || !s.ell.empty() || s.ell_max || s.step || !s.steps.empty() || s.mu != 0.0) {
            fail("gs takes --n, --lambda-max, --cycles and --delta only");
        }
        if (s.initial != rcd::InitialKind::distance) fail("gs supports only --initial distance");
        return;
    }
    if (s.lambda_max) fail("--lambda-max applies to gs only");
    if (!s.L) fail("--L is required");
    if (s.ell.empty() && !s.ell_max) fail("one of --ell or --ell-max is required");
    if (!s.ell.empty() && s.ell_max) fail("give either --ell or --ell-max, not both");
    const int N_max = iterations(s, s.range.last);
    if (!s.steps.empty() && static_cast<int>(s.steps.size()) < N_max) {
        fail(fmt::format("--steps lists {} lengths but the sweep needs {}", s.steps.size(), N_max));
    }
    if (is_rcd(s.method)) {
        if (s.mu < 0.0) fail("--mu must be nonnegative");
    } else {
        if (s.mu != 0.0) fail("cyclic methods support only mu = 0");
        if (s.initial != rcd::InitialKind::distance) fail("cyclic methods support only --initial distance");
        if (!s.ell.empty() && static_cast<int>(s.ell.size()) != s.n) {
            fail(fmt::format("--ell lists {} constants but n = {}", s.ell.size(), s.n));
        }
    }
    // Let the model validate the remaining invariants on the first point.
    try {
        (void)sweep_point(s, 0);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

namespace {

rcd::RcdParams rcd_params(const SweepSpec& s, int N) {
    rcd::RcdParams p;
    p.n = s.n;
    p.N = N;
    p.L = *s.L;
    p.mu = s.mu;
    p.ell_max = ell_max_of(s);
    p.steps = steps_for(s, N);
    p.initial = {s.initial, s.delta};
    p.quadratic = s.method == SweepMethod::rcd_quad;
    return p;
}

ccd::CcdParams ccd_params(const SweepSpec& s, int cycles) {
    ccd::CcdParams p;
    p.n = s.n;
    p.cycles = cycles;
    p.L = *s.L;
    p.ell = s.ell.empty() ? std::vector<double>(static_cast<std::size_t>(s.n), *s.ell_max) : s.ell;
    p.steps = steps_for(s, s.n * cycles);
    p.delta = s.delta;
    p.variant = s.method == SweepMethod::ccd      ? ccd::Variant::base
                : s.method == SweepMethod::ccd_ex ? ccd::Variant::coord
                                                  : ccd::Variant::quadratic;
    return p;
}

} // namespace

// index 0 only validates parameters (used by check_spec).
pep::BoundResult sweep_point(const SweepSpec& s, int index) {
    const int probe = std::max(index, 1);
    if (s.method == SweepMethod::gs) {
        if (index == 0) {
            ccd::gauss_seidel_params(s.n, *s.lambda_max, probe, s.delta).validate();
            return {};
        }
        return ccd::gauss_seidel_bound(s.n, *s.lambda_max, index, s.delta, s.solver);
    }
    if (is_rcd(s.method)) {
        const auto p = rcd_params(s, probe);
        if (index == 0) {
            p.validate();
            return {};
        }
        return rcd::rcd_bound(p, s.solver);
    }
    const auto p = ccd_params(s, probe);
    if (index == 0) {
        p.validate();
        return {};
    }
    return ccd::ccd_bound(p, s.solver);
}

std::optional<double> theory_point(const SweepSpec& s, int index) {
    theory::TheoryQuery q;
    q.n = s.n;
    q.R0sq = s.delta;
    q.f0gap = s.delta;
    if (s.method == SweepMethod::gs) {
        q.L = *s.lambda_max;
        q.ell_max = 1.0;
        q.k = s.n * index;
        return theory::beck_ccd(q);
    }
    const int N = iterations(s, index);
    if (!reference_steps(s, N)) return std::nullopt;
    q.L = *s.L;
    q.ell_max = ell_max_of(s);
    q.mu = s.mu;
    q.k = N;
    if (is_rcd(s.method)) {
        if (s.mu == 0.0 && s.initial == rcd::InitialKind::distance) return theory::wright_rcd(q);
        if (s.mu > 0.0 && s.initial == rcd::InitialKind::fgap && s.mu <= s.n * q.ell_max) {
            return theory::wright_rcd_strong(q, N);
        }
        return std::nullopt;
    }
    return theory::beck_ccd(q);
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    check_spec(spec);
    const int count = spec.range.last - spec.range.first + 1;
    std::vector<SweepRow> rows(static_cast<std::size_t>(count));
    auto compute = [&](int k) {
        const int index = spec.range.first + k;
        const auto r = sweep_point(spec, index);
        SweepRow& row = rows[static_cast<std::size_t>(k)];
        row.index = index;
        row.pep_bound = r.value;
        row.theory_bound = theory_point(spec, index);
        row.status = r.solution.status;
        row.primal_res = r.solution.primal_res;
        row.dual_res = r.solution.dual_res;
        row.gap = r.solution.gap;
        row.solve_ms = r.solution.solve_ms;
    };
    const int jobs = std::min(spec.jobs, count);
    if (jobs <= 1) {
        for (int k = 0; k < count; ++k) compute(k);
        return rows;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < jobs; ++w) {
            pool.emplace_back([&, w] {
                // Concurrent solves share the cores; keep each one serial.
                kernels::set_thread_limit(1);
                try {
                    for (int k = next++; k < count; k = next++) compute(k);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

std::string format_row(const SweepRow& r, bool timing) {
    return fmt::format("{},{:.12e},{},{},{:.3e},{:.3e},{:.3e},{}", r.index, r.pep_bound,
                       r.theory_bound ? fmt::format("{:.12e}", *r.theory_bound) : std::string{},
                       sdp::to_string(r.status), r.primal_res, r.dual_res, r.gap,
                       timing ? fmt::format("{:.1f}", r.solve_ms) : std::string{});
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool timing) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) os << format_row(r, timing) << '\n';
}

namespace {

void set_algorithm(SweepSpec& spec, const std::string& algorithm, std::optional<int> max_iter) {
    if (algorithm == "ipm") {
        spec.solver.algorithm = sdp::Algorithm::ipm;
    } else if (algorithm == "admm") {
        spec.solver.algorithm = sdp::Algorithm::admm;
    } else {
        throw UsageError(fmt::format("--solver must be ipm or admm, got '{}'", algorithm));
    }
    if (!(spec.solver.tol > 0.0)) throw UsageError("--tol must be positive");
    if (max_iter) {
        if (*max_iter < 1) throw UsageError("--max-iter must be positive");
        (spec.solver.algorithm == sdp::Algorithm::ipm ? spec.solver.ipm_max_iter : spec.solver.max_iter) = *max_iter;
    }
}

} // namespace

void SweepFlags::attach(CLI::App& app) {
    app.add_option("--method", method, "rcd | rcd-quad | ccd | ccd-ex | ccd-quad | gs")->required();
    app.add_option("--n", spec.n, "dimension")->required();
    app.add_option("--N", N, "iterations, single or a..b (randomized methods)");
    app.add_option("--cycles", cycles, "cycles, single or a..b (cyclic methods and gs)");
    app.add_option("--L", spec.L, "smoothness constant");
    app.add_option("--mu", spec.mu, "strong convexity (randomized methods)");
    app.add_option("--ell", ell, "coordinate constants, comma separated");
    app.add_option("--ell-max", spec.ell_max, "largest coordinate constant");
    app.add_option("--step", spec.step, "constant step length (default 1/ell_max)");
    app.add_option("--steps", steps, "per-iteration step lengths, comma separated");
    app.add_option("--delta", spec.delta, "initial radius")->capture_default_str();
    app.add_option("--initial", initial, "distance | fgap")->capture_default_str();
    app.add_option("--lambda-max", spec.lambda_max, "largest eigenvalue of D^-1 A (gs)");
    app.add_option("--tol", spec.solver.tol, "solver tolerance")->capture_default_str();
    app.add_option("--max-iter", max_iter, "solver iteration cap");
    app.add_option("--solver", algorithm, "ipm | admm")->capture_default_str();
    app.add_option("--jobs", spec.jobs, "concurrent sweep points")->capture_default_str();
    app.add_option("--seed", seed, "accepted for symmetry with validate; sweeps are deterministic");
    app.add_option("--out", out, "output CSV (default stdout)");
    app.add_flag("--no-timing", no_timing, "leave solve_ms empty so output is reproducible byte for byte");
}

void SweepFlags::finish() {
    spec.method = parse_method(method);
    if (!N.empty() && !cycles.empty()) throw UsageError("give either --N or --cycles, not both");
    if (N.empty() && cycles.empty()) throw UsageError("one of --N or --cycles is required");
    if (is_rcd(spec.method) && !cycles.empty()) throw UsageError("randomized methods take --N");
    if (!is_rcd(spec.method) && !N.empty()) throw UsageError("cyclic methods take --cycles");
    spec.range = parse_range(N.empty() ? cycles : N);
    if (!ell.empty()) spec.ell = parse_list(ell);
    if (!steps.empty()) spec.steps = parse_list(steps);
    if (initial == "distance") {
        spec.initial = rcd::InitialKind::distance;
    } else if (initial == "fgap") {
        spec.initial = rcd::InitialKind::fgap;
    } else {
        throw UsageError(fmt::format("--initial must be distance or fgap, got '{}'", initial));
    }
    set_algorithm(spec, algorithm, max_iter);
    spec.timing = !no_timing;
    check_spec(spec);
}

SweepSpec parse_sweep_args(const std::vector<std::string>& args) {
    CLI::App app{"sweep"};
    SweepFlags flags;
    flags.attach(app);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    flags.finish();
    return flags.spec;
}

} // namespace cdpep::cli
