#include "cdpep/ccd_pep.hpp"
#include "cdpep/cli.hpp"
#include "cdpep/empirical.hpp"
#include "cdpep/rcd_pep.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#ifndef CDPEP_DATA_DIR
#define CDPEP_DATA_DIR "data"
#endif

namespace cdpep::cli {

namespace emp = cdpep::empirical;

std::string default_data_dir() { return CDPEP_DATA_DIR; }

namespace {

// A bound that failed to solve to optimality is reported, never compared.
struct Bound {
    double value = 0.0;
    bool ok = false;
};

Bound to_bound(const pep::BoundResult& r) { return {r.value, r.solution.status == sdp::Status::optimal}; }

std::string fmt_bound(const Bound& b) { return b.ok ? fmt::format("{:.8g}", b.value) : "unsolved"; }

Check check(std::string name, bool passed, std::string detail) { return {std::move(name), passed, std::move(detail)}; }

class Cache {
public:
    explicit Cache(const sdp::SolverConfig& cfg) : cfg_(cfg) {}

    Bound rcd(int n, int N, double L, double ell, double t, double delta, bool quad) {
        const auto key = fmt::format("rcd {} {} {} {} {} {} {}", n, N, L, ell, t, delta, quad);
        return get(key, [&] {
            auto p = rcd::RcdParams::constant_step(n, N, L, ell, t, delta);
            p.quadratic = quad;
            return rcd::rcd_bound(p, cfg_);
        });
    }
    Bound ccd(int n, int K, double L, double ell, double t, double delta, ccd::Variant v) {
        const auto key = fmt::format("ccd {} {} {} {} {} {} {}", n, K, L, ell, t, delta, ccd::to_string(v));
        return get(key, [&] {
            const auto p = ccd::CcdParams::constant_step(n, K, L, std::vector<double>(n, ell), t, delta, v);
            return ccd::ccd_bound(p, cfg_);
        });
    }
    Bound gs(int n, double lambda, int K, double delta) {
        const auto key = fmt::format("gs {} {:.17g} {} {}", n, lambda, K, delta);
        return get(key, [&] { return ccd::gauss_seidel_bound(n, lambda, K, delta, cfg_); });
    }

    double slack() const { return 10.0 * cfg_.tol; }

private:
    template <class F>
    Bound get(const std::string& key, F&& solve) {
        auto it = memo_.find(key);
        if (it == memo_.end()) it = memo_.emplace(key, to_bound(solve())).first;
        return it->second;
    }

    sdp::SolverConfig cfg_;
    std::map<std::string, Bound> memo_;
};

// Empirical gaps must sit below the SDP bound of every relaxation that
// still contains the instance.
std::vector<Check> sandwich(const ValidateOptions& o) {
    std::vector<Check> out;
    Cache cache(o.solver);
    std::mt19937_64 rng(o.seed);
    constexpr int kDraws = 50;
    constexpr int kBudget = 100;

    {
        int worst_draw = -1;
        double worst_margin = -INFINITY;
        bool ok = true;
        std::string why;
        for (int d = 0; d < kDraws; ++d) {
            const int N = 1 + d % 8;
            emp::SamplerSpec spec{2, 2.0, {1.0, 1.0}, 1.0, emp::Norm::euclidean, d % 2 == 1};
            const auto inst = emp::sample_instance(spec, rng);
            const std::vector<double> steps(N, 1.0);
            const double gap = emp::run_rcd_exact(inst, steps, N);
            const Bound quad = cache.rcd(2, N, 2.0, 1.0, 1.0, 1.0, true);
            const Bound gen = cache.rcd(2, N, 2.0, 1.0, 1.0, 1.0, false);
            if (!quad.ok || !gen.ok) {
                ok = false;
                why = fmt::format("N={} bound did not solve", N);
                continue;
            }
            const double margin = std::max(gap - quad.value, quad.value - gen.value);
            if (margin > worst_margin) {
                worst_margin = margin;
                worst_draw = d;
            }
            if (margin > cache.slack()) ok = false;
        }
        out.push_back(check("sandwich/rcd draws", ok,
                            why.empty() ? fmt::format("{} draws, worst excess {:.3e} at draw {}", kDraws, worst_margin,
                                                      worst_draw)
                                        : why));

        emp::SearchTarget t{emp::Method::rcd, 2, 8, 2.0, {1.0, 1.0}, std::vector<double>(8, 1.0), 1.0};
        const Bound b = cache.rcd(2, 8, 2.0, 1.0, 1.0, 1.0, true);
        const auto res = emp::worst_case_search(t, b.value, kBudget, o.seed, cache.slack());
        out.push_back(check("sandwich/rcd search", b.ok && res.consistent,
                            fmt::format("N=8 best gap {:.8g} vs bound {}", res.best_gap, fmt_bound(b))));
    }

    {
        bool ok = true;
        double worst = -INFINITY;
        for (int d = 0; d < kDraws; ++d) {
            const int n = 2 + d % 2;
            const int K = 1 + (d / 2) % 5;
            emp::SamplerSpec spec{n, static_cast<double>(n), std::vector<double>(n, 1.0), 1.0,
                                  emp::Norm::euclidean, d % 3 == 0};
            const auto inst = emp::sample_instance(spec, rng);
            const std::vector<double> steps(n * K, 1.0);
            const double gap = emp::run_ccd(inst, steps, n * K);
            const Bound b = cache.ccd(n, K, n, 1.0, 1.0, 1.0, ccd::Variant::quadratic);
            ok = ok && b.ok;
            worst = std::max(worst, gap - b.value);
        }
        ok = ok && worst <= cache.slack();
        out.push_back(check("sandwich/ccd draws", ok, fmt::format("{} draws, worst excess {:.3e}", kDraws, worst)));

        emp::SearchTarget t{emp::Method::ccd, 2, 6, 2.0, {1.0, 1.0}, std::vector<double>(6, 1.0), 1.0};
        const Bound b = cache.ccd(2, 3, 2.0, 1.0, 1.0, 1.0, ccd::Variant::quadratic);
        const auto res = emp::worst_case_search(t, b.value, kBudget, o.seed + 1, cache.slack());
        out.push_back(check("sandwich/ccd search", b.ok && res.consistent,
                            fmt::format("3 cycles best gap {:.8g} vs bound {}", res.best_gap, fmt_bound(b))));
    }

    {
        bool ok = true;
        double worst = -INFINITY;
        for (int d = 0; d < kDraws; ++d) {
            const int n = 2 + d % 4;
            const int K = 1 + d % 3;
            emp::SamplerSpec spec{n, 1.0, {}, 1.0, emp::Norm::diagonal, d % 5 == 0};
            const auto inst = emp::sample_instance(spec, rng);
            const double gap = emp::run_gauss_seidel(inst, K).back();
            const Bound b = cache.gs(n, inst.lambda_max_scaled(), K, 1.0);
            ok = ok && b.ok;
            worst = std::max(worst, gap - b.value);
        }
        ok = ok && worst <= cache.slack();
        out.push_back(check("sandwich/gs draws", ok, fmt::format("{} draws, worst excess {:.3e}", kDraws, worst)));

        emp::SearchTarget t{emp::Method::gauss_seidel, 3, 2, 2.0, {}, {}, 1.0};
        const Bound b = cache.gs(3, 2.0, 2, 1.0);
        const auto res = emp::worst_case_search(t, b.value, kBudget, o.seed + 2, cache.slack());
        out.push_back(check("sandwich/gs search", b.ok && res.consistent,
                            fmt::format("2 sweeps best gap {:.8g} vs bound {}", res.best_gap, fmt_bound(b))));
    }
    return out;
}

// values[k] must not increase (or not decrease) by more than slack.
Check monotone(std::string name, const std::vector<Bound>& values, bool increasing, double slack) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!values[k].ok) return check(std::move(name), false, fmt::format("point {} did not solve", k + 1));
    }
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double step = values[k].value - values[k - 1].value;
        if ((increasing ? -step : step) > slack) {
            return check(std::move(name), false,
                         fmt::format("{:.10g} -> {:.10g} at point {}", values[k - 1].value, values[k].value, k + 1));
        }
    }
    return check(std::move(name), true,
                 fmt::format("{} points, {:.6g} .. {:.6g}", values.size(), values.front().value, values.back().value));
}

std::vector<Check> monotonicity(const ValidateOptions& o) {
    Cache cache(o.solver);
    const double slack = cache.slack();
    std::vector<Check> out;
    std::vector<Bound> v;

    for (int N = 1; N <= 8; ++N) v.push_back(cache.rcd(2, N, 2.0, 1.0, 1.0, 1.0, false));
    out.push_back(monotone("monotonicity/rcd in N", v, false, slack));

    v.clear();
    for (int K = 1; K <= 5; ++K) v.push_back(cache.ccd(2, K, 2.0, 1.0, 0.5, 1.0, ccd::Variant::base));
    out.push_back(monotone("monotonicity/ccd in cycles", v, false, slack));

    v.clear();
    for (int K = 1; K <= 4; ++K) v.push_back(cache.gs(3, 2.0, K, 1.0));
    out.push_back(monotone("monotonicity/gs in sweeps", v, false, slack));

    v.clear();
    for (double L : {1.0, 1.25, 1.5, 1.75, 2.0}) v.push_back(cache.rcd(2, 4, L, 1.0, 1.0, 1.0, false));
    out.push_back(monotone("monotonicity/rcd in L", v, true, slack));

    v.clear();
    for (auto var : {ccd::Variant::base, ccd::Variant::coord, ccd::Variant::quadratic})
        v.push_back(cache.ccd(2, 3, 2.0, 1.0, 0.5, 1.0, var));
    out.push_back(monotone("monotonicity/ccd relaxation chain", v, false, slack));

    v.clear();
    for (bool quad : {false, true}) v.push_back(cache.rcd(2, 6, 2.0, 1.0, 1.0, 1.0, quad));
    out.push_back(monotone("monotonicity/rcd quadratic below general", v, false, slack));
    return out;
}

std::vector<Check> homogeneity(const ValidateOptions& o) {
    Cache cache(o.solver);
    constexpr double kRel = 1e-6;
    std::vector<Check> out;
    auto compare = [&](std::string name, const Bound& base, const Bound& scaled, double factor) {
        if (!base.ok || !scaled.ok) return check(std::move(name), false, "a solve did not converge");
        const double expect = factor * base.value;
        const double rel = std::abs(scaled.value - expect) / std::max(std::abs(expect), 1e-12);
        return check(std::move(name), rel <= kRel,
                     fmt::format("factor {}: {:.10g} vs {:.10g}, rel {:.2e}", factor, scaled.value, expect, rel));
    };
    const Bound rcd0 = cache.rcd(2, 4, 2.0, 1.0, 1.0, 1.0, false);
    const Bound ccd0 = cache.ccd(2, 2, 2.0, 1.0, 0.5, 1.0, ccd::Variant::base);
    for (double c : {0.5, 2.0, 10.0}) {
        out.push_back(compare(fmt::format("homogeneity/rcd delta x{}", c), rcd0,
                              cache.rcd(2, 4, 2.0, 1.0, 1.0, c, false), c));
        // Scaling every curvature by c and every step by 1/c scales the gap by c.
        out.push_back(compare(fmt::format("homogeneity/rcd curvature x{}", c), rcd0,
                              cache.rcd(2, 4, 2.0 * c, c, 1.0 / c, 1.0, false), c));
        out.push_back(compare(fmt::format("homogeneity/ccd delta x{}", c), ccd0,
                              cache.ccd(2, 2, 2.0, 1.0, 0.5, c, ccd::Variant::base), c));
    }
    return out;
}

std::vector<Check> n1_exact(const ValidateOptions& o) {
    Cache cache(o.solver);
    std::vector<Check> out;
    double worst = 0.0;
    bool ok = true;
    for (int N = 1; N <= 10; ++N) {
        const double exact = 1.0 / (4.0 * N + 2.0);
        const Bound b = cache.ccd(1, N, 1.0, 1.0, 1.0, 1.0, ccd::Variant::base);
        ok = ok && b.ok;
        worst = std::max(worst, std::abs(b.value - exact));
    }
    ok = ok && worst <= 1e-4;
    out.push_back(check("n1-exact/sdp matches 1/(4N+2)", ok, fmt::format("max deviation {:.3e}", worst)));

    double ratio = INFINITY;
    for (int N = 1; N <= 10; ++N) ratio = std::min(ratio, emp::huber_worst_case_gap(N, 1.0, 1.0) * (4.0 * N + 2.0));
    out.push_back(check("n1-exact/huber attains 1/(4N+2)", ratio >= 0.999, fmt::format("min ratio {:.6f}", ratio)));
    return out;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (comma == std::string::npos) return out;
        pos = comma + 1;
    }
}

// Fixture rows keyed by (series, index) -> pep_bound.
std::map<std::pair<std::string, int>, double> read_fixture(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
    std::map<std::pair<std::string, int>, double> rows;
    std::string line;
    std::getline(is, line);
    if (line != std::string("series,") + kCsvHeader) {
        throw std::runtime_error(fmt::format("{}: unexpected header", path.string()));
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() < 3) throw std::runtime_error(fmt::format("{}: short row '{}'", path.string(), line));
        rows[{f[0], std::stoi(f[1])}] = std::stod(f[2]);
    }
    return rows;
}

std::vector<Check> figures(const ValidateOptions& o) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(o.data_dir.empty() ? default_data_dir() : o.data_dir) / "figures";
    std::ifstream manifest(dir / "manifest.txt");
    if (!manifest) return {check("figures/manifest", false, fmt::format("cannot open {}", (dir / "manifest.txt").string()))};

    constexpr double kTol = 1e-5;
    std::vector<Check> out;
    std::map<std::string, std::map<std::pair<std::string, int>, double>> fixtures;
    std::string line;
    while (std::getline(manifest, line)) {
        auto tok = split_ws(line);
        if (tok.empty() || tok[0].starts_with('#')) continue;
        if (tok.size() < 3) throw std::runtime_error(fmt::format("manifest: malformed line '{}'", line));
        const std::string fig = tok[0], series = tok[1];
        if (!o.only_figure.empty() && fig != o.only_figure) continue;
        const std::string name = fmt::format("figures/{} {}", fig, series);
        try {
            if (!fixtures.contains(fig)) fixtures[fig] = read_fixture(dir / (fig + ".csv"));
            const auto& ref = fixtures[fig];
            SweepSpec spec = parse_sweep_args({tok.begin() + 2, tok.end()});
            spec.solver.tol = o.solver.tol;
            const auto rows = run_sweep(spec);
            double worst = 0.0;
            std::string problem;
            for (const auto& r : rows) {
                const auto it = ref.find({series, r.index});
                if (it == ref.end()) {
                    problem = fmt::format("index {} missing from fixture", r.index);
                    break;
                }
                if (r.status != sdp::Status::optimal) {
                    problem = fmt::format("index {} finished {}", r.index, sdp::to_string(r.status));
                    break;
                }
                worst = std::max(worst, std::abs(r.pep_bound - it->second) / std::max(1.0, std::abs(it->second)));
            }
            const bool ok = problem.empty() && worst <= kTol;
            out.push_back(check(name, ok,
                                problem.empty() ? fmt::format("{} points, max deviation {:.2e}", rows.size(), worst)
                                                : problem));
        } catch (const std::exception& e) {
            out.push_back(check(name, false, e.what()));
        }
    }
    if (out.empty()) out.push_back(check("figures/manifest", false, "no matching series"));
    return out;
}

} // namespace

std::vector<Check> run_suite(const std::string& suite, const ValidateOptions& opts) {
    if (suite == "sandwich") return sandwich(opts);
    if (suite == "monotonicity") return monotonicity(opts);
    if (suite == "homogeneity") return homogeneity(opts);
    if (suite == "n1-exact") return n1_exact(opts);
    if (suite == "figures") return figures(opts);
    throw UsageError(fmt::format("unknown suite '{}'", suite));
}

} // namespace cdpep::cli
