#include "cdpep/ccd_pep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cdpep::ccd {

using pep::CoordVec;
using pep::QuadExpr;
using pep::VecExpr;

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::base: return "base";
    case Variant::coord: return "coord";
    case Variant::quadratic: return "quadratic";
    }
    return "unknown";
}

int CcdParams::active(int k) const {
    const int pos = k % n;
    return order.empty() ? pos : order[static_cast<std::size_t>(pos)];
}

CcdParams CcdParams::constant_step(int n, int cycles, double L, std::vector<double> ell, double step, double delta,
                                   Variant variant) {
    CcdParams p;
    p.n = n;
    p.cycles = cycles;
    p.L = L;
    p.ell = std::move(ell);
    p.steps.assign(static_cast<std::size_t>(std::max(0, n * cycles)), step);
    p.delta = delta;
    p.variant = variant;
    return p;
}

void CcdParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("CcdParams: " + msg); };
    if (n < 1) fail(fmt::format("n must be positive, got {}", n));
    if (cycles < 1) fail(fmt::format("cycles must be positive, got {}", cycles));
    if (!(L > 0.0)) fail(fmt::format("L must be positive, got {}", L));
    if (static_cast<int>(ell.size()) != n) fail(fmt::format("expected {} coordinate constants, got {}", n, ell.size()));
    for (double l : ell) {
        if (!(l > 0.0)) fail(fmt::format("coordinate constants must be positive, got {}", l));
        if (l > L * (1.0 + 1e-12)) fail(fmt::format("coordinate constant {} exceeds L = {}", l, L));
    }
    if (static_cast<int>(steps.size()) != N()) fail(fmt::format("expected {} step lengths, got {}", N(), steps.size()));
    for (double t : steps)
        if (!(t >= 0.0)) fail(fmt::format("step lengths must be nonnegative, got {}", t));
    if (!(delta > 0.0)) fail(fmt::format("Delta must be positive, got {}", delta));
    if (!order.empty()) {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> iota(static_cast<std::size_t>(n));
        std::iota(iota.begin(), iota.end(), 0);
        if (sorted != iota) fail("order must be a permutation of 0..n-1");
    }
}

std::string CcdParams::describe() const {
    std::string steps_s;
    if (!steps.empty() && std::all_of(steps.begin(), steps.end(), [&](double t) { return t == steps.front(); })) {
        steps_s = fmt::format("{}", steps.front());
    } else {
        steps_s = fmt::format("[{}]", fmt::join(steps, ","));
    }
    return fmt::format("ccd n={} cycles={} L={} ell=[{}] t={} Delta={} variant={}", n, cycles, L, fmt::join(ell, ","),
                       steps_s, delta, to_string(variant));
}

ScalarVarSpace::ScalarVarSpace(int n, int N) : n_(n), N_(N) {
    for (int i = 0; i < n; ++i) basis_.add(fmt::format("x0_{}", i + 1));
    for (int k = 0; k <= N; ++k)
        for (int i = 0; i < n; ++i) basis_.add(fmt::format("g{}_{}", k, i + 1));
}

std::vector<CoordVec> eliminate_iterates(const CcdParams& params, const ScalarVarSpace& space) {
    const int n = params.n;
    const int N = params.N();
    if (space.n() != n || space.N() != N) throw std::invalid_argument("eliminate_iterates: space does not match params");
    std::vector<CoordVec> x(static_cast<std::size_t>(N + 1));
    x[0].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[0][i] = VecExpr::unit(space.basis(), space.x0(i));
    for (int k = 0; k < N; ++k) {
        x[k + 1] = x[k];
        const int i = params.active(k);
        x[k + 1][i] -= params.steps[k] * VecExpr::unit(space.basis(), space.grad(k, i));
    }
    return x;
}

std::unique_ptr<CcdModel> build_ccd_model(const CcdParams& params) {
    params.validate();
    const int n = params.n;
    const int N = params.N();
    auto model = std::make_unique<CcdModel>(n, N);
    const auto& space = model->space;
    const auto& basis = space.basis();

    const auto xs = eliminate_iterates(params, space);
    auto& pts = model->points;
    for (int k = 0; k <= N; ++k) {
        CoordVec g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) g[i] = VecExpr::unit(basis, space.grad(k, i));
        pts.push_back({xs[k], g, k});
    }
    pts.push_back({pep::zero_vec(n), pep::zero_vec(n), -1});

    auto& rows = model->rows;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            rows.push_back({pep::interp_ineq(pts[i], pts[j], 0.0, params.L), sdp::Sense::le, "interp"});
        }
    if (params.variant != Variant::base) {
        for (int k = 0; k < N; ++k) {
            const int i = params.active(k);
            const VecExpr dx = pts[k + 1].point[i] - pts[k].point[i];
            auto [a, b] = pep::coord_smooth_pair(pts[k], pts[k + 1], pts[k].grad[i], pts[k + 1].grad[i], dx,
                                                 params.ell[static_cast<std::size_t>(i)]);
            rows.push_back({a, sdp::Sense::le, "coord"});
            rows.push_back({b, sdp::Sense::le, "coord"});
        }
    }
    if (params.variant == Variant::quadratic) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                rows.push_back({pep::quad_eq(pts[i], pts[j]), sdp::Sense::eq, "quad"});
    }
    rows.push_back({inner(pts[0].point, pts[0].point) - QuadExpr::constant(params.delta), sdp::Sense::le, "initial"});
    model->objective = pts[N].f();
    return model;
}

sdp::ConicProblem build_ccd(const CcdParams& params) {
    const auto model = build_ccd_model(params);
    return pep::assemble(model->space.basis(), model->space.num_fvals(), model->rows, model->objective);
}

pep::BoundResult ccd_bound(const CcdParams& params, const sdp::SolverConfig& cfg) {
    const auto problem = build_ccd(params);
    pep::BoundResult r;
    r.solution = sdp::solve(problem, cfg);
    r.value = std::max(0.0, r.solution.objective);
    r.params = params.describe();
    return r;
}

CcdParams gauss_seidel_params(int n, double lambda_max, int K, double delta) {
    if (n < 1) throw std::invalid_argument(fmt::format("gauss_seidel: n must be positive, got {}", n));
    if (!(lambda_max >= 1.0 - 1e-12) || lambda_max > n * (1.0 + 1e-12)) {
        throw std::invalid_argument(
            fmt::format("gauss_seidel: lambda_max must lie in [1, n] = [1, {}], got {}", n, lambda_max));
    }
    if (K < 1) throw std::invalid_argument(fmt::format("gauss_seidel: cycles must be positive, got {}", K));
    const double L = std::clamp(lambda_max, 1.0, static_cast<double>(n));
    return CcdParams::constant_step(n, K, L, std::vector<double>(static_cast<std::size_t>(n), 1.0), 1.0, delta,
                                    Variant::quadratic);
}

pep::BoundResult gauss_seidel_bound(int n, double lambda_max, int K, double delta, const sdp::SolverConfig& cfg) {
    auto r = ccd_bound(gauss_seidel_params(n, lambda_max, K, delta), cfg);
    r.params = fmt::format("gs n={} lambda_max={} cycles={} Delta={}", n, lambda_max, K, delta);
    return r;
}

} // namespace cdpep::ccd
