#include "cdpep/rcd_pep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace cdpep::rcd {

using pep::CoordVec;
using pep::QuadExpr;
using pep::VecExpr;

RcdParams RcdParams::constant_step(int n, int N, double L, double ell_max, double step, double delta) {
    RcdParams p;
    p.n = n;
    p.N = N;
    p.L = L;
    p.ell_max = ell_max;
    p.steps.assign(static_cast<std::size_t>(std::max(N, 0)), step);
    p.initial = {InitialKind::distance, delta};
    return p;
}

void RcdParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("RcdParams: " + msg); };
    if (n < 1) fail(fmt::format("n must be positive, got {}", n));
    if (N < 1) fail(fmt::format("N must be positive, got {}", N));
    if (!(L > 0.0)) fail(fmt::format("L must be positive, got {}", L));
    if (!(ell_max > 0.0)) fail(fmt::format("ell_max must be positive, got {}", ell_max));
    if (!(mu >= 0.0) || mu >= L) fail(fmt::format("need 0 <= mu < L (mu = {}, L = {})", mu, L));
    constexpr double slack = 1e-12;
    if (ell_max > L * (1.0 + slack) || L > n * ell_max * (1.0 + slack)) {
        fail(fmt::format("need ell_max <= L <= n ell_max (ell_max = {}, L = {}, n = {})", ell_max, L, n));
    }
    if (static_cast<int>(steps.size()) != N) fail(fmt::format("expected {} step lengths, got {}", N, steps.size()));
    for (double t : steps)
        if (!(t > 0.0)) fail(fmt::format("step lengths must be positive, got {}", t));
    if (!(initial.radius > 0.0)) fail(fmt::format("initial radius must be positive, got {}", initial.radius));
}

std::string RcdParams::describe() const {
    std::string steps_s;
    if (!steps.empty() && std::all_of(steps.begin(), steps.end(), [&](double t) { return t == steps.front(); })) {
        steps_s = fmt::format("{}", steps.front());
    } else {
        steps_s = fmt::format("[{}]", fmt::join(steps, ","));
    }
    return fmt::format("rcd n={} N={} L={} mu={} ell_max={} t={} {}={} quadratic={}", n, N, L, mu, ell_max, steps_s,
                       initial.kind == InitialKind::distance ? "Delta" : "delta", initial.radius, quadratic);
}

std::unique_ptr<RcdModel> build_rcd_model(const RcdParams& params) {
    params.validate();
    const int N = params.N;
    auto model = std::make_unique<RcdModel>();
    auto& basis = model->basis;
    basis.add("x0");
    for (int k = 0; k <= N; ++k) basis.add(fmt::format("g{}", k));
    for (int k = 0; k <= N; ++k) basis.add(fmt::format("d{}", k));

    auto vec = [&](const std::string& label) { return CoordVec{VecExpr::unit(basis, label)}; };
    std::vector<CoordVec> d(static_cast<std::size_t>(N + 1));
    for (int k = 0; k <= N; ++k) d[k] = vec(fmt::format("d{}", k));

    // x^{k+1} = x^k - t_k d^k; expectations are linear, so the recursion
    // holds for the expected Gram entries.
    auto& pts = model->points;
    CoordVec x = vec("x0");
    for (int k = 0; k <= N; ++k) {
        pts.push_back({x, vec(fmt::format("g{}", k)), k});
        if (k < N) x = x - params.steps[k] * d[k];
    }
    pts.push_back({pep::zero_vec(1), pep::zero_vec(1), -1});  // x* = 0, g* = 0, f* = 0
    model->num_fvals = N + 1;

    auto& rows = model->rows;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            rows.push_back({pep::interp_ineq(pts[i], pts[j], params.mu, params.L), sdp::Sense::le, "interp"});
        }
    for (int k = 0; k < N; ++k) {
        auto [fwd, bwd] = pep::descent_pair(pts[k], pts[k + 1], params.ell_max);
        rows.push_back({fwd, sdp::Sense::le, "descent"});
        rows.push_back({bwd, sdp::Sense::le, "descent"});
    }
    const double inv_n = 1.0 / params.n;
    for (int k = 0; k <= N; ++k) {
        const auto& g = pts[k].grad;
        const auto& xk = pts[k].point;
        rows.push_back({inner(d[k], d[k]) - inv_n * inner(g, g), sdp::Sense::eq, "dP"});
        rows.push_back({inner(d[k], g) - inv_n * inner(g, g), sdp::Sense::eq, "dP"});
        rows.push_back({inner(d[k], xk) - inv_n * inner(g, xk), sdp::Sense::eq, "dP"});
    }
    if (params.initial.kind == InitialKind::distance) {
        rows.push_back({inner(pts[0].point, pts[0].point) - QuadExpr::constant(params.initial.radius),
                        sdp::Sense::le, "initial"});
    } else {
        rows.push_back({pts[0].f() - QuadExpr::constant(params.initial.radius), sdp::Sense::le, "initial"});
    }
    if (params.quadratic) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                rows.push_back({pep::quad_eq(pts[i], pts[j]), sdp::Sense::eq, "quad"});
    }
    model->objective = pts[N].f();
    return model;
}

sdp::ConicProblem build_rcd(const RcdParams& params) {
    const auto model = build_rcd_model(params);
    return pep::assemble(model->basis, model->num_fvals, model->rows, model->objective);
}

pep::BoundResult rcd_bound(const RcdParams& params, const sdp::SolverConfig& cfg) {
    const auto problem = build_rcd(params);
    pep::BoundResult r;
    r.solution = sdp::solve(problem, cfg);
    r.value = std::max(0.0, r.solution.objective);
    r.params = params.describe();
    return r;
}

} // namespace cdpep::rcd
