// Operator-splitting (ADMM) alternative to the interior-point solver.
//
// Works on x = (svec X, y, s) with the affine set {A x = b} and the cone
// psd x free x nonnegative. The affine projection does not depend on the
// penalty, so rho is rebalanced freely without refactoring.

#include "sdp_detail.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cdpep::sdp::detail {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct Layout {
    int n;
    int nsv;  // n (n + 1) / 2
    int nf;
    int nle;

    int size() const { return nsv + nf + nle; }
    int sv(int i, int j) const {
        if (i < j) std::swap(i, j);
        return i * (i + 1) / 2 + j;
    }
};

Eigen::VectorXd svec(const Layout& l, const Eigen::MatrixXd& X) {
    Eigen::VectorXd v(l.nsv);
    for (int i = 0; i < l.n; ++i)
        for (int j = 0; j <= i; ++j) v(l.sv(i, j)) = i == j ? X(i, i) : kSqrt2 * X(i, j);
    return v;
}

Eigen::MatrixXd smat(const Layout& l, const Eigen::Ref<const Eigen::VectorXd>& v) {
    Eigen::MatrixXd X(l.n, l.n);
    for (int i = 0; i < l.n; ++i)
        for (int j = 0; j <= i; ++j) X(i, j) = X(j, i) = i == j ? v(l.sv(i, i)) : v(l.sv(i, j)) / kSqrt2;
    return X;
}

} // namespace

Solution solve_admm(const ConicProblem& p, const SolverConfig& cfg) {
    const Standardized s = standardize(p, cfg.equilibrate);
    const int m = s.m();
    std::vector<int> le_slot(static_cast<std::size_t>(m), -1);
    int nle = 0;
    for (int i = 0; i < m; ++i)
        if (s.is_le[i]) le_slot[i] = nle++;
    const Layout l{s.n, s.n * (s.n + 1) / 2, s.nf, nle};

    // Rows of the affine operator in svec coordinates.
    struct Term {
        int idx;
        double v;
    };
    std::vector<std::vector<Term>> rows(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        for (const auto& e : s.A[i].entries())
            rows[i].push_back({l.sv(e.row, e.col), e.row == e.col ? e.value : kSqrt2 * e.value});
        for (int k = 0; k < l.nf; ++k)
            if (s.Ay(i, k) != 0.0) rows[i].push_back({l.nsv + k, s.Ay(i, k)});
        if (le_slot[i] >= 0) rows[i].push_back({l.nsv + l.nf + le_slot[i], 1.0});
    }
    auto apply = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(m);
        for (int i = 0; i < m; ++i) {
            double acc = 0.0;
            for (const auto& t : rows[i]) acc += t.v * x(t.idx);
            r(i) = acc;
        }
        return r;
    };
    auto apply_t = [&](const Eigen::VectorXd& w) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(l.size());
        for (int i = 0; i < m; ++i)
            for (const auto& t : rows[i]) r(t.idx) += t.v * w(i);
        return r;
    };

    Eigen::MatrixXd AAt(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = sparse_dot(s.A[i], s.A[j]) + s.Ay.row(i).dot(s.Ay.row(j));
            if (i == j && le_slot[i] >= 0) v += 1.0;
            AAt(i, j) = AAt(j, i) = v;
        }
    AAt.diagonal().array() += 1e-12 * std::max(1.0, AAt.diagonal().maxCoeff());
    const Eigen::LLT<Eigen::MatrixXd> chol(AAt);

    Eigen::VectorXd q = Eigen::VectorXd::Zero(l.size());
    {
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(l.n, l.n);
        s.C.add_to(C, 1.0);
        q.head(l.nsv) = -svec(l, C);
        q.segment(l.nsv, l.nf) = -s.cy;
    }

    double rho = cfg.rho;
    const double alpha = cfg.relaxation;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(l.size());
    Eigen::VectorXd u = Eigen::VectorXd::Zero(l.size());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd x(l.size());

    auto project = [&](Eigen::VectorXd v) {
        const Eigen::MatrixXd P = linalg::psd_project_dense(smat(l, v.head(l.nsv)));
        v.head(l.nsv) = svec(l, P);
        for (int k = 0; k < l.nle; ++k) v(l.nsv + l.nf + k) = std::max(0.0, v(l.nsv + l.nf + k));
        return v;
    };

    auto extract = [&]() {
        const Eigen::MatrixXd X = smat(l, z.head(l.nsv));
        Solution sol = unscale(p, s, X, z.segment(l.nsv, l.nf), rho * w);
        for (int i = 0; i < m; ++i)
            if (le_slot[i] >= 0) sol.dual(s.source_row[i]) = std::max(0.0, sol.dual(s.source_row[i]));
        return sol;
    };

    Solution best;
    double best_worst = std::numeric_limits<double>::infinity();
    bool have_best = false;
    const double bnorm = s.b.norm();
    const double qnorm = q.norm();
    constexpr int kCheckEvery = 25;
    constexpr int kVerifyEvery = 500;
    int it = 0;
    for (; it < cfg.max_iter; ++it) {
        const Eigen::VectorXd v = z - u - q / rho;
        w = chol.solve(apply(v) - s.b);
        x = v - apply_t(w);
        const Eigen::VectorXd xh = alpha * x + (1.0 - alpha) * z;
        const Eigen::VectorXd z_prev = z;
        z = project(xh + u);
        u += xh - z;

        if ((it + 1) % kCheckEvery != 0) continue;
        const double r_prim = (x - z).norm() / (1.0 + bnorm);
        const double r_dual = rho * (z - z_prev).norm() / (1.0 + qnorm);
        if (cfg.verbose && (it + 1) % 1000 == 0) {
            std::fprintf(stderr, "admm %6d  r_prim %.2e  r_dual %.2e  rho %.3e\n", it + 1, r_prim, r_dual, rho);
        }
        if ((it + 1) % kVerifyEvery == 0 || std::max(r_prim, r_dual) < 0.1 * cfg.tol) {
            Solution sol = extract();
            sol.iterations = it + 1;
            finalize(p, cfg, sol, true);
            const double worst = std::max({sol.primal_res, sol.dual_res, std::abs(sol.gap)});
            if (!have_best || worst < best_worst) {
                best_worst = worst;
                best = std::move(sol);
                have_best = true;
            }
            if (best.status == Status::optimal) return best;
        }
        // Rebalance the penalty.
        if (r_prim > 10.0 * r_dual || r_dual > 10.0 * r_prim) {
            const double ratio = std::sqrt(std::max(r_prim, 1e-300) / std::max(r_dual, 1e-300));
            const double next = std::clamp(rho * ratio, 1e-6, 1e6);
            u *= rho / next;
            rho = next;
        }
    }
    Solution sol = extract();
    sol.iterations = it;
    finalize(p, cfg, sol, false);
    const double worst = std::max({sol.primal_res, sol.dual_res, std::abs(sol.gap)});
    if (!have_best || worst < best_worst) best = std::move(sol);
    if (best.status != Status::optimal) best.status = Status::max_iter;
    if (s.inconsistent) best.status = Status::infeasible_suspect;
    return best;
}

} // namespace cdpep::sdp::detail
