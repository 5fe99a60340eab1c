#include "cdpep/sdp.hpp"

#include "sdp_detail.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace cdpep::sdp {

SparseSym::SparseSym(std::vector<SymEntry> entries) {
    for (auto& e : entries) {
        if (e.row < e.col) std::swap(e.row, e.col);
        if (e.col < 0) throw std::invalid_argument("SparseSym: negative index");
    }
    std::sort(entries.begin(), entries.end(), [](const SymEntry& a, const SymEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const auto& e : entries) {
        if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
            entries_.back().value += e.value;
        } else {
            entries_.push_back(e);
        }
    }
    std::erase_if(entries_, [](const SymEntry& e) { return e.value == 0.0; });
}

double SparseSym::dot(const Eigen::MatrixXd& x) const {
    double s = 0.0;
    for (const auto& e : entries_) {
        s += e.row == e.col ? e.value * x(e.row, e.row) : e.value * (x(e.row, e.col) + x(e.col, e.row));
    }
    return s;
}

void SparseSym::add_to(Eigen::MatrixXd& acc, double scale) const {
    for (const auto& e : entries_) {
        acc(e.row, e.col) += scale * e.value;
        if (e.row != e.col) acc(e.col, e.row) += scale * e.value;
    }
}

double SparseSym::frobenius_norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    return std::sqrt(s);
}

linalg::SymMatrix SparseSym::to_sym(int dim) const {
    linalg::SymMatrix m(dim);
    for (const auto& e : entries_) {
        if (e.row >= dim) throw std::invalid_argument("SparseSym::to_sym: index out of range");
        m.set(e.row, e.col, e.value);
    }
    return m;
}

SparseSym SparseSym::from_sym(const linalg::SymMatrix& m, double drop_tol) {
    std::vector<SymEntry> es;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j <= i; ++j)
            if (std::abs(m(i, j)) > drop_tol) es.push_back({i, j, m(i, j)});
    return SparseSym(std::move(es));
}

bool operator==(const SparseSym& a, const SparseSym& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t k = 0; k < a.entries_.size(); ++k) {
        const auto& x = a.entries_[k];
        const auto& y = b.entries_[k];
        if (x.row != y.row || x.col != y.col || x.value != y.value) return false;
    }
    return true;
}

namespace {

void check_matrix(const SparseSym& s, int dim, const std::string& what) {
    for (const auto& e : s.entries()) {
        if (e.row >= dim) {
            throw std::invalid_argument(fmt::format("{}: index ({}, {}) outside psd_dim {}", what, e.row, e.col, dim));
        }
        if (!std::isfinite(e.value)) throw std::invalid_argument(fmt::format("{}: non-finite coefficient", what));
    }
}

} // namespace

void ConicProblem::validate() const {
    if (psd_dim < 1) throw std::invalid_argument("ConicProblem: psd_dim must be positive");
    if (num_free < 0) throw std::invalid_argument("ConicProblem: num_free must be nonnegative");
    check_matrix(objective.coeff_x, psd_dim, "objective");
    if (objective.coeff_y.size() != num_free) {
        throw std::invalid_argument(fmt::format("objective: coeff_y has length {}, expected {}",
                                                objective.coeff_y.size(), num_free));
    }
    if (!objective.coeff_y.allFinite() || !std::isfinite(objective.constant)) {
        throw std::invalid_argument("objective: non-finite coefficient");
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const auto& c = constraints[i];
        const auto what = fmt::format("constraint {}", i);
        check_matrix(c.coeff_x, psd_dim, what);
        if (c.coeff_y.size() != num_free) {
            throw std::invalid_argument(fmt::format("{}: coeff_y has length {}, expected {}", what, c.coeff_y.size(),
                                                    num_free));
        }
        if (!c.coeff_y.allFinite() || !std::isfinite(c.rhs)) {
            throw std::invalid_argument(fmt::format("{}: non-finite data", what));
        }
    }
}

std::string_view to_string(Status s) {
    switch (s) {
    case Status::optimal: return "optimal";
    case Status::inaccurate: return "inaccurate";
    case Status::max_iter: return "max_iter";
    case Status::infeasible_suspect: return "infeasible_suspect";
    }
    return "unknown";
}

std::string_view to_string(Algorithm a) { return a == Algorithm::ipm ? "ipm" : "admm"; }

double Residuals::worst() const { return std::max({primal_res, dual_res, std::abs(gap)}); }

Residuals residuals(const ConicProblem& p, const Solution& s) {
    if (s.X.dim() != p.psd_dim || s.y.size() != p.num_free ||
        s.dual.size() != static_cast<Eigen::Index>(p.constraints.size())) {
        throw std::invalid_argument("residuals: solution dimensions do not match the problem");
    }
    const double sign = p.objective.sense == ObjectiveSense::maximize ? 1.0 : -1.0;
    const Eigen::MatrixXd X = s.X.to_dense();

    double viol2 = 0.0;
    double b2 = 0.0;
    double lam_neg2 = 0.0;
    double dual_obj = 0.0;
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(p.psd_dim, p.psd_dim);
    Eigen::VectorXd ylin = Eigen::VectorXd::Zero(p.num_free);
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const auto& c = p.constraints[i];
        const double lhs = c.coeff_x.dot(X) + c.coeff_y.dot(s.y);
        const double r = lhs - c.rhs;
        const double v = c.sense == Sense::eq ? r : std::max(r, 0.0);
        viol2 += v * v;
        b2 += c.rhs * c.rhs;
        const double lam = s.dual(static_cast<Eigen::Index>(i));
        if (c.sense == Sense::le && lam < 0.0) lam_neg2 += lam * lam;
        c.coeff_x.add_to(Z, lam);
        ylin += lam * c.coeff_y;
        dual_obj += lam * c.rhs;
    }
    p.objective.coeff_x.add_to(Z, -sign);
    ylin -= sign * p.objective.coeff_y;

    const double x_norm = X.norm();
    const double x_psd_viol = std::max(0.0, -linalg::min_eigenvalue_dense(X));
    const double z_psd_viol = std::max(0.0, -linalg::min_eigenvalue_dense(Z));
    const double c_norm = p.objective.coeff_x.frobenius_norm() + p.objective.coeff_y.norm();

    Residuals res;
    res.primal_res = std::max(std::sqrt(viol2) / (1.0 + std::sqrt(b2)), x_psd_viol / (1.0 + x_norm));
    res.dual_res = std::max({z_psd_viol, ylin.norm(), std::sqrt(lam_neg2)}) / (1.0 + c_norm);
    const double pobj = sign * (p.objective.coeff_x.dot(X) + p.objective.coeff_y.dot(s.y));
    res.gap = (dual_obj - pobj) / (1.0 + std::abs(pobj) + std::abs(dual_obj));
    res.primal_objective = sign * pobj + p.objective.constant;
    res.dual_objective = sign * dual_obj + p.objective.constant;
    return res;
}

Solution solve(const ConicProblem& p, const SolverConfig& cfg) {
    p.validate();
    if (p.constraints.empty() && p.objective.coeff_x.empty() && p.objective.coeff_y.size() == 0) {
        throw std::invalid_argument("solve: structurally empty problem");
    }
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("solve: tolerance must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol = cfg.algorithm == Algorithm::ipm ? detail::solve_ipm(p, cfg) : detail::solve_admm(p, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    sol.solve_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return sol;
}

namespace detail {

namespace {

// Least-norm correction of (X, y) onto the rows that are violated. Interior
// methods drift off the affine set when the feasible region has no interior;
// the small negative eigenvalue this may introduce is judged by residuals().
Solution project_primal(const ConicProblem& p, const Solution& sol) {
    const Eigen::MatrixXd X = sol.X.to_dense();
    std::vector<Eigen::MatrixXd> Ai;
    std::vector<const Constraint*> rows;
    std::vector<double> rhs;
    for (const auto& c : p.constraints) {
        const double r = c.coeff_x.dot(X) + c.coeff_y.dot(sol.y) - c.rhs;
        if (c.sense == Sense::le && r <= 0.0) continue;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p.psd_dim, p.psd_dim);
        c.coeff_x.add_to(A, 1.0);
        Ai.push_back(std::move(A));
        rows.push_back(&c);
        rhs.push_back(-r);
    }
    Solution out = sol;
    if (rows.empty()) return out;
    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd M(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            M(i, j) = M(j, i) = Ai[i].cwiseProduct(Ai[j]).sum() + rows[i]->coeff_y.dot(rows[j]->coeff_y);
        }
    }
    const Eigen::VectorXd w = M.completeOrthogonalDecomposition().solve(
        Eigen::Map<const Eigen::VectorXd>(rhs.data(), m));
    Eigen::MatrixXd dX = Eigen::MatrixXd::Zero(p.psd_dim, p.psd_dim);
    Eigen::VectorXd dy = Eigen::VectorXd::Zero(p.num_free);
    for (Eigen::Index i = 0; i < m; ++i) {
        dX += w(i) * Ai[i];
        dy += w(i) * rows[i]->coeff_y;
    }
    out.X = linalg::SymMatrix::from_dense(X + dX);
    out.y = sol.y + dy;
    return out;
}

} // namespace

void finalize(const ConicProblem& p, const SolverConfig& cfg, Solution& sol, bool converged) {
    Residuals r = residuals(p, sol);
    for (int pass = 0; pass < 2 && r.worst() > cfg.tol; ++pass) {
        Solution cand = project_primal(p, sol);
        const Residuals rc = residuals(p, cand);
        if (!(rc.worst() < r.worst())) break;
        sol = std::move(cand);
        r = rc;
    }
    sol.primal_res = r.primal_res;
    sol.dual_res = r.dual_res;
    sol.gap = r.gap;
    sol.objective = r.primal_objective;
    sol.dual_objective = r.dual_objective;
    if (r.worst() <= cfg.tol) {
        sol.status = Status::optimal;
    } else if (sol.status != Status::infeasible_suspect) {
        sol.status = converged ? Status::inaccurate : Status::max_iter;
    }
}

} // namespace detail

} // namespace cdpep::sdp
