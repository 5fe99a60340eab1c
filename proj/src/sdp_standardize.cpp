#include "sdp_detail.hpp"

#include <algorithm>
#include <cmath>

namespace cdpep::sdp::detail {

int Standardized::m_le() const { return static_cast<int>(std::count(is_le.begin(), is_le.end(), 1)); }

double sparse_dot(const SparseSym& a, const SparseSym& b) {
    const auto& x = a.entries();
    const auto& y = b.entries();
    std::size_t i = 0, j = 0;
    double s = 0.0;
    while (i < x.size() && j < y.size()) {
        if (x[i].row == y[j].row && x[i].col == y[j].col) {
            s += (x[i].row == x[i].col ? 1.0 : 2.0) * x[i].value * y[j].value;
            ++i;
            ++j;
        } else if (x[i].row < y[j].row || (x[i].row == y[j].row && x[i].col < y[j].col)) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

namespace {

// Greedy pivoted Cholesky on the Gram matrix of the equality rows; rows whose
// pivot falls below `tol` are linear combinations of earlier pivots.
std::vector<char> independent_rows(const Eigen::MatrixXd& gram, double tol) {
    const auto m = gram.rows();
    std::vector<char> keep(static_cast<std::size_t>(m), 0);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd d = gram.diagonal();
    std::vector<Eigen::Index> piv;
    std::vector<char> used(static_cast<std::size_t>(m), 0);
    const double scale = std::max(1.0, d.maxCoeff());
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::Index best = -1;
        for (Eigen::Index i = 0; i < m; ++i)
            if (!used[i] && (best < 0 || d(i) > d(best))) best = i;
        if (best < 0 || d(best) <= tol * scale) break;
        used[best] = 1;
        keep[best] = 1;
        const double root = std::sqrt(d(best));
        const auto col = static_cast<Eigen::Index>(piv.size());
        Eigen::VectorXd v = gram.col(best);
        if (col > 0) v.noalias() -= L.leftCols(col) * L.row(best).head(col).transpose();
        L.col(col) = v / root;
        for (Eigen::Index i = 0; i < m; ++i)
            if (!used[i]) d(i) -= L(i, col) * L(i, col);
        piv.push_back(best);
    }
    return keep;
}

} // namespace

Standardized standardize(const ConicProblem& p, bool equilibrate) {
    Standardized s;
    s.n = p.psd_dim;
    s.nf = p.num_free;
    const double sign = p.objective.sense == ObjectiveSense::maximize ? 1.0 : -1.0;

    // Drop empty rows (0 <= b or 0 = b); inconsistent ones make the problem infeasible.
    std::vector<int> rows;
    for (int i = 0; i < static_cast<int>(p.constraints.size()); ++i) {
        const auto& c = p.constraints[i];
        if (c.coeff_x.empty() && c.coeff_y.isZero(0.0)) {
            const bool ok = c.sense == Sense::eq ? std::abs(c.rhs) <= 1e-12 : c.rhs >= -1e-12;
            if (!ok) s.inconsistent = true;
            continue;
        }
        rows.push_back(i);
    }

    auto row_norm = [&](int i) {
        const auto& c = p.constraints[i];
        return std::sqrt(std::pow(c.coeff_x.frobenius_norm(), 2) + c.coeff_y.squaredNorm());
    };

    // Dependent equality rows.
    std::vector<int> eq_rows;
    for (int i : rows)
        if (p.constraints[i].sense == Sense::eq) eq_rows.push_back(i);
    std::vector<char> drop(p.constraints.size(), 0);
    if (eq_rows.size() > 1) {
        const auto me = static_cast<Eigen::Index>(eq_rows.size());
        Eigen::MatrixXd gram(me, me);
        Eigen::VectorXd inv(me);
        for (Eigen::Index a = 0; a < me; ++a) inv(a) = 1.0 / row_norm(eq_rows[a]);
        for (Eigen::Index a = 0; a < me; ++a)
            for (Eigen::Index c = 0; c <= a; ++c) {
                const auto& ra = p.constraints[eq_rows[a]];
                const auto& rc = p.constraints[eq_rows[c]];
                const double v = (sparse_dot(ra.coeff_x, rc.coeff_x) + ra.coeff_y.dot(rc.coeff_y)) * inv(a) * inv(c);
                gram(a, c) = gram(c, a) = v;
            }
        const auto keep = independent_rows(gram, 1e-11);
        std::vector<Eigen::Index> kept, dropped;
        for (Eigen::Index a = 0; a < me; ++a) (keep[a] ? kept : dropped).push_back(a);
        if (!dropped.empty()) {
            // A dropped row must be consistent with the kept rows it depends on.
            const auto mk = static_cast<Eigen::Index>(kept.size());
            Eigen::MatrixXd gk(mk, mk);
            Eigen::VectorXd bk(mk);
            for (Eigen::Index a = 0; a < mk; ++a) {
                for (Eigen::Index c = 0; c < mk; ++c) gk(a, c) = gram(kept[a], kept[c]);
                bk(a) = p.constraints[eq_rows[kept[a]]].rhs * inv(kept[a]);
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gk);
            for (Eigen::Index r : dropped) {
                Eigen::VectorXd g(mk);
                for (Eigen::Index a = 0; a < mk; ++a) g(a) = gram(kept[a], r);
                const Eigen::VectorXd w = ldlt.solve(g);
                const double br = p.constraints[eq_rows[r]].rhs * inv(r);
                if (std::abs(br - w.dot(bk)) > 1e-8 * (1.0 + std::abs(br))) s.inconsistent = true;
                drop[eq_rows[r]] = 1;
            }
        }
    }

    for (int i : rows) {
        if (drop[i]) continue;
        const auto& c = p.constraints[i];
        const double scale = equilibrate ? 1.0 / row_norm(i) : 1.0;
        std::vector<SymEntry> es = c.coeff_x.entries();
        for (auto& e : es) e.value *= scale;
        s.A.emplace_back(std::move(es));
        s.source_row.push_back(i);
        s.is_le.push_back(c.sense == Sense::le ? 1 : 0);
    }
    const int m = s.m();
    s.Ay.resize(m, s.nf);
    s.b.resize(m);
    s.row_scale.resize(m);
    for (int k = 0; k < m; ++k) {
        const auto& c = p.constraints[s.source_row[k]];
        const double scale = equilibrate ? 1.0 / row_norm(s.source_row[k]) : 1.0;
        s.row_scale(k) = scale;
        s.Ay.row(k) = scale * c.coeff_y.transpose();
        s.b(k) = scale * c.rhs;
    }

    if (equilibrate) {
        const double bmax = s.b.size() > 0 ? s.b.cwiseAbs().maxCoeff() : 0.0;
        s.rhs_scale = bmax > 0.0 ? bmax : 1.0;
        const double cn = p.objective.coeff_x.frobenius_norm() + p.objective.coeff_y.norm();
        s.obj_scale = cn > 0.0 ? cn : 1.0;
    }
    s.b /= s.rhs_scale;
    std::vector<SymEntry> ce = p.objective.coeff_x.entries();
    for (auto& e : ce) e.value *= sign / s.obj_scale;
    s.C = SparseSym(std::move(ce));
    s.cy = sign * p.objective.coeff_y / s.obj_scale;
    return s;
}

Solution unscale(const ConicProblem& p, const Standardized& s, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& lambda) {
    Solution sol;
    sol.X = linalg::SymMatrix::from_dense(s.rhs_scale * X);
    sol.y = s.rhs_scale * y;
    sol.dual = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.constraints.size()));
    for (int k = 0; k < s.m(); ++k) sol.dual(s.source_row[k]) = s.obj_scale * s.row_scale(k) * lambda(k);
    return sol;
}

} // namespace cdpep::sdp::detail
