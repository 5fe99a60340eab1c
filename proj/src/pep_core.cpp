#include "cdpep/pep_core.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

namespace cdpep::pep {

GramBasis::GramBasis(const std::vector<std::string>& labels) {
    for (const auto& l : labels) add(l);
}

int GramBasis::add(const std::string& label) {
    const int pos = size();
    if (!index_.emplace(label, pos).second) {
        throw std::invalid_argument(fmt::format("GramBasis: duplicate label '{}'", label));
    }
    labels_.push_back(label);
    return pos;
}

int GramBasis::index(const std::string& label) const {
    const auto it = index_.find(label);
    if (it == index_.end()) throw std::out_of_range(fmt::format("GramBasis: unknown label '{}'", label));
    return it->second;
}

// ---------------------------------------------------------------- VecExpr

VecExpr VecExpr::unit(const GramBasis& basis, const std::string& label) { return unit(basis, basis.index(label)); }

VecExpr VecExpr::unit(const GramBasis& basis, int index) {
    if (index < 0 || index >= basis.size()) {
        throw std::out_of_range(fmt::format("VecExpr: index {} outside basis of size {}", index, basis.size()));
    }
    VecExpr v;
    v.basis_ = &basis;
    v.terms_[index] = 1.0;
    return v;
}

double VecExpr::coeff(int index) const {
    const auto it = terms_.find(index);
    return it == terms_.end() ? 0.0 : it->second;
}

const GramBasis* VecExpr::merge_basis(const VecExpr& o) const {
    if (basis_ && o.basis_ && basis_ != o.basis_) {
        throw std::invalid_argument("VecExpr: expressions belong to different bases (foreign label)");
    }
    return basis_ ? basis_ : o.basis_;
}

VecExpr& VecExpr::operator+=(const VecExpr& o) {
    basis_ = merge_basis(o);
    for (const auto& [k, c] : o.terms_) {
        const double v = (terms_[k] += c);
        if (v == 0.0) terms_.erase(k);
    }
    return *this;
}

VecExpr& VecExpr::operator-=(const VecExpr& o) {
    basis_ = merge_basis(o);
    for (const auto& [k, c] : o.terms_) {
        const double v = (terms_[k] -= c);
        if (v == 0.0) terms_.erase(k);
    }
    return *this;
}

VecExpr& VecExpr::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

Eigen::VectorXd VecExpr::dense() const {
    if (!basis_) return Eigen::VectorXd();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(basis_->size());
    for (const auto& [k, c] : terms_) v(k) = c;
    return v;
}

// --------------------------------------------------------------- QuadExpr

QuadExpr QuadExpr::fval(int index, double coeff) {
    QuadExpr q;
    if (index >= 0 && coeff != 0.0) q.fvals_[index] = coeff;
    return q;
}

QuadExpr QuadExpr::constant(double c) {
    QuadExpr q;
    q.constant_ = c;
    return q;
}

void QuadExpr::adopt_basis(const GramBasis* b) {
    if (!b) return;
    if (basis_ && basis_ != b) throw std::invalid_argument("QuadExpr: expressions belong to different bases");
    basis_ = b;
}

void QuadExpr::add_outer(const VecExpr& u, const VecExpr& v, double coeff) {
    if (u.basis() && v.basis() && u.basis() != v.basis()) {
        throw std::invalid_argument("inner: expressions belong to different bases (foreign label)");
    }
    adopt_basis(u.basis());
    adopt_basis(v.basis());
    for (const auto& [i, a] : u.terms())
        for (const auto& [j, b] : v.terms()) {
            // (u v^T + v u^T)/2 puts a*b/2 at (i,j) and at (j,i).
            const auto key = i >= j ? std::make_pair(i, j) : std::make_pair(j, i);
            const double add = i == j ? coeff * a * b : 0.5 * coeff * a * b;
            const double val = (gram_[key] += add);
            if (val == 0.0) gram_.erase(key);
        }
}

QuadExpr& QuadExpr::operator+=(const QuadExpr& o) {
    adopt_basis(o.basis_);
    for (const auto& [k, c] : o.gram_) {
        const double v = (gram_[k] += c);
        if (v == 0.0) gram_.erase(k);
    }
    for (const auto& [k, c] : o.fvals_) {
        const double v = (fvals_[k] += c);
        if (v == 0.0) fvals_.erase(k);
    }
    constant_ += o.constant_;
    return *this;
}

QuadExpr& QuadExpr::operator-=(const QuadExpr& o) { return *this += o * -1.0; }

QuadExpr& QuadExpr::operator*=(double s) {
    if (s == 0.0) {
        gram_.clear();
        fvals_.clear();
        constant_ = 0.0;
        return *this;
    }
    for (auto& [k, c] : gram_) c *= s;
    for (auto& [k, c] : fvals_) c *= s;
    constant_ *= s;
    return *this;
}

void QuadExpr::prune(double tol) {
    std::erase_if(gram_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
    std::erase_if(fvals_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
    if (std::abs(constant_) <= tol) constant_ = 0.0;
}

double QuadExpr::evaluate(const Eigen::MatrixXd& gram, const Eigen::VectorXd& fvals) const {
    double s = constant_;
    for (const auto& [k, c] : gram_) {
        const auto [i, j] = k;
        s += i == j ? c * gram(i, i) : c * (gram(i, j) + gram(j, i));
    }
    for (const auto& [k, c] : fvals_) s += c * fvals(k);
    return s;
}

Eigen::MatrixXd QuadExpr::gram_matrix(int dim) const {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& [k, c] : gram_) {
        q(k.first, k.second) = c;
        q(k.second, k.first) = c;
    }
    return q;
}

QuadExpr inner(const VecExpr& u, const VecExpr& v) {
    QuadExpr q;
    q.add_outer(u, v, 1.0);
    return q;
}

// --------------------------------------------------------------- CoordVec

namespace {

void same_size(const CoordVec& a, const CoordVec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(fmt::format("coordinate count mismatch ({} vs {})", a.size(), b.size()));
    }
}

} // namespace

CoordVec operator+(const CoordVec& a, const CoordVec& b) {
    same_size(a, b);
    CoordVec r(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) r[c] = a[c] + b[c];
    return r;
}

CoordVec operator-(const CoordVec& a, const CoordVec& b) {
    same_size(a, b);
    CoordVec r(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) r[c] = a[c] - b[c];
    return r;
}

CoordVec operator*(double s, const CoordVec& a) {
    CoordVec r(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) r[c] = s * a[c];
    return r;
}

QuadExpr inner(const CoordVec& u, const CoordVec& v) {
    same_size(u, v);
    QuadExpr q;
    for (std::size_t c = 0; c < u.size(); ++c) q.add_outer(u[c], v[c], 1.0);
    return q;
}

CoordVec zero_vec(int coords) { return CoordVec(static_cast<std::size_t>(coords)); }

QuadExpr PointData::f() const { return QuadExpr::fval(fval); }

// ------------------------------------------------------------- generators

QuadExpr interp_ineq(const PointData& i, const PointData& j, double mu, double L) {
    if (!(L > 0.0)) throw std::invalid_argument(fmt::format("interp_ineq: L must be positive, got {}", L));
    if (!(mu >= 0.0)) throw std::invalid_argument(fmt::format("interp_ineq: mu must be nonnegative, got {}", mu));
    if (mu >= L) throw std::invalid_argument(fmt::format("interp_ineq: need mu < L (mu = {}, L = {})", mu, L));
    const CoordVec dg = i.grad - j.grad;
    const CoordVec dx = i.point - j.point;
    const double pre = 1.0 / (2.0 * (1.0 - mu / L));
    // <g_j - g_i, x_j - x_i> = <dg, dx>
    QuadExpr q = pre * ((1.0 / L) * inner(dg, dg) + mu * inner(dx, dx) - (2.0 * mu / L) * inner(dg, dx));
    q -= i.f() - j.f() - inner(j.grad, dx);
    q.prune();
    return q;
}

QuadExpr quad_eq(const PointData& i, const PointData& j) {
    const CoordVec dg = i.grad - j.grad;
    const CoordVec dx = i.point - j.point;
    QuadExpr q = 0.5 * inner(dg, dx);
    q -= i.f() - j.f() - inner(j.grad, dx);
    q.prune();
    return q;
}

std::pair<QuadExpr, QuadExpr> coord_smooth_pair(const PointData& k, const PointData& k1, const VecExpr& grad_k,
                                                const VecExpr& grad_k1, const VecExpr& dx, double ell) {
    if (!(ell > 0.0)) throw std::invalid_argument(fmt::format("coord_smooth_pair: ell must be positive, got {}", ell));
    const VecExpr dg = grad_k - grad_k1;
    const QuadExpr sq = (1.0 / (2.0 * ell)) * inner(dg, dg);
    // f_k >= f_k1 + g_k1 (x_k - x_k1) + (g_k - g_k1)^2 / (2 ell)
    QuadExpr first = k1.f() - inner(grad_k1, dx) + sq - k.f();
    // f_k1 >= f_k + g_k (x_k1 - x_k) + (g_k1 - g_k)^2 / (2 ell)
    QuadExpr second = k.f() + inner(grad_k, dx) + sq - k1.f();
    first.prune();
    second.prune();
    return {first, second};
}

std::pair<QuadExpr, QuadExpr> descent_pair(const PointData& k, const PointData& k1, double ell) {
    if (!(ell > 0.0)) throw std::invalid_argument(fmt::format("descent_pair: ell must be positive, got {}", ell));
    const CoordVec step = k1.point - k.point;
    const QuadExpr sq = (0.5 * ell) * inner(step, step);
    QuadExpr forward = k1.f() - k.f() - inner(k.grad, step) - sq;
    QuadExpr backward = k.f() - k1.f() + inner(k1.grad, step) - sq;
    forward.prune();
    backward.prune();
    return {forward, backward};
}

// --------------------------------------------------------------- assembly

namespace {

sdp::Constraint compile(const GramBasis& basis, int num_fvals, const QuadExpr& e, sdp::Sense sense) {
    if (e.basis() && e.basis() != &basis) {
        throw std::invalid_argument("assemble: row compiled over a different basis");
    }
    std::vector<sdp::SymEntry> es;
    es.reserve(e.gram_part().size());
    for (const auto& [k, c] : e.gram_part()) {
        if (k.first >= basis.size()) throw std::invalid_argument("assemble: Gram index outside basis");
        es.push_back({k.first, k.second, c});
    }
    sdp::Constraint c;
    c.coeff_x = sdp::SparseSym(std::move(es));
    c.coeff_y = Eigen::VectorXd::Zero(num_fvals);
    for (const auto& [k, v] : e.fval_part()) {
        if (k >= num_fvals) {
            throw std::invalid_argument(fmt::format("assemble: function value {} outside {} variables", k, num_fvals));
        }
        c.coeff_y(k) = v;
    }
    c.rhs = -e.constant_part();
    c.sense = sense;
    return c;
}

std::string row_key(const sdp::Constraint& c) {
    std::string key;
    auto put = [&key](const void* p, std::size_t n) { key.append(static_cast<const char*>(p), n); };
    const char s = c.sense == sdp::Sense::eq ? 'e' : 'l';
    put(&s, 1);
    put(&c.rhs, sizeof(double));
    for (const auto& e : c.coeff_x.entries()) {
        put(&e.row, sizeof(int));
        put(&e.col, sizeof(int));
        put(&e.value, sizeof(double));
    }
    put(c.coeff_y.data(), sizeof(double) * static_cast<std::size_t>(c.coeff_y.size()));
    return key;
}

bool trivially_satisfied(const sdp::Constraint& c) {
    if (!c.coeff_x.empty() || !c.coeff_y.isZero(0.0)) return false;
    const bool ok = c.sense == sdp::Sense::eq ? c.rhs == 0.0 : c.rhs >= 0.0;
    if (!ok) throw std::invalid_argument("assemble: constant row is violated");
    return true;
}

} // namespace

sdp::ConicProblem assemble(const GramBasis& basis, int num_fvals, const std::vector<Row>& rows,
                           const QuadExpr& objective) {
    if (basis.size() < 1) throw std::invalid_argument("assemble: empty basis");
    sdp::ConicProblem p;
    p.psd_dim = basis.size();
    p.num_free = num_fvals;
    const auto obj = compile(basis, num_fvals, objective, sdp::Sense::eq);
    p.objective.coeff_x = obj.coeff_x;
    p.objective.coeff_y = obj.coeff_y;
    p.objective.constant = objective.constant_part();
    p.objective.sense = sdp::ObjectiveSense::maximize;

    std::unordered_set<std::string> seen;
    for (const auto& r : rows) {
        auto c = compile(basis, num_fvals, r.expr, r.sense);
        if (trivially_satisfied(c)) continue;
        if (!seen.insert(row_key(c)).second) continue;
        p.constraints.push_back(std::move(c));
    }
    p.validate();
    return p;
}

std::map<std::string, int> family_counts(const GramBasis& basis, int num_fvals, const std::vector<Row>& rows) {
    std::map<std::string, int> counts;
    std::unordered_set<std::string> seen;
    for (const auto& r : rows) {
        auto c = compile(basis, num_fvals, r.expr, r.sense);
        if (trivially_satisfied(c)) continue;
        if (!seen.insert(row_key(c)).second) continue;
        ++counts[r.family];
    }
    return counts;
}

} // namespace cdpep::pep
