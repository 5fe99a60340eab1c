#pragma once

// Symbolic layer for performance-estimation problems: unknown vectors are
// linear forms over a basis of labels, quadratic quantities are linear
// functionals of the Gram (moment) matrix of that basis.

#include "cdpep/sdp.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cdpep::pep {

class GramBasis {
public:
    GramBasis() = default;
    explicit GramBasis(const std::vector<std::string>& labels);

    /// Appends a label; throws on duplicates.
    int add(const std::string& label);
    /// Position of a label; throws std::out_of_range for unknown labels.
    int index(const std::string& label) const;
    bool contains(const std::string& label) const { return index_.count(label) != 0; }
    const std::string& label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }
    int size() const { return static_cast<int>(labels_.size()); }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
};

/// Linear combination of basis labels. An expression remembers the basis it
/// was created from; mixing bases is an error.
class VecExpr {
public:
    VecExpr() = default;  // the zero vector, compatible with every basis
    static VecExpr unit(const GramBasis& basis, const std::string& label);
    static VecExpr unit(const GramBasis& basis, int index);

    const std::map<int, double>& terms() const { return terms_; }
    const GramBasis* basis() const { return basis_; }
    bool is_zero() const { return terms_.empty(); }
    double coeff(int index) const;

    VecExpr& operator+=(const VecExpr& o);
    VecExpr& operator-=(const VecExpr& o);
    VecExpr& operator*=(double s);
    friend VecExpr operator+(VecExpr a, const VecExpr& b) { return a += b; }
    friend VecExpr operator-(VecExpr a, const VecExpr& b) { return a -= b; }
    friend VecExpr operator*(VecExpr a, double s) { return a *= s; }
    friend VecExpr operator*(double s, VecExpr a) { return a *= s; }
    VecExpr operator-() const { return *this * -1.0; }

    /// Coefficient vector over the basis.
    Eigen::VectorXd dense() const;

private:
    const GramBasis* merge_basis(const VecExpr& o) const;

    const GramBasis* basis_ = nullptr;
    std::map<int, double> terms_;
};

/// Quadratic functional: <Q, G> + f^T w + constant, where G is the Gram
/// matrix of the basis and w the function-value variables.
class QuadExpr {
public:
    QuadExpr() = default;

    static QuadExpr fval(int index, double coeff = 1.0);
    static QuadExpr constant(double c);

    /// Symmetric Gram coefficients, keyed by (row, col) with row >= col.
    const std::map<std::pair<int, int>, double>& gram_part() const { return gram_; }
    const std::map<int, double>& fval_part() const { return fvals_; }
    double constant_part() const { return constant_; }
    const GramBasis* basis() const { return basis_; }

    /// Adds coeff * (u v^T + v u^T) / 2 to the Gram part.
    void add_outer(const VecExpr& u, const VecExpr& v, double coeff);

    QuadExpr& operator+=(const QuadExpr& o);
    QuadExpr& operator-=(const QuadExpr& o);
    QuadExpr& operator*=(double s);
    friend QuadExpr operator+(QuadExpr a, const QuadExpr& b) { return a += b; }
    friend QuadExpr operator-(QuadExpr a, const QuadExpr& b) { return a -= b; }
    friend QuadExpr operator*(QuadExpr a, double s) { return a *= s; }
    friend QuadExpr operator*(double s, QuadExpr a) { return a *= s; }

    /// Drops coefficients with magnitude <= tol.
    void prune(double tol = 0.0);
    bool is_zero() const { return gram_.empty() && fvals_.empty() && constant_ == 0.0; }

    double evaluate(const Eigen::MatrixXd& gram, const Eigen::VectorXd& fvals) const;
    /// Dense symmetric Gram coefficient matrix of size dim.
    Eigen::MatrixXd gram_matrix(int dim) const;

private:
    void adopt_basis(const GramBasis* b);

    const GramBasis* basis_ = nullptr;
    std::map<std::pair<int, int>, double> gram_;
    std::map<int, double> fvals_;
    double constant_ = 0.0;
};

QuadExpr inner(const VecExpr& u, const VecExpr& v);

/// A vector of R^d given coordinate-wise. The abstract Gram lifting uses a
/// single coordinate; the Shor lifting uses one coordinate per dimension.
using CoordVec = std::vector<VecExpr>;

CoordVec operator+(const CoordVec& a, const CoordVec& b);
CoordVec operator-(const CoordVec& a, const CoordVec& b);
CoordVec operator*(double s, const CoordVec& a);
QuadExpr inner(const CoordVec& u, const CoordVec& v);
CoordVec zero_vec(int coords);

/// Triple (x, g, f) of an interpolation data set. `fval < 0` pins f to zero.
struct PointData {
    CoordVec point;
    CoordVec grad;
    int fval = -1;

    QuadExpr f() const;
};

/// Interpolation inequality of smooth (strongly) convex functions between
/// points i and j, returned as an expression constrained to be <= 0.
QuadExpr interp_ineq(const PointData& i, const PointData& j, double mu, double L);

/// Equality satisfied by quadratic functions at every pair of points
/// (constrained to be = 0).
QuadExpr quad_eq(const PointData& i, const PointData& j);

/// Two-point ell-smoothness of the univariate restriction along one
/// coordinate, for consecutive iterates k -> k1 that differ only there.
/// `dx` is the coordinate of x^{k1} - x^k. Both returned rows are <= 0.
std::pair<QuadExpr, QuadExpr> coord_smooth_pair(const PointData& k, const PointData& k1, const VecExpr& grad_k,
                                                const VecExpr& grad_k1, const VecExpr& dx, double ell);

/// Descent-lemma upper bounds in both directions between consecutive
/// iterates with smoothness constant ell along the displacement:
///   f1 <= f0 + <g0, x1 - x0> + ell/2 |x1 - x0|^2   (and symmetric). Both <= 0.
std::pair<QuadExpr, QuadExpr> descent_pair(const PointData& k, const PointData& k1, double ell);

struct Row {
    QuadExpr expr;
    sdp::Sense sense;  // expr <= 0 or expr = 0
    std::string family;
};

/// Compiles rows and a (maximized) objective into a ConicProblem over the
/// Gram matrix of `basis` and `num_fvals` function-value variables. Zero rows
/// and exact duplicates are dropped; row order is otherwise preserved.
sdp::ConicProblem assemble(const GramBasis& basis, int num_fvals, const std::vector<Row>& rows,
                           const QuadExpr& objective);

/// Counts of rows per family after assembly deduplication.
std::map<std::string, int> family_counts(const GramBasis& basis, int num_fvals, const std::vector<Row>& rows);

/// Generic result of a bound computation.
struct BoundResult {
    double value = 0.0;  // worst-case f(x^N) - f*, clamped at 0
    sdp::Solution solution;
    std::string params;  // echo of the parameter set
};

} // namespace cdpep::pep
