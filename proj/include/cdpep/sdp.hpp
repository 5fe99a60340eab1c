#pragma once

#include "cdpep/symmat.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cdpep::sdp {

/// One entry of a symmetric coefficient matrix; `row >= col`.
/// The entry stands for both (row, col) and (col, row).
struct SymEntry {
    int row;
    int col;
    double value;
};

/// Sparse symmetric coefficient matrix (lower triangle, sorted, no duplicates).
class SparseSym {
public:
    SparseSym() = default;
    explicit SparseSym(std::vector<SymEntry> entries);

    const std::vector<SymEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t nnz() const { return entries_.size(); }

    /// <this, X> with the Frobenius inner product.
    double dot(const Eigen::MatrixXd& x) const;
    /// acc += scale * this
    void add_to(Eigen::MatrixXd& acc, double scale) const;
    double frobenius_norm() const;
    linalg::SymMatrix to_sym(int dim) const;
    static SparseSym from_sym(const linalg::SymMatrix& m, double drop_tol = 0.0);

    friend bool operator==(const SparseSym& a, const SparseSym& b);

private:
    std::vector<SymEntry> entries_;
};

enum class Sense { eq, le };

struct Constraint {
    SparseSym coeff_x;
    Eigen::VectorXd coeff_y;
    double rhs = 0.0;
    Sense sense = Sense::le;
};

enum class ObjectiveSense { maximize, minimize };

struct Objective {
    SparseSym coeff_x;
    Eigen::VectorXd coeff_y;
    double constant = 0.0;
    ObjectiveSense sense = ObjectiveSense::maximize;
};

/// Standard-form SDP over one PSD block X and free scalars y:
///
///     opt  <C, X> + c^T y + constant
///     s.t. <A_i, X> + a_i^T y  (= | <=)  b_i,   X psd.
struct ConicProblem {
    int psd_dim = 0;
    int num_free = 0;
    Objective objective;
    std::vector<Constraint> constraints;

    /// Throws std::invalid_argument on inconsistent dimensions or non-finite data.
    void validate() const;
};

enum class Status { optimal, inaccurate, max_iter, infeasible_suspect };
std::string_view to_string(Status s);

enum class Algorithm { ipm, admm };
std::string_view to_string(Algorithm a);

struct SolverConfig {
    Algorithm algorithm = Algorithm::ipm;
    double tol = 1e-8;
    int max_iter = 200000;      // ADMM iteration cap
    int ipm_max_iter = 150;
    double relaxation = 1.6;    // ADMM over-relaxation
    double rho = 1.0;           // initial ADMM penalty
    bool equilibrate = true;
    bool verbose = false;
};

/// Solver output. `dual` holds the multipliers of the maximization form:
/// Z = sum_i dual_i A_i - C must be psd, sum_i dual_i a_i = c, dual_i >= 0
/// on inequality rows (for minimization problems C and c are negated).
struct Solution {
    linalg::SymMatrix X;
    Eigen::VectorXd y;
    Eigen::VectorXd dual;
    Status status = Status::max_iter;
    double objective = 0.0;
    double dual_objective = 0.0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double gap = 0.0;
    int iterations = 0;
    double solve_ms = 0.0;
};

struct Residuals {
    double primal_res = 0.0;
    double dual_res = 0.0;
    double gap = 0.0;  // signed, relative: (dual obj - primal obj) / (1 + |p| + |d|)
    double primal_objective = 0.0;
    double dual_objective = 0.0;

    double worst() const;
};

Solution solve(const ConicProblem& p, const SolverConfig& cfg = {});

/// Recomputes constraint violations and the duality gap from (X, y, dual)
/// alone, independently of any solver state.
Residuals residuals(const ConicProblem& p, const Solution& s);

// Debug dump in a self-describing text format; see sdp_io.cpp.
void write_problem(std::ostream& os, const ConicProblem& p);
ConicProblem read_problem(std::istream& is);

} // namespace cdpep::sdp
