#pragma once

#include "cdpep/sdp.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cdpep::sdp::detail {

/// Maximization form with row equilibration and dependent equality rows removed.
///
///     max <C, X> + c^T y   s.t.  <A_i, X> + a_i^T y + [le] s_i = b_i,  X psd, s >= 0
struct Standardized {
    int n = 0;
    int nf = 0;
    std::vector<SparseSym> A;
    Eigen::MatrixXd Ay;           // m x nf
    Eigen::VectorXd b;
    std::vector<char> is_le;
    SparseSym C;
    Eigen::VectorXd cy;

    std::vector<int> source_row;  // index into the original constraints
    Eigen::VectorXd row_scale;    // A_i(scaled) = row_scale_i * A_i(original)
    double rhs_scale = 1.0;       // X(original) = rhs_scale * X(scaled)
    double obj_scale = 1.0;       // C(scaled) = C(max form) / obj_scale
    bool inconsistent = false;    // a dropped equality row contradicted the kept ones

    int m() const { return static_cast<int>(A.size()); }
    int m_le() const;
};

Standardized standardize(const ConicProblem& p, bool equilibrate);

/// Maps a scaled iterate back to the original problem.
Solution unscale(const ConicProblem& p, const Standardized& s, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& lambda);

/// Fills residuals, objectives and status from `residuals()`.
void finalize(const ConicProblem& p, const SolverConfig& cfg, Solution& sol, bool converged);

Solution solve_ipm(const ConicProblem& p, const SolverConfig& cfg);
Solution solve_admm(const ConicProblem& p, const SolverConfig& cfg);

double sparse_dot(const SparseSym& a, const SparseSym& b);

} // namespace cdpep::sdp::detail
