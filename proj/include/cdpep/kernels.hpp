#pragma once

// Data-parallel inner loops. Each kernel has a serial reference
// implementation and an OpenMP one; both must agree to roundoff and the
// parallel one must be deterministic for a fixed input regardless of the
// thread count.

#include "cdpep/sdp.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace cdpep::kernels {

/// Constraint matrices preprocessed for Schur complement assembly.
class SchurPattern {
public:
    SchurPattern(std::span<const sdp::SparseSym> rows, int dim);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(rows_.size()); }

    struct Row {
        std::vector<int> cols;       // distinct indices touched by the row
        std::vector<sdp::SymEntry> entries;
        // entries with row/col replaced by positions within `cols`
        std::vector<sdp::SymEntry> local;
    };
    const Row& row(int i) const { return rows_[i]; }

private:
    int dim_;
    std::vector<Row> rows_;
};

/// M(i, j) = trace(A_i X A_j W) for symmetric X, W.
void schur_serial(const SchurPattern& pat, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                  Eigen::MatrixXd& M);
void schur_parallel(const SchurPattern& pat, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                    Eigen::MatrixXd& M);

/// (<A_i, X>)_i
void apply_serial(std::span<const sdp::SparseSym> rows, const Eigen::MatrixXd& X, Eigen::VectorXd& out);
void apply_parallel(std::span<const sdp::SparseSym> rows, const Eigen::MatrixXd& X, Eigen::VectorXd& out);

/// Exact expectation of f(x^N) for randomized coordinate descent on
/// f(x) = x^T A x / 2 - b^T x, averaging over all n^N index sequences.
double rcd_expectation_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                              std::span<const double> steps);
double rcd_expectation_parallel(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                                std::span<const double> steps);

int max_threads();
/// Caps the team size of parallel regions started from the calling thread.
void set_thread_limit(int threads);

} // namespace cdpep::kernels
