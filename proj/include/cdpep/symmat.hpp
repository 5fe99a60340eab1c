#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdpep::linalg {

/// Thrown when an iterative numerical kernel fails to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense symmetric matrix stored as its packed lower triangle.
///
/// Only one triangle exists in memory, so symmetry holds by construction
/// no matter how many updates are applied.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int dim);

    static SymMatrix zero(int dim) { return SymMatrix(dim); }
    static SymMatrix identity(int dim);
    static SymMatrix diagonal(const std::vector<double>& diag);
    /// Symmetrizes `a` as (a + a^T) / 2.
    static SymMatrix from_dense(const Eigen::MatrixXd& a);

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return data_[offset(i, j)]; }
    void set(int i, int j, double v) { data_[offset(i, j)] = v; }
    void add(int i, int j, double v) { data_[offset(i, j)] += v; }

    Eigen::MatrixXd to_dense() const;
    double frobenius_norm() const;
    bool all_finite() const;

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    SymMatrix& operator*=(double s);

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    SymMatrix operator-() const { return *this * -1.0; }

    const std::vector<double>& packed() const { return data_; }

private:
    std::size_t offset(int i, int j) const;

    int dim_ = 0;
    std::vector<double> data_;
};

struct EigenDecomposition {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns
};

EigenDecomposition sym_eigen(const SymMatrix& a);

/// Nearest positive semidefinite matrix in Frobenius norm.
SymMatrix psd_project(const SymMatrix& a);

double frob_inner(const SymMatrix& a, const SymMatrix& b);

double min_eigenvalue(const SymMatrix& a);

// Dense helpers used by the solvers on their working matrices.
EigenDecomposition sym_eigen_dense(const Eigen::MatrixXd& a);
Eigen::MatrixXd psd_project_dense(const Eigen::MatrixXd& a);
double min_eigenvalue_dense(const Eigen::MatrixXd& a);

} // namespace cdpep::linalg
