#include "cdpep/symmat.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace cdpep::linalg {

SymMatrix::SymMatrix(int dim) : dim_(dim) {
    if (dim < 1) {
        throw std::invalid_argument(fmt::format("SymMatrix: dimension must be positive, got {}", dim));
    }
    data_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
}

std::size_t SymMatrix::offset(int i, int j) const {
    if (i < j) std::swap(i, j);
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& diag) {
    SymMatrix m(static_cast<int>(diag.size()));
    for (int i = 0; i < m.dim(); ++i) m.set(i, i, diag[i]);
    return m;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("SymMatrix::from_dense: matrix is not square");
    }
    SymMatrix m(static_cast<int>(a.rows()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j <= i; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    return m;
}

Eigen::MatrixXd SymMatrix::to_dense() const {
    Eigen::MatrixXd a(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = (*this)(i, j);
    return a;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = (*this)(i, j);
            s += (i == j ? 1.0 : 2.0) * v * v;
        }
    return std::sqrt(s);
}

bool SymMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("SymMatrix: dimension mismatch in +=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("SymMatrix: dimension mismatch in -=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

EigenDecomposition sym_eigen_dense(const Eigen::MatrixXd& a) {
    if (!a.allFinite()) {
        throw std::invalid_argument("sym_eigen: matrix has non-finite entries");
    }
    // Householder tridiagonalization followed by implicit symmetric QR.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) {
        throw NumericalError(fmt::format("sym_eigen: QR iteration did not converge (||A||_F = {:.6e})", a.norm()));
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

EigenDecomposition sym_eigen(const SymMatrix& a) { return sym_eigen_dense(a.to_dense()); }

Eigen::MatrixXd psd_project_dense(const Eigen::MatrixXd& a) {
    const auto ed = sym_eigen_dense(a);
    const Eigen::VectorXd clipped = ed.values.cwiseMax(0.0);
    Eigen::MatrixXd p = ed.vectors * clipped.asDiagonal() * ed.vectors.transpose();
    return 0.5 * (p + p.transpose());
}

SymMatrix psd_project(const SymMatrix& a) { return SymMatrix::from_dense(psd_project_dense(a.to_dense())); }

double frob_inner(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(fmt::format("frob_inner: dimension mismatch ({} vs {})", a.dim(), b.dim()));
    }
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j <= i; ++j) s += (i == j ? 1.0 : 2.0) * a(i, j) * b(i, j);
    return s;
}

double min_eigenvalue_dense(const Eigen::MatrixXd& a) {
    if (!a.allFinite()) throw std::invalid_argument("min_eigenvalue: matrix has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError(fmt::format("min_eigenvalue: QR iteration did not converge (||A||_F = {:.6e})", a.norm()));
    }
    return es.eigenvalues()(0);
}

double min_eigenvalue(const SymMatrix& a) { return min_eigenvalue_dense(a.to_dense()); }

} // namespace cdpep::linalg
