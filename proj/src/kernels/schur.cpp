#include "cdpep/kernels.hpp"

#include <algorithm>
#include <unordered_map>

#ifdef CDPEP_HAVE_OPENMP
#include <omp.h>
#endif

namespace cdpep::kernels {

int max_threads() {
#ifdef CDPEP_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_thread_limit(int threads) {
#ifdef CDPEP_HAVE_OPENMP
    omp_set_num_threads(std::max(1, threads));
#else
    (void)threads;
#endif
}

SchurPattern::SchurPattern(std::span<const sdp::SparseSym> rows, int dim) : dim_(dim) {
    rows_.reserve(rows.size());
    for (const auto& r : rows) {
        Row row;
        row.entries = r.entries();
        for (const auto& e : row.entries) {
            row.cols.push_back(e.row);
            row.cols.push_back(e.col);
        }
        std::sort(row.cols.begin(), row.cols.end());
        row.cols.erase(std::unique(row.cols.begin(), row.cols.end()), row.cols.end());
        std::unordered_map<int, int> pos;
        for (int k = 0; k < static_cast<int>(row.cols.size()); ++k) pos[row.cols[k]] = k;
        row.local.reserve(row.entries.size());
        for (const auto& e : row.entries) row.local.push_back({pos[e.row], pos[e.col], e.value});
        rows_.push_back(std::move(row));
    }
}

namespace {

// Fills M(i, j) and M(j, i) for all j >= i. T and B are scratch buffers.
void schur_row(const SchurPattern& pat, int i, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
               Eigen::MatrixXd& T, Eigen::MatrixXd& Wc, Eigen::MatrixXd& B, Eigen::MatrixXd& M) {
    const auto& ri = pat.row(i);
    const int n = pat.dim();
    const int c = static_cast<int>(ri.cols.size());
    if (c == 0) {
        for (int j = i; j < pat.size(); ++j) M(i, j) = M(j, i) = 0.0;
        return;
    }
    // T = X A_i restricted to the columns A_i touches.
    T.setZero(n, c);
    for (std::size_t k = 0; k < ri.entries.size(); ++k) {
        const auto& g = ri.entries[k];
        const auto& l = ri.local[k];
        if (g.row == g.col) {
            T.col(l.row) += g.value * X.col(g.row);
        } else {
            T.col(l.col) += g.value * X.col(g.row);
            T.col(l.row) += g.value * X.col(g.col);
        }
    }
    Wc.resize(c, n);
    for (int k = 0; k < c; ++k) Wc.row(k) = W.row(ri.cols[k]);
    B.noalias() = T * Wc;  // = X A_i W

    for (int j = i; j < pat.size(); ++j) {
        double s = 0.0;
        for (const auto& e : pat.row(j).entries) {
            s += e.row == e.col ? e.value * B(e.row, e.row) : e.value * (B(e.row, e.col) + B(e.col, e.row));
        }
        M(i, j) = s;
        M(j, i) = s;
    }
}

} // namespace

void schur_serial(const SchurPattern& pat, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W, Eigen::MatrixXd& M) {
    M.resize(pat.size(), pat.size());
    Eigen::MatrixXd T, Wc, B;
    for (int i = 0; i < pat.size(); ++i) schur_row(pat, i, X, W, T, Wc, B, M);
}

void schur_parallel(const SchurPattern& pat, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                    Eigen::MatrixXd& M) {
    M.resize(pat.size(), pat.size());
    const int m = pat.size();
#pragma omp parallel
    {
        Eigen::MatrixXd T, Wc, B;
#pragma omp for schedule(dynamic, 8)
        for (int i = 0; i < m; ++i) schur_row(pat, i, X, W, T, Wc, B, M);
    }
}

void apply_serial(std::span<const sdp::SparseSym> rows, const Eigen::MatrixXd& X, Eigen::VectorXd& out) {
    out.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = rows[i].dot(X);
}

void apply_parallel(std::span<const sdp::SparseSym> rows, const Eigen::MatrixXd& X, Eigen::VectorXd& out) {
    const auto m = static_cast<long>(rows.size());
    out.resize(m);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < m; ++i) out(i) = rows[static_cast<std::size_t>(i)].dot(X);
}

} // namespace cdpep::kernels
