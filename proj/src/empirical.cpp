#include "cdpep/empirical.hpp"

#include "cdpep/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cdpep::empirical {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_steps(std::span<const double> steps, int N, const char* who) {
    require(N >= 0, fmt::format("{}: N must be nonnegative, got {}", who, N));
    require(static_cast<int>(steps.size()) == N,
            fmt::format("{}: expected {} step lengths, got {}", who, N, steps.size()));
}

} // namespace

QuadraticInstance::QuadraticInstance(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::VectorXd x0)
    : A_(std::move(A)), b_(std::move(b)), x0_(std::move(x0)) {
    const auto n = A_.rows();
    require(n >= 1 && A_.cols() == n, "QuadraticInstance: A must be square and nonempty");
    require(b_.size() == n && x0_.size() == n, "QuadraticInstance: dimension mismatch");
    require(A_.allFinite() && b_.allFinite() && x0_.allFinite(), "QuadraticInstance: non-finite data");
    const double scale = 1.0 + A_.norm();
    require((A_ - A_.transpose()).norm() <= 1e-12 * scale, "QuadraticInstance: A is not symmetric");
    A_ = 0.5 * (A_ + A_.transpose()).eval();
    for (Eigen::Index i = 0; i < n; ++i)
        require(A_(i, i) > 0.0, fmt::format("QuadraticInstance: diagonal entry {} is not positive", i));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_);
    const Eigen::VectorXd& lam = es.eigenvalues();
    require(lam(0) >= -1e-10 * scale, fmt::format("QuadraticInstance: A is not psd (min eigenvalue {})", lam(0)));
    lmax_ = lam(n - 1);
    const double cut = 1e-10 * std::max(1.0, lmax_);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    int nnull = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lam(i) > cut) {
            inv(i) = 1.0 / lam(i);
        } else {
            ++nnull;
        }
    }
    const Eigen::MatrixXd& Q = es.eigenvectors();
    xstar_ = Q * inv.asDiagonal() * (Q.transpose() * b_);
    require((A_ * xstar_ - b_).norm() <= 1e-8 * (1.0 + b_.norm()), "QuadraticInstance: b is not in the range of A");
    null_ = Q.leftCols(nnull);
    fstar_ = f(xstar_);
}

double QuadraticInstance::f(const Eigen::VectorXd& x) const { return 0.5 * x.dot(A_ * x) - b_.dot(x); }

double QuadraticInstance::lambda_max_scaled() const {
    const Eigen::VectorXd s = A_.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd B = s.asDiagonal() * A_ * s.asDiagonal();
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

double QuadraticInstance::distance2(const Eigen::VectorXd& x, Norm norm) const {
    require(x.size() == A_.rows(), "distance2: dimension mismatch");
    Eigen::VectorXd u = x - xstar_;
    if (null_.cols() == 0) {
        return norm == Norm::euclidean ? u.squaredNorm() : u.dot(A_.diagonal().asDiagonal() * u);
    }
    // Closest point of xstar + ker A in the chosen metric.
    if (norm == Norm::euclidean) {
        u -= null_ * (null_.transpose() * u);
        return u.squaredNorm();
    }
    const Eigen::VectorXd d = A_.diagonal();
    const Eigen::MatrixXd G = null_.transpose() * d.asDiagonal() * null_;
    const Eigen::VectorXd c = G.ldlt().solve(null_.transpose() * d.asDiagonal() * u);
    u -= null_ * c;
    return u.dot(d.asDiagonal() * u);
}

QuadraticInstance QuadraticInstance::with_start(Eigen::VectorXd x0) const {
    QuadraticInstance copy = *this;
    require(x0.size() == A_.rows(), "with_start: dimension mismatch");
    copy.x0_ = std::move(x0);
    return copy;
}

double run_rcd_exact(const QuadraticInstance& inst, std::span<const double> steps, int N, std::uint64_t cap) {
    check_steps(steps, N, "run_rcd_exact");
    std::uint64_t count = 1;
    for (int k = 0; k < N; ++k) {
        count *= static_cast<std::uint64_t>(inst.n());
        if (count > cap) {
            throw std::length_error(fmt::format(
                "run_rcd_exact: {}^{} index sequences exceed the enumeration cap {}", inst.n(), N, cap));
        }
    }
    return kernels::rcd_expectation_parallel(inst.A(), inst.b(), inst.x0(), steps) - inst.fstar();
}

McEstimate run_rcd_mc(const QuadraticInstance& inst, std::span<const double> steps, int N, int samples,
                      std::uint64_t seed) {
    check_steps(steps, N, "run_rcd_mc");
    require(samples >= 1, fmt::format("run_rcd_mc: samples must be positive, got {}", samples));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, inst.n() - 1);
    const Eigen::VectorXd g0 = inst.grad(inst.x0());
    double mean = 0.0, m2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd x = inst.x0();
        Eigen::VectorXd g = g0;
        for (int k = 0; k < N; ++k) {
            const int i = pick(rng);
            const double delta = -steps[k] * g(i);
            x(i) += delta;
            g += delta * inst.A().col(i);
        }
        // Welford update.
        const double v = inst.gap(x);
        const double d = v - mean;
        mean += d / (s + 1);
        m2 += d * (v - mean);
    }
    McEstimate e;
    e.mean = mean;
    e.stderr_ = samples > 1 ? std::sqrt(m2 / (samples - 1) / samples) : 0.0;
    return e;
}

std::vector<Eigen::VectorXd> ccd_iterates(const QuadraticInstance& inst, std::span<const double> steps, int N,
                                          const CcdOptions& opts) {
    check_steps(steps, N, "ccd_iterates");
    const int n = inst.n();
    if (!opts.order.empty()) {
        std::vector<int> sorted = opts.order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> iota(static_cast<std::size_t>(n));
        std::iota(iota.begin(), iota.end(), 0);
        require(sorted == iota, "ccd_iterates: order must be a permutation of 0..n-1");
    }
    std::vector<Eigen::VectorXd> xs;
    xs.reserve(static_cast<std::size_t>(N + 1));
    xs.push_back(inst.x0());
    Eigen::VectorXd x = inst.x0();
    Eigen::VectorXd g = inst.grad(x);
    for (int k = 0; k < N; ++k) {
        const int i = opts.order.empty() ? k % n : opts.order[static_cast<std::size_t>(k % n)];
        const double gi = opts.diagonal_scaling ? g(i) / inst.A()(i, i) : g(i);
        const double delta = -steps[k] * gi;
        x(i) += delta;
        g += delta * inst.A().col(i);
        xs.push_back(x);
    }
    return xs;
}

double run_ccd(const QuadraticInstance& inst, std::span<const double> steps, int N, const CcdOptions& opts) {
    return inst.gap(ccd_iterates(inst, steps, N, opts).back());
}

std::vector<Eigen::VectorXd> gauss_seidel_iterates(const QuadraticInstance& inst, int sweeps) {
    require(sweeps >= 0, fmt::format("gauss_seidel: sweeps must be nonnegative, got {}", sweeps));
    const auto& A = inst.A();
    const auto& b = inst.b();
    const int n = inst.n();
    std::vector<Eigen::VectorXd> xs{inst.x0()};
    Eigen::VectorXd x = inst.x0();
    for (int k = 0; k < sweeps; ++k) {
        // In place: x_j for j < i already holds the new sweep's value.
        for (int i = 0; i < n; ++i) {
            double s = b(i);
            for (int j = 0; j < n; ++j)
                if (j != i) s -= A(i, j) * x(j);
            x(i) = s / A(i, i);
        }
        xs.push_back(x);
    }
    return xs;
}

std::vector<double> run_gauss_seidel(const QuadraticInstance& inst, int sweeps) {
    std::vector<double> gaps;
    for (const auto& x : gauss_seidel_iterates(inst, sweeps)) gaps.push_back(inst.gap(x));
    return gaps;
}

double Huber::value(double x) const {
    const double a = std::abs(x);
    return a <= tau ? 0.5 * L * x * x : L * tau * a - 0.5 * L * tau * tau;
}

double Huber::grad(double x) const {
    if (std::abs(x) <= tau) return L * x;
    return x > 0.0 ? L * tau : -L * tau;
}

double huber_worst_case_gap(int N, double L, double delta) {
    require(N >= 0, "huber_worst_case_gap: N must be nonnegative");
    require(L > 0.0 && delta > 0.0, "huber_worst_case_gap: L and delta must be positive");
    const double R = std::sqrt(delta);
    // The kink is placed so that every iterate stays on the linear piece and
    // x^N lands exactly on the kink.
    const Huber h{L, R / (2.0 * N + 1.0)};
    double x = R;
    for (int k = 0; k < N; ++k) x -= h.grad(x) / L;
    return h.value(x);
}

} // namespace cdpep::empirical
