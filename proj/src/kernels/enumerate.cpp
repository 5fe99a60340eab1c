#include "cdpep/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace cdpep::kernels {

namespace {

struct Walker {
    const Eigen::MatrixXd& A;
    const Eigen::VectorXd& b;
    std::span<const double> steps;

    // Sum of f(x^N) over every completion of the index sequence from depth k.
    double sum(Eigen::VectorXd& x, Eigen::VectorXd& g, std::size_t k) const {
        if (k == steps.size()) return 0.5 * x.dot(g) - 0.5 * b.dot(x);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double delta = -steps[k] * g(i);
            x(i) += delta;
            g += delta * A.col(i);
            acc += sum(x, g, k + 1);
            g -= delta * A.col(i);
            x(i) -= delta;
        }
        return acc;
    }

    void step(Eigen::VectorXd& x, Eigen::VectorXd& g, std::size_t k, Eigen::Index i) const {
        const double delta = -steps[k] * g(i);
        x(i) += delta;
        g += delta * A.col(i);
    }
};

void check(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x0) {
    if (A.rows() != A.cols() || A.rows() != b.size() || b.size() != x0.size() || A.rows() == 0) {
        throw std::invalid_argument("rcd_expectation: inconsistent dimensions");
    }
}

} // namespace

double rcd_expectation_serial(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                              std::span<const double> steps) {
    check(A, b, x0);
    Walker w{A, b, steps};
    Eigen::VectorXd x = x0;
    Eigen::VectorXd g = A * x0 - b;
    const double count = std::pow(static_cast<double>(x0.size()), static_cast<double>(steps.size()));
    return w.sum(x, g, 0) / count;
}

double rcd_expectation_parallel(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                                std::span<const double> steps) {
    check(A, b, x0);
    const auto n = x0.size();
    // Split on a prefix of the index sequence; each prefix is one task.
    std::size_t depth = 0;
    long tasks = 1;
    while (depth < steps.size() && tasks < 64L * max_threads()) {
        tasks *= n;
        ++depth;
    }
    Walker w{A, b, steps};
    std::vector<double> partial(static_cast<std::size_t>(tasks), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long t = 0; t < tasks; ++t) {
        Eigen::VectorXd x = x0;
        Eigen::VectorXd g = A * x0 - b;
        // Most significant digit is the first index chosen.
        long code = t;
        std::vector<Eigen::Index> prefix(depth);
        for (std::size_t k = depth; k-- > 0;) {
            prefix[k] = code % n;
            code /= n;
        }
        for (std::size_t k = 0; k < depth; ++k) w.step(x, g, k, prefix[k]);
        partial[static_cast<std::size_t>(t)] = w.sum(x, g, depth);
    }
    double total = 0.0;
    for (double v : partial) total += v;
    const double count = std::pow(static_cast<double>(n), static_cast<double>(steps.size()));
    return total / count;
}

} // namespace cdpep::kernels
