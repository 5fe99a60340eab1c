#pragma once

// Concrete runs of randomized / cyclic coordinate descent and Gauss-Seidel
// on quadratics, used as lower bounds against the SDP values.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cdpep::empirical {

enum class Norm {
    euclidean,
    diagonal,  // <u, u>_D = sum_i a_ii u_i^2
};

/// f(x) = x^T A x / 2 - b^T x with A psd, positive diagonal and b in range(A).
class QuadraticInstance {
public:
    QuadraticInstance(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::VectorXd x0);

    int n() const { return static_cast<int>(A_.rows()); }
    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::VectorXd& b() const { return b_; }
    const Eigen::VectorXd& x0() const { return x0_; }
    /// Minimum-norm minimizer.
    const Eigen::VectorXd& xstar() const { return xstar_; }

    double f(const Eigen::VectorXd& x) const;
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const { return A_ * x - b_; }
    double fstar() const { return fstar_; }
    double gap(const Eigen::VectorXd& x) const { return f(x) - fstar_; }

    double L() const { return lmax_; }
    Eigen::VectorXd ell() const { return A_.diagonal(); }
    /// Largest eigenvalue of D^{-1} A.
    double lambda_max_scaled() const;

    /// Squared distance from x to the closest minimizer in the chosen norm.
    double distance2(const Eigen::VectorXd& x, Norm norm = Norm::euclidean) const;
    double start_distance2(Norm norm = Norm::euclidean) const { return distance2(x0_, norm); }

    QuadraticInstance with_start(Eigen::VectorXd x0) const;

private:
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_, x0_, xstar_;
    Eigen::MatrixXd null_;  // orthonormal basis of ker A
    double fstar_ = 0.0;
    double lmax_ = 0.0;
};

/// Sequences beyond this count are not enumerated.
inline constexpr std::uint64_t kEnumerationCap = 1'000'000;

/// Exact E[f(x^N)] - f* of randomized coordinate descent, averaging over all
/// n^N index sequences. Throws std::length_error when n^N exceeds cap.
double run_rcd_exact(const QuadraticInstance& inst, std::span<const double> steps, int N,
                     std::uint64_t cap = kEnumerationCap);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Monte Carlo estimate of E[f(x^N)] - f*; reproducible for a fixed seed.
McEstimate run_rcd_mc(const QuadraticInstance& inst, std::span<const double> steps, int N, int samples,
                      std::uint64_t seed);

struct CcdOptions {
    /// Visiting order within a cycle; empty means 0..n-1.
    std::vector<int> order;
    /// Use D^{-1} grad f in place of grad f.
    bool diagonal_scaling = false;
};

/// Iterates x^0..x^N of cyclic coordinate descent.
std::vector<Eigen::VectorXd> ccd_iterates(const QuadraticInstance& inst, std::span<const double> steps, int N,
                                          const CcdOptions& opts = {});
/// f(x^N) - f* for cyclic coordinate descent.
double run_ccd(const QuadraticInstance& inst, std::span<const double> steps, int N, const CcdOptions& opts = {});

/// Iterates after each full Gauss-Seidel sweep, x^0..x^sweeps.
std::vector<Eigen::VectorXd> gauss_seidel_iterates(const QuadraticInstance& inst, int sweeps);
/// f(x^k) - f* for k = 0..sweeps.
std::vector<double> run_gauss_seidel(const QuadraticInstance& inst, int sweeps);

/// Smooth convex Huber function with curvature L and kink at +-tau.
struct Huber {
    double L = 1.0;
    double tau = 1.0;
    double value(double x) const;
    double grad(double x) const;
};

/// Gap of N gradient steps of length 1/L from x0 = sqrt(delta) on the Huber
/// function that is worst for that method.
double huber_worst_case_gap(int N, double L, double delta);

/// Draws from the sampler family: A = S Q diag(lambda) Q^T S with spectrum in
/// [0, L] and S shrinking the diagonal to a_ii <= ell_i, and x0 at squared
/// distance delta (in `norm`) from the solution set.
struct SamplerSpec {
    int n = 2;
    double L = 1.0;
    std::vector<double> ell;  // empty: no diagonal cap beyond L
    double delta = 1.0;
    Norm norm = Norm::euclidean;
    bool singular = false;    // force one zero eigenvalue
};

QuadraticInstance sample_instance(const SamplerSpec& spec, std::mt19937_64& rng);

/// Rebuilds an instance from a spectrum, eigenvectors and a start direction
/// under the sampler's constraints.
QuadraticInstance build_instance(const SamplerSpec& spec, const Eigen::VectorXd& spectrum, const Eigen::MatrixXd& Q,
                                 const Eigen::VectorXd& direction, const Eigen::VectorXd& xstar);

enum class Method { rcd, ccd, gauss_seidel };

struct SearchTarget {
    Method method = Method::ccd;
    int n = 2;
    int N = 1;                   // iterations; sweeps for gauss_seidel
    double L = 1.0;              // lambda_max(D^{-1}A) for gauss_seidel
    std::vector<double> ell;
    std::vector<double> steps;   // length N; unused for gauss_seidel
    double delta = 1.0;
    int mc_samples = 100'000;    // used when enumeration is too large
};

/// Gap of the target method on an instance.
double evaluate(const SearchTarget& target, const QuadraticInstance& inst, std::uint64_t seed = 0);

struct SearchResult {
    double best_gap = 0.0;
    std::optional<QuadraticInstance> instance;
    int evaluations = 0;
    bool consistent = true;  // best_gap <= bound + slack
};

/// Hill-climbs the final gap over sampled instances. Budget counts
/// evaluations after the seed instance.
SearchResult worst_case_search(const SearchTarget& target, double bound, int budget, std::uint64_t seed,
                               double slack = 1e-7);

void write_instance(std::ostream& os, const QuadraticInstance& inst);
QuadraticInstance read_instance(std::istream& is);
void save_instance(const std::string& path, const QuadraticInstance& inst);
QuadraticInstance load_instance(const std::string& path);

} // namespace cdpep::empirical
