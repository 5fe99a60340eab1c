#include "cdpep/theory_bounds.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace cdpep::theory {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void common(const TheoryQuery& q, const char* who) {
    require(q.n >= 1, fmt::format("{}: n must be positive, got {}", who, q.n));
    require(q.ell_max > 0.0, fmt::format("{}: ell_max must be positive, got {}", who, q.ell_max));
}

} // namespace

double wright_rcd(const TheoryQuery& q) {
    common(q, "wright_rcd");
    require(q.k >= 1, fmt::format("wright_rcd: k must be at least 1, got {}", q.k));
    require(q.R0sq > 0.0, fmt::format("wright_rcd: R0^2 must be positive, got {}", q.R0sq));
    return 2.0 * q.n * q.ell_max * q.R0sq / q.k;
}

double wright_rcd_strong(const TheoryQuery& q, int N) {
    common(q, "wright_rcd_strong");
    require(q.mu > 0.0, "wright_rcd_strong: mu must be positive (use wright_rcd for mu = 0)");
    require(q.mu <= q.n * q.ell_max, "wright_rcd_strong: need mu <= n ell_max");
    require(N >= 0, "wright_rcd_strong: N must be nonnegative");
    require(q.f0gap > 0.0, "wright_rcd_strong: f(x0) - f* must be positive");
    const double factor = 1.0 - q.mu / (q.n * q.ell_max);
    return std::pow(factor, N) * q.f0gap;
}

double beck_ccd(const TheoryQuery& q) {
    common(q, "beck_ccd");
    require(q.L > 0.0, "beck_ccd: L must be positive");
    require(q.R0sq > 0.0, "beck_ccd: R0^2 must be positive");
    require(q.k >= q.n && q.k % q.n == 0,
            fmt::format("beck_ccd: k = {} must be a positive multiple of n = {}", q.k, q.n));
    const double ratio = q.L / q.ell_max;
    return 4.0 * q.n * q.R0sq * q.ell_max * (1.0 + q.n * ratio * ratio) / (q.k + 8);
}

double beck_ccd_strong(const TheoryQuery& q, int k) {
    common(q, "beck_ccd_strong");
    require(q.L > 0.0, "beck_ccd_strong: L must be positive");
    require(q.mu > 0.0, "beck_ccd_strong: mu must be positive");
    require(q.f0gap > 0.0, "beck_ccd_strong: f(x0) - f* must be positive");
    require(k >= 0 && k % q.n == 0, fmt::format("beck_ccd_strong: k = {} must be a multiple of n = {}", k, q.n));
    const double ratio = q.L / q.ell_max;
    const double factor = 1.0 - q.mu / (2.0 * q.ell_max * (1.0 + q.n * ratio * ratio));
    return std::pow(factor, k / q.n) * q.f0gap;
}

} // namespace cdpep::theory
