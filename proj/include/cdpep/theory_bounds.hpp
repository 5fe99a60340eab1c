#pragma once

// Closed-form reference rates for randomized and cyclic coordinate descent
// with step 1/ell_max. R0sq is taken as an input; the sweeps pass Delta.

namespace cdpep::theory {

struct TheoryQuery {
    int n = 1;
    double L = 1.0;
    double ell_max = 1.0;
    double mu = 0.0;
    double R0sq = 1.0;
    int k = 1;
    double f0gap = 1.0;
};

/// 2 n ell_max R0^2 / k
double wright_rcd(const TheoryQuery& q);

/// (1 - mu / (n ell_max))^N (f(x0) - f*)
double wright_rcd_strong(const TheoryQuery& q, int N);

/// 4 n R0^2 ell_max (1 + n L^2 / ell_max^2) / (k + 8), k a multiple of n
double beck_ccd(const TheoryQuery& q);

/// (1 - mu / (2 ell_max (1 + n L^2 / ell_max^2)))^(k/n) (f(x0) - f*), k a multiple of n
double beck_ccd_strong(const TheoryQuery& q, int k);

} // namespace cdpep::theory
