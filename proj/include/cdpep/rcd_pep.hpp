#pragma once

// Performance-estimation relaxation for randomized coordinate descent.
//
// Unknowns are expectations of inner products over the basis
// {x0, g0..gN, d0..dN}, where d^k is the (random) coordinate step direction,
// together with the expected function values E f(x^0..x^N). The minimizer is
// pinned at the origin with f* = 0.

#include "cdpep/pep_core.hpp"
#include "cdpep/sdp.hpp"

#include <string>
#include <vector>

namespace cdpep::rcd {

enum class InitialKind { distance, fgap };

struct InitialCondition {
    InitialKind kind = InitialKind::distance;
    double radius = 1.0;  // Delta for |x0 - x*|^2 <= Delta, delta for f(x0) - f* <= delta
};

struct RcdParams {
    int n = 2;
    int N = 1;
    double L = 2.0;
    double mu = 0.0;
    double ell_max = 1.0;
    std::vector<double> steps;  // length N
    InitialCondition initial;
    bool quadratic = false;

    static RcdParams constant_step(int n, int N, double L, double ell_max, double step, double delta);
    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
    std::string describe() const;
};

struct RcdModel {
    pep::GramBasis basis;
    std::vector<pep::PointData> points;  // x^0..x^N, then x*
    std::vector<pep::Row> rows;
    pep::QuadExpr objective;
    int num_fvals = 0;
};

/// Symbolic model (basis, iterates, constraint rows, objective).
/// The basis lives inside the returned object; do not copy it elsewhere.
std::unique_ptr<RcdModel> build_rcd_model(const RcdParams& params);

sdp::ConicProblem build_rcd(const RcdParams& params);

pep::BoundResult rcd_bound(const RcdParams& params, const sdp::SolverConfig& cfg = {});

} // namespace cdpep::rcd
