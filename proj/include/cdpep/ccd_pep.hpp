#pragma once

// Performance estimation for cyclic coordinate descent through the Shor
// relaxation of the coordinate-wise QCQP: the scalar unknowns are the
// coordinates of x^0 and every gradient coordinate; iterate coordinates are
// eliminated through the update rule.

#include "cdpep/pep_core.hpp"
#include "cdpep/sdp.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cdpep::ccd {

enum class Variant {
    base,       // full-vector interpolation only
    coord,      // + coordinate smoothness between consecutive iterates
    quadratic,  // + quadratic-function equalities
};

std::string_view to_string(Variant v);

struct CcdParams {
    int n = 2;
    int cycles = 1;
    double L = 2.0;
    std::vector<double> ell;    // ell_1..ell_n
    std::vector<double> steps;  // t_0..t_{N-1}
    double delta = 1.0;
    Variant variant = Variant::base;
    /// Cyclic visiting order as a permutation of 0..n-1; empty means 0,1,..,n-1.
    std::vector<int> order;

    int N() const { return n * cycles; }
    /// Coordinate updated at iteration k.
    int active(int k) const;

    static CcdParams constant_step(int n, int cycles, double L, std::vector<double> ell, double step, double delta,
                                   Variant variant);
    void validate() const;
    std::string describe() const;
};

/// Scalar unknowns of the lifted QCQP.
class ScalarVarSpace {
public:
    ScalarVarSpace(int n, int N);

    const pep::GramBasis& basis() const { return basis_; }
    int n() const { return n_; }
    int N() const { return N_; }
    int x0(int i) const { return i; }
    int grad(int k, int i) const { return n_ + k * n_ + i; }
    int num_fvals() const { return N_ + 1; }  // f(x^0)..f(x^N); f* = 0

private:
    int n_;
    int N_;
    pep::GramBasis basis_;
};

/// Coordinates of x^k, k = 0..N, as affine (here linear) expressions over the
/// scalar unknowns: result[k][i].
std::vector<pep::CoordVec> eliminate_iterates(const CcdParams& params, const ScalarVarSpace& space);

struct CcdModel {
    explicit CcdModel(int n, int N) : space(n, N) {}
    ScalarVarSpace space;
    std::vector<pep::PointData> points;  // x^0..x^N, then x*
    std::vector<pep::Row> rows;
    pep::QuadExpr objective;
};

std::unique_ptr<CcdModel> build_ccd_model(const CcdParams& params);

sdp::ConicProblem build_ccd(const CcdParams& params);

pep::BoundResult ccd_bound(const CcdParams& params, const sdp::SolverConfig& cfg = {});

/// Worst case of K Gauss-Seidel sweeps on a psd system with positive
/// diagonal, start distance measured in the diagonal-weighted norm
/// sum_i a_ii u_i^2 <= delta, and lambda_max the largest eigenvalue of D^{-1}A.
CcdParams gauss_seidel_params(int n, double lambda_max, int K, double delta);
pep::BoundResult gauss_seidel_bound(int n, double lambda_max, int K, double delta, const sdp::SolverConfig& cfg = {});

} // namespace cdpep::ccd
