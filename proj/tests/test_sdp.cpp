#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdpep/sdp.hpp"

#include <sstream>

using namespace cdpep;
using namespace cdpep::sdp;

namespace {

Constraint row(std::vector<SymEntry> e, double rhs, Sense sense, int num_free = 0) {
    return {SparseSym(std::move(e)), Eigen::VectorXd::Zero(num_free), rhs, sense};
}

// maximize X12 s.t. X11 = X22 = 1
ConicProblem correlation(Sense sense = Sense::eq) {
    ConicProblem p;
    p.psd_dim = 2;
    p.objective.coeff_x = SparseSym({{1, 0, 0.5}});
    p.objective.coeff_y = Eigen::VectorXd(0);
    p.constraints.push_back(row({{0, 0, 1.0}}, 1.0, sense));
    p.constraints.push_back(row({{1, 1, 1.0}}, 1.0, sense));
    return p;
}

std::vector<SolverConfig> configs() {
    SolverConfig ipm;
    SolverConfig admm;
    admm.algorithm = Algorithm::admm;
    admm.tol = 1e-6;
    return {ipm, admm};
}

} // namespace

TEST_CASE("sparse symmetric coefficients") {
    const SparseSym a({{1, 0, 2.0}, {0, 0, 1.0}});
    Eigen::MatrixXd X(2, 2);
    X << 3, 4, 4, 5;
    CHECK(a.dot(X) == doctest::Approx(3 + 2 * 2 * 4));
    CHECK(a.entries().front().row == 0);  // sorted
    const SparseSym upper({{0, 1, 1.0}, {1, 0, 1.0}});
    REQUIRE(upper.nnz() == 1);
    CHECK(upper.entries()[0].row == 1);
    CHECK(upper.entries()[0].value == 2.0);
}

TEST_CASE("problem validation") {
    auto p = correlation();
    CHECK_NOTHROW(p.validate());
    p.constraints[0].coeff_x = SparseSym({{3, 0, 1.0}});
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = correlation();
    p.constraints[1].rhs = std::nan("");
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("solver examples") {
    for (const auto& cfg : configs()) {
        CAPTURE(to_string(cfg.algorithm));
        SUBCASE("correlation matrix extreme point") {
            const auto p = correlation();
            const auto s = solve(p, cfg);
            CHECK(s.status == Status::optimal);
            CHECK(s.objective == doctest::Approx(1.0).epsilon(10 * cfg.tol));
            const auto r = residuals(p, s);
            CHECK(r.worst() <= cfg.tol);
            CHECK(std::abs(r.primal_res - s.primal_res) <= 1e-12);
            CHECK(std::abs(r.dual_res - s.dual_res) <= 1e-12);
            CHECK(std::abs(r.gap - s.gap) <= 1e-12);
            CHECK(linalg::min_eigenvalue(s.X) >= -10 * cfg.tol * (1 + s.X.frobenius_norm()));
        }
        SUBCASE("zero objective") {
            auto p = correlation();
            p.objective.coeff_x = SparseSym();
            const auto s = solve(p, cfg);
            CHECK(s.status == Status::optimal);
            CHECK(std::abs(s.objective) <= 10 * cfg.tol);
        }
        SUBCASE("minimize trace") {
            ConicProblem p;
            p.psd_dim = 2;
            p.objective.coeff_x = SparseSym({{0, 0, 1.0}, {1, 1, 1.0}});
            p.objective.coeff_y = Eigen::VectorXd(0);
            p.objective.sense = ObjectiveSense::minimize;
            p.constraints.push_back(row({{0, 0, 1.0}, {1, 1, 1.0}}, 2.0, Sense::eq));
            const auto s = solve(p, cfg);
            CHECK(s.status == Status::optimal);
            CHECK(s.objective == doctest::Approx(2.0).epsilon(10 * cfg.tol));
        }
        SUBCASE("free variables") {
            // maximize y s.t. y - X11 <= 0, X11 + X22 = 1: optimum 1
            ConicProblem p;
            p.psd_dim = 2;
            p.num_free = 1;
            p.objective.coeff_y = Eigen::VectorXd::Ones(1);
            Constraint c = row({{0, 0, -1.0}}, 0.0, Sense::le, 1);
            c.coeff_y(0) = 1.0;
            p.constraints.push_back(c);
            p.constraints.push_back(row({{0, 0, 1.0}, {1, 1, 1.0}}, 1.0, Sense::eq, 1));
            const auto s = solve(p, cfg);
            CHECK(s.status == Status::optimal);
            CHECK(s.objective == doctest::Approx(1.0).epsilon(10 * cfg.tol));
        }
    }
}

TEST_CASE("empty problem is rejected") {
    ConicProblem p;
    p.psd_dim = 1;
    p.objective.coeff_y = Eigen::VectorXd(0);
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
}

TEST_CASE("residuals of a hand-built certificate") {
    const auto p = correlation();
    Solution s;
    s.X = linalg::SymMatrix::from_dense(Eigen::MatrixXd::Ones(2, 2));
    s.y = Eigen::VectorXd(0);
    s.dual = Eigen::VectorXd::Constant(2, 0.5);
    auto r = residuals(p, s);
    CHECK(r.primal_res == 0.0);
    CHECK(r.dual_res <= 1e-15);
    CHECK(r.gap == 0.0);

    // Residuals are relative to 1 + |b|.
    s.X.add(0, 0, 1e-3);
    r = residuals(p, s);
    CHECK(r.primal_res >= 1e-3 / (1.0 + std::sqrt(2.0)) * (1 - 1e-12));
}

TEST_CASE("solver properties") {
    const SolverConfig cfg;
    SUBCASE("weak duality") {
        const auto s = solve(correlation(Sense::le), cfg);
        CHECK(s.objective <= s.dual_objective + 10 * cfg.tol);
    }
    SUBCASE("scaling equivariance") {
        auto p = correlation(Sense::le);
        const double base = solve(p, cfg).objective;
        // The feasible set is a cone section, so scaling the rhs scales X.
        for (double c : {0.5, 3.0}) {
            auto q = p;
            for (auto& r : q.constraints) r.rhs *= c;
            CHECK(std::abs(solve(q, cfg).objective - c * base) <= 1e-6 * c * std::abs(base));
            q = p;
            q.objective.coeff_x = SparseSym({{1, 0, 0.5 * c}});
            CHECK(std::abs(solve(q, cfg).objective - c * base) <= 1e-6 * c * std::abs(base));
        }
    }
    SUBCASE("redundant constraint") {
        auto p = correlation(Sense::le);
        const double base = solve(p, cfg).objective;
        p.constraints.push_back(row({{0, 0, 1.0}, {1, 1, 1.0}}, 2.0, Sense::le));
        CHECK(std::abs(solve(p, cfg).objective - base) <= 10 * cfg.tol);
    }
    SUBCASE("determinism") {
        const auto a = solve(correlation(), cfg);
        const auto b = solve(correlation(), cfg);
        CHECK(a.objective == b.objective);
        CHECK(a.iterations == b.iterations);
    }
}

TEST_CASE("problem text round trip") {
    auto p = correlation(Sense::le);
    p.num_free = 1;
    p.objective.coeff_y = Eigen::VectorXd::Constant(1, 0.25);
    for (auto& c : p.constraints) c.coeff_y = Eigen::VectorXd::Constant(1, -1.0);
    std::stringstream ss;
    write_problem(ss, p);
    const auto q = read_problem(ss);
    CHECK(q.psd_dim == p.psd_dim);
    CHECK(q.num_free == p.num_free);
    REQUIRE(q.constraints.size() == p.constraints.size());
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        CHECK(q.constraints[i].coeff_x == p.constraints[i].coeff_x);
        CHECK(q.constraints[i].coeff_y == p.constraints[i].coeff_y);
        CHECK(q.constraints[i].rhs == p.constraints[i].rhs);
        CHECK(q.constraints[i].sense == p.constraints[i].sense);
    }
    CHECK(q.objective.coeff_y == p.objective.coeff_y);
}
