#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdpep/empirical.hpp"
#include "cdpep/rcd_pep.hpp"

using namespace cdpep;
using namespace cdpep::rcd;

namespace {

constexpr double kTol = 1e-8;

RcdParams fig1(int N) { return RcdParams::constant_step(2, N, 2.0, 1.0, 1.0, 1.0); }

double value(const RcdParams& p) {
    const auto r = rcd_bound(p);
    REQUIRE(r.solution.status == sdp::Status::optimal);
    return r.value;
}

} // namespace

TEST_CASE("parameter validation") {
    auto p = fig1(3);
    CHECK_NOTHROW(p.validate());
    p.steps.pop_back();
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = fig1(3);
    p.mu = 3.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = fig1(3);
    p.ell_max = 3.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = fig1(3);
    p.initial.radius = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("model structure") {
    const auto m = build_rcd_model(fig1(1));
    CHECK(m->basis.size() == 5);
    const auto counts = pep::family_counts(m->basis, m->num_fvals, m->rows);
    CHECK(counts.at("dP") == 6);

    auto q = fig1(2);
    q.quadratic = true;
    const auto a = build_rcd(fig1(2)), b = build_rcd(q);
    const auto mq = build_rcd_model(q);
    const auto cq = pep::family_counts(mq->basis, 3, mq->rows);
    CHECK(b.constraints.size() == a.constraints.size() + static_cast<std::size_t>(cq.at("quad")));
    for (std::size_t i = 0; i < a.constraints.size(); ++i) CHECK(a.constraints[i].coeff_x == b.constraints[i].coeff_x);
}

TEST_CASE("all-zero data is feasible") {
    const auto p = build_rcd(fig1(3));
    const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(p.psd_dim, p.psd_dim);
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(p.num_free);
    for (const auto& c : p.constraints) {
        const double lhs = c.coeff_x.dot(X) + c.coeff_y.dot(y);
        if (c.sense == sdp::Sense::eq) {
            CHECK(std::abs(lhs - c.rhs) <= 1e-15);
        } else {
            CHECK(lhs <= c.rhs);
        }
    }
}

TEST_CASE("one step against the descent analysis") {
    // f(x0) <= L Delta / 2 for any L-smooth f, and a descent step cannot
    // increase f, so the bound is at most L Delta / 2.
    const double Delta = 1.5;
    auto p = RcdParams::constant_step(2, 1, 2.0, 1.0, 1.0, Delta);
    CHECK(value(p) <= 0.5 * 2.0 * Delta);
    CHECK(value(p) > 0.0);
}

TEST_CASE("strongly convex one step") {
    RcdParams p = RcdParams::constant_step(2, 1, 2.0, 1.0, 1.0, 1.0);
    p.mu = 1.0;
    p.initial = {InitialKind::fgap, 1.0};
    CHECK(std::abs(value(p) - 0.5) <= 1e-4);
}

TEST_CASE("below the Wright curve") {
    for (int N : {1, 2, 5, 10}) {
        CAPTURE(N);
        CHECK(value(fig1(N)) < 4.0 / N);
    }
}

TEST_CASE("n = 1 lower side via gradient descent on a Huber function") {
    for (int N : {1, 3, 6}) {
        CAPTURE(N);
        const double lower = empirical::huber_worst_case_gap(N, 1.0, 1.0);
        CHECK(lower >= 0.999 / (4.0 * N + 2.0));
        // With L = ell_max, one coordinate and t = 1/L the method is gradient
        // descent; the relaxation can only be looser.
        auto p = RcdParams::constant_step(1, N, 1.0, 1.0, 1.0, 1.0);
        const auto r = rcd_bound(p);
        // This instance has no strictly feasible point, so the solver may
        // stop short of the certificate; only the value is compared.
        CHECK(r.value >= lower - 1e-6);
    }
}

TEST_CASE("properties") {
    SUBCASE("monotone in N") {
        double prev = value(fig1(1));
        for (int N = 2; N <= 6; ++N) {
            const double v = value(fig1(N));
            CHECK(v <= prev + 10 * kTol);
            prev = v;
        }
    }
    SUBCASE("homogeneous in Delta") {
        const double base = value(fig1(3));
        for (double c : {0.5, 2.0, 10.0}) {
            auto p = fig1(3);
            p.initial.radius = c;
            CHECK(std::abs(value(p) - c * base) <= 1e-6 * c * base);
        }
    }
    SUBCASE("quadratic restriction is tighter") {
        for (int N : {2, 4}) {
            auto q = fig1(N);
            q.quadratic = true;
            CHECK(value(q) <= value(fig1(N)) + 10 * kTol);
        }
    }
    SUBCASE("monotone in L") {
        double prev = 0.0;
        for (double L : {1.0, 1.25, 1.5, 2.0}) {
            auto p = fig1(3);
            p.L = L;
            const double v = value(p);
            CHECK(v >= prev - 10 * kTol);
            prev = v;
        }
    }
}

TEST_CASE("interior-point and splitting solvers agree") {
    sdp::SolverConfig admm;
    admm.algorithm = sdp::Algorithm::admm;
    admm.tol = 1e-6;
    const auto a = rcd_bound(fig1(3));
    const auto b = rcd_bound(fig1(3), admm);
    REQUIRE(b.solution.status == sdp::Status::optimal);
    CHECK(std::abs(a.value - b.value) <= 1e-4);
}
