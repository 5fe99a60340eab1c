#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdpep/pep_core.hpp"

#include <random>

using namespace cdpep;
using namespace cdpep::pep;

namespace {

struct Fixture {
    GramBasis basis{{"x0", "g0", "d0", "g1"}};
    VecExpr x0 = VecExpr::unit(basis, "x0");
    VecExpr g0 = VecExpr::unit(basis, "g0");
    VecExpr d0 = VecExpr::unit(basis, "d0");
    VecExpr g1 = VecExpr::unit(basis, "g1");
};

Eigen::MatrixXd random_gram(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd B(n, n);
    for (Eigen::Index k = 0; k < B.size(); ++k) B.data()[k] = g(rng);
    return B * B.transpose();
}

// Concrete vectors V (columns = basis labels), so the Gram matrix is V^T V.
struct Realization {
    Eigen::MatrixXd V;
    Eigen::VectorXd f;
    Eigen::VectorXd vec(const VecExpr& e) const { return V * e.dense(); }
    Eigen::MatrixXd gram() const { return V.transpose() * V; }
};

} // namespace

TEST_CASE("basis labels") {
    GramBasis b;
    CHECK(b.add("x0") == 0);
    CHECK(b.add("g0") == 1);
    CHECK(b.index("g0") == 1);
    CHECK_THROWS(b.add("x0"));
    CHECK_THROWS_AS(b.index("nope"), std::out_of_range);
}

TEST_CASE("inner products") {
    Fixture fx;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
    CHECK(inner(fx.x0, fx.x0).evaluate(I, Eigen::VectorXd()) == 1.0);
    CHECK(inner(fx.x0, VecExpr()).is_zero());

    const double t = 0.7;
    const auto q = inner(fx.x0 - t * fx.d0, fx.x0 - t * fx.d0);
    const int x = fx.basis.index("x0"), d = fx.basis.index("d0");
    CHECK(q.gram_part().at({x, x}) == doctest::Approx(1.0));
    CHECK(q.gram_part().at({d, x}) == doctest::Approx(-t));  // symmetric half of -2t<x0,d0>
    CHECK(q.gram_part().at({d, d}) == doctest::Approx(t * t));

    std::mt19937_64 rng(3);
    const Eigen::MatrixXd G = random_gram(4, rng);
    const VecExpr u = fx.x0 + 2.0 * fx.g1, v = fx.d0 - fx.g0;
    CHECK(inner(u, v).evaluate(G, {}) == doctest::Approx(u.dense().dot(G * v.dense())));
    CHECK(inner(u, v).evaluate(G, {}) == doctest::Approx(inner(v, u).evaluate(G, {})));

    GramBasis other{{"x0"}};
    CHECK_THROWS(inner(fx.x0, VecExpr::unit(other, "x0")));
}

TEST_CASE("interpolation inequality") {
    Fixture fx;
    const PointData p0{{fx.x0}, {fx.g0}, 0};
    const PointData p1{{fx.x0 - fx.d0}, {fx.g1}, 1};

    CHECK(interp_ineq(p0, p0, 0.0, 2.0).is_zero());
    CHECK_THROWS(interp_ineq(p0, p1, 2.0, 2.0));

    // mu = 0: coefficient of |g_i - g_j|^2 is 1/(2L)
    const double L = 4.0;
    const auto q = interp_ineq(p1, p0, 0.0, L);
    const int g1 = fx.basis.index("g1");
    CHECK(q.gram_part().at({g1, g1}) == doctest::Approx(1.0 / (2 * L)));

    // mu = 1, L = 2: the prefactor is 1, so the g-term coefficient is 1/L
    const auto r = interp_ineq(p1, p0, 1.0, 2.0);
    CHECK(r.gram_part().at({g1, g1}) == doctest::Approx(0.5));

    // The mu -> 0 limit is continuous.
    const auto a = interp_ineq(p1, p0, 0.0, L), b = interp_ineq(p1, p0, 1e-12, L);
    const Eigen::MatrixXd diff = a.gram_matrix(4) - b.gram_matrix(4);
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-11);

    // A smooth convex function satisfies the inequality at sampled points:
    // f(x) = L/2 |x|^2 on R^4.
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    Realization z;
    z.V.resize(4, 4);
    for (Eigen::Index k = 0; k < z.V.size(); ++k) z.V.data()[k] = g(rng);
    const double Lf = 1.5;
    // x1 = x0 - d0, enforce g0 = Lf x0 and g1 = Lf x1 column-wise
    z.V.col(1) = Lf * z.V.col(0);
    z.V.col(3) = Lf * (z.V.col(0) - z.V.col(2));
    z.f.resize(2);
    z.f << 0.5 * Lf * z.V.col(0).squaredNorm(), 0.5 * Lf * (z.V.col(0) - z.V.col(2)).squaredNorm();
    for (double Lc : {Lf, 2.0 * Lf}) {
        CHECK(interp_ineq(p0, p1, 0.0, Lc).evaluate(z.gram(), z.f) <= 1e-12);
        CHECK(interp_ineq(p1, p0, 0.0, Lc).evaluate(z.gram(), z.f) <= 1e-12);
    }
    // It is tight for the quadratic with matching curvature.
    CHECK(std::abs(interp_ineq(p0, p1, 0.0, Lf).evaluate(z.gram(), z.f)) <= 1e-10);
}

TEST_CASE("quadratic equality holds on quadratics") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    GramBasis b4{{"x0", "x1", "g0", "g1"}};
    const PointData a{{VecExpr::unit(b4, "x0")}, {VecExpr::unit(b4, "g0")}, 0};
    const PointData c{{VecExpr::unit(b4, "x1")}, {VecExpr::unit(b4, "g1")}, 1};
    CHECK(quad_eq(a, a).is_zero());
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 5;
        Eigen::MatrixXd M(d, d);
        for (Eigen::Index k = 0; k < M.size(); ++k) M.data()[k] = g(rng);
        const Eigen::MatrixXd A = M * M.transpose();
        Eigen::VectorXd bvec(d), x(d), y(d);
        for (int i = 0; i < d; ++i) {
            bvec(i) = g(rng);
            x(i) = g(rng);
            y(i) = g(rng);
        }
        auto f = [&](const Eigen::VectorXd& v) { return 0.5 * v.dot(A * v) - bvec.dot(v); };
        Eigen::MatrixXd V(d, 4);
        V << x, y, A * x - bvec, A * y - bvec;
        Eigen::VectorXd fv(2);
        fv << f(x), f(y);
        const Eigen::MatrixXd G = V.transpose() * V;
        CHECK(std::abs(quad_eq(a, c).evaluate(G, fv)) <= 1e-9 * (1 + G.norm()));
        CHECK(std::abs(quad_eq(c, a).evaluate(G, fv)) <= 1e-9 * (1 + G.norm()));
    }
}

TEST_CASE("coordinate smoothness pair") {
    GramBasis b{{"x0", "g0", "g1", "s"}};
    const VecExpr x0 = VecExpr::unit(b, "x0"), g0 = VecExpr::unit(b, "g0"), g1 = VecExpr::unit(b, "g1"),
                  s = VecExpr::unit(b, "s");
    const PointData k{{x0}, {g0}, 0};
    const PointData k1{{x0 + s}, {g1}, 1};
    const double ell = 2.5;
    const auto [first, second] = coord_smooth_pair(k, k1, g0, g1, s, ell);
    CHECK(first.gram_part().at({b.index("g1"), b.index("g1")}) == doctest::Approx(1.0 / (2 * ell)));
    CHECK_THROWS(coord_smooth_pair(k, k1, g0, g1, s, 0.0));

    // Equal gradients and no displacement: both sides vanish.
    const PointData same{{x0}, {g0}, 0};
    const auto [z1, z2] = coord_smooth_pair(same, same, g0, g0, VecExpr(), ell);
    CHECK(z1.is_zero());
    CHECK(z2.is_zero());

    // Tight on f(u) = ell u^2 / 2 for any two points.
    for (double u0 : {-1.3, 0.2, 2.0})
        for (double u1 : {-0.4, 1.1}) {
            Eigen::MatrixXd V(1, 4);
            V << u0, ell * u0, ell * u1, u1 - u0;
            Eigen::VectorXd fv(2);
            fv << 0.5 * ell * u0 * u0, 0.5 * ell * u1 * u1;
            const Eigen::MatrixXd G = V.transpose() * V;
            CHECK(std::abs(first.evaluate(G, fv)) <= 1e-12);
            CHECK(std::abs(second.evaluate(G, fv)) <= 1e-12);
        }
}

TEST_CASE("assembly") {
    GramBasis b{{"x0"}};
    const VecExpr x0 = VecExpr::unit(b, "x0");
    const double Delta = 2.5;
    std::vector<Row> rows{{inner(x0, x0) - QuadExpr::constant(Delta), sdp::Sense::le, "initial"}};
    rows.push_back(rows.front());                               // duplicate, dropped
    rows.push_back({QuadExpr(), sdp::Sense::eq, "empty"});      // 0 = 0, dropped
    const auto p = assemble(b, 0, rows, inner(x0, x0));
    CHECK(p.psd_dim == 1);
    CHECK(p.num_free == 0);
    CHECK(p.constraints.size() == 1);
    const auto s = sdp::solve(p);
    CHECK(s.status == sdp::Status::optimal);
    CHECK(s.objective == doctest::Approx(Delta).epsilon(1e-7));
}

TEST_CASE("compiled rows agree with symbolic evaluation") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> g;
    GramBasis b{{"a", "b", "c"}};
    std::vector<Row> rows;
    std::vector<QuadExpr> exprs;
    for (int r = 0; r < 10; ++r) {
        VecExpr u, v;
        for (int i = 0; i < 3; ++i) {
            u += g(rng) * VecExpr::unit(b, i);
            v += g(rng) * VecExpr::unit(b, i);
        }
        QuadExpr q = inner(u, v) + QuadExpr::fval(r % 2, g(rng)) + QuadExpr::constant(g(rng));
        exprs.push_back(q);
        rows.push_back({q, sdp::Sense::le, "r"});
    }
    const auto p = assemble(b, 2, rows, QuadExpr::fval(0));
    REQUIRE(p.constraints.size() == rows.size());
    const Eigen::MatrixXd G = random_gram(3, rng);
    Eigen::VectorXd f(2);
    f << g(rng), g(rng);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& c = p.constraints[r];
        const double compiled = c.coeff_x.dot(G) + c.coeff_y.dot(f) - c.rhs;
        CHECK(std::abs(compiled - exprs[r].evaluate(G, f)) <= 1e-12 * (1 + std::abs(compiled)));
    }
}
