#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdpep/empirical.hpp"

#include <sstream>

using namespace cdpep::empirical;

namespace {

QuadraticInstance diag_instance(std::vector<double> d, Eigen::VectorXd x0) {
    const Eigen::VectorXd a = Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    return QuadraticInstance(a.asDiagonal(), Eigen::VectorXd::Zero(a.size()), std::move(x0));
}

// Gradient descent with constant step on a quadratic.
double gd_gap(const QuadraticInstance& inst, double t, int N) {
    Eigen::VectorXd x = inst.x0();
    for (int k = 0; k < N; ++k) x -= t * inst.grad(x);
    return inst.gap(x);
}

QuadraticInstance random_instance(int n, std::uint64_t seed, bool singular = false) {
    std::mt19937_64 rng(seed);
    SamplerSpec spec;
    spec.n = n;
    spec.L = 2.0;
    spec.ell = std::vector<double>(n, 1.0);
    spec.singular = singular;
    return sample_instance(spec, rng);
}

} // namespace

TEST_CASE("instance basics") {
    const auto inst = diag_instance({2.0, 1.0}, Eigen::Vector2d(1.0, -1.0));
    CHECK(inst.fstar() == 0.0);
    CHECK(inst.gap(inst.x0()) == doctest::Approx(1.5));
    CHECK(inst.L() == doctest::Approx(2.0));
    CHECK(inst.start_distance2() == doctest::Approx(2.0));
    CHECK(inst.start_distance2(Norm::diagonal) == doctest::Approx(3.0));
    CHECK_THROWS(QuadraticInstance(Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()));
}

TEST_CASE("singular instances measure distance to the solution set") {
    Eigen::Matrix2d A;
    A << 1, 1, 1, 1;
    const QuadraticInstance inst(A, Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1));
    // minimizers: x1 + x2 = 1
    CHECK(inst.xstar().sum() == doctest::Approx(1.0));
    CHECK(inst.start_distance2() == doctest::Approx(0.5));
    CHECK(inst.gap(inst.x0()) == doctest::Approx(0.5));
}

TEST_CASE("coordinate constants are the diagonal") {
    const auto inst = random_instance(4, 8);
    const double h = 1e-6;
    for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(4, i);
        const double fd = (inst.grad(inst.x0() + h * e)(i) - inst.grad(inst.x0())(i)) / h;
        CHECK(fd == doctest::Approx(inst.ell()(i)).epsilon(1e-6));
    }
}

TEST_CASE("exact randomized expectation") {
    SUBCASE("one coordinate is gradient descent") {
        const auto inst = diag_instance({0.7}, Eigen::VectorXd::Constant(1, 2.0));
        const std::vector<double> steps(4, 1.0);
        CHECK(run_rcd_exact(inst, steps, 4) == doctest::Approx(gd_gap(inst, 1.0, 4)));
    }
    SUBCASE("N = 0") {
        const auto inst = random_instance(3, 1);
        CHECK(run_rcd_exact(inst, {}, 0) == doctest::Approx(inst.gap(inst.x0())));
    }
    SUBCASE("four sequences by hand") {
        // Picking a coordinate zeroes it. Sequences (0,0) and (1,1) leave one
        // coordinate at 1 (gap 1/2); (0,1) and (1,0) reach the minimum.
        const auto inst = diag_instance({1.0, 1.0}, Eigen::Vector2d(1.0, 1.0));
        const std::vector<double> steps(2, 1.0);
        CHECK(run_rcd_exact(inst, steps, 2) == doctest::Approx(0.25));
    }
    SUBCASE("cap") {
        const auto inst = random_instance(4, 2);
        const std::vector<double> steps(11, 1.0);
        CHECK_THROWS_AS(run_rcd_exact(inst, steps, 11), std::length_error);
    }
}

TEST_CASE("Monte Carlo estimate") {
    const auto inst = random_instance(3, 5);
    const std::vector<double> steps(6, 1.0);
    const auto a = run_rcd_mc(inst, steps, 6, 20000, 42);
    const auto b = run_rcd_mc(inst, steps, 6, 20000, 42);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    const double exact = run_rcd_exact(inst, steps, 6);
    CHECK(std::abs(a.mean - exact) <= 4 * a.stderr_);

    const auto at_opt = inst.with_start(inst.xstar());
    const auto z = run_rcd_mc(at_opt, steps, 6, 100, 1);
    CHECK(std::abs(z.mean) <= 1e-14);
    CHECK(z.stderr_ <= 1e-14);
}

TEST_CASE("cyclic coordinate descent") {
    SUBCASE("diagonal system with exact steps") {
        const auto inst = diag_instance({2.0, 0.5, 4.0}, Eigen::Vector3d(1.0, -2.0, 3.0));
        const std::vector<double> steps{0.5, 2.0, 0.25};
        CHECK(std::abs(run_ccd(inst, steps, 3)) <= 1e-15);
    }
    SUBCASE("one coordinate is gradient descent") {
        const auto inst = diag_instance({0.8}, Eigen::VectorXd::Constant(1, 1.0));
        const std::vector<double> steps(5, 1.0);
        CHECK(run_ccd(inst, steps, 5) == doctest::Approx(gd_gap(inst, 1.0, 5)));
    }
    SUBCASE("order permutes the visits") {
        const auto inst = random_instance(2, 3);
        Eigen::Matrix2d P;
        P << 0, 1, 1, 0;
        const QuadraticInstance swapped(P * inst.A() * P, P * inst.b(), P * inst.x0());
        const std::vector<double> steps(4, 0.7);
        CcdOptions opts;
        opts.order = {1, 0};
        CHECK(run_ccd(swapped, steps, 4, opts) == doctest::Approx(run_ccd(inst, steps, 4)));
    }
}

TEST_CASE("Gauss-Seidel") {
    SUBCASE("1x1 and identity systems are solved in one sweep") {
        const QuadraticInstance one(Eigen::MatrixXd::Constant(1, 1, 3.0), Eigen::VectorXd::Constant(1, 1.0),
                                    Eigen::VectorXd::Constant(1, 5.0));
        CHECK(std::abs(run_gauss_seidel(one, 1).back()) <= 1e-15);
        const QuadraticInstance id(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1, 2, 3), Eigen::Vector3d::Zero());
        CHECK(std::abs(run_gauss_seidel(id, 1).back()) <= 1e-15);
    }
    SUBCASE("matches cyclic descent on the scaled gradient") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto inst = random_instance(4, seed, seed == 2);
            const int sweeps = 3;
            const auto gs = gauss_seidel_iterates(inst, sweeps);
            CcdOptions opts;
            opts.diagonal_scaling = true;
            const std::vector<double> steps(4 * sweeps, 1.0);
            const auto cd = ccd_iterates(inst, steps, 4 * sweeps, opts);
            for (int k = 0; k <= sweeps; ++k) CHECK((gs[k] - cd[4 * k]).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SUBCASE("f never increases") {
        for (std::uint64_t seed = 10; seed < 20; ++seed) {
            const auto gaps = run_gauss_seidel(random_instance(4, seed, true), 6);
            for (std::size_t k = 1; k < gaps.size(); ++k) CHECK(gaps[k] <= gaps[k - 1] + 1e-12);
        }
    }
    SUBCASE("zero diagonal is rejected") {
        Eigen::Matrix2d A;
        A << 0, 0, 0, 1;
        CHECK_THROWS(QuadraticInstance(A, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()));
    }
}

TEST_CASE("Huber worst case for gradient descent") {
    for (int N = 1; N <= 10; ++N) {
        CAPTURE(N);
        CHECK(huber_worst_case_gap(N, 1.0, 1.0) == doctest::Approx(1.0 / (4.0 * N + 2.0)).epsilon(1e-12));
        CHECK(huber_worst_case_gap(N, 3.0, 2.0) == doctest::Approx(6.0 / (4.0 * N + 2.0)).epsilon(1e-12));
    }
    const Huber h{2.0, 0.5};
    CHECK(h.grad(0.3) == doctest::Approx(0.6));
    CHECK(h.grad(2.0) == doctest::Approx(1.0));
    CHECK(h.value(2.0) == doctest::Approx(1.0 * 2.0 - 0.5 * 2.0 * 0.25));
}

TEST_CASE("sampler respects the class") {
    std::mt19937_64 rng(77);
    SamplerSpec spec{3, 2.0, {1.0, 0.5, 1.0}, 1.5, Norm::euclidean, true};
    for (int i = 0; i < 20; ++i) {
        const auto inst = sample_instance(spec, rng);
        CHECK(inst.L() <= 2.0 * (1 + 1e-12));
        for (int j = 0; j < 3; ++j) CHECK(inst.A()(j, j) <= spec.ell[j] * (1 + 1e-12));
        CHECK(inst.start_distance2() == doctest::Approx(1.5));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.A());
        CHECK(es.eigenvalues()(0) <= 1e-10);
    }
    spec.norm = Norm::diagonal;
    spec.ell.clear();
    const auto inst = sample_instance(spec, rng);
    CHECK(inst.start_distance2(Norm::diagonal) == doctest::Approx(1.5));
}

TEST_CASE("worst-case search") {
    SearchTarget t{Method::ccd, 2, 4, 2.0, {1.0, 1.0}, std::vector<double>(4, 1.0), 1.0};
    const auto zero = worst_case_search(t, 1.0, 0, 3);
    CHECK(zero.evaluations == 1);
    REQUIRE(zero.instance);
    CHECK(zero.best_gap == doctest::Approx(evaluate(t, *zero.instance)));

    const auto r = worst_case_search(t, 1.0, 60, 3);
    CHECK(r.best_gap >= zero.best_gap);
    CHECK(r.consistent);
    CHECK_FALSE(worst_case_search(t, 0.0, 10, 3).consistent);

    // n = 1: the quadratic family gets within a constant factor of the
    // Huber worst case but cannot exceed it.
    SearchTarget one{Method::ccd, 1, 3, 1.0, {1.0}, std::vector<double>(3, 1.0), 1.0};
    const auto s = worst_case_search(one, 1.0 / 14.0, 200, 5);
    CHECK(s.best_gap <= 1.0 / 14.0);
    CHECK(s.best_gap >= 0.3 / 14.0);
}

TEST_CASE("instance text round trip") {
    const auto inst = random_instance(3, 9, true);
    std::stringstream ss;
    write_instance(ss, inst);
    const auto back = read_instance(ss);
    CHECK(back.A() == inst.A());
    CHECK(back.b() == inst.b());
    CHECK(back.x0() == inst.x0());
    std::stringstream bad("2\n1 0\n0");
    CHECK_THROWS(read_instance(bad));
}
