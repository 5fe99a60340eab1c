#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdpep/symmat.hpp"

#include <random>

using namespace cdpep::linalg;

namespace {

SymMatrix random_sym(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    SymMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a.set(i, j, g(rng));
    return a;
}

SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd m(n, n);
    int i = 0;
    for (const auto& r : rows) {
        int j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return SymMatrix::from_dense(m);
}

double recon_error(const SymMatrix& a, const EigenDecomposition& e) {
    return (e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a.to_dense()).norm();
}

} // namespace

TEST_CASE("storage keeps one triangle") {
    SymMatrix a(3);
    a.set(2, 0, 5.0);
    CHECK(a(0, 2) == 5.0);
    a.add(0, 2, 1.0);
    CHECK(a(2, 0) == 6.0);
    CHECK(a.packed().size() == 6);
    CHECK(a.to_dense().isApprox(a.to_dense().transpose()));
}

TEST_CASE("from_dense symmetrizes") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 4, 3;
    const auto a = SymMatrix::from_dense(m);
    CHECK(a(0, 1) == doctest::Approx(3.0));
}

TEST_CASE("eigen examples") {
    SUBCASE("identity") {
        const auto e = sym_eigen(SymMatrix::identity(3));
        for (int i = 0; i < 3; ++i) CHECK(e.values(i) == doctest::Approx(1.0));
        CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
    }
    SUBCASE("diagonal") {
        const auto e = sym_eigen(SymMatrix::diagonal({2.0, -1.0}));
        CHECK(e.values(0) == doctest::Approx(-1.0));
        CHECK(e.values(1) == doctest::Approx(2.0));
    }
    SUBCASE("swap") {
        const auto e = sym_eigen(from_rows({{0, 1}, {1, 0}}));
        CHECK(e.values(0) == doctest::Approx(-1.0));
        CHECK(e.values(1) == doctest::Approx(1.0));
    }
}

TEST_CASE("eigen reconstruction and orthogonality on random matrices") {
    std::mt19937_64 rng(11);
    for (int n : {1, 2, 5, 17, 60, 200}) {
        CAPTURE(n);
        const auto a = random_sym(n, rng);
        const auto e = sym_eigen(a);
        CHECK(recon_error(a, e) <= 1e-10 * (1.0 + a.frobenius_norm()));
        CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-10 * n);
        for (int i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
    }
}

TEST_CASE("eigen rejects non-finite input") {
    SymMatrix a(2);
    a.set(0, 0, std::nan(""));
    CHECK_THROWS(sym_eigen(a));
}

TEST_CASE("psd projection examples") {
    const auto p = psd_project(SymMatrix::diagonal({1.0, -1.0}));
    CHECK(p(0, 0) == doctest::Approx(1.0));
    CHECK(std::abs(p(1, 1)) < 1e-14);
    CHECK(std::abs(p(0, 1)) < 1e-14);

    CHECK(psd_project(-SymMatrix::identity(2)).frobenius_norm() < 1e-14);

    std::mt19937_64 rng(5);
    const Eigen::MatrixXd b = random_sym(6, rng).to_dense();
    const auto P = SymMatrix::from_dense(b * b.transpose());
    CHECK((psd_project(P) - P).frobenius_norm() <= 1e-10 * (1.0 + P.frobenius_norm()));
}

TEST_CASE("psd projection properties") {
    std::mt19937_64 rng(23);
    for (int n : {2, 7, 30, 100}) {
        CAPTURE(n);
        const auto a = random_sym(n, rng);
        const auto plus = psd_project(a);
        const auto minus = psd_project(-a);
        CHECK(min_eigenvalue(plus) >= -1e-10 * (1.0 + a.frobenius_norm()));
        CHECK((psd_project(plus) - plus).frobenius_norm() <= 1e-9);
        CHECK((plus - minus - a).frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm()));
        CHECK(frob_inner(plus, minus) <= 1e-8 * a.frobenius_norm() * a.frobenius_norm());
    }
}

TEST_CASE("frobenius inner product") {
    CHECK(frob_inner(SymMatrix::identity(2), SymMatrix::identity(2)) == 2.0);
    std::mt19937_64 rng(1);
    CHECK(frob_inner(random_sym(3, rng), SymMatrix::zero(3)) == 0.0);
    CHECK(frob_inner(SymMatrix::diagonal({1, 2}), SymMatrix::diagonal({3, 4})) == 11.0);
    const auto a = from_rows({{1, 2}, {2, 3}});
    const auto b = from_rows({{4, 5}, {5, 6}});
    CHECK(frob_inner(a, b) == 4 + 2 * 10 + 18);
    CHECK(frob_inner(a, b) == frob_inner(b, a));
    CHECK_THROWS(frob_inner(SymMatrix::identity(2), SymMatrix::identity(3)));
}
