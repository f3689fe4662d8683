#include <doctest.h>

#include <cmath>

#include "nlsrm/error.hpp"
#include "nlsrm/matrixgen.hpp"
#include "nlsrm/spectral.hpp"
#include "oracles.hpp"

using namespace nlsrm;

TEST_CASE("sym_eig_top examples") {
    Matrix d(2, 2);
    d << 2, 0, 0, 1;
    const auto a = sym_eig_top(d, 2);
    CHECK(a.values(0) == doctest::Approx(2.0));
    CHECK(a.values(1) == doctest::Approx(1.0));
    CHECK(a.vectors.col(0).isApprox(Vector::Unit(2, 0)));
    CHECK(a.vectors.col(1).isApprox(Vector::Unit(2, 1)));

    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    const auto b = sym_eig_top(s, 1);
    CHECK(b.values(0) == doctest::Approx(1.0));
    CHECK(b.vectors(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(b.vectors(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));

    Vector v(3);
    v << 1, 2, 2;
    const auto c = sym_eig_top(v * v.transpose(), 1);
    CHECK(c.values(0) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(c.vectors.col(0).isApprox(v / 3.0, 1e-12));
}

TEST_CASE("sym_eig_top errors") {
    Matrix a(2, 2);
    a << 1, 2, 2.1, 1;
    CHECK_THROWS_AS(sym_eig_top(a, 1), ContractError);
    CHECK_THROWS_AS(operator_norm(a), ContractError);
    CHECK_THROWS_AS(sym_eig_top(Matrix::Identity(3, 3), 4), ParameterError);
    CHECK_THROWS_AS(sym_eig_top(Matrix::Identity(3, 3), 0), ParameterError);
    // Asymmetry below 1e-9 relative is tolerated.
    Matrix near = Matrix::Identity(3, 3);
    near(0, 1) = 1e-12;
    CHECK_NOTHROW(sym_eig_top(near, 1));
}

TEST_CASE("EigenPairs contract on random matrices") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const std::size_t n = 150;
        const Matrix m = sample_wigner(n, Distribution::gaussian(0.2, 1.0), seed);
        const auto e = sym_eig_all(m);
        const double norm = operator_norm(m);
        for (Eigen::Index i = 0; i + 1 < e.size(); ++i) CHECK(e.values(i) >= e.values(i + 1));
        const Matrix gram = e.vectors.transpose() * e.vectors;
        CHECK((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            CHECK(std::abs(e.vectors.col(i).norm() - 1.0) <= 1e-10);
            CHECK(e.residuals(i) <= 1e-8 * norm);
            // sign convention: largest-magnitude entry is positive
            Eigen::Index arg = 0;
            e.vectors.col(i).cwiseAbs().maxCoeff(&arg);
            CHECK(e.vectors(arg, i) > 0.0);
        }
        // reconstruction
        const Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        CHECK(operator_norm(0.5 * ((m - rebuilt) + (m - rebuilt).transpose())) <= 1e-8 * norm);
        // top-k agrees with the full solve
        const auto top = sym_eig_top(m, 5);
        CHECK((top.values - e.values.head(5)).cwiseAbs().maxCoeff() <= 1e-10 * norm);
    }
}

TEST_CASE("Weyl shift") {
    const Matrix m = sample_wigner(80, Distribution::gaussian(0, 1), 9);
    const Vector base = sym_eigenvalues(m);
    const Vector shifted = sym_eigenvalues(m + 2.5 * Matrix::Identity(80, 80));
    CHECK((shifted.array() - base.array() - 2.5).abs().maxCoeff() <= 1e-10 * operator_norm(m) + 1e-12);
}

TEST_CASE("operator_norm") {
    Matrix a(2, 2);
    a << 0, -3, -3, 0;
    CHECK(operator_norm(a) == doctest::Approx(3.0));
    CHECK(operator_norm(Matrix::Zero(4, 4)) == 0.0);
    Vector d(3);
    d << 1, -5, 2;
    CHECK(operator_norm(Matrix(d.asDiagonal())) == doctest::Approx(5.0));
    for (std::uint64_t seed : {4u, 5u}) {
        const Matrix m = sample_wigner(400, Distribution::gaussian(0, 1), seed);
        const double oracle_norm = oracle::power_iteration_norm(m, 10000, static_cast<unsigned>(seed));
        CHECK(std::abs(operator_norm(m) - oracle_norm) <= 1e-6 * oracle_norm);
    }
}

TEST_CASE("alignment") {
    CHECK(alignment(Vector::Unit(3, 0), Vector::Unit(3, 0)) == 1.0);
    CHECK(alignment(Vector::Unit(3, 0), Vector::Unit(3, 1)) == 0.0);
    Vector a(2), b(2);
    a << 1, 1;
    b << 1, 0;
    CHECK(alignment(a, b) == doctest::Approx(0.7071068).epsilon(1e-7));
    CHECK(alignment(-a, b) == doctest::Approx(0.7071068).epsilon(1e-7));
    CHECK_THROWS_AS(alignment(Vector::Zero(2), b), ParameterError);
}

TEST_CASE("esd_histogram") {
    const auto h = esd_histogram(Matrix(Matrix::Zero(4, 4)), 1, {-1.0, 1.0});
    REQUIRE(h.size() == 1);
    CHECK(h[0].center == 0.0);
    CHECK(h[0].density == 0.5);

    Vector ev(4);
    ev << -3, 0.1, 0.2, 1.0;  // 1.0 is the closed right end; -3 is outside
    const auto g = esd_histogram(ev, 2, {0.0, 1.0});
    double mass = 0.0;
    for (const auto& bin : g) mass += bin.density * 0.5;
    CHECK(mass == doctest::Approx(0.75));
    CHECK(g[1].density == doctest::Approx(0.5));  // 1.0 lands in the last bin

    CHECK_THROWS_AS(esd_histogram(ev, 0, {0.0, 1.0}), ParameterError);
    CHECK_THROWS_AS(esd_histogram(ev, 3, {1.0, 1.0}), ParameterError);
}

TEST_CASE("Wigner ESD matches the semicircle") {
    const std::size_t n = 2000;
    const Matrix w = sample_wigner(n, Distribution::gaussian(0, 1), 12) / std::sqrt(double(n));
    const auto h = esd_histogram(w, 40, {-2.2, 2.2});
    double worst = 0.0;
    for (const auto& bin : h) worst = std::max(worst, std::abs(bin.density - oracle::semicircle_density(bin.center, 1.0)));
    CAPTURE(worst);
    CHECK(worst <= 0.05);
}

TEST_CASE("large solves are validated") {
    // Faulty BLAS kernels typically show up only above a few hundred rows.
    const std::size_t n = 1000;
    const Matrix m = sample_wigner(n, Distribution::gaussian(0, 1), 8) / std::sqrt(double(n));
    const auto top = sym_eig_top(m, 3);
    CHECK(top.residuals.maxCoeff() <= 1e-10);
    const Vector all = sym_eigenvalues(m);
    CHECK(all.sum() == doctest::Approx(m.trace()).epsilon(1e-10));
    CHECK(std::abs(all(0) - top.values(0)) <= 1e-10);
    MESSAGE("eigensolver fallbacks so far: " << eigensolver_fallback_count());
}
