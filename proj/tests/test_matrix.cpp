#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dwellcert/matrix.hpp"
#include "test_util.hpp"

using namespace dwellcert;
using testutil::Rng;

TEST_CASE("expm at t=0 is the identity") {
    Matrix m{{3.0, -2.0}, {7.0, 0.5}};
    CHECK(testutil::rel_err(expm(m, 0.0), Matrix::identity(2)) < 1e-15);
}

TEST_CASE("expm of a diagonal matrix exponentiates the diagonal") {
    Matrix m{{-0.3, 0.0}, {0.0, 1.7}};
    Matrix e = expm(m, 1.0);
    CHECK(e(0, 0) == doctest::Approx(std::exp(-0.3)).epsilon(1e-13));
    CHECK(e(1, 1) == doctest::Approx(std::exp(1.7)).epsilon(1e-13));
    CHECK(std::abs(e(0, 1)) < 1e-14);
    CHECK(std::abs(e(1, 0)) < 1e-14);
}

TEST_CASE("expm of a nilpotent matrix truncates the series") {
    Matrix m{{0.0, 1.0}, {0.0, 0.0}};
    Matrix e = expm(m, 1.0);
    CHECK(e(0, 0) == doctest::Approx(1.0));
    CHECK(e(0, 1) == doctest::Approx(1.0));
    CHECK(e(1, 0) == doctest::Approx(0.0));
    CHECK(e(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("expm matches the Taylor oracle on a stiff flow matrix") {
    Matrix a{{-1.0, 100.0}, {-1.0, -1.0}};
    const double t = 2.1254;
    Matrix want = testutil::expm_taylor(a, t);
    CHECK(testutil::rel_err(expm(a, t), want) < 1e-11);
}

TEST_CASE("expm rejects non-square input") {
    Matrix m(2, 3);
    CHECK_THROWS_AS(expm(m, 1.0), std::invalid_argument);
}

TEST_CASE("expm semigroup and inverse identities on random matrices") {
    Rng rng(117);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rng.next() % 3;  // 2..4
        Matrix m = testutil::random_matrix(rng, n, 1.0);
        if (m.norm1() > 5.0) m *= 5.0 / m.norm1();
        const double s = rng.uniform(0.1, 1.5), t = rng.uniform(0.1, 1.5);
        CHECK(testutil::rel_err(expm(m, s) * expm(m, t), expm(m, s + t)) < 1e-9);
        CHECK(testutil::rel_err(expm(-1.0 * m, t) * expm(m, t), Matrix::identity(n)) < 1e-9);
    }
}

TEST_CASE("sym_eig on known 2x2 matrices") {
    auto id = sym_eig(SymMatrix::identity(2));
    CHECK(id[0] == doctest::Approx(1.0));
    CHECK(id[1] == doctest::Approx(1.0));

    SymMatrix s(2);
    s.set(0, 1, 1.0);
    auto flip = sym_eig(s);
    CHECK(flip[0] == doctest::Approx(-1.0));
    CHECK(flip[1] == doctest::Approx(1.0));
}

TEST_CASE("minimal dwell-time Lyapunov matrix from the literature is positive definite") {
    SymMatrix p(2);
    p.set(0, 0, 0.6351);
    p.set(0, 1, 0.0601);
    p.set(1, 1, 0.3649);
    auto ev = sym_eig(p);
    CHECK(ev[0] > 0.0);
    CHECK(ev[1] > 0.0);
}

TEST_CASE("sym_eig reconstruction residual is tiny") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.next() % 7;  // 2..8
        SymMatrix s = testutil::random_sym(rng, n, 3.0);
        EigResult r = sym_eig_full(s);
        Matrix lam(n, n);
        for (std::size_t i = 0; i < n; ++i) lam(i, i) = r.values[i];
        Matrix recon = r.vectors * lam * r.vectors.transposed();
        CHECK((recon - s.to_matrix()).frobenius() <= 1e-10 * (1.0 + s.to_matrix().frobenius()));
    }
}

TEST_CASE("sym_eig shift property") {
    Rng rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.next() % 5;
        SymMatrix s = testutil::random_sym(rng, n, 2.0);
        const double c = rng.uniform(-3.0, 3.0);
        SymMatrix shifted = s;
        for (std::size_t i = 0; i < n; ++i) shifted.add(i, i, c);
        auto e0 = sym_eig(s);
        auto e1 = sym_eig(shifted);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(e1[i] - e0[i] == doctest::Approx(c).epsilon(0).scale(1).epsilon(1e-10));
    }
}

TEST_CASE("is_pd basic cases") {
    CHECK(is_pd(SymMatrix::identity(3), 0.5));
    SymMatrix neg = SymMatrix::identity(3);
    neg *= -1.0;
    CHECK_FALSE(is_pd(neg, 0.0));
    CHECK_THROWS_AS(is_pd(SymMatrix::identity(2), -1.0), std::invalid_argument);
}

TEST_CASE("is_pd agrees with the eigenvalue sign on random matrices") {
    Rng rng(5150);
    int used = 0;
    for (int rep = 0; rep < 200 && used < 60; ++rep) {
        const std::size_t n = 2 + rng.next() % 5;
        SymMatrix s = testutil::random_sym(rng, n, 2.0);
        const double mn = sym_eig(s)[0];
        if (std::abs(mn) <= 1e-8) continue;
        ++used;
        CHECK(is_pd(s, 0.0) == (mn > 0.0));
    }
    CHECK(used >= 40);
}

TEST_CASE("spectral radius of the identity is one") {
    CHECK(spectral_radius(Matrix::identity(2)) == doctest::Approx(1.0));
}

TEST_CASE("spectral radius inside and at the edge of the periodic stability band") {
    // flow/jump pair whose periodic stability band is (0.1824, 0.5776)
    Matrix a{{-1.0, 0.1}, {0.0, 1.2}};
    Matrix j{{1.2, 0.0}, {0.0, 0.5}};
    CHECK(spectral_radius(expm(a, 0.3) * j) < 1.0);
    CHECK(spectral_radius(expm(a, 0.1824) * j) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(spectral_radius(expm(a, 0.5776) * j) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("spectral radius via QR matches products of known spectra") {
    // Block-diagonal-by-similarity matrices with known eigenvalues.
    Rng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 3 + rng.next() % 6;  // 3..8
        std::vector<double> eigs(n);
        double want = 0.0;
        Matrix d(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            eigs[i] = rng.uniform(-4.0, 4.0);
            d(i, i) = eigs[i];
            want = std::max(want, std::abs(eigs[i]));
        }
        Matrix v = testutil::random_matrix(rng, n, 1.0);
        for (std::size_t i = 0; i < n; ++i) v(i, i) += 3.0;  // keep it invertible
        Matrix m = v * d * lu_solve(v, Matrix::identity(n));
        CHECK(spectral_radius(m) == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("spectral radius handles complex pairs") {
    // rotation * scale: eigenvalues r e^{+-i phi}
    const double r = 0.83, phi = 0.7;
    Matrix m{{r * std::cos(phi), -r * std::sin(phi)}, {r * std::sin(phi), r * std::cos(phi)}};
    CHECK(spectral_radius(m) == doctest::Approx(r).epsilon(1e-12));
    // embed in 4x4 to exercise the QR path
    Matrix big(4, 4);
    big(0, 0) = m(0, 0);
    big(0, 1) = m(0, 1);
    big(1, 0) = m(1, 0);
    big(1, 1) = m(1, 1);
    big(2, 2) = 0.2;
    big(3, 3) = -0.4;
    big(0, 2) = 1.3;
    big(1, 3) = -2.0;
    CHECK(spectral_radius(big) == doctest::Approx(r).epsilon(1e-10));
}

TEST_CASE("SymMatrix::from rejects asymmetry") {
    Matrix m{{1.0, 2.0}, {0.0, 1.0}};
    CHECK_THROWS_AS(SymMatrix::from(m), std::invalid_argument);
    CHECK(SymMatrix::sym_part(m)(0, 1) == doctest::Approx(1.0));
}
