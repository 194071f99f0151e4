#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gpnodal/complex_matrix.hpp"
#include "gpnodal/spectral.hpp"

using namespace gpnodal;

namespace {

ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix h(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Complex z(g(rng), i == j ? 0.0 : g(rng));
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    return h;
}

}  // namespace

TEST_CASE("matrix basics") {
    ComplexMatrix a(2);
    a(0, 0) = Complex(1.0, 2.0);
    a(0, 1) = Complex(0.0, -1.0);
    a(1, 0) = 3.0;
    a(1, 1) = Complex(-1.0, 0.5);

    SECTION("adjoint conjugate-transposes") {
        const ComplexMatrix ad = a.adjoint();
        CHECK(ad(0, 0) == Complex(1.0, -2.0));
        CHECK(ad(1, 0) == Complex(0.0, 1.0));
        CHECK(ad(0, 1) == Complex(3.0, 0.0));
    }
    SECTION("trace sums the diagonal") {
        CHECK(a.trace() == Complex(0.0, 2.5));
    }
    SECTION("identity is multiplicative unit") {
        const ComplexMatrix p = a * ComplexMatrix::identity(2);
        CHECK((p - a).max_abs() == 0.0);
    }
    SECTION("dimension mismatch throws") {
        CHECK_THROWS_AS(a * ComplexMatrix::identity(3), BadDimension);
        CHECK_THROWS_AS(ComplexMatrix(0), BadDimension);
    }
    SECTION("hermiticity defect is zero only for Hermitian input") {
        CHECK(ComplexMatrix::identity(2).hermiticity_defect() == 0.0);
        CHECK(a.hermiticity_defect() > 1.0);
    }
}

TEST_CASE("kron dimensions and block structure") {
    ComplexMatrix a(2), b(2);
    a(0, 0) = 2.0;
    a(1, 1) = 3.0;
    b(0, 1) = 1.0;
    b(1, 0) = 1.0;
    const ComplexMatrix k = kron(a, b);
    REQUIRE(k.dim() == 4);
    CHECK(k(0, 1) == Complex(2.0));
    CHECK(k(1, 0) == Complex(2.0));
    CHECK(k(2, 3) == Complex(3.0));
    CHECK(k(3, 2) == Complex(3.0));
    CHECK(k(0, 2) == Complex(0.0));
}

TEST_CASE("partial transpose") {
    std::mt19937_64 rng(7);
    const ComplexMatrix m = random_hermitian(4, rng);

    SECTION("involution") {
        CHECK((partial_transpose_2(partial_transpose_2(m)) - m).max_abs() == 0.0);
    }
    SECTION("preserves trace and hermiticity") {
        const ComplexMatrix pt = partial_transpose_2(m);
        CHECK(std::abs(pt.trace() - m.trace()) < 1e-15);
        CHECK(pt.hermiticity_defect() < 1e-15);
    }
    SECTION("Bell state spectrum is {1/2, 1/2, 1/2, -1/2}") {
        ComplexVector bell(4, 0.0);
        bell[0] = 1.0 / std::sqrt(2.0);
        bell[3] = 1.0 / std::sqrt(2.0);
        const SpectralDecomposition d = eig_hermitian(partial_transpose_2(projector(bell)));
        CHECK(d.eigenvalues[0] == Catch::Approx(0.5).margin(1e-14));
        CHECK(d.eigenvalues[1] == Catch::Approx(0.5).margin(1e-14));
        CHECK(d.eigenvalues[2] == Catch::Approx(0.5).margin(1e-14));
        CHECK(d.eigenvalues[3] == Catch::Approx(-0.5).margin(1e-14));
    }
    SECTION("rejects wrong dimension") {
        CHECK_THROWS_AS(partial_transpose_2(ComplexMatrix(3)), BadDimension);
    }
}

TEST_CASE("eig_hermitian fixed cases") {
    SECTION("diagonal input") {
        ComplexMatrix d(3);
        d(0, 0) = -1.0;
        d(1, 1) = 5.0;
        d(2, 2) = 2.0;
        const SpectralDecomposition s = eig_hermitian(d);
        CHECK(s.eigenvalues == std::vector<double>{5.0, 2.0, -1.0});
    }
    SECTION("sigma_y has eigenvalues +-1") {
        ComplexMatrix sy(2);
        sy(0, 1) = Complex(0.0, 1.0);
        sy(1, 0) = Complex(0.0, -1.0);
        const SpectralDecomposition s = eig_hermitian(sy);
        CHECK(s.eigenvalues[0] == Catch::Approx(1.0).margin(1e-14));
        CHECK(s.eigenvalues[1] == Catch::Approx(-1.0).margin(1e-14));
    }
    SECTION("identity groups all eigenvalues together") {
        const SpectralDecomposition s = eig_hermitian(ComplexMatrix::identity(4));
        REQUIRE(s.groups.size() == 1);
        CHECK(s.groups[0] == std::vector<int>{0, 1, 2, 3});
    }
    SECTION("non-Hermitian input throws") {
        ComplexMatrix m(2);
        m(0, 1) = 1.0;
        CHECK_THROWS_AS(eig_hermitian(m), NotHermitian);
    }
}

TEST_CASE("eig_hermitian random-matrix properties") {
    std::mt19937_64 rng(20240901);
    double worst_reassemble = 0.0, worst_ortho = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const ComplexMatrix h = random_hermitian(n, rng);
        const SpectralDecomposition d = eig_hermitian(h);
        worst_reassemble = std::max(worst_reassemble, (d.reassemble() - h).max_abs());
        worst_ortho = std::max(
            worst_ortho,
            (d.eigenvectors.adjoint() * d.eigenvectors - ComplexMatrix::identity(n)).max_abs());
        for (std::size_t k = 1; k < d.eigenvalues.size(); ++k)
            REQUIRE(d.eigenvalues[k - 1] >= d.eigenvalues[k]);
    }
    CHECK(worst_reassemble < 1e-12);
    CHECK(worst_ortho < 1e-13);
}

TEST_CASE("eig_hermitian is deterministic") {
    std::mt19937_64 rng(3);
    const ComplexMatrix h = random_hermitian(5, rng);
    const SpectralDecomposition a = eig_hermitian(h);
    const SpectralDecomposition b = eig_hermitian(h);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK((a.eigenvectors - b.eigenvectors).max_abs() == 0.0);
}

TEST_CASE("degeneracy grouping") {
    CHECK(group_by_degeneracy({3.0, 3.0, 1.0}, 1e-9) ==
          std::vector<std::vector<int>>{{0, 1}, {2}});
    CHECK(group_by_degeneracy({3.0, 2.0, 1.0}, 1e-9) ==
          std::vector<std::vector<int>>{{0}, {1}, {2}});
    CHECK(group_by_degeneracy({1.0, 1.0 - 1e-12, 1.0 - 2e-12}, 1e-9) ==
          std::vector<std::vector<int>>{{0, 1, 2}});
}

TEST_CASE("expm_i_hermitian") {
    SECTION("diagonal phases for sigma_z") {
        ComplexMatrix sz(2);
        sz(0, 0) = 1.0;
        sz(1, 1) = -1.0;
        const double s = 0.7;
        const ComplexMatrix u = expm_i_hermitian(sz, s);
        CHECK(std::abs(u(0, 0) - std::exp(Complex(0.0, s))) < 1e-15);
        CHECK(std::abs(u(1, 1) - std::exp(Complex(0.0, -s))) < 1e-15);
        CHECK(std::abs(u(0, 1)) < 1e-15);
    }
    SECTION("unitarity on random input") {
        std::mt19937_64 rng(11);
        for (int rep = 0; rep < 50; ++rep) {
            const ComplexMatrix h = random_hermitian(4, rng);
            const ComplexMatrix u = expm_i_hermitian(h, 1.3);
            CHECK((u.adjoint() * u - ComplexMatrix::identity(4)).max_abs() < 1e-13);
        }
    }
    SECTION("group law exp(iH(a+b)) = exp(iHa) exp(iHb)") {
        std::mt19937_64 rng(13);
        const ComplexMatrix h = random_hermitian(4, rng);
        const ComplexMatrix lhs = expm_i_hermitian(h, 0.9);
        const ComplexMatrix rhs = expm_i_hermitian(h, 0.4) * expm_i_hermitian(h, 0.5);
        CHECK((lhs - rhs).max_abs() < 1e-13);
    }
}

TEST_CASE("psd_sqrt") {
    SECTION("square of the root reproduces the matrix") {
        std::mt19937_64 rng(17);
        for (int rep = 0; rep < 50; ++rep) {
            const ComplexMatrix h = random_hermitian(4, rng);
            const ComplexMatrix psd = h * h.adjoint();  // PSD by construction
            const ComplexMatrix s = psd_sqrt(psd);
            CHECK((s * s - psd).max_abs() < 1e-11);
            CHECK(s.hermiticity_defect() < 1e-12);
        }
    }
    SECTION("rejects indefinite input") {
        ComplexMatrix m(2);
        m(0, 0) = 1.0;
        m(1, 1) = -0.5;
        CHECK_THROWS_AS(psd_sqrt(m), NotPSD);
    }
    SECTION("clamps tiny negative eigenvalues") {
        ComplexMatrix m(2);
        m(0, 0) = 1.0;
        m(1, 1) = -1e-13;
        const ComplexMatrix s = psd_sqrt(m);
        CHECK(std::abs(s(1, 1)) < 1e-6);
    }
}
