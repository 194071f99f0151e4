#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gpnodal/selftest.hpp"
#include "gpnodal/transport.hpp"

using namespace gpnodal;

namespace {

const ModelParams kFree{1.0, 1.0, 0.0, kPi};

StateParams random_state(std::mt19937_64& rng, StateVariant v) {
    std::uniform_real_distribution<double> ur(0.05, 1.0), ua(0.0, kPi);
    return {v, ur(rng), ua(rng), ua(rng)};
}

}  // namespace

TEST_CASE("evolution operator") {
    const ComplexMatrix h = hamiltonian_free(kFree);
    SECTION("unitary") {
        const ComplexMatrix u = evolution_operator(h, 0.9);
        CHECK((u.adjoint() * u - ComplexMatrix::identity(4)).max_abs() < 1e-13);
    }
    SECTION("t=0 is the identity") {
        CHECK((evolution_operator(h, 0.0) - ComplexMatrix::identity(4)).max_abs() < 1e-14);
    }
    SECTION("omega*t = pi is antidiagonal [1, -1, -1, 1]") {
        // exp(-i pi sigma_y / 2) = [[0, 1], [-1, 0]] on {|1>, |0>}; the
        // two-qubit product flips both qubits with these signs.
        const ComplexMatrix u = evolution_operator(h, kPi);
        CHECK(std::abs(u(kIdx00, kIdx11) - Complex(1.0)) < 1e-13);
        CHECK(std::abs(u(kIdx01, kIdx10) - Complex(-1.0)) < 1e-13);
        CHECK(std::abs(u(kIdx10, kIdx01) - Complex(-1.0)) < 1e-13);
        CHECK(std::abs(u(kIdx11, kIdx00) - Complex(1.0)) < 1e-13);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(u(i, i)) < 1e-13);
    }
}

TEST_CASE("parallel evolution is unitary") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> uj(0.0, 0.5);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const StateParams s = random_state(rng, rep % 2 ? StateVariant::psi : StateVariant::phi);
        const ModelParams ising{1.0, 1.0, uj(rng), kPi};
        for (HamiltonianKind k : {HamiltonianKind::free, HamiltonianKind::ising}) {
            const ComplexMatrix u =
                parallel_evolution(s, k == HamiltonianKind::free ? kFree : ising, k);
            worst =
                std::max(worst, (u.adjoint() * u - ComplexMatrix::identity(4)).max_abs());
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("corrector cancels dynamical phases (finite differences)") {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> uj(0.0, 0.5);
    double worst = 0.0;
    for (int rep = 0; rep < 25; ++rep) {
        const StateParams s = random_state(rng, rep % 2 ? StateVariant::psi : StateVariant::phi);
        worst = std::max(worst, transport_defect(s, kFree, HamiltonianKind::free));
        const ModelParams ising{1.0, 1.0, uj(rng), kPi};
        worst = std::max(worst, transport_defect(s, ising, HamiltonianKind::ising));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("corrector is block diagonal in the frame basis") {
    std::mt19937_64 rng(103);
    const StateParams s = random_state(rng, StateVariant::phi);
    const ComplexMatrix h = hamiltonian_free(kFree);
    const SpectralDecomposition basis = state_eigenbasis(s);
    const ComplexMatrix v = parallel_corrector({basis, h, kPi});
    // <k|V|l> must vanish when k and l belong to different groups.
    const ComplexMatrix& w = basis.eigenvectors;
    for (int l = 1; l < 4; ++l) {
        Complex cross = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) cross += std::conj(w(i, 0)) * v(i, j) * w(j, l);
        CHECK(std::abs(cross) < 1e-13);
    }
}

TEST_CASE("frame independence of the trace") {
    std::mt19937_64 rng(104);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const StateParams s = random_state(rng, rep % 2 ? StateVariant::psi : StateVariant::phi);
        const Complex base = (parallel_evolution(s, kFree, HamiltonianKind::free) *
                              build_state(s))
                                 .trace();
        const ComplexMatrix rot = gpnodal::detail::random_unitary(3, rng);
        const Complex alt = trace_with_rotated_frame(s, kFree, HamiltonianKind::free, rot);
        worst = std::max(worst, std::abs(base - alt));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("analytic and numeric frames agree") {
    // parallel_evolution (analytic eigenbasis) and parallel_evolution_at
    // (numeric eigendecomposition of the same rho) must give the same trace.
    std::mt19937_64 rng(105);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const StateParams s = random_state(rng, rep % 2 ? StateVariant::psi : StateVariant::phi);
        const ComplexMatrix rho = build_state(s);
        const Complex a = (parallel_evolution(s, kFree, HamiltonianKind::free) * rho).trace();
        const Complex b =
            (parallel_evolution_at(rho, kFree, HamiltonianKind::free) * rho).trace();
        worst = std::max(worst, std::abs(a - b));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("parallel_evolution_at validates the reference") {
    ComplexMatrix bad(4);
    bad(0, 1) = 1.0;  // not Hermitian
    CHECK_THROWS_AS(parallel_evolution_at(bad, kFree, HamiltonianKind::free),
                    InvalidDensityMatrix);
    ComplexMatrix wrong_trace = ComplexMatrix::identity(4);  // trace 4
    CHECK_THROWS_AS(parallel_evolution_at(wrong_trace, kFree, HamiltonianKind::free),
                    InvalidDensityMatrix);
    ComplexMatrix negative(4);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(parallel_evolution_at(negative, kFree, HamiltonianKind::free),
                    InvalidDensityMatrix);
}
