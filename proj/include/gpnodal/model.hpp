#pragma once

#include <string>

#include "gpnodal/complex_matrix.hpp"
#include "gpnodal/spectral.hpp"

namespace gpnodal {

// Fixed basis ordering for the two-qubit space: |11>, |10>, |01>, |00>
// (first qubit slowest). Single-qubit ordering is {|1>, |0>} with
// sigma_z|1> = +|1>, sigma_y|0> = i|1>, sigma_y|1> = -i|0>.
inline constexpr int kIdx11 = 0;
inline constexpr int kIdx10 = 1;
inline constexpr int kIdx01 = 2;
inline constexpr int kIdx00 = 3;

inline ComplexMatrix pauli_y() {
    ComplexMatrix m(2);
    m(0, 1) = Complex(0.0, 1.0);
    m(1, 0) = Complex(0.0, -1.0);
    return m;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix m(2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

enum class StateVariant { phi, psi };
enum class HamiltonianKind { free, ising };

inline std::string to_string(StateVariant v) { return v == StateVariant::phi ? "phi" : "psi"; }
inline std::string to_string(HamiltonianKind k) {
    return k == HamiltonianKind::free ? "free" : "ising";
}

/// Precession frequencies, Ising coupling strength and evolution time.
/// The rescaled coupling J = g/omega1 is meaningful when omega1 == omega2.
struct ModelParams {
    double omega1 = 1.0;
    double omega2 = 1.0;
    double g = 0.0;
    double t = kPi;

    void validate() const {
        if (!(omega1 > 0.0)) throw std::invalid_argument("omega1 must be > 0");
        if (!(omega2 > 0.0)) throw std::invalid_argument("omega2 must be > 0");
        if (!(g >= 0.0)) throw std::invalid_argument("g must be >= 0");
        if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
    }

    double coupling_j() const { return g / omega1; }
};

/// Parameters of the initial mixed state: the purity r in (0, 1], the mixing
/// angle theta and the relative phase beta (both radians, pi-periodic).
struct StateParams {
    StateVariant variant = StateVariant::phi;
    double r = 1.0;
    double theta = 0.0;
    double beta = 0.0;

    void validate() const {
        if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("r must be in (0, 1]");
        if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
        if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
    }
};

/// (omega1/2) sigma_y x I + (omega2/2) I x sigma_y. Traceless, zero diagonal.
inline ComplexMatrix hamiltonian_free(const ModelParams& p) {
    const ComplexMatrix sy = pauli_y();
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    return 0.5 * Complex(p.omega1) * kron(sy, i2) + 0.5 * Complex(p.omega2) * kron(i2, sy);
}

/// Full coupled Hamiltonian: the free part plus (g/4) sigma_z x sigma_z.
inline ComplexMatrix hamiltonian_ising(const ModelParams& p) {
    const ComplexMatrix sz = pauli_z();
    return hamiltonian_free(p) + 0.25 * Complex(p.g) * kron(sz, sz);
}

inline ComplexMatrix hamiltonian(const ModelParams& p, HamiltonianKind kind) {
    return kind == HamiltonianKind::free ? hamiltonian_free(p) : hamiltonian_ising(p);
}

/// The pure state the mixture is built around:
///   phi: cos(theta) e^{i beta} |11> + sin(theta) e^{-i beta} |00>
///   psi: cos(theta) e^{i beta} |10> + sin(theta) e^{-i beta} |01>
inline ComplexVector state_vector(const StateParams& s) {
    ComplexVector v(4, 0.0);
    const Complex a = std::cos(s.theta) * std::exp(Complex(0.0, s.beta));
    const Complex b = std::sin(s.theta) * std::exp(Complex(0.0, -s.beta));
    if (s.variant == StateVariant::phi) {
        v[kIdx11] = a;
        v[kIdx00] = b;
    } else {
        v[kIdx10] = a;
        v[kIdx01] = b;
    }
    return v;
}

/// rho(0) = (1-r)/4 I + r |Phi><Phi|. Trace 1, PSD, eigenvalues
/// {(1+3r)/4, (1-r)/4 (x3)}.
inline ComplexMatrix build_state(const StateParams& s) {
    s.validate();
    const double w = 0.25 * (1.0 - s.r);
    ComplexMatrix rho = w * ComplexMatrix::identity(4) + Complex(s.r) * projector(state_vector(s));
    return rho;
}

/// Analytic eigendecomposition of build_state: the nondegenerate |Phi| with
/// eigenvalue (1+3r)/4 (column 0), then an explicit orthonormal basis of the
/// triply degenerate complement with eigenvalue (1-r)/4. The in-pair
/// complement vector is sin(theta) e^{i beta}|11> - cos(theta) e^{-i beta}|00>
/// (phi variant; psi swaps the pair to {|10>, |01>}).
inline SpectralDecomposition state_eigenbasis(const StateParams& s) {
    s.validate();
    SpectralDecomposition d{{0.25 * (1.0 + 3.0 * s.r), 0.25 * (1.0 - s.r), 0.25 * (1.0 - s.r),
                             0.25 * (1.0 - s.r)},
                            ComplexMatrix(4),
                            {{0}, {1, 2, 3}}};
    const ComplexVector phi = state_vector(s);
    const Complex a = std::sin(s.theta) * std::exp(Complex(0.0, s.beta));
    const Complex b = -std::cos(s.theta) * std::exp(Complex(0.0, -s.beta));
    const int hi = s.variant == StateVariant::phi ? kIdx11 : kIdx10;
    const int lo = s.variant == StateVariant::phi ? kIdx00 : kIdx01;
    const int rest0 = s.variant == StateVariant::phi ? kIdx10 : kIdx11;
    const int rest1 = s.variant == StateVariant::phi ? kIdx01 : kIdx00;
    for (int i = 0; i < 4; ++i) d.eigenvectors(i, 0) = phi[static_cast<std::size_t>(i)];
    d.eigenvectors(hi, 1) = a;
    d.eigenvectors(lo, 1) = b;
    d.eigenvectors(rest0, 2) = 1.0;
    d.eigenvectors(rest1, 3) = 1.0;
    return d;
}

}  // namespace gpnodal
