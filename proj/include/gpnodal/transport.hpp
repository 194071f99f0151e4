#pragma once

#include "gpnodal/complex_matrix.hpp"
#include "gpnodal/model.hpp"
#include "gpnodal/spectral.hpp"

namespace gpnodal {

/// Reference eigenbasis (with its degeneracy grouping), the Hamiltonian that
/// drives the evolution, and the evolution time. Everything the corrector
/// V(t) needs.
struct ParallelFrame {
    SpectralDecomposition basis;
    ComplexMatrix hamiltonian;
    double t = 0.0;
};

/// U(t) = exp(-i H t), hbar = 1.
inline ComplexMatrix evolution_operator(const ComplexMatrix& h, double t) {
    return expm_i_hermitian(h, -t);
}

/// The block-diagonal corrector V(t) in the frame basis: each degenerate
/// group G gets exp(+i t M) with M the restriction of H to span(G) in the
/// group basis; each nondegenerate |k> gets the diagonal phase
/// e^{+i <k|H|k> t}. Cross-group entries are zero. Returned in the
/// computational basis. The +i sign pairs with U(t) = e^{-iHt} so that V
/// cancels the dynamical phases U accumulates in the frame.
inline ComplexMatrix parallel_corrector(const ParallelFrame& frame) {
    const int n = frame.hamiltonian.dim();
    const ComplexMatrix& w = frame.basis.eigenvectors;
    ComplexMatrix v(n);
    for (const std::vector<int>& group : frame.basis.groups) {
        const int gsz = static_cast<int>(group.size());
        if (gsz == 1) {
            const int k = group.front();
            // <k|H|k> is real for Hermitian H.
            Complex e = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    e += std::conj(w(i, k)) * frame.hamiltonian(i, j) * w(j, k);
            const Complex phase = std::exp(Complex(0.0, frame.t * e.real()));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) v(i, j) += phase * w(i, k) * std::conj(w(j, k));
            continue;
        }
        ComplexMatrix m(gsz);
        for (int a = 0; a < gsz; ++a)
            for (int b = 0; b < gsz; ++b) {
                Complex e = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        e += std::conj(w(i, group[static_cast<std::size_t>(a)])) *
                             frame.hamiltonian(i, j) * w(j, group[static_cast<std::size_t>(b)]);
                m(a, b) = e;
            }
        const ComplexMatrix block = expm_i_hermitian(m, frame.t);
        for (int a = 0; a < gsz; ++a)
            for (int b = 0; b < gsz; ++b) {
                const int ka = group[static_cast<std::size_t>(a)];
                const int kb = group[static_cast<std::size_t>(b)];
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        v(i, j) += block(a, b) * w(i, ka) * std::conj(w(j, kb));
            }
    }
    return v;
}

/// U_par(t) = U(t) V(t) for the eigenbasis of rho(0) built from the state
/// parameters. Unitary; removes dynamical phases in that eigenbasis.
inline ComplexMatrix parallel_evolution(const StateParams& state, const ModelParams& model,
                                        HamiltonianKind kind) {
    model.validate();
    const ComplexMatrix h = hamiltonian(model, kind);
    const ParallelFrame frame{state_eigenbasis(state), h, model.t};
    return evolution_operator(h, model.t) * parallel_corrector(frame);
}

/// Same construction with the frame taken from the eigenbasis of an
/// arbitrary reference density matrix (used for the second leg of the
/// two-index off-diagonal phase, where the reference is rho(t)).
inline ComplexMatrix parallel_evolution_at(const ComplexMatrix& reference,
                                           const ModelParams& model, HamiltonianKind kind) {
    model.validate();
    if (reference.hermiticity_defect() > 1e-10)
        throw InvalidDensityMatrix("reference is not Hermitian");
    if (std::abs(reference.trace() - Complex(1.0)) > 1e-10)
        throw InvalidDensityMatrix("reference trace is not 1");
    SpectralDecomposition basis = eig_hermitian(reference);
    if (basis.eigenvalues.back() < -1e-10)
        throw InvalidDensityMatrix("reference has a negative eigenvalue");
    const ComplexMatrix h = hamiltonian(model, kind);
    const ParallelFrame frame{std::move(basis), h, model.t};
    return evolution_operator(h, model.t) * parallel_corrector(frame);
}

}  // namespace gpnodal
