#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "gpnodal/complex_matrix.hpp"

namespace gpnodal {

/// Eigenvalues (descending) with orthonormal eigenvector columns and the
/// partition of eigenvalue indices into (near-)degenerate groups.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;
    std::vector<std::vector<int>> groups;

    ComplexMatrix reassemble() const {
        const int n = eigenvectors.dim();
        ComplexMatrix r(n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    r(i, j) += eigenvalues[static_cast<std::size_t>(k)] * eigenvectors(i, k) *
                               std::conj(eigenvectors(j, k));
        return r;
    }
};

inline constexpr double kHermiticityTol = 1e-10;

namespace detail {

/// Cyclic complex Jacobi diagonalization. Fixed sweep order (row by row,
/// lower index first), so the output is deterministic for identical input.
inline void jacobi_hermitian(ComplexMatrix& a, ComplexMatrix& v) {
    const int n = a.dim();
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale += std::norm(a(i, j));
    scale = std::sqrt(scale);
    const double stop = 1e-14 * std::max(1.0, scale);

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * std::norm(a(i, j));
        if (std::sqrt(off) < stop) return;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double m = std::abs(apq);
                if (m == 0.0) continue;
                const double alpha = a(p, p).real();
                const double gamma = a(q, q).real();
                const Complex phase = apq / m;  // a(p,q) = m * phase
                const double ang = 0.5 * std::atan2(2.0 * m, alpha - gamma);
                const double c = std::cos(ang), s = std::sin(ang);
                // Columns of the rotation G (unitary, zeros a(p,q)):
                //   G(:,p) = c*e_p + s*conj(phase)*e_q
                //   G(:,q) = -s*phase*e_p + c*e_q
                const Complex gpp = c, gqp = s * std::conj(phase);
                const Complex gpq = -s * phase, gqq = c;
                // a <- G^dagger a G, applied as row then column updates.
                for (int j = 0; j < n; ++j) {
                    const Complex rp = a(p, j), rq = a(q, j);
                    a(p, j) = std::conj(gpp) * rp + std::conj(gqp) * rq;
                    a(q, j) = std::conj(gpq) * rp + std::conj(gqq) * rq;
                }
                for (int i = 0; i < n; ++i) {
                    const Complex cp = a(i, p), cq = a(i, q);
                    a(i, p) = cp * gpp + cq * gqp;
                    a(i, q) = cp * gpq + cq * gqq;
                }
                for (int i = 0; i < n; ++i) {
                    const Complex vp = v(i, p), vq = v(i, q);
                    v(i, p) = vp * gpp + vq * gqp;
                    v(i, q) = vp * gpq + vq * gqq;
                }
            }
        }
    }
    throw NoConvergence("eig_hermitian: Jacobi sweep cap exceeded");
}

}  // namespace detail

/// Group sorted-descending eigenvalues into runs closer than tol.
inline std::vector<std::vector<int>> group_by_degeneracy(const std::vector<double>& eigenvalues,
                                                         double tol) {
    std::vector<std::vector<int>> groups;
    for (int k = 0; k < static_cast<int>(eigenvalues.size()); ++k) {
        if (!groups.empty() &&
            std::abs(eigenvalues[static_cast<std::size_t>(k)] -
                     eigenvalues[static_cast<std::size_t>(groups.back().back())]) < tol) {
            groups.back().push_back(k);
        } else {
            groups.push_back({k});
        }
    }
    return groups;
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations. Eigenvalues are
/// returned in descending order; ties break on the lowest pre-sort index, so
/// identical input gives identical output. degeneracy_tol < 0 selects the
/// default 1e-9 * max(1, |lambda_max|).
inline SpectralDecomposition eig_hermitian(const ComplexMatrix& m, double degeneracy_tol = -1.0) {
    if (m.hermiticity_defect() > kHermiticityTol)
        throw NotHermitian("eig_hermitian: input is not Hermitian");
    const int n = m.dim();

    // Work on the Hermitian average so round-off asymmetry cannot leak in.
    ComplexMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    ComplexMatrix v = ComplexMatrix::identity(n);
    detail::jacobi_hermitian(a, v);

    std::vector<double> raw(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = a(i, i).real();

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return raw[static_cast<std::size_t>(x)] > raw[static_cast<std::size_t>(y)];
    });

    SpectralDecomposition d{std::vector<double>(static_cast<std::size_t>(n)),
                            ComplexMatrix(n),
                            {}};
    for (int k = 0; k < n; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        d.eigenvalues[static_cast<std::size_t>(k)] = raw[static_cast<std::size_t>(src)];
        for (int i = 0; i < n; ++i) d.eigenvectors(i, k) = v(i, src);
    }

    if (degeneracy_tol < 0.0)
        degeneracy_tol = 1e-9 * std::max(1.0, std::abs(d.eigenvalues.front()));
    d.groups = group_by_degeneracy(d.eigenvalues, degeneracy_tol);
    return d;
}

/// exp(i*s*h) for Hermitian h, via the spectral calculus. Unitary.
inline ComplexMatrix expm_i_hermitian(const ComplexMatrix& h, double s) {
    const SpectralDecomposition d = eig_hermitian(h);
    const int n = h.dim();
    ComplexMatrix r(n);
    for (int k = 0; k < n; ++k) {
        const Complex phase = std::exp(Complex(0.0, s * d.eigenvalues[static_cast<std::size_t>(k)]));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r(i, j) += phase * d.eigenvectors(i, k) * std::conj(d.eigenvectors(j, k));
    }
    return r;
}

/// Principal square root of a PSD Hermitian matrix. Eigenvalues in
/// [-1e-12, 0) are clamped to 0; anything more negative is an error.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const SpectralDecomposition d = eig_hermitian(m);
    const int n = m.dim();
    ComplexMatrix r(n);
    for (int k = 0; k < n; ++k) {
        double lam = d.eigenvalues[static_cast<std::size_t>(k)];
        if (lam < -1e-12) throw NotPSD("psd_sqrt: negative eigenvalue");
        lam = std::max(lam, 0.0);
        const double root = std::sqrt(lam);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r(i, j) += root * d.eigenvectors(i, k) * std::conj(d.eigenvectors(j, k));
    }
    return r;
}

}  // namespace gpnodal
