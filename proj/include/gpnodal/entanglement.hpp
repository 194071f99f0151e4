#pragma once

#include "gpnodal/complex_matrix.hpp"
#include "gpnodal/model.hpp"
#include "gpnodal/spectral.hpp"

namespace gpnodal {

/// Outcome of the Peres (PPT) test: the smallest eigenvalue of the partial
/// transpose and the entanglement verdict it implies for a 2x2 system.
struct SeparabilityVerdict {
    double min_pt_eigenvalue = 0.0;
    bool entangled = false;
};

inline SeparabilityVerdict ppt_check(const ComplexMatrix& rho) {
    if (rho.dim() != 4) throw BadDimension("ppt_check: dim must be 4");
    if (rho.hermiticity_defect() > 1e-10)
        throw InvalidDensityMatrix("ppt_check: rho is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0)) > 1e-10)
        throw InvalidDensityMatrix("ppt_check: trace is not 1");
    const SpectralDecomposition d = eig_hermitian(rho);
    if (d.eigenvalues.back() < -1e-10)
        throw InvalidDensityMatrix("ppt_check: rho has a negative eigenvalue");
    const SpectralDecomposition pt = eig_hermitian(partial_transpose_2(rho));
    const double min_ev = pt.eigenvalues.back();
    return {min_ev, min_ev < -1e-12};
}

/// Closed-form separability threshold r = 1/(1 + 2|sin 2theta|).
inline double separability_boundary(double theta) {
    return 1.0 / (1.0 + 2.0 * std::abs(std::sin(2.0 * theta)));
}

/// Independent threshold: bisect r on the sign of the minimal partial
/// transpose eigenvalue of build_state at beta = 0. Returns 1 when the
/// state is PPT for all r (sin 2theta = 0).
inline double boundary_by_bisection(double theta, StateVariant variant) {
    auto min_pt = [&](double r) {
        return ppt_check(build_state({variant, r, theta, 0.0})).min_pt_eigenvalue;
    };
    if (min_pt(1.0) >= -1e-12) return 1.0;
    double lo = 1e-12, hi = 1.0;  // PPT at lo, NPT at hi
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (min_pt(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace gpnodal
