#pragma once

#include <random>
#include <string>
#include <vector>

#include "gpnodal/csv.hpp"
#include "gpnodal/entanglement.hpp"
#include "gpnodal/phases.hpp"
#include "gpnodal/scanner.hpp"

namespace gpnodal {

struct SelfTestCheck {
    std::string name;
    bool pass = false;
    double metric = 0.0;  // worst observed deviation (check-specific meaning)
    double tolerance = 0.0;
    std::string detail;
};

struct SelfTestReport {
    std::vector<SelfTestCheck> checks;
    RadicandReport radicand{RadicandVariant::doubled, 0.0, 0.0};

    bool all_pass() const {
        for (const SelfTestCheck& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline StateParams random_state(std::mt19937_64& rng, StateVariant variant) {
    std::uniform_real_distribution<double> ur(0.05, 1.0), ua(0.0, kPi);
    return {variant, ur(rng), ua(rng), ua(rng)};
}

/// Random unitary from the eigenvectors of a random Hermitian matrix.
inline ComplexMatrix random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix h(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Complex z(g(rng), i == j ? 0.0 : g(rng));
            h(i, j) = z;
            h(j, i) = std::conj(z);
        }
    return eig_hermitian(h).eigenvectors;
}

}  // namespace detail

/// Max over same-group pairs (k, l) of |<k| U_par^dag dU_par/dt |l>| with the
/// derivative taken by central finite differences. Zero (to FD accuracy) iff
/// the evolution is parallel-transported in the reference eigenbasis.
inline double transport_defect(const StateParams& state, const ModelParams& model,
                               HamiltonianKind kind, double h_step = 1e-6) {
    const SpectralDecomposition basis = state_eigenbasis(state);
    ModelParams mp = model, mm = model;
    mp.t += h_step;
    mm.t -= h_step;
    const ComplexMatrix u0 = parallel_evolution(state, model, kind);
    const ComplexMatrix up = parallel_evolution(state, mp, kind);
    const ComplexMatrix um = parallel_evolution(state, mm, kind);
    const ComplexMatrix du = (up - um) * Complex(0.5 / h_step);
    const ComplexMatrix cond = u0.adjoint() * du;
    double worst = 0.0;
    const ComplexMatrix& w = basis.eigenvectors;
    const int n = w.dim();
    for (const std::vector<int>& group : basis.groups)
        for (int ka : group)
            for (int kb : group) {
                Complex e = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        e += std::conj(w(i, ka)) * cond(i, j) * w(j, kb);
                worst = std::max(worst, std::abs(e));
            }
    return worst;
}

/// Tr[U V rho] with the degenerate block of the frame basis rotated by an
/// arbitrary unitary; used to verify frame independence.
inline Complex trace_with_rotated_frame(const StateParams& state, const ModelParams& model,
                                        HamiltonianKind kind, const ComplexMatrix& rot3) {
    SpectralDecomposition basis = state_eigenbasis(state);
    ComplexMatrix w = basis.eigenvectors;
    for (int i = 0; i < 4; ++i)
        for (int c = 0; c < 3; ++c) {
            Complex acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += basis.eigenvectors(i, 1 + k) * rot3(k, c);
            w(i, 1 + c) = acc;
        }
    basis.eigenvectors = w;
    const ComplexMatrix h = hamiltonian(model, kind);
    const ParallelFrame frame{std::move(basis), h, model.t};
    const ComplexMatrix u_par = evolution_operator(h, model.t) * parallel_corrector(frame);
    return (u_par * build_state(state)).trace();
}

/// Full invariant suite. mutation_eps != 0 perturbs the closed-form constant
/// in the oracle-equality check (deliberate-fault hook: the suite must then
/// fail).
inline SelfTestReport run_selftest(std::uint64_t seed = 12345, double mutation_eps = 0.0) {
    SelfTestReport rep;
    std::mt19937_64 rng(seed);
    const ModelParams free_model{1.0, 1.0, 0.0, kPi};
    const auto add = [&](std::string name, double metric, double tol, std::string detail = "") {
        rep.checks.push_back({std::move(name), metric < tol, metric, tol, std::move(detail)});
    };

    {  // closed form == numeric pipeline (Eq. 11 domain), both variants
        double worst = 0.0;
        for (StateVariant v : {StateVariant::phi, StateVariant::psi})
            for (int i = 0; i < 500; ++i) {
                const StateParams s = detail::random_state(rng, v);
                const Complex num = nodal_function(s, free_model, HamiltonianKind::free);
                worst = std::max(worst, std::abs(num - Complex(analytic_trace(s) + mutation_eps)));
            }
        add("oracle_closed_form_vs_numeric", worst, 1e-10, "1000 random (r,theta,beta)");
    }

    {  // U_par unitarity, free and Ising
        double worst = 0.0;
        std::uniform_real_distribution<double> uj(0.0, 0.5);
        for (int i = 0; i < 50; ++i) {
            const StateParams s = detail::random_state(rng, StateVariant::phi);
            const ModelParams ising{1.0, 1.0, uj(rng), kPi};
            for (HamiltonianKind k : {HamiltonianKind::free, HamiltonianKind::ising}) {
                const ComplexMatrix u =
                    parallel_evolution(s, k == HamiltonianKind::free ? free_model : ising, k);
                worst = std::max(worst,
                                 (u.adjoint() * u - ComplexMatrix::identity(4)).max_abs());
            }
        }
        add("unitarity", worst, 1e-12, "U_par^dag U_par = I, free + Ising");
    }

    {  // finite-difference parallel-transport condition
        double worst = 0.0;
        std::uniform_real_distribution<double> uj(0.0, 0.5);
        for (int i = 0; i < 20; ++i) {
            const StateParams s = detail::random_state(rng, StateVariant::phi);
            worst = std::max(worst, transport_defect(s, free_model, HamiltonianKind::free));
            const ModelParams ising{1.0, 1.0, uj(rng), kPi};
            worst = std::max(worst, transport_defect(s, ising, HamiltonianKind::ising));
        }
        add("parallel_transport_fd", worst, 1e-5, "central differences, step 1e-6");
    }

    {  // frame independence of the trace under degenerate-block rotation
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const StateParams s = detail::random_state(rng, StateVariant::phi);
            const Complex base = nodal_function(s, free_model, HamiltonianKind::free);
            const ComplexMatrix rot = detail::random_unitary(3, rng);
            const Complex alt =
                trace_with_rotated_frame(s, free_model, HamiltonianKind::free, rot);
            worst = std::max(worst, std::abs(base - alt));
        }
        add("frame_independence", worst, 1e-10, "random degenerate-basis rotation");
    }

    {  // closed-form radicand adjudication for the two-index phase
        rep.radicand = adjudicate_radicand(StateVariant::phi, 100, rng);
        const RadicandReport psi = adjudicate_radicand(StateVariant::psi, 100, rng);
        rep.radicand.max_dev_as_printed =
            std::max(rep.radicand.max_dev_as_printed, psi.max_dev_as_printed);
        rep.radicand.max_dev_doubled = std::max(rep.radicand.max_dev_doubled, psi.max_dev_doubled);
        const double best =
            std::min(rep.radicand.max_dev_as_printed, rep.radicand.max_dev_doubled);
        add("radicand_adjudication", best, 1e-10,
            rep.radicand.selected == RadicandVariant::doubled ? "selected=doubled"
                                                              : "selected=as_printed");
    }

    {  // PPT bisection reproduces the closed-form boundary
        double worst = 0.0;
        for (int i = 0; i < 64; ++i) {
            const double theta = kPi * i / 63.0;
            worst = std::max(worst, std::abs(boundary_by_bisection(theta, StateVariant::phi) -
                                             separability_boundary(theta)));
        }
        add("ppt_boundary_bisection", worst, 1e-6, "64 theta values");
    }

    {  // Werner line flatness
        double worst = 0.0;
        for (int i = 1; i <= 128; ++i) {
            const StateParams s{StateVariant::phi, i / 128.0, kPi / 4.0, 0.0};
            worst = std::max(
                worst, std::abs(nodal_function(s, free_model, HamiltonianKind::free) - Complex(1.0)));
        }
        add("werner_trace_is_one", worst, 1e-10, "theta=pi/4, beta=0, 128 r values");
    }

    {  // eigensolver reassembly on random Hermitian matrices
        double worst = 0.0;
        std::normal_distribution<double> g(0.0, 1.0);
        for (int rep_i = 0; rep_i < 100; ++rep_i) {
            const int n = 2 + static_cast<int>(rng() % 7);
            ComplexMatrix h(n);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    const Complex z(g(rng), i == j ? 0.0 : g(rng));
                    h(i, j) = z;
                    h(j, i) = std::conj(z);
                }
            const SpectralDecomposition d = eig_hermitian(h);
            worst = std::max(worst, (d.reassemble() - h).max_abs());
        }
        add("eig_reassembly", worst, 1e-12, "100 random Hermitian, dims 2-8");
    }

    return rep;
}

}  // namespace gpnodal
